//! Interventions `do(V1=v1, ..., Vn=vn)`, their fusion, and the submodels
//! they generate.

use std::cmp::Ordering;
use std::fmt;

use crate::error::Result;
use crate::model::{Assignment, DeterministicModel, ProbabilisticModel, VariableId};

/// An admissible intervention: at most one value per variable.
///
/// Ordered by size first so that `do(X=0)` sorts before `do(X=0, Y=0)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Intervention(Assignment);

impl Intervention {
    pub fn new(assignment: Assignment) -> Self {
        Self(assignment)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(var: VariableId, value: i64) -> Self {
        let mut a = Assignment::new();
        a.insert(var, value).expect("fresh assignment");
        Self(a)
    }

    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, i64)>,
        S: AsRef<str>,
    {
        Assignment::from_pairs(pairs).map(Self)
    }

    pub fn assignment(&self) -> &Assignment {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn variables(&self) -> impl Iterator<Item = &VariableId> {
        self.0.iter().map(|(k, _)| k)
    }
}

impl Ord for Intervention {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Intervention {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Intervention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "do({})", self.0)
    }
}

/// Union of two interventions; fails when they assign one variable two values.
pub fn fuse(a: &Intervention, b: &Intervention) -> Result<Intervention> {
    let mut out = a.0.clone();
    for (k, v) in b.0.iter() {
        out.insert(k.clone(), v)?;
    }
    Ok(Intervention(out))
}

/// Submodel `M[A]`: intervened equations removed, intervened values fixed,
/// everything else recomputed from the exogenous values.
pub fn apply_deterministic(m: &DeterministicModel, i: &Intervention) -> Result<DeterministicModel> {
    let bound = i.0.bind(m.graph())?;
    let mut out = m.clone();
    for &(idx, value) in &bound {
        out.graph.cut_incoming(idx);
        out.equations[idx] = None;
        out.actual[idx] = value;
    }
    out.recompute();
    Ok(out)
}

/// Post-intervention model: intervened variables lose their incoming edges
/// and get a point mass at the forced value. Other tables are untouched.
pub fn apply_probabilistic(m: &ProbabilisticModel, i: &Intervention) -> Result<ProbabilisticModel> {
    let bound = i.0.bind(m.graph())?;
    let mut out = m.clone();
    for &(idx, value) in &bound {
        out.force(idx, value);
    }
    Ok(out)
}
