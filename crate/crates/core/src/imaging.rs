//! Possible-worlds baseline: selection functions and imaging.
//!
//! Worlds are the total assignments in [`world_at`] order and are labelled
//! `w1, w2, ...`. Imaging a distribution on `A` moves the mass of each
//! `¬A`-world `w` onto the selected worlds `f(w)`:
//!
//! ```text
//! lewis:  p_A(w') = Σ_w p(w) · [f(w) = {w'}]
//! bayes:  p_A(w') = Σ_w p(w) · [w' ∈ f(w)] · p(w') / p(f(w))
//! equal:  p_A(w') = Σ_w p(w) · [w' ∈ f(w)] / |f(w)|
//! ```

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Zero;

use crate::counterfactual::{consequent_probs, convexity_bounds};
use crate::error::{Error, Result};
use crate::formula::{BoundFormula, CounterfactualQuery, Formula};
use crate::inference::{all_worlds, do_prob, joint, update_evidence, world_count, world_index, Evidence};
use crate::intervention::Intervention;
use crate::model::{CausalGraph, ProbabilisticModel};
use crate::par;
use crate::rational::Prob;
use crate::truthmaker::truthmakers;

/// A probability for each world, in world order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorldDistribution {
    worlds: Vec<Vec<i64>>,
    weights: Vec<Prob>,
}

impl WorldDistribution {
    pub fn new(worlds: Vec<Vec<i64>>, weights: Vec<Prob>) -> Self {
        assert_eq!(worlds.len(), weights.len());
        Self { worlds, weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn worlds(&self) -> &[Vec<i64>] {
        &self.worlds
    }

    pub fn weights(&self) -> &[Prob] {
        &self.weights
    }

    /// Weight of the world with 1-based label `label`.
    pub fn weight(&self, label: usize) -> &Prob {
        &self.weights[label - 1]
    }

    pub fn total(&self) -> Prob {
        self.weights.iter().fold(Prob::zero(), |a, b| a + b)
    }

    pub fn prob(&self, graph: &CausalGraph, f: &Formula) -> Result<Prob> {
        let bound = f.bind(graph)?;
        Ok(self.mass_where(&bound))
    }

    fn mass_where(&self, f: &BoundFormula) -> Prob {
        self.worlds
            .iter()
            .zip(&self.weights)
            .filter(|(w, _)| f.eval(w))
            .fold(Prob::zero(), |a, (_, p)| a + p)
    }
}

/// All worlds of `m` weighted by the joint distribution.
pub fn enumerate_worlds(m: &ProbabilisticModel) -> WorldDistribution {
    let jd = joint(m);
    WorldDistribution::new(jd.worlds().to_vec(), jd.probs().to_vec())
}

/// Closest `A`-worlds for every world, as 0-based world indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionFunction {
    antecedent: Formula,
    targets: Vec<BTreeSet<usize>>,
}

impl SelectionFunction {
    /// Checks that every world selects a non-empty set of `A`-worlds and
    /// that `A`-worlds select only themselves.
    pub fn new(graph: &CausalGraph, antecedent: Formula, targets: Vec<BTreeSet<usize>>) -> Result<Self> {
        let worlds = all_worlds(graph);
        if targets.len() != worlds.len() {
            return Err(Error::InvalidSelection(format!(
                "expected {} worlds, got {}",
                worlds.len(),
                targets.len()
            )));
        }
        let a = antecedent.bind(graph)?;
        for (i, set) in targets.iter().enumerate() {
            let label = i + 1;
            if set.is_empty() {
                return Err(Error::InvalidSelection(format!("w{label} selects no world")));
            }
            if let Some(&bad) = set.iter().find(|&&j| j >= worlds.len() || !a.eval(&worlds[j])) {
                return Err(Error::InvalidSelection(format!(
                    "w{label} selects w{}, which does not satisfy {antecedent}",
                    bad + 1
                )));
            }
            if a.eval(&worlds[i]) && (set.len() != 1 || !set.contains(&i)) {
                return Err(Error::InvalidSelection(format!("w{label} satisfies {antecedent} but does not select itself")));
            }
        }
        Ok(Self { antecedent, targets })
    }

    /// Reads `w<i> -> w<j>,w<k>,...` lines. Worlds satisfying the
    /// antecedent may be omitted and then select themselves.
    pub fn parse_fixture(graph: &CausalGraph, antecedent: Formula, text: &str) -> Result<Self> {
        let n = world_count(graph);
        let a = antecedent.bind(graph)?;
        let worlds = all_worlds(graph);
        let mut targets: Vec<Option<BTreeSet<usize>>> = vec![None; n];
        let label = |line: usize, s: &str| -> Result<usize> {
            let t = s.trim();
            t.strip_prefix('w')
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&k| k >= 1 && k <= n)
                .map(|k| k - 1)
                .ok_or_else(|| Error::InvalidSelection(format!("line {line}: `{t}` is not a world label w1..w{n}")))
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (from, to) = content
                .split_once("->")
                .ok_or_else(|| Error::InvalidSelection(format!("line {line}: expected `w<i> -> w<j>,...`")))?;
            let from = label(line, from)?;
            let set = to
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| label(line, s))
                .collect::<Result<BTreeSet<_>>>()?;
            if targets[from].replace(set).is_some() {
                return Err(Error::InvalidSelection(format!("line {line}: w{} listed twice", from + 1)));
            }
        }
        let mut full = Vec::with_capacity(n);
        for (i, t) in targets.into_iter().enumerate() {
            match t {
                Some(set) => full.push(set),
                None if a.eval(&worlds[i]) => full.push(BTreeSet::from([i])),
                None => return Err(Error::InvalidSelection(format!("no selection given for w{}", i + 1))),
            }
        }
        Self::new(graph, antecedent, full)
    }

    pub fn antecedent(&self) -> &Formula {
        &self.antecedent
    }

    /// Selected worlds of the world with 1-based label `label`, as labels.
    pub fn select(&self, label: usize) -> Vec<usize> {
        self.targets[label - 1].iter().map(|j| j + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

impl fmt::Display for SelectionFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# selection on {}", self.antecedent)?;
        for (i, set) in self.targets.iter().enumerate() {
            let to: Vec<String> = set.iter().map(|j| format!("w{}", j + 1)).collect();
            writeln!(f, "w{} -> {}", i + 1, to.join(","))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SelectionMode {
    /// Only the smallest truthmakers of the antecedent.
    #[default]
    Singletons,
    AllTruthmakers,
}

/// Worlds that agree with `world` off the intervened variables and their
/// descendants and take the intervention's values on it.
fn causal_history_matches(graph: &CausalGraph, worlds: &[Vec<i64>], world: &[i64], i: &Intervention) -> Result<Vec<usize>> {
    let bound = i.assignment().bind(graph)?;
    let sources: Vec<usize> = bound.iter().map(|&(v, _)| v).collect();
    let free = graph.descendant_mask(&sources);
    Ok(worlds
        .iter()
        .enumerate()
        .filter(|(_, w)| {
            (0..graph.len()).all(|v| match bound.iter().find(|&&(u, _)| u == v) {
                Some(&(_, value)) => w[v] == value,
                None => free[v] || w[v] == world[v],
            })
        })
        .map(|(j, _)| j)
        .collect())
}

/// Selection built from the antecedent's truthmakers: a `¬A`-world selects
/// the worlds sharing its causal history outside each chosen intervention.
pub fn generate_selection(m: &ProbabilisticModel, a: &Formula, mode: SelectionMode) -> Result<SelectionFunction> {
    let graph = m.graph();
    let tms = truthmakers(a, graph)?;
    if tms.is_empty() {
        return Err(Error::UnsatisfiableAntecedent(a.to_string()));
    }
    let chosen: Vec<&Intervention> = match mode {
        SelectionMode::Singletons => tms.minimal_cardinality(),
        SelectionMode::AllTruthmakers => tms.iter().collect(),
    };
    let bound = a.bind(graph)?;
    let worlds = all_worlds(graph);
    let targets = par::map_range(worlds.len(), |wi| -> Result<BTreeSet<usize>> {
        if bound.eval(&worlds[wi]) {
            return Ok(BTreeSet::from([wi]));
        }
        let mut set = BTreeSet::new();
        for i in &chosen {
            set.extend(causal_history_matches(graph, &worlds, &worlds[wi], i)?);
        }
        Ok(set)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    SelectionFunction::new(graph, a.clone(), targets)
}

/// Every `¬A`-world selects every `A`-world.
pub fn full_selection(graph: &CausalGraph, a: &Formula) -> Result<SelectionFunction> {
    let bound = a.bind(graph)?;
    let worlds = all_worlds(graph);
    let a_worlds: BTreeSet<usize> = (0..worlds.len()).filter(|&j| bound.eval(&worlds[j])).collect();
    if a_worlds.is_empty() {
        return Err(Error::UnsatisfiableAntecedent(a.to_string()));
    }
    let targets =
        (0..worlds.len()).map(|j| if a_worlds.contains(&j) { BTreeSet::from([j]) } else { a_worlds.clone() }).collect();
    SelectionFunction::new(graph, a.clone(), targets)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Transfer {
    /// Each world needs exactly one closest world.
    LewisUnique,
    /// Split in proportion to the receiving worlds' weights.
    #[default]
    Bayes,
    /// Split evenly.
    Equal,
}

/// `dist` imaged on the antecedent of `f`. Under `Bayes`, a selected set
/// with total weight zero receives an even split.
pub fn image(dist: &WorldDistribution, f: &SelectionFunction, transfer: Transfer) -> Result<WorldDistribution> {
    if f.targets.len() != dist.len() {
        return Err(Error::InvalidSelection(format!(
            "selection covers {} worlds, distribution {}",
            f.targets.len(),
            dist.len()
        )));
    }
    if transfer == Transfer::LewisUnique {
        if let Some((i, set)) = f.targets.iter().enumerate().find(|(_, s)| s.len() != 1) {
            return Err(Error::NonUniqueSelection(i + 1, set.len()));
        }
    }
    let shares = par::map_range(dist.len(), |i| -> Vec<(usize, Prob)> {
        let mass = &dist.weights[i];
        let set = &f.targets[i];
        if mass.is_zero() {
            return Vec::new();
        }
        let even = || set.iter().map(|&j| (j, mass / Prob::from_integer((set.len() as i64).into()))).collect();
        match transfer {
            Transfer::LewisUnique | Transfer::Equal => even(),
            Transfer::Bayes => {
                let total = set.iter().fold(Prob::zero(), |a, &j| a + &dist.weights[j]);
                if total.is_zero() {
                    even()
                } else {
                    set.iter().map(|&j| (j, mass * &dist.weights[j] / &total)).collect()
                }
            }
        }
    });
    let mut weights = vec![Prob::zero(); dist.len()];
    for (j, p) in shares.into_iter().flatten() {
        weights[j] += p;
    }
    Ok(WorldDistribution::new(dist.worlds.clone(), weights))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImagingResult {
    pub value: Prob,
    pub imaged: WorldDistribution,
    /// `[min, max]` of the consequent over the antecedent's truthmaking submodels.
    pub cms_bounds: (Prob, Prob),
}

impl ImagingResult {
    pub fn violates_convexity(&self) -> bool {
        self.value < self.cms_bounds.0 || self.value > self.cms_bounds.1
    }
}

/// Update on `e`, image on the antecedent, sum the consequent worlds.
pub fn imaging_cf_probability(
    m: &ProbabilisticModel,
    q: &CounterfactualQuery,
    e: &Evidence,
    f: &SelectionFunction,
    transfer: Transfer,
) -> Result<ImagingResult> {
    if *f.antecedent() != q.antecedent {
        return Err(Error::InvalidSelection(format!(
            "selection is for {}, query antecedent is {}",
            f.antecedent(),
            q.antecedent
        )));
    }
    let consequent = q.consequent.bind(m.graph())?;
    let prior = enumerate_worlds(&update_evidence(m, e)?);
    let imaged = image(&prior, f, transfer)?;
    let value = imaged.mass_where(&consequent);
    let (_, probs) = consequent_probs(m, q, e)?;
    Ok(ImagingResult { value, imaged, cms_bounds: convexity_bounds(&probs) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    /// Bayes imaging under the causal-history selection.
    pub imaging: Prob,
    pub do_prob: Prob,
    pub equal: bool,
}

/// Compares `p_A(B)` from imaging with `p_do(A)(B)` for a conjunction `A`.
pub fn pearl_equivalence_check(
    m: &ProbabilisticModel,
    antecedent: &Formula,
    consequent: &Formula,
    e: &Evidence,
) -> Result<EquivalenceReport> {
    let assignment = match antecedent.as_conjunction() {
        Ok(a) => a,
        Err(Error::Inconsistent { .. }) => return Err(Error::UnsatisfiableAntecedent(antecedent.to_string())),
        Err(other) => return Err(other),
    };
    let updated = update_evidence(m, e)?;
    let f = generate_selection(m, antecedent, SelectionMode::Singletons)?;
    let imaged = image(&enumerate_worlds(&updated), &f, Transfer::Bayes)?;
    let imaging = imaged.prob(m.graph(), consequent)?;
    let do_prob = do_prob(&updated, &Intervention::new(assignment), consequent)?;
    Ok(EquivalenceReport { equal: imaging == do_prob, imaging, do_prob })
}

/// 1-based label of a world.
pub fn world_label(graph: &CausalGraph, world: &[i64]) -> usize {
    world_index(graph, world) + 1
}
