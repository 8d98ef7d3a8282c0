//! Exact truthmakers and falsemakers of formulas, as sets of interventions.
//!
//! The clauses, with `⊔` the (partial) fusion of interventions:
//!
//! | formula  | truthmakers                      | falsemakers                      |
//! |----------|----------------------------------|----------------------------------|
//! | `V=v`    | `do(V=v)`                        | `do(V=v')` for each `v' != v`    |
//! | `!A`     | falsemakers of `A`               | truthmakers of `A`               |
//! | `A & B`  | `t ⊔ u`, `t ⊩ A`, `u ⊩ B`        | `⫣A ∪ ⫣B ∪ ⫣(A | B)`             |
//! | `A | B`  | `⊩A ∪ ⊩B ∪ ⊩(A & B)`             | `t ⊔ u`, `t ⫣ A`, `u ⫣ B`        |
//!
//! Undefined fusions are dropped. Sets are not minimized.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::formula::Formula;
use crate::intervention::{fuse, Intervention};
use crate::model::CausalGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthmakerSet {
    pub formula: Formula,
    pub members: BTreeSet<Intervention>,
}

impl TruthmakerSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Intervention> {
        self.members.iter()
    }

    pub fn contains(&self, i: &Intervention) -> bool {
        self.members.contains(i)
    }

    /// Members with the fewest intervened variables.
    pub fn minimal_cardinality(&self) -> Vec<&Intervention> {
        let min = self.members.iter().map(Intervention::len).min().unwrap_or(0);
        self.members.iter().filter(|i| i.len() == min).collect()
    }
}

type Set = BTreeSet<Intervention>;

fn fusions(a: &Set, b: &Set) -> Set {
    a.iter().flat_map(|t| b.iter().filter_map(move |u| fuse(t, u).ok())).collect()
}

fn verifiers(f: &Formula, graph: &CausalGraph) -> Result<Set> {
    Ok(match f {
        Formula::Atom { var, value } => {
            f.bind(graph)?;
            Set::from([Intervention::single(var.clone(), *value)])
        }
        Formula::Not(a) => falsifiers(a, graph)?,
        Formula::And(a, b) => fusions(&verifiers(a, graph)?, &verifiers(b, graph)?),
        Formula::Or(a, b) => {
            let ta = verifiers(a, graph)?;
            let tb = verifiers(b, graph)?;
            let both = fusions(&ta, &tb);
            ta.into_iter().chain(tb).chain(both).collect()
        }
    })
}

fn falsifiers(f: &Formula, graph: &CausalGraph) -> Result<Set> {
    Ok(match f {
        Formula::Atom { var, value } => {
            f.bind(graph)?;
            let idx = graph.index_of(var.as_str())?;
            graph
                .range(idx)
                .values()
                .iter()
                .filter(|&&v| v != *value)
                .map(|&v| Intervention::single(var.clone(), v))
                .collect()
        }
        Formula::Not(a) => verifiers(a, graph)?,
        Formula::And(a, b) => {
            let fa = falsifiers(a, graph)?;
            let fb = falsifiers(b, graph)?;
            let both = fusions(&fa, &fb);
            fa.into_iter().chain(fb).chain(both).collect()
        }
        Formula::Or(a, b) => fusions(&falsifiers(a, graph)?, &falsifiers(b, graph)?),
    })
}

/// Exact truthmakers `|f|` of `f`. Empty when `f` cannot be made true by
/// any admissible intervention.
pub fn truthmakers(f: &Formula, graph: &CausalGraph) -> Result<TruthmakerSet> {
    Ok(TruthmakerSet { formula: f.clone(), members: verifiers(f, graph)? })
}

pub fn falsemakers(f: &Formula, graph: &CausalGraph) -> Result<TruthmakerSet> {
    Ok(TruthmakerSet { formula: f.clone(), members: falsifiers(f, graph)? })
}
