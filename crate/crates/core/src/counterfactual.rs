//! Probabilities of counterfactuals with arbitrary Boolean antecedents.
//!
//! The antecedent's truthmaking submodels are weighted by their similarity
//! to the original model and the consequent's post-intervention probability
//! is averaged under those weights:
//!
//! ```text
//! p(A □→ B) = Σ_{s ∈ |A|} α(s) · p_s(B),   α(s) ∝ 1 / d(M, s)
//! ```
//!
//! where `d(M, s)` counts the counterfactual dependencies on which `M` and
//! `s` disagree, normalized by the `n·(n−1)` ordered variable pairs.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::formula::{eval_static, CounterfactualQuery};
use crate::inference::{do_prob, marginals, update_evidence, Evidence};
use crate::intervention::{apply_deterministic, apply_probabilistic, Intervention};
use crate::model::{DeterministicModel, ProbabilisticModel, VariableId};
use crate::par;
use crate::rational::Prob;
use crate::truthmaker::{truthmakers, TruthmakerSet};

/// How counterfactual dependence between two variables is decided.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DependenceMode {
    /// Some intervention on `V1` changes the marginal of `V2`.
    #[default]
    Probabilistic,
    /// `V2` is a descendant of `V1` in the (post-intervention) graph.
    Structural,
}

/// Ordered pairs `(V1, V2)` where `V2` counterfactually depends on `V1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyRelation {
    pub pairs: BTreeSet<(VariableId, VariableId)>,
    /// `n·(n−1)` for `n` variables.
    pub universe_size: usize,
}

impl DependencyRelation {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, cause: &str, effect: &str) -> bool {
        self.pairs.iter().any(|(a, b)| a.as_str() == cause && b.as_str() == effect)
    }
}

pub fn dependencies(m: &ProbabilisticModel, mode: DependenceMode) -> DependencyRelation {
    let graph = m.graph();
    let n = graph.len();
    let rows: Vec<Vec<usize>> = match mode {
        DependenceMode::Structural => (0..n)
            .map(|cause| {
                let mask = graph.descendant_mask(&[cause]);
                (0..n).filter(|&e| mask[e]).collect()
            })
            .collect(),
        DependenceMode::Probabilistic => {
            let base = marginals(m);
            let causes: Vec<usize> = (0..n).collect();
            par::map(&causes, |&cause| {
                let mut affected = vec![false; n];
                for &value in graph.range(cause).values() {
                    let forced = apply_probabilistic(m, &Intervention::single(graph.id(cause).clone(), value))
                        .expect("value drawn from the range");
                    for (effect, marginal) in marginals(&forced).into_iter().enumerate() {
                        if effect != cause && marginal != base[effect] {
                            affected[effect] = true;
                        }
                    }
                }
                (0..n).filter(|&e| affected[e]).collect()
            })
        }
    };
    let pairs = rows
        .into_iter()
        .enumerate()
        .flat_map(|(cause, effects)| {
            effects.into_iter().map(move |e| (graph.id(cause).clone(), graph.id(e).clone()))
        })
        .collect();
    DependencyRelation { pairs, universe_size: n * n.saturating_sub(1) }
}

fn relation_distance(a: &DependencyRelation, b: &DependencyRelation) -> Prob {
    if a.universe_size == 0 {
        return Prob::zero();
    }
    let disagreements = a.pairs.symmetric_difference(&b.pairs).count();
    Prob::new((disagreements as i64).into(), (a.universe_size as i64).into())
}

fn same_variables(m: &ProbabilisticModel, s: &ProbabilisticModel) -> bool {
    let ids = |x: &ProbabilisticModel| x.graph().variables().iter().map(|v| v.id.clone()).collect::<Vec<_>>();
    ids(m) == ids(s)
}

/// Number of dependency pairs on which the models disagree, over `n·(n−1)`.
pub fn distance(m: &ProbabilisticModel, s: &ProbabilisticModel, mode: DependenceMode) -> Result<Prob> {
    if !same_variables(m, s) {
        return Err(Error::VariableMismatch);
    }
    Ok(relation_distance(&dependencies(m, mode), &dependencies(s, mode)))
}

/// How truthmaking submodels are weighted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Weighting {
    /// Weight proportional to `1/d(M, s)`.
    #[default]
    InverseDistance,
    /// Straight average.
    Uniform,
    /// All weight on the closest submodels, split evenly among ties.
    NearestOnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedSubmodel {
    pub intervention: Intervention,
    pub distance: Prob,
    pub weight: Prob,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedSubmodels {
    pub items: Vec<WeightedSubmodel>,
    /// Some member sat at distance zero and absorbed all of the weight.
    pub zero_distance_rule: bool,
}

impl WeightedSubmodels {
    pub fn total_weight(&self) -> Prob {
        self.items.iter().fold(Prob::zero(), |a, i| a + &i.weight)
    }
}

fn split_evenly(distances: &[Prob], selected: impl Fn(&Prob) -> bool) -> Vec<Prob> {
    let count = distances.iter().filter(|d| selected(d)).count() as i64;
    distances
        .iter()
        .map(|d| if selected(d) { Prob::new(1.into(), count.into()) } else { Prob::zero() })
        .collect()
}

/// Normalized weights for the given distances. A member at distance zero
/// takes the `d → 0` limit of the inverse-distance rule: the zero-distance
/// members share all of the weight.
pub fn weights_for(distances: &[Prob], strategy: Weighting) -> (Vec<Prob>, bool) {
    assert!(!distances.is_empty(), "weights need at least one member");
    match strategy {
        Weighting::Uniform => (split_evenly(distances, |_| true), false),
        Weighting::NearestOnly => {
            let min = distances.iter().min().expect("non-empty").clone();
            (split_evenly(distances, |d| *d == min), false)
        }
        Weighting::InverseDistance => {
            if distances.iter().any(Zero::is_zero) {
                return (split_evenly(distances, Zero::is_zero), true);
            }
            let inverses: Vec<Prob> = distances.iter().map(|d| d.recip()).collect();
            let total = inverses.iter().fold(Prob::zero(), |a, b| a + b);
            (inverses.into_iter().map(|i| i / &total).collect(), false)
        }
    }
}

pub fn weights(
    m: &ProbabilisticModel,
    tms: &TruthmakerSet,
    strategy: Weighting,
    mode: DependenceMode,
) -> Result<WeightedSubmodels> {
    if tms.is_empty() {
        return Err(Error::UnsatisfiableAntecedent(tms.formula.to_string()));
    }
    let base = dependencies(m, mode);
    let members: Vec<&Intervention> = tms.iter().collect();
    let distances = par::map(&members, |i| -> Result<Prob> {
        let s = apply_probabilistic(m, i)?;
        Ok(relation_distance(&base, &dependencies(&s, mode)))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (ws, zero_distance_rule) = weights_for(&distances, strategy);
    let items = members
        .into_iter()
        .zip(distances)
        .zip(ws)
        .map(|((i, distance), weight)| WeightedSubmodel { intervention: i.clone(), distance, weight })
        .collect();
    Ok(WeightedSubmodels { items, zero_distance_rule })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmodelTerm {
    pub intervention: Intervention,
    pub distance: Prob,
    pub weight: Prob,
    /// `p_s(B)` after the evidence update.
    pub consequent_prob: Prob,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfProbability {
    pub value: Prob,
    pub breakdown: Vec<SubmodelTerm>,
    /// `min_s p_s(B)` and `max_s p_s(B)`.
    pub bounds: (Prob, Prob),
    pub zero_distance_rule: bool,
}

impl CfProbability {
    pub fn within_bounds(&self) -> bool {
        self.bounds.0 <= self.value && self.value <= self.bounds.1
    }
}

/// `p_s(B)` for every truthmaker `s` of the antecedent, after updating on `e`.
pub fn consequent_probs(
    m: &ProbabilisticModel,
    q: &CounterfactualQuery,
    e: &Evidence,
) -> Result<(TruthmakerSet, Vec<Prob>)> {
    let tms = truthmakers(&q.antecedent, m.graph())?;
    if tms.is_empty() {
        return Err(Error::UnsatisfiableAntecedent(q.antecedent.to_string()));
    }
    q.consequent.bind(m.graph())?;
    let updated = update_evidence(m, e)?;
    let members: Vec<&Intervention> = tms.iter().collect();
    let probs = par::map(&members, |i| do_prob(&updated, i, &q.consequent))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok((tms, probs))
}

/// Convex hull `[min, max]` of the consequent probabilities.
pub fn convexity_bounds(probs: &[Prob]) -> (Prob, Prob) {
    let min = probs.iter().min().cloned().unwrap_or_else(Prob::zero);
    let max = probs.iter().max().cloned().unwrap_or_else(Prob::one);
    (min, max)
}

/// Similarity-weighted probability of `q` given evidence `e`.
///
/// Distances are measured on the prior model; only the consequent
/// probabilities see the evidence.
pub fn cf_probability(
    m: &ProbabilisticModel,
    q: &CounterfactualQuery,
    e: &Evidence,
    strategy: Weighting,
    mode: DependenceMode,
) -> Result<CfProbability> {
    let (tms, probs) = consequent_probs(m, q, e)?;
    let weighted = weights(m, &tms, strategy, mode)?;
    let value = weighted.items.iter().zip(&probs).fold(Prob::zero(), |acc, (w, p)| acc + &w.weight * p);
    let bounds = convexity_bounds(&probs);
    let breakdown = weighted
        .items
        .into_iter()
        .zip(probs)
        .map(|(w, consequent_prob)| SubmodelTerm {
            intervention: w.intervention,
            distance: w.distance,
            weight: w.weight,
            consequent_prob,
        })
        .collect();
    Ok(CfProbability { value, breakdown, bounds, zero_distance_rule: weighted.zero_distance_rule })
}

/// Truth at a deterministic model: the consequent holds in every submodel
/// that truthmakes the antecedent. An antecedent without truthmakers is an
/// error rather than vacuously true.
pub fn briggs_truth(m: &DeterministicModel, q: &CounterfactualQuery) -> Result<bool> {
    let tms = truthmakers(&q.antecedent, m.graph())?;
    if tms.is_empty() {
        return Err(Error::UnsatisfiableAntecedent(q.antecedent.to_string()));
    }
    q.consequent.bind(m.graph())?;
    for s in tms.iter() {
        if !eval_static(&apply_deterministic(m, s)?, &q.consequent)? {
            return Ok(false);
        }
    }
    Ok(true)
}
