//! Exact probabilities of counterfactuals over finite discrete causal models.
//!
//! A counterfactual `A => B` is evaluated by enumerating the exact
//! truthmakers of `A` as interventions, measuring how far each resulting
//! submodel is from the original in terms of counterfactual dependencies,
//! and averaging `p_s(B)` with weights inversely proportional to those
//! distances. Conjunctive antecedents reduce to Pearl's
//! evidence/intervention/evaluation procedure. A possible-worlds imaging
//! baseline is included for comparison.
//!
//! ```
//! use tmcf::{cf_probability, fixtures, parse_query, prob, DependenceMode, Evidence, Weighting};
//!
//! let m = fixtures::execution();
//! let q = parse_query("(X=0 | Y=0) => D=0").unwrap();
//! let e = Evidence::from_pairs([("D", 1)]).unwrap();
//! let r = cf_probability(&m, &q, &e, Weighting::InverseDistance, DependenceMode::Probabilistic).unwrap();
//! assert_eq!(r.value, prob(801, 1250));
//! ```

pub mod counterfactual;
pub mod error;
pub mod fixtures;
pub mod formula;
pub mod imaging;
pub mod inference;
pub mod intervention;
pub mod model;
pub mod modelfile;
mod par;
pub mod rational;
pub mod truthmaker;

pub use counterfactual::{
    briggs_truth, cf_probability, dependencies, distance, weights, CfProbability, DependenceMode, DependencyRelation,
    SubmodelTerm, WeightedSubmodel, WeightedSubmodels, Weighting,
};
pub use error::{Error, Result};
pub use formula::{eval_static, parse_formula, parse_query, CounterfactualQuery, Formula, SyntaxError};
pub use imaging::{
    enumerate_worlds, generate_selection, image, imaging_cf_probability, pearl_equivalence_check, SelectionFunction,
    SelectionMode, Transfer, WorldDistribution,
};
pub use inference::{conditional_prob, do_prob, joint, pearl_counterfactual, update_evidence, Evidence, JointDistribution};
pub use intervention::{apply_deterministic, apply_probabilistic, fuse, Intervention};
pub use model::{
    validate_model, Assignment, CausalGraph, DeterministicModel, Model, ModelSpec, ProbabilisticModel, ValidationReport,
    VariableId,
};
pub use par::is_parallel;
pub use rational::{format_decimal, format_exact, parse_prob, prob, Prob};
pub use truthmaker::{falsemakers, truthmakers, TruthmakerSet};
