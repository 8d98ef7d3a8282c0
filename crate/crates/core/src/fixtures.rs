//! The execution example and a few small models used by tests, benches
//! and the CLI.

use crate::model::{CptRowSpec, DeterministicModel, EquationRowSpec, MechanismSpec, ModelSpec, ProbabilisticModel};
use crate::rational::parse_prob;

pub const EXECUTION: &str = include_str!("../../../models/execution.cm");
pub const EXECUTION_DETERMINISTIC: &str = include_str!("../../../models/execution-det.cm");
pub const ABC: &str = include_str!("../../../models/ab-equal.cm");
pub const SELECTION_F1: &str = include_str!("../../../models/selection-f1.sel");
pub const SELECTION_F2: &str = include_str!("../../../models/selection-f2.sel");

fn cond(pairs: &[(&str, i64)]) -> Vec<(String, i64)> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

#[allow(clippy::type_complexity)]
fn graph_parts() -> (Vec<(String, Vec<i64>)>, Vec<(String, Vec<String>)>) {
    let variables = ["C", "X", "Y", "D"].iter().map(|n| (n.to_string(), vec![0, 1])).collect();
    let parents = vec![
        ("X".to_string(), vec!["C".to_string()]),
        ("Y".to_string(), vec!["C".to_string()]),
        ("D".to_string(), vec!["X".to_string(), "Y".to_string()]),
    ];
    (variables, parents)
}

/// The probabilistic execution model, built without the file parser.
pub fn execution_spec() -> ModelSpec {
    let row = |child: &str, c: &[(&str, i64)], dist: &[(i64, &str)]| CptRowSpec {
        child: child.to_string(),
        condition: cond(c),
        distribution: dist.iter().map(|&(v, p)| (v, parse_prob(p).expect("literal"))).collect(),
    };
    let (variables, parents) = graph_parts();
    let rows = vec![
        row("C", &[], &[(1, "0.5"), (0, "0.5")]),
        row("X", &[("C", 1)], &[(1, "0.9"), (0, "0.1")]),
        row("X", &[("C", 0)], &[(1, "0.1"), (0, "0.9")]),
        row("Y", &[("C", 1)], &[(1, "0.9"), (0, "0.1")]),
        row("Y", &[("C", 0)], &[(1, "0.1"), (0, "0.9")]),
        row("D", &[("X", 1), ("Y", 0)], &[(0, "0.5"), (1, "0.5")]),
        row("D", &[("X", 0), ("Y", 1)], &[(0, "0.5"), (1, "0.5")]),
        row("D", &[("X", 0), ("Y", 0)], &[(0, "0.9"), (1, "0.1")]),
        row("D", &[("X", 1), ("Y", 1)], &[(0, "0.1"), (1, "0.9")]),
    ];
    ModelSpec {
        variables,
        parents,
        mechanism: MechanismSpec::Probabilistic(rows),
        actual: vec![],
        evidence: cond(&[("D", 1)]),
    }
}

/// `X = C`, `Y = C`, `D = max(X, Y)` with the captain signalling.
pub fn execution_deterministic_spec() -> ModelSpec {
    let (variables, parents) = graph_parts();
    let eq = |child: &str, c: &[(&str, i64)], value| EquationRowSpec { child: child.to_string(), condition: cond(c), value };
    let mut rows = Vec::new();
    for c in [0, 1] {
        rows.push(eq("X", &[("C", c)], c));
    }
    for c in [0, 1] {
        rows.push(eq("Y", &[("C", c)], c));
    }
    for x in [0, 1] {
        for y in [0, 1] {
            rows.push(eq("D", &[("X", x), ("Y", y)], x.max(y)));
        }
    }
    ModelSpec {
        variables,
        parents,
        mechanism: MechanismSpec::Deterministic(rows),
        actual: cond(&[("C", 1), ("X", 1), ("Y", 1), ("D", 1)]),
        evidence: vec![],
    }
}

pub fn execution() -> ProbabilisticModel {
    execution_spec().build_probabilistic().expect("valid fixture")
}

pub fn execution_deterministic() -> DeterministicModel {
    execution_deterministic_spec().build_deterministic().expect("valid fixture")
}

/// Independent binary causes `A`, `B` of a binary child `C`.
pub fn abc() -> ProbabilisticModel {
    crate::modelfile::parse(ABC).expect("fixture parses").build_probabilistic().expect("valid fixture")
}
