//! Random binary models and formulas for property tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tmcf::model::{CptRowSpec, MechanismSpec};
use tmcf::{Evidence, Formula, ModelSpec, ProbabilisticModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("V{i}")).collect()
}

/// Probability `k/20` with `k` in `1..=19`, so strictly inside `(0, 1)`.
fn entry(rng: &mut impl Rng) -> tmcf::Prob {
    tmcf::prob(rng.gen_range(1..=19), 20)
}

/// Binary model on `n` variables. Each forward pair gets an edge with
/// probability one half; every table entry lies strictly in `(0, 1)`.
pub fn random_spec(rng: &mut impl Rng, n: usize) -> ModelSpec {
    let vars = names(n);
    let mut parents = Vec::new();
    let mut rows = Vec::new();
    for (j, child) in vars.iter().enumerate() {
        let ps: Vec<String> = (0..j).filter(|_| rng.gen_bool(0.5)).map(|i| vars[i].clone()).collect();
        for code in 0..(1usize << ps.len()) {
            let condition = ps.iter().enumerate().map(|(k, p)| (p.clone(), ((code >> k) & 1) as i64)).collect();
            let p1 = entry(rng);
            let p0 = tmcf::prob(1, 1) - &p1;
            rows.push(CptRowSpec { child: child.clone(), condition, distribution: vec![(0, p0), (1, p1)] });
        }
        if !ps.is_empty() {
            parents.push((child.clone(), ps));
        }
    }
    ModelSpec {
        variables: vars.into_iter().map(|v| (v, vec![0, 1])).collect(),
        parents,
        mechanism: MechanismSpec::Probabilistic(rows),
        actual: vec![],
        evidence: vec![],
    }
}

pub fn random_model(rng: &mut impl Rng, n: usize) -> ProbabilisticModel {
    random_spec(rng, n).build_probabilistic().expect("generated model is valid")
}

/// `n` in `1..=4`.
pub fn random_small_model(rng: &mut impl Rng) -> ProbabilisticModel {
    let n = rng.gen_range(1..=4);
    random_model(rng, n)
}

pub fn random_atom(rng: &mut impl Rng, vars: &[String]) -> Formula {
    Formula::atom(vars.choose(rng).expect("non-empty"), rng.gen_range(0..=1)).expect("valid name")
}

pub fn random_formula(rng: &mut impl Rng, vars: &[String], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return random_atom(rng, vars);
    }
    match rng.gen_range(0..3) {
        0 => Formula::not(random_formula(rng, vars, depth - 1)),
        1 => Formula::and(random_formula(rng, vars, depth - 1), random_formula(rng, vars, depth - 1)),
        _ => Formula::or(random_formula(rng, vars, depth - 1), random_formula(rng, vars, depth - 1)),
    }
}

/// Consistent conjunction over a random non-empty subset of `vars`.
pub fn random_conjunction(rng: &mut impl Rng, vars: &[String]) -> Formula {
    let k = rng.gen_range(1..=vars.len());
    let mut chosen: Vec<&String> = vars.choose_multiple(rng, k).collect();
    chosen.sort();
    let mut atoms = chosen.into_iter().map(|v| Formula::atom(v, rng.gen_range(0..=1)).expect("valid name"));
    let first = atoms.next().expect("non-empty");
    atoms.fold(first, Formula::and)
}

/// Either no evidence or one random atom; every atom has positive
/// probability on generated models.
pub fn random_evidence(rng: &mut impl Rng, vars: &[String]) -> Evidence {
    if rng.gen_bool(0.3) {
        return Evidence::none();
    }
    let v = vars.choose(rng).expect("non-empty");
    Evidence::from_pairs([(v.as_str(), rng.gen_range(0..=1))]).expect("valid name")
}

pub fn model_vars(m: &ProbabilisticModel) -> Vec<String> {
    m.graph().variables().iter().map(|v| v.id.as_str().to_string()).collect()
}

/// Deterministic binary model on `n` variables with random equations and
/// random exogenous actual values.
pub fn random_deterministic(rng: &mut impl Rng, n: usize) -> tmcf::DeterministicModel {
    let vars = names(n);
    let mut parents = Vec::new();
    let mut rows = Vec::new();
    let mut actual = Vec::new();
    for (j, child) in vars.iter().enumerate() {
        let ps: Vec<String> = (0..j).filter(|_| rng.gen_bool(0.5)).map(|i| vars[i].clone()).collect();
        if ps.is_empty() {
            actual.push((child.clone(), rng.gen_range(0..=1)));
            continue;
        }
        for code in 0..(1usize << ps.len()) {
            let condition = ps.iter().enumerate().map(|(k, p)| (p.clone(), ((code >> k) & 1) as i64)).collect();
            rows.push(tmcf::model::EquationRowSpec { child: child.clone(), condition, value: rng.gen_range(0..=1) });
        }
        parents.push((child.clone(), ps));
    }
    ModelSpec {
        variables: vars.into_iter().map(|v| (v, vec![0, 1])).collect(),
        parents,
        mechanism: MechanismSpec::Deterministic(rows),
        actual,
        evidence: vec![],
    }
    .build_deterministic()
    .expect("generated model is valid")
}

/// Random consistent intervention over `vars` (possibly empty).
pub fn random_intervention(rng: &mut impl Rng, vars: &[String]) -> tmcf::Intervention {
    let pairs: Vec<(&str, i64)> = vars
        .iter()
        .filter_map(|v| if rng.gen_bool(0.4) { Some((v.as_str(), rng.gen_range(0..=1))) } else { None })
        .collect();
    tmcf::Intervention::from_pairs(pairs).expect("one value per variable")
}
