use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tmcf::fixtures::execution;
use tmcf::model::{CptRowSpec, MechanismSpec};
use tmcf::{
    cf_probability, dependencies, generate_selection, joint, parse_formula, parse_query, DependenceMode, Evidence,
    ModelSpec, ProbabilisticModel, SelectionMode, Weighting,
};

/// Binary model on `n` variables; each variable has up to three earlier parents.
fn layered(n: usize, seed: u64) -> ProbabilisticModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
    let mut parents = Vec::new();
    let mut rows = Vec::new();
    for (j, child) in vars.iter().enumerate() {
        let ps: Vec<String> = (j.saturating_sub(3)..j).map(|i| vars[i].clone()).collect();
        for code in 0..(1usize << ps.len()) {
            let condition = ps.iter().enumerate().map(|(k, p)| (p.clone(), ((code >> k) & 1) as i64)).collect();
            let p1 = tmcf::prob(rng.gen_range(1..=19), 20);
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
    .build_probabilistic()
    .expect("valid model")
}

fn engine(c: &mut Criterion) {
    let mode = if tmcf::is_parallel() { "parallel" } else { "sequential" };
    let mut g = c.benchmark_group(format!("engine/{mode}"));
    g.sample_size(10);

    let m = execution();
    let e = Evidence::from_pairs([("D", 1)]).unwrap();
    let q = parse_query("(X=0 | Y=0) => D=0").unwrap();
    g.bench_function("execution/cf_probability", |b| {
        b.iter(|| cf_probability(black_box(&m), &q, &e, Weighting::InverseDistance, DependenceMode::Probabilistic))
    });
    g.bench_function("execution/dependencies", |b| {
        b.iter(|| dependencies(black_box(&m), DependenceMode::Probabilistic))
    });

    let big = layered(10, 7);
    g.bench_function("layered10/joint", |b| b.iter(|| joint(black_box(&big))));
    g.bench_function("layered10/dependencies", |b| {
        b.iter(|| dependencies(black_box(&big), DependenceMode::Probabilistic))
    });
    let a = parse_formula("V0=0 | V4=1").unwrap();
    g.bench_function("layered10/generate_selection", |b| {
        b.iter(|| generate_selection(black_box(&big), &a, SelectionMode::AllTruthmakers))
    });
    let q = parse_query("(V0=0 | V4=1) => V9=1").unwrap();
    g.bench_function("layered10/cf_probability", |b| {
        b.iter(|| {
            cf_probability(black_box(&big), &q, &Evidence::none(), Weighting::InverseDistance, DependenceMode::Probabilistic)
        })
    });
    g.finish();
}

criterion_group!(benches, engine);
criterion_main!(benches);
