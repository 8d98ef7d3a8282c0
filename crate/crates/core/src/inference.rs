//! Exact inference by full enumeration of the assignment product.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::intervention::{apply_probabilistic, Intervention};
use crate::model::{Assignment, CausalGraph, Cpt, ExogenousBlock, ProbabilisticModel, VariableId};
use crate::par;
use crate::rational::Prob;

/// Number of total assignments of `graph`.
pub fn world_count(graph: &CausalGraph) -> usize {
    graph.variables().iter().map(|v| v.range.len()).product()
}

/// The `index`-th total assignment. The first variable is most significant
/// and each variable runs from its largest value to its smallest, so for
/// four Boolean variables index 0 is `1111` and index 15 is `0000`.
pub fn world_at(graph: &CausalGraph, mut index: usize) -> Vec<i64> {
    let mut world = vec![0; graph.len()];
    for v in (0..graph.len()).rev() {
        let desc = graph.range(v).descending();
        world[v] = desc[index % desc.len()];
        index /= desc.len();
    }
    world
}

/// Inverse of [`world_at`].
pub fn world_index(graph: &CausalGraph, world: &[i64]) -> usize {
    (0..graph.len()).fold(0, |acc, v| {
        let desc = graph.range(v).descending();
        acc * desc.len() + desc.iter().position(|&x| x == world[v]).expect("value in range")
    })
}

pub fn all_worlds(graph: &CausalGraph) -> Vec<Vec<i64>> {
    (0..world_count(graph)).map(|i| world_at(graph, i)).collect()
}

/// Probability of every total assignment, in [`world_at`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointDistribution {
    variables: Vec<VariableId>,
    worlds: Vec<Vec<i64>>,
    probs: Vec<Prob>,
}

impl JointDistribution {
    pub fn variables(&self) -> &[VariableId] {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn worlds(&self) -> &[Vec<i64>] {
        &self.worlds
    }

    pub fn probs(&self) -> &[Prob] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[i64], &Prob)> {
        self.worlds.iter().map(Vec::as_slice).zip(&self.probs)
    }

    pub fn total(&self) -> Prob {
        self.probs.iter().fold(Prob::zero(), |a, b| a + b)
    }

    /// Probability of a total assignment given as values in declaration order.
    pub fn get(&self, world: &[i64]) -> Option<&Prob> {
        self.worlds.iter().position(|w| w == world).map(|i| &self.probs[i])
    }
}

pub fn joint(m: &ProbabilisticModel) -> JointDistribution {
    let graph = m.graph();
    let n = world_count(graph);
    let worlds: Vec<Vec<i64>> = par::map_range(n, |i| world_at(graph, i));
    let probs = par::map(&worlds, |w| m.world_prob(w));
    JointDistribution { variables: graph.variables().iter().map(|v| v.id.clone()).collect(), worlds, probs }
}

/// Total probability of the worlds satisfying `f`.
pub fn prob(m: &ProbabilisticModel, f: &Formula) -> Result<Prob> {
    let graph = m.graph();
    let bound = f.bind(graph)?;
    Ok(par::sum_range(world_count(graph), |i| {
        let w = world_at(graph, i);
        if bound.eval(&w) {
            m.world_prob(&w)
        } else {
            Prob::zero()
        }
    }))
}

/// Classical conditional `p(f | given)`.
pub fn conditional_prob(m: &ProbabilisticModel, f: &Formula, given: &Formula) -> Result<Prob> {
    let denominator = prob(m, given)?;
    if denominator.is_zero() {
        return Err(Error::ZeroProbabilityEvidence(given.to_string()));
    }
    Ok(prob(m, &Formula::and(f.clone(), given.clone()))? / denominator)
}

/// Marginal distribution of every variable, each in range order.
pub fn marginals(m: &ProbabilisticModel) -> Vec<Vec<Prob>> {
    let graph = m.graph();
    let jd = joint(m);
    let mut out: Vec<Vec<Prob>> = graph.variables().iter().map(|v| vec![Prob::zero(); v.range.len()]).collect();
    for (w, p) in jd.iter() {
        if p.is_zero() {
            continue;
        }
        for (v, slot) in out.iter_mut().enumerate() {
            slot[graph.range(v).position(w[v]).expect("in range")] += p;
        }
    }
    out
}

/// Observed values used to update the exogenous prior.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Evidence(pub Assignment);

impl Evidence {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, i64)>,
        S: AsRef<str>,
    {
        Assignment::from_pairs(pairs).map(Self)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for Evidence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Conditions the exogenous prior on `e`, keeping every endogenous table.
///
/// With a single exogenous variable its marginal is replaced by the
/// posterior. With several, they are merged into one joint block so that
/// correlations induced by the evidence survive.
pub fn update_evidence(m: &ProbabilisticModel, e: &Evidence) -> Result<ProbabilisticModel> {
    if e.is_empty() {
        return Ok(m.clone());
    }
    let graph = m.graph();
    let bound = e.0.bind(graph)?;
    let jd = joint(m);
    let holds = |w: &[i64]| bound.iter().all(|&(i, v)| w[i] == v);
    let total = jd.iter().filter(|(w, _)| holds(w)).fold(Prob::zero(), |a, (_, p)| a + p);
    if total.is_zero() {
        return Err(Error::ZeroProbabilityEvidence(e.to_string()));
    }
    let exogenous = graph.exogenous();
    let mut out = m.clone();
    if exogenous.len() == 1 && m.block.is_none() {
        let u = exogenous[0];
        let range = graph.range(u);
        let mut row = vec![Prob::zero(); range.len()];
        for (w, p) in jd.iter().filter(|(w, _)| holds(w)) {
            row[range.position(w[u]).expect("in range")] += p;
        }
        out.cpts[u] = Cpt::new(vec![row.into_iter().map(|p| p / &total).collect()]);
    } else {
        let mut table = std::collections::BTreeMap::new();
        for (w, p) in jd.iter().filter(|(w, _)| holds(w)) {
            if p.is_zero() {
                continue;
            }
            let key: Vec<i64> = exogenous.iter().map(|&u| w[u]).collect();
            *table.entry(key).or_insert_with(Prob::zero) += p;
        }
        for p in table.values_mut() {
            *p /= &total;
        }
        out.block = Some(ExogenousBlock { variables: exogenous, table });
    }
    Ok(out)
}

/// `p_do(i)(f)`.
pub fn do_prob(m: &ProbabilisticModel, i: &Intervention, f: &Formula) -> Result<Prob> {
    prob(&apply_probabilistic(m, i)?, f)
}

/// Evidence update, intervention, evaluation: `p(A □→ B | E) = p'_do(A)(B)`
/// for a conjunction of atoms `A`.
pub fn pearl_counterfactual(
    m: &ProbabilisticModel,
    antecedent: &Formula,
    consequent: &Formula,
    e: &Evidence,
) -> Result<Prob> {
    let assignment = match antecedent.as_conjunction() {
        Ok(a) => a,
        Err(Error::Inconsistent { .. }) => return Err(Error::UnsatisfiableAntecedent(antecedent.to_string())),
        Err(other) => return Err(other),
    };
    let updated = update_evidence(m, e)?;
    do_prob(&updated, &Intervention::new(assignment), consequent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::formula::parse_formula;
    use crate::rational::prob as p;

    fn f(t: &str) -> Formula {
        parse_formula(t).unwrap()
    }

    fn d1() -> Evidence {
        Evidence::from_pairs([("D", 1)]).unwrap()
    }

    #[test]
    fn world_order_matches_listing() {
        let m = fixtures::execution();
        let g = m.graph();
        assert_eq!(world_count(g), 16);
        assert_eq!(world_at(g, 0), vec![1, 1, 1, 1]);
        assert_eq!(world_at(g, 2), vec![1, 1, 0, 1]);
        assert_eq!(world_at(g, 15), vec![0, 0, 0, 0]);
        for i in 0..16 {
            assert_eq!(world_index(g, &world_at(g, i)), i);
        }
    }

    #[test]
    fn joint_entries_are_products_of_rows() {
        let m = fixtures::execution();
        let jd = joint(&m);
        assert_eq!(jd.get(&[1, 1, 1, 1]).unwrap(), &p(3645, 10000));
        assert_eq!(jd.total(), p(1, 1));
        assert_eq!(prob(&m, &f("D=1")).unwrap(), p(1, 2));
    }

    #[test]
    fn prob_of_tautology_and_contradiction() {
        let m = fixtures::execution();
        assert_eq!(prob(&m, &f("X=0 | X=1")).unwrap(), p(1, 1));
        assert_eq!(prob(&m, &f("X=0 & X=1")).unwrap(), p(0, 1));
        assert!(matches!(prob(&m, &f("Q=1")), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn evidence_update_on_death() {
        let m = fixtures::execution();
        let u = update_evidence(&m, &d1()).unwrap();
        assert_eq!(prob(&u, &f("C=1")).unwrap(), p(41, 50));
        assert_eq!(conditional_prob(&u, &f("D=0"), &f("X=0")).unwrap(), p(459, 610));
        assert_eq!(update_evidence(&m, &Evidence::none()).unwrap(), m);
        // only the exogenous table changes
        for v in ["X", "Y", "D"] {
            assert_eq!(u.cpt(v).unwrap(), m.cpt(v).unwrap());
        }
    }

    #[test]
    fn zero_probability_evidence_is_an_error() {
        let spec = crate::modelfile::parse("var A : {0,1}\ncpt A : 0:1 1:0\n").unwrap();
        let m = spec.build_probabilistic().unwrap();
        let e = Evidence::from_pairs([("A", 1)]).unwrap();
        assert!(matches!(update_evidence(&m, &e), Err(Error::ZeroProbabilityEvidence(_))));
    }

    #[test]
    fn do_probabilities() {
        let u = update_evidence(&fixtures::execution(), &d1()).unwrap();
        let x0 = Intervention::from_pairs([("X", 0)]).unwrap();
        let x0y0 = Intervention::from_pairs([("X", 0), ("Y", 0)]).unwrap();
        assert_eq!(do_prob(&u, &x0, &f("D=0")).unwrap(), p(5976, 10000));
        assert_eq!(do_prob(&u, &x0y0, &f("D=0")).unwrap(), p(9, 10));
        assert_eq!(do_prob(&u, &Intervention::empty(), &f("D=0")).unwrap(), prob(&u, &f("D=0")).unwrap());
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn closed_form_sum_for_do_x0() {
        // Σ_{y,c} p(D=0|X=0,Y=y) p(Y=y|C=c) p'(C=c)
        let pc = [p(9, 50), p(41, 50)];
        let py_c = |y: usize, c: usize| if y == c { p(9, 10) } else { p(1, 10) };
        let pd0 = [p(9, 10), p(1, 2)];
        let mut expected = Prob::zero();
        for y in 0..2 {
            for c in 0..2 {
                expected += &pd0[y] * py_c(y, c) * &pc[c];
            }
        }
        let u = update_evidence(&fixtures::execution(), &d1()).unwrap();
        let x0 = Intervention::from_pairs([("X", 0)]).unwrap();
        assert_eq!(do_prob(&u, &x0, &f("D=0")).unwrap(), expected);
    }

    #[test]
    fn pearl_procedure() {
        let m = fixtures::execution();
        assert_eq!(pearl_counterfactual(&m, &f("X=0"), &f("D=0"), &d1()).unwrap(), p(747, 1250));
        assert_eq!(pearl_counterfactual(&m, &f("X=0 & Y=0"), &f("D=0"), &d1()).unwrap(), p(9, 10));
        assert_eq!(pearl_counterfactual(&m, &f("Y=0"), &f("D=0"), &d1()).unwrap(), p(747, 1250));
        assert!(matches!(
            pearl_counterfactual(&m, &f("X=0 & X=1"), &f("D=0"), &d1()),
            Err(Error::UnsatisfiableAntecedent(_))
        ));
        assert!(matches!(
            pearl_counterfactual(&m, &f("X=0 | Y=0"), &f("D=0"), &d1()),
            Err(Error::NotConjunctive(_))
        ));
    }

    #[test]
    fn multi_exogenous_update_keeps_correlation() {
        // A, B independent fair coins, C = A xor B observed as 0: posterior
        // puts all mass on A=B, which no product of marginals can express.
        let spec = crate::modelfile::parse(
            "var A : {0,1}\nvar B : {0,1}\nvar C : {0,1}\nparents C : A B\n\
             cpt A : 0:0.5 1:0.5\ncpt B : 0:0.5 1:0.5\n\
             cpt C | A=0,B=0 : 0:1\ncpt C | A=0,B=1 : 1:1\ncpt C | A=1,B=0 : 1:1\ncpt C | A=1,B=1 : 0:1\n",
        )
        .unwrap();
        let m = spec.build_probabilistic().unwrap();
        let u = update_evidence(&m, &Evidence::from_pairs([("C", 0)]).unwrap()).unwrap();
        assert!(u.exogenous_block().is_some());
        assert_eq!(prob(&u, &f("A=1 & B=0")).unwrap(), p(0, 1));
        assert_eq!(prob(&u, &f("A=1 & B=1")).unwrap(), p(1, 2));
        assert_eq!(joint(&u).total(), p(1, 1));
        // intervening on a block member marginalizes it out
        let s = apply_probabilistic(&u, &Intervention::from_pairs([("A", 0)]).unwrap()).unwrap();
        assert_eq!(prob(&s, &f("B=1")).unwrap(), p(1, 2));
        assert_eq!(prob(&s, &f("C=1")).unwrap(), p(1, 2));
    }
}
