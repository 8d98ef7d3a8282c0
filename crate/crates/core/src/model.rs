//! Causal model structures: variables, ranges, the causal DAG, conditional
//! probability tables and structural equations.
//!
//! Models come in two layers. [`ModelSpec`] is the parsed, name-based
//! description exactly as written in a model file; it can hold any mistake a
//! user can make and [`validate_model`] reports those mistakes as data.
//! [`ModelSpec::build`] turns a clean description into an indexed
//! [`ProbabilisticModel`] or [`DeterministicModel`], which every other module
//! assumes to be valid.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_exact, Prob};

/// Name of a model variable: a letter followed by letters, digits or `_`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VariableId(String);

impl VariableId {
    pub fn new(name: &str) -> Result<Self> {
        if is_valid_name(name) {
            Ok(Self(name.to_string()))
        } else {
            Err(Error::InvalidName(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Ordered list of at least two distinct integer values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueRange(Vec<i64>);

impl ValueRange {
    pub fn new(values: Vec<i64>) -> Result<Self, String> {
        if values.len() < 2 {
            return Err("range must contain at least two values".into());
        }
        let distinct: BTreeSet<_> = values.iter().collect();
        if distinct.len() != values.len() {
            return Err("range contains duplicate values".into());
        }
        Ok(Self(values))
    }

    pub fn boolean() -> Self {
        Self(vec![0, 1])
    }

    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, value: i64) -> bool {
        self.0.contains(&value)
    }

    pub fn position(&self, value: i64) -> Option<usize> {
        self.0.iter().position(|&v| v == value)
    }

    /// Values from largest to smallest; the world enumeration order.
    pub fn descending(&self) -> Vec<i64> {
        let mut v = self.0.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub id: VariableId,
    pub range: ValueRange,
}

/// Directed acyclic graph over the model variables. Variables are addressed
/// by their declaration index; parent lists keep their declared order, which
/// fixes the row layout of every table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalGraph {
    variables: Vec<Variable>,
    parents: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl CausalGraph {
    pub fn new(variables: Vec<Variable>, parents: Vec<Vec<usize>>) -> Result<Self> {
        assert_eq!(variables.len(), parents.len(), "one parent list per variable");
        let topo = topological_sort(&parents).ok_or_else(|| {
            let mut report = ValidationReport::default();
            report.push("graph", "cycle");
            Error::InvalidModel(report)
        })?;
        Ok(Self { variables, parents, topo })
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn id(&self, index: usize) -> &VariableId {
        &self.variables[index].id
    }

    pub fn range(&self, index: usize) -> &ValueRange {
        &self.variables[index].range
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.id.as_str() == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn parents(&self, index: usize) -> &[usize] {
        &self.parents[index]
    }

    pub fn is_exogenous(&self, index: usize) -> bool {
        self.parents[index].is_empty()
    }

    pub fn exogenous(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_exogenous(i)).collect()
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(child, ps)| ps.iter().map(move |&p| (p, child)))
            .collect()
    }

    /// Variables reachable from `name` by at least one directed edge.
    pub fn descendants(&self, name: &str) -> Result<BTreeSet<VariableId>> {
        let start = self.index_of(name)?;
        Ok(self
            .descendant_mask(&[start])
            .iter()
            .enumerate()
            .filter(|(_, &d)| d)
            .map(|(i, _)| self.id(i).clone())
            .collect())
    }

    /// `mask[v]` is true when `v` is reachable from some source by ≥1 edge.
    pub fn descendant_mask(&self, sources: &[usize]) -> Vec<bool> {
        let mut children = vec![Vec::new(); self.len()];
        for (p, c) in self.edges() {
            children[p].push(c);
        }
        let mut mask = vec![false; self.len()];
        let mut stack: Vec<usize> = sources.iter().flat_map(|&s| children[s].iter().copied()).collect();
        while let Some(v) = stack.pop() {
            if !mask[v] {
                mask[v] = true;
                stack.extend(children[v].iter().copied());
            }
        }
        mask
    }

    /// Number of parent assignments of `index`.
    pub fn row_count(&self, index: usize) -> usize {
        self.parents[index].iter().map(|&p| self.range(p).len()).product()
    }

    /// Row of `index`'s table selected by the parent values in `world`.
    pub fn row_of(&self, index: usize, world: &[i64]) -> usize {
        self.parents[index].iter().fold(0, |acc, &p| {
            let range = self.range(p);
            let pos = range.position(world[p]).expect("world value in range");
            acc * range.len() + pos
        })
    }

    /// Parent values encoded by `row` (inverse of [`row_of`](Self::row_of)).
    pub fn row_parent_values(&self, index: usize, mut row: usize) -> Vec<i64> {
        let ps = &self.parents[index];
        let mut out = vec![0; ps.len()];
        for (slot, &p) in ps.iter().enumerate().rev() {
            let range = self.range(p);
            out[slot] = range.values()[row % range.len()];
            row /= range.len();
        }
        out
    }

    pub(crate) fn cut_incoming(&mut self, index: usize) {
        self.parents[index].clear();
    }
}

fn topological_sort(parents: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = parents.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut ready: Vec<usize> = (0..n).rev().filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop() {
        order.push(v);
        for &c in children[v].iter().rev() {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(c);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Conditional probability table: one distribution over the child's range
/// (in range order) per parent assignment (in [`CausalGraph::row_of`] order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cpt {
    rows: Vec<Vec<Prob>>,
}

impl Cpt {
    pub fn new(rows: Vec<Vec<Prob>>) -> Self {
        Self { rows }
    }

    pub fn point_mass(range_len: usize, position: usize) -> Self {
        let row = (0..range_len).map(|i| if i == position { Prob::one() } else { Prob::zero() }).collect();
        Self { rows: vec![row] }
    }

    pub fn rows(&self) -> &[Vec<Prob>] {
        &self.rows
    }

    pub fn row(&self, row: usize) -> &[Prob] {
        &self.rows[row]
    }
}

/// Joint table over a set of exogenous variables. Replaces their individual
/// marginals once evidence has correlated them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExogenousBlock {
    pub(crate) variables: Vec<usize>,
    pub(crate) table: BTreeMap<Vec<i64>, Prob>,
}

impl ExogenousBlock {
    pub fn variables(&self) -> &[usize] {
        &self.variables
    }

    pub fn prob(&self, values: &[i64]) -> Prob {
        self.table.get(values).cloned().unwrap_or_else(Prob::zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilisticModel {
    pub(crate) graph: CausalGraph,
    pub(crate) cpts: Vec<Cpt>,
    pub(crate) block: Option<ExogenousBlock>,
}

impl ProbabilisticModel {
    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    pub fn cpt(&self, name: &str) -> Result<&Cpt> {
        Ok(&self.cpts[self.graph.index_of(name)?])
    }

    pub fn cpt_at(&self, index: usize) -> &Cpt {
        &self.cpts[index]
    }

    pub fn exogenous_block(&self) -> Option<&ExogenousBlock> {
        self.block.as_ref()
    }

    /// Markov factorization: product of the table entries selected by `world`.
    pub fn world_prob(&self, world: &[i64]) -> Prob {
        let mut p = Prob::one();
        let in_block = |i: usize| self.block.as_ref().is_some_and(|b| b.variables.contains(&i));
        if let Some(block) = &self.block {
            let key: Vec<i64> = block.variables.iter().map(|&v| world[v]).collect();
            p = block.prob(&key);
            if p.is_zero() {
                return p;
            }
        }
        for i in 0..self.graph.len() {
            if in_block(i) {
                continue;
            }
            let range = self.graph.range(i);
            let pos = range.position(world[i]).expect("world value in range");
            let entry = &self.cpts[i].row(self.graph.row_of(i, world))[pos];
            if entry.is_zero() {
                return Prob::zero();
            }
            p *= entry;
        }
        p
    }

    /// Cuts `index` from its parents and gives it a point mass at `value`.
    pub(crate) fn force(&mut self, index: usize, value: i64) {
        let range = self.graph.range(index);
        let pos = range.position(value).expect("checked by caller");
        let len = range.len();
        self.graph.cut_incoming(index);
        self.cpts[index] = Cpt::point_mass(len, pos);
        if let Some(block) = self.block.take() {
            self.block = block.without(index);
        }
    }
}

impl ExogenousBlock {
    /// Marginalizes `index` out of the block. Blocks that shrink to a single
    /// variable are kept as blocks; the joint is unaffected either way.
    fn without(self, index: usize) -> Option<Self> {
        let Some(slot) = self.variables.iter().position(|&v| v == index) else {
            return Some(self);
        };
        let mut variables = self.variables;
        variables.remove(slot);
        if variables.is_empty() {
            return None;
        }
        let mut table: BTreeMap<Vec<i64>, Prob> = BTreeMap::new();
        for (mut key, p) in self.table {
            key.remove(slot);
            *table.entry(key).or_insert_with(Prob::zero) += p;
        }
        Some(Self { variables, table })
    }
}

/// Total function from parent assignments (row order) to a child value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralEquation {
    rows: Vec<i64>,
}

impl StructuralEquation {
    pub fn new(rows: Vec<i64>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[i64] {
        &self.rows
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicModel {
    pub(crate) graph: CausalGraph,
    pub(crate) equations: Vec<Option<StructuralEquation>>,
    pub(crate) actual: Vec<i64>,
}

impl DeterministicModel {
    pub fn graph(&self) -> &CausalGraph {
        &self.graph
    }

    pub fn actual(&self, name: &str) -> Result<i64> {
        Ok(self.actual[self.graph.index_of(name)?])
    }

    pub fn actual_values(&self) -> &[i64] {
        &self.actual
    }

    pub fn actual_assignment(&self) -> Assignment {
        Assignment(
            self.graph
                .variables()
                .iter()
                .zip(&self.actual)
                .map(|(v, &a)| (v.id.clone(), a))
                .collect(),
        )
    }

    pub fn equation(&self, name: &str) -> Result<Option<&StructuralEquation>> {
        Ok(self.equations[self.graph.index_of(name)?].as_ref())
    }

    /// Forward evaluation of every surviving equation in topological order.
    pub(crate) fn recompute(&mut self) {
        for &v in self.graph.topological_order() {
            if let Some(eq) = &self.equations[v] {
                self.actual[v] = eq.rows[self.graph.row_of(v, &self.actual)];
            }
        }
    }
}

/// Partial or total map from variables to values.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(pub(crate) BTreeMap<VariableId, i64>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an assignment, failing when a variable receives two values.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, i64)>,
        S: AsRef<str>,
    {
        let mut out = Self::new();
        for (name, value) in pairs {
            out.insert(VariableId::new(name.as_ref())?, value)?;
        }
        Ok(out)
    }

    pub fn insert(&mut self, var: VariableId, value: i64) -> Result<()> {
        match self.0.get(&var) {
            Some(&prev) if prev != value => Err(Error::Inconsistent {
                variable: var.to_string(),
                first: prev,
                second: value,
            }),
            _ => {
                self.0.insert(var, value);
                Ok(())
            }
        }
    }

    pub fn get(&self, var: &str) -> Option<i64> {
        self.0.iter().find(|(k, _)| k.as_str() == var).map(|(_, &v)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VariableId, i64)> {
        self.0.iter().map(|(k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Resolves names to indices, checking each value against its range.
    pub fn bind(&self, graph: &CausalGraph) -> Result<Vec<(usize, i64)>> {
        self.0
            .iter()
            .map(|(var, &value)| {
                let idx = graph.index_of(var.as_str())?;
                if graph.range(idx).contains(value) {
                    Ok((idx, value))
                } else {
                    Err(Error::OutOfRange { variable: var.to_string(), value })
                }
            })
            .collect()
    }

    /// True when `world` agrees with every binding.
    pub fn holds_in(&self, graph: &CausalGraph, world: &[i64]) -> Result<bool> {
        Ok(self.bind(graph)?.iter().all(|&(i, v)| world[i] == v))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Either kind of validated model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Probabilistic(ProbabilisticModel),
    Deterministic(DeterministicModel),
}

impl Model {
    pub fn graph(&self) -> &CausalGraph {
        match self {
            Model::Probabilistic(m) => m.graph(),
            Model::Deterministic(m) => m.graph(),
        }
    }
}

// ---------------------------------------------------------------------------
// Raw descriptions and validation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CptRowSpec {
    pub child: String,
    pub condition: Vec<(String, i64)>,
    pub distribution: Vec<(i64, Prob)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationRowSpec {
    pub child: String,
    pub condition: Vec<(String, i64)>,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MechanismSpec {
    Probabilistic(Vec<CptRowSpec>),
    Deterministic(Vec<EquationRowSpec>),
}

/// Name-based model description as written in a model file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    pub variables: Vec<(String, Vec<i64>)>,
    pub parents: Vec<(String, Vec<String>)>,
    pub mechanism: MechanismSpec,
    pub actual: Vec<(String, i64)>,
    /// Default evidence used by commands that accept evidence.
    pub evidence: Vec<(String, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub subject: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, subject: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation { subject: subject.into(), message: message.into() });
    }

    pub fn mentions(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.message.contains(needle))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{}: {}", v.subject, v.message)?;
        }
        Ok(())
    }
}

fn fmt_condition(condition: &[(String, i64)]) -> String {
    condition.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

/// Checks every structural invariant of a model description.
pub fn validate_model(spec: &ModelSpec) -> ValidationReport {
    Validator::new(spec).run()
}

struct Validator<'a> {
    spec: &'a ModelSpec,
    report: ValidationReport,
    index: BTreeMap<&'a str, usize>,
    ranges: Vec<Option<ValueRange>>,
    parents: Vec<Vec<usize>>,
}

impl<'a> Validator<'a> {
    fn new(spec: &'a ModelSpec) -> Self {
        Self {
            spec,
            report: ValidationReport::default(),
            index: BTreeMap::new(),
            ranges: Vec::new(),
            parents: vec![Vec::new(); spec.variables.len()],
        }
    }

    fn run(mut self) -> ValidationReport {
        self.check_variables();
        self.check_parents();
        let acyclic = self.check_cycles();
        match &self.spec.mechanism {
            MechanismSpec::Probabilistic(rows) => {
                self.check_cpts(rows);
                if !self.spec.actual.is_empty() {
                    self.report.push("actual", "actual values only apply to deterministic models");
                }
                self.check_bindings("evidence", &self.spec.evidence);
            }
            MechanismSpec::Deterministic(rows) => {
                self.check_equations(rows, acyclic);
                if !self.spec.evidence.is_empty() {
                    self.report.push("evidence", "evidence only applies to probabilistic models");
                }
            }
        }
        self.report
    }

    fn check_variables(&mut self) {
        if self.spec.variables.is_empty() {
            self.report.push("model", "no variables declared");
        }
        for (i, (name, values)) in self.spec.variables.iter().enumerate() {
            if !is_valid_name(name) {
                self.report.push(name, "invalid variable name");
            }
            if self.index.insert(name, i).is_some() {
                self.report.push(name, "variable declared more than once");
            }
            match ValueRange::new(values.clone()) {
                Ok(r) => self.ranges.push(Some(r)),
                Err(msg) => {
                    self.report.push(name, msg);
                    self.ranges.push(None);
                }
            }
        }
    }

    fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn check_parents(&mut self) {
        let mut declared = BTreeSet::new();
        for (child, ps) in &self.spec.parents {
            let Some(c) = self.lookup(child) else {
                self.report.push(child, "parents declared for an undeclared variable");
                continue;
            };
            if !declared.insert(c) {
                self.report.push(child, "parents declared more than once");
                continue;
            }
            for p in ps {
                match self.lookup(p) {
                    None => self.report.push(child, format!("parent `{p}` is not a declared variable")),
                    Some(pi) if self.parents[c].contains(&pi) => {
                        self.report.push(child, format!("parent `{p}` listed twice"))
                    }
                    Some(pi) => self.parents[c].push(pi),
                }
            }
        }
    }

    fn check_cycles(&mut self) -> bool {
        if topological_sort(&self.parents).is_some() {
            return true;
        }
        // Peel off everything that can be ordered; what remains lies on or
        // downstream of a cycle.
        let n = self.parents.len();
        let mut removed = vec![false; n];
        loop {
            let mut changed = false;
            for v in 0..n {
                if !removed[v] && self.parents[v].iter().all(|&p| removed[p]) {
                    removed[v] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let names: Vec<&str> = (0..n).filter(|&v| !removed[v]).map(|v| self.spec.variables[v].0.as_str()).collect();
        self.report.push("graph", format!("cycle through {}", names.join(", ")));
        false
    }

    fn range(&self, i: usize) -> Option<&ValueRange> {
        self.ranges.get(i).and_then(Option::as_ref)
    }

    /// Resolves a row condition against `child`'s parents; returns the row index.
    fn row_index(&mut self, child: usize, condition: &[(String, i64)]) -> Option<usize> {
        let child_name = &self.spec.variables[child].0;
        let subject = format!("{child_name} | {}", fmt_condition(condition));
        let ps = self.parents[child].clone();
        let mut values: Vec<Option<i64>> = vec![None; ps.len()];
        let mut ok = true;
        for (name, value) in condition {
            let slot = self.lookup(name).and_then(|i| ps.iter().position(|&p| p == i));
            match slot {
                None => {
                    self.report.push(&subject, format!("`{name}` is not a parent of `{child_name}`"));
                    ok = false;
                }
                Some(s) if values[s].is_some() => {
                    self.report.push(&subject, format!("`{name}` conditioned twice"));
                    ok = false;
                }
                Some(s) => {
                    if self.range(ps[s]).is_some_and(|r| !r.contains(*value)) {
                        self.report.push(&subject, format!("value {value} is outside the range of `{name}`"));
                        ok = false;
                    }
                    values[s] = Some(*value);
                }
            }
        }
        if values.iter().any(Option::is_none) {
            if ok {
                self.report.push(&subject, "condition does not assign every parent");
            }
            return None;
        }
        if !ok {
            return None;
        }
        let mut row = 0;
        for (slot, &p) in ps.iter().enumerate() {
            let r = self.range(p)?;
            row = row * r.len() + r.position(values[slot].unwrap())?;
        }
        Some(row)
    }

    fn expected_rows(&self, child: usize) -> Option<usize> {
        self.parents[child].iter().map(|&p| self.range(p).map(ValueRange::len)).product()
    }

    fn missing_rows(&mut self, child: usize, seen: &BTreeSet<usize>, what: &str) {
        let Some(total) = self.expected_rows(child) else { return };
        let ps = self.parents[child].clone();
        for row in (0..total).filter(|r| !seen.contains(r)) {
            let mut rem = row;
            let mut cond = vec![String::new(); ps.len()];
            for (slot, &p) in ps.iter().enumerate().rev() {
                let r = self.range(p).expect("checked by expected_rows");
                cond[slot] = format!("{}={}", self.spec.variables[p].0, r.values()[rem % r.len()]);
                rem /= r.len();
            }
            let name = &self.spec.variables[child].0;
            self.report.push(format!("{name} | {}", cond.join(",")), format!("missing {what} row"));
        }
    }

    #[allow(clippy::needless_range_loop)]
    fn check_cpts(&mut self, rows: &[CptRowSpec]) {
        let mut seen: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.spec.variables.len()];
        for row in rows {
            let Some(c) = self.lookup(&row.child) else {
                self.report.push(&row.child, "table for an undeclared variable");
                continue;
            };
            let subject = format!("{} | {}", row.child, fmt_condition(&row.condition));
            if let Some(r) = self.range(c).cloned() {
                let mut values = BTreeSet::new();
                let mut total = Prob::zero();
                for (value, p) in &row.distribution {
                    if !r.contains(*value) {
                        self.report.push(&subject, format!("value {value} is outside the range of `{}`", row.child));
                    }
                    if !values.insert(*value) {
                        self.report.push(&subject, format!("value {value} listed twice"));
                    }
                    if *p < Prob::zero() || *p > Prob::one() {
                        self.report.push(&subject, format!("probability {} is outside [0,1]", format_exact(p)));
                    }
                    total += p;
                }
                if !total.is_one() {
                    self.report.push(&subject, format!("row does not sum to 1 (sums to {})", format_exact(&total)));
                }
            }
            if let Some(idx) = self.row_index(c, &row.condition) {
                if !seen[c].insert(idx) {
                    self.report.push(&subject, "duplicate row");
                }
            }
        }
        for c in 0..self.spec.variables.len() {
            self.missing_rows(c, &seen[c].clone(), "probability");
        }
    }

    #[allow(clippy::needless_range_loop)]
    fn check_equations(&mut self, rows: &[EquationRowSpec], acyclic: bool) {
        let n = self.spec.variables.len();
        let mut seen: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        let mut tables: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); n];
        for row in rows {
            let Some(c) = self.lookup(&row.child) else {
                self.report.push(&row.child, "equation for an undeclared variable");
                continue;
            };
            let subject = format!("{} | {}", row.child, fmt_condition(&row.condition));
            if self.parents[c].is_empty() {
                self.report.push(&row.child, "exogenous variable has an equation");
                continue;
            }
            if self.range(c).is_some_and(|r| !r.contains(row.value)) {
                self.report.push(&subject, format!("output {} is outside the range of `{}`", row.value, row.child));
            }
            if let Some(idx) = self.row_index(c, &row.condition) {
                if !seen[c].insert(idx) {
                    self.report.push(&subject, "duplicate row");
                }
                tables[c].insert(idx, row.value);
            }
        }
        for c in 0..n {
            if !self.parents[c].is_empty() {
                self.missing_rows(c, &seen[c].clone(), "equation");
            }
        }

        self.check_bindings("actual", &self.spec.actual);
        let given: BTreeMap<usize, i64> =
            self.spec.actual.iter().filter_map(|(k, v)| self.lookup(k).map(|i| (i, *v))).collect();
        for c in 0..n {
            if self.parents[c].is_empty() && !given.contains_key(&c) {
                self.report.push(&self.spec.variables[c].0, "exogenous variable has no actual value");
            }
        }
        if !acyclic || !self.report.is_ok() {
            return;
        }
        // Forward evaluation: endogenous actual values must follow the equations.
        let order = topological_sort(&self.parents).expect("acyclic");
        let mut world = vec![0i64; n];
        for &v in &order {
            if self.parents[v].is_empty() {
                world[v] = given[&v];
                continue;
            }
            let mut row = 0;
            for &p in &self.parents[v] {
                let r = self.range(p).expect("valid");
                row = row * r.len() + r.position(world[p]).expect("value in range");
            }
            world[v] = tables[v][&row];
            if let Some(&a) = given.get(&v) {
                if a != world[v] {
                    self.report.push(
                        &self.spec.variables[v].0,
                        format!("actual value {a} contradicts its equation, which gives {}", world[v]),
                    );
                }
            }
        }
    }

    fn check_bindings(&mut self, what: &str, bindings: &[(String, i64)]) {
        let mut seen = BTreeSet::new();
        for (name, value) in bindings {
            match self.lookup(name) {
                None => self.report.push(what, format!("`{name}` is not a declared variable")),
                Some(i) => {
                    if !seen.insert(i) {
                        self.report.push(what, format!("`{name}` assigned more than once"));
                    }
                    if self.range(i).is_some_and(|r| !r.contains(*value)) {
                        self.report.push(what, format!("value {value} is outside the range of `{name}`"));
                    }
                }
            }
        }
    }
}

impl ModelSpec {
    /// Validates and indexes the description.
    pub fn build(&self) -> Result<Model> {
        let report = validate_model(self);
        if !report.is_ok() {
            return Err(Error::InvalidModel(report));
        }
        let index: BTreeMap<&str, usize> =
            self.variables.iter().enumerate().map(|(i, (n, _))| (n.as_str(), i)).collect();
        let variables: Vec<Variable> = self
            .variables
            .iter()
            .map(|(n, vs)| Variable { id: VariableId(n.clone()), range: ValueRange(vs.clone()) })
            .collect();
        let mut parents = vec![Vec::new(); variables.len()];
        for (child, ps) in &self.parents {
            parents[index[child.as_str()]] = ps.iter().map(|p| index[p.as_str()]).collect();
        }
        let graph = CausalGraph::new(variables, parents)?;
        let row_of = |child: usize, condition: &[(String, i64)]| -> usize {
            graph.parents(child).iter().fold(0, |acc, &p| {
                let name = graph.id(p).as_str();
                let value = condition.iter().find(|(k, _)| k == name).expect("validated").1;
                let r = graph.range(p);
                acc * r.len() + r.position(value).expect("validated")
            })
        };
        match &self.mechanism {
            MechanismSpec::Probabilistic(rows) => {
                let mut cpts: Vec<Vec<Vec<Prob>>> = (0..graph.len())
                    .map(|i| vec![vec![Prob::zero(); graph.range(i).len()]; graph.row_count(i)])
                    .collect();
                for row in rows {
                    let c = index[row.child.as_str()];
                    let r = row_of(c, &row.condition);
                    for (value, p) in &row.distribution {
                        cpts[c][r][graph.range(c).position(*value).expect("validated")] = p.clone();
                    }
                }
                Ok(Model::Probabilistic(ProbabilisticModel {
                    graph,
                    cpts: cpts.into_iter().map(Cpt::new).collect(),
                    block: None,
                }))
            }
            MechanismSpec::Deterministic(rows) => {
                let mut eqs: Vec<Option<Vec<i64>>> = (0..graph.len())
                    .map(|i| (!graph.is_exogenous(i)).then(|| vec![0; graph.row_count(i)]))
                    .collect();
                for row in rows {
                    let c = index[row.child.as_str()];
                    let r = row_of(c, &row.condition);
                    eqs[c].as_mut().expect("endogenous")[r] = row.value;
                }
                let mut actual = vec![0; graph.len()];
                for (name, v) in &self.actual {
                    actual[index[name.as_str()]] = *v;
                }
                let mut model = DeterministicModel {
                    graph,
                    equations: eqs.into_iter().map(|e| e.map(StructuralEquation::new)).collect(),
                    actual,
                };
                model.recompute();
                Ok(Model::Deterministic(model))
            }
        }
    }

    pub fn build_probabilistic(&self) -> Result<ProbabilisticModel> {
        match self.build()? {
            Model::Probabilistic(m) => Ok(m),
            Model::Deterministic(_) => {
                let mut report = ValidationReport::default();
                report.push("model", "expected a probabilistic model");
                Err(Error::InvalidModel(report))
            }
        }
    }

    pub fn build_deterministic(&self) -> Result<DeterministicModel> {
        match self.build()? {
            Model::Deterministic(m) => Ok(m),
            Model::Probabilistic(_) => {
                let mut report = ValidationReport::default();
                report.push("model", "expected a deterministic model");
                Err(Error::InvalidModel(report))
            }
        }
    }
}

/// `descendants` as a free function over a graph.
pub fn descendants(graph: &CausalGraph, name: &str) -> Result<BTreeSet<VariableId>> {
    graph.descendants(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::prob;

    fn names(set: &BTreeSet<VariableId>) -> Vec<&str> {
        set.iter().map(VariableId::as_str).collect()
    }

    #[test]
    fn execution_model_is_valid() {
        let report = validate_model(&fixtures::execution_spec());
        assert!(report.is_ok(), "{report}");
        assert!(validate_model(&fixtures::execution_deterministic_spec()).is_ok());
    }

    #[test]
    fn row_sum_violation_is_reported() {
        let mut spec = fixtures::execution_spec();
        if let MechanismSpec::Probabilistic(rows) = &mut spec.mechanism {
            rows[0].distribution = vec![(1, prob(1, 2)), (0, prob(2, 5))];
        }
        let report = validate_model(&spec);
        assert!(report.mentions("row does not sum to 1"), "{report}");
        assert!(matches!(spec.build(), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn two_cycle_is_reported() {
        let spec = ModelSpec {
            variables: vec![("A".into(), vec![0, 1]), ("B".into(), vec![0, 1])],
            parents: vec![("A".into(), vec!["B".into()]), ("B".into(), vec!["A".into()])],
            mechanism: MechanismSpec::Probabilistic(vec![]),
            actual: vec![],
            evidence: vec![],
        };
        let report = validate_model(&spec);
        assert!(report.mentions("cycle"), "{report}");
    }

    #[test]
    fn structural_violations_name_the_offender() {
        let spec = ModelSpec {
            variables: vec![("A".into(), vec![0, 0]), ("2B".into(), vec![1])],
            parents: vec![("A".into(), vec!["Z".into()])],
            mechanism: MechanismSpec::Probabilistic(vec![]),
            actual: vec![("A".into(), 0)],
            evidence: vec![],
        };
        let report = validate_model(&spec);
        let text = report.to_string();
        assert!(text.contains("A: range contains duplicate values"), "{text}");
        assert!(text.contains("2B: invalid variable name"), "{text}");
        assert!(text.contains("2B: range must contain at least two values"), "{text}");
        assert!(text.contains("parent `Z` is not a declared variable"), "{text}");
        assert!(text.contains("actual values only apply"), "{text}");
        assert!(text.contains("missing probability row"), "{text}");
    }

    #[test]
    fn contradictory_actual_value_is_reported() {
        let mut spec = fixtures::execution_deterministic_spec();
        spec.actual.retain(|(k, _)| k != "D");
        spec.actual.push(("D".into(), 0));
        let report = validate_model(&spec);
        assert!(report.mentions("contradicts its equation"), "{report}");
    }

    #[test]
    fn missing_endogenous_actuals_are_computed() {
        let mut spec = fixtures::execution_deterministic_spec();
        spec.actual.retain(|(k, _)| k == "C");
        let m = spec.build_deterministic().unwrap();
        assert_eq!(m.actual_values(), &[1, 1, 1, 1]);
    }

    #[test]
    fn descendants_on_execution_graph() {
        let m = fixtures::execution();
        let g = m.graph();
        assert_eq!(names(&g.descendants("C").unwrap()), vec!["D", "X", "Y"]);
        assert!(g.descendants("D").unwrap().is_empty());
        assert_eq!(names(&g.descendants("X").unwrap()), vec!["D"]);
        assert!(matches!(g.descendants("Q"), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn row_encoding_round_trips() {
        let m = fixtures::execution();
        let g = m.graph();
        let d = g.index_of("D").unwrap();
        for row in 0..g.row_count(d) {
            let values = g.row_parent_values(d, row);
            let mut world = vec![0; 4];
            for (slot, &p) in g.parents(d).iter().enumerate() {
                world[p] = values[slot];
            }
            assert_eq!(g.row_of(d, &world), row);
        }
    }

    #[test]
    fn assignment_rejects_conflicts() {
        assert!(Assignment::from_pairs([("X", 0), ("X", 0)]).is_ok());
        assert!(matches!(Assignment::from_pairs([("X", 0), ("X", 1)]), Err(Error::Inconsistent { .. })));
        assert!(matches!(Assignment::from_pairs([("1X", 0)]), Err(Error::InvalidName(_))));
    }
}
