//! Boolean formulas over atoms `V=v` and single, non-nested counterfactual
//! queries `A => B`.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! query   := formula "=>" formula
//! formula := conj ("|" conj)*
//! conj    := unary ("&" unary)*
//! unary   := "!" unary | "(" formula ")" | IDENT "=" INT
//! ```
//!
//! Chains of `&` and `|` associate to the left.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Assignment, CausalGraph, DeterministicModel, VariableId};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom { var: VariableId, value: i64 },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(var: &str, value: i64) -> Result<Self> {
        Ok(Formula::Atom { var: VariableId::new(var)?, value })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Conjunction of the atoms of `assignment`, left-associated.
    pub fn conjunction_of(assignment: &Assignment) -> Option<Self> {
        assignment
            .iter()
            .map(|(k, v)| Formula::Atom { var: k.clone(), value: v })
            .reduce(Formula::and)
    }

    /// The assignment expressed by a conjunction of atoms, if it is one.
    /// Contradictory conjunctions such as `X=0 & X=1` are an error.
    pub fn as_conjunction(&self) -> Result<Assignment> {
        fn collect(f: &Formula, out: &mut Assignment, whole: &Formula) -> Result<()> {
            match f {
                Formula::Atom { var, value } => out.insert(var.clone(), *value),
                Formula::And(a, b) => {
                    collect(a, out, whole)?;
                    collect(b, out, whole)
                }
                _ => Err(Error::NotConjunctive(whole.to_string())),
            }
        }
        let mut out = Assignment::new();
        collect(self, &mut out, self)?;
        Ok(out)
    }

    pub fn variables(&self) -> Vec<&VariableId> {
        let mut out = Vec::new();
        self.visit_atoms(&mut |v, _| {
            if !out.contains(&v) {
                out.push(v)
            }
        });
        out
    }

    fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a VariableId, i64)) {
        match self {
            Formula::Atom { var, value } => f(var, *value),
            Formula::Not(a) => a.visit_atoms(f),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
        }
    }

    /// Resolves atoms to variable indices, checking ranges.
    pub fn bind(&self, graph: &CausalGraph) -> Result<BoundFormula> {
        Ok(match self {
            Formula::Atom { var, value } => {
                let idx = graph.index_of(var.as_str())?;
                if !graph.range(idx).contains(*value) {
                    return Err(Error::OutOfRange { variable: var.to_string(), value: *value });
                }
                BoundFormula::Atom(idx, *value)
            }
            Formula::Not(a) => BoundFormula::Not(Box::new(a.bind(graph)?)),
            Formula::And(a, b) => BoundFormula::And(Box::new(a.bind(graph)?), Box::new(b.bind(graph)?)),
            Formula::Or(a, b) => BoundFormula::Or(Box::new(a.bind(graph)?), Box::new(b.bind(graph)?)),
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 0,
            Formula::And(..) => 1,
            Formula::Not(_) | Formula::Atom { .. } => 2,
        }
    }
}

/// Formula with atoms resolved against a graph, evaluated on total worlds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundFormula {
    Atom(usize, i64),
    Not(Box<BoundFormula>),
    And(Box<BoundFormula>, Box<BoundFormula>),
    Or(Box<BoundFormula>, Box<BoundFormula>),
}

impl BoundFormula {
    pub fn eval(&self, world: &[i64]) -> bool {
        match self {
            BoundFormula::Atom(i, v) => world[*i] == *v,
            BoundFormula::Not(a) => !a.eval(world),
            BoundFormula::And(a, b) => a.eval(world) && b.eval(world),
            BoundFormula::Or(a, b) => a.eval(world) || b.eval(world),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, c: &Formula, min: u8| {
            if c.precedence() < min {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        };
        match self {
            Formula::Atom { var, value } => write!(f, "{var}={value}"),
            Formula::Not(a) => {
                f.write_str("!")?;
                child(f, a, 2)
            }
            Formula::And(a, b) => {
                child(f, a, 1)?;
                f.write_str(" & ")?;
                child(f, b, 2)
            }
            Formula::Or(a, b) => {
                child(f, a, 0)?;
                f.write_str(" | ")?;
                child(f, b, 1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CounterfactualQuery {
    pub antecedent: Formula,
    pub consequent: Formula,
}

impl fmt::Display for CounterfactualQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => {}", self.antecedent, self.consequent)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("{message} at position {position}")]
    Syntax { position: usize, message: String },
    #[error("nested counterfactual at position {0}")]
    NestedCounterfactual(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Int(i64),
    Eq,
    Not,
    And,
    Or,
    LParen,
    RParen,
    Arrow,
}

fn describe(t: Option<&Token>) -> String {
    match t {
        None => "end of input".into(),
        Some(Token::Ident(s)) => format!("`{s}`"),
        Some(Token::Int(i)) => format!("`{i}`"),
        Some(Token::Eq) => "`=`".into(),
        Some(Token::Not) => "`!`".into(),
        Some(Token::And) => "`&`".into(),
        Some(Token::Or) => "`|`".into(),
        Some(Token::LParen) => "`(`".into(),
        Some(Token::RParen) => "`)`".into(),
        Some(Token::Arrow) => "`=>`".into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '=' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((start, Token::Arrow));
                i += 2;
                continue;
            }
            '=' => out.push((start, Token::Eq)),
            '!' => out.push((start, Token::Not)),
            '&' => out.push((start, Token::And)),
            '|' => out.push((start, Token::Or)),
            '(' => out.push((start, Token::LParen)),
            ')' => out.push((start, Token::RParen)),
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            c if c.is_ascii_digit() || c == '-' => {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let lit = &text[start..i];
                let v = lit.parse().map_err(|_| SyntaxError::Syntax {
                    position: start,
                    message: format!("invalid integer `{lit}`"),
                })?;
                out.push((start, Token::Int(v)));
                continue;
            }
            other => {
                return Err(SyntaxError::Syntax { position: start, message: format!("unexpected character `{other}`") })
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, SyntaxError> {
        Ok(Self { tokens: tokenize(text)?, pos: 0, end: text.len() })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, expected: &str) -> Result<T, SyntaxError> {
        if self.peek() == Some(&Token::Arrow) {
            return Err(SyntaxError::NestedCounterfactual(self.offset()));
        }
        Err(SyntaxError::Syntax {
            position: self.offset(),
            message: format!("expected {expected}, found {}", describe(self.peek())),
        })
    }

    fn eat(&mut self, t: &Token) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Token::Or) {
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.unary()?;
        while self.eat(&Token::And) {
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek().cloned() {
            Some(Token::Not) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.formula()?;
                if !self.eat(&Token::RParen) {
                    return self.error("`)`");
                }
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if !self.eat(&Token::Eq) {
                    return self.error("`=`");
                }
                match self.peek().cloned() {
                    Some(Token::Int(v)) => {
                        self.pos += 1;
                        Ok(Formula::Atom { var: VariableId::new(&name).expect("tokenizer yields valid names"), value: v })
                    }
                    _ => self.error("an integer value"),
                }
            }
            _ => self.error("an atom, `!` or `(`"),
        }
    }

    fn finish(&self) -> Result<(), SyntaxError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            self.error("end of input")
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_query(text: &str) -> Result<CounterfactualQuery, SyntaxError> {
    let mut p = Parser::new(text)?;
    let antecedent = p.formula()?;
    if !p.eat(&Token::Arrow) {
        return p.error("`=>`");
    }
    let consequent = p.formula()?;
    p.finish()?;
    Ok(CounterfactualQuery { antecedent, consequent })
}

/// Classical truth of `f` at the actual assignment of `model`.
pub fn eval_static(model: &DeterministicModel, f: &Formula) -> Result<bool> {
    Ok(f.bind(model.graph())?.eval(model.actual_values()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn atom(v: &str, x: i64) -> Formula {
        Formula::atom(v, x).unwrap()
    }

    #[test]
    fn parses_atoms_and_precedence() {
        assert_eq!(parse_formula("X=0").unwrap(), atom("X", 0));
        assert_eq!(
            parse_formula("!(X=0 & Y=1)").unwrap(),
            Formula::not(Formula::and(atom("X", 0), atom("Y", 1)))
        );
        assert_eq!(parse_formula("X=0 | Y=0").unwrap(), Formula::or(atom("X", 0), atom("Y", 0)));
        assert_eq!(
            parse_formula("A=1 | B=1 & !C=0").unwrap(),
            Formula::or(atom("A", 1), Formula::and(atom("B", 1), Formula::not(atom("C", 0))))
        );
        assert_eq!(
            parse_formula("A=1&B=1&C=1").unwrap(),
            Formula::and(Formula::and(atom("A", 1), atom("B", 1)), atom("C", 1))
        );
        assert_eq!(parse_formula(" T = -2 ").unwrap(), atom("T", -2));
    }

    #[test]
    fn parses_queries() {
        let q = parse_query("(X=0 | Y=0) => D=0").unwrap();
        assert_eq!(q.antecedent, Formula::or(atom("X", 0), atom("Y", 0)));
        assert_eq!(q.consequent, atom("D", 0));
        let q = parse_query("X=0 => D=0").unwrap();
        assert_eq!(q.antecedent, atom("X", 0));
    }

    #[test]
    fn rejects_nested_counterfactuals() {
        assert!(matches!(parse_query("(A=1 => B=1) => C=1"), Err(SyntaxError::NestedCounterfactual(_))));
        assert!(matches!(parse_query("A=1 => B=1 => C=1"), Err(SyntaxError::NestedCounterfactual(_))));
        assert!(matches!(parse_query("A=1 => (B=1 => C=1)"), Err(SyntaxError::NestedCounterfactual(_))));
        assert!(matches!(parse_formula("A=1 => B=1"), Err(SyntaxError::NestedCounterfactual(_))));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(
            parse_formula("X=0 & "),
            Err(SyntaxError::Syntax { position: 6, message: "expected an atom, `!` or `(`, found end of input".into() })
        );
        assert!(matches!(parse_formula("X=a"), Err(SyntaxError::Syntax { position: 2, .. })));
        assert!(matches!(parse_formula("(X=0"), Err(SyntaxError::Syntax { position: 4, .. })));
        assert!(matches!(parse_formula("X=0 #"), Err(SyntaxError::Syntax { position: 4, .. })));
        assert!(parse_query("X=0").is_err());
    }

    #[test]
    fn printer_is_canonical() {
        for text in ["X=0 | Y=0 & Z=1", "!(X=0 & Y=1)", "(A=1 | B=0) & C=1", "A=1 & (B=1 & C=1)", "!!X=0"] {
            let f = parse_formula(text).unwrap();
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f, "{text} -> {f}");
        }
        assert_eq!(parse_formula("((X=0))|(Y=0)").unwrap().to_string(), "X=0 | Y=0");
    }

    #[test]
    fn conjunction_view() {
        let a = parse_formula("X=0 & Y=0").unwrap().as_conjunction().unwrap();
        assert_eq!(a, Assignment::from_pairs([("X", 0), ("Y", 0)]).unwrap());
        assert!(matches!(parse_formula("X=0 | Y=0").unwrap().as_conjunction(), Err(Error::NotConjunctive(_))));
        assert!(matches!(parse_formula("X=0 & X=1").unwrap().as_conjunction(), Err(Error::Inconsistent { .. })));
    }

    #[test]
    fn static_evaluation_on_execution_actuals() {
        let m = fixtures::execution_deterministic();
        let ev = |t: &str| eval_static(&m, &parse_formula(t).unwrap());
        assert!(ev("X=1 & Y=1").unwrap());
        assert!(!ev("X=0").unwrap());
        assert!(ev("X=0 | D=1").unwrap());
        assert!(matches!(ev("Q=1"), Err(Error::UnknownVariable(_))));
        assert!(matches!(ev("X=3"), Err(Error::OutOfRange { .. })));
    }
}
