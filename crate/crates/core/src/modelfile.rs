//! Line-oriented model file format.
//!
//! ```text
//! # comment
//! var C : {0,1}
//! parents X : C
//! cpt C : 0:0.5 1:0.5
//! cpt X | C=1 : 1:0.9 0:0.1
//! eq D | X=1,Y=0 : 1
//! actual C=1
//! evidence D=1
//! ```
//!
//! Any `cpt` line makes the model probabilistic; `cpt` and `eq` lines may
//! not be mixed.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::model::{CptRowSpec, EquationRowSpec, MechanismSpec, ModelSpec};
use crate::rational::{format_exact, parse_prob, Prob};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

fn parse_int(line: usize, text: &str) -> Result<i64, ParseError> {
    text.trim().parse().or_else(|_| err(line, format!("expected an integer, found `{}`", text.trim())))
}

fn parse_name(line: usize, text: &str) -> Result<String, ParseError> {
    let t = text.trim();
    if t.is_empty() || t.contains(char::is_whitespace) {
        return err(line, format!("expected a variable name, found `{t}`"));
    }
    Ok(t.to_string())
}

fn parse_binding(line: usize, text: &str) -> Result<(String, i64), ParseError> {
    match text.split_once('=') {
        Some((name, value)) => Ok((parse_name(line, name)?, parse_int(line, value)?)),
        None => err(line, format!("expected NAME=value, found `{}`", text.trim())),
    }
}

fn parse_bindings(line: usize, text: &str, sep: char) -> Result<Vec<(String, i64)>, ParseError> {
    text.split(sep).filter(|s| !s.trim().is_empty()).map(|s| parse_binding(line, s)).collect()
}

/// `NAME [| P=v,...]` before the colon of a `cpt` or `eq` line.
fn parse_head(line: usize, text: &str) -> Result<(String, Vec<(String, i64)>), ParseError> {
    match text.split_once('|') {
        Some((name, cond)) => Ok((parse_name(line, name)?, parse_bindings(line, cond, ',')?)),
        None => Ok((parse_name(line, text)?, Vec::new())),
    }
}

fn split_colon(line: usize, keyword: &str, rest: &str) -> Result<(String, String), ParseError> {
    match rest.split_once(':') {
        Some((a, b)) => Ok((a.to_string(), b.to_string())),
        None => err(line, format!("`{keyword}` line needs a `:`")),
    }
}

pub fn parse(text: &str) -> Result<ModelSpec, ParseError> {
    let mut spec = ModelSpec {
        variables: Vec::new(),
        parents: Vec::new(),
        mechanism: MechanismSpec::Probabilistic(Vec::new()),
        actual: Vec::new(),
        evidence: Vec::new(),
    };
    let mut cpts = Vec::new();
    let mut eqs = Vec::new();
    let mut first_cpt = None;
    let mut first_eq = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        match keyword {
            "var" => {
                let (name, range) = split_colon(line, keyword, rest)?;
                let range = range.trim();
                let inner = match range.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
                    Some(inner) => inner,
                    None => return err(line, "range must be written as {v1,v2,...}"),
                };
                let values = inner
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_int(line, s))
                    .collect::<Result<_, _>>()?;
                spec.variables.push((parse_name(line, &name)?, values));
            }
            "parents" => {
                let (name, ps) = split_colon(line, keyword, rest)?;
                let ps = ps.split_whitespace().map(str::to_string).collect();
                spec.parents.push((parse_name(line, &name)?, ps));
            }
            "cpt" => {
                first_cpt.get_or_insert(line);
                let (head, dist) = split_colon(line, keyword, rest)?;
                let (child, condition) = parse_head(line, &head)?;
                let distribution = dist
                    .split_whitespace()
                    .map(|entry| match entry.split_once(':') {
                        Some((v, p)) => Ok((
                            parse_int(line, v)?,
                            parse_prob(p).map_err(|e| ParseError { line, message: e.to_string() })?,
                        )),
                        None => err(line, format!("expected value:probability, found `{entry}`")),
                    })
                    .collect::<Result<_, _>>()?;
                cpts.push(CptRowSpec { child, condition, distribution });
            }
            "eq" => {
                first_eq.get_or_insert(line);
                let (head, value) = split_colon(line, keyword, rest)?;
                let (child, condition) = parse_head(line, &head)?;
                eqs.push(EquationRowSpec { child, condition, value: parse_int(line, &value)? });
            }
            "actual" => spec.actual.extend(parse_bindings(line, rest, ' ')?),
            "evidence" => spec.evidence.extend(parse_bindings(line, rest, ' ')?),
            other => return err(line, format!("unknown directive `{other}`")),
        }
    }

    if let (Some(c), Some(e)) = (first_cpt, first_eq) {
        return err(c.max(e), "`cpt` and `eq` lines cannot be mixed in one model");
    }
    spec.mechanism = if first_cpt.is_some() || (first_eq.is_none() && spec.actual.is_empty()) {
        MechanismSpec::Probabilistic(cpts)
    } else {
        MechanismSpec::Deterministic(eqs)
    };
    Ok(spec)
}

/// Exact decimal when the value has a terminating expansion, else `a/b`.
fn fmt_prob(p: &Prob) -> String {
    let mut den = p.denom().clone();
    let mut digits = [0usize; 2];
    for (slot, factor) in [2u32, 5].into_iter().enumerate() {
        let factor = BigInt::from(factor);
        while den.is_multiple_of(&factor) {
            den /= &factor;
            digits[slot] += 1;
        }
    }
    if !den.is_one() {
        return format_exact(p);
    }
    crate::rational::format_decimal(p, digits[0].max(digits[1]))
}

fn fmt_bindings(bindings: &[(String, i64)], sep: &str) -> String {
    bindings.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(sep)
}

fn fmt_head(child: &str, condition: &[(String, i64)]) -> String {
    if condition.is_empty() {
        child.to_string()
    } else {
        format!("{child} | {}", fmt_bindings(condition, ","))
    }
}

/// Canonical text of a description; `parse(print(s)) == s`.
pub fn print(spec: &ModelSpec) -> String {
    let mut out = String::new();
    for (name, values) in &spec.variables {
        let vs = values.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        let _ = writeln!(out, "var {name} : {{{vs}}}");
    }
    for (name, ps) in &spec.parents {
        let _ = writeln!(out, "parents {name} : {}", ps.join(" "));
    }
    match &spec.mechanism {
        MechanismSpec::Probabilistic(rows) => {
            for row in rows {
                let dist = row.distribution.iter().map(|(v, p)| format!("{v}:{}", fmt_prob(p))).collect::<Vec<_>>();
                let _ = writeln!(out, "cpt {} : {}", fmt_head(&row.child, &row.condition), dist.join(" "));
            }
        }
        MechanismSpec::Deterministic(rows) => {
            for row in rows {
                let _ = writeln!(out, "eq {} : {}", fmt_head(&row.child, &row.condition), row.value);
            }
        }
    }
    if !spec.actual.is_empty() {
        let _ = writeln!(out, "actual {}", fmt_bindings(&spec.actual, " "));
    }
    if !spec.evidence.is_empty() {
        let _ = writeln!(out, "evidence {}", fmt_bindings(&spec.evidence, " "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::prob;

    #[test]
    fn execution_file_parses_to_the_fixture() {
        let spec = parse(fixtures::EXECUTION).unwrap();
        assert_eq!(spec, fixtures::execution_spec());
        let det = parse(fixtures::EXECUTION_DETERMINISTIC).unwrap();
        assert_eq!(det, fixtures::execution_deterministic_spec());
    }

    #[test]
    fn print_round_trips() {
        for text in [fixtures::EXECUTION, fixtures::EXECUTION_DETERMINISTIC, fixtures::ABC] {
            let spec = parse(text).unwrap();
            let printed = print(&spec);
            assert_eq!(parse(&printed).unwrap(), spec);
            assert_eq!(print(&parse(&printed).unwrap()), printed);
        }
    }

    #[test]
    fn probabilities_print_exactly() {
        assert_eq!(fmt_prob(&prob(1, 2)), "0.5");
        assert_eq!(fmt_prob(&prob(1, 3)), "1/3");
        assert_eq!(fmt_prob(&prob(1, 1)), "1");
        assert_eq!(fmt_prob(&prob(0, 1)), "0");
        assert_eq!(fmt_prob(&prob(1, 40)), "0.025");
    }

    #[test]
    fn mixing_mechanisms_is_rejected() {
        let e = parse("var A : {0,1}\nvar B : {0,1}\nparents B : A\ncpt A : 0:1\neq B | A=0 : 0\n").unwrap_err();
        assert_eq!(e.line, 5);
        assert!(e.message.contains("cannot be mixed"));
    }

    #[test]
    fn syntax_errors_carry_the_line() {
        assert_eq!(parse("var A : {0,1}\nbogus A\n").unwrap_err().line, 2);
        assert_eq!(parse("var A : 0,1\n").unwrap_err().line, 1);
        assert_eq!(parse("var A : {0,1}\ncpt A : 0:x\n").unwrap_err().line, 2);
        assert_eq!(parse("var A : {0,1}\n\n\nactual A\n").unwrap_err().line, 4);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let spec = parse("# header\n\nvar A : {0,1}  # trailing\ncpt A : 0:1/4 1:3/4\n").unwrap();
        assert_eq!(spec.variables, vec![("A".to_string(), vec![0, 1])]);
        assert!(spec.build_probabilistic().is_ok());
    }
}
