use std::fmt::Write as _;

use tmcf::{format_decimal, format_exact, Prob};

/// Human-readable lines followed by a fenced block of `key = value` lines.
pub struct Report {
    digits: usize,
    human: Vec<String>,
    machine: Vec<(String, String)>,
    warnings: Vec<String>,
}

impl Report {
    pub fn new(digits: usize) -> Self {
        Self { digits, human: Vec::new(), machine: Vec::new(), warnings: Vec::new() }
    }

    pub fn dec(&self, p: &Prob) -> String {
        format_decimal(p, self.digits)
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.human.push(text.into());
    }

    pub fn key(&mut self, key: impl Into<String>, value: impl ToString) {
        self.machine.push((key.into(), value.to_string()));
    }

    /// Human line `label: decimal (fraction)` and machine key `key = fraction`.
    pub fn number(&mut self, label: &str, key: &str, p: &Prob) {
        self.line(format!("{label}: {} ({})", self.dec(p), format_exact(p)));
        self.key(key, format_exact(p));
    }

    pub fn warn(&mut self, code: &str, text: impl Into<String>) {
        self.warnings.push(code.to_string());
        self.human.push(format!("warning: {}", text.into()));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.human {
            let _ = writeln!(out, "{l}");
        }
        let _ = writeln!(out, "\n```text");
        for (k, v) in &self.machine {
            let _ = writeln!(out, "{k} = {v}");
        }
        let warnings = if self.warnings.is_empty() { "none".to_string() } else { self.warnings.join(",") };
        let _ = writeln!(out, "warnings = {warnings}");
        let _ = writeln!(out, "```");
        out
    }
}

/// Left-aligned columns separated by two spaces.
pub fn table(rows: &[Vec<String>]) -> Vec<String> {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    rows.iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().enumerate().map(|(c, s)| format!("{s:<w$}", w = widths[c])).collect();
            format!("  {}", cells.join("  ").trim_end())
        })
        .collect()
}
