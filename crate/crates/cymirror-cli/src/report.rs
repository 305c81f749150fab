//! Verification reports.

use serde::{Deserialize, Serialize};
use std::fmt::Display;

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// A value stated in the source material.
    Printed,
    /// A value computed independently of the pipeline under test.
    Derived,
}

/// One comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub origin: Origin,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

/// Ordered list of checks with free-form notes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub target: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl Report {
    pub fn new(target: &str) -> Self {
        Report { target: target.into(), checks: Vec::new(), notes: Vec::new(), pass: true }
    }

    /// Records `expected == computed`.
    pub fn check<T: Display + PartialEq>(&mut self, name: &str, origin: Origin, expected: T, computed: T) {
        let pass = expected == computed;
        self.pass &= pass;
        self.checks.push(Check {
            name: name.into(),
            origin,
            expected: expected.to_string(),
            computed: computed.to_string(),
            pass,
        });
    }

    /// Records a list comparison.
    pub fn check_list<T: Display + PartialEq>(&mut self, name: &str, origin: Origin, expected: &[T], computed: &[T]) {
        self.check(name, origin, list(expected), list(computed));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Concatenates reports under one target.
    pub fn merge(target: &str, parts: Vec<Report>) -> Report {
        let mut out = Report::new(target);
        for p in parts {
            for mut c in p.checks {
                c.name = format!("{}: {}", p.target, c.name);
                out.pass &= c.pass;
                out.checks.push(c);
            }
            out.notes.extend(p.notes.into_iter().map(|n| format!("{}: {n}", p.target)));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let mark = if c.pass { "PASS" } else { "FAIL" };
            let origin = match c.origin {
                Origin::Printed => "printed",
                Origin::Derived => "derived",
            };
            s.push_str(&format!("{mark} {} [{origin}]\n  expected {}\n  computed {}\n", c.name, c.expected, c.computed));
        }
        for n in &self.notes {
            s.push_str(&format!("note: {n}\n"));
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        s.push_str(&format!("{}: {passed}/{} checks pass\n", self.target, self.checks.len()));
        s
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "origin", "expected", "computed", "pass"])?;
        for c in &self.checks {
            let origin = match c.origin {
                Origin::Printed => "printed",
                Origin::Derived => "derived",
            };
            w.write_record([c.name.as_str(), origin, &c.expected, &c.computed, if c.pass { "true" } else { "false" }])?;
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv is utf-8"))
    }
}

/// `[a, b, c]`.
pub fn list<T: Display>(items: &[T]) -> String {
    let inner: Vec<String> = items.iter().map(ToString::to_string).collect();
    format!("[{}]", inner.join(", "))
}
