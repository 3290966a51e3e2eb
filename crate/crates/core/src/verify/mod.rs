//! Numerical certification of the inequalities the reduced model rests on,
//! case by case on finite field families, plus brute-force oracles for the
//! spectral operators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod checks;
pub mod families;
pub mod oracle;

pub use checks::{
    check_coercivity, check_ded, check_edge, check_interp, check_positivity, check_sandwich, f_interp, InterpSummary,
    SandwichPoint,
};
pub use oracle::{brute_force_dipolar, brute_force_h12, panel_mutual};

/// One instance of an inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckCase {
    /// Field family, seed, grid and parameters.
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl CheckCase {
    pub fn new(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self { label: label.into(), lhs, rhs, ratio: ratio(lhs, rhs) }
    }
}

/// `lhs/rhs`, with `0/0 = 0` and a positive left side over a vanishing right
/// side infinite.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs <= 0.0 && rhs >= 0.0 {
        if rhs == 0.0 {
            0.0
        } else {
            lhs / rhs
        }
    } else if rhs <= 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub cases: Vec<CheckCase>,
    pub worst_ratio: f64,
    pub tol: f64,
    pub pass: bool,
    /// Check-specific summary numbers (fitted constants, sub-family maxima).
    #[serde(default)]
    pub summary: BTreeMap<String, f64>,
}

impl CheckReport {
    pub fn new(name: &str, tol: f64, cases: Vec<CheckCase>) -> Self {
        let worst_ratio = cases.iter().map(|c| c.ratio).fold(0.0, f64::max);
        let worst_ratio = if cases.iter().any(|c| c.ratio.is_nan()) { f64::NAN } else { worst_ratio };
        Self { name: name.into(), cases, worst_ratio, tol, pass: worst_ratio <= 1.0 + tol, summary: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.summary.insert(key.into(), value);
        self
    }

    /// Fails the report unless `ok`, recording the reason in the summary.
    pub fn require(mut self, key: &str, ok: bool) -> Self {
        self.summary.insert(key.into(), f64::from(u8::from(ok)));
        self.pass &= ok;
        self
    }

    pub fn worst_case(&self) -> Option<&CheckCase> {
        self.cases.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio))
    }
}

/// Run-time knobs shared by the checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Random cases per check.
    #[serde(default = "hundred")]
    pub cases: usize,
    #[serde(default)]
    pub seed: u64,
}

fn hundred() -> usize {
    100
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { cases: 100, seed: 0 }
    }
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, cfg: &VerifyConfig) -> Result<CheckReport>;
}

macro_rules! check {
    ($ty:ident, $name:literal, $f:path) => {
        pub struct $ty;
        impl Check for $ty {
            fn name(&self) -> &'static str {
                $name
            }
            fn run(&self, cfg: &VerifyConfig) -> Result<CheckReport> {
                $f(cfg)
            }
        }
    };
}

check!(Positivity, "positivity", checks::positivity_suite);
check!(Ded, "ded", checks::ded_suite);
check!(Edge, "edge", checks::edge_suite);
check!(Interp, "interp", checks::interp_suite);
check!(Sandwich, "sandwich", checks::sandwich_suite);
check!(Coercivity, "coercivity", checks::coercivity_suite);

/// Checks by name, grouped into suites.
pub struct CheckRegistry {
    checks: Vec<Box<dyn Check>>,
    suites: BTreeMap<String, Vec<&'static str>>,
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self { checks: Vec::new(), suites: BTreeMap::new() }
    }

    pub fn register(&mut self, check: Box<dyn Check>) {
        self.checks.retain(|c| c.name() != check.name());
        self.checks.push(check);
    }

    pub fn define_suite(&mut self, name: &str, members: &[&'static str]) {
        self.suites.insert(name.into(), members.to_vec());
    }

    pub fn get(&self, name: &str) -> Result<&dyn Check> {
        self.checks
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
            .ok_or_else(|| Error::Unknown { kind: "check", name: name.into() })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.iter().map(|c| c.name()).collect()
    }

    pub fn suite(&self, name: &str) -> Result<Vec<&dyn Check>> {
        let members = self.suites.get(name).ok_or_else(|| Error::Unknown { kind: "suite", name: name.into() })?;
        members.iter().map(|m| self.get(m)).collect()
    }

    pub fn suite_names(&self) -> Vec<&str> {
        self.suites.keys().map(|s| s.as_str()).collect()
    }

    /// Runs a suite or a single check by name, reports in suite order.
    pub fn run(&self, name: &str, cfg: &VerifyConfig) -> Result<Vec<CheckReport>> {
        let checks = if self.suites.contains_key(name) { self.suite(name)? } else { vec![self.get(name)?] };
        checks.iter().map(|c| c.run(cfg)).collect()
    }
}

impl Default for CheckRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Positivity));
        r.register(Box::new(Ded));
        r.register(Box::new(Edge));
        r.register(Box::new(Interp));
        r.register(Box::new(Sandwich));
        r.register(Box::new(Coercivity));
        r.define_suite("core", &["positivity", "ded", "interp"]);
        r.define_suite("full", &["positivity", "ded", "edge", "interp", "sandwich", "coercivity"]);
        r
    }
}
