//! Seeded property-test harness over the built-in systems.

mod random;
mod suites;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::systems::System;

pub use random::{random_observable, Polynomial};
pub use suites::direct_symmetric_form;

/// All tolerances used by the suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative violation of the 4-bracket and 2-bracket symmetries.
    pub symmetry: f64,
    pub symmetry_fd: f64,
    /// `|b - el| / (1 + |el|)` between the two engines.
    pub equivalence: f64,
    pub equivalence_field: f64,
    pub equivalence_fd: f64,
    /// First-form against symmetric-form dynamics where `|K| > first_form_k`.
    pub first_vs_symmetric: f64,
    pub first_form_k: f64,
    /// Kulkarni–Nomizu product against direct expansion.
    pub kn_agreement: f64,
    /// Closed-form reduced 2-brackets against the reduced 4-brackets.
    pub reduction: f64,
    /// Absolute cyclic Jacobi sum.
    pub jacobi: f64,
    /// Largest accepted entropy decrease rate.
    pub entropy_rate: f64,
    /// `|dH/dt| / (|dH| |x'|)` along the bracket vector field.
    pub energy_rate: f64,
    /// `|d mass/dt| / (sum |rho'|)` for fields.
    pub mass_rate: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    symmetry: 1e-12,
    symmetry_fd: 1e-8,
    equivalence: 1e-10,
    equivalence_field: 1e-8,
    equivalence_fd: 1e-6,
    first_vs_symmetric: 1e-10,
    first_form_k: 1e-6,
    kn_agreement: 1e-12,
    reduction: 1e-10,
    jacobi: 1e-5,
    entropy_rate: 1e-12,
    energy_rate: 1e-10,
    mass_rate: 1e-13,
};

/// Number of random states each symmetry quadruple is evaluated on.
pub const SYMMETRY_STATES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Symmetry,
    Equivalence,
    Conservation,
    Jacobi,
    KnAgreement,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Symmetry,
        Suite::Equivalence,
        Suite::Conservation,
        Suite::Jacobi,
        Suite::KnAgreement,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Symmetry => "symmetry",
            Suite::Equivalence => "equivalence",
            Suite::Conservation => "conservation",
            Suite::Jacobi => "jacobi",
            Suite::KnAgreement => "kn_agreement",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                format!("unknown suite `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// Result of one suite run. Serializes to
/// `{suite, seed, cases, violations, pass}`; the wall time and the per-invariant
/// tolerances are kept out of the JSON so that reports are byte-identical.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub violations: BTreeMap<String, f64>,
    pub pass: bool,
    #[serde(skip)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// Invariants whose violation exceeds their tolerance.
    pub fn failures(&self) -> Vec<(&str, f64, f64)> {
        self.violations
            .iter()
            .filter_map(|(k, &v)| {
                let tol = self.tolerances[k];
                (!within(v, tol)).then_some((k.as_str(), v, tol))
            })
            .collect()
    }
}

fn within(v: f64, tol: f64) -> bool {
    v <= tol
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SuiteOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
}

/// Per-invariant maxima accumulated over cases, each with its tolerance.
#[derive(Debug, Clone, Default)]
pub(crate) struct Violations(BTreeMap<String, (f64, f64)>);

impl Violations {
    pub(crate) fn record(&mut self, name: impl Into<String>, value: f64, tol: f64) {
        // NaN counts as an unbounded violation
        let value = if value.is_nan() { f64::INFINITY } else { value };
        let e = self.0.entry(name.into()).or_insert((0.0, tol));
        e.0 = e.0.max(value);
    }

    fn merge(mut self, other: Violations) -> Violations {
        for (k, (v, t)) in other.0 {
            self.record(k, v, t);
        }
        self
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_violation(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Runs `suite` on `sys` with `n_cases` seeded cases.
pub fn run_suite(suite: Suite, sys: &System, seed: u64, n_cases: usize) -> Result<VerifyReport> {
    run_suite_with(suite, sys, seed, n_cases, SuiteOptions::default())
}

pub fn run_suite_with(
    suite: Suite,
    sys: &System,
    seed: u64,
    n_cases: usize,
    options: SuiteOptions,
) -> Result<VerifyReport> {
    let start = Instant::now();
    suites::check_supported(suite, sys)?;
    let context = suites::Context::new(suite, sys, seed)?;
    let work = || -> Result<Violations> {
        let parts = (0..n_cases)
            .into_par_iter()
            .map(|case| context.run_case(case as u64))
            .collect::<Vec<Result<Violations>>>();
        // fixed-order reduction
        let mut acc = context.baseline();
        for p in parts {
            acc = acc.merge(p?);
        }
        Ok(acc)
    };
    let violations = match options.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::Spec(format!("cannot start {jobs} worker threads: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let mut values = BTreeMap::new();
    let mut tolerances = BTreeMap::new();
    for (k, (v, t)) in violations.0 {
        values.insert(k.clone(), v);
        tolerances.insert(k, t);
    }
    let pass = values.iter().all(|(k, v)| within(*v, tolerances[k]));
    let report = VerifyReport {
        suite: suite.name().to_string(),
        seed,
        cases: n_cases,
        violations: values,
        pass,
        tolerances,
        wall_time: start.elapsed(),
    };
    log::info!(
        "suite {} on {}: pass = {} in {:?}",
        report.suite,
        sys.name(),
        report.pass,
        report.wall_time
    );
    Ok(report)
}
