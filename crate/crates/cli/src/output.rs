//! Trajectory CSV and run summaries.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use metriplectic::dynamics::{Diagnostics, Trajectory};
use metriplectic::systems::System;
use metriplectic::{Error, Layout};
use serde::Serialize;

/// First field of the row appended when a run stops early.
pub const TRUNCATION_MARKER: &str = "#TRUNCATED";

/// Round-trippable 17-significant-digit scientific notation.
pub fn number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn header(sys: &System) -> Vec<String> {
    let layout = sys.layout();
    let mut cols = vec!["t".to_string()];
    cols.extend(layout.coordinate_names());
    cols.extend(["H", "S_total", "dSdt"].map(String::from));
    match layout {
        Layout::Discrete { subsystems, .. } => {
            cols.extend((1..=subsystems).map(|i| format!("T_{i}")))
        }
        Layout::Field1D { cells } => cols.extend((0..cells).map(|i| format!("T_{i}"))),
        _ => cols.push("T".into()),
    }
    cols
}

fn row(out: &mut String, t: f64, x: &[f64], d: &Diagnostics) {
    out.push_str(&number(t));
    for v in x
        .iter()
        .chain([d.h, d.s_total, d.ds_dt].iter())
        .chain(&d.temperatures)
    {
        out.push(',');
        out.push_str(&number(*v));
    }
    out.push('\n');
}

/// The whole CSV as one string; `stopped` adds the truncation row.
pub fn trajectory_csv(sys: &System, traj: &Trajectory, stopped: Option<&Error>) -> String {
    let mut out = header(sys).join(",");
    out.push('\n');
    for ((t, x), d) in traj.times.iter().zip(&traj.states).zip(&traj.diagnostics) {
        row(&mut out, *t, x.as_slice(), d);
    }
    if let Some(e) = stopped {
        let step = match e {
            Error::DomainViolation { step: Some(s), .. } => s.to_string(),
            _ => String::new(),
        };
        let _ = writeln!(
            out,
            "{TRUNCATION_MARKER},step={step},kind={},reason=\"{}\"",
            e.kind(),
            e.to_string().replace('"', "'")
        );
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> io::Result<()> {
    let mut f = io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(contents.as_bytes())?;
    f.flush()
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub system: String,
    pub engine: String,
    pub method: String,
    pub dt: f64,
    pub t_final: f64,
    pub rows: usize,
    pub completed: bool,
    pub h_initial: f64,
    pub h_final: f64,
    pub h_relative_drift: f64,
    pub s_initial: f64,
    pub s_final: f64,
    /// Largest single-step decrease of the total entropy (0 if none).
    pub max_entropy_decrease: f64,
    pub error: Option<ErrorReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
    pub step: Option<usize>,
}

impl ErrorReport {
    pub fn new(e: &Error) -> Self {
        ErrorReport {
            kind: e.kind().into(),
            message: e.to_string(),
            step: match e {
                Error::DomainViolation { step, .. } => *step,
                _ => None,
            },
        }
    }
}

pub fn summarize(
    sys: &System,
    engine: &str,
    method: &str,
    dt: f64,
    t_final: f64,
    traj: &Trajectory,
    error: Option<&Error>,
) -> RunSummary {
    let d = &traj.diagnostics;
    let first = d.first();
    let last = d.last();
    let h0 = first.map_or(f64::NAN, |d| d.h);
    let h1 = last.map_or(f64::NAN, |d| d.h);
    let max_decrease = d
        .windows(2)
        .map(|w| w[0].s_total - w[1].s_total)
        .fold(0.0, f64::max);
    RunSummary {
        system: sys.name().into(),
        engine: engine.into(),
        method: method.into(),
        dt,
        t_final,
        rows: traj.len(),
        completed: error.is_none(),
        h_initial: h0,
        h_final: h1,
        h_relative_drift: (h1 - h0).abs() / h0.abs().max(f64::MIN_POSITIVE),
        s_initial: first.map_or(f64::NAN, |d| d.s_total),
        s_final: last.map_or(f64::NAN, |d| d.s_total),
        max_entropy_decrease: max_decrease,
        error: error.map(ErrorReport::new),
    }
}

/// Largest `max_i |a_i - b_i|` over the common stored times, with its time.
pub fn max_divergence(a: &Trajectory, b: &Trajectory) -> (f64, f64) {
    let mut worst = (0.0, 0.0);
    for ((t, x), y) in a.times.iter().zip(&a.states).zip(&b.states) {
        let d = x
            .as_slice()
            .iter()
            .zip(y.as_slice())
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max);
        if d > worst.0 || d.is_nan() {
            worst = (if d.is_nan() { f64::INFINITY } else { d }, *t);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = number(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(number(1.5), "1.5000000000000000e0");
    }

    #[test]
    fn headers_follow_layout() {
        let sys = metriplectic::presets::preset("two_pistons").unwrap();
        assert_eq!(
            header(&sys),
            ["t", "q1", "p1", "S1", "S2", "H", "S_total", "dSdt", "T_1", "T_2"]
        );
        let sys = metriplectic::presets::preset("piston").unwrap();
        assert_eq!(header(&sys).last().unwrap(), "T");
    }
}
