//! The three subcommands. Each returns the process exit code.

use std::path::{Path, PathBuf};

use metriplectic::dynamics::{integrate, Engine, EngineKind, Trajectory};
use metriplectic::presets;
use metriplectic::verify::{run_suite_with, Suite, SuiteOptions};
use metriplectic::Error;
use serde::Serialize;

use crate::config::{ConfigError, Scenario, ScenarioConfig};
use crate::output::{self, ErrorReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_INTERRUPTED: i32 = 2;
pub const EXIT_VERIFY_CONFIG: i32 = 2;

/// Single-line JSON diagnostic on stderr.
pub fn report_error(kind: &str, message: &str) {
    let line = serde_json::json!({ "error": kind, "message": message });
    eprintln!("{line}");
}

fn config_failure(e: &ConfigError) -> i32 {
    report_error(e.kind(), &e.to_string());
    EXIT_CONFIG
}

fn io_failure(path: &Path, e: std::io::Error) -> i32 {
    report_error("io_error", &format!("{}: {e}", path.display()));
    EXIT_CONFIG
}

fn prepare(
    config: &Path,
    out: Option<PathBuf>,
) -> Result<(ScenarioConfig, Scenario, PathBuf), i32> {
    let cfg = ScenarioConfig::load(config).map_err(|e| config_failure(&e))?;
    let scenario = cfg.scenario().map_err(|e| config_failure(&e))?;
    let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
    std::fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
    Ok((cfg, scenario, dir))
}

fn run(s: &Scenario, engine: Engine) -> (Trajectory, Option<Error>) {
    let i = &s.integrator;
    match integrate(&s.system, engine, &s.x0, i.dt, i.t_final, i.method) {
        Ok(traj) => (traj, None),
        Err(stop) => {
            let stop = *stop;
            log::warn!("run stopped: {stop}");
            (stop.partial, Some(stop.error))
        }
    }
}

fn engine_name(engine: Engine) -> String {
    match engine.kind {
        EngineKind::EulerLagrange => "euler_lagrange".into(),
        EngineKind::Bracket => format!("bracket/{}", serde_plain(&engine.form)),
    }
}

fn serde_plain<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

/// Writes the CSV and summary of one run; returns the summary.
fn write_run(
    s: &Scenario,
    engine: Engine,
    traj: &Trajectory,
    error: Option<&Error>,
    csv: &Path,
    summary: Option<&Path>,
) -> Result<output::RunSummary, i32> {
    output::write_file(csv, &output::trajectory_csv(&s.system, traj, error))
        .map_err(|e| io_failure(csv, e))?;
    let sum = output::summarize(
        &s.system,
        &engine_name(engine),
        &serde_plain(&s.integrator.method),
        s.integrator.dt,
        s.integrator.t_final,
        traj,
        error,
    );
    if let Some(path) = summary {
        let text = serde_json::to_string_pretty(&sum).expect("summary serializes") + "\n";
        output::write_file(path, &text).map_err(|e| io_failure(path, e))?;
    }
    Ok(sum)
}

pub fn simulate(config: &Path, out: Option<PathBuf>) -> i32 {
    let (cfg, scenario, dir) = match prepare(config, out) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let (traj, error) = run(&scenario, scenario.engine);
    let csv = dir.join(&cfg.output.trajectory);
    let summary = dir.join(&cfg.output.summary);
    if let Err(code) = write_run(
        &scenario,
        scenario.engine,
        &traj,
        error.as_ref(),
        &csv,
        Some(&summary),
    ) {
        return code;
    }
    match error {
        None => EXIT_OK,
        Some(e) => {
            report_error(e.kind(), &e.to_string());
            EXIT_INTERRUPTED
        }
    }
}

#[derive(Debug, Serialize)]
struct RunStatus {
    completed: bool,
    rows: usize,
    error: Option<ErrorReport>,
}

#[derive(Debug, Serialize)]
struct Divergence {
    system: String,
    steps: usize,
    max_state_divergence: f64,
    at_time: f64,
    tolerance: f64,
    pass: bool,
    euler_lagrange: RunStatus,
    bracket: RunStatus,
}

pub fn compare(config: &Path, out: Option<PathBuf>) -> i32 {
    let (cfg, scenario, dir) = match prepare(config, out) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let el = Engine {
        kind: EngineKind::EulerLagrange,
        ..scenario.engine
    };
    let br = Engine {
        kind: EngineKind::Bracket,
        ..scenario.engine
    };
    let (t_el, e_el) = run(&scenario, el);
    let (t_br, e_br) = run(&scenario, br);
    for (engine, traj, err, file) in [
        (el, &t_el, &e_el, "trajectory_euler_lagrange.csv"),
        (br, &t_br, &e_br, "trajectory_bracket.csv"),
    ] {
        if let Err(code) = write_run(&scenario, engine, traj, err.as_ref(), &dir.join(file), None) {
            return code;
        }
    }
    let steps = (scenario.integrator.t_final / scenario.integrator.dt).round() as usize;
    let tolerance = cfg.compare.tolerance_per_step * steps.max(1) as f64;
    let (max_div, at) = output::max_divergence(&t_el, &t_br);
    let interrupted = e_el.is_some() || e_br.is_some();
    let report = Divergence {
        system: scenario.system.name().into(),
        steps,
        max_state_divergence: max_div,
        at_time: at,
        tolerance,
        pass: !interrupted && max_div <= tolerance,
        euler_lagrange: RunStatus {
            completed: e_el.is_none(),
            rows: t_el.len(),
            error: e_el.as_ref().map(ErrorReport::new),
        },
        bracket: RunStatus {
            completed: e_br.is_none(),
            rows: t_br.len(),
            error: e_br.as_ref().map(ErrorReport::new),
        },
    };
    let path = dir.join("divergence.json");
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if let Err(e) = output::write_file(&path, &text) {
        return io_failure(&path, e);
    }
    log::info!("max divergence {max_div:e} at t = {at} (tolerance {tolerance:e})");
    if let Some(e) = e_el.as_ref().or(e_br.as_ref()) {
        report_error(e.kind(), &e.to_string());
        return EXIT_INTERRUPTED;
    }
    if report.pass {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

pub struct VerifyArgs {
    pub system: Option<String>,
    pub spec: Option<PathBuf>,
    pub suite: Suite,
    pub seed: u64,
    pub cases: usize,
    pub jobs: Option<usize>,
}

pub fn verify(args: VerifyArgs) -> i32 {
    let system = match (&args.spec, &args.system) {
        (Some(path), None) => ScenarioConfig::load(path).and_then(|c| c.system.build()),
        (None, Some(name)) => presets::preset(name).map_err(ConfigError::from),
        _ => Err(ConfigError::Invalid(
            "give exactly one of --system and --spec".into(),
        )),
    };
    let system = match system {
        Ok(s) => s,
        Err(e) => {
            report_error(e.kind(), &e.to_string());
            return EXIT_VERIFY_CONFIG;
        }
    };
    let options = SuiteOptions { jobs: args.jobs };
    match run_suite_with(args.suite, &system, args.seed, args.cases, options) {
        Ok(report) => {
            println!("{}", report.to_json());
            for (name, v, tol) in report.failures() {
                log::error!("{name}: violation {v:e} exceeds {tol:e}");
            }
            if report.pass {
                EXIT_OK
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            report_error(e.kind(), &e.to_string());
            EXIT_VERIFY_CONFIG
        }
    }
}
