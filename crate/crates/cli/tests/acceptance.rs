//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the lines show up in `cargo test` output.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use metriplectic::brackets::{metric4_first_form, metric4_symmetric_form, DEFAULT_K_MIN};
use metriplectic::prelude::*;
use metriplectic::presets;
use metriplectic::verify::TOLERANCES;
use nalgebra::DMatrix;

type Check = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn preset(name: &str) -> System {
    presets::preset(name).expect("preset builds")
}

fn suite(suite: Suite, sys: &System, n: usize) -> Result<VerifyReport, String> {
    run_suite(suite, sys, 42, n).map_err(|e| format!("{}/{suite}: {e}", sys.name()))
}

fn worst(reports: &[VerifyReport], fd: bool) -> f64 {
    reports
        .iter()
        .flat_map(|r| r.violations.iter())
        .filter(|(k, _)| k.ends_with("_fd") == fd)
        .map(|(_, v)| *v)
        .fold(0.0, f64::max)
}

fn bracket_symmetry() -> Check {
    let required: BTreeMap<&str, &[&str]> = BTreeMap::from([
        ("piston", &["first_form", "friction1 KN dS1dS1"][..]),
        ("two_pistons", &["transfer"][..]),
        ("rigid_body", &["friction KN dsds"][..]),
        ("chemical", &["gamma KN dSdS"][..]),
        ("fluid1d", &["visc", "heat"][..]),
    ]);
    let mut reports = Vec::new();
    for (name, brackets) in &required {
        let r = suite(Suite::Symmetry, &preset(name), 100)?;
        for b in *brackets {
            ensure(r.violations.contains_key(*b), || {
                format!("{name}: bracket `{b}` not checked")
            })?;
        }
        ensure(r.pass, || format!("{name}: {:?}", r.failures()))?;
        reports.push(r);
    }
    let (a, f) = (worst(&reports, false), worst(&reports, true));
    ensure(a <= 1e-12 && f <= 1e-8, || {
        format!("analytic {a:e}, fd {f:e}")
    })?;
    Ok(format!(
        "7 brackets x 100 cases x 20 states; max {a:.1e} analytic, {f:.1e} fd"
    ))
}

fn engine_equivalence() -> Check {
    let mut out = Vec::new();
    for (name, tol) in [
        ("piston", 1e-10),
        ("two_pistons", 1e-10),
        ("chemical", 1e-10),
        ("rigid_body", 1e-10),
        ("fluid1d", 1e-8),
    ] {
        let r = suite(Suite::Equivalence, &preset(name), 100)?;
        let v = r.violations["engines"];
        ensure(v <= tol, || format!("{name}: {v:e} > {tol:e}"))?;
        ensure(r.pass, || format!("{name}: {:?}", r.failures()))?;
        out.push(format!("{name} {v:.1e}"));
    }
    Ok(out.join(", "))
}

fn piston_closed_form() -> Check {
    let sys = presets::piston(1.0).map_err(|e| e.to_string())?;
    let System::Simple(simple) = &sys else {
        unreachable!()
    };
    let (h, s) = (sys.hamiltonian_observable(), sys.entropy_observable());
    let x = State::simple(&[1.0], &[3.0], 0.0).unwrap();
    let t = simple.temperature(&x).map_err(|e| e.to_string())?;
    let k = simple.dissipated_power(&x).map_err(|e| e.to_string())?;
    ensure(t == 2.0 && k == 9.0, || format!("T = {t}, K = {k}"))?;
    let first = metric4_first_form(simple, DEFAULT_K_MIN).eval(&s, &h, &s, &h, &x);
    let sym = metric4_symmetric_form(simple).eval(&s, &h, &s, &h, &x);
    let el = rhs_euler_lagrange(&sys, &x).map(|r| r.entropies()[0]);
    let mut rates = Vec::new();
    for (label, v) in [("first", first), ("symmetric", sym), ("euler_lagrange", el)] {
        let v = v.map_err(|e| format!("{label}: {e}"))?;
        ensure(
            (v - 4.5).abs() <= 1e-14 && (v - k / t).abs() <= 1e-14,
            || format!("{label}: dS/dt = {v}"),
        )?;
        rates.push(v);
    }
    let rest = State::simple(&[1.0], &[0.0], 0.0).unwrap();
    let degenerate = metric4_first_form(simple, DEFAULT_K_MIN).eval(&s, &h, &s, &h, &rest);
    ensure(matches!(degenerate, Err(Error::DegenerateK { .. })), || {
        format!("first form at p = 0 gave {degenerate:?}")
    })?;
    let at_rest = metric4_symmetric_form(simple)
        .eval(&s, &h, &s, &h, &rest)
        .map_err(|e| e.to_string())?;
    ensure(at_rest == 0.0, || {
        format!("symmetric form at p = 0 gave {at_rest}")
    })?;
    Ok(format!("dS/dt = {:?}; p = 0: DegenerateK / 0", rates))
}

fn two_piston_relaxation() -> Check {
    // overdamped piston: x = 1, p = 0, T = (1, 2)
    let sys = presets::two_pistons(2.0, 2.0, 1.0).map_err(|e| e.to_string())?;
    let x0 = State::discrete(&[1.0], &[0.0], &[0.0, 1.5 * 2f64.ln()]).unwrap();
    let traj = integrate(&sys, Engine::BRACKET, &x0, 1e-3, 50.0, Method::Rk4)
        .map_err(|e| e.to_string())?;
    let d = &traj.diagnostics;
    let gap: Vec<f64> = d
        .iter()
        .map(|d| (d.temperatures[0] - d.temperatures[1]).abs())
        .collect();
    ensure((gap[0] - 1.0).abs() < 1e-12, || {
        format!("initial gap {}", gap[0])
    })?;
    if let Some(k) = gap.windows(2).position(|w| w[1] >= w[0]) {
        return Err(format!(
            "|T1 - T2| rose at step {}: {:e} -> {:e}",
            k + 1,
            gap[k],
            gap[k + 1]
        ));
    }
    let ds = d
        .windows(2)
        .map(|w| w[1].s_total - w[0].s_total)
        .fold(f64::INFINITY, f64::min);
    ensure(ds >= -1e-12, || format!("entropy step {ds:e}"))?;
    let h0 = d[0].h;
    let drift = d
        .iter()
        .map(|d| (d.h - h0).abs() / h0.abs())
        .fold(0.0, f64::max);
    ensure(drift <= 1e-7, || format!("energy drift {drift:e}"))?;
    Ok(format!(
        "{} steps; |T1-T2| 1 -> {:.1e}, min dS {ds:.1e}, |dH|/H {drift:.1e}",
        traj.len() - 1,
        gap[gap.len() - 1]
    ))
}

/// Slowest relaxation rate: smallest eigenvalue of `lambda^-1 Q`.
fn slowest_rate(q: &DMatrix<f64>, lambda: &DMatrix<f64>) -> f64 {
    let l = lambda.clone().cholesky().expect("SPD").l();
    let li = l.try_inverse().expect("invertible");
    let m = &li * q * li.transpose();
    m.symmetric_eigen().eigenvalues.min()
}

fn chemical_gradient_flow() -> Check {
    let (q, psi_star, lambda) = presets::chemical_parts(3, 7);
    let rate = slowest_rate(&q, &lambda);
    let sys = presets::chemical(3, 7).map_err(|e| e.to_string())?;
    let psi0: Vec<f64> = psi_star
        .iter()
        .zip([1.0, -1.0, 0.5])
        .map(|(a, b)| a + b)
        .collect();
    let x0 = State::no_symp(&psi0, 1.0).unwrap();
    let t_final = 100.0 / rate;
    let traj = integrate(&sys, Engine::BRACKET, &x0, 0.01, t_final, Method::Rk4)
        .map_err(|e| e.to_string())?;
    let last = traj.last().unwrap();
    let err = last
        .q()
        .iter()
        .zip(&psi_star)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    ensure(err <= 1e-6, || {
        format!("|psi - psi*| = {err:e} at t = {t_final}")
    })?;
    let d = &traj.diagnostics;
    let h0 = d[0].h;
    let drift = d
        .iter()
        .map(|d| (d.h - h0).abs() / h0.abs())
        .fold(0.0, f64::max);
    ensure(drift <= 1e-8, || format!("energy drift {drift:e}"))?;
    let ds = d
        .windows(2)
        .map(|w| w[1].s_total - w[0].s_total)
        .fold(f64::INFINITY, f64::min);
    ensure(ds >= -1e-12, || format!("entropy step {ds:e}"))?;
    Ok(format!(
        "lambda_min {rate:.3}, t = {t_final:.1}; |psi-psi*| {err:.1e}, |dH|/H {drift:.1e}, min dS {ds:.1e}"
    ))
}

fn fluid_structure() -> Check {
    let sys = presets::fluid(32, 0.01, 0.01).map_err(|e| e.to_string())?;
    let System::Fluid(fluid) = &sys else {
        unreachable!()
    };
    let x0 = fluid.smooth_state(0.2).map_err(|e| e.to_string())?;
    let traj =
        integrate(&sys, Engine::BRACKET, &x0, 1e-4, 1.0, Method::Rk4).map_err(|e| e.to_string())?;
    ensure(traj.len() == 10_001, || format!("{} states", traj.len()))?;
    let mass: Vec<f64> = traj.states.iter().map(|x| fluid.mass(x)).collect();
    let dm = mass
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    ensure(dm <= 1e-13, || format!("mass step {dm:e}"))?;
    let d = &traj.diagnostics;
    let h0 = d[0].h;
    let drift = d
        .iter()
        .map(|d| (d.h - h0).abs() / h0.abs())
        .fold(0.0, f64::max);
    ensure(drift <= 1e-6, || format!("energy drift {drift:e}"))?;
    let ds = d
        .windows(2)
        .map(|w| w[1].s_total - w[0].s_total)
        .fold(f64::INFINITY, f64::min);
    ensure(ds >= 0.0, || format!("entropy step {ds:e}"))?;
    let r = suite(Suite::KnAgreement, &sys, 20)?;
    let red = r.violations["visc2_reduction"].max(r.violations["heat2_reduction"]);
    ensure(red <= 1e-10, || format!("reduction {red:e}"))?;
    Ok(format!(
        "max |dM| {dm:.1e}, |dH|/H {drift:.1e}, min dS {ds:.1e}, reductions {red:.1e}"
    ))
}

fn kn_structure() -> Check {
    let r = suite(Suite::KnAgreement, &preset("piston"), 100)?;
    let v = r.violations["kn_vs_direct"];
    ensure(v <= 1e-12 && r.pass, || format!("{v:e}"))?;
    let d = suite(Suite::KnAgreement, &preset("two_pistons"), 100)?;
    ensure(d.pass, || format!("two_pistons: {:?}", d.failures()))?;
    Ok(format!("100 cases, max {v:.1e}"))
}

fn jacobi() -> Check {
    let mut out = Vec::new();
    for name in ["piston", "two_pistons"] {
        let r = suite(Suite::Jacobi, &preset(name), 50)?;
        let v = r.violations["cyclic_sum"];
        ensure(v <= TOLERANCES.jacobi && r.pass, || {
            format!("{name}: {v:e}")
        })?;
        out.push(format!("{name} {v:.1e}"));
    }
    Ok(format!("50 cases, cyclic sum {}", out.join(", ")))
}

fn negative_control() -> Check {
    let spec = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/bad_lambda.toml");
    let out = Command::new(env!("CARGO_BIN_EXE_metriplectic"))
        .args(["verify", "--suite", "conservation", "--spec"])
        .arg(&spec)
        .env("METRIPLECTIC_LOG", "off")
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code();
    ensure(code.is_some_and(|c| c != 0), || format!("exit {code:?}"))?;
    let report: serde_json::Value =
        serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let v = report["violations"]["entropy_production"]
        .as_f64()
        .unwrap_or(0.0);
    ensure(
        report["pass"] == false && v > TOLERANCES.entropy_rate,
        || report.to_string(),
    )?;
    let control = suite(Suite::Conservation, &preset("piston"), 100)?;
    ensure(control.pass, || "unplanted piston fails too".into())?;
    Ok(format!(
        "exit {}, entropy decrease rate {v:.2}",
        code.unwrap()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("bracket symmetry", 10, bracket_symmetry),
        ("engine equivalence", 30, engine_equivalence),
        ("piston closed form", 5, piston_closed_form),
        ("two-piston relaxation", 5, two_piston_relaxation),
        ("chemical gradient flow", 5, chemical_gradient_flow),
        ("fluid1d structure", 60, fluid_structure),
        ("Kulkarni-Nomizu structure", 10, kn_structure),
        ("canonical Jacobi identity", 10, jacobi),
        ("negative control", 10, negative_control),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let result = match result {
            Ok(detail) if took > Duration::from_secs(*budget) => {
                Err(format!("{detail}; over the {budget} s budget"))
            }
            other => other,
        };
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} [{}] {name}: {detail} ({:.2} s of {budget} s)",
            i + 1,
            took.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
