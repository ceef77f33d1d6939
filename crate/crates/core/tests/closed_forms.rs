//! Hand-substituted values for the built-in systems.

use metriplectic::brackets::{
    kn_combine, metric4_first_form, metric4_symmetric_form, metric4_transfer, reduce_to_2,
    DEFAULT_K_MIN,
};
use metriplectic::prelude::*;
use metriplectic::presets;
use nalgebra::DMatrix;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

fn piston() -> SimpleSystem {
    match presets::piston(1.0).unwrap() {
        System::Simple(s) => s,
        _ => unreachable!(),
    }
}

fn rate_of(sys: &System, b4: &Bracket4, f: &Observable, x: &State) -> f64 {
    let h = sys.hamiltonian_observable();
    let s = sys.entropy_observable();
    b4.eval(f, &h, &s, &h, x).unwrap()
}

#[test]
fn piston_entropy_rate_is_k_over_t() {
    let sys = piston();
    let x = State::simple(&[1.0], &[3.0], 0.0).unwrap();
    assert_eq!(sys.temperature(&x).unwrap(), 2.0);
    let k = sys.dissipated_power(&x).unwrap();
    assert!(close(k, 9.0, 1e-15));

    let wrapped = System::from(sys.clone());
    let s = wrapped.entropy_observable();
    let first = rate_of(&wrapped, &metric4_first_form(&sys, DEFAULT_K_MIN), &s, &x);
    let sym = rate_of(&wrapped, &metric4_symmetric_form(&sys), &s, &x);
    assert!(close(first, k / 2.0, 1e-14), "{first}");
    assert!(close(sym, 4.5, 1e-14), "{sym}");

    let two = reduce_to_2(
        &metric4_symmetric_form(&sys),
        &wrapped.hamiltonian_observable(),
    );
    assert!(close(two.eval(&s, &s, &x).unwrap(), 4.5, 1e-14));

    for engine in [Engine::BRACKET, Engine::FIRST_FORM, Engine::EULER_LAGRANGE] {
        let r = VectorField::new(&wrapped, engine)
            .unwrap()
            .eval(&x)
            .unwrap();
        assert!(close(r.entropies()[0], 4.5, 1e-14), "{engine:?}");
        // p' = -dU/dx - lambda p / m = 2 - 3
        assert!(close(r.p()[0], -1.0, 1e-13), "{engine:?}: {}", r.p()[0]);
        assert!(close(r.q()[0], 3.0, 1e-14));
    }
}

#[test]
fn piston_at_rest() {
    let sys = piston();
    let wrapped = System::from(sys.clone());
    let x = State::simple(&[1.0], &[0.0], 0.0).unwrap();
    let s = wrapped.entropy_observable();
    let h = wrapped.hamiltonian_observable();
    let err = metric4_first_form(&sys, DEFAULT_K_MIN)
        .eval(&s, &h, &s, &h, &x)
        .unwrap_err();
    assert!(matches!(err, Error::DegenerateK { .. }), "{err}");
    assert_eq!(
        rate_of(&wrapped, &metric4_symmetric_form(&sys), &s, &x),
        0.0
    );
    assert_eq!(rhs_bracket(&wrapped, &x).unwrap().entropies()[0], 0.0);
}

#[test]
fn first_form_vanishes_on_equal_arguments() {
    let sys = piston();
    let wrapped = System::from(sys.clone());
    let x = State::simple(&[0.8], &[-1.3], 0.2).unwrap();
    let b = metric4_first_form(&sys, DEFAULT_K_MIN);
    let f = random_observable(3, wrapped.layout(), 2);
    let m = random_observable(4, wrapped.layout(), 2);
    let n = random_observable(5, wrapped.layout(), 2);
    assert_eq!(b.eval(&f, &f, &m, &n, &x).unwrap(), 0.0);
}

#[test]
fn frictionless_piston_has_no_entropy_production() {
    let sys = presets::piston(0.0).unwrap();
    let mut rng = Prng::new(11);
    for _ in 0..20 {
        let x = sys.sample(&mut rng);
        assert_eq!(rhs_bracket(&sys, &x).unwrap().entropies()[0], 0.0);
        assert_eq!(rhs_euler_lagrange(&sys, &x).unwrap().entropies()[0], 0.0);
    }
}

#[test]
fn kn_substitution() {
    // a(F,M) = 2, a(G,N) = 1, the cross terms vanish, b = 1
    let a = |i: usize, j: usize| match (i.min(j), i.max(j)) {
        (0, 2) => 2.0,
        (1, 3) => 1.0,
        _ => 0.0,
    };
    assert_eq!(kn_combine(a, |_, _| 1.0), 3.0);
    assert_eq!(kn_combine(|_, _| 1.0, |_, _| 1.0), 0.0);
}

/// Two equal gases at `x = 1` (volumes 1 and 1), temperatures `t1`, `t2`.
fn two_pistons(lambda: f64, kappa: f64) -> DiscreteSystem {
    match presets::two_pistons(lambda, lambda, kappa).unwrap() {
        System::Discrete(d) => d,
        _ => unreachable!(),
    }
}

fn at_temperatures(p: f64, t1: f64, t2: f64) -> State {
    // T = exp(S / c_v) at unit volume with c_v = 1.5, U0 = 1.5
    State::discrete(&[1.0], &[p], &[1.5 * t1.ln(), 1.5 * t2.ln()]).unwrap()
}

#[test]
fn heat_transfer_between_pistons() {
    let sys = two_pistons(0.0, 3.0);
    let wrapped = System::from(sys.clone());
    let x = at_temperatures(0.0, 1.0, 2.0);
    let t = sys.temperatures(&x).unwrap();
    assert!(close(t[0], 1.0, 1e-14) && close(t[1], 2.0, 1e-14));

    let b = metric4_transfer(&sys);
    let s1 = Observable::coordinate(wrapped.layout(), 2);
    assert!(close(rate_of(&wrapped, &b, &s1, &x), 3.0, 1e-13));
    let total = wrapped.entropy_observable();
    assert!(close(rate_of(&wrapped, &b, &total, &x), 1.5, 1e-13));

    // S1' = (kappa / T1)(T2 - T1), S2' = (kappa / T2)(T1 - T2)
    for rate in [
        rhs_bracket(&wrapped, &x).unwrap(),
        rhs_euler_lagrange(&wrapped, &x).unwrap(),
    ] {
        assert!(close(rate.entropies()[0], 3.0, 1e-13));
        assert!(close(rate.entropies()[1], -1.5, 1e-13));
    }
}

#[test]
fn two_piston_equations_of_motion() {
    let (l, kappa) = (0.4, 0.7);
    let sys = two_pistons(l, kappa);
    let wrapped = System::from(sys.clone());
    let x = State::discrete(&[0.8], &[1.3], &[0.2, -0.1]).unwrap();
    let t = sys.temperatures(&x).unwrap();
    let v = 1.3;
    let dh = sys.hamiltonian_partials(&x).unwrap();
    let want_p = -dh.dq[0] - 2.0 * l * v;
    let want_s = [
        l / t[0] * v * v + kappa / t[0] * (t[1] - t[0]),
        l / t[1] * v * v + kappa / t[1] * (t[0] - t[1]),
    ];
    for rate in [
        rhs_bracket(&wrapped, &x).unwrap(),
        rhs_euler_lagrange(&wrapped, &x).unwrap(),
    ] {
        assert!(close(rate.p()[0], want_p, 1e-13));
        assert!(close(rate.entropies()[0], want_s[0], 1e-13));
        assert!(close(rate.entropies()[1], want_s[1], 1e-13));
    }
}

#[test]
fn pure_conduction_and_equilibrium() {
    let sys = System::from(two_pistons(0.0, 2.0));
    let x = at_temperatures(0.0, 1.5, 0.5);
    let r = rhs_bracket(&sys, &x).unwrap();
    let want = 2.0 * (1.5f64 - 0.5).powi(2) / (1.5 * 0.5);
    assert!(close(r.entropies().iter().sum(), want, 1e-13));

    let eq = at_temperatures(0.0, 1.2, 1.2);
    let r = rhs_bracket(&sys, &eq).unwrap();
    assert!(r.as_slice().iter().all(|v| v.abs() < 1e-15), "{r:?}");
}

#[test]
fn decoupled_pistons_match_single_piston_rates() {
    let sys = two_pistons(0.6, 0.0);
    let x = State::discrete(&[0.9], &[-2.0], &[0.3, 0.1]).unwrap();
    let r = rhs_bracket(&System::from(sys.clone()), &x).unwrap();
    let t = sys.temperatures(&x).unwrap();
    for (rate, t) in r.entropies().iter().zip(&t) {
        assert!(close(*rate, 0.6 / t * 4.0, 1e-13));
    }
}

#[test]
fn heat_flux_matrix_of_two_bodies() {
    let j = heat_flux_matrix(&two_pistons(0.0, 3.0));
    assert_eq!(j, DMatrix::from_row_slice(2, 2, &[3.0, -3.0, -3.0, 3.0]));
    assert_eq!(
        heat_flux_matrix(&two_pistons(0.0, 0.0)),
        DMatrix::zeros(2, 2)
    );
}

fn one_species() -> NoSympSystem {
    builtin_chemical(
        DMatrix::from_element(1, 1, 1.0),
        vec![0.0],
        DMatrix::from_element(1, 1, 2.0),
        EntropyEnergy::Linear { slope: 1.0 },
    )
    .unwrap()
}

#[test]
fn single_reaction_rates() {
    let chem = one_species();
    let sys = System::from(chem.clone());
    let x = State::no_symp(&[4.0], 0.3).unwrap();
    let b = metric4_no_symplectic(&chem);
    let psi = Observable::coordinate(sys.layout(), 0);
    assert!(close(rate_of(&sys, &b, &psi, &x), -2.0, 1e-14));
    assert!(close(
        rate_of(&sys, &b, &sys.entropy_observable(), &x),
        8.0,
        1e-14
    ));
    for rate in [
        rhs_bracket(&sys, &x).unwrap(),
        rhs_euler_lagrange(&sys, &x).unwrap(),
    ] {
        assert!(close(rate.q()[0], -2.0, 1e-14));
        assert!(close(rate.entropies()[0], 8.0, 1e-14));
    }
    let eq = State::no_symp(&[0.0], 0.3).unwrap();
    assert!(rhs_bracket(&sys, &eq)
        .unwrap()
        .as_slice()
        .iter()
        .all(|&v| v == 0.0));
}

#[test]
fn singular_reaction_friction_is_rejected() {
    let lambda = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
    let err = NoSympSystem::new(
        "flat",
        lambda,
        |q, s| (0.0, vec![0.0; q.len()], 1.0 + 0.0 * s),
        |_| State::no_symp(&[0.0, 0.0], 0.0).unwrap(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::SingularFrictionMatrix { .. }), "{err}");
}

fn rigid_body(lambda: f64) -> LieSystem {
    match presets::rigid_body(lambda).unwrap() {
        System::Lie(l) => l,
        _ => unreachable!(),
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[test]
fn free_rigid_body_follows_euler_equations() {
    let body = rigid_body(0.0);
    let sys = System::from(body);
    let mu = [0.0, 1.0, 1.0];
    let x = State::lie(&mu, &[], 0.0).unwrap();
    let omega = [0.0, 0.5, 1.0 / 3.0];
    let want = cross(mu, omega);
    assert!(close(want[0], -1.0 / 6.0, 1e-15));
    for rate in [
        rhs_bracket(&sys, &x).unwrap(),
        rhs_euler_lagrange(&sys, &x).unwrap(),
    ] {
        for (got, want) in rate.mu().iter().zip(want) {
            assert!(close(*got, want, 1e-14), "{:?}", rate.mu());
        }
        assert_eq!(rate.entropies()[0], 0.0);
    }
}

#[test]
fn rigid_body_entropy_rate() {
    let body = rigid_body(1.0);
    let sys = System::from(body.clone());
    let x = State::lie(&[0.0, 1.0, 1.0], &[], 0.4).unwrap();
    assert_eq!(body.temperature(&x).unwrap(), 1.0);
    let s = sys.entropy_observable();
    let v = rate_of(&sys, &metric4_ep(&body), &s, &x);
    assert!(close(v, 13.0 / 36.0, 1e-14), "{v}");
    assert!(close(
        rhs_euler_lagrange(&sys, &x).unwrap().entropies()[0],
        13.0 / 36.0,
        1e-14
    ));
}

#[test]
fn principal_axis_is_an_equilibrium() {
    let body = rigid_body(0.0);
    let sys = System::from(body.clone());
    let x = State::lie(&[1.0, 0.0, 0.0], &[], 0.0).unwrap();
    let h = sys.hamiltonian_observable();
    let mu1 = Observable::coordinate(sys.layout(), 0);
    assert_eq!(lie_poisson(&body).eval(&mu1, &h, &x).unwrap(), 0.0);
    assert!(rhs_bracket(&sys, &x)
        .unwrap()
        .as_slice()
        .iter()
        .all(|&v| v == 0.0));
}

#[test]
fn casimir_of_free_rigid_body() {
    let sys = System::from(rigid_body(0.0));
    let casimir = Observable::on_layout("|mu|^2", sys.layout(), |x| {
        x.mu().iter().map(|v| v * v).sum()
    });
    let traj = integrate(
        &sys,
        Engine::BRACKET,
        &State::lie(&[0.3, 1.0, -0.7], &[], 0.0).unwrap(),
        1e-3,
        2.0,
        Method::Rk4,
    )
    .unwrap();
    let c0 = casimir.eval(&traj.states[0]).unwrap();
    for x in &traj.states {
        assert!(close(casimir.eval(x).unwrap(), c0, 1e-10));
    }
}

#[test]
fn fluid_dissipation_rates() {
    let fluid = match presets::fluid(16, 0.02, 0.03).unwrap() {
        System::Fluid(f) => f,
        _ => unreachable!(),
    };
    let sys = System::from(fluid.clone());
    let x = fluid.smooth_state(0.3).unwrap();
    let s = sys.entropy_observable();
    let dx = fluid.grid().dx();
    let u = fluid.velocity(&x);
    let t = fluid.temperatures(&x).unwrap();
    let (du, dt) = (fluid.grid().diff(&u), fluid.grid().diff(&t));
    let visc: f64 = dx * (0..16).map(|i| 0.02 / t[i] * du[i] * du[i]).sum::<f64>();
    let heat: f64 = dx
        * (0..16)
            .map(|i| 0.03 / (t[i] * t[i]) * dt[i] * dt[i])
            .sum::<f64>();
    assert!(visc > 0.0 && heat > 0.0);
    assert!(close(
        rate_of(&sys, &visc_bracket4(&fluid), &s, &x),
        visc,
        1e-12
    ));
    assert!(close(
        rate_of(&sys, &heat_bracket4(&fluid), &s, &x),
        heat,
        1e-12
    ));
    let r = rhs_euler_lagrange(&sys, &x).unwrap();
    assert!(close(
        dx * r.entropies().iter().sum::<f64>(),
        visc + heat,
        1e-12
    ));
}
