use metriplectic::prelude::*;
use metriplectic::presets;
use metriplectic::verify::Polynomial;
use proptest::prelude::*;

/// Reference SplitMix64, written out independently of the library.
struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * ((self.next() >> 11) as f64 / 9007199254740992.0)
    }
}

#[test]
fn random_polynomial_matches_reference_stream() {
    // (q, p, S): 1, q, p, S, qq, qp, qS, pp, pS, SS
    let mut rng = SplitMix(7);
    let c: Vec<f64> = (0..10).map(|_| rng.uniform(-2.0, 2.0)).collect();
    let (q, p, s) = (0.7, -1.3, 0.4);
    let want = c[0]
        + c[1] * q
        + c[2] * p
        + c[3] * s
        + c[4] * q * q
        + c[5] * q * p
        + c[6] * q * s
        + c[7] * p * p
        + c[8] * p * s
        + c[9] * s * s;
    let f = random_observable(7, Layout::Simple { dim: 1 }, 2);
    let x = State::simple(&[q], &[p], s).unwrap();
    assert_eq!(f.eval(&x).unwrap(), want);
    let poly = Polynomial::random(7, 3, 2);
    assert_eq!(poly.terms().iter().map(|t| t.1).collect::<Vec<_>>(), c);
}

#[test]
fn finite_difference_gradients_match_analytic() {
    let layout = Layout::Discrete {
        dim: 2,
        subsystems: 2,
    };
    let mut rng = Prng::new(99);
    let states: Vec<State> = (0..20)
        .map(|_| State::from_vec(layout, rng.uniform_vec(layout.len(), -1.5, 1.5)).unwrap())
        .collect();
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let f = random_observable(seed, layout, 3);
        let fd = f.clone().without_gradient();
        for x in &states {
            let a = f.grad(x).unwrap();
            let b = fd.grad(x).unwrap();
            let scale = a.max_abs().max(1.0);
            for (u, v) in a.as_slice().iter().zip(b.as_slice()) {
                worst = worst.max((u - v).abs() / scale);
            }
        }
    }
    assert!(worst <= 1e-6, "worst relative gradient error {worst}");
}

#[test]
fn presets_pass_every_supported_suite() {
    for name in presets::NAMES {
        let sys = presets::preset(name).unwrap();
        for suite in Suite::ALL {
            match run_suite(suite, &sys, 42, 30) {
                Ok(r) => assert!(r.pass, "{name}/{suite}: {:?}", r.failures()),
                Err(e) => assert!(
                    matches!(e, Error::UnsupportedSuite { .. }),
                    "{name}/{suite}: {e}"
                ),
            }
        }
    }
}

#[test]
fn planted_negative_friction_fails_conservation() {
    let sys = presets::piston_indefinite(-0.5).unwrap();
    let report = run_suite(Suite::Conservation, &sys, 42, 50).unwrap();
    assert!(!report.pass);
    assert!(report.violations["entropy_production"] > 1e-3);
    assert_eq!(report.failures()[0].0, "entropy_production");
}

#[test]
fn indefinite_friction_is_refused_by_the_checked_builder() {
    assert!(matches!(presets::piston(-0.5), Err(Error::Spec(_))));
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let sys = presets::preset("two_pistons").unwrap();
    let one = run_suite_with(Suite::Symmetry, &sys, 5, 40, SuiteOptions { jobs: Some(1) }).unwrap();
    let four =
        run_suite_with(Suite::Symmetry, &sys, 5, 40, SuiteOptions { jobs: Some(4) }).unwrap();
    assert_eq!(one.to_json(), four.to_json());
}

#[test]
fn report_schema() {
    let sys = presets::preset("piston").unwrap();
    let r = run_suite(Suite::Equivalence, &sys, 1, 3).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys, ["cases", "pass", "seed", "suite", "violations"]);
    assert_eq!(v["suite"], "equivalence");
}

#[test]
fn unsupported_suite_is_an_error() {
    let sys = presets::preset("chemical").unwrap();
    let err = run_suite(Suite::Jacobi, &sys, 1, 1).unwrap_err();
    assert!(matches!(err, Error::UnsupportedSuite { .. }));
    assert!("nope"
        .parse::<Suite>()
        .unwrap_err()
        .contains("kn_agreement"));
}

#[test]
fn integration_is_reproducible() {
    let sys = presets::preset("fluid1d").unwrap();
    let x0 = match &sys {
        System::Fluid(f) => f.smooth_state(0.2).unwrap(),
        _ => unreachable!(),
    };
    let a = integrate(&sys, Engine::BRACKET, &x0, 1e-3, 0.02, Method::Rk4).unwrap();
    let b = integrate(&sys, Engine::BRACKET, &x0, 1e-3, 0.02, Method::Rk4).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 21);
}

#[test]
fn leaving_the_domain_keeps_the_partial_trajectory() {
    let sys = presets::piston(0.0).unwrap();
    // fast enough to cross x = 0 within the run
    let x0 = State::simple(&[0.05], &[-40.0], 0.0).unwrap();
    let err = integrate(&sys, Engine::BRACKET, &x0, 1e-3, 1.0, Method::Euler).unwrap_err();
    assert!(
        matches!(err.error, Error::DomainViolation { step: Some(_), .. }),
        "{}",
        err.error
    );
    assert!(!err.partial.is_empty());
    assert!(err.partial.states.iter().all(|x| x.q()[0] > 0.0));
}

fn system_strategy() -> impl Strategy<Value = &'static str> {
    prop::sample::select(presets::NAMES.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_never_decreases(name in system_strategy(), seed in any::<u64>()) {
        let sys = presets::preset(name).unwrap();
        let x = sys.sample(&mut Prng::new(seed));
        let r = rhs_bracket(&sys, &x).unwrap();
        let ds = match &sys {
            System::Fluid(f) => f.grid().dx() * r.entropies().iter().sum::<f64>(),
            _ => r.entropies().iter().sum(),
        };
        prop_assert!(ds >= -1e-12, "{ds}");
    }

    #[test]
    fn engines_agree(name in system_strategy(), seed in any::<u64>()) {
        let sys = presets::preset(name).unwrap();
        let x = sys.sample(&mut Prng::new(seed));
        let a = rhs_bracket(&sys, &x).unwrap();
        let b = rhs_euler_lagrange(&sys, &x).unwrap();
        for (u, v) in a.as_slice().iter().zip(b.as_slice()) {
            prop_assert!((u - v).abs() <= 1e-8 * (1.0 + v.abs()), "{u} vs {v}");
        }
    }

    #[test]
    fn metric_bracket_symmetries(seed in any::<u64>(), obs in any::<[u16; 4]>()) {
        let sys = presets::preset("two_pistons").unwrap();
        let b = match &sys {
            System::Discrete(d) => discrete_metric(d),
            _ => unreachable!(),
        };
        let x = sys.sample(&mut Prng::new(seed));
        let f: Vec<_> = obs.iter().map(|&s| random_observable(s as u64, sys.layout(), 2)).collect();
        let v = b.eval(&f[0], &f[1], &f[2], &f[3], &x).unwrap();
        prop_assert_eq!(b.eval(&f[1], &f[0], &f[2], &f[3], &x).unwrap(), -v);
        prop_assert_eq!(b.eval(&f[0], &f[1], &f[3], &f[2], &x).unwrap(), -v);
        prop_assert_eq!(b.eval(&f[2], &f[3], &f[0], &f[1], &x).unwrap(), v);
    }

    #[test]
    fn legendre_round_trip(v in -5.0f64..5.0, x in 0.3f64..3.0, s in -1.0f64..1.0) {
        let sys = presets::preset("piston").unwrap();
        let mech = match &sys { System::Simple(m) => m.clone(), _ => unreachable!() };
        let side = mech.hamiltonian_side();
        let p = momentum(mech.lagrangian(), &[x], &[v], &[s]);
        let back = side.inverse_legendre(&[x], &p, &[s]).unwrap();
        prop_assert!((back[0] - v).abs() <= 1e-10 * (1.0 + v.abs()));
        let h = side.value(&[x], &p, &[s]).unwrap();
        let l = mech.lagrangian().value(&[x], &[v], &[s]);
        prop_assert!((p[0] * v - h - l).abs() <= 1e-10 * (1.0 + h.abs()));
    }
}
