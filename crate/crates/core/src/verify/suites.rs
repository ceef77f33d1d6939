//! Suite bodies. Every case draws from its own PRNG stream
//! (`Prng::for_case(seed, case)`), so results do not depend on sharding.

use nalgebra::DVector;

use crate::brackets::{
    friction_bracket, lie_poisson, metric4_ep, metric4_first_form, metric4_no_symplectic,
    metric4_symmetric_form, metric4_transfer, poisson_canonical, reduce_to_2, Bracket2, Bracket4,
    Eval2, Eval4,
};
use crate::dynamics::{rhs_euler_lagrange, BracketForm, BracketSet};
use crate::error::{Error, Result};
use crate::fluid1d::{heat_bracket4, lie_poisson_fluid, reduced_2brackets, visc_bracket4};
use crate::observable::Observable;
use crate::rng::Prng;
use crate::state::{Gradient, State, StateClass};
use crate::systems::{Mechanics, System};

use super::{
    random_observable, relative_violation, Suite, Violations, SYMMETRY_STATES, TOLERANCES,
};

/// Stream offset for the shared symmetry states.
const STATE_STREAM: u64 = 0x5354_4154_4553;
/// Maximum draws when searching for states where a bracket is defined.
const MAX_DRAWS: usize = 10_000;

pub(super) fn check_supported(suite: Suite, sys: &System) -> Result<()> {
    let ok = match suite {
        Suite::Symmetry | Suite::Equivalence | Suite::Conservation => true,
        Suite::Jacobi => matches!(sys.class(), StateClass::Simple | StateClass::Discrete),
        Suite::KnAgreement => matches!(
            sys.class(),
            StateClass::Simple | StateClass::Discrete | StateClass::Field1D
        ),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::UnsupportedSuite {
            suite: suite.name().into(),
            system: sys.name().into(),
        })
    }
}

/// A bracket prepared at the shared symmetry states.
struct Prepared4 {
    name: String,
    states: Vec<(State, Eval4)>,
}

struct Prepared2 {
    name: String,
    antisymmetric: bool,
    states: Vec<(State, Eval2)>,
}

pub(super) struct Context {
    suite: Suite,
    sys: System,
    seed: u64,
    brackets4: Vec<Prepared4>,
    brackets2: Vec<Prepared2>,
    bracket_set: Option<BracketSet>,
    first_form: Option<BracketSet>,
}

fn bracket4_list(sys: &System) -> Vec<Bracket4> {
    match sys {
        System::Simple(s) => vec![
            metric4_symmetric_form(s),
            metric4_first_form(s, TOLERANCES.first_form_k),
        ],
        System::Discrete(s) => {
            let mut v: Vec<Bracket4> = (0..s.subsystems())
                .map(|i| friction_bracket(s, i))
                .collect();
            v.push(metric4_transfer(s));
            v
        }
        System::NoSymp(s) => vec![metric4_no_symplectic(s)],
        System::Lie(s) => vec![metric4_ep(s)],
        System::Fluid(s) => vec![visc_bracket4(s), heat_bracket4(s)],
    }
}

fn bracket2_list(sys: &System) -> Result<Vec<(Bracket2, bool)>> {
    let metric = BracketSet::new(sys, BracketForm::Symmetric)?.metric;
    let reduced = (reduce_to_2(&metric, &sys.hamiltonian_observable()), false);
    Ok(match sys {
        System::Simple(_) => vec![(poisson_canonical(StateClass::Simple), true), reduced],
        System::Discrete(_) => vec![(poisson_canonical(StateClass::Discrete), true), reduced],
        System::NoSymp(_) => vec![reduced],
        System::Lie(s) => vec![(lie_poisson(s), true), reduced],
        System::Fluid(s) => {
            let (v2, h2) = reduced_2brackets(s);
            vec![
                (lie_poisson_fluid(s), true),
                reduced,
                (v2, false),
                (h2, false),
            ]
        }
    })
}

/// `SYMMETRY_STATES` sampled states at which `prepare` succeeds.
fn prepared_states<E>(
    sys: &System,
    seed: u64,
    prepare: impl Fn(&State) -> Result<E>,
) -> Result<Vec<(State, E)>> {
    let mut rng = Prng::for_case(seed, STATE_STREAM);
    let mut out = Vec::new();
    let mut last = None;
    for _ in 0..MAX_DRAWS {
        if out.len() == SYMMETRY_STATES {
            return Ok(out);
        }
        let x = sys.sample(&mut rng);
        match prepare(&x) {
            Ok(e) => out.push((x, e)),
            Err(e @ Error::DegenerateK { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Spec("could not sample valid states".into())))
}

impl Context {
    pub(super) fn new(suite: Suite, sys: &System, seed: u64) -> Result<Self> {
        let mut ctx = Context {
            suite,
            sys: sys.clone(),
            seed,
            brackets4: Vec::new(),
            brackets2: Vec::new(),
            bracket_set: None,
            first_form: None,
        };
        match suite {
            Suite::Symmetry => {
                for b in bracket4_list(sys) {
                    ctx.brackets4.push(Prepared4 {
                        name: b.name().to_string(),
                        states: prepared_states(sys, seed, |x| b.at(x))?,
                    });
                }
                for (b, antisymmetric) in bracket2_list(sys)? {
                    ctx.brackets2.push(Prepared2 {
                        name: b.name().to_string(),
                        antisymmetric,
                        states: prepared_states(sys, seed, |x| b.at(x))?,
                    });
                }
            }
            Suite::Equivalence | Suite::Conservation => {
                ctx.bracket_set = Some(BracketSet::new(sys, BracketForm::Symmetric)?);
                if suite == Suite::Equivalence && sys.class() == StateClass::Simple {
                    ctx.first_form = Some(BracketSet::new(sys, BracketForm::First)?);
                }
            }
            Suite::Jacobi | Suite::KnAgreement => {}
        }
        Ok(ctx)
    }

    /// Invariants reported even when no case exercises them.
    pub(super) fn baseline(&self) -> Violations {
        Violations::default()
    }

    pub(super) fn run_case(&self, case: u64) -> Result<Violations> {
        let mut rng = Prng::for_case(self.seed, case);
        match self.suite {
            Suite::Symmetry => self.symmetry(&mut rng),
            Suite::Equivalence => self.equivalence(case, &mut rng),
            Suite::Conservation => self.conservation(&mut rng),
            Suite::Jacobi => self.jacobi(&mut rng),
            Suite::KnAgreement => self.kn_agreement(&mut rng),
        }
    }

    fn observables(&self, rng: &mut Prng, count: usize, max_degree: usize) -> Vec<Observable> {
        (0..count)
            .map(|_| {
                let seed = rng.next_u64();
                let degree = rng.below(max_degree + 1);
                random_observable(seed, self.sys.layout(), degree)
            })
            .collect()
    }

    fn symmetry(&self, rng: &mut Prng) -> Result<Violations> {
        let mut v = Violations::default();
        let obs = self.observables(rng, 4, 3);
        // every case is checked with analytic and with finite-difference gradients
        for use_fd in [false, true] {
            let (suffix, tol) = if use_fd {
                ("_fd", TOLERANCES.symmetry_fd)
            } else {
                ("", TOLERANCES.symmetry)
            };
            let obs: Vec<Observable> = obs
                .iter()
                .map(|o| {
                    if use_fd {
                        o.clone().without_gradient()
                    } else {
                        o.clone()
                    }
                })
                .collect();
            // brackets mostly share their sample states
            let mut cache: Vec<(State, Vec<Gradient>)> = Vec::new();
            let mut grads_at = |x: &State| -> Result<Vec<Gradient>> {
                if let Some((_, g)) = cache.iter().find(|(y, _)| y.as_slice() == x.as_slice()) {
                    return Ok(g.clone());
                }
                let g: Vec<Gradient> = obs.iter().map(|o| o.grad(x)).collect::<Result<_>>()?;
                cache.push((x.clone(), g.clone()));
                Ok(g)
            };
            for b in &self.brackets4 {
                for (x, e) in &b.states {
                    let g = grads_at(x)?;
                    let (f, gg, m, n) = (&g[0], &g[1], &g[2], &g[3]);
                    let val = e(&[f, gg, m, n]);
                    let worst = relative_violation(val, -e(&[gg, f, m, n]))
                        .max(relative_violation(val, -e(&[f, gg, n, m])))
                        .max(relative_violation(val, e(&[m, n, f, gg])));
                    v.record(format!("{}{suffix}", b.name), worst, tol);
                }
            }
            for b in &self.brackets2 {
                for (x, e) in &b.states {
                    let g = grads_at(x)?;
                    let (a, r) = (e(&g[0], &g[1]), e(&g[1], &g[0]));
                    let worst = if b.antisymmetric {
                        relative_violation(a, -r)
                    } else {
                        relative_violation(a, r)
                    };
                    v.record(format!("{}{suffix}", b.name), worst, tol);
                }
            }
        }
        Ok(v)
    }

    fn equivalence(&self, case: u64, rng: &mut Prng) -> Result<Violations> {
        let mut v = Violations::default();
        let x = self.sys.sample(rng);
        let set = self.bracket_set.as_ref().expect("prepared");
        let el = rhs_euler_lagrange(&self.sys, &x)?;
        let br = set.rhs(&x)?;
        let tol = if self.sys.class() == StateClass::Field1D {
            TOLERANCES.equivalence_field
        } else {
            TOLERANCES.equivalence
        };
        v.record("engines", engine_gap(&br, &el), tol);
        if case % 10 == 0 {
            let fd_set = BracketSet {
                hamiltonian: set.hamiltonian.clone().without_gradient(),
                ..set.clone()
            };
            v.record(
                "engines_fd",
                engine_gap(&fd_set.rhs(&x)?, &el),
                TOLERANCES.equivalence_fd,
            );
        }
        if let (Some(first), System::Simple(s)) = (&self.first_form, &self.sys) {
            if s.dissipated_power(&x)?.abs() > TOLERANCES.first_form_k {
                v.record(
                    "first_vs_symmetric",
                    engine_gap(&first.rhs(&x)?, &br),
                    TOLERANCES.first_vs_symmetric,
                );
            }
        }
        Ok(v)
    }

    fn conservation(&self, rng: &mut Prng) -> Result<Violations> {
        let mut v = Violations::default();
        let x = self.sys.sample(rng);
        let set = self.bracket_set.as_ref().expect("prepared");
        let rate = set.rhs(&x)?;
        let ds = set.entropy.grad(&x)?.dot(&rate);
        v.record(
            "entropy_production",
            (-ds).max(0.0),
            TOLERANCES.entropy_rate,
        );
        let dh = set.hamiltonian.grad(&x)?;
        let scale = dh.norm() * rate.norm();
        let dh_dt = dh.dot(&rate);
        v.record(
            "energy_rate",
            if scale > 0.0 {
                dh_dt.abs() / scale
            } else {
                0.0
            },
            TOLERANCES.energy_rate,
        );
        if let System::Fluid(_) = self.sys {
            let rho_dot = rate.rho();
            let total: f64 = rho_dot.iter().sum();
            let scale: f64 = rho_dot.iter().map(|r| r.abs()).sum();
            v.record(
                "mass_rate",
                if scale > 0.0 {
                    total.abs() / scale
                } else {
                    0.0
                },
                TOLERANCES.mass_rate,
            );
        }
        Ok(v)
    }

    fn jacobi(&self, rng: &mut Prng) -> Result<Violations> {
        let mut v = Violations::default();
        let class = self.sys.class();
        let pb = poisson_canonical(class);
        let x = self.sys.sample(rng);
        let obs = self.observables(rng, 3, 2);
        // {a, b} as an observable with finite-difference gradient
        let nested = |a: &Observable, b: &Observable| {
            let (a, b, pb) = (a.clone(), b.clone(), pb.clone());
            Observable::new("nested", class, move |x| {
                pb.eval(&a, &b, x).unwrap_or(f64::NAN)
            })
        };
        let (f, g, h) = (&obs[0], &obs[1], &obs[2]);
        let cyclic = pb.eval(f, &nested(g, h), &x)?
            + pb.eval(g, &nested(h, f), &x)?
            + pb.eval(h, &nested(f, g), &x)?;
        v.record("cyclic_sum", cyclic.abs(), TOLERANCES.jacobi);
        let s = self.sys.entropy_observable();
        v.record(
            "entropy_casimir",
            pb.eval(f, &s, &x)?.abs(),
            TOLERANCES.symmetry,
        );
        Ok(v)
    }

    fn kn_agreement(&self, rng: &mut Prng) -> Result<Violations> {
        let mut v = Violations::default();
        let x = self.sys.sample(rng);
        match &self.sys {
            System::Simple(s) => {
                let obs = self.observables(rng, 4, 3);
                let g: Vec<Gradient> = obs.iter().map(|o| o.grad(&x)).collect::<Result<_>>()?;
                let grads = [&g[0], &g[1], &g[2], &g[3]];
                let kn = metric4_symmetric_form(s).eval_grads(&grads, &x)?;
                let (direct, scale) = direct_symmetric_form(s, 0, &grads, &x)?;
                v.record(
                    "kn_vs_direct",
                    scaled_gap(kn, direct, scale),
                    TOLERANCES.kn_agreement,
                );
            }
            System::Discrete(s) => {
                let obs = self.observables(rng, 4, 3);
                let g: Vec<Gradient> = obs.iter().map(|o| o.grad(&x)).collect::<Result<_>>()?;
                let grads = [&g[0], &g[1], &g[2], &g[3]];
                for i in 0..s.subsystems() {
                    let kn = friction_bracket(s, i).eval_grads(&grads, &x)?;
                    let (direct, scale) = direct_symmetric_form(s, i, &grads, &x)?;
                    v.record(
                        format!("kn_vs_direct_{}", i + 1),
                        scaled_gap(kn, direct, scale),
                        TOLERANCES.kn_agreement,
                    );
                }
            }
            System::Fluid(s) => {
                let obs = self.observables(rng, 2, 3);
                let h = s.hamiltonian_observable();
                let (v2, h2) = reduced_2brackets(s);
                for (name, b2, b4) in [
                    ("visc2_reduction", v2, visc_bracket4(s)),
                    ("heat2_reduction", h2, heat_bracket4(s)),
                ] {
                    let (f, g) = (&obs[0], &obs[1]);
                    let closed = b2.eval(f, g, &x)?;
                    let reduced = b4.eval(f, &h, g, &h, &x)?;
                    // Cauchy–Schwarz bound of the positive semidefinite form
                    let scale = (b2.eval(f, f, &x)?.abs() * b2.eval(g, g, &x)?.abs()).sqrt();
                    v.record(
                        name,
                        scaled_gap(closed, reduced, scale),
                        TOLERANCES.reduction,
                    );
                }
            }
            _ => unreachable!("checked by check_supported"),
        }
        Ok(v)
    }
}

/// `|b - el| / (1 + |el|)`.
fn engine_gap(b: &Gradient, el: &Gradient) -> f64 {
    let diff: f64 = b
        .as_slice()
        .iter()
        .zip(el.as_slice())
        .map(|(a, c)| (a - c) * (a - c))
        .sum::<f64>()
        .sqrt();
    diff / (1.0 + el.norm())
}

fn scaled_gap(a: f64, b: f64, scale: f64) -> f64 {
    let scale = scale.max(a.abs()).max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Direct expansion of the friction bracket of subsystem `i`:
///
/// `(1/T) ( <F_p, L M_p> G_S N_S - <F_p, L N_p> G_S M_S
///        + <G_p, L N_p> F_S M_S - <G_p, L M_p> F_S N_S )`
///
/// with plain matrix-vector products. Returns the value and the sum of the
/// absolute values of the four terms.
pub fn direct_symmetric_form(
    mech: &Mechanics,
    i: usize,
    grads: &[&Gradient; 4],
    x: &State,
) -> Result<(f64, f64)> {
    let t = mech.temperatures(x)?[i];
    let v = mech.velocity(x)?;
    let lam = mech.friction_matrix(i, x, &v);
    let p = |k: usize| DVector::from_column_slice(grads[k].p());
    let s = |k: usize| grads[k].entropies()[i];
    let form = |a: usize, b: usize| p(a).dot(&(&lam * p(b)));
    let terms = [
        form(0, 2) * s(1) * s(3),
        -form(0, 3) * s(1) * s(2),
        form(1, 3) * s(0) * s(2),
        -form(1, 2) * s(0) * s(3),
    ];
    let value = terms.iter().sum::<f64>() / t;
    let scale = terms.iter().map(|v| v.abs()).sum::<f64>() / t;
    Ok((value, scale))
}
