//! Right-hand sides from the Euler–Lagrange equations and from the brackets,
//! fixed-step integration and per-step diagnostics.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::brackets::{
    discrete_metric, lie_poisson, metric4_ep, metric4_first_form, metric4_no_symplectic,
    metric4_symmetric_form, poisson_canonical, Bracket2, Bracket4, DEFAULT_K_MIN,
};
use crate::error::{Error, Result};
use crate::fluid1d::{heat_bracket4, lie_poisson_fluid, rhs_euler_lagrange_fluid, visc_bracket4};
use crate::legendre::dot;
use crate::observable::Observable;
use crate::state::{Coords, State, StateClass, Tangent};
use crate::systems::{check_temperatures, LieSystem, Mechanics, NoSympSystem, System};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    EulerLagrange,
    #[default]
    Bracket,
}

/// Which metric 4-bracket drives simple systems in the bracket engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketForm {
    First,
    #[default]
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Rk4,
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Engine {
    pub kind: EngineKind,
    #[serde(default)]
    pub form: BracketForm,
}

impl Engine {
    pub const EULER_LAGRANGE: Engine = Engine {
        kind: EngineKind::EulerLagrange,
        form: BracketForm::Symmetric,
    };
    pub const BRACKET: Engine = Engine {
        kind: EngineKind::Bracket,
        form: BracketForm::Symmetric,
    };
    pub const FIRST_FORM: Engine = Engine {
        kind: EngineKind::Bracket,
        form: BracketForm::First,
    };
}

/// Euler–Lagrange right-hand side.
pub fn rhs_euler_lagrange(sys: &System, x: &State) -> Result<Tangent> {
    sys.check_domain(x)?;
    let data = match sys {
        System::Simple(s) => mechanics_rhs(s, x)?,
        System::Discrete(s) => mechanics_rhs(s, x)?,
        System::NoSymp(s) => no_symp_rhs(s, x)?,
        System::Lie(s) => lie_rhs(s, x)?,
        System::Fluid(s) => rhs_euler_lagrange_fluid(s, x)?,
    };
    Coords::new(x.layout(), data)
}

/// `qdot = H_p`, `pdot = -H_q - sum_i Lambda_i qdot`,
/// `Sdot_i = qdot Lambda_i qdot / T_i + sum_j kappa_ij (T_j - T_i) / T_i`.
fn mechanics_rhs(mech: &Mechanics, x: &State) -> Result<Vec<f64>> {
    let hp = mech.hamiltonian_partials(x)?;
    check_temperatures(&hp.ds)?;
    let (v, t) = (&hp.dp, &hp.ds);
    let n = t.len();
    let mut pdot: Vec<f64> = hp.dq.iter().map(|d| -d).collect();
    let mut sdot = vec![0.0; n];
    for i in 0..n {
        let lam = mech.friction_matrix(i, x, v);
        let lv = &lam * DVector::from_column_slice(v);
        for (pd, f) in pdot.iter_mut().zip(lv.iter()) {
            *pd -= f;
        }
        sdot[i] = dot(v, lv.as_slice()) / t[i];
        for j in 0..n {
            if j != i {
                sdot[i] += mech.kappa()[(i, j)] * (t[j] - t[i]) / t[i];
            }
        }
    }
    Ok(v.iter().copied().chain(pdot).chain(sdot).collect())
}

/// `qdot = -Gamma H_q`, `Sdot = H_q Gamma H_q / T`.
fn no_symp_rhs(sys: &NoSympSystem, x: &State) -> Result<Vec<f64>> {
    let (_, dq, t) = sys.potential(x)?;
    check_temperatures(&[t])?;
    let flow = sys.gamma() * DVector::from_column_slice(&dq);
    let sdot = dot(&dq, flow.as_slice()) / t;
    Ok(flow.iter().map(|v| -v).chain([sdot]).collect())
}

/// `mu_j' = <mu, [xi, e_j]> - <l_a, e_j a> - l_s chi_j s - (Lambda xi)_j`,
/// `a' = -xi a`, `s' = -chi(xi) s + xi Lambda xi / T` with `T = -l_s`.
fn lie_rhs(sys: &LieSystem, x: &State) -> Result<Vec<f64>> {
    let xi = sys.velocity(x)?;
    let (mu, a, s) = (x.mu(), x.advected(), x.entropy());
    let lp = sys.lagrangian().partials(a, &xi, x.entropies());
    let t = -lp.ds[0];
    check_temperatures(&[t])?;
    let n = sys.algebra_dim();
    let friction = sys.lambda() * DVector::from_column_slice(&xi);
    let mut mudot = vec![0.0; n];
    for (j, out) in mudot.iter_mut().enumerate() {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let coadjoint = dot(mu, &sys.commutator(&xi, &e));
        let advected = dot(&lp.dq, &sys.act(&e, a));
        *out = coadjoint - advected - lp.ds[0] * sys.chi()[j] * s - friction[j];
    }
    let adot: Vec<f64> = sys.act(&xi, a).iter().map(|v| -v).collect();
    let sdot = -dot(sys.chi(), &xi) * s + dot(&xi, friction.as_slice()) / t;
    Ok(mudot.into_iter().chain(adot).chain([sdot]).collect())
}

/// The brackets generating the motion of one system.
#[derive(Debug, Clone)]
pub struct BracketSet {
    pub poisson: Option<Bracket2>,
    pub metric: Bracket4,
    pub hamiltonian: Observable,
    pub entropy: Observable,
}

impl BracketSet {
    pub fn new(sys: &System, form: BracketForm) -> Result<Self> {
        if form == BracketForm::First && sys.class() != StateClass::Simple {
            return Err(Error::Spec(format!(
                "the first-form bracket exists only for simple systems, not `{}`",
                sys.name()
            )));
        }
        let (poisson, metric) = match sys {
            System::Simple(s) => (
                Some(poisson_canonical(StateClass::Simple)),
                match form {
                    BracketForm::Symmetric => metric4_symmetric_form(s),
                    BracketForm::First => metric4_first_form(s, DEFAULT_K_MIN),
                },
            ),
            System::Discrete(s) => (
                Some(poisson_canonical(StateClass::Discrete)),
                discrete_metric(s),
            ),
            System::NoSymp(s) => (None, metric4_no_symplectic(s)),
            System::Lie(s) => (Some(lie_poisson(s)), metric4_ep(s)),
            System::Fluid(s) => (
                Some(lie_poisson_fluid(s)),
                Bracket4::sum("visc+heat", vec![visc_bracket4(s), heat_bracket4(s)]),
            ),
        };
        Ok(BracketSet {
            poisson,
            metric,
            hamiltonian: sys.hamiltonian_observable(),
            entropy: sys.entropy_observable(),
        })
    }

    /// `x_j' = {x_j, H} + (x_j, H; S, H)` for every coordinate `x_j`.
    pub fn rhs(&self, x: &State) -> Result<Tangent> {
        let metric = self.metric.at(x)?;
        let poisson = self.poisson.as_ref().map(|p| p.at(x)).transpose()?;
        let dh = self.hamiltonian.grad(x)?;
        let ds = self.entropy.grad(x)?;
        let mut unit = Coords::zeros(x.layout());
        let mut out = Coords::zeros(x.layout());
        for j in 0..x.len() {
            unit.as_mut_slice()[j] = 1.0;
            let sym = poisson.as_ref().map_or(0.0, |p| p(&unit, &dh));
            out.as_mut_slice()[j] = sym + metric(&[&unit, &dh, &ds, &dh]);
            unit.as_mut_slice()[j] = 0.0;
        }
        Ok(out)
    }
}

/// Bracket-generated right-hand side (symmetric metric form for simple systems).
pub fn rhs_bracket(sys: &System, x: &State) -> Result<Tangent> {
    sys.check_domain(x)?;
    BracketSet::new(sys, BracketForm::Symmetric)?.rhs(x)
}

/// A system paired with one engine, with the brackets prepared once.
#[derive(Debug, Clone)]
pub struct VectorField {
    system: System,
    brackets: Option<BracketSet>,
}

impl VectorField {
    pub fn new(system: &System, engine: Engine) -> Result<Self> {
        let brackets = match engine.kind {
            EngineKind::EulerLagrange => None,
            EngineKind::Bracket => Some(BracketSet::new(system, engine.form)?),
        };
        Ok(VectorField {
            system: system.clone(),
            brackets,
        })
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn eval(&self, x: &State) -> Result<Tangent> {
        match &self.brackets {
            None => rhs_euler_lagrange(&self.system, x),
            Some(b) => {
                self.system.check_domain(x)?;
                b.rhs(x)
            }
        }
    }
}

/// Quantities recorded at every stored state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub h: f64,
    pub s_total: f64,
    pub ds_dt: f64,
    /// One temperature per entropy coordinate (per cell for fields).
    pub temperatures: Vec<f64>,
    /// Dissipated power `qdot Lambda qdot` (simple systems only).
    pub k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub diagnostics: Vec<Diagnostics>,
}

impl Trajectory {
    fn new() -> Self {
        Trajectory {
            times: Vec::new(),
            states: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&State> {
        self.states.last()
    }
}

/// An integration stopped by an error; `partial` holds every accepted state.
#[derive(Debug, Clone)]
pub struct Interrupted {
    pub partial: Trajectory,
    pub error: Error,
}

impl std::fmt::Display for Interrupted {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (after {} states)", self.error, self.partial.len())
    }
}

impl std::error::Error for Interrupted {}

pub fn diagnostics(sys: &System, x: &State, rate: &Tangent) -> Result<Diagnostics> {
    let ds_dt = match sys {
        System::Fluid(f) => f.grid().dx() * rate.entropies().iter().sum::<f64>(),
        _ => rate.entropies().iter().sum(),
    };
    let k = match sys {
        System::Simple(s) => Some(s.dissipated_power(x)?),
        _ => None,
    };
    Ok(Diagnostics {
        h: sys.energy(x)?,
        s_total: sys.total_entropy(x),
        ds_dt,
        temperatures: sys.temperatures(x)?,
        k,
    })
}

/// Fixed-step explicit integration over `round(t_final / dt)` steps with
/// times `k * dt`. Leaving the admissible set aborts with the partial
/// trajectory.
pub fn integrate(
    sys: &System,
    engine: Engine,
    x0: &State,
    dt: f64,
    t_final: f64,
    method: Method,
) -> std::result::Result<Trajectory, Box<Interrupted>> {
    let mut traj = Trajectory::new();
    let fail = |traj: Trajectory, error: Error| {
        Box::new(Interrupted {
            partial: traj,
            error,
        })
    };
    if !(dt > 0.0 && dt.is_finite()) || !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(fail(
            traj,
            Error::Spec(format!(
                "need dt > 0 and t_final >= 0 (dt = {dt}, t_final = {t_final})"
            )),
        ));
    }
    let field = match VectorField::new(sys, engine) {
        Ok(f) => f,
        Err(e) => return Err(fail(traj, e)),
    };
    if let Err(e) = sys.check_domain(x0) {
        return Err(fail(traj, e.at_step(0)));
    }
    let steps = (t_final / dt).round() as usize;
    let mut x = x0.clone();
    for k in 0..=steps {
        let rate = match field
            .eval(&x)
            .and_then(|r| diagnostics(sys, &x, &r).map(|d| (r, d)))
        {
            Ok(v) => v,
            Err(e) => return Err(fail(traj, e.at_step(k))),
        };
        traj.times.push(k as f64 * dt);
        traj.states.push(x.clone());
        traj.diagnostics.push(rate.1);
        if k == steps {
            break;
        }
        match advance(&field, &x, &rate.0, dt, method) {
            Ok(next) => x = next,
            Err(e) => {
                log::debug!("integration stopped at step {}: {e}", k + 1);
                return Err(fail(traj, as_domain_violation(e).at_step(k + 1)));
            }
        }
    }
    Ok(traj)
}

fn as_domain_violation(e: Error) -> Error {
    match e {
        Error::InvalidState(reason) => Error::DomainViolation { step: None, reason },
        other => other,
    }
}

/// One step from `x` given `k1 = f(x)`.
fn advance(field: &VectorField, x: &State, k1: &Tangent, dt: f64, method: Method) -> Result<State> {
    let next = match method {
        Method::Euler => x.step(k1, dt)?,
        Method::Rk4 => {
            let k2 = field.eval(&x.step(k1, 0.5 * dt)?)?;
            let k3 = field.eval(&x.step(&k2, 0.5 * dt)?)?;
            let k4 = field.eval(&x.step(&k3, dt)?)?;
            let mut incr = Coords::zeros(x.layout());
            for (i, v) in incr.as_mut_slice().iter_mut().enumerate() {
                let (a, b, c, d) = (
                    k1.as_slice()[i],
                    k2.as_slice()[i],
                    k3.as_slice()[i],
                    k4.as_slice()[i],
                );
                *v = (a + 2.0 * b + 2.0 * c + d) / 6.0;
            }
            x.step(&incr, dt)?
        }
    };
    field.system().check_domain(&next)?;
    Ok(next)
}
