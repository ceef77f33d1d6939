//! The built-in catalog.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::legendre::{LagrangianPartials, LagrangianSide};
use crate::state::State;

use super::energy::{EntropyEnergy, IdealGas, InternalEnergy};
use super::lie::{so3_structure, LieSystem};
use super::mechanical::{DiscreteSystem, FrictionCheck, SimpleSystem};
use super::nosymp::NoSympSystem;

/// Piston with mass `m`, friction `lambda(x, S) >= 0` and gas energy `eos`.
pub fn builtin_piston<E>(
    m: f64,
    lambda: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    eos: E,
) -> Result<SimpleSystem>
where
    E: InternalEnergy + Clone + 'static,
{
    piston_with_check(m, lambda, eos, FrictionCheck::Dissipative)
}

/// As [`builtin_piston`], but only checks that the friction tensor is
/// symmetric. Used to plant entropy-destroying friction in the verification
/// harness.
pub fn builtin_piston_indefinite<E>(
    m: f64,
    lambda: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    eos: E,
) -> Result<SimpleSystem>
where
    E: InternalEnergy + Clone + 'static,
{
    piston_with_check(m, lambda, eos, FrictionCheck::SymmetricOnly)
}

fn piston_with_check<E>(
    m: f64,
    lambda: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    eos: E,
    check: FrictionCheck,
) -> Result<SimpleSystem>
where
    E: InternalEnergy + Clone + 'static,
{
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::Spec(format!(
            "piston mass must be positive, got {m}"
        )));
    }
    let (e1, e2, e3) = (eos.clone(), eos.clone(), eos.clone());
    let lagrangian = LagrangianSide::new(
        1,
        1,
        move |q, v, s| 0.5 * m * v[0] * v[0] - e1.energy(q[0], s[0]),
        move |q, v, s| LagrangianPartials {
            dq: vec![-e2.d_position(q[0], s[0])],
            dqdot: vec![m * v[0]],
            ds: vec![-e2.d_entropy(q[0], s[0])],
        },
    )
    .with_kinetic_form(move |_, _| DMatrix::from_element(1, 1, m));
    let (x0, s0, scale) = (
        eos.reference_position(),
        eos.reference_entropy(),
        eos.entropy_scale(),
    );
    SimpleSystem::builder("piston", lagrangian)
        .friction(move |q, _, s| DMatrix::from_element(1, 1, lambda(q[0], s[0])))
        .friction_check(check)
        .domain(move |x| {
            if e3.admissible(x.q()[0]) {
                Ok(())
            } else {
                Err(format!(
                    "piston position {} outside the gas domain",
                    x.q()[0]
                ))
            }
        })
        .sampler(move |rng| {
            let x = x0 * rng.uniform(0.5, 2.0);
            let s = s0 + scale * rng.uniform(-0.5, 0.5);
            let p = m * rng.uniform(-3.0, 3.0);
            State::simple(&[x], &[p], s).expect("finite sample")
        })
        .build()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub area1: f64,
    pub area2: f64,
    /// Total length; the gas volumes are `A1 x` and `A2 (length - x)`.
    pub length: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry {
            area1: 1.0,
            area2: 1.0,
            length: 2.0,
        }
    }
}

/// Two gases separated by a piston of mass `big_m` and joined by a
/// heat-conducting rod of conductance `kappa`. The gas models are evaluated
/// at the volumes given by `geometry`; their own `area` is not used.
#[allow(clippy::too_many_arguments)]
pub fn builtin_two_pistons(
    big_m: f64,
    lambda1: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    lambda2: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    kappa: f64,
    gas1: IdealGas,
    gas2: IdealGas,
    geometry: Geometry,
) -> Result<DiscreteSystem> {
    if !(big_m > 0.0 && big_m.is_finite()) {
        return Err(Error::Spec(format!(
            "piston mass must be positive, got {big_m}"
        )));
    }
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::Spec(format!(
            "kappa must be nonnegative, got {kappa}"
        )));
    }
    let Geometry {
        area1: a1,
        area2: a2,
        length,
    } = geometry;
    if !(a1 > 0.0 && a2 > 0.0 && length > 0.0) {
        return Err(Error::Spec(format!("invalid geometry {geometry:?}")));
    }
    let u = move |x: f64, s: &[f64]| {
        (
            gas1.energy_at_volume(a1 * x, s[0]),
            gas2.energy_at_volume(a2 * (length - x), s[1]),
        )
    };
    let lagrangian = LagrangianSide::new(
        1,
        2,
        move |q, v, s| {
            let (u1, u2) = u(q[0], s);
            0.5 * big_m * v[0] * v[0] - u1 - u2
        },
        move |q, v, s| {
            let (v1, v2) = (a1 * q[0], a2 * (length - q[0]));
            let du = a1 * gas1.d_volume(v1, s[0]) - a2 * gas2.d_volume(v2, s[1]);
            LagrangianPartials {
                dq: vec![-du],
                dqdot: vec![big_m * v[0]],
                ds: vec![
                    -gas1.temperature_at_volume(v1, s[0]),
                    -gas2.temperature_at_volume(v2, s[1]),
                ],
            }
        },
    )
    .with_kinetic_form(move |_, _| DMatrix::from_element(1, 1, big_m));
    let (g1, g2) = (*gas1.params(), *gas2.params());
    DiscreteSystem::builder("two_pistons", lagrangian)
        .friction(move |q, _, s| DMatrix::from_element(1, 1, lambda1(q[0], s[0])))
        .friction(move |q, _, s| DMatrix::from_element(1, 1, lambda2(q[0], s[1])))
        .kappa(DMatrix::from_row_slice(2, 2, &[0.0, kappa, kappa, 0.0]))
        .domain(move |x| {
            let q = x.q()[0];
            if q > 0.0 && q < length {
                Ok(())
            } else {
                Err(format!("piston position {q} outside (0, {length})"))
            }
        })
        .sampler(move |rng| {
            let x = length * rng.uniform(0.25, 0.75);
            let s1 = g1.s0 + g1.n_moles * g1.c_v * rng.uniform(-0.5, 0.5);
            let s2 = g2.s0 + g2.n_moles * g2.c_v * rng.uniform(-0.5, 0.5);
            let p = big_m * rng.uniform(-1.0, 1.0);
            State::discrete(&[x], &[p], &[s1, s2]).expect("finite sample")
        })
        .build()
}

fn check_spd(name: &str, m: &DMatrix<f64>, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::Spec(format!("{name} must be {dim}x{dim}")));
    }
    if (m - m.transpose()).norm() > 1e-12 * m.norm() || m.clone().cholesky().is_none() {
        return Err(Error::Spec(format!(
            "{name} must be symmetric positive definite"
        )));
    }
    Ok(())
}

/// Chemical network with `U = (psi - psi*)^T Q (psi - psi*) / 2 + f(S)` and
/// reaction friction `lambda`.
pub fn builtin_chemical(
    q: DMatrix<f64>,
    psi_star: Vec<f64>,
    lambda: DMatrix<f64>,
    f: EntropyEnergy,
) -> Result<NoSympSystem> {
    let r = psi_star.len();
    if r == 0 {
        return Err(Error::Spec("need at least one reaction coordinate".into()));
    }
    check_spd("Q", &q, r)?;
    check_spd("lambda", &lambda, r)?;
    f.validate()?;
    let centre = psi_star.clone();
    NoSympSystem::new(
        "chemical",
        lambda,
        move |psi, s| {
            let d: Vec<f64> = psi.iter().zip(&psi_star).map(|(a, b)| a - b).collect();
            let qd: Vec<f64> = (0..r)
                .map(|i| (0..r).map(|j| q[(i, j)] * d[j]).sum())
                .collect();
            let quad: f64 = d.iter().zip(&qd).map(|(a, b)| a * b).sum();
            (0.5 * quad + f.value(s), qd, f.derivative(s))
        },
        move |rng| {
            let psi: Vec<f64> = centre.iter().map(|c| c + rng.uniform(-2.0, 2.0)).collect();
            State::no_symp(&psi, rng.uniform(-1.0, 1.0)).expect("finite sample")
        },
    )
}

/// so(3) rigid body with `l = xi^T I xi / 2 - e(s)`, friction form `lambda`
/// on the algebra and no advected parameter.
pub fn builtin_rigid_body_thermo(
    inertia: DMatrix<f64>,
    lambda: DMatrix<f64>,
    eos: EntropyEnergy,
) -> Result<LieSystem> {
    check_spd("inertia", &inertia, 3)?;
    eos.validate()?;
    let (i1, i2) = (inertia.clone(), inertia.clone());
    let lagrangian = LagrangianSide::new(
        3,
        1,
        move |_, v, s| {
            let iv = &i1 * nalgebra::DVector::from_column_slice(v);
            0.5 * (0..3).map(|k| v[k] * iv[k]).sum::<f64>() - eos.value(s[0])
        },
        move |_, v, s| LagrangianPartials {
            dq: Vec::new(),
            dqdot: (&i2 * nalgebra::DVector::from_column_slice(v))
                .as_slice()
                .to_vec(),
            ds: vec![-eos.derivative(s[0])],
        },
    )
    .with_kinetic_form(move |_, _| inertia.clone());
    LieSystem::builder("rigid_body", 3, so3_structure(), lagrangian)
        .friction(lambda)
        .sampler(|rng| {
            let mu = rng.uniform_vec(3, -2.0, 2.0);
            State::lie(&mu, &[], rng.uniform(-1.0, 1.0)).expect("finite sample")
        })
        .build()
}
