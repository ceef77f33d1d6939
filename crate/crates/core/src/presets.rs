//! Default instances of the built-in systems, addressed by name.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fluid1d::{FluidEos, FluidParams, FluidSystem, Grid1D};
use crate::rng::Prng;
use crate::systems::{
    builtin_chemical, builtin_piston, builtin_piston_indefinite, builtin_rigid_body_thermo,
    builtin_two_pistons, ideal_gas_energy, EntropyEnergy, Geometry, IdealGasParams, System,
};

pub const NAMES: [&str; 5] = ["piston", "two_pistons", "chemical", "rigid_body", "fluid1d"];

/// Gas with `T = U / (n c_v) = 2` at `x = 1, S = 0`.
pub fn piston_gas() -> IdealGasParams {
    IdealGasParams {
        n_moles: 1.0,
        c_v: 1.0,
        gas_const: 1.0,
        area: 1.0,
        v0: 1.0,
        s0: 0.0,
        u0: 2.0,
    }
}

/// Piston with `m = 1` and constant friction `lambda`.
pub fn piston(lambda: f64) -> Result<System> {
    Ok(builtin_piston(1.0, move |_, _| lambda, ideal_gas_energy(piston_gas())?)?.into())
}

/// Piston whose friction is only checked for symmetry, so `lambda < 0` is
/// accepted.
pub fn piston_indefinite(lambda: f64) -> Result<System> {
    Ok(builtin_piston_indefinite(1.0, move |_, _| lambda, ideal_gas_energy(piston_gas())?)?.into())
}

pub fn two_pistons(lambda1: f64, lambda2: f64, kappa: f64) -> Result<System> {
    let gas = ideal_gas_energy(IdealGasParams {
        c_v: 1.5,
        u0: 1.5,
        ..piston_gas()
    })?;
    Ok(builtin_two_pistons(
        1.0,
        move |_, _| lambda1,
        move |_, _| lambda2,
        kappa,
        gas,
        gas,
        Geometry::default(),
    )?
    .into())
}

/// Random symmetric matrix with eigenvalues uniform in `[lo, hi]`.
pub fn random_spd(rng: &mut Prng, r: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(r, r, |_, _| rng.uniform(-1.0, 1.0));
    let q = a.qr().q();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(r, |_, _| rng.uniform(lo, hi)));
    let m = &q * d * q.transpose();
    (&m + m.transpose()) * 0.5
}

/// Inputs of [`chemical`]: `(Q, psi_star, lambda)`.
pub fn chemical_parts(r: usize, seed: u64) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let mut rng = Prng::new(seed);
    let q = random_spd(&mut rng, r, 0.5, 2.0);
    let lambda = random_spd(&mut rng, r, 0.5, 2.0);
    let psi_star = rng.uniform_vec(r, -1.0, 1.0);
    (q, psi_star, lambda)
}

/// `r` reactions with random SPD `Q` and `lambda` (eigenvalues in
/// `[0.5, 2]`), `f(S) = S`.
pub fn chemical(r: usize, seed: u64) -> Result<System> {
    let (q, psi_star, lambda) = chemical_parts(r, seed);
    Ok(builtin_chemical(q, psi_star, lambda, EntropyEnergy::Linear { slope: 1.0 })?.into())
}

/// so(3) body with inertia `diag(1, 2, 3)`, friction `lambda * I` and
/// `e(s) = s`.
pub fn rigid_body(lambda: f64) -> Result<System> {
    let inertia = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0]));
    let friction = DMatrix::identity(3, 3) * lambda;
    Ok(builtin_rigid_body_thermo(inertia, friction, EntropyEnergy::Linear { slope: 1.0 })?.into())
}

pub fn fluid(n: usize, mu: f64, kappa: f64) -> Result<System> {
    Ok(FluidSystem::new(
        Grid1D::new(n, 1.0)?,
        FluidParams {
            mu,
            kappa,
            eos: FluidEos::default(),
        },
    )?
    .into())
}

/// The default instance of a named system.
pub fn preset(name: &str) -> Result<System> {
    match name {
        "piston" => piston(1.0),
        "two_pistons" => two_pistons(0.5, 0.3, 3.0),
        "chemical" => chemical(3, 7),
        "rigid_body" => rigid_body(1.0),
        "fluid1d" => fluid(32, 0.01, 0.01),
        other => Err(Error::Spec(format!(
            "unknown system `{other}` (expected one of {})",
            NAMES.join(", ")
        ))),
    }
}
