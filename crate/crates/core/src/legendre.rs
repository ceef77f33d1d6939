//! Momentum map, Hamiltonian construction and inversion of the Legendre
//! transform `(q, qdot, S) -> (q, p, S)`.
//!
//! Positions, velocities and entropies are passed as slices; a simple system
//! has one entropy, a discrete system `N`. Lie systems reuse the same
//! machinery with the advected parameters in the `q` slot and the algebra
//! velocity `xi` in the `qdot` slot.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::observable::fd_step;

/// First partial derivatives of a Lagrangian at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianPartials {
    pub dq: Vec<f64>,
    pub dqdot: Vec<f64>,
    pub ds: Vec<f64>,
}

pub type LagrangianFn = dyn Fn(&[f64], &[f64], &[f64]) -> f64 + Send + Sync;
pub type LagrangianPartialsFn = dyn Fn(&[f64], &[f64], &[f64]) -> LagrangianPartials + Send + Sync;
/// Mass matrix `M(q, S)` of a quadratic kinetic term `qdot^T M qdot / 2`.
pub type KineticFormFn = dyn Fn(&[f64], &[f64]) -> DMatrix<f64> + Send + Sync;

#[derive(Clone)]
pub struct LagrangianSide {
    dim: usize,
    entropies: usize,
    value: Arc<LagrangianFn>,
    partials: Arc<LagrangianPartialsFn>,
    kinetic_form: Option<Arc<KineticFormFn>>,
}

impl fmt::Debug for LagrangianSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LagrangianSide")
            .field("dim", &self.dim)
            .field("entropies", &self.entropies)
            .field("kinetic_form", &self.kinetic_form.is_some())
            .finish()
    }
}

impl LagrangianSide {
    pub fn new(
        dim: usize,
        entropies: usize,
        value: impl Fn(&[f64], &[f64], &[f64]) -> f64 + Send + Sync + 'static,
        partials: impl Fn(&[f64], &[f64], &[f64]) -> LagrangianPartials + Send + Sync + 'static,
    ) -> Self {
        LagrangianSide {
            dim,
            entropies,
            value: Arc::new(value),
            partials: Arc::new(partials),
            kinetic_form: None,
        }
    }

    /// Declare `L = qdot^T M(q,S) qdot / 2 - U(q,S)`; the inverse transform
    /// then becomes the linear solve `M qdot = p`.
    pub fn with_kinetic_form(
        mut self,
        mass: impl Fn(&[f64], &[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.kinetic_form = Some(Arc::new(mass));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entropies(&self) -> usize {
        self.entropies
    }

    pub fn has_kinetic_form(&self) -> bool {
        self.kinetic_form.is_some()
    }

    pub fn value(&self, q: &[f64], qdot: &[f64], s: &[f64]) -> f64 {
        (self.value)(q, qdot, s)
    }

    pub fn partials(&self, q: &[f64], qdot: &[f64], s: &[f64]) -> LagrangianPartials {
        (self.partials)(q, qdot, s)
    }

    /// Mass matrix at `(q, S)`, if the kinetic term is declared quadratic.
    pub fn mass_matrix(&self, q: &[f64], s: &[f64]) -> Option<DMatrix<f64>> {
        self.kinetic_form.as_ref().map(|m| m(q, s))
    }

    /// Checks that the declared mass matrix is symmetric positive definite.
    pub fn check_kinetic_form(&self, q: &[f64], s: &[f64]) -> Result<()> {
        let Some(m) = self.mass_matrix(q, s) else {
            return Ok(());
        };
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::Spec(format!(
                "mass matrix is {}x{}, expected {}x{}",
                m.nrows(),
                m.ncols(),
                self.dim,
                self.dim
            )));
        }
        if (&m - m.transpose()).norm() > 1e-12 * m.norm() {
            return Err(Error::Spec("mass matrix is not symmetric".into()));
        }
        if m.cholesky().is_none() {
            return Err(Error::Spec("mass matrix is not positive definite".into()));
        }
        Ok(())
    }
}

/// `p = dL/dqdot (q, qdot, S)`.
pub fn momentum(ls: &LagrangianSide, q: &[f64], qdot: &[f64], s: &[f64]) -> Vec<f64> {
    ls.partials(q, qdot, s).dqdot
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Convergence when `|r| <= tolerance * (1 + |p|)`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tolerance: 1e-12,
            max_iterations: 50,
        }
    }
}

/// Partial derivatives of `H(q, p, S)` together with the velocity `qdot(q, p, S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianPartials {
    pub dq: Vec<f64>,
    /// `dH/dp`, equal to the velocity.
    pub dp: Vec<f64>,
    /// `dH/dS_i`, the temperatures.
    pub ds: Vec<f64>,
}

/// `H(q, p, S) = <p, qdot> - L(q, qdot, S)` with `qdot` from the inverse
/// Legendre transform.
#[derive(Debug, Clone)]
pub struct HamiltonianSide {
    lagrangian: LagrangianSide,
    newton: NewtonOptions,
}

pub fn to_hamiltonian(ls: LagrangianSide) -> HamiltonianSide {
    HamiltonianSide {
        lagrangian: ls,
        newton: NewtonOptions::default(),
    }
}

impl HamiltonianSide {
    pub fn with_newton_options(mut self, options: NewtonOptions) -> Self {
        self.newton = options;
        self
    }

    pub fn lagrangian(&self) -> &LagrangianSide {
        &self.lagrangian
    }

    /// Inverse Legendre transform: the velocity with `dL/dqdot = p`.
    pub fn inverse_legendre(&self, q: &[f64], p: &[f64], s: &[f64]) -> Result<Vec<f64>> {
        if let Some(m) = self.lagrangian.mass_matrix(q, s) {
            let chol = m.cholesky().ok_or_else(|| {
                Error::Spec("mass matrix is not positive definite at this state".into())
            })?;
            let v = chol.solve(&DVector::from_column_slice(p));
            return Ok(v.as_slice().to_vec());
        }
        self.newton_inverse(q, p, s)
    }

    fn newton_inverse(&self, q: &[f64], p: &[f64], s: &[f64]) -> Result<Vec<f64>> {
        let d = self.lagrangian.dim;
        let ls = &self.lagrangian;
        let p_norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        let threshold = self.newton.tolerance * (1.0 + p_norm);
        let residual = |v: &[f64]| -> DVector<f64> {
            let dv = ls.partials(q, v, s).dqdot;
            DVector::from_iterator(d, dv.iter().zip(p).map(|(a, b)| a - b))
        };

        let mut v = vec![0.0; d];
        let mut r = residual(&v);
        for iteration in 0..self.newton.max_iterations {
            if r.norm() <= threshold {
                return Ok(v);
            }
            let mut jac = DMatrix::zeros(d, d);
            for j in 0..d {
                let h = fd_step(v[j]);
                let mut vp = v.clone();
                let mut vm = v.clone();
                vp[j] += h;
                vm[j] -= h;
                let col = (ls.partials(q, &vp, s).dqdot, ls.partials(q, &vm, s).dqdot);
                let width = vp[j] - vm[j];
                for i in 0..d {
                    jac[(i, j)] = (col.0[i] - col.1[i]) / width;
                }
            }
            let step = jac
                .lu()
                .solve(&(-&r))
                .filter(|x| x.iter().all(|c| c.is_finite()));
            let Some(step) = step else {
                return Err(Error::LegendreInversionFailure {
                    residual: r.norm(),
                    iterations: iteration,
                });
            };
            for (vi, di) in v.iter_mut().zip(step.iter()) {
                *vi += di;
            }
            r = residual(&v);
        }
        if r.norm() <= threshold {
            return Ok(v);
        }
        Err(Error::LegendreInversionFailure {
            residual: r.norm(),
            iterations: self.newton.max_iterations,
        })
    }

    pub fn value(&self, q: &[f64], p: &[f64], s: &[f64]) -> Result<f64> {
        let v = self.inverse_legendre(q, p, s)?;
        Ok(dot(p, &v) - self.lagrangian.value(q, &v, s))
    }

    /// `dH/dq = -dL/dq`, `dH/dp = qdot`, `dH/dS = -dL/dS`, all evaluated at
    /// `qdot = qdot(q, p, S)`.
    pub fn partials(&self, q: &[f64], p: &[f64], s: &[f64]) -> Result<HamiltonianPartials> {
        let v = self.inverse_legendre(q, p, s)?;
        let lp = self.lagrangian.partials(q, &v, s);
        Ok(HamiltonianPartials {
            dq: lp.dq.iter().map(|x| -x).collect(),
            dp: v,
            ds: lp.ds.iter().map(|x| -x).collect(),
        })
    }

    /// `T_i = dH/dS_i`.
    pub fn temperature(&self, q: &[f64], p: &[f64], s: &[f64]) -> Result<Vec<f64>> {
        Ok(self.partials(q, p, s)?.ds)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
