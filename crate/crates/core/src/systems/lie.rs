//! Finite-dimensional Euler–Poincaré systems described by structure constants.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::legendre::{to_hamiltonian, HamiltonianSide, LagrangianSide};
use crate::observable::Observable;
use crate::rng::Prng;
use crate::state::{Layout, State};

use super::mechanical::{check_temperatures, SamplerFn};

/// Partial derivatives of `h(mu, a, s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiePartials {
    /// `dh/dmu = xi`
    pub dmu: Vec<f64>,
    pub da: Vec<f64>,
    /// `dh/ds = T`
    pub ds: f64,
}

/// A Lie algebra with structure constants `c[k][i][j]`, so that
/// `[e_i, e_j] = c^k_ij e_k`, acting on `V` through matrices `R_i` and on the
/// entropy through the character `chi`.
#[derive(Clone)]
pub struct LieSystem {
    name: String,
    n: usize,
    k: usize,
    structure: Vec<f64>,
    rep: Vec<DMatrix<f64>>,
    chi: Vec<f64>,
    lambda: DMatrix<f64>,
    /// The reduced Lagrangian `l(xi, a, s)` stored with `a` in the position
    /// slot and `xi` in the velocity slot.
    hamiltonian: HamiltonianSide,
    sampler: Arc<SamplerFn>,
}

impl fmt::Debug for LieSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LieSystem")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("k", &self.k)
            .finish()
    }
}

pub struct LieSystemBuilder {
    name: String,
    n: usize,
    structure: Vec<f64>,
    rep: Vec<DMatrix<f64>>,
    chi: Option<Vec<f64>>,
    lambda: Option<DMatrix<f64>>,
    lagrangian: LagrangianSide,
    sampler: Option<Arc<SamplerFn>>,
}

impl LieSystem {
    /// `structure[k][i][j]` flattened as `k * n * n + i * n + j`.
    pub fn builder(
        name: impl Into<String>,
        n: usize,
        structure: Vec<f64>,
        lagrangian: LagrangianSide,
    ) -> LieSystemBuilder {
        LieSystemBuilder {
            name: name.into(),
            n,
            structure,
            rep: Vec::new(),
            chi: None,
            lambda: None,
            lagrangian,
            sampler: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn algebra_dim(&self) -> usize {
        self.n
    }

    pub fn advected_dim(&self) -> usize {
        self.k
    }

    pub fn layout(&self) -> Layout {
        Layout::Lie {
            algebra: self.n,
            advected: self.k,
        }
    }

    #[inline]
    pub fn c(&self, k: usize, i: usize, j: usize) -> f64 {
        self.structure[(k * self.n + i) * self.n + j]
    }

    /// `[x, y]_k = c^k_ij x_i y_j`.
    pub fn commutator(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|k| {
                let mut acc = 0.0;
                for (i, xi) in x.iter().enumerate() {
                    for (j, yj) in y.iter().enumerate() {
                        acc += self.c(k, i, j) * xi * yj;
                    }
                }
                acc
            })
            .collect()
    }

    /// `xi a = sum_i xi_i R_i a`.
    pub fn act(&self, xi: &[f64], a: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.k];
        for (i, r) in self.rep.iter().enumerate() {
            for row in 0..self.k {
                for col in 0..self.k {
                    out[row] += xi[i] * r[(row, col)] * a[col];
                }
            }
        }
        out
    }

    pub fn rep(&self) -> &[DMatrix<f64>] {
        &self.rep
    }

    /// The action on entropy is `xi s = chi(xi) s`.
    pub fn chi(&self) -> &[f64] {
        &self.chi
    }

    pub fn lambda(&self) -> &DMatrix<f64> {
        &self.lambda
    }

    pub fn lagrangian(&self) -> &LagrangianSide {
        self.hamiltonian.lagrangian()
    }

    pub(crate) fn check_layout(&self, x: &State) -> Result<()> {
        if x.layout() != self.layout() {
            return Err(Error::DimensionMismatch(format!(
                "system `{}` expects {:?}, got {:?}",
                self.name,
                self.layout(),
                x.layout()
            )));
        }
        Ok(())
    }

    /// `xi` with `dl/dxi = mu`.
    pub fn velocity(&self, x: &State) -> Result<Vec<f64>> {
        self.check_layout(x)?;
        self.hamiltonian
            .inverse_legendre(x.advected(), x.mu(), x.entropies())
    }

    pub fn partials(&self, x: &State) -> Result<LiePartials> {
        self.check_layout(x)?;
        let hp = self
            .hamiltonian
            .partials(x.advected(), x.mu(), x.entropies())?;
        Ok(LiePartials {
            dmu: hp.dp,
            da: hp.dq,
            ds: hp.ds[0],
        })
    }

    pub fn energy(&self, x: &State) -> Result<f64> {
        self.check_layout(x)?;
        self.hamiltonian.value(x.advected(), x.mu(), x.entropies())
    }

    pub fn temperature(&self, x: &State) -> Result<f64> {
        let t = self.partials(x)?.ds;
        check_temperatures(&[t])?;
        Ok(t)
    }

    pub fn hamiltonian_observable(&self) -> Observable {
        let (h1, h2) = (self.clone(), self.clone());
        Observable::on_layout("h", self.layout(), move |x| {
            h1.energy(x).unwrap_or(f64::NAN)
        })
        .with_gradient(move |x| match h2.partials(x) {
            Ok(lp) => lp.dmu.into_iter().chain(lp.da).chain([lp.ds]).collect(),
            Err(_) => vec![f64::NAN; x.len()],
        })
    }

    pub fn entropy_observable(&self) -> Observable {
        Observable::total_entropy(self.layout())
    }

    pub fn sample(&self, rng: &mut Prng) -> State {
        (self.sampler)(rng)
    }
}

impl LieSystemBuilder {
    /// Representation matrices `R_i` (one `k x k` matrix per basis element).
    pub fn representation(mut self, rep: Vec<DMatrix<f64>>) -> Self {
        self.rep = rep;
        self
    }

    pub fn entropy_action(mut self, chi: Vec<f64>) -> Self {
        self.chi = Some(chi);
        self
    }

    pub fn friction(mut self, lambda: DMatrix<f64>) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn sampler(mut self, sampler: impl Fn(&mut Prng) -> State + Send + Sync + 'static) -> Self {
        self.sampler = Some(Arc::new(sampler));
        self
    }

    pub fn build(self) -> Result<LieSystem> {
        let n = self.n;
        if n == 0 || self.structure.len() != n * n * n {
            return Err(Error::DimensionMismatch(format!(
                "structure constants for an algebra of dimension {n} need {} entries, got {}",
                n * n * n,
                self.structure.len()
            )));
        }
        if self.lagrangian.dim() != n || self.lagrangian.entropies() != 1 {
            return Err(Error::DimensionMismatch(
                "reduced Lagrangian must take xi of the algebra dimension and one entropy".into(),
            ));
        }
        let k = self.rep.first().map_or(0, |r| r.nrows());
        if !self.rep.is_empty()
            && (self.rep.len() != n || self.rep.iter().any(|r| r.nrows() != k || r.ncols() != k))
        {
            return Err(Error::DimensionMismatch(format!(
                "need {n} square representation matrices of equal size"
            )));
        }
        let chi = self.chi.unwrap_or_else(|| vec![0.0; n]);
        if chi.len() != n {
            return Err(Error::DimensionMismatch(
                "entropy action needs n entries".into(),
            ));
        }
        let lambda = self.lambda.unwrap_or_else(|| DMatrix::zeros(n, n));
        if lambda.nrows() != n || lambda.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "friction must be {n}x{n}"
            )));
        }
        if (&lambda - lambda.transpose()).norm() > 1e-12 * lambda.norm() {
            return Err(Error::Spec(
                "friction form on the algebra is not symmetric".into(),
            ));
        }
        let sampler = self
            .sampler
            .ok_or_else(|| Error::Spec("a state sampler is required".into()))?;
        let sys = LieSystem {
            name: self.name,
            n,
            k,
            structure: self.structure,
            rep: self.rep,
            chi,
            lambda,
            hamiltonian: to_hamiltonian(self.lagrangian),
            sampler,
        };
        sys.check_algebra()?;
        let mut rng = Prng::new(0x5EED);
        for _ in 0..super::mechanical::REGISTRATION_SAMPLES {
            let x = sys.sample(&mut rng);
            sys.check_layout(&x)?;
            sys.lagrangian()
                .check_kinetic_form(x.advected(), x.entropies())?;
            sys.temperature(&x)?;
        }
        Ok(sys)
    }
}

impl LieSystem {
    fn check_algebra(&self) -> Result<()> {
        let n = self.n;
        let scale = self.structure.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if self.c(k, i, j) != -self.c(k, j, i) {
                        return Err(Error::Spec(format!(
                            "structure constants not antisymmetric at c[{k}][{i}][{j}]"
                        )));
                    }
                }
            }
        }
        // c^m_ij c^l_mk + c^m_jk c^l_mi + c^m_ki c^l_mj = 0
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut acc = 0.0;
                        for m in 0..n {
                            acc += self.c(m, i, j) * self.c(l, m, k)
                                + self.c(m, j, k) * self.c(l, m, i)
                                + self.c(m, k, i) * self.c(l, m, j);
                        }
                        if acc.abs() > 1e-12 * scale * scale {
                            return Err(Error::Spec(format!(
                                "structure constants violate the Jacobi identity by {acc:e}"
                            )));
                        }
                    }
                }
            }
        }
        // R_i R_j - R_j R_i = c^k_ij R_k
        for i in 0..self.rep.len() {
            for j in 0..self.rep.len() {
                let lhs = &self.rep[i] * &self.rep[j] - &self.rep[j] * &self.rep[i];
                let mut rhs = DMatrix::zeros(self.k, self.k);
                for (k, r) in self.rep.iter().enumerate() {
                    rhs += r * self.c(k, i, j);
                }
                if (&lhs - &rhs).norm() > 1e-12 * (1.0 + lhs.norm()) {
                    return Err(Error::Spec(format!(
                        "representation is not a homomorphism on (e_{i}, e_{j})"
                    )));
                }
            }
        }
        // chi([x, y]) = 0
        for i in 0..n {
            for j in 0..n {
                let v: f64 = (0..n).map(|k| self.c(k, i, j) * self.chi[k]).sum();
                if v.abs() > 1e-12 * scale {
                    return Err(Error::Spec("entropy action is not a character".into()));
                }
            }
        }
        Ok(())
    }
}

/// Levi-Civita structure constants of so(3).
pub fn so3_structure() -> Vec<f64> {
    let mut c = vec![0.0; 27];
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        c[(k * 3 + i) * 3 + j] = 1.0;
        c[(k * 3 + j) * 3 + i] = -1.0;
    }
    c
}
