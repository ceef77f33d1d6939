//! Simple and discrete thermodynamic systems: a Lagrangian in
//! `(q, qdot, S_1..S_N)`, one friction tensor per subsystem and symmetric
//! heat-exchange coefficients between subsystems.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::legendre::{to_hamiltonian, HamiltonianPartials, HamiltonianSide, LagrangianSide};
use crate::observable::Observable;
use crate::rng::Prng;
use crate::state::{Layout, State};

/// Friction tensor `Lambda(q, qdot, S)`.
pub type FrictionFn = dyn Fn(&[f64], &[f64], &[f64]) -> DMatrix<f64> + Send + Sync;
/// Admissible-domain predicate; `Err` carries the reason.
pub type DomainFn = dyn Fn(&State) -> std::result::Result<(), String> + Send + Sync;
/// Draws a random admissible state (used for registration checks and the
/// verification suites).
pub type SamplerFn = dyn Fn(&mut Prng) -> State + Send + Sync;

/// Number of sampled points used by the registration checks.
pub const REGISTRATION_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrictionCheck {
    /// Symmetric and positive semidefinite at sampled states.
    Dissipative,
    /// Symmetric only. Entropy production may then be negative.
    SymmetricOnly,
}

/// Shared implementation of simple and discrete systems.
#[derive(Clone)]
pub struct Mechanics {
    name: String,
    layout: Layout,
    hamiltonian: HamiltonianSide,
    frictions: Vec<Arc<FrictionFn>>,
    kappa: DMatrix<f64>,
    dissipative: bool,
    domain: Option<Arc<DomainFn>>,
    sampler: Arc<SamplerFn>,
}

impl fmt::Debug for Mechanics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mechanics")
            .field("name", &self.name)
            .field("layout", &self.layout)
            .field("kappa", &self.kappa)
            .field("dissipative", &self.dissipative)
            .finish()
    }
}

impl Mechanics {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.lagrangian().dim()
    }

    pub fn subsystems(&self) -> usize {
        self.frictions.len()
    }

    pub fn is_dissipative(&self) -> bool {
        self.dissipative
    }

    pub fn hamiltonian_side(&self) -> &HamiltonianSide {
        &self.hamiltonian
    }

    pub fn lagrangian(&self) -> &LagrangianSide {
        self.hamiltonian.lagrangian()
    }

    /// Heat-exchange coefficients, zero diagonal.
    pub fn kappa(&self) -> &DMatrix<f64> {
        &self.kappa
    }

    pub(crate) fn check_layout(&self, x: &State) -> Result<()> {
        if x.layout() != self.layout {
            return Err(Error::DimensionMismatch(format!(
                "system `{}` expects {:?}, got {:?}",
                self.name,
                self.layout,
                x.layout()
            )));
        }
        Ok(())
    }

    /// `qdot = dH/dp` via the inverse Legendre transform.
    pub fn velocity(&self, x: &State) -> Result<Vec<f64>> {
        self.check_layout(x)?;
        self.hamiltonian
            .inverse_legendre(x.q(), x.p(), x.entropies())
    }

    pub fn energy(&self, x: &State) -> Result<f64> {
        self.check_layout(x)?;
        self.hamiltonian.value(x.q(), x.p(), x.entropies())
    }

    pub fn hamiltonian_partials(&self, x: &State) -> Result<HamiltonianPartials> {
        self.check_layout(x)?;
        self.hamiltonian.partials(x.q(), x.p(), x.entropies())
    }

    /// `T_i = dH/dS_i`, each required to be positive.
    pub fn temperatures(&self, x: &State) -> Result<Vec<f64>> {
        let t = self.hamiltonian_partials(x)?.ds;
        check_temperatures(&t)?;
        Ok(t)
    }

    /// `Lambda_i(q, qdot, S)`.
    pub fn friction_matrix(&self, i: usize, x: &State, velocity: &[f64]) -> DMatrix<f64> {
        (self.frictions[i])(x.q(), velocity, x.entropies())
    }

    /// `F_i = -Lambda_i qdot`.
    pub fn friction_force(&self, i: usize, x: &State) -> Result<Vec<f64>> {
        let v = self.velocity(x)?;
        let lam = self.friction_matrix(i, x, &v);
        Ok((0..v.len())
            .map(|r| -(0..v.len()).map(|c| lam[(r, c)] * v[c]).sum::<f64>())
            .collect())
    }

    /// `H` as an observable with its analytic gradient.
    pub fn hamiltonian_observable(&self) -> Observable {
        let (h1, h2) = (self.hamiltonian.clone(), self.hamiltonian.clone());
        Observable::on_layout("H", self.layout, move |x| {
            h1.value(x.q(), x.p(), x.entropies()).unwrap_or(f64::NAN)
        })
        .with_gradient(move |x| match h2.partials(x.q(), x.p(), x.entropies()) {
            Ok(hp) => hp.dq.into_iter().chain(hp.dp).chain(hp.ds).collect(),
            Err(_) => vec![f64::NAN; x.len()],
        })
    }

    /// Total entropy `S = sum_i S_i`.
    pub fn entropy_observable(&self) -> Observable {
        Observable::total_entropy(self.layout)
    }

    pub fn check_domain(&self, x: &State) -> Result<()> {
        self.check_layout(x)?;
        if let Some(domain) = &self.domain {
            domain(x).map_err(|reason| Error::DomainViolation { step: None, reason })?;
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut Prng) -> State {
        (self.sampler)(rng)
    }

    fn validate(&self, check: FrictionCheck) -> Result<()> {
        let n = self.frictions.len();
        if self.kappa.nrows() != n || self.kappa.ncols() != n {
            return Err(Error::Spec(format!(
                "kappa must be {n}x{n}, got {}x{}",
                self.kappa.nrows(),
                self.kappa.ncols()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (self.kappa[(i, j)], self.kappa[(j, i)]);
                if i != j && a < 0.0 {
                    return Err(Error::Spec(format!("kappa[{i}][{j}] = {a} is negative")));
                }
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
                    return Err(Error::Spec(format!(
                        "kappa is not symmetric: kappa[{i}][{j}] = {a}, kappa[{j}][{i}] = {b}"
                    )));
                }
            }
        }
        let mut rng = Prng::new(0x5EED);
        for _ in 0..REGISTRATION_SAMPLES {
            let x = self.sample(&mut rng);
            self.check_domain(&x)
                .map_err(|e| Error::Spec(format!("sampler produced an inadmissible state: {e}")))?;
            self.lagrangian().check_kinetic_form(x.q(), x.entropies())?;
            let v = self.velocity(&x)?;
            for i in 0..n {
                check_friction_matrix(&self.friction_matrix(i, &x, &v), self.dim(), check)
                    .map_err(|e| Error::Spec(format!("friction tensor {i}: {e}")))?;
            }
        }
        Ok(())
    }
}

pub(crate) fn check_temperatures(t: &[f64]) -> Result<()> {
    match t.iter().position(|&v| v.is_nan() || v <= 0.0) {
        Some(index) => Err(Error::NonpositiveTemperature {
            index,
            value: t[index],
        }),
        None => Ok(()),
    }
}

/// `|L - L^T| <= 1e-12 |L|`, plus positive semidefiniteness when requested.
pub(crate) fn check_friction_matrix(
    lam: &DMatrix<f64>,
    dim: usize,
    check: FrictionCheck,
) -> std::result::Result<(), String> {
    if lam.nrows() != dim || lam.ncols() != dim {
        return Err(format!(
            "expected {dim}x{dim}, got {}x{}",
            lam.nrows(),
            lam.ncols()
        ));
    }
    if lam.iter().any(|v| !v.is_finite()) {
        return Err("non-finite entry".into());
    }
    let norm = lam.norm();
    if (lam - lam.transpose()).norm() > 1e-12 * norm {
        return Err("not symmetric".into());
    }
    if check == FrictionCheck::Dissipative {
        let min = lam.clone().symmetric_eigenvalues().min();
        if min < -1e-12 * norm.max(f64::MIN_POSITIVE) {
            return Err(format!("not positive semidefinite (eigenvalue {min})"));
        }
    }
    Ok(())
}

/// Builder shared by [`SimpleSystem`] and [`DiscreteSystem`].
pub struct MechanicsBuilder {
    name: String,
    lagrangian: LagrangianSide,
    frictions: Vec<Arc<FrictionFn>>,
    kappa: Option<DMatrix<f64>>,
    check: FrictionCheck,
    domain: Option<Arc<DomainFn>>,
    sampler: Option<Arc<SamplerFn>>,
}

impl MechanicsBuilder {
    fn new(name: impl Into<String>, lagrangian: LagrangianSide) -> Self {
        MechanicsBuilder {
            name: name.into(),
            lagrangian,
            frictions: Vec::new(),
            kappa: None,
            check: FrictionCheck::Dissipative,
            domain: None,
            sampler: None,
        }
    }

    pub fn friction(
        mut self,
        lambda: impl Fn(&[f64], &[f64], &[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.frictions.push(Arc::new(lambda));
        self
    }

    pub fn kappa(mut self, kappa: DMatrix<f64>) -> Self {
        self.kappa = Some(kappa);
        self
    }

    pub fn friction_check(mut self, check: FrictionCheck) -> Self {
        self.check = check;
        self
    }

    pub fn domain(
        mut self,
        domain: impl Fn(&State) -> std::result::Result<(), String> + Send + Sync + 'static,
    ) -> Self {
        self.domain = Some(Arc::new(domain));
        self
    }

    pub fn sampler(mut self, sampler: impl Fn(&mut Prng) -> State + Send + Sync + 'static) -> Self {
        self.sampler = Some(Arc::new(sampler));
        self
    }

    fn finish(self, layout: Layout) -> Result<Mechanics> {
        let n = self.frictions.len();
        let sampler = self
            .sampler
            .ok_or_else(|| Error::Spec("a state sampler is required".into()))?;
        let mut kappa = self.kappa.unwrap_or_else(|| DMatrix::zeros(n, n));
        if kappa.nrows() == kappa.ncols() {
            kappa.fill_diagonal(0.0);
        }
        let mech = Mechanics {
            name: self.name,
            layout,
            hamiltonian: to_hamiltonian(self.lagrangian),
            frictions: self.frictions,
            kappa,
            dissipative: self.check == FrictionCheck::Dissipative,
            domain: self.domain,
            sampler,
        };
        mech.validate(self.check)?;
        Ok(mech)
    }
}

/// A simple thermodynamic system: positions `q`, momenta `p`, one entropy `S`.
#[derive(Debug, Clone)]
pub struct SimpleSystem(Mechanics);

/// `N` simple systems sharing mechanical coordinates and exchanging heat.
#[derive(Debug, Clone)]
pub struct DiscreteSystem(Mechanics);

impl Deref for SimpleSystem {
    type Target = Mechanics;
    fn deref(&self) -> &Mechanics {
        &self.0
    }
}

impl Deref for DiscreteSystem {
    type Target = Mechanics;
    fn deref(&self) -> &Mechanics {
        &self.0
    }
}

pub struct SimpleSystemBuilder(MechanicsBuilder);
pub struct DiscreteSystemBuilder(MechanicsBuilder);

impl SimpleSystem {
    pub fn builder(name: impl Into<String>, lagrangian: LagrangianSide) -> SimpleSystemBuilder {
        SimpleSystemBuilder(MechanicsBuilder::new(name, lagrangian))
    }

    /// `Lambda(q, qdot, S)` of the single friction tensor.
    pub fn friction_tensor(&self, x: &State, velocity: &[f64]) -> DMatrix<f64> {
        self.friction_matrix(0, x, velocity)
    }

    pub fn temperature(&self, x: &State) -> Result<f64> {
        Ok(self.temperatures(x)?[0])
    }

    /// Dissipated power `K = -<F_fr, dH/dp> = qdot^T Lambda qdot`.
    pub fn dissipated_power(&self, x: &State) -> Result<f64> {
        let v = self.velocity(x)?;
        let f = self.friction_force(0, x)?;
        Ok(-crate::legendre::dot(&f, &v))
    }
}

impl SimpleSystemBuilder {
    pub fn friction(
        self,
        lambda: impl Fn(&[f64], &[f64], &[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        SimpleSystemBuilder(self.0.friction(lambda))
    }

    pub fn friction_check(self, check: FrictionCheck) -> Self {
        SimpleSystemBuilder(self.0.friction_check(check))
    }

    pub fn domain(
        self,
        domain: impl Fn(&State) -> std::result::Result<(), String> + Send + Sync + 'static,
    ) -> Self {
        SimpleSystemBuilder(self.0.domain(domain))
    }

    pub fn sampler(self, sampler: impl Fn(&mut Prng) -> State + Send + Sync + 'static) -> Self {
        SimpleSystemBuilder(self.0.sampler(sampler))
    }

    pub fn build(self) -> Result<SimpleSystem> {
        let b = self.0;
        let dim = b.lagrangian.dim();
        if b.lagrangian.entropies() != 1 {
            return Err(Error::Spec(
                "a simple system has exactly one entropy".into(),
            ));
        }
        if b.frictions.len() != 1 {
            return Err(Error::Spec(
                "a simple system needs exactly one friction tensor".into(),
            ));
        }
        if dim == 0 {
            return Err(Error::Spec("dimension must be at least 1".into()));
        }
        Ok(SimpleSystem(b.finish(Layout::Simple { dim })?))
    }
}

impl DiscreteSystem {
    pub fn builder(name: impl Into<String>, lagrangian: LagrangianSide) -> DiscreteSystemBuilder {
        DiscreteSystemBuilder(MechanicsBuilder::new(name, lagrangian))
    }
}

impl DiscreteSystemBuilder {
    pub fn friction(
        self,
        lambda: impl Fn(&[f64], &[f64], &[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        DiscreteSystemBuilder(self.0.friction(lambda))
    }

    pub fn kappa(self, kappa: DMatrix<f64>) -> Self {
        DiscreteSystemBuilder(self.0.kappa(kappa))
    }

    pub fn friction_check(self, check: FrictionCheck) -> Self {
        DiscreteSystemBuilder(self.0.friction_check(check))
    }

    pub fn domain(
        self,
        domain: impl Fn(&State) -> std::result::Result<(), String> + Send + Sync + 'static,
    ) -> Self {
        DiscreteSystemBuilder(self.0.domain(domain))
    }

    pub fn sampler(self, sampler: impl Fn(&mut Prng) -> State + Send + Sync + 'static) -> Self {
        DiscreteSystemBuilder(self.0.sampler(sampler))
    }

    pub fn build(self) -> Result<DiscreteSystem> {
        let b = self.0;
        let dim = b.lagrangian.dim();
        let n = b.lagrangian.entropies();
        if n == 0 || dim == 0 {
            return Err(Error::Spec("need d >= 1 and N >= 1".into()));
        }
        if b.frictions.len() != n {
            return Err(Error::Spec(format!(
                "{n} subsystems need {n} friction tensors, got {}",
                b.frictions.len()
            )));
        }
        Ok(DiscreteSystem(
            b.finish(Layout::Discrete { dim, subsystems: n })?,
        ))
    }
}

/// Heat-flux matrix `J_ij = -kappa_ij + delta_ij sum_k kappa_ik`.
pub fn heat_flux_matrix(spec: &DiscreteSystem) -> DMatrix<f64> {
    heat_flux_from_kappa(spec.kappa())
}

pub(crate) fn heat_flux_from_kappa(kappa: &DMatrix<f64>) -> DMatrix<f64> {
    let n = kappa.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { kappa.row(i).sum() } else { 0.0 };
        diag - kappa[(i, j)]
    })
}
