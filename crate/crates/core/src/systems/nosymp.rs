//! Systems without a symplectic part: the Lagrangian is `L(q, S)` and the
//! whole motion is dissipative.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::rng::Prng;
use crate::state::{Layout, State};

use super::mechanical::{check_temperatures, SamplerFn};

/// Largest accepted condition number of the friction matrix.
pub const MAX_CONDITION: f64 = 1e12;

/// `(U, dU/dq, dU/dS)` at `(q, S)`.
pub type PotentialFn = dyn Fn(&[f64], f64) -> (f64, Vec<f64>, f64) + Send + Sync;

/// `H = U(q, S) = -L(q, S)` with a constant friction matrix `Lambda`.
#[derive(Clone)]
pub struct NoSympSystem {
    name: String,
    dim: usize,
    potential: Arc<PotentialFn>,
    lambda: DMatrix<f64>,
    gamma: DMatrix<f64>,
    sampler: Arc<SamplerFn>,
}

impl fmt::Debug for NoSympSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NoSympSystem")
            .field("name", &self.name)
            .field("lambda", &self.lambda)
            .finish()
    }
}

impl NoSympSystem {
    pub fn new(
        name: impl Into<String>,
        lambda: DMatrix<f64>,
        potential: impl Fn(&[f64], f64) -> (f64, Vec<f64>, f64) + Send + Sync + 'static,
        sampler: impl Fn(&mut Prng) -> State + Send + Sync + 'static,
    ) -> Result<Self> {
        let dim = lambda.nrows();
        if dim == 0 || lambda.ncols() != dim {
            return Err(Error::Spec(
                "friction matrix must be square and nonempty".into(),
            ));
        }
        if (&lambda - lambda.transpose()).norm() > 1e-12 * lambda.norm() {
            return Err(Error::Spec("friction matrix is not symmetric".into()));
        }
        let gamma = invert_friction(&lambda)?;
        let sys = NoSympSystem {
            name: name.into(),
            dim,
            potential: Arc::new(potential),
            lambda,
            gamma,
            sampler: Arc::new(sampler),
        };
        let mut rng = Prng::new(0x5EED);
        for _ in 0..super::mechanical::REGISTRATION_SAMPLES {
            let x = sys.sample(&mut rng);
            sys.check_layout(&x)?;
            sys.temperature(&x)?;
        }
        Ok(sys)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layout(&self) -> Layout {
        Layout::NoSymp { dim: self.dim }
    }

    pub fn lambda(&self) -> &DMatrix<f64> {
        &self.lambda
    }

    /// `Gamma = Lambda^-1`.
    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
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

    /// `(H, dH/dq, dH/dS)`.
    pub fn potential(&self, x: &State) -> Result<(f64, Vec<f64>, f64)> {
        self.check_layout(x)?;
        Ok((self.potential)(x.q(), x.entropy()))
    }

    pub fn energy(&self, x: &State) -> Result<f64> {
        Ok(self.potential(x)?.0)
    }

    pub fn temperature(&self, x: &State) -> Result<f64> {
        let t = self.potential(x)?.2;
        check_temperatures(&[t])?;
        Ok(t)
    }

    pub fn hamiltonian_observable(&self) -> Observable {
        let (u1, u2) = (self.potential.clone(), self.potential.clone());
        Observable::on_layout("H", self.layout(), move |x| u1(x.q(), x.entropy()).0).with_gradient(
            move |x| {
                let (_, dq, ds) = u2(x.q(), x.entropy());
                dq.into_iter().chain([ds]).collect()
            },
        )
    }

    pub fn entropy_observable(&self) -> Observable {
        Observable::total_entropy(self.layout())
    }

    pub fn sample(&self, rng: &mut Prng) -> State {
        (self.sampler)(rng)
    }
}

fn invert_friction(lambda: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sv = lambda.clone().svd(false, false).singular_values;
    let (max, min) = (sv.max(), sv.min());
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::SingularFrictionMatrix { condition });
    }
    lambda
        .clone()
        .try_inverse()
        .ok_or(Error::SingularFrictionMatrix { condition })
}
