//! Bracket evaluators.
//!
//! Every bracket is built in two stages: [`Bracket4::at`] (and the 2-bracket
//! and tensor equivalents) prepares everything that depends only on the state
//! (temperatures, friction matrices, velocities) and reports state-level
//! errors; the returned closure then maps gradients to a number. Evaluating on
//! observables requests each observable's gradient exactly once.
//!
//! The metric 4-brackets are assembled so that their symmetries hold exactly
//! in floating point, not just up to rounding: every pairwise tensor is
//! evaluated in a form symmetric under argument exchange, and the
//! Kulkarni–Nomizu combination is grouped as `(P1 + P2) - (P3 + P4)`, which
//! maps to its exact negative under either in-pair swap and to itself under
//! pair exchange.

mod lie;
mod nosymp;
mod thermo;

use std::fmt;
use std::sync::Arc;

pub use lie::{lie_poisson, metric4_ep};
pub use nosymp::metric4_no_symplectic;
pub use thermo::{
    discrete_metric, friction_bracket, metric4_first_form, metric4_symmetric_form,
    metric4_transfer, DEFAULT_K_MIN,
};

use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::state::{Gradient, State, StateClass};

pub type Eval2 = Box<dyn Fn(&Gradient, &Gradient) -> f64 + Send + Sync>;
pub type Eval4 = Box<dyn Fn(&[&Gradient; 4]) -> f64 + Send + Sync>;
type Prepare2 = dyn Fn(&State) -> Result<Eval2> + Send + Sync;
type Prepare4 = dyn Fn(&State) -> Result<Eval4> + Send + Sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketKind {
    /// Antisymmetric (Poisson-type) bracket.
    Symplectic,
    /// Symmetric (dissipative) bracket.
    Metric,
}

/// A two-argument bracket `{F, G}` or `(F, G)`.
#[derive(Clone)]
pub struct Bracket2 {
    name: Arc<str>,
    kind: BracketKind,
    class: StateClass,
    prepare: Arc<Prepare2>,
}

impl fmt::Debug for Bracket2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Bracket2")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .finish()
    }
}

impl Bracket2 {
    pub fn new(
        name: impl Into<String>,
        kind: BracketKind,
        class: StateClass,
        prepare: impl Fn(&State) -> Result<Eval2> + Send + Sync + 'static,
    ) -> Self {
        Bracket2 {
            name: name.into().into(),
            kind,
            class,
            prepare: Arc::new(prepare),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> BracketKind {
        self.kind
    }

    pub fn at(&self, x: &State) -> Result<Eval2> {
        check_class(self.class, x)?;
        (self.prepare)(x)
    }

    pub fn eval_grads(&self, f: &Gradient, g: &Gradient, x: &State) -> Result<f64> {
        Ok(self.at(x)?(f, g))
    }

    pub fn eval(&self, f: &Observable, g: &Observable, x: &State) -> Result<f64> {
        let e = self.at(x)?;
        Ok(e(&f.grad(x)?, &g.grad(x)?))
    }
}

/// A metric 4-bracket `(F, G; M, N)`.
#[derive(Clone)]
pub struct Bracket4 {
    name: Arc<str>,
    class: StateClass,
    prepare: Arc<Prepare4>,
}

impl fmt::Debug for Bracket4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Bracket4")
            .field("name", &self.name)
            .finish()
    }
}

impl Bracket4 {
    pub fn new(
        name: impl Into<String>,
        class: StateClass,
        prepare: impl Fn(&State) -> Result<Eval4> + Send + Sync + 'static,
    ) -> Self {
        Bracket4 {
            name: name.into().into(),
            class,
            prepare: Arc::new(prepare),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn class(&self) -> StateClass {
        self.class
    }

    pub fn at(&self, x: &State) -> Result<Eval4> {
        check_class(self.class, x)?;
        (self.prepare)(x)
    }

    pub fn eval_grads(&self, grads: &[&Gradient; 4], x: &State) -> Result<f64> {
        Ok(self.at(x)?(grads))
    }

    pub fn eval(
        &self,
        f: &Observable,
        g: &Observable,
        m: &Observable,
        n: &Observable,
        x: &State,
    ) -> Result<f64> {
        let e = self.at(x)?;
        let grads = [f.grad(x)?, g.grad(x)?, m.grad(x)?, n.grad(x)?];
        Ok(e(&[&grads[0], &grads[1], &grads[2], &grads[3]]))
    }

    /// Termwise sum, evaluated in the order given.
    pub fn sum(name: impl Into<String>, parts: Vec<Bracket4>) -> Bracket4 {
        assert!(!parts.is_empty(), "empty bracket sum");
        let class = parts[0].class;
        assert!(parts.iter().all(|b| b.class == class));
        Bracket4::new(name, class, move |x| {
            let evals = parts.iter().map(|b| b.at(x)).collect::<Result<Vec<_>>>()?;
            Ok(Box::new(move |g| evals.iter().map(|e| e(g)).sum()))
        })
    }
}

/// A symmetric 2-tensor on observables, the building block of
/// Kulkarni–Nomizu 4-brackets. Implementations must be exactly symmetric.
#[derive(Clone)]
pub struct SymTensor2Field {
    name: Arc<str>,
    class: StateClass,
    prepare: Arc<Prepare2>,
}

impl fmt::Debug for SymTensor2Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymTensor2Field")
            .field("name", &self.name)
            .finish()
    }
}

impl SymTensor2Field {
    pub fn new(
        name: impl Into<String>,
        class: StateClass,
        prepare: impl Fn(&State) -> Result<Eval2> + Send + Sync + 'static,
    ) -> Self {
        SymTensor2Field {
            name: name.into().into(),
            class,
            prepare: Arc::new(prepare),
        }
    }

    pub fn at(&self, x: &State) -> Result<Eval2> {
        check_class(self.class, x)?;
        (self.prepare)(x)
    }

    pub fn eval(&self, f: &Observable, g: &Observable, x: &State) -> Result<f64> {
        Ok(self.at(x)?(&f.grad(x)?, &g.grad(x)?))
    }
}

/// Kulkarni–Nomizu combination of two symmetric tensors on the four slots
/// `(F, G; M, N)`:
///
/// `a(F,M) b(G,N) - a(F,N) b(G,M) + a(G,N) b(F,M) - a(G,M) b(F,N)`.
#[inline]
pub fn kn_combine(a: impl Fn(usize, usize) -> f64, b: impl Fn(usize, usize) -> f64) -> f64 {
    let p1 = a(0, 2) * b(1, 3);
    let p2 = a(1, 3) * b(0, 2);
    let p3 = a(0, 3) * b(1, 2);
    let p4 = a(1, 2) * b(0, 3);
    (p1 + p2) - (p3 + p4)
}

pub fn kn_product(a: &SymTensor2Field, b: &SymTensor2Field) -> Bracket4 {
    assert_eq!(a.class, b.class, "tensors live on different state classes");
    let (a, b) = (a.clone(), b.clone());
    let name = format!("{} KN {}", a.name, b.name);
    Bracket4::new(name, a.class, move |x| {
        let ea = a.at(x)?;
        let eb = b.at(x)?;
        Ok(Box::new(move |g| {
            kn_combine(|i, j| ea(g[i], g[j]), |i, j| eb(g[i], g[j]))
        }))
    })
}

/// The metric 2-bracket `(F, G) = (F, H; G, H)`.
pub fn reduce_to_2(b4: &Bracket4, h: &Observable) -> Bracket2 {
    let (b4, h) = (b4.clone(), h.clone());
    let name = format!("({}; {})", b4.name, h.name());
    Bracket2::new(name, BracketKind::Metric, b4.class, move |x| {
        let e = b4.at(x)?;
        let dh = h.grad(x)?;
        Ok(Box::new(move |f, g| e(&[f, &dh, g, &dh])))
    })
}

/// Canonical bracket `<dF/dq, dG/dp> - <dF/dp, dG/dq>` on simple or discrete
/// states.
pub fn poisson_canonical(class: StateClass) -> Bracket2 {
    assert!(
        matches!(class, StateClass::Simple | StateClass::Discrete),
        "canonical bracket needs (q, p) coordinates"
    );
    Bracket2::new("canonical", BracketKind::Symplectic, class, |_| {
        Ok(Box::new(|f, g| {
            let (fq, fp, gq, gp) = (f.q(), f.p(), g.q(), g.p());
            let mut acc = 0.0;
            for i in 0..fq.len() {
                acc += fq[i] * gp[i] - fp[i] * gq[i];
            }
            acc
        }))
    })
}

fn check_class(expected: StateClass, x: &State) -> Result<()> {
    if x.class() != expected {
        return Err(Error::ArityMismatch {
            expected,
            found: x.class(),
        });
    }
    Ok(())
}

/// `<x, A y>` evaluated symmetrically so that swapping `x` and `y` gives the
/// bit-identical result when `A` is symmetric.
pub(crate) fn sym_form(a: &nalgebra::DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut xy = 0.0;
    let mut yx = 0.0;
    for i in 0..n {
        let mut ay = 0.0;
        let mut ax = 0.0;
        for j in 0..n {
            ay += a[(i, j)] * y[j];
            ax += a[(i, j)] * x[j];
        }
        xy += x[i] * ay;
        yx += y[i] * ax;
    }
    0.5 * (xy + yx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{Coords, Layout};

    fn layout() -> Layout {
        Layout::Simple { dim: 1 }
    }

    fn table_tensor(values: [[f64; 4]; 4], class: StateClass) -> SymTensor2Field {
        // Reads the observable index from the q slot of the gradient.
        SymTensor2Field::new("table", class, move |_| {
            Ok(Box::new(move |f, g| {
                values[f.q()[0] as usize][g.q()[0] as usize]
            }))
        })
    }

    fn tags() -> [Gradient; 4] {
        std::array::from_fn(|i| Coords::new(layout(), vec![i as f64, 0.0, 0.0]).unwrap())
    }

    #[test]
    fn kn_of_constants_vanishes() {
        let one = table_tensor([[1.0; 4]; 4], StateClass::Simple);
        let kn = kn_product(&one, &one);
        let x = State::simple(&[0.0], &[0.0], 0.0).unwrap();
        let t = tags();
        assert_eq!(
            kn.eval_grads(&[&t[0], &t[1], &t[2], &t[3]], &x).unwrap(),
            0.0
        );
    }

    #[test]
    fn kn_direct_substitution() {
        // a(F,M)=2, a(F,N)=0, a(G,N)=1, a(G,M)=0, b = 1 -> 3
        let mut a = [[0.0; 4]; 4];
        a[0][2] = 2.0;
        a[2][0] = 2.0;
        a[1][3] = 1.0;
        a[3][1] = 1.0;
        let kn = kn_product(
            &table_tensor(a, StateClass::Simple),
            &table_tensor([[1.0; 4]; 4], StateClass::Simple),
        );
        let x = State::simple(&[0.0], &[0.0], 0.0).unwrap();
        let t = tags();
        assert_eq!(
            kn.eval_grads(&[&t[0], &t[1], &t[2], &t[3]], &x).unwrap(),
            3.0
        );
        // F = G in the first pair
        assert_eq!(
            kn.eval_grads(&[&t[0], &t[0], &t[2], &t[3]], &x).unwrap(),
            0.0
        );
    }

    #[test]
    fn canonical_pairs() {
        let l = layout();
        let x = State::simple(&[3.0], &[1.5], 0.2).unwrap();
        let pb = poisson_canonical(StateClass::Simple);
        let q = Observable::coordinate(l, 0);
        let p = Observable::coordinate(l, 1);
        assert_eq!(pb.eval(&q, &p, &x).unwrap(), 1.0);
        let ke = Observable::new("p^2/2", StateClass::Simple, |x| x.p()[0].powi(2) / 2.0)
            .with_gradient(|x| vec![0.0, x.p()[0], 0.0]);
        assert_eq!(pb.eval(&ke, &ke, &x).unwrap(), 0.0);
        let half_q2 = Observable::new("q^2/2", StateClass::Simple, |x| x.q()[0].powi(2) / 2.0)
            .with_gradient(|x| vec![x.q()[0], 0.0, 0.0]);
        assert_eq!(pb.eval(&p, &half_q2, &x).unwrap(), -3.0);
        let s = Observable::total_entropy(l);
        assert_eq!(pb.eval(&ke, &s, &x).unwrap(), 0.0);
    }

    #[test]
    fn reduction_vanishes_on_generator() {
        let one = table_tensor([[1.0, 2.0, 0.5, 3.0]; 4], StateClass::Simple);
        let b4 = kn_product(&one, &one);
        let h = Observable::coordinate(layout(), 0);
        let b2 = reduce_to_2(&b4, &h);
        let x = State::simple(&[1.0], &[0.0], 0.0).unwrap();
        assert_eq!(b2.eval(&h, &h, &x).unwrap(), 0.0);
        assert_eq!(b2.kind(), BracketKind::Metric);
    }

    #[test]
    fn class_mismatch_is_reported() {
        let pb = poisson_canonical(StateClass::Simple);
        let x = State::no_symp(&[1.0], 0.0).unwrap();
        assert!(matches!(pb.at(&x), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn sym_form_is_bitwise_symmetric() {
        let a = nalgebra::DMatrix::from_row_slice(2, 2, &[0.3, 0.1, 0.1, 0.7]);
        let x = [0.123456789, -2.5];
        let y = [1.0 / 3.0, 0.9];
        assert_eq!(
            sym_form(&a, &x, &y).to_bits(),
            sym_form(&a, &y, &x).to_bits()
        );
    }
}
