//! Differentiable scalar observables over a state space.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::state::{Coords, Gradient, Layout, State, StateClass};

pub type ValueFn = dyn Fn(&State) -> f64 + Send + Sync;
pub type GradientFn = dyn Fn(&State) -> Vec<f64> + Send + Sync;

/// A scalar function of the state with an optional analytic gradient.
///
/// Immutable once built; clones share the underlying closures.
#[derive(Clone)]
pub struct Observable {
    name: Arc<str>,
    class: StateClass,
    layout: Option<Layout>,
    value: Arc<ValueFn>,
    gradient: Option<Arc<GradientFn>>,
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable")
            .field("name", &self.name)
            .field("class", &self.class)
            .field("layout", &self.layout)
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

impl Observable {
    /// Observable on any state of `class`, gradient by finite differences
    /// unless one is attached with [`Observable::with_gradient`].
    pub fn new(
        name: impl Into<String>,
        class: StateClass,
        value: impl Fn(&State) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Observable {
            name: name.into().into(),
            class,
            layout: None,
            value: Arc::new(value),
            gradient: None,
        }
    }

    /// Observable restricted to states with exactly this layout.
    pub fn on_layout(
        name: impl Into<String>,
        layout: Layout,
        value: impl Fn(&State) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let mut obs = Observable::new(name, layout.class(), value);
        obs.layout = Some(layout);
        obs
    }

    /// Attach an analytic gradient. It must return one partial derivative per
    /// coordinate, in layout order.
    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&State) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    /// Same value, gradient forced through finite differences.
    pub fn without_gradient(mut self) -> Self {
        self.gradient = None;
        self
    }

    /// The coordinate `index` of `layout` as an observable (unit gradient).
    pub fn coordinate(layout: Layout, index: usize) -> Self {
        assert!(index < layout.len(), "coordinate {index} out of range");
        let name = layout.coordinate_names()[index].clone();
        Observable::on_layout(name, layout, move |x| x.as_slice()[index])
            .with_gradient(move |_| Coords::unit(layout, index).into_vec())
    }

    pub fn constant(class: StateClass, c: f64) -> Self {
        Observable::new(format!("{c}"), class, move |_| c).with_gradient(|x| vec![0.0; x.len()])
    }

    /// Sum of the entropy block (`S` for single-entropy layouts, `S_1 + .. + S_N`
    /// for discrete systems).
    pub fn total_entropy(layout: Layout) -> Self {
        Observable::on_layout("S", layout, |x| x.entropies().iter().sum()).with_gradient(move |x| {
            let mut g = Coords::zeros(layout);
            g.block_mut(crate::state::Block::Entropy).fill(1.0);
            debug_assert_eq!(x.layout(), layout);
            g.into_vec()
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn class(&self) -> StateClass {
        self.class
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    fn check(&self, x: &State) -> Result<()> {
        if x.class() != self.class {
            return Err(Error::ArityMismatch {
                expected: self.class,
                found: x.class(),
            });
        }
        if let Some(layout) = self.layout {
            if layout != x.layout() {
                return Err(Error::DimensionMismatch(format!(
                    "observable `{}` is defined on {:?}, state has {:?}",
                    self.name,
                    layout,
                    x.layout()
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &State) -> Result<f64> {
        self.check(x)?;
        Ok((self.value)(x))
    }

    /// Analytic gradient if present, otherwise central differences.
    pub fn grad(&self, x: &State) -> Result<Gradient> {
        self.check(x)?;
        let g = match &self.gradient {
            Some(g) => Coords::new(x.layout(), g(x))?,
            None => finite_difference_gradient(&*self.value, x),
        };
        if let Some(index) = g.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteGradient { index });
        }
        Ok(g)
    }
}

/// `F(x)`, checking that `obs` is defined on the class of `x`.
pub fn eval(obs: &Observable, x: &State) -> Result<f64> {
    obs.eval(x)
}

/// `dF(x)` in the layout order of `x`.
pub fn grad(obs: &Observable, x: &State) -> Result<Gradient> {
    obs.grad(x)
}

/// Central-difference step for coordinate value `xi`: `eps^(1/3) * max(1, |xi|)`.
pub fn fd_step(xi: f64) -> f64 {
    f64::EPSILON.cbrt() * xi.abs().max(1.0)
}

pub(crate) fn finite_difference_gradient(f: &ValueFn, x: &State) -> Gradient {
    let mut out = Coords::zeros(x.layout());
    for (i, &xi) in x.as_slice().iter().enumerate() {
        let h = fd_step(xi);
        let (plus, minus) = (xi + h, xi - h);
        let fp = f(&x.with_coordinate(i, plus));
        let fm = f(&x.with_coordinate(i, minus));
        out.as_mut_slice()[i] = (fp - fm) / (plus - minus);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple2() -> Layout {
        Layout::Simple { dim: 2 }
    }

    #[test]
    fn coordinate_projection() {
        let x = State::simple(&[3.0, 5.0], &[0.0, 0.0], 0.0).unwrap();
        let q1 = Observable::coordinate(simple2(), 0);
        assert_eq!(q1.eval(&x).unwrap(), 3.0);
        assert_eq!(q1.grad(&x).unwrap().as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn constant_and_quadratic() {
        let x = State::simple(&[1.0, 2.0], &[3.0, 4.0], -1.0).unwrap();
        assert_eq!(
            Observable::constant(StateClass::Simple, 7.0)
                .eval(&x)
                .unwrap(),
            7.0
        );
        let kinetic = Observable::new("p.p/2", StateClass::Simple, |x| {
            x.p().iter().map(|v| v * v).sum::<f64>() / 2.0
        });
        assert_eq!(kinetic.eval(&x).unwrap(), 12.5);
    }

    #[test]
    fn square_gradient() {
        let x = State::simple(&[3.0], &[1.0], 0.5).unwrap();
        let sq = Observable::new("q1^2", StateClass::Simple, |x| x.q()[0] * x.q()[0])
            .with_gradient(|x| vec![2.0 * x.q()[0], 0.0, 0.0]);
        assert_eq!(sq.grad(&x).unwrap().as_slice(), &[6.0, 0.0, 0.0]);
        let fd = sq.clone().without_gradient().grad(&x).unwrap();
        assert!((fd.as_slice()[0] - 6.0).abs() < 1e-8);
    }

    #[test]
    fn entropy_gradient_is_unit() {
        let x = State::simple(&[0.3, 0.1], &[2.0, 1.0], 4.0).unwrap();
        let s = Observable::total_entropy(simple2());
        assert_eq!(s.eval(&x).unwrap(), 4.0);
        assert_eq!(s.grad(&x).unwrap().as_slice(), &[0.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn finite_difference_matches_hand_gradient() {
        // F = p1 p2 + S q1; hand-differentiated: (S, 0, p2, p1, q1).
        let x = State::simple(&[2.0, 0.0], &[1.0, 4.0], 3.0).unwrap();
        let f = Observable::new("p1p2+Sq1", StateClass::Simple, |x| {
            x.p()[0] * x.p()[1] + x.entropy() * x.q()[0]
        });
        let g = f.grad(&x).unwrap();
        let expected = [3.0, 0.0, 4.0, 1.0, 2.0];
        for (a, b) in g.as_slice().iter().zip(expected) {
            assert!((a - b).abs() <= 1e-6 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn arity_mismatch_names_both_classes() {
        let x = State::no_symp(&[1.0], 0.0).unwrap();
        let f = Observable::constant(StateClass::Lie, 1.0);
        let err = f.eval(&x).unwrap_err();
        assert_eq!(
            err,
            Error::ArityMismatch {
                expected: StateClass::Lie,
                found: StateClass::NoSymp
            }
        );
        assert!(err.to_string().contains("lie") && err.to_string().contains("no-symplectic"));
    }

    #[test]
    fn non_finite_gradient_reports_index() {
        let x = State::simple(&[0.0], &[1.0], 0.0).unwrap();
        let f = Observable::new("bad", StateClass::Simple, |_| 0.0)
            .with_gradient(|_| vec![0.0, f64::NAN, 0.0]);
        assert_eq!(
            f.grad(&x).unwrap_err(),
            Error::NonFiniteGradient { index: 1 }
        );
    }

    #[test]
    fn eval_is_bit_reproducible() {
        let x = State::simple(&[0.1, 0.7], &[-0.3, 1.1], 0.2).unwrap();
        let f = Observable::new("mix", StateClass::Simple, |x| {
            (x.q()[0] * x.p()[1]).sin() + x.entropy().exp()
        });
        let a = f.grad(&x).unwrap();
        let b = f.grad(&x).unwrap();
        assert_eq!(a, b);
        assert_eq!(f.eval(&x).unwrap().to_bits(), f.eval(&x).unwrap().to_bits());
    }
}
