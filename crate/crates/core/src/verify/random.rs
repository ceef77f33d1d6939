//! Seeded random polynomial observables.
//!
//! Coefficients are drawn from [`Prng`] (SplitMix64) seeded with `seed`, one
//! `uniform(-2, 2)` draw per monomial, monomials in graded lexicographic
//! order: the constant, then `x_i` for increasing `i`, then `x_i x_j` for
//! `i <= j` in lexicographic order, then `x_i x_j x_k` for `i <= j <= k`.
//!
//! On finite-dimensional layouts the variables are all state coordinates. On
//! field layouts the polynomial `phi(m, rho, s)` is in the three values of a
//! single cell and the observable is `sum_i phi(m_i, rho_i, s_i)`.

use std::sync::Arc;

use crate::observable::Observable;
use crate::rng::Prng;
use crate::state::{Layout, State};

/// Dense polynomial; each term lists the variable index of every factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    vars: usize,
    terms: Vec<(Vec<usize>, f64)>,
}

impl Polynomial {
    pub fn random(seed: u64, vars: usize, degree: usize) -> Self {
        let mut rng = Prng::new(seed);
        let mut terms = Vec::new();
        for d in 0..=degree {
            for idx in monomials(vars, d) {
                terms.push((idx, rng.uniform(-2.0, 2.0)));
            }
        }
        Polynomial { vars, terms }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    /// `(factor indices, coefficient)` in generation order.
    pub fn terms(&self) -> &[(Vec<usize>, f64)] {
        &self.terms
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(idx, c)| c * idx.iter().map(|&i| x[i]).product::<f64>())
            .sum()
    }

    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        for (idx, c) in &self.terms {
            for k in 0..idx.len() {
                let rest: f64 = idx
                    .iter()
                    .enumerate()
                    .filter(|&(l, _)| l != k)
                    .map(|(_, &i)| x[i])
                    .product();
                out[idx[k]] += c * rest;
            }
        }
    }
}

/// Nondecreasing index tuples of length `degree` over `vars` variables, in
/// lexicographic order.
fn monomials(vars: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(degree);
    fn rec(
        vars: usize,
        degree: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == degree {
            out.push(cur.clone());
            return;
        }
        for i in start..vars {
            cur.push(i);
            rec(vars, degree, i, cur, out);
            cur.pop();
        }
    }
    rec(vars, degree, 0, &mut current, &mut out);
    out
}

/// Random polynomial observable of total degree `<= degree` on `layout`,
/// with analytic gradient.
pub fn random_observable(seed: u64, layout: Layout, degree: usize) -> Observable {
    let name = format!("poly(seed={seed}, degree={degree})");
    match layout {
        Layout::Field1D { cells } => {
            let phi = Arc::new(Polynomial::random(seed, 3, degree));
            let p2 = phi.clone();
            let cell = move |x: &State, i: usize| [x.m()[i], x.rho()[i], x.entropies()[i]];
            Observable::on_layout(name, layout, move |x| {
                (0..cells).map(|i| phi.value(&cell(x, i))).sum()
            })
            .with_gradient(move |x| {
                let mut g = vec![0.0; 3 * cells];
                let mut local = [0.0; 3];
                for i in 0..cells {
                    local.fill(0.0);
                    p2.gradient_into(&cell(x, i), &mut local);
                    g[i] = local[0];
                    g[cells + i] = local[1];
                    g[2 * cells + i] = local[2];
                }
                g
            })
        }
        _ => {
            let poly = Arc::new(Polynomial::random(seed, layout.len(), degree));
            let p2 = poly.clone();
            Observable::on_layout(name, layout, move |x| poly.value(x.as_slice())).with_gradient(
                move |x| {
                    let mut g = vec![0.0; x.len()];
                    p2.gradient_into(x.as_slice(), &mut g);
                    g
                },
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_order() {
        assert_eq!(monomials(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(monomials(3, 3).len(), 10);
        assert_eq!(monomials(4, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn degree_zero_is_constant() {
        let layout = Layout::Simple { dim: 2 };
        let f = random_observable(1, layout, 0);
        let x = State::simple(&[0.1, 0.2], &[0.3, 0.4], 0.5).unwrap();
        let y = State::simple(&[1.1, -0.2], &[2.3, 0.4], -0.5).unwrap();
        assert_eq!(f.eval(&x).unwrap(), f.eval(&y).unwrap());
        assert!(f.grad(&x).unwrap().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn same_seed_same_polynomial() {
        assert_eq!(Polynomial::random(9, 4, 3), Polynomial::random(9, 4, 3));
        assert_ne!(Polynomial::random(9, 4, 3), Polynomial::random(10, 4, 3));
    }
}
