//! Metric brackets of simple and discrete thermodynamic systems.

use crate::error::Error;
use crate::legendre::dot;
use crate::state::StateClass;
use crate::systems::{DiscreteSystem, Mechanics, SimpleSystem};

use super::{kn_product, sym_form, Bracket4, SymTensor2Field};

/// Default lower bound on `|K|` for the first-form bracket.
pub const DEFAULT_K_MIN: f64 = 1e-10;

/// `(1 / (T K)) A(F, G) A(M, N)` with
/// `A(F, G) = <F_fr, F_p> G_S - <F_fr, G_p> F_S` and `K = -<F_fr, H_p>`.
pub fn metric4_first_form(sys: &SimpleSystem, k_min: f64) -> Bracket4 {
    let sys = sys.clone();
    Bracket4::new("first_form", StateClass::Simple, move |x| {
        let t = sys.temperature(x)?;
        let v = sys.velocity(x)?;
        let force = sys.friction_force(0, x)?;
        let k = -dot(&force, &v);
        if k.abs() <= k_min {
            return Err(Error::DegenerateK { k, k_min });
        }
        let scale = 1.0 / (t * k);
        Ok(Box::new(move |g| {
            let pair = |f: usize, h: usize| {
                dot(&force, g[f].p()) * g[h].entropy() - dot(&force, g[h].p()) * g[f].entropy()
            };
            scale * (pair(0, 1) * pair(2, 3))
        }))
    })
}

/// Friction tensor `a_i(F, G) = <F_p, (Lambda_i / T_i) G_p>` of subsystem `i`.
fn friction_tensor(mech: &Mechanics, i: usize, class: StateClass) -> SymTensor2Field {
    let mech = mech.clone();
    SymTensor2Field::new(format!("friction{}", i + 1), class, move |x| {
        let t = mech.temperatures(x)?[i];
        let v = mech.velocity(x)?;
        let lam = mech.friction_matrix(i, x, &v) / t;
        Ok(Box::new(move |f, g| sym_form(&lam, f.p(), g.p())))
    })
}

/// `b_i(F, G) = F_{S_i} G_{S_i}`.
fn entropy_tensor(i: usize, class: StateClass) -> SymTensor2Field {
    SymTensor2Field::new(format!("dS{}dS{}", i + 1, i + 1), class, move |_| {
        Ok(Box::new(move |f, g| f.entropies()[i] * g.entropies()[i]))
    })
}

fn friction_kn(mech: &Mechanics, i: usize, class: StateClass) -> Bracket4 {
    kn_product(&friction_tensor(mech, i, class), &entropy_tensor(i, class))
}

/// Kulkarni–Nomizu form of the simple-system metric bracket.
pub fn metric4_symmetric_form(sys: &SimpleSystem) -> Bracket4 {
    friction_kn(sys, 0, StateClass::Simple)
}

/// Friction 4-bracket of subsystem `i` of a discrete system.
pub fn friction_bracket(sys: &DiscreteSystem, i: usize) -> Bracket4 {
    assert!(i < sys.subsystems(), "subsystem {i} out of range");
    friction_kn(sys, i, StateClass::Discrete)
}

/// Heat-exchange bracket
/// `sum_ij kappa_ij / (2 T_i T_j) (F_i G_j - F_j G_i)(M_i N_j - M_j N_i)`,
/// where `F_i = dF/dS_i`.
pub fn metric4_transfer(sys: &DiscreteSystem) -> Bracket4 {
    let sys = sys.clone();
    Bracket4::new("transfer", StateClass::Discrete, move |x| {
        let t = sys.temperatures(x)?;
        let n = t.len();
        let kappa = sys.kappa();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && kappa[(i, j)] != 0.0 {
                    pairs.push((i, j, 0.5 * kappa[(i, j)] / (t[i] * t[j])));
                }
            }
        }
        Ok(Box::new(move |g| {
            let (f, gg, m, nn) = (
                g[0].entropies(),
                g[1].entropies(),
                g[2].entropies(),
                g[3].entropies(),
            );
            pairs
                .iter()
                .map(|&(i, j, c)| {
                    let left = f[i] * gg[j] - f[j] * gg[i];
                    let right = m[i] * nn[j] - m[j] * nn[i];
                    c * (left * right)
                })
                .sum()
        }))
    })
}

/// Sum of the friction brackets of every subsystem and the heat-exchange bracket.
pub fn discrete_metric(sys: &DiscreteSystem) -> Bracket4 {
    let mut parts: Vec<Bracket4> = (0..sys.subsystems())
        .map(|i| friction_bracket(sys, i))
        .collect();
    parts.push(metric4_transfer(sys));
    Bracket4::sum("discrete_metric", parts)
}
