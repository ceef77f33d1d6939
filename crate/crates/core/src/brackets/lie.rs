//! Brackets on finite-dimensional Lie coalgebras.

use crate::state::{Gradient, StateClass};
use crate::systems::LieSystem;

use super::{kn_product, sym_form, Bracket2, Bracket4, BracketKind, SymTensor2Field};

/// Lie–Poisson bracket with advected parameters and entropy:
///
/// `{f, g} = <mu, [g_mu, f_mu]> + <g_a, f_mu a> - <f_a, g_mu a>
///          + g_s chi(f_mu) s - f_s chi(g_mu) s`.
pub fn lie_poisson(sys: &LieSystem) -> Bracket2 {
    let sys = sys.clone();
    Bracket2::new(
        "lie_poisson",
        BracketKind::Symplectic,
        StateClass::Lie,
        move |x| {
            sys.check_layout(x)?;
            let (mu, a, s) = (x.mu().to_vec(), x.advected().to_vec(), x.entropy());
            let sys = sys.clone();
            // half(f, g) - half(g, f) is exactly antisymmetric
            let half = move |f: &Gradient, g: &Gradient| -> f64 {
                let bracket = sys.commutator(g.mu(), f.mu());
                let coadjoint: f64 = mu.iter().zip(&bracket).map(|(m, b)| m * b).sum();
                let fa = sys.act(f.mu(), &a);
                let advect: f64 = g.advected().iter().zip(&fa).map(|(u, v)| u * v).sum();
                let chi: f64 = sys.chi().iter().zip(f.mu()).map(|(c, v)| c * v).sum();
                0.5 * coadjoint + advect + g.entropy() * chi * s
            };
            Ok(Box::new(move |f, g| half(f, g) - half(g, f)))
        },
    )
}

/// Dissipative bracket on the algebra: Kulkarni–Nomizu product of
/// `a(F, G) = <F_mu, (Lambda / T) G_mu>` and `b(F, G) = F_s G_s`.
pub fn metric4_ep(sys: &LieSystem) -> Bracket4 {
    let a = {
        let sys = sys.clone();
        SymTensor2Field::new("friction", StateClass::Lie, move |x| {
            let t = sys.temperature(x)?;
            let lam = sys.lambda() / t;
            Ok(Box::new(move |f, g| sym_form(&lam, f.mu(), g.mu())))
        })
    };
    let b = SymTensor2Field::new("dsds", StateClass::Lie, |_| {
        Ok(Box::new(|f, g| f.entropy() * g.entropy()))
    });
    kn_product(&a, &b)
}
