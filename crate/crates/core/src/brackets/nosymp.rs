//! Purely dissipative bracket of systems without symplectic part.

use crate::state::StateClass;
use crate::systems::NoSympSystem;

use super::{kn_product, sym_form, Bracket4, SymTensor2Field};

/// Kulkarni–Nomizu product of `a(F, G) = <F_q, (Gamma / T) G_q>` and
/// `b(F, G) = F_S G_S`, with `Gamma = Lambda^-1`.
pub fn metric4_no_symplectic(sys: &NoSympSystem) -> Bracket4 {
    let a = {
        let sys = sys.clone();
        SymTensor2Field::new("gamma", StateClass::NoSymp, move |x| {
            let t = sys.temperature(x)?;
            let gamma = sys.gamma() / t;
            Ok(Box::new(move |f, g| sym_form(&gamma, f.q(), g.q())))
        })
    };
    let b = SymTensor2Field::new("dSdS", StateClass::NoSymp, |_| {
        Ok(Box::new(|f, g| f.entropy() * g.entropy()))
    });
    kn_product(&a, &b)
}
