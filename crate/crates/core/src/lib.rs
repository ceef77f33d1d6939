//! Metriplectic formulation of variational non-equilibrium thermodynamics.
//!
//! Systems are evolved two ways: by their Euler–Lagrange equations of motion
//! and by the dynamics `F' = {F, H} + (F, H; S, H)` generated by a Poisson
//! bracket and a metric 4-bracket. [`verify`] checks the two against each
//! other along with the bracket symmetries, energy conservation and entropy
//! production.
//!
//! ```
//! use metriplectic::prelude::*;
//!
//! let gas = ideal_gas_energy(IdealGasParams { u0: 2.0, n_moles: 1.0, c_v: 1.0, ..Default::default() })?;
//! let piston = System::from(builtin_piston(1.0, |_, _| 1.0, gas)?);
//! let x = State::simple(&[1.0], &[3.0], 0.0)?;
//! let rate = rhs_bracket(&piston, &x)?;
//! assert!((rate.entropies()[0] - 4.5).abs() < 1e-12);
//! # Ok::<(), metriplectic::Error>(())
//! ```

pub mod brackets;
pub mod dynamics;
mod error;
pub mod fluid1d;
pub mod legendre;
pub mod observable;
pub mod presets;
pub mod rng;
pub mod state;
pub mod systems;
pub mod verify;

pub use error::{Error, Result};
pub use observable::Observable;
pub use rng::Prng;
pub use state::{Block, Coords, Gradient, Layout, State, StateClass, Tangent};

pub mod prelude {
    pub use crate::brackets::*;
    pub use crate::dynamics::*;
    pub use crate::fluid1d::*;
    pub use crate::legendre::*;
    pub use crate::observable::*;
    pub use crate::systems::*;
    pub use crate::verify::{
        random_observable, run_suite, run_suite_with, Suite, SuiteOptions, VerifyReport,
    };
    pub use crate::{Error, Layout, Prng, Result, State, StateClass};
}
