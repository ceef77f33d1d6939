//! System specifications and the built-in catalog.

mod builtins;
mod energy;
mod lie;
mod mechanical;
mod nosymp;

pub use builtins::{
    builtin_chemical, builtin_piston, builtin_piston_indefinite, builtin_rigid_body_thermo,
    builtin_two_pistons, Geometry,
};
pub use energy::{ideal_gas_energy, EntropyEnergy, IdealGas, IdealGasParams, InternalEnergy};
pub use lie::{so3_structure, LiePartials, LieSystem, LieSystemBuilder};
pub use mechanical::{
    heat_flux_matrix, DiscreteSystem, DiscreteSystemBuilder, FrictionCheck, Mechanics,
    SimpleSystem, SimpleSystemBuilder, REGISTRATION_SAMPLES,
};
pub use nosymp::{NoSympSystem, MAX_CONDITION};

pub(crate) use mechanical::check_temperatures;

use crate::error::Result;
use crate::fluid1d::FluidSystem;
use crate::observable::Observable;
use crate::rng::Prng;
use crate::state::{Layout, State, StateClass};

/// Any registered system.
#[derive(Debug, Clone)]
pub enum System {
    Simple(SimpleSystem),
    Discrete(DiscreteSystem),
    NoSymp(NoSympSystem),
    Lie(LieSystem),
    Fluid(FluidSystem),
}

impl System {
    pub fn name(&self) -> &str {
        match self {
            System::Simple(s) => s.name(),
            System::Discrete(s) => s.name(),
            System::NoSymp(s) => s.name(),
            System::Lie(s) => s.name(),
            System::Fluid(s) => s.name(),
        }
    }

    pub fn layout(&self) -> Layout {
        match self {
            System::Simple(s) => s.layout(),
            System::Discrete(s) => s.layout(),
            System::NoSymp(s) => s.layout(),
            System::Lie(s) => s.layout(),
            System::Fluid(s) => s.layout(),
        }
    }

    pub fn class(&self) -> StateClass {
        self.layout().class()
    }

    pub fn hamiltonian_observable(&self) -> Observable {
        match self {
            System::Simple(s) => s.hamiltonian_observable(),
            System::Discrete(s) => s.hamiltonian_observable(),
            System::NoSymp(s) => s.hamiltonian_observable(),
            System::Lie(s) => s.hamiltonian_observable(),
            System::Fluid(s) => s.hamiltonian_observable(),
        }
    }

    /// Total entropy observable (`dx * sum s` for fields).
    pub fn entropy_observable(&self) -> Observable {
        match self {
            System::Fluid(s) => s.entropy_observable(),
            other => Observable::total_entropy(other.layout()),
        }
    }

    pub fn energy(&self, x: &State) -> Result<f64> {
        match self {
            System::Simple(s) => s.energy(x),
            System::Discrete(s) => s.energy(x),
            System::NoSymp(s) => s.energy(x),
            System::Lie(s) => s.energy(x),
            System::Fluid(s) => s.energy(x),
        }
    }

    pub fn total_entropy(&self, x: &State) -> f64 {
        match self {
            System::Fluid(s) => s.total_entropy(x),
            _ => x.entropies().iter().sum(),
        }
    }

    /// Temperatures, one per entropy coordinate.
    pub fn temperatures(&self, x: &State) -> Result<Vec<f64>> {
        match self {
            System::Simple(s) => s.temperatures(x),
            System::Discrete(s) => s.temperatures(x),
            System::NoSymp(s) => Ok(vec![s.temperature(x)?]),
            System::Lie(s) => Ok(vec![s.temperature(x)?]),
            System::Fluid(s) => s.temperatures(x),
        }
    }

    pub fn check_domain(&self, x: &State) -> Result<()> {
        match self {
            System::Simple(s) => s.check_domain(x),
            System::Discrete(s) => s.check_domain(x),
            System::NoSymp(s) => s.check_layout(x),
            System::Lie(s) => s.check_layout(x),
            System::Fluid(s) => s.check_domain(x),
        }
    }

    pub fn sample(&self, rng: &mut Prng) -> State {
        match self {
            System::Simple(s) => s.sample(rng),
            System::Discrete(s) => s.sample(rng),
            System::NoSymp(s) => s.sample(rng),
            System::Lie(s) => s.sample(rng),
            System::Fluid(s) => s.sample(rng),
        }
    }
}

impl From<SimpleSystem> for System {
    fn from(s: SimpleSystem) -> Self {
        System::Simple(s)
    }
}

impl From<DiscreteSystem> for System {
    fn from(s: DiscreteSystem) -> Self {
        System::Discrete(s)
    }
}

impl From<NoSympSystem> for System {
    fn from(s: NoSympSystem) -> Self {
        System::NoSymp(s)
    }
}

impl From<LieSystem> for System {
    fn from(s: LieSystem) -> Self {
        System::Lie(s)
    }
}

impl From<FluidSystem> for System {
    fn from(s: FluidSystem) -> Self {
        System::Fluid(s)
    }
}
