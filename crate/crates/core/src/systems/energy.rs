//! Internal-energy models used by the built-in systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Internal energy `U(x, S)` of a gas behind a piston at position `x`.
pub trait InternalEnergy: Send + Sync {
    fn energy(&self, x: f64, s: f64) -> f64;
    fn d_position(&self, x: f64, s: f64) -> f64;
    /// Temperature `dU/dS`.
    fn d_entropy(&self, x: f64, s: f64) -> f64;
    /// Positions where the model is defined.
    fn admissible(&self, x: f64) -> bool;
    /// Reference position used to centre random states.
    fn reference_position(&self) -> f64;
    /// Entropy scale used to spread random states.
    fn entropy_scale(&self) -> f64 {
        1.0
    }
    fn reference_entropy(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealGasParams {
    pub n_moles: f64,
    pub c_v: f64,
    pub gas_const: f64,
    pub area: f64,
    pub v0: f64,
    pub s0: f64,
    pub u0: f64,
}

impl Default for IdealGasParams {
    fn default() -> Self {
        IdealGasParams {
            n_moles: 1.0,
            c_v: 1.5,
            gas_const: 1.0,
            area: 1.0,
            v0: 1.0,
            s0: 0.0,
            u0: 1.5,
        }
    }
}

/// `U = U0 (V0/V)^(R/c_v) exp((S - S0)/(n c_v))` with `V = A x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealGas {
    params: IdealGasParams,
}

pub fn ideal_gas_energy(params: IdealGasParams) -> Result<IdealGas> {
    let p = &params;
    let named = [
        ("n_moles", p.n_moles),
        ("c_v", p.c_v),
        ("gas_const", p.gas_const),
        ("area", p.area),
        ("v0", p.v0),
        ("u0", p.u0),
    ];
    for (name, v) in named {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Spec(format!(
                "ideal gas parameter {name} must be positive, got {v}"
            )));
        }
    }
    if !p.s0.is_finite() {
        return Err(Error::Spec("ideal gas s0 must be finite".into()));
    }
    Ok(IdealGas { params })
}

impl IdealGas {
    pub fn params(&self) -> &IdealGasParams {
        &self.params
    }

    pub fn energy_at_volume(&self, v: f64, s: f64) -> f64 {
        let p = &self.params;
        p.u0 * (p.v0 / v).powf(p.gas_const / p.c_v) * ((s - p.s0) / (p.n_moles * p.c_v)).exp()
    }

    /// `dU/dV = -(R/c_v) U / V`, i.e. minus the pressure.
    pub fn d_volume(&self, v: f64, s: f64) -> f64 {
        -(self.params.gas_const / self.params.c_v) * self.energy_at_volume(v, s) / v
    }

    pub fn temperature_at_volume(&self, v: f64, s: f64) -> f64 {
        self.energy_at_volume(v, s) / (self.params.n_moles * self.params.c_v)
    }

    pub fn pressure(&self, x: f64, s: f64) -> f64 {
        -self.d_position(x, s) / self.params.area
    }
}

impl InternalEnergy for IdealGas {
    fn energy(&self, x: f64, s: f64) -> f64 {
        self.energy_at_volume(self.params.area * x, s)
    }

    fn d_position(&self, x: f64, s: f64) -> f64 {
        self.params.area * self.d_volume(self.params.area * x, s)
    }

    fn d_entropy(&self, x: f64, s: f64) -> f64 {
        self.temperature_at_volume(self.params.area * x, s)
    }

    fn admissible(&self, x: f64) -> bool {
        x > 0.0
    }

    fn reference_position(&self) -> f64 {
        self.params.v0 / self.params.area
    }

    fn entropy_scale(&self) -> f64 {
        self.params.n_moles * self.params.c_v
    }

    fn reference_entropy(&self) -> f64 {
        self.params.s0
    }
}

/// Entropy-only energy `f(S)` with `f' > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EntropyEnergy {
    /// `f = c S`
    Linear { slope: f64 },
    /// `f = c exp(S / r)`
    Exponential { scale: f64, rate: f64 },
}

impl Default for EntropyEnergy {
    fn default() -> Self {
        EntropyEnergy::Linear { slope: 1.0 }
    }
}

impl EntropyEnergy {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            EntropyEnergy::Linear { slope } => slope > 0.0 && slope.is_finite(),
            EntropyEnergy::Exponential { scale, rate } => {
                scale > 0.0 && rate > 0.0 && scale.is_finite() && rate.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Spec(format!(
                "entropy energy {self:?} must be increasing"
            )))
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match *self {
            EntropyEnergy::Linear { slope } => slope * s,
            EntropyEnergy::Exponential { scale, rate } => scale * (s / rate).exp(),
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        match *self {
            EntropyEnergy::Linear { slope } => slope,
            EntropyEnergy::Exponential { scale, rate } => scale / rate * (s / rate).exp(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Prng;

    #[test]
    fn reference_point() {
        let gas = ideal_gas_energy(IdealGasParams {
            area: 2.0,
            v0: 3.0,
            u0: 4.0,
            s0: 0.5,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(gas.energy(1.5, 0.5), 4.0);
    }

    #[test]
    fn ideal_gas_law() {
        let p = IdealGasParams {
            n_moles: 2.0,
            c_v: 2.5,
            gas_const: 8.314,
            area: 0.3,
            v0: 1.2,
            s0: 1.0,
            u0: 50.0,
        };
        let gas = ideal_gas_energy(p).unwrap();
        let mut rng = Prng::new(3);
        for _ in 0..20 {
            let x = rng.uniform(0.5, 10.0);
            let s = rng.uniform(-5.0, 5.0);
            let t = gas.d_entropy(x, s);
            assert!(t > 0.0);
            let pv = gas.pressure(x, s) * p.area * x;
            let nrt = p.n_moles * p.gas_const * t;
            assert!((pv - nrt).abs() <= 1e-10 * nrt, "{pv} vs {nrt}");
        }
    }

    #[test]
    fn compressed_gas_pushes_outward() {
        let gas = ideal_gas_energy(IdealGasParams::default()).unwrap();
        assert!(-gas.d_position(0.5, 0.0) > 0.0);
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        let bad = IdealGasParams {
            c_v: 0.0,
            ..Default::default()
        };
        assert!(matches!(ideal_gas_energy(bad), Err(Error::Spec(_))));
    }

    #[test]
    fn entropy_energy_derivatives() {
        let e = EntropyEnergy::Exponential {
            scale: 2.0,
            rate: 0.5,
        };
        let s = 0.3;
        let h = 1e-6;
        let fd = (e.value(s + h) - e.value(s - h)) / (2.0 * h);
        assert!((fd - e.derivative(s)).abs() < 1e-8);
        assert_eq!(EntropyEnergy::Linear { slope: 1.0 }.derivative(-4.0), 1.0);
        assert!(EntropyEnergy::Linear { slope: -1.0 }.validate().is_err());
    }
}
