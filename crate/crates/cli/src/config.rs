//! TOML scenario files.
//!
//! ```toml
//! [system]
//! name = "piston"
//! mass = 1.0
//! lambda = 1.0
//!
//! [initial]
//! q = [1.0]
//! p = [3.0]
//! s = [0.0]
//!
//! [integrator]
//! method = "rk4"
//! dt = 1e-3
//! t_final = 1.0
//! ```

use std::path::{Path, PathBuf};

use metriplectic::dynamics::{BracketForm, Engine, EngineKind, Method, VectorField};
use metriplectic::fluid1d::{FluidEos, FluidParams, FluidSystem, Grid1D};
use metriplectic::presets;
use metriplectic::systems::{
    builtin_chemical, builtin_piston, builtin_piston_indefinite, builtin_rigid_body_thermo,
    builtin_two_pistons, ideal_gas_energy, EntropyEnergy, Geometry, IdealGasParams, System,
};
use metriplectic::{Error, Layout, State};
use nalgebra::DMatrix;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    System(#[from] Error),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub system: SystemConfig,
    #[serde(default)]
    pub engine: EngineKind,
    /// Only meaningful for single-body mechanical systems.
    pub bracket_form: Option<BracketForm>,
    pub initial: Option<InitialState>,
    pub integrator: Option<IntegratorConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub compare: CompareConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    Piston {
        #[serde(default = "one")]
        mass: f64,
        lambda: f64,
        #[serde(default = "presets::piston_gas")]
        gas: IdealGasParams,
        /// Accept a friction coefficient of either sign.
        #[serde(default)]
        allow_indefinite_friction: bool,
    },
    TwoPistons {
        #[serde(default = "one")]
        mass: f64,
        lambda1: f64,
        lambda2: f64,
        kappa: f64,
        #[serde(default)]
        gas1: IdealGasParams,
        #[serde(default)]
        gas2: IdealGasParams,
        #[serde(default)]
        geometry: Geometry,
    },
    Chemical {
        /// Random SPD `Q` and `lambda` of this size, drawn from `seed`.
        reactions: Option<usize>,
        seed: Option<u64>,
        q: Option<Vec<Vec<f64>>>,
        lambda: Option<Vec<Vec<f64>>>,
        psi_star: Option<Vec<f64>>,
        #[serde(default = "linear_entropy")]
        entropy_energy: EntropyEnergy,
    },
    RigidBody {
        inertia: Vec<Vec<f64>>,
        lambda: Vec<Vec<f64>>,
        #[serde(default = "linear_entropy")]
        entropy_energy: EntropyEnergy,
    },
    Fluid1d {
        cells: usize,
        #[serde(default = "one")]
        length: f64,
        mu: f64,
        kappa: f64,
        #[serde(default)]
        eos: FluidEos,
    },
}

fn one() -> f64 {
    1.0
}

fn linear_entropy() -> EntropyEnergy {
    EntropyEnergy::Linear { slope: 1.0 }
}

/// Initial coordinates by block. Fields that do not belong to the chosen
/// system are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub q: Option<Vec<f64>>,
    pub p: Option<Vec<f64>>,
    pub s: Option<Vec<f64>>,
    pub mu: Option<Vec<f64>>,
    pub m: Option<Vec<f64>>,
    pub rho: Option<Vec<f64>>,
    /// Fluid only: the smooth travelling profile of this amplitude instead of
    /// explicit fields.
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default)]
    pub method: Method,
    pub dt: f64,
    pub t_final: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_trajectory")]
    pub trajectory: String,
    #[serde(default = "default_summary")]
    pub summary: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_dir(),
            trajectory: default_trajectory(),
            summary: default_summary(),
        }
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from(".")
}

fn default_trajectory() -> String {
    "trajectory.csv".into()
}

fn default_summary() -> String {
    "summary.json".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    /// Allowed state divergence per integration step.
    #[serde(default = "default_per_step")]
    pub tolerance_per_step: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            tolerance_per_step: default_per_step(),
        }
    }
}

fn default_per_step() -> f64 {
    1e-11
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse {
                path: path.to_owned(),
                message,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::new(),
            message: e.message().replace('\n', " "),
        })
    }

    pub fn engine(&self) -> Engine {
        Engine {
            kind: self.engine,
            form: self.bracket_form.unwrap_or_default(),
        }
    }

    /// Everything a run needs, validated against the system.
    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        let system = self.system.build()?;
        if self.bracket_form.is_some() && !matches!(system, System::Simple(_)) {
            return Err(ConfigError::Invalid(format!(
                "bracket_form applies to single-body mechanical systems only, not `{}`",
                system.name()
            )));
        }
        let integrator = self
            .integrator
            .clone()
            .ok_or_else(|| ConfigError::Invalid("missing [integrator] section".into()))?;
        if !(integrator.dt > 0.0 && integrator.dt.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "dt must be positive, got {}",
                integrator.dt
            )));
        }
        if !(integrator.t_final >= 0.0 && integrator.t_final.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "t_final must be nonnegative, got {}",
                integrator.t_final
            )));
        }
        if self.compare.tolerance_per_step.is_nan() || self.compare.tolerance_per_step <= 0.0 {
            return Err(ConfigError::Invalid(
                "compare.tolerance_per_step must be positive".into(),
            ));
        }
        let initial = self
            .initial
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("missing [initial] section".into()))?;
        let x0 = initial.build(&system)?;
        system.check_domain(&x0)?;
        system.temperatures(&x0)?;
        VectorField::new(&system, self.engine())?.eval(&x0)?;
        Ok(Scenario {
            system,
            engine: self.engine(),
            x0,
            integrator,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub system: System,
    pub engine: Engine,
    pub x0: State,
    pub integrator: IntegratorConfig,
}

fn matrix(name: &str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>, ConfigError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(ConfigError::Invalid(format!(
            "{name} must be a nonempty square matrix"
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl SystemConfig {
    pub fn build(&self) -> Result<System, ConfigError> {
        let sys = match self {
            SystemConfig::Piston {
                mass,
                lambda,
                gas,
                allow_indefinite_friction,
            } => {
                let gas = ideal_gas_energy(*gas)?;
                let lambda = *lambda;
                if *allow_indefinite_friction {
                    builtin_piston_indefinite(*mass, move |_, _| lambda, gas)?.into()
                } else {
                    if lambda < 0.0 {
                        return Err(ConfigError::Invalid(format!(
                            "friction must be nonnegative, got lambda = {lambda}"
                        )));
                    }
                    builtin_piston(*mass, move |_, _| lambda, gas)?.into()
                }
            }
            SystemConfig::TwoPistons {
                mass,
                lambda1,
                lambda2,
                kappa,
                gas1,
                gas2,
                geometry,
            } => {
                let (l1, l2) = (*lambda1, *lambda2);
                if l1 < 0.0 || l2 < 0.0 {
                    return Err(ConfigError::Invalid(format!(
                        "friction must be nonnegative, got lambda1 = {l1}, lambda2 = {l2}"
                    )));
                }
                builtin_two_pistons(
                    *mass,
                    move |_, _| l1,
                    move |_, _| l2,
                    *kappa,
                    ideal_gas_energy(*gas1)?,
                    ideal_gas_energy(*gas2)?,
                    *geometry,
                )?
                .into()
            }
            SystemConfig::Chemical {
                reactions,
                seed,
                q,
                lambda,
                psi_star,
                entropy_energy,
            } => match (reactions, q, lambda, psi_star) {
                (Some(r), None, None, None) => {
                    if !matches!(entropy_energy, EntropyEnergy::Linear { slope } if *slope == 1.0) {
                        return Err(ConfigError::Invalid(
                            "random chemical networks use f(S) = S".into(),
                        ));
                    }
                    presets::chemical(*r, seed.unwrap_or(0))?
                }
                (None, Some(q), Some(lambda), Some(psi_star)) => {
                    if seed.is_some() {
                        return Err(ConfigError::Invalid(
                            "seed only applies with `reactions`".into(),
                        ));
                    }
                    builtin_chemical(
                        matrix("q", q)?,
                        psi_star.clone(),
                        matrix("lambda", lambda)?,
                        *entropy_energy,
                    )?
                    .into()
                }
                _ => {
                    return Err(ConfigError::Invalid(
                        "chemical needs either `reactions` (and optional `seed`) or all of `q`, `lambda`, `psi_star`".into(),
                    ))
                }
            },
            SystemConfig::RigidBody {
                inertia,
                lambda,
                entropy_energy,
            } => builtin_rigid_body_thermo(
                matrix("inertia", inertia)?,
                matrix("lambda", lambda)?,
                *entropy_energy,
            )?
            .into(),
            SystemConfig::Fluid1d {
                cells,
                length,
                mu,
                kappa,
                eos,
            } => FluidSystem::new(
                Grid1D::new(*cells, *length)?,
                FluidParams {
                    mu: *mu,
                    kappa: *kappa,
                    eos: *eos,
                },
            )?
            .into(),
        };
        Ok(sys)
    }
}

impl InitialState {
    pub fn build(&self, sys: &System) -> Result<State, ConfigError> {
        let layout = sys.layout();
        let given = |name: &str, v: &Option<Vec<f64>>| -> Result<Vec<f64>, ConfigError> {
            v.clone().ok_or_else(|| {
                ConfigError::Invalid(format!("initial.{name} is required for `{}`", sys.name()))
            })
        };
        let allowed: &[&str] = match layout {
            Layout::Simple { .. } | Layout::Discrete { .. } => &["q", "p", "s"],
            Layout::NoSymp { .. } => &["q", "s"],
            Layout::Lie { .. } => &["mu", "s"],
            Layout::Field1D { .. } => &["m", "rho", "s", "amplitude"],
        };
        let present = [
            ("q", self.q.is_some()),
            ("p", self.p.is_some()),
            ("s", self.s.is_some()),
            ("mu", self.mu.is_some()),
            ("m", self.m.is_some()),
            ("rho", self.rho.is_some()),
            ("amplitude", self.amplitude.is_some()),
        ];
        if let Some((name, _)) = present.iter().find(|(n, p)| *p && !allowed.contains(n)) {
            return Err(ConfigError::Invalid(format!(
                "initial.{name} does not apply to `{}` (expected {})",
                sys.name(),
                allowed.join(", ")
            )));
        }
        let single = |s: Vec<f64>| -> Result<f64, ConfigError> {
            match s[..] {
                [v] => Ok(v),
                _ => Err(ConfigError::Invalid(format!(
                    "initial.s must have one entry, got {}",
                    s.len()
                ))),
            }
        };
        let x = match (layout, sys) {
            (Layout::Simple { .. }, _) => State::simple(
                &given("q", &self.q)?,
                &given("p", &self.p)?,
                single(given("s", &self.s)?)?,
            )?,
            (Layout::Discrete { .. }, _) => State::discrete(
                &given("q", &self.q)?,
                &given("p", &self.p)?,
                &given("s", &self.s)?,
            )?,
            (Layout::NoSymp { .. }, _) => {
                State::no_symp(&given("q", &self.q)?, single(given("s", &self.s)?)?)?
            }
            (Layout::Lie { .. }, _) => {
                State::lie(&given("mu", &self.mu)?, &[], single(given("s", &self.s)?)?)?
            }
            (Layout::Field1D { .. }, System::Fluid(f)) => match self.amplitude {
                Some(a) if self.m.is_none() && self.rho.is_none() && self.s.is_none() => {
                    f.smooth_state(a)?
                }
                Some(_) => {
                    return Err(ConfigError::Invalid(
                        "initial.amplitude replaces the explicit fields m, rho, s".into(),
                    ))
                }
                None => State::field(
                    &given("m", &self.m)?,
                    &given("rho", &self.rho)?,
                    &given("s", &self.s)?,
                )?,
            },
            (Layout::Field1D { .. }, _) => unreachable!("field layouts belong to fluid systems"),
        };
        if x.layout() != layout {
            return Err(ConfigError::Invalid(format!(
                "initial state has layout {:?} but `{}` needs {:?}",
                x.layout(),
                sys.name(),
                layout
            )));
        }
        Ok(x)
    }
}

impl ConfigError {
    pub fn kind(&self) -> &'static str {
        match self {
            ConfigError::System(inner) => inner.kind(),
            _ => "config_error",
        }
    }
}
