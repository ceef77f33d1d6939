//! One-dimensional periodic discretization of the thermodynamic
//! Navier–Stokes brackets.
//!
//! Fields are cell values of momentum density `m`, mass density `rho` and
//! entropy density `s`. Spatial derivatives use the central difference
//! `(Dw)_i = (w_{i+1} - w_{i-1}) / (2 dx)` with periodic wrap, for which
//! `D^T = -D` holds exactly and summation by parts is exact. Discrete
//! functionals are `f = dx * sum_i phi(u_i)` and their functional derivative
//! is the coordinate gradient divided by `dx`.

use serde::{Deserialize, Serialize};

use crate::brackets::{kn_combine, Bracket2, Bracket4, BracketKind};
use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::rng::Prng;
use crate::state::{Gradient, Layout, State, StateClass};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid1D {
    pub n: usize,
    pub length: f64,
}

impl Grid1D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::Spec(format!("grid needs at least 4 cells, got {n}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Spec(format!(
                "grid length must be positive, got {length}"
            )));
        }
        Ok(Grid1D { n, length })
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Cell-centre coordinates.
    pub fn centres(&self) -> Vec<f64> {
        (0..self.n).map(|i| (i as f64 + 0.5) * self.dx()).collect()
    }

    /// Periodic central difference.
    pub fn diff(&self, w: &[f64]) -> Vec<f64> {
        let n = self.n;
        let inv = 1.0 / (2.0 * self.dx());
        (0..n)
            .map(|i| (w[(i + 1) % n] - w[(i + n - 1) % n]) * inv)
            .collect()
    }
}

/// `e(rho, s) = c rho^gamma exp(s / (c_v rho))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluidEos {
    pub gamma: f64,
    pub c_v: f64,
    pub c: f64,
}

impl Default for FluidEos {
    fn default() -> Self {
        FluidEos {
            gamma: 1.4,
            c_v: 1.0,
            c: 1.0,
        }
    }
}

impl FluidEos {
    pub fn energy(&self, rho: f64, s: f64) -> f64 {
        self.c * rho.powf(self.gamma) * (s / (self.c_v * rho)).exp()
    }

    /// `de/drho`
    pub fn d_rho(&self, rho: f64, s: f64) -> f64 {
        self.energy(rho, s) * (self.gamma / rho - s / (self.c_v * rho * rho))
    }

    /// Temperature `de/ds`.
    pub fn d_s(&self, rho: f64, s: f64) -> f64 {
        self.energy(rho, s) / (self.c_v * rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidParams {
    /// Viscosity.
    pub mu: f64,
    /// Heat conductivity.
    pub kappa: f64,
    #[serde(default)]
    pub eos: FluidEos,
}

/// Per-cell functional derivatives `(df/dm, df/drho, df/ds)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGradient {
    pub m: Vec<f64>,
    pub rho: Vec<f64>,
    pub s: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct FluidSystem {
    grid: Grid1D,
    params: FluidParams,
}

impl FluidSystem {
    pub fn new(grid: Grid1D, params: FluidParams) -> Result<Self> {
        Grid1D::new(grid.n, grid.length)?;
        if !(params.mu >= 0.0 && params.kappa >= 0.0) {
            return Err(Error::Spec(format!(
                "viscosity and conductivity must be nonnegative (mu = {}, kappa = {})",
                params.mu, params.kappa
            )));
        }
        let e = params.eos;
        if !(e.gamma > 0.0 && e.c_v > 0.0 && e.c > 0.0) {
            return Err(Error::Spec(format!("invalid equation of state {e:?}")));
        }
        Ok(FluidSystem { grid, params })
    }

    pub fn name(&self) -> &str {
        "fluid1d"
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn params(&self) -> &FluidParams {
        &self.params
    }

    pub fn layout(&self) -> Layout {
        Layout::Field1D { cells: self.grid.n }
    }

    pub(crate) fn check_layout(&self, x: &State) -> Result<()> {
        if x.layout() != self.layout() {
            return Err(Error::DimensionMismatch(format!(
                "fluid on {} cells got {:?}",
                self.grid.n,
                x.layout()
            )));
        }
        Ok(())
    }

    pub fn check_domain(&self, x: &State) -> Result<()> {
        self.check_layout(x)?;
        match x.rho().iter().position(|&r| r.is_nan() || r <= 0.0) {
            Some(i) => Err(Error::DomainViolation {
                step: None,
                reason: format!("density rho[{i}] = {} is not positive", x.rho()[i]),
            }),
            None => Ok(()),
        }
    }

    pub fn velocity(&self, x: &State) -> Vec<f64> {
        x.m().iter().zip(x.rho()).map(|(m, r)| m / r).collect()
    }

    pub fn temperatures(&self, x: &State) -> Result<Vec<f64>> {
        self.check_domain(x)?;
        let eos = self.params.eos;
        let t: Vec<f64> = x
            .rho()
            .iter()
            .zip(x.entropies())
            .map(|(&r, &s)| eos.d_s(r, s))
            .collect();
        crate::systems::check_temperatures(&t)?;
        Ok(t)
    }

    /// `h = dx sum (m^2 / (2 rho) + e(rho, s))`.
    pub fn energy(&self, x: &State) -> Result<f64> {
        self.check_domain(x)?;
        let eos = self.params.eos;
        let sum: f64 = (0..self.grid.n)
            .map(|i| {
                let (m, r, s) = (x.m()[i], x.rho()[i], x.entropies()[i]);
                0.5 * m * m / r + eos.energy(r, s)
            })
            .sum();
        Ok(self.grid.dx() * sum)
    }

    pub fn mass(&self, x: &State) -> f64 {
        self.grid.dx() * x.rho().iter().sum::<f64>()
    }

    pub fn total_entropy(&self, x: &State) -> f64 {
        self.grid.dx() * x.entropies().iter().sum::<f64>()
    }

    /// `(u, -u^2/2 + e_rho, T)`.
    pub fn energy_derivatives(&self, x: &State) -> FieldGradient {
        let eos = self.params.eos;
        let u = self.velocity(x);
        let rho = x
            .rho()
            .iter()
            .zip(x.entropies())
            .zip(&u)
            .map(|((&r, &s), &v)| -0.5 * v * v + eos.d_rho(r, s))
            .collect();
        let s = x
            .rho()
            .iter()
            .zip(x.entropies())
            .map(|(&r, &s)| eos.d_s(r, s))
            .collect();
        FieldGradient { m: u, rho, s }
    }

    pub fn hamiltonian_observable(&self) -> Observable {
        let (a, b) = (self.clone(), self.clone());
        let dx = self.grid.dx();
        Observable::on_layout("h", self.layout(), move |x| a.energy(x).unwrap_or(f64::NAN))
            .with_gradient(move |x| {
                let d = b.energy_derivatives(x);
                d.m.iter()
                    .chain(&d.rho)
                    .chain(&d.s)
                    .map(|v| dx * v)
                    .collect()
            })
    }

    pub fn entropy_observable(&self) -> Observable {
        field_sum_observable("S", self.layout(), self.grid.dx(), 2)
    }

    pub fn mass_observable(&self) -> Observable {
        field_sum_observable("mass", self.layout(), self.grid.dx(), 1)
    }

    /// Random admissible state with independent cell values.
    pub fn sample(&self, rng: &mut Prng) -> State {
        let n = self.grid.n;
        let m = rng.uniform_vec(n, -1.0, 1.0);
        let rho = rng.uniform_vec(n, 0.5, 1.5);
        let s: Vec<f64> = rho.iter().map(|r| r * rng.uniform(-0.5, 0.5)).collect();
        State::field(&m, &rho, &s).expect("admissible sample")
    }

    /// Smooth single-mode perturbation of the uniform state `rho = 1, s = 0`.
    pub fn smooth_state(&self, amplitude: f64) -> Result<State> {
        let k = 2.0 * std::f64::consts::PI / self.grid.length;
        let xs = self.grid.centres();
        let rho: Vec<f64> = xs.iter().map(|x| 1.0 + amplitude * (k * x).sin()).collect();
        let m: Vec<f64> = xs.iter().map(|x| amplitude * (k * x).cos()).collect();
        let s: Vec<f64> = xs
            .iter()
            .zip(&rho)
            .map(|(x, r)| r * amplitude * (2.0 * k * x).sin())
            .collect();
        State::field(&m, &rho, &s)
    }
}

/// `dx * sum` of one block (0 = m, 1 = rho, 2 = s).
fn field_sum_observable(name: &str, layout: Layout, dx: f64, block: usize) -> Observable {
    let Layout::Field1D { cells } = layout else {
        unreachable!()
    };
    Observable::on_layout(name, layout, move |x| {
        dx * x.as_slice()[block * cells..(block + 1) * cells]
            .iter()
            .sum::<f64>()
    })
    .with_gradient(move |_| {
        let mut g = vec![0.0; 3 * cells];
        g[block * cells..(block + 1) * cells].fill(dx);
        g
    })
}

/// `df/du_i = (1/dx) * df/du_i` on the grid of `sys`.
pub fn functional_gradient(sys: &FluidSystem, f: &Observable, x: &State) -> Result<FieldGradient> {
    sys.check_layout(x)?;
    Ok(split_gradient(&f.grad(x)?, sys.grid.n, sys.grid.dx()))
}

impl FluidSystem {
    pub fn functional_gradient(&self, f: &Observable, x: &State) -> Result<FieldGradient> {
        functional_gradient(self, f, x)
    }
}

fn split_gradient(g: &Gradient, n: usize, dx: f64) -> FieldGradient {
    let inv = 1.0 / dx;
    let v = g.as_slice();
    FieldGradient {
        m: v[..n].iter().map(|a| a * inv).collect(),
        rho: v[n..2 * n].iter().map(|a| a * inv).collect(),
        s: v[2 * n..].iter().map(|a| a * inv).collect(),
    }
}

/// Discrete Lie–Poisson bracket of compressible flow.
///
/// With `a = df/dm`, `alpha = dg/dm`, `beta = dg/drho`, `sigma = dg/ds`, the
/// cell term is `A_i = m alpha Da + beta D(rho a) + sigma D(s a)`; `B_i` is the
/// same with `f` and `g` exchanged and the bracket is `dx sum (A_i - B_i)`,
/// which is exactly antisymmetric.
pub fn lie_poisson_fluid(sys: &FluidSystem) -> Bracket2 {
    let sys = sys.clone();
    Bracket2::new(
        "lie_poisson_fluid",
        BracketKind::Symplectic,
        StateClass::Field1D,
        move |x| {
            sys.check_domain(x)?;
            let (grid, n) = (sys.grid, sys.grid.n);
            let dx = grid.dx();
            let (m, rho, s) = (x.m().to_vec(), x.rho().to_vec(), x.entropies().to_vec());
            Ok(Box::new(move |f, g| {
                let f = split_gradient(f, n, dx);
                let g = split_gradient(g, n, dx);
                let half = |f: &FieldGradient, g: &FieldGradient| -> Vec<f64> {
                    let da = grid.diff(&f.m);
                    let rho_a: Vec<f64> = rho.iter().zip(&f.m).map(|(r, a)| r * a).collect();
                    let s_a: Vec<f64> = s.iter().zip(&f.m).map(|(r, a)| r * a).collect();
                    let (d_rho_a, d_s_a) = (grid.diff(&rho_a), grid.diff(&s_a));
                    (0..n)
                        .map(|i| m[i] * g.m[i] * da[i] + g.rho[i] * d_rho_a[i] + g.s[i] * d_s_a[i])
                        .collect()
                };
                let a = half(&f, &g);
                let b = half(&g, &f);
                dx * a.iter().zip(&b).map(|(a, b)| a - b).sum::<f64>()
            }))
        },
    )
}

/// Per-cell Kulkarni–Nomizu sum `dx sum_i KN(a_i, b_i)` with
/// `a_i(f, g) = w_i (D phi_f)_i (D phi_g)_i` and `b_i(f, g) = f_s g_s`, where
/// `phi` selects the `m` block (viscosity) or the `s` block (heat).
fn cellwise_kn(
    name: &'static str,
    sys: &FluidSystem,
    weight: fn(&FluidParams, f64) -> f64,
    use_s_block: bool,
) -> Bracket4 {
    let sys = sys.clone();
    Bracket4::new(name, StateClass::Field1D, move |x| {
        let t = sys.temperatures(x)?;
        let w: Vec<f64> = t.iter().map(|&ti| weight(&sys.params, ti)).collect();
        let (grid, n) = (sys.grid, sys.grid.n);
        let dx = grid.dx();
        Ok(Box::new(move |g| {
            let fg: [FieldGradient; 4] = std::array::from_fn(|k| split_gradient(g[k], n, dx));
            let dphi: [Vec<f64>; 4] =
                std::array::from_fn(|k| grid.diff(if use_s_block { &fg[k].s } else { &fg[k].m }));
            let mut acc = 0.0;
            for i in 0..n {
                acc += kn_combine(
                    |k, l| w[i] * (dphi[k][i] * dphi[l][i]),
                    |k, l| fg[k].s[i] * fg[l].s[i],
                );
            }
            dx * acc
        }))
    })
}

/// Viscous 4-bracket with `a_i = (mu / T_i) (D df/dm)(D dg/dm)`.
pub fn visc_bracket4(sys: &FluidSystem) -> Bracket4 {
    cellwise_kn("visc", sys, |p, t| p.mu / t, false)
}

/// Heat 4-bracket with `a_i = (kappa / T_i^2) (D df/ds)(D dg/ds)`.
pub fn heat_bracket4(sys: &FluidSystem) -> Bracket4 {
    cellwise_kn("heat", sys, |p, t| p.kappa / (t * t), true)
}

/// Closed forms of `(f, h; g, h)` for the viscous and heat brackets:
///
/// `visc2 = dx sum mu T (D df/dm - Du df/ds / T)(D dg/dm - Du dg/ds / T)`
///
/// `heat2 = dx sum kappa T^2 G_f G_g`, `G_f = (D df/ds - df/ds DT / T) / T`.
pub fn reduced_2brackets(sys: &FluidSystem) -> (Bracket2, Bracket2) {
    let visc = {
        let sys = sys.clone();
        Bracket2::new(
            "visc2",
            BracketKind::Metric,
            StateClass::Field1D,
            move |x| {
                let t = sys.temperatures(x)?;
                let (grid, n, mu) = (sys.grid, sys.grid.n, sys.params.mu);
                let du = grid.diff(&sys.velocity(x));
                Ok(Box::new(move |f, g| {
                    let factor = |f: &Gradient| {
                        let f = split_gradient(f, n, grid.dx());
                        let d = grid.diff(&f.m);
                        (0..n)
                            .map(|i| d[i] - du[i] * f.s[i] / t[i])
                            .collect::<Vec<_>>()
                    };
                    let (a, b) = (factor(f), factor(g));
                    grid.dx() * (0..n).map(|i| mu * t[i] * (a[i] * b[i])).sum::<f64>()
                }))
            },
        )
    };
    let heat = {
        let sys = sys.clone();
        Bracket2::new(
            "heat2",
            BracketKind::Metric,
            StateClass::Field1D,
            move |x| {
                let t = sys.temperatures(x)?;
                let (grid, n, kappa) = (sys.grid, sys.grid.n, sys.params.kappa);
                let dt = grid.diff(&t);
                Ok(Box::new(move |f, g| {
                    let factor = |f: &Gradient| {
                        let f = split_gradient(f, n, grid.dx());
                        let d = grid.diff(&f.s);
                        (0..n)
                            .map(|i| (d[i] - f.s[i] * dt[i] / t[i]) / t[i])
                            .collect::<Vec<_>>()
                    };
                    let (a, b) = (factor(f), factor(g));
                    grid.dx()
                        * (0..n)
                            .map(|i| kappa * t[i] * t[i] * (a[i] * b[i]))
                            .sum::<f64>()
                }))
            },
        )
    };
    (visc, heat)
}

/// Euler–Lagrange right-hand side:
///
/// `m' = -D(m u) - m Du + rho D(u^2/2 - e_rho) - s DT + D(mu Du)`,
/// `rho' = -D(rho u)`,
/// `s' = -D(s u) + (mu/T)(Du)^2 + (kappa/T^2)(DT)^2 + D(kappa DT / T)`.
pub fn rhs_euler_lagrange_fluid(sys: &FluidSystem, x: &State) -> Result<Vec<f64>> {
    let t = sys.temperatures(x)?;
    let (grid, n) = (sys.grid, sys.grid.n);
    let (mu, kappa) = (sys.params.mu, sys.params.kappa);
    let eos = sys.params.eos;
    let (m, rho, s) = (x.m(), x.rho(), x.entropies());
    let u = sys.velocity(x);
    let l_rho: Vec<f64> = (0..n)
        .map(|i| 0.5 * u[i] * u[i] - eos.d_rho(rho[i], s[i]))
        .collect();
    let l_s: Vec<f64> = t.iter().map(|v| -v).collect();
    let prod = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).collect::<Vec<_>>();
    let du = grid.diff(&u);
    let dt = grid.diff(&t);
    let d_mu = grid.diff(&prod(m, &u));
    let d_l_rho = grid.diff(&l_rho);
    let d_l_s = grid.diff(&l_s);
    let visc_flux = grid.diff(&du.iter().map(|v| mu * v).collect::<Vec<_>>());
    let heat_flux = grid.diff(&(0..n).map(|i| kappa * dt[i] / t[i]).collect::<Vec<_>>());
    let d_rho_u = grid.diff(&prod(rho, &u));
    let d_s_u = grid.diff(&prod(s, &u));

    let mut out = vec![0.0; 3 * n];
    for i in 0..n {
        out[i] = -d_mu[i] - m[i] * du[i] + rho[i] * d_l_rho[i] + s[i] * d_l_s[i] + visc_flux[i];
        out[n + i] = -d_rho_u[i];
        out[2 * n + i] = -d_s_u[i]
            + mu / t[i] * du[i] * du[i]
            + kappa / (t[i] * t[i]) * dt[i] * dt[i]
            + heat_flux[i];
    }
    Ok(out)
}
