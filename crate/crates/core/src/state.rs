//! State vectors for every system class.
//!
//! All states are stored as one flat coordinate vector plus a [`Layout`] that
//! names the blocks. Gradients and tangent vectors share the same layout, so
//! brackets always read blocks through named accessors (`q()`, `p()`,
//! `entropy()`, `mu()`, ...) and never through raw offsets.
//!
//! Coordinate order per class:
//!
//! | class      | blocks                         |
//! |------------|--------------------------------|
//! | `Simple`   | `q[d]`, `p[d]`, `S`            |
//! | `Discrete` | `q[d]`, `p[d]`, `S_1..S_N`     |
//! | `Lie`      | `mu[n]`, `a[k]`, `s`           |
//! | `Field1D`  | `m[n]`, `rho[n]`, `s[n]`       |
//! | `NoSymp`   | `q[r]`, `S`                    |

use std::fmt;
use std::ops::{Deref, Range};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StateClass {
    Simple,
    Discrete,
    Lie,
    Field1D,
    NoSymp,
}

impl fmt::Display for StateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StateClass::Simple => "simple",
            StateClass::Discrete => "discrete",
            StateClass::Lie => "lie",
            StateClass::Field1D => "field1d",
            StateClass::NoSymp => "no-symplectic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layout {
    Simple { dim: usize },
    Discrete { dim: usize, subsystems: usize },
    Lie { algebra: usize, advected: usize },
    Field1D { cells: usize },
    NoSymp { dim: usize },
}

/// Named coordinate blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Q,
    P,
    Entropy,
    Mu,
    Advected,
    M,
    Rho,
}

impl Layout {
    pub fn class(&self) -> StateClass {
        match self {
            Layout::Simple { .. } => StateClass::Simple,
            Layout::Discrete { .. } => StateClass::Discrete,
            Layout::Lie { .. } => StateClass::Lie,
            Layout::Field1D { .. } => StateClass::Field1D,
            Layout::NoSymp { .. } => StateClass::NoSymp,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Layout::Simple { dim } => 2 * dim + 1,
            Layout::Discrete { dim, subsystems } => 2 * dim + subsystems,
            Layout::Lie { algebra, advected } => algebra + advected + 1,
            Layout::Field1D { cells } => 3 * cells,
            Layout::NoSymp { dim } => dim + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index range of `block`, or `None` if this layout has no such block.
    pub fn range(&self, block: Block) -> Option<Range<usize>> {
        use Block::*;
        match (*self, block) {
            (Layout::Simple { dim }, Q) => Some(0..dim),
            (Layout::Simple { dim }, P) => Some(dim..2 * dim),
            (Layout::Simple { dim }, Entropy) => Some(2 * dim..2 * dim + 1),
            (Layout::Discrete { dim, .. }, Q) => Some(0..dim),
            (Layout::Discrete { dim, .. }, P) => Some(dim..2 * dim),
            (Layout::Discrete { dim, subsystems }, Entropy) => Some(2 * dim..2 * dim + subsystems),
            (Layout::Lie { algebra, .. }, Mu) => Some(0..algebra),
            (Layout::Lie { algebra, advected }, Advected) => Some(algebra..algebra + advected),
            (Layout::Lie { algebra, advected }, Entropy) => {
                Some(algebra + advected..algebra + advected + 1)
            }
            (Layout::Field1D { cells }, M) => Some(0..cells),
            (Layout::Field1D { cells }, Rho) => Some(cells..2 * cells),
            (Layout::Field1D { cells }, Entropy) => Some(2 * cells..3 * cells),
            (Layout::NoSymp { dim }, Q) => Some(0..dim),
            (Layout::NoSymp { dim }, Entropy) => Some(dim..dim + 1),
            _ => None,
        }
    }

    fn expect_range(&self, block: Block) -> Range<usize> {
        self.range(block)
            .unwrap_or_else(|| panic!("{:?} layout has no {block:?} block", self.class()))
    }

    /// Column names in coordinate order, used for CSV headers.
    pub fn coordinate_names(&self) -> Vec<String> {
        fn indexed(prefix: &'static str, n: usize) -> impl Iterator<Item = String> {
            (1..=n).map(move |i| format!("{prefix}{i}"))
        }
        fn zero_indexed(prefix: &'static str, n: usize) -> impl Iterator<Item = String> {
            (0..n).map(move |i| format!("{prefix}_{i}"))
        }
        match *self {
            Layout::Simple { dim } => indexed("q", dim)
                .chain(indexed("p", dim))
                .chain(std::iter::once("S".to_string()))
                .collect(),
            Layout::Discrete { dim, subsystems } => indexed("q", dim)
                .chain(indexed("p", dim))
                .chain(indexed("S", subsystems))
                .collect(),
            Layout::Lie { algebra, advected } => indexed("mu", algebra)
                .chain(indexed("a", advected))
                .chain(std::iter::once("s".to_string()))
                .collect(),
            Layout::Field1D { cells } => zero_indexed("m", cells)
                .chain(zero_indexed("rho", cells))
                .chain(zero_indexed("s", cells))
                .collect(),
            Layout::NoSymp { dim } => indexed("q", dim)
                .chain(std::iter::once("S".to_string()))
                .collect(),
        }
    }
}

/// A flat coordinate vector tagged with its layout.
///
/// Used directly for gradients (one partial derivative per coordinate) and
/// tangent vectors; [`State`] wraps it with validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Coords {
    layout: Layout,
    data: Vec<f64>,
}

pub type Gradient = Coords;
pub type Tangent = Coords;

impl Coords {
    pub fn new(layout: Layout, data: Vec<f64>) -> Result<Self> {
        if data.len() != layout.len() {
            return Err(Error::DimensionMismatch(format!(
                "{:?} layout needs {} coordinates, got {}",
                layout,
                layout.len(),
                data.len()
            )));
        }
        Ok(Coords { layout, data })
    }

    pub fn zeros(layout: Layout) -> Self {
        Coords {
            layout,
            data: vec![0.0; layout.len()],
        }
    }

    /// Unit covector along coordinate `index`.
    pub fn unit(layout: Layout, index: usize) -> Self {
        let mut c = Coords::zeros(layout);
        c.data[index] = 1.0;
        c
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn class(&self) -> StateClass {
        self.layout.class()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn block(&self, block: Block) -> &[f64] {
        &self.data[self.layout.expect_range(block)]
    }

    pub fn block_mut(&mut self, block: Block) -> &mut [f64] {
        let r = self.layout.expect_range(block);
        &mut self.data[r]
    }

    pub fn q(&self) -> &[f64] {
        self.block(Block::Q)
    }

    pub fn p(&self) -> &[f64] {
        self.block(Block::P)
    }

    /// Entropy block: one entry for simple, Lie and no-symplectic layouts,
    /// `N` for discrete systems, one per cell for fields.
    pub fn entropies(&self) -> &[f64] {
        self.block(Block::Entropy)
    }

    /// The scalar entropy coordinate of a single-entropy layout.
    pub fn entropy(&self) -> f64 {
        let s = self.entropies();
        assert_eq!(s.len(), 1, "layout {:?} has no scalar entropy", self.layout);
        s[0]
    }

    pub fn mu(&self) -> &[f64] {
        self.block(Block::Mu)
    }

    pub fn advected(&self) -> &[f64] {
        self.block(Block::Advected)
    }

    pub fn m(&self) -> &[f64] {
        self.block(Block::M)
    }

    pub fn rho(&self) -> &[f64] {
        self.block(Block::Rho)
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    pub fn dot(&self, other: &Coords) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }
}

/// A validated point in state space: right lengths and all components finite.
#[derive(Debug, Clone, PartialEq)]
pub struct State(Coords);

impl Deref for State {
    type Target = Coords;

    fn deref(&self) -> &Coords {
        &self.0
    }
}

impl State {
    pub fn from_coords(coords: Coords) -> Result<Self> {
        if let Some(i) = coords.data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidState(format!(
                "coordinate {i} is not finite ({})",
                coords.data[i]
            )));
        }
        Ok(State(coords))
    }

    pub fn from_vec(layout: Layout, data: Vec<f64>) -> Result<Self> {
        State::from_coords(Coords::new(layout, data)?)
    }

    /// `(q, p, S)` of a simple system.
    pub fn simple(q: &[f64], p: &[f64], s: f64) -> Result<Self> {
        if q.len() != p.len() || q.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "q and p must have equal nonzero length (got {} and {})",
                q.len(),
                p.len()
            )));
        }
        let data = q.iter().chain(p).copied().chain([s]).collect();
        State::from_vec(Layout::Simple { dim: q.len() }, data)
    }

    /// `(q, p, S_1..S_N)` of a discrete system.
    pub fn discrete(q: &[f64], p: &[f64], s: &[f64]) -> Result<Self> {
        if q.len() != p.len() || q.is_empty() || s.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "discrete state needs |q| = |p| >= 1 and N >= 1 (got {}, {}, {})",
                q.len(),
                p.len(),
                s.len()
            )));
        }
        let data = q.iter().chain(p).chain(s).copied().collect();
        State::from_vec(
            Layout::Discrete {
                dim: q.len(),
                subsystems: s.len(),
            },
            data,
        )
    }

    /// `(mu, a, s)` on a Lie coalgebra with advected parameters.
    pub fn lie(mu: &[f64], a: &[f64], s: f64) -> Result<Self> {
        let data = mu.iter().chain(a).copied().chain([s]).collect();
        State::from_vec(
            Layout::Lie {
                algebra: mu.len(),
                advected: a.len(),
            },
            data,
        )
    }

    /// Cell-averaged momentum, mass and entropy densities on a 1D grid.
    pub fn field(m: &[f64], rho: &[f64], s: &[f64]) -> Result<Self> {
        let n = m.len();
        if rho.len() != n || s.len() != n || n < 4 {
            return Err(Error::DimensionMismatch(format!(
                "field arrays must share a length n >= 4 (got {}, {}, {})",
                n,
                rho.len(),
                s.len()
            )));
        }
        if let Some(i) = rho.iter().position(|&r| r <= 0.0) {
            return Err(Error::InvalidState(format!(
                "density must be positive, rho[{i}] = {}",
                rho[i]
            )));
        }
        let data = m.iter().chain(rho).chain(s).copied().collect();
        State::from_vec(Layout::Field1D { cells: n }, data)
    }

    /// `(q, S)` of a system without symplectic part.
    pub fn no_symp(q: &[f64], s: f64) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::DimensionMismatch("q must be nonempty".into()));
        }
        let data = q.iter().copied().chain([s]).collect();
        State::from_vec(Layout::NoSymp { dim: q.len() }, data)
    }

    pub fn coords(&self) -> &Coords {
        &self.0
    }

    pub fn into_coords(self) -> Coords {
        self.0
    }

    /// `self + h * direction`, validated.
    pub fn step(&self, direction: &Coords, h: f64) -> Result<State> {
        debug_assert_eq!(self.layout(), direction.layout());
        let data = self
            .as_slice()
            .iter()
            .zip(direction.as_slice())
            .map(|(x, v)| x + h * v)
            .collect();
        State::from_vec(self.layout(), data)
    }

    /// Same state with coordinate `index` replaced by `value` (no validation
    /// beyond finiteness, used for finite differences).
    pub fn with_coordinate(&self, index: usize, value: f64) -> State {
        let mut c = self.0.clone();
        c.data[index] = value;
        State(c)
    }
}
