//! Domain model: points, sensor swarms, anchor grids, movement logs and the
//! a-total movement cost.

use std::fmt;
use std::ops::Index;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, exact_root, Scalar};

/// Location in `[0, y]^d`.
#[derive(Clone, PartialEq)]
pub struct Point<T> {
    coords: SmallVec<[T; 4]>,
}

impl<T: Scalar> Point<T> {
    pub fn new<I: IntoIterator<Item = T>>(coords: I) -> Self {
        Self {
            coords: coords.into_iter().collect(),
        }
    }

    pub fn origin(d: usize) -> Self {
        Self::new((0..d).map(|_| T::zero()))
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn set(&mut self, axis: usize, value: T) {
        self.coords[axis] = value;
    }

    pub fn scaled(&self, factor: &T) -> Self {
        Self::new(self.coords.iter().map(|c| c.clone() * factor.clone()))
    }

    pub fn to_f64(&self) -> Point<f64> {
        Point::new(self.coords.iter().map(Scalar::to_real))
    }

    pub fn convert<U: Scalar>(&self) -> Point<U> {
        Point::new(self.coords.iter().map(|c| U::from_real(c.to_real())))
    }

    /// Euclidean distance, evaluated in `f64` from exact coordinate differences.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        let mut nonzero = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a.clone() - b.clone()).to_real())
            .filter(|diff| *diff != 0.0);
        let Some(first) = nonzero.next() else {
            return 0.0;
        };
        match nonzero.next() {
            // Axis-parallel moves are the common case; keep them exact.
            None => first.abs(),
            Some(second) => {
                let rest: f64 = nonzero.map(|x| x * x).sum();
                (first * first + second * second + rest).sqrt()
            }
        }
    }

    /// Chebyshev distance, used by the L∞ sensing ranges.
    pub fn linf_distance(&self, other: &Self) -> T {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a.clone() - b.clone()).abs())
            .fold(T::zero(), |acc, x| if x > acc { x } else { acc })
    }
}

impl<T> Index<usize> for Point<T> {
    type Output = T;
    fn index(&self, axis: usize) -> &T {
        &self.coords[axis]
    }
}

impl<T: fmt::Debug> fmt::Debug for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords.iter()).finish()
    }
}

/// Sensors with identical L∞ sensing radius `r` in the cube `[0, y]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SensorSwarm<T> {
    dim: usize,
    side: T,
    radius: T,
    positions: Vec<Point<T>>,
}

impl<T: Scalar> SensorSwarm<T> {
    pub fn new(dim: usize, side: T, radius: T, positions: Vec<Point<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if !(side > T::zero()) || !side.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "side length must be positive, got {side:?}"
            )));
        }
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "sensing radius must be positive, got {radius:?}"
            )));
        }
        if positions.is_empty() {
            return Err(Error::InvalidArgument("swarm needs at least one sensor".into()));
        }
        for (i, p) in positions.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::InvalidArgument(format!(
                    "sensor {i} has {} coordinates, expected {dim}",
                    p.dim()
                )));
            }
            let inside = p
                .coords()
                .iter()
                .all(|c| c.is_finite() && *c >= T::zero() && *c <= side);
            if !inside {
                return Err(Error::InvalidArgument(format!(
                    "sensor {i} at {p:?} lies outside [0, {side:?}]^{dim}"
                )));
            }
        }
        Ok(Self {
            dim,
            side,
            radius,
            positions,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> &T {
        &self.side
    }

    pub fn radius(&self) -> &T {
        &self.radius
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Point<T>] {
        &self.positions
    }

    pub fn with_radius(mut self, radius: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::InvalidArgument("sensing radius must be positive".into()));
        }
        self.radius = radius;
        Ok(self)
    }

    /// Same sensors with every coordinate, the side and the radius multiplied
    /// by `factor`.
    pub fn scaled(&self, factor: &T) -> Result<Self> {
        Self::new(
            self.dim,
            self.side.clone() * factor.clone(),
            self.radius.clone() * factor.clone(),
            self.positions.iter().map(|p| p.scaled(factor)).collect(),
        )
    }

    /// Converts through `f64`; exact when widening into [`crate::Exact`].
    pub fn convert<U: Scalar>(&self) -> SensorSwarm<U> {
        SensorSwarm {
            dim: self.dim,
            side: U::from_real(self.side.to_real()),
            radius: U::from_real(self.radius.to_real()),
            positions: self.positions.iter().map(Point::convert).collect(),
        }
    }

    pub(crate) fn replace_positions(&self, positions: Vec<Point<T>>) -> Self {
        debug_assert_eq!(positions.len(), self.positions.len());
        Self {
            dim: self.dim,
            side: self.side.clone(),
            radius: self.radius.clone(),
            positions,
        }
    }
}

/// Smallest L∞ radius `y / (2 n^{1/d})` at which `n` sensors can cover
/// `[0, y]^d`; exact in `T` when `n` is a perfect `d`-th power.
pub fn critical_radius<T: Scalar>(n: usize, d: usize, side: &T) -> T {
    match exact_root(n, d) {
        Some(m) => side.clone() / T::from_count(2 * m),
        None => {
            let root = (n as f64).powf(1.0 / d as f64);
            T::from_real(side.to_real() / (2.0 * root))
        }
    }
}

/// Axis-aligned cube `origin + [0, side]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cube<T> {
    pub origin: Point<T>,
    pub side: T,
}

impl<T: Scalar> Cube<T> {
    pub fn at_origin(dim: usize, side: T) -> Self {
        Self {
            origin: Point::origin(dim),
            side,
        }
    }

    pub fn dim(&self) -> usize {
        self.origin.dim()
    }
}

/// The `m^d` equidistant anchor positions in `[0, y]^d`; the only placement
/// covering the cube at the critical radius `y / (2m)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnchorGrid<T> {
    pub dim: usize,
    pub side: T,
    pub per_axis: usize,
}

impl<T: Scalar> AnchorGrid<T> {
    pub fn new(dim: usize, side: T, per_axis: usize) -> Result<Self> {
        if dim == 0 || per_axis == 0 {
            return Err(Error::InvalidArgument(
                "anchor grid needs positive dimension and anchors per axis".into(),
            ));
        }
        if !(side > T::zero()) {
            return Err(Error::InvalidArgument("anchor grid side must be positive".into()));
        }
        Ok(Self {
            dim,
            side,
            per_axis,
        })
    }

    /// `y·l/m − y/(2m)` for a 1-based index `l`.
    pub fn coordinate(&self, l: usize) -> T {
        anchor_coordinate(&self.side, self.per_axis, l)
    }

    pub fn len(&self) -> usize {
        self.per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Every anchor, last axis varying fastest.
    pub fn anchors(&self) -> Vec<Point<T>> {
        let mut out = Vec::with_capacity(self.len());
        let mut index = vec![1usize; self.dim];
        loop {
            out.push(Point::new(index.iter().map(|&l| self.coordinate(l))));
            let mut axis = self.dim;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                if index[axis] < self.per_axis {
                    index[axis] += 1;
                    break;
                }
                index[axis] = 1;
            }
        }
    }
}

pub(crate) fn anchor_coordinate<T: Scalar>(side: &T, per_axis: usize, l: usize) -> T {
    side.clone() * T::from_count(l) / T::from_count(per_axis)
        - side.clone() / T::from_count(2 * per_axis)
}

/// Anchor for the 1-based multi-index `index` (one entry per axis).
pub fn anchor_position<T: Scalar>(grid: &AnchorGrid<T>, index: &[usize]) -> Result<Point<T>> {
    if index.len() != grid.dim {
        return Err(Error::InvalidArgument(format!(
            "anchor index has {} entries, grid dimension is {}",
            index.len(),
            grid.dim
        )));
    }
    for (axis, &l) in index.iter().enumerate() {
        if l == 0 || l > grid.per_axis {
            return Err(Error::IndexOutOfRange {
                axis,
                index: l,
                max: grid.per_axis,
            });
        }
    }
    Ok(Point::new(index.iter().map(|&l| grid.coordinate(l))))
}

/// One elementary straight-line move. `phase` is the 1-based axis the move
/// runs along for the displacement algorithms in this crate.
#[derive(Clone, Debug, PartialEq)]
pub struct Move<T> {
    pub phase: usize,
    pub from: Point<T>,
    pub to: Point<T>,
}

impl<T: Scalar> Move<T> {
    pub fn length(&self) -> f64 {
        self.from.l2_distance(&self.to)
    }
}

/// Initial position and ordered elementary moves of every sensor.
#[derive(Clone, Debug, PartialEq)]
pub struct MovementLog<T> {
    initial: Vec<Point<T>>,
    moves: Vec<Vec<Move<T>>>,
}

impl<T: Scalar> MovementLog<T> {
    /// Log with no moves yet.
    pub fn start(initial: Vec<Point<T>>) -> Self {
        let moves = vec![Vec::new(); initial.len()];
        Self { initial, moves }
    }

    /// Builds a log from raw parts without checking the chain; `cost_of_log`
    /// validates it.
    pub fn from_parts(initial: Vec<Point<T>>, moves: Vec<Vec<Move<T>>>) -> Result<Self> {
        if initial.len() != moves.len() {
            return Err(Error::InvalidArgument(format!(
                "{} initial positions but {} move lists",
                initial.len(),
                moves.len()
            )));
        }
        Ok(Self { initial, moves })
    }

    pub(crate) fn push(&mut self, sensor: usize, mv: Move<T>) {
        self.moves[sensor].push(mv);
    }

    pub fn sensors(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self, sensor: usize) -> &Point<T> {
        &self.initial[sensor]
    }

    pub fn moves(&self, sensor: usize) -> &[Move<T>] {
        &self.moves[sensor]
    }

    /// Position after the last move (or the initial one if never moved).
    pub fn final_position(&self, sensor: usize) -> &Point<T> {
        self.moves[sensor]
            .last()
            .map_or(&self.initial[sensor], |m| &m.to)
    }

    pub fn validate(&self) -> Result<()> {
        for (sensor, moves) in self.moves.iter().enumerate() {
            let mut at = &self.initial[sensor];
            for (step, mv) in moves.iter().enumerate() {
                if &mv.from != at {
                    return Err(Error::BrokenChain { sensor, step });
                }
                at = &mv.to;
            }
        }
        Ok(())
    }

    /// Total number of elementary moves.
    pub fn move_count(&self) -> usize {
        self.moves.iter().map(Vec::len).sum()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostMode {
    /// Sum of powered lengths of every elementary move.
    #[default]
    PerPhase,
    /// Powered straight-line distance from initial to final position.
    EndToEnd,
}

impl CostMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CostMode::PerPhase => "per-phase",
            CostMode::EndToEnd => "end-to-end",
        }
    }
}

impl std::str::FromStr for CostMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-phase" => Ok(CostMode::PerPhase),
            "end-to-end" => Ok(CostMode::EndToEnd),
            other => Err(Error::Parse(format!("unknown cost mode {other:?}"))),
        }
    }
}

/// The a-total movement `Σ d_i^a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostMetric {
    exponent: f64,
    pub mode: CostMode,
}

impl CostMetric {
    pub fn new(exponent: f64, mode: CostMode) -> Result<Self> {
        if !(exponent > 0.0) || !exponent.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cost exponent must be positive, got {exponent}"
            )));
        }
        Ok(Self { exponent, mode })
    }

    pub fn per_phase(exponent: f64) -> Result<Self> {
        Self::new(exponent, CostMode::PerPhase)
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    fn power(&self, length: f64) -> f64 {
        if length == 0.0 {
            0.0
        } else if self.exponent == 1.0 {
            length
        } else {
            length.powf(self.exponent)
        }
    }
}

/// a-total movement of a log under `metric`.
pub fn cost_of_log<T: Scalar>(log: &MovementLog<T>, metric: &CostMetric) -> Result<f64> {
    log.validate()?;
    let total = match metric.mode {
        CostMode::PerPhase => compensated_sum(
            log.moves
                .iter()
                .flatten()
                .map(|mv| metric.power(mv.length())),
        ),
        CostMode::EndToEnd => compensated_sum((0..log.sensors()).map(|i| {
            metric.power(log.initial(i).l2_distance(log.final_position(i)))
        })),
    };
    Ok(total)
}
