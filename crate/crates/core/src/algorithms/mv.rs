use rand::Rng;

use super::Displacement;
use crate::error::{Error, Result};
use crate::geometry::{anchor_coordinate, cost_of_log, CostMetric, Cube, Move, MovementLog, Point, SensorSwarm};
use crate::placement::select_prefix;
use crate::scalar::{exact_root, floor_int_root, Scalar};

/// Mutable working state shared by the grid-snapping algorithms.
pub(super) struct Mover<T> {
    positions: Vec<Point<T>>,
    log: MovementLog<T>,
}

impl<T: Scalar> Mover<T> {
    pub(super) fn new(swarm: &SensorSwarm<T>) -> Self {
        let positions = swarm.positions().to_vec();
        Self {
            log: MovementLog::start(positions.clone()),
            positions,
        }
    }

    fn move_along(&mut self, sensor: usize, axis: usize, target: T) {
        let from = self.positions[sensor].clone();
        self.positions[sensor].set(axis, target);
        self.log.push(
            sensor,
            Move {
                phase: axis + 1,
                from,
                to: self.positions[sensor].clone(),
            },
        );
    }

    /// Sorts `ids` by coordinate `axis` (ties by sensor index), splits them
    /// into `m` equal rank blocks, moves block `j` onto the `j`-th anchor
    /// slab of `cube` along `axis`, and recurses into each block on the next
    /// axis. `ids.len()` must be `m^(d - axis)`.
    pub(super) fn snap(&mut self, ids: &mut [usize], cube: &Cube<T>, m: usize, axis: usize) {
        let positions = &self.positions;
        ids.sort_unstable_by(|&a, &b| {
            positions[a][axis]
                .total_cmp(&positions[b][axis])
                .then(a.cmp(&b))
        });
        let block = ids.len() / m;
        debug_assert_eq!(block * m, ids.len());
        for (j, chunk) in ids.chunks_mut(block).enumerate() {
            let target = cube.origin[axis].clone() + anchor_coordinate(&cube.side, m, j + 1);
            for &sensor in chunk.iter() {
                self.move_along(sensor, axis, target.clone());
            }
            if axis + 1 < cube.dim() {
                self.snap(chunk, cube, m, axis + 1);
            }
        }
    }

    pub(super) fn finish(self, template: &SensorSwarm<T>, radius: T) -> Result<Displacement<T>> {
        let swarm = template.replace_positions(self.positions).with_radius(radius)?;
        Ok(Displacement { swarm, log: self.log })
    }
}

/// One-dimensional displacement: the sensor of sorted rank `i` moves to
/// `y·i/n − y/(2n)`.
pub fn mv1<T: Scalar>(swarm: &SensorSwarm<T>) -> Result<Displacement<T>> {
    if swarm.dim() != 1 {
        return Err(Error::Precondition(format!(
            "mv1 needs a one-dimensional swarm, got d = {}",
            swarm.dim()
        )));
    }
    let n = swarm.len();
    let cube = Cube::at_origin(1, swarm.side().clone());
    let mut mover = Mover::new(swarm);
    let mut ids: Vec<usize> = (0..n).collect();
    mover.snap(&mut ids, &cube, n, 0);
    mover.finish(swarm, swarm.side().clone() / T::from_count(2 * n))
}

/// Recursive `d`-dimensional displacement for `n = m^d` sensors: sort by the
/// first coordinate, move each block of `m^(d-1)` sensors onto its anchor
/// slab, then repeat inside every block on the remaining coordinates. The
/// final positions are exactly the `m^d` anchors.
pub fn mvd<T: Scalar>(swarm: &SensorSwarm<T>) -> Result<Displacement<T>> {
    let d = swarm.dim();
    if d == 1 {
        return mv1(swarm);
    }
    let n = swarm.len();
    let m = exact_root(n, d).ok_or_else(|| {
        Error::Precondition(format!(
            "mvd needs n to be a perfect {d}-th power, got n = {n} (use mvd_general)"
        ))
    })?;
    let cube = Cube::at_origin(d, swarm.side().clone());
    let mut mover = Mover::new(swarm);
    let mut ids: Vec<usize> = (0..n).collect();
    mover.snap(&mut ids, &cube, m, 0);
    mover.finish(swarm, swarm.side().clone() / T::from_count(2 * m))
}

/// `n^{1/d}` with `sqrt`/`cbrt` for the common dimensions so that callers
/// computing radii the same way get bit-identical values.
pub fn nth_root(n: usize, d: usize) -> f64 {
    let x = n as f64;
    match d {
        1 => x,
        2 => x.sqrt(),
        3 => x.cbrt(),
        _ => x.powf(1.0 / d as f64),
    }
}

/// Smallest radius factor `f` for which `⌊n^{1/d}⌋^d` sensors at radius
/// `f·y/(2 n^{1/d})` can cover the cube.
pub fn min_radius_factor(n: usize, d: usize) -> f64 {
    nth_root(n, d) / floor_int_root(n, d) as f64
}

/// Displacement for arbitrary `n`: pick `⌊n^{1/d}⌋^d` sensors uniformly at
/// random and run [`mvd`] on them; the rest stay put. The returned swarm
/// carries radius `f·y/(2 n^{1/d})`.
pub fn mvd_general<T: Scalar, R: Rng + ?Sized>(
    swarm: &SensorSwarm<T>,
    radius_factor: f64,
    rng: &mut R,
) -> Result<Displacement<T>> {
    let n = swarm.len();
    let d = swarm.dim();
    let needed = min_radius_factor(n, d);
    if !(radius_factor >= needed) {
        return Err(Error::Precondition(format!(
            "radius factor f = {radius_factor} below n^(1/d)/floor(n^(1/d)) = {needed}"
        )));
    }
    let m = floor_int_root(n, d);
    let chosen = m.pow(d as u32);
    let mut ids: Vec<usize> = (0..n).collect();
    if chosen < n {
        select_prefix(&mut ids, chosen, rng);
    }
    let cube = Cube::at_origin(d, swarm.side().clone());
    let mut mover = Mover::new(swarm);
    mover.snap(&mut ids[..chosen], &cube, m, 0);
    let radius = T::from_real(radius_factor * swarm.side().to_real() / (2.0 * nth_root(n, d)));
    mover.finish(swarm, radius)
}

/// Costs of [`mvd`] on a unit-side swarm and on the same swarm scaled to
/// side `y`. Every move scales linearly, so `ratio == y^a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingCheck {
    pub cost_scaled: f64,
    pub cost_unit: f64,
    pub ratio: f64,
}

pub fn scaling_check<T: Scalar>(unit: &SensorSwarm<T>, side: &T, exponent: f64) -> Result<ScalingCheck> {
    if *unit.side() != T::one() {
        return Err(Error::Precondition("scaling_check needs a unit-side swarm".into()));
    }
    let metric = CostMetric::per_phase(exponent)?;
    let cost_unit = cost_of_log(&mvd(unit)?.log, &metric)?;
    let cost_scaled = cost_of_log(&mvd(&unit.scaled(side)?)?.log, &metric)?;
    Ok(ScalingCheck {
        cost_scaled,
        cost_unit,
        ratio: cost_scaled / cost_unit,
    })
}
