//! Exact and sampled verification that the union of closed L∞ sensing cubes
//! covers `[0, y]^d`.
//!
//! A sensor at `x` covers the closed box `Π_k [x_k − r, x_k + r]`. Coverage
//! of a finite union of closed boxes is constant on every open cell of the
//! arrangement cut out by the box faces, and a cell's closure is covered
//! whenever its interior is, so testing one interior point per cell decides
//! coverage exactly; gaps that live only on a boundary cannot occur.
//!
//! [`verify_exact`] sweeps the cells axis by axis: on axis `k` it cuts the
//! still-active sensors' intervals into slabs, keeps the sensors whose
//! interval contains the slab midpoint and recurses on axis `k + 1`; on the
//! last axis the sorted intervals are scanned for a gap. A slab is skipped
//! when no interval closes at its left edge and the previous slab was
//! covered, because its active set is then a superset.
//!
//! Interval endpoints `x ± r` are evaluated in `T`. Over [`crate::Exact`]
//! this is the mathematical predicate `‖p − x‖∞ ≤ r`. In floating point the
//! rounded endpoints define coverage, and a cell whose open interior holds no
//! representable midpoint is treated as empty.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{Point, SensorSwarm};
use crate::placement::{unit_f64, SeedSpec, Stream};
use crate::scalar::Scalar;

/// `(2n + 1)^d` limit above which the exact check refuses to run for `d > 3`.
pub const EXACT_CELL_LIMIT: f64 = 1e8;

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageReport<T> {
    pub covered: bool,
    /// An uncovered point; present exactly when `covered` is false.
    pub witness: Option<Point<T>>,
    /// Leaf cells (exact) or sample points (sampled) examined.
    pub cells_checked: u64,
}

/// True when some sensor's closed box contains `point`.
pub fn covers_point<T: Scalar>(swarm: &SensorSwarm<T>, point: &Point<T>) -> bool {
    let r = swarm.radius();
    swarm.positions().iter().any(|x| {
        x.coords()
            .iter()
            .zip(point.coords())
            .all(|(c, p)| c.clone() - r.clone() <= *p && *p <= c.clone() + r.clone())
    })
}

struct Sweep<'a, T> {
    swarm: &'a SensorSwarm<T>,
    /// Per sensor, per axis: unclipped `[x − r, x + r]`.
    lo: Vec<Vec<T>>,
    hi: Vec<Vec<T>>,
    prefix: Vec<T>,
    cells: u64,
}

impl<T: Scalar> Sweep<'_, T> {
    fn sort_by_axis(&self, ids: &mut [usize], axis: usize) {
        let pos = self.swarm.positions();
        ids.sort_unstable_by(|&a, &b| pos[a][axis].total_cmp(&pos[b][axis]).then(a.cmp(&b)));
    }

    fn witness(&self, coord: T) -> Point<T> {
        let half = self.swarm.side().clone() / T::from_count(2);
        let mut coords = self.prefix.clone();
        coords.push(coord);
        while coords.len() < self.swarm.dim() {
            coords.push(half.clone());
        }
        Point::new(coords)
    }

    /// `active` is sorted by coordinate `axis`.
    fn run(&mut self, axis: usize, active: &[usize]) -> Option<Point<T>> {
        let side = self.swarm.side().clone();
        let zero = T::zero();
        if axis + 1 == self.swarm.dim() {
            self.cells += 1;
            // `reach` is the right end of the covered prefix [0, reach].
            let mut reach = zero;
            for &id in active {
                let lo = &self.lo[id][axis];
                if *lo > reach {
                    let mid = reach.midpoint(lo);
                    if mid > reach && mid < *lo {
                        return Some(self.witness(mid));
                    }
                }
                let hi = &self.hi[id][axis];
                if *hi > reach {
                    reach = hi.clone();
                }
                if reach >= side {
                    return None;
                }
            }
            let mid = reach.midpoint(&side);
            return (mid > reach && mid < side).then(|| self.witness(mid));
        }

        let clip = |v: &T| {
            if *v < T::zero() {
                T::zero()
            } else if *v > side {
                side.clone()
            } else {
                v.clone()
            }
        };
        let mut cuts: Vec<T> = Vec::with_capacity(2 * active.len() + 2);
        let mut closes: Vec<T> = Vec::with_capacity(active.len());
        cuts.push(T::zero());
        cuts.push(side.clone());
        for &id in active {
            cuts.push(clip(&self.lo[id][axis]));
            let hi = clip(&self.hi[id][axis]);
            cuts.push(hi.clone());
            closes.push(hi);
        }
        cuts.sort_unstable_by(T::total_cmp);
        cuts.dedup();
        closes.sort_unstable_by(T::total_cmp);

        let mut previous_covered = false;
        let mut scratch: Vec<usize> = Vec::new();
        for pair in cuts.windows(2) {
            let (left, right) = (&pair[0], &pair[1]);
            let mid = left.midpoint(right);
            if !(mid > *left && mid < *right) {
                previous_covered = false;
                continue;
            }
            let closes_here = closes.binary_search_by(|c| c.total_cmp(left)).is_ok();
            if previous_covered && !closes_here {
                continue;
            }
            // Both interval ends are monotone in the sorted coordinate, so
            // the sensors containing `mid` form a contiguous run.
            let start = active.partition_point(|&id| self.hi[id][axis] < mid);
            let end = active.partition_point(|&id| self.lo[id][axis] <= mid);
            let run = if start < end { &active[start..end] } else { &[][..] };
            if run.is_empty() {
                return Some(self.witness(mid));
            }
            scratch.clear();
            scratch.extend_from_slice(run);
            self.sort_by_axis(&mut scratch, axis + 1);
            self.prefix.push(mid.clone());
            let sub = std::mem::take(&mut scratch);
            let found = self.run(axis + 1, &sub);
            scratch = sub;
            self.prefix.pop();
            if found.is_some() {
                return found;
            }
            previous_covered = true;
        }
        None
    }
}

/// Exact coverage decision (see the module docs). Refuses with
/// [`Error::TooLarge`] when `d > 3` and `(2n + 1)^d` exceeds
/// [`EXACT_CELL_LIMIT`].
pub fn verify_exact<T: Scalar>(swarm: &SensorSwarm<T>) -> Result<CoverageReport<T>> {
    let d = swarm.dim();
    let n = swarm.len();
    let cells = (2.0 * n as f64 + 1.0).powi(d as i32);
    if d > 3 && cells > EXACT_CELL_LIMIT {
        return Err(Error::TooLarge { cells });
    }
    let r = swarm.radius();
    let lo = swarm
        .positions()
        .iter()
        .map(|p| p.coords().iter().map(|c| c.clone() - r.clone()).collect())
        .collect();
    let hi = swarm
        .positions()
        .iter()
        .map(|p| p.coords().iter().map(|c| c.clone() + r.clone()).collect())
        .collect();
    let mut sweep = Sweep {
        swarm,
        lo,
        hi,
        prefix: Vec::with_capacity(d),
        cells: 0,
    };
    let mut ids: Vec<usize> = (0..n).collect();
    sweep.sort_by_axis(&mut ids, 0);
    let witness = sweep.run(0, &ids);
    Ok(CoverageReport {
        covered: witness.is_none(),
        witness,
        cells_checked: sweep.cells,
    })
}

/// Tests `samples` uniform points; `covered == true` only means no
/// counterexample was found.
pub fn verify_sampled<T: Scalar>(
    swarm: &SensorSwarm<T>,
    samples: usize,
    seed: SeedSpec,
) -> Result<CoverageReport<T>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let mut rng = seed.rng(Stream::Sampling);
    Ok(sample_with(swarm, samples, &mut rng))
}

fn sample_with<T: Scalar, R: Rng>(swarm: &SensorSwarm<T>, samples: usize, rng: &mut R) -> CoverageReport<T> {
    let side = swarm.side();
    for k in 0..samples {
        let p = Point::new((0..swarm.dim()).map(|_| side.clone() * T::from_real(unit_f64(rng))));
        if !covers_point(swarm, &p) {
            return CoverageReport {
                covered: false,
                witness: Some(p),
                cells_checked: k as u64 + 1,
            };
        }
    }
    CoverageReport {
        covered: true,
        witness: None,
        cells_checked: samples as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::mvd;
    use crate::placement::place_uniform;
    use crate::scalar::{ratio, Exact};

    #[test]
    fn single_central_sensor_covers_everything() {
        for d in 1..=4 {
            let s = SensorSwarm::new(d, 2.0, 1.0, vec![Point::new(vec![1.0; d])]).unwrap();
            let rep = verify_exact(&s).unwrap();
            assert!(rep.covered, "d = {d}");
            assert!(rep.witness.is_none());
        }
    }

    #[test]
    fn anchors_tile_exactly_and_shrinking_opens_a_gap() {
        for (d, m) in [(1usize, 5usize), (2, 3), (3, 4)] {
            let n = m.pow(d as u32);
            let s = place_uniform::<Exact>(n, d, ratio(1, 1), SeedSpec::new(21, d as u64)).unwrap();
            let out = mvd(&s).unwrap();
            assert!(verify_exact(&out.swarm).unwrap().covered);

            let shrunk = out
                .swarm
                .clone()
                .with_radius(ratio(1, 2 * m as i64) - ratio(1, 1_000_000))
                .unwrap();
            let rep = verify_exact(&shrunk).unwrap();
            assert!(!rep.covered);
            let w = rep.witness.unwrap();
            assert!(!covers_point(&shrunk, &w));
            let nearest = shrunk
                .positions()
                .iter()
                .map(|x| x.linf_distance(&w))
                .min()
                .unwrap();
            assert!(nearest > *shrunk.radius());
            // The first gap sits against the lower faces of the cube.
            assert!(w[0] < ratio(1, 1_000_000));
        }
    }

    #[test]
    fn corner_gap_is_found() {
        let pts = vec![
            Point::new([0.75, 0.25]),
            Point::new([0.25, 0.75]),
            Point::new([0.75, 0.75]),
        ];
        let s = SensorSwarm::new(2, 1.0, 0.25, pts).unwrap();
        let rep = verify_exact(&s).unwrap();
        assert!(!rep.covered);
        let w = rep.witness.unwrap();
        assert!(w[0] < 0.5 && w[1] < 0.5);
        assert!(!covers_point(&s, &w));
    }

    #[test]
    fn touching_closed_boxes_cover() {
        let pts = vec![Point::new([ratio(1, 4)]), Point::new([ratio(3, 4)])];
        let s = SensorSwarm::new(1, ratio(1, 1), ratio(1, 4), pts).unwrap();
        assert!(verify_exact(&s).unwrap().covered);
    }

    #[test]
    fn size_guard_only_above_three_dimensions() {
        let s = place_uniform(200, 4, 1.0, SeedSpec::new(1, 0)).unwrap();
        assert!(matches!(verify_exact(&s), Err(Error::TooLarge { .. })));
        let s = place_uniform(40, 4, 1.0, SeedSpec::new(1, 0)).unwrap();
        assert!(verify_exact(&s).is_ok());
    }

    #[test]
    fn sampled_rejects_zero_samples() {
        let s = SensorSwarm::new(1, 1.0, 0.5, vec![Point::new([0.5])]).unwrap();
        assert!(verify_sampled(&s, 0, SeedSpec::new(0, 0)).is_err());
        let rep = verify_sampled(&s, 100, SeedSpec::new(0, 0)).unwrap();
        assert!(rep.covered);
        assert_eq!(rep.cells_checked, 100);
    }
}
