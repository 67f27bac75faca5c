use rand::Rng;

use super::mv::{mvd_general, nth_root, Mover};
use super::Displacement;
use crate::error::{Error, Result};
use crate::geometry::{Cube, Point, SensorSwarm};
use crate::placement::select_prefix;
use crate::scalar::{floor_real_root, Scalar};

/// Smallest radius factor `3^{3/d} / (3^{1/d} − 1)²` for which the subcube
/// algorithm is guaranteed to cover the unit cube.
pub fn radius_factor_threshold(d: usize) -> f64 {
    let t = 3f64.powf(1.0 / d as f64);
    3f64.powf(3.0 / d as f64) / ((t - 1.0) * (t - 1.0))
}

/// Constants of the subcube algorithm for exponent `a` in dimension `d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LvParams {
    pub exponent: f64,
    pub dim: usize,
    /// Sensing radius is `radius_factor / (2 n^{1/d})`.
    pub radius_factor: f64,
    /// `(9/4)(2 + a/d)`: subcubes per axis are `⌊(n / (p ln n))^{1/d}⌋`.
    pub partition_coeff: f64,
    /// `(3/4)(2 + a/d)`: each subcube moves `⌊(A ln n)^{1/d}⌋^d` sensors.
    pub selection_coeff: f64,
    /// Larger root of `x = 3 p ln x`; the algorithm needs `n ≥ ⌈x0⌉`.
    pub min_n_root: f64,
}

impl LvParams {
    pub fn new(exponent: f64, dim: usize, radius_factor: f64) -> Result<Self> {
        if !(exponent > 0.0) || !exponent.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "exponent must be positive, got {exponent}"
            )));
        }
        if dim < 2 {
            return Err(Error::Precondition(format!(
                "subcube algorithm needs d >= 2, got {dim}"
            )));
        }
        let threshold = radius_factor_threshold(dim);
        if !(radius_factor >= threshold) {
            return Err(Error::Precondition(format!(
                "radius factor f = {radius_factor} below 3^(3/d)/(3^(1/d)-1)^2 = {threshold}"
            )));
        }
        let selection_coeff = 0.75 * (2.0 + exponent / dim as f64);
        let partition_coeff = 3.0 * selection_coeff;
        let min_n_root = solve_min_n_root(partition_coeff)?;
        Ok(Self {
            exponent,
            dim,
            radius_factor,
            partition_coeff,
            selection_coeff,
            min_n_root,
        })
    }

    /// Parameters at the threshold radius factor.
    pub fn at_threshold(exponent: f64, dim: usize) -> Result<Self> {
        Self::new(exponent, dim, radius_factor_threshold(dim))
    }

    pub fn min_sensors(&self) -> usize {
        self.min_n_root.ceil() as usize
    }

    /// Subcubes per axis for `n` sensors.
    pub fn cells_per_axis(&self, n: usize) -> usize {
        let nf = n as f64;
        floor_real_root(nf / (self.partition_coeff * nf.ln()), self.dim)
    }

    /// Anchors per axis inside each subcube.
    pub fn selected_per_axis(&self, n: usize) -> usize {
        floor_real_root(self.selection_coeff * (n as f64).ln(), self.dim)
    }

    /// `radius_factor / (2 n^{1/d})`.
    pub fn radius(&self, n: usize) -> f64 {
        self.radius_factor / (2.0 * nth_root(n, self.dim))
    }
}

/// Bisection for the root of `x − 3p ln x` above its minimum at `x = 3p`,
/// bracketed in `[max(3, 3p), 10⁶]`, to relative width `10⁻¹²`.
fn solve_min_n_root(partition_coeff: f64) -> Result<f64> {
    let g = |x: f64| x - 3.0 * partition_coeff * x.ln();
    let mut lo = (3.0 * partition_coeff).max(3.0);
    let mut hi = 1.0e6;
    if !(g(lo) <= 0.0 && g(hi) > 0.0) {
        return Err(Error::RootSolve(format!(
            "x - 3p ln x has no sign change on [{lo}, {hi}] for p = {partition_coeff}"
        )));
    }
    while hi - lo > 1e-12 * lo {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Assignment of sensors to the `c^d` half-open subcubes of the unit cube
/// (the last cell on each axis is closed). Cells are numbered with axis 0
/// most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubcubePartition {
    pub cells_per_axis: usize,
    pub dim: usize,
    pub cell_of: Vec<usize>,
    pub counts: Vec<usize>,
}

impl SubcubePartition {
    pub fn build<T: Scalar>(swarm: &SensorSwarm<T>, cells_per_axis: usize) -> Self {
        let dim = swarm.dim();
        let c = cells_per_axis;
        let mut counts = vec![0usize; c.pow(dim as u32)];
        let cell_of = swarm
            .positions()
            .iter()
            .map(|p| {
                let idx = p
                    .coords()
                    .iter()
                    .fold(0usize, |acc, x| acc * c + cell_index(x, c));
                counts[idx] += 1;
                idx
            })
            .collect();
        Self {
            cells_per_axis,
            dim,
            cell_of,
            counts,
        }
    }

    pub fn cells(&self) -> usize {
        self.counts.len()
    }

    /// Per-axis indices of cell `idx`.
    pub fn cell_coords(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for slot in out.iter_mut().rev() {
            *slot = idx % self.cells_per_axis;
            idx /= self.cells_per_axis;
        }
        out
    }

    /// Lower corner and side of cell `idx`.
    pub fn cube<T: Scalar>(&self, idx: usize) -> Cube<T> {
        let c = T::from_count(self.cells_per_axis);
        Cube {
            origin: Point::new(
                self.cell_coords(idx)
                    .into_iter()
                    .map(|l| T::from_count(l) / c.clone()),
            ),
            side: T::one() / c,
        }
    }

    /// Sensor indices grouped by cell, ascending within each cell.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.counts.iter().map(|&k| Vec::with_capacity(k)).collect();
        for (sensor, &cell) in self.cell_of.iter().enumerate() {
            out[cell].push(sensor);
        }
        out
    }

    /// True when some cell holds fewer than `n / (3 c^d)` sensors.
    pub fn has_sparse_cell(&self, n: usize) -> bool {
        let cells = self.cells() as u128;
        self.counts.iter().any(|&k| 3 * k as u128 * cells < n as u128)
    }
}

/// `l` with `l/c ≤ x < (l+1)/c`, clamped to the last cell; evaluated with the
/// same arithmetic as the cell origins so membership is exact.
fn cell_index<T: Scalar>(x: &T, c: usize) -> usize {
    let ct = T::from_count(c);
    let guess = (x.clone() * ct.clone()).floor().to_real();
    let mut l = if guess > 0.0 { (guess as usize).min(c - 1) } else { 0 };
    while l > 0 && *x < T::from_count(l) / ct.clone() {
        l -= 1;
    }
    while l + 1 < c && *x >= T::from_count(l + 1) / ct.clone() {
        l += 1;
    }
    l
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LvBranch {
    /// Some subcube was under-occupied; the whole cube was covered with
    /// `⌊n^{1/d}⌋^d` randomly chosen sensors.
    Fallback,
    /// Every subcube was covered locally.
    PerSubcube,
}

impl LvBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            LvBranch::Fallback => "fallback",
            LvBranch::PerSubcube => "per-subcube",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LvOutcome<T> {
    pub displacement: Displacement<T>,
    pub branch: LvBranch,
    pub partition: SubcubePartition,
}

/// Subcube displacement on the unit cube. Splits `[0,1]^d` into `c^d`
/// subcubes; if every subcube holds at least `n/(3c^d)` sensors, each one is
/// covered by running the grid algorithm on `⌊(A ln n)^{1/d}⌋^d` of its own
/// sensors, otherwise the whole cube is covered with `⌊n^{1/d}⌋^d` sensors.
/// Unselected sensors never move. The returned swarm carries radius
/// `f / (2 n^{1/d})`.
pub fn lvd<T: Scalar, R: Rng + ?Sized>(
    swarm: &SensorSwarm<T>,
    params: &LvParams,
    rng: &mut R,
) -> Result<LvOutcome<T>> {
    let n = swarm.len();
    let d = swarm.dim();
    if d != params.dim {
        return Err(Error::InvalidArgument(format!(
            "swarm dimension {d} does not match parameters for d = {}",
            params.dim
        )));
    }
    if *swarm.side() != T::one() {
        return Err(Error::Precondition("subcube algorithm runs on the unit cube (y = 1)".into()));
    }
    if n < params.min_sensors() {
        return Err(Error::Precondition(format!(
            "subcube algorithm needs n >= ceil(x0) = {} (x0 = {}), got n = {n}",
            params.min_sensors(),
            params.min_n_root
        )));
    }

    let c = params.cells_per_axis(n);
    assert!(c >= 1, "n >= ceil(x0) guarantees at least one subcube");
    let partition = SubcubePartition::build(swarm, c);

    if partition.has_sparse_cell(n) {
        let displacement = mvd_general(swarm, params.radius_factor, rng)?;
        return Ok(LvOutcome {
            displacement,
            branch: LvBranch::Fallback,
            partition,
        });
    }

    let per_axis = params.selected_per_axis(n);
    let chosen = per_axis.pow(d as u32);
    let mut mover = Mover::new(swarm);
    for (cell, mut members) in partition.members().into_iter().enumerate() {
        assert!(
            members.len() >= chosen,
            "occupancy test passed but cell {cell} holds {} < {chosen} sensors",
            members.len()
        );
        select_prefix(&mut members, chosen, rng);
        let cube = partition.cube::<T>(cell);
        mover.snap(&mut members[..chosen], &cube, per_axis, 0);
    }
    let displacement = mover.finish(swarm, T::from_real(params.radius(n)))?;
    Ok(LvOutcome {
        displacement,
        branch: LvBranch::PerSubcube,
        partition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{cost_of_log, CostMetric};
    use crate::placement::{place_uniform, SeedSpec, Stream};
    use crate::scalar::{ratio, Exact};

    #[test]
    fn constants_for_square_quadratic_cost() {
        let p = LvParams::at_threshold(2.0, 2).unwrap();
        assert_eq!(p.partition_coeff, 27.0 / 4.0);
        assert_eq!(p.selection_coeff, 9.0 / 4.0);
        assert_eq!(p.partition_coeff, 3.0 * p.selection_coeff);
        let x0 = p.min_n_root;
        assert!((x0 - 81.0 / 4.0 * x0.ln()).abs() <= 1e-9 * x0);
        assert!(x0 >= 3.0);
        assert!((x0 / (p.partition_coeff * x0.ln()) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn threshold_in_two_dimensions() {
        let s3 = 3f64.sqrt();
        let expected = 3.0 * s3 / (4.0 - 2.0 * s3);
        assert!((radius_factor_threshold(2) - expected).abs() < 1e-12);
        assert!((radius_factor_threshold(2) - 9.6962).abs() < 1e-4);
    }

    #[test]
    fn x0_root_is_accurate_across_parameters() {
        for d in 2..=5 {
            for a in [0.5, 1.0, 2.0, 3.0, 8.0] {
                let p = LvParams::at_threshold(a, d).unwrap();
                let x0 = p.min_n_root;
                assert!(x0 >= 3.0);
                assert!((x0 - 3.0 * p.partition_coeff * x0.ln()).abs() <= 1e-9 * x0);
            }
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(LvParams::new(2.0, 1, 100.0).is_err());
        assert!(LvParams::new(0.0, 2, 100.0).is_err());
        assert!(LvParams::new(2.0, 2, 9.0).is_err());
    }

    #[test]
    fn too_few_sensors_is_a_precondition_error() {
        let p = LvParams::at_threshold(2.0, 2).unwrap();
        let s = place_uniform(10, 2, 1.0, SeedSpec::new(1, 1)).unwrap();
        let mut rng = SeedSpec::new(1, 1).rng(Stream::Selection);
        let err = lvd(&s, &p, &mut rng).unwrap_err();
        assert!(err.to_string().contains("ceil(x0)"));
    }

    #[test]
    fn clustered_placement_falls_back() {
        let p = LvParams::at_threshold(2.0, 2).unwrap();
        let n = 400;
        let pts = (0..n)
            .map(|i| Point::new([0.001 * (i % 20) as f64, 0.001 * (i / 20) as f64]))
            .collect();
        let s = SensorSwarm::new(2, 1.0, 0.1, pts).unwrap();
        let mut rng = SeedSpec::new(0, 0).rng(Stream::Selection);
        let out = lvd(&s, &p, &mut rng).unwrap();
        assert_eq!(out.branch, LvBranch::Fallback);
        let moved = (0..n).filter(|&i| !out.displacement.log.moves(i).is_empty()).count();
        assert_eq!(moved, 400);
    }

    #[test]
    fn per_subcube_moves_stay_inside_their_cell() {
        let p = LvParams::at_threshold(2.0, 2).unwrap();
        let n = 4096;
        let s = place_uniform(n, 2, 1.0, SeedSpec::new(12, 0)).unwrap();
        let mut rng = SeedSpec::new(12, 0).rng(Stream::Selection);
        let out = lvd(&s, &p, &mut rng).unwrap();
        assert_eq!(out.branch, LvBranch::PerSubcube);
        let c = out.partition.cells_per_axis;
        assert_eq!(c, 8);
        assert_eq!(p.selected_per_axis(n), 4);
        let moved = (0..n).filter(|&i| !out.displacement.log.moves(i).is_empty()).count();
        assert_eq!(moved, 64 * 16);
        let bound = 2f64.sqrt() / c as f64;
        for i in 0..n {
            let start = out.displacement.log.initial(i);
            let end = out.displacement.log.final_position(i);
            assert!(start.l2_distance(end) <= bound);
        }
        let cost = cost_of_log(&out.displacement.log, &CostMetric::per_phase(2.0).unwrap()).unwrap();
        assert!(cost > 0.0);
    }

    #[test]
    fn partition_boundaries_are_half_open() {
        let pts: Vec<Point<Exact>> = [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)]
            .iter()
            .map(|&(a, b)| Point::new([ratio(a, b), ratio(0, 1)]))
            .collect();
        let s = SensorSwarm::new(2, ratio(1, 1), ratio(1, 8), pts).unwrap();
        let part = SubcubePartition::build(&s, 4);
        let first_axis: Vec<usize> = part.cell_of.iter().map(|&i| part.cell_coords(i)[0]).collect();
        assert_eq!(first_axis, [0, 1, 2, 3, 3]);
        assert_eq!(part.counts.iter().sum::<usize>(), 5);
    }

    #[test]
    fn partition_cells_contain_their_members() {
        let s = place_uniform(2000, 3, 1.0, SeedSpec::new(77, 0)).unwrap();
        let part = SubcubePartition::build(&s, 7);
        assert_eq!(part.cells(), 343);
        for (sensor, &cell) in part.cell_of.iter().enumerate() {
            let cube = part.cube::<f64>(cell);
            for (axis, &l) in part.cell_coords(cell).iter().enumerate() {
                let x = s.positions()[sensor][axis];
                assert!(x >= cube.origin[axis]);
                assert!(l + 1 == 7 || x < (l + 1) as f64 / 7.0);
            }
        }
    }
}
