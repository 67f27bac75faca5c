//! Expected displacement of uniform order statistics to fixed anchors.
//!
//! The `i`-th smallest of `n` uniforms on `[0, 1]` is `Beta(i, n − i + 1)`
//! with density `i·C(n, i)·x^{i−1}(1 − x)^{n−i}`. Densities are evaluated in
//! log space so that `n` in the thousands does not overflow.

use rayon::prelude::*;

use super::quadrature::{integrate, QuadratureConfig};
use super::special::ln_gamma;
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, exact_root};

/// Rank `rank` (1-based) among `n` uniform samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderStatSpec {
    pub n: usize,
    pub rank: usize,
}

impl OrderStatSpec {
    pub fn new(n: usize, rank: usize) -> Result<Self> {
        if n == 0 || rank == 0 || rank > n {
            return Err(Error::InvalidArgument(format!(
                "order statistic rank {rank} out of 1..={n}"
            )));
        }
        Ok(Self { n, rank })
    }

    /// `ln(i·C(n, i)) = ln n! − ln (i−1)! − ln (n−i)!`.
    fn ln_norm(&self) -> f64 {
        ln_gamma((self.n + 1) as f64) - ln_gamma(self.rank as f64) - ln_gamma((self.n - self.rank + 1) as f64)
    }

    fn ln_kernel(&self, x: f64) -> f64 {
        xlogy((self.rank - 1) as f64, x) + xlogy((self.n - self.rank) as f64, 1.0 - x)
    }

    pub fn density(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        (self.ln_norm() + self.ln_kernel(x)).exp()
    }

    /// Sorted cut points: the ends of `[0, 1]`, the optional `extra` point,
    /// and for larger `n` a bracket of half-width `20/√n` around the mode.
    fn breakpoints(&self, extra: Option<f64>) -> Vec<f64> {
        let mut cuts = vec![0.0, 1.0];
        if self.n >= 64 {
            let center = self.rank as f64 / self.n as f64;
            let half = 20.0 / (self.n as f64).sqrt();
            cuts.push((center - half).max(0.0));
            cuts.push((center + half).min(1.0));
        }
        cuts.extend(extra);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts
    }
}

/// `x · ln y` with `0 · ln 0 = 0`.
fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

fn check_exponent(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("exponent must be positive, got {a}")))
    }
}

/// Total mass of the density, by the same quadrature as the cost integrals.
pub fn density_mass(spec: OrderStatSpec, q: &QuadratureConfig) -> Result<f64> {
    let ln_norm = spec.ln_norm();
    integrate(|x| (ln_norm + spec.ln_kernel(x)).exp(), &spec.breakpoints(None), q)
}

/// `E|X_(i) − anchor|^a`.
pub fn expected_anchor_cost(spec: OrderStatSpec, anchor: f64, a: f64, q: &QuadratureConfig) -> Result<f64> {
    check_exponent(a)?;
    if !(0.0..=1.0).contains(&anchor) {
        return Err(Error::InvalidArgument(format!("anchor {anchor} outside [0, 1]")));
    }
    let ln_norm = spec.ln_norm();
    let integrand = |x: f64| (ln_norm + xlogy(a, (x - anchor).abs()) + spec.ln_kernel(x)).exp();
    let breaks = spec.breakpoints(q.kink_split.then_some(anchor));
    integrate(integrand, &breaks, q)
}

/// Anchor of the `j`-th (1-based) of `m` equal cells of `[0, 1]`.
fn cell_anchor(j: usize, m: usize) -> f64 {
    (2 * j - 1) as f64 / (2 * m) as f64
}

/// Expected `a`-cost of sorting `n` uniform points onto the `n` anchors of
/// `[0, 1]`.
pub fn d_total(n: usize, a: f64, q: &QuadratureConfig) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one sensor".into()));
    }
    check_exponent(a)?;
    block_cost(n, 1, a, q)
}

/// Ranks are grouped in `n / block` consecutive blocks; block `j` goes to the
/// `j`-th of `n / block` anchors.
fn block_cost(n: usize, block: usize, a: f64, q: &QuadratureConfig) -> Result<f64> {
    let m = n / block;
    let terms = (1..=n)
        .into_par_iter()
        .map(|i| {
            let j = (i - 1) / block + 1;
            expected_anchor_cost(OrderStatSpec { n, rank: i }, cell_anchor(j, m), a, q)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(compensated_sum(terms))
}

fn root_of(n: usize, d: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    exact_root(n, d).filter(|&m| m >= 1).ok_or_else(|| {
        Error::Precondition(format!("n = {n} is not a perfect {d}-th power"))
    })
}

/// Expected cost of the first sorting phase in dimension `d`, where blocks of
/// `m^{d−1}` sensors move along the first axis to the `m` slab anchors.
pub fn phase1_cost(n: usize, d: usize, a: f64, q: &QuadratureConfig) -> Result<f64> {
    let m = root_of(n, d)?;
    check_exponent(a)?;
    block_cost(n, n / m, a, q)
}

/// Expected per-phase cost of the full recursive algorithm on `n = m^d`
/// sensors: the first phase plus `m` independent instances in dimension
/// `d − 1` with `m^{d−1}` sensors each.
pub fn recursive_expected_cost(n: usize, d: usize, a: f64, q: &QuadratureConfig) -> Result<f64> {
    let m = root_of(n, d)?;
    check_exponent(a)?;
    if d == 1 {
        return d_total(n, a, q);
    }
    let first = phase1_cost(n, d, a, q)?;
    let rest = recursive_expected_cost(n / m, d - 1, a, q)?;
    Ok(first + m as f64 * rest)
}

/// `recursive_total / n^{1 − a/(2d)}`.
pub fn theory_const_ratio(recursive_total: f64, n: usize, d: usize, a: f64) -> f64 {
    recursive_total / (n as f64).powf(1.0 - a / (2.0 * d as f64))
}
