//! Expected-cost integrals over uniform order statistics.

mod order_stats;
mod quadrature;
mod special;

pub use order_stats::{
    d_total, density_mass, expected_anchor_cost, phase1_cost, recursive_expected_cost, theory_const_ratio,
    OrderStatSpec,
};
pub use quadrature::{integrate, QuadratureConfig};
pub use special::{beta_function, ln_binomial, ln_gamma};

use crate::algorithms::LvParams;
use crate::error::Result;

/// Subcube-algorithm constants at the threshold radius factor.
pub fn lv_constants(a: f64, d: usize) -> Result<LvParams> {
    LvParams::at_threshold(a, d)
}
