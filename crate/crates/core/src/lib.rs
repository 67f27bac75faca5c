//! Coverage of the cube `[0, y]^d` by mobile sensors with L∞ sensing
//! ranges: seeded placement, displacement algorithms, exact coverage
//! verification, expected-cost integrals and Monte Carlo sweeps.
//!
//! Geometry and the algorithms are generic over [`Scalar`]; [`Exact`]
//! rationals decide boundary cases exactly, `f64` is the working type.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod analytic;
pub mod coverage;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod placement;
pub mod scalar;

pub use error::{Error, Result};
pub use geometry::{
    anchor_position, cost_of_log, critical_radius, AnchorGrid, CostMetric, CostMode, Cube, Move, MovementLog, Point,
    SensorSwarm,
};
pub use placement::{place_uniform, SeedSpec, Stream};
pub use scalar::{ratio, Exact, Real, Scalar};

pub type Point64 = Point<f64>;
pub type Swarm64 = SensorSwarm<f64>;
pub type Log64 = MovementLog<f64>;
pub type ExactPoint = Point<Exact>;
pub type ExactSwarm = SensorSwarm<Exact>;
