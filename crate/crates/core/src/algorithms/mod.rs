//! Displacement algorithms that move randomly placed sensors onto positions
//! covering the cube, recording every elementary move.

mod lv;
mod mv;

use std::io::Write;

pub use lv::{lvd, radius_factor_threshold, LvBranch, LvOutcome, LvParams, SubcubePartition};
pub use mv::{min_radius_factor, mv1, mvd, mvd_general, nth_root, scaling_check, ScalingCheck};

use crate::error::Result;
use crate::geometry::{MovementLog, SensorSwarm};
use crate::io::format_real;
use crate::scalar::Scalar;

/// Final swarm together with the moves that produced it.
#[derive(Clone, Debug)]
pub struct Displacement<T> {
    pub swarm: SensorSwarm<T>,
    pub log: MovementLog<T>,
}

/// Writes `sensor_id,phase,from_x1..from_xd,to_x1..to_xd,dist`, one row per
/// elementary move in sensor order.
pub fn write_log_csv<T: Scalar, W: Write>(log: &MovementLog<T>, dim: usize, mut out: W) -> Result<()> {
    let mut header = String::from("sensor_id,phase");
    for prefix in ["from", "to"] {
        for k in 1..=dim {
            header.push_str(&format!(",{prefix}_x{k}"));
        }
    }
    header.push_str(",dist");
    writeln!(out, "{header}")?;
    for sensor in 0..log.sensors() {
        for mv in log.moves(sensor) {
            let mut line = format!("{sensor},{}", mv.phase);
            for c in mv.from.coords().iter().chain(mv.to.coords()) {
                line.push(',');
                line.push_str(&format_real(c.to_real()));
            }
            line.push(',');
            line.push_str(&format_real(mv.length()));
            writeln!(out, "{line}")?;
        }
    }
    Ok(())
}
