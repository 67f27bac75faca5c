//! Seeded uniform sensor placement.
//!
//! Every random stream is a xoshiro256** generator whose 256-bit state is
//! built from `(master_seed, trial_index, stream)` with the SplitMix64
//! finalizer `mix64`:
//!
//! ```text
//! salt(j) = mix64(0x9E3779B97F4A7C15 * (8 * stream_tag + j + 1))
//! a  = mix64(master_seed ^ salt(0))
//! s1 = mix64(trial_index ^ salt(1) ^ mix64(a))
//! s0 = mix64(a ^ mix64(s1 ^ salt(2)))
//! s2 = mix64(s1 ^ mix64(s0 ^ salt(3)))
//! s3 = mix64(s0 ^ mix64(s2 ^ salt(4)))
//! mix64(z): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!           z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31
//! ```
//!
//! `mix64` is a bijection, so `(s0, s1)` determines `(master_seed,
//! trial_index)` within a stream. Every word depends on both inputs; the
//! generator's state transition is linear, and trials whose states shared
//! words would produce correlated early outputs. Uniform doubles are the top
//! 53 bits of `next_u64()` times `2^-53`.

use std::io::{BufRead, Write};

use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::error::{Error, Result};
use crate::geometry::{critical_radius, Point, SensorSwarm};
use crate::io::format_real;
use crate::scalar::Scalar;

pub type StreamRng = Xoshiro256StarStar;

/// Identifies one independent trial of an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub trial_index: u64,
}

/// Purpose of a random stream derived from a [`SeedSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Placement,
    /// Random subset selection inside the displacement algorithms.
    Selection,
    /// Sampled coverage verification.
    Sampling,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Placement => 0,
            Stream::Selection => 1,
            Stream::Sampling => 2,
        }
    }
}

impl SeedSpec {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        Self {
            master_seed,
            trial_index,
        }
    }

    pub fn rng(&self, stream: Stream) -> StreamRng {
        let tag = stream.tag();
        let salt = |j: u64| mix64(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(8 * tag + j + 1));
        let a = mix64(self.master_seed ^ salt(0));
        let s1 = mix64(self.trial_index ^ salt(1) ^ mix64(a));
        let s0 = mix64(a ^ mix64(s1 ^ salt(2)));
        let s2 = mix64(s1 ^ mix64(s0 ^ salt(3)));
        let s3 = mix64(s0 ^ mix64(s2 ^ salt(4)));
        let words = [s0, s1, s2, s3];
        let mut seed = [0u8; 32];
        for (chunk, w) in seed.chunks_exact_mut(8).zip(words) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        StreamRng::from_seed(seed)
    }
}

/// SplitMix64 output finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform double in `[0, 1)` with 53 random bits.
pub fn unit_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Partial Fisher–Yates: afterwards `items[..k]` is a uniform random
/// `k`-subset in random order.
pub fn select_prefix<T, R: Rng + ?Sized>(items: &mut [T], k: usize, rng: &mut R) {
    let n = items.len();
    assert!(k <= n, "cannot select {k} of {n}");
    for i in 0..k.min(n.saturating_sub(1)) {
        let j = rng.random_range(i..n);
        items.swap(i, j);
    }
}

/// `n` sensors i.i.d. uniform on `[0, y)^d`, with the critical sensing radius
/// `y / (2 n^{1/d})`. Coordinates are `y · u` for the same unit draws `u`
/// whatever `y` is.
pub fn place_uniform<T: Scalar>(n: usize, d: usize, side: T, seed: SeedSpec) -> Result<SensorSwarm<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one sensor".into()));
    }
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    if !(side > T::zero()) || !side.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "side length must be positive, got {side:?}"
        )));
    }
    let mut rng = seed.rng(Stream::Placement);
    let positions = (0..n)
        .map(|_| {
            Point::new((0..d).map(|_| side.clone() * T::from_real(unit_f64(&mut rng))))
        })
        .collect();
    let radius = critical_radius(n, d, &side);
    SensorSwarm::new(d, side, radius, positions)
}

/// Writes `sensor_id,x1,...,xd` with 17 significant digits.
pub fn write_placement_csv<T: Scalar, W: Write>(swarm: &SensorSwarm<T>, mut out: W) -> Result<()> {
    let mut header = String::from("sensor_id");
    for k in 1..=swarm.dim() {
        header.push_str(&format!(",x{k}"));
    }
    writeln!(out, "{header}")?;
    for (i, p) in swarm.positions().iter().enumerate() {
        let mut line = i.to_string();
        for c in p.coords() {
            line.push(',');
            line.push_str(&format_real(c.to_real()));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Reads a placement written by [`write_placement_csv`]. Rows are placed by
/// `sensor_id`, which must enumerate `0..n`.
pub fn read_placement_csv<R: BufRead>(input: R) -> Result<(usize, Vec<Point<f64>>)> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.get(0) != Some("sensor_id") || headers.len() < 2 {
        return Err(Error::Parse(
            "placement header must be sensor_id,x1,...,xd".into(),
        ));
    }
    for (k, h) in headers.iter().skip(1).enumerate() {
        if h != format!("x{}", k + 1) {
            return Err(Error::Parse(format!("unexpected placement column {h:?}")));
        }
    }
    let d = headers.len() - 1;
    let mut rows: Vec<(usize, Point<f64>)> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let id: usize = record[0]
            .parse()
            .map_err(|_| Error::Parse(format!("bad sensor_id {:?}", &record[0])))?;
        let coords = record
            .iter()
            .skip(1)
            .map(|s| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad coordinate {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push((id, Point::new(coords)));
    }
    rows.sort_by_key(|(id, _)| *id);
    if rows.iter().enumerate().any(|(i, (id, _))| i != *id) {
        return Err(Error::Parse("sensor_id values must enumerate 0..n".into()));
    }
    Ok((d, rows.into_iter().map(|(_, p)| p).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Exact};

    #[test]
    fn placement_is_deterministic_and_in_range() {
        let seed = SeedSpec::new(7, 0);
        let a = place_uniform(9, 2, 1.0, seed).unwrap();
        let b = place_uniform(9, 2, 1.0, seed).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 9);
        for p in a.positions() {
            assert!(p.coords().iter().all(|&c| (0.0..1.0).contains(&c)));
        }
        let c = place_uniform(9, 2, 1.0, SeedSpec::new(7, 1)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn side_scaling_is_exact() {
        let seed = SeedSpec::new(99, 3);
        let unit = place_uniform(25, 3, 1.0, seed).unwrap();
        let third = place_uniform(25, 3, 1.0 / 3.0, seed).unwrap();
        for (u, t) in unit.positions().iter().zip(third.positions()) {
            for (x, z) in u.coords().iter().zip(t.coords()) {
                assert_eq!(*z, x * (1.0 / 3.0));
            }
        }
    }

    #[test]
    fn exact_placement_matches_float_draws() {
        let seed = SeedSpec::new(5, 5);
        let f = place_uniform(16, 2, 1.0, seed).unwrap();
        let q = place_uniform::<Exact>(16, 2, ratio(1, 1), seed).unwrap();
        assert_eq!(q.convert::<f64>(), f);
        assert_eq!(*q.radius(), ratio(1, 8));
    }

    #[test]
    fn marginal_means_converge() {
        let n = 100_000;
        let swarm = place_uniform(n, 2, 1.0, SeedSpec::new(2024, 0)).unwrap();
        // 3 sigma of the mean of n uniforms.
        let tol = 3.0 * (1.0 / 12f64.sqrt()) / (n as f64).sqrt();
        for axis in 0..2 {
            let mean = swarm.positions().iter().map(|p| p[axis]).sum::<f64>() / n as f64;
            assert!((mean - 0.5).abs() < tol, "axis {axis} mean {mean}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let seed = SeedSpec::new(0, 0);
        assert!(place_uniform(0, 2, 1.0, seed).is_err());
        assert!(place_uniform(4, 2, 0.0, seed).is_err());
        assert!(place_uniform(4, 2, -1.0, seed).is_err());
        assert!(place_uniform(4, 0, 1.0, seed).is_err());
    }

    #[test]
    fn seed_states_differ_per_stream() {
        let s = SeedSpec::new(1, 2);
        let mut a = s.rng(Stream::Placement);
        let mut b = s.rng(Stream::Selection);
        assert_ne!(a.next_u64(), b.next_u64());
        let mut zero = SeedSpec::new(0, 0).rng(Stream::Placement);
        assert_ne!(zero.next_u64(), 0);
    }

    #[test]
    fn select_prefix_is_a_permutation() {
        let mut rng = SeedSpec::new(3, 3).rng(Stream::Selection);
        let mut items: Vec<usize> = (0..20).collect();
        select_prefix(&mut items, 7, &mut rng);
        let mut sorted = items.clone();
        sorted.sort();
        assert_eq!(sorted, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn placement_csv_round_trip() {
        let swarm = place_uniform(12, 3, 1.0, SeedSpec::new(8, 0)).unwrap();
        let mut buf = Vec::new();
        write_placement_csv(&swarm, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("sensor_id,x1,x2,x3\n"));
        let (d, points) = read_placement_csv(buf.as_slice()).unwrap();
        assert_eq!(d, 3);
        assert_eq!(points, swarm.positions());
    }

    #[test]
    fn placement_csv_rejects_bad_ids() {
        let text = "sensor_id,x1\n0,0.5\n2,0.25\n";
        assert!(read_placement_csv(text.as_bytes()).is_err());
        let text = "id,x1\n0,0.5\n";
        assert!(read_placement_csv(text.as_bytes()).is_err());
    }
}
