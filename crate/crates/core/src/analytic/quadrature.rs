//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Split the integration range at the anchor, where the integrand has a
    /// kink.
    pub kink_split: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            kink_split: true,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "relative tolerance must be positive, got {rel_tol}"
            )));
        }
        Ok(Self {
            rel_tol,
            ..Self::default()
        })
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy)]
struct Segment<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
}

fn gauss_kronrod<T: Real, F: Fn(T) -> T>(f: &F, lo: T, hi: T) -> Segment<T> {
    let half = T::constant(0.5);
    let center = half * (lo + hi);
    let radius = half * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * T::constant(WGK[7]);
    let mut gauss = fc * T::constant(WG[3]);
    let mut abs_sum = kronrod.abs();
    let mut samples = [T::zero(); 15];
    samples[7] = fc;
    for j in 0..7 {
        let dx = radius * T::constant(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        samples[j] = f1;
        samples[14 - j] = f2;
        let w = T::constant(WGK[j]);
        kronrod = kronrod + w * (f1 + f2);
        abs_sum = abs_sum + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss = gauss + T::constant(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = kronrod * half;
    let mut asc = T::constant(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        asc = asc
            + T::constant(WGK[j]) * ((samples[j] - mean).abs() + (samples[14 - j] - mean).abs());
    }
    let value = kronrod * radius;
    let asc = asc * radius.abs();
    let abs_sum = abs_sum * radius.abs();
    let mut error = ((kronrod - gauss) * radius).abs();
    if asc > T::zero() && error > T::zero() {
        let scaled = (T::constant(200.0) * error / asc).powf(T::constant(1.5));
        error = asc * if scaled < T::one() { scaled } else { T::one() };
    }
    let floor = T::constant(50.0) * T::epsilon() * abs_sum;
    if abs_sum > T::min_positive_value() / (T::constant(50.0) * T::epsilon()) && floor > error {
        error = floor;
    }
    Segment { lo, hi, value, error }
}

/// Integrates `f` over `[breaks[0], breaks.last()]`, starting from the given
/// sorted breakpoints and bisecting the segment with the largest error
/// estimate until the total estimate is below `rel_tol · |I|`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, breaks: &[T], config: &QuadratureConfig) -> Result<T> {
    assert!(breaks.len() >= 2, "need at least one interval");
    let mut segments: Vec<Segment<T>> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gauss_kronrod(&f, w[0], w[1]))
        .collect();
    if segments.is_empty() {
        return Ok(T::zero());
    }
    let rel_tol = T::constant(config.rel_tol);
    let mut subdivisions = 0;
    loop {
        let (value, error) = segments
            .iter()
            .fold((T::zero(), T::zero()), |(v, e), s| (v + s.value, e + s.error));
        if error <= rel_tol * value.abs() || error == T::zero() {
            return Ok(value);
        }
        if subdivisions >= config.max_subdivisions {
            return Err(Error::Quadrature {
                subdivisions,
                error: error.to_real(),
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(k, _)| k)
            .expect("non-empty");
        let seg = segments.swap_remove(worst);
        let mid = T::constant(0.5) * (seg.lo + seg.hi);
        if !(mid > seg.lo && mid < seg.hi) {
            return Err(Error::Quadrature {
                subdivisions,
                error: error.to_real(),
            });
        }
        segments.push(gauss_kronrod(&f, seg.lo, mid));
        segments.push(gauss_kronrod(&f, mid, seg.hi));
        subdivisions += 1;
    }
}
