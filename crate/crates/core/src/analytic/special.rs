#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::scalar::Real;

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma<T: Real>(x: T) -> T {
    if x == T::one() || x == T::from_count(2) {
        return T::zero();
    }
    let half = T::constant(0.5);
    if x < half {
        // Reflection: Γ(x)Γ(1−x) = π / sin(πx).
        let pi = T::constant(std::f64::consts::PI);
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::constant(LANCZOS[0]);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::constant(c) / (x + T::from_count(k));
    }
    let t = x + T::constant(LANCZOS_G) + half;
    T::constant(0.5 * (2.0 * std::f64::consts::PI).ln()) + (x + half) * t.ln() - t + acc.ln()
}

/// `ln C(n, k)`.
pub fn ln_binomial<T: Real>(n: usize, k: usize) -> T {
    assert!(k <= n);
    if k == 0 || k == n {
        return T::zero();
    }
    ln_gamma(T::from_count(n + 1)) - ln_gamma(T::from_count(k + 1)) - ln_gamma(T::from_count(n - k + 1))
}

/// Euler Beta function `B(α, β) = Γ(α)Γ(β)/Γ(α+β)`.
pub fn beta_function<T: Real>(alpha: T, beta: T) -> Result<T> {
    if !(alpha > T::zero() && beta > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "beta function needs positive arguments, got ({alpha:?}, {beta:?})"
        )));
    }
    Ok((ln_gamma(alpha) + ln_gamma(beta) - ln_gamma(alpha + beta)).exp())
}
