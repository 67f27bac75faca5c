//! Text formatting shared by the CSV writers.

/// Shortest positional decimal that parses back to `x` exactly (at most 17
/// significant digits). Never uses an exponent and never depends on locale.
pub fn format_real(x: f64) -> String {
    // `Display` for floats is positional and round-trip exact.
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::format_real;
    use proptest::prelude::*;

    #[test]
    fn fixed_examples() {
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(2.0), "2");
        assert_eq!(format_real(-0.25), "-0.25");
        assert_eq!(format_real(1.0 / 3.0), "0.3333333333333333");
        assert_eq!(format_real(1234.5), "1234.5");
        assert_eq!(format_real(1e-7), "0.0000001");
        assert_eq!(format_real(3e20), "300000000000000000000");
    }

    proptest! {
        #[test]
        fn round_trips(x in proptest::num::f64::NORMAL) {
            let s = format_real(x);
            prop_assert!(!s.contains('e'));
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }
}
