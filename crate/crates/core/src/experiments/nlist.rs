use crate::error::{Error, Result};
use crate::scalar::checked_pow;

/// Parses a comma-separated list of sensor counts. Each item is one of
///
/// * `n`: a single count,
/// * `lo..hi`: every count from `lo` to `hi` inclusive,
/// * `lo..hi^p`: `k^p` for `k` from `lo` to `hi`, e.g. `2..60^2`,
/// * `b^lo..hi`: `b^k` for `k` from `lo` to `hi`, e.g. `2^10..18`.
pub fn parse_n_list(spec: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(Error::Parse(format!("empty item in n-list {spec:?}")));
        }
        match item.split_once("..") {
            None => out.push(number(item)?),
            Some((left, right)) => {
                let (values, power_of_base) = if let Some((hi, p)) = right.split_once('^') {
                    ((number(left)?, number(hi)?), Some((number(p)?, false)))
                } else if let Some((b, lo)) = left.split_once('^') {
                    ((number(lo)?, number(right)?), Some((number(b)?, true)))
                } else {
                    ((number(left)?, number(right)?), None)
                };
                let (lo, hi) = values;
                if lo > hi {
                    return Err(Error::Parse(format!("empty range {item:?}")));
                }
                for k in lo..=hi {
                    let n = match power_of_base {
                        None => Some(k),
                        Some((p, false)) => checked_pow(k, p),
                        Some((b, true)) => checked_pow(b, k),
                    };
                    out.push(n.ok_or_else(|| Error::Parse(format!("{item:?} overflows")))?);
                }
            }
        }
    }
    Ok(out)
}

fn number(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("expected a non-negative integer, got {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_n_list("4,9,16").unwrap(), vec![4, 9, 16]);
        assert_eq!(parse_n_list("2..4^2").unwrap(), vec![4, 9, 16]);
        assert_eq!(parse_n_list("2^3..5").unwrap(), vec![8, 16, 32]);
        assert_eq!(parse_n_list("3..5, 100").unwrap(), vec![3, 4, 5, 100]);
        let fig = parse_n_list("2..60^2").unwrap();
        assert_eq!(fig.len(), 59);
        assert_eq!(fig[58], 3600);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "4,,9", "x", "5..3", "2^70..71", "-1"] {
            assert!(parse_n_list(bad).is_err(), "{bad}");
        }
    }
}
