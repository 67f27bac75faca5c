use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares line `y = slope·x + intercept` with its coefficient of
/// determination.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    assert_eq!(xs.len(), ys.len());
    let k = xs.len() as f64;
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("need at least two points to fit a line".into()));
    }
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidArgument("degenerate x-range".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok(LineFit {
        slope,
        intercept,
        r_squared: r_squared(ys, xs.iter().map(|x| slope * x + intercept)),
    })
}

/// `1 − SS_res / SS_tot`; 1 when the data are constant and matched exactly.
pub fn r_squared<I: IntoIterator<Item = f64>>(ys: &[f64], predicted: I) -> f64 {
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = ys.iter().zip(predicted).map(|(y, p)| (y - p) * (y - p)).sum();
    if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    }
}

/// Fit of `value ≈ C · rate` with the slope in log space fixed at one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProportionalFit {
    pub constant: f64,
    /// Of `ln value` against `ln C + ln rate`.
    pub r_squared: f64,
}

pub fn fit_proportional(rates: &[f64], values: &[f64]) -> Result<ProportionalFit> {
    assert_eq!(rates.len(), values.len());
    if rates.is_empty() {
        return Err(Error::InvalidArgument("nothing to fit".into()));
    }
    if rates.iter().chain(values).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidArgument("proportional fit needs positive data".into()));
    }
    let ln_v: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let ln_r: Vec<f64> = rates.iter().map(|r| r.ln()).collect();
    let ln_c = ln_v.iter().zip(&ln_r).map(|(v, r)| v - r).sum::<f64>() / ln_v.len() as f64;
    Ok(ProportionalFit {
        constant: ln_c.exp(),
        r_squared: r_squared(&ln_v, ln_r.iter().map(|r| r + ln_c)),
    })
}
