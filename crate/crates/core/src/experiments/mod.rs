//! Seeded Monte Carlo sweeps over sensor counts, with per-`n` statistics,
//! analytic reference values and power-law fits.
//!
//! Trial `t` of repeat `r` at count `n` uses trial index
//! `(n << 32) | (r << 24) | t`, so every trial is reproducible on its own and
//! results do not depend on the worker count.

mod fit;
mod nlist;

use std::io::{Read, Write};

use serde::Serialize;

pub use fit::{fit_line, fit_proportional, r_squared, LineFit, ProportionalFit};
pub use nlist::parse_n_list;

use crate::algorithms::{lvd, mvd, LvBranch, LvParams};
use crate::analytic::{recursive_expected_cost, QuadratureConfig};
use crate::error::{Error, Result};
use crate::geometry::{cost_of_log, CostMetric, CostMode};
use crate::io::format_real;
use crate::placement::{place_uniform, SeedSpec, Stream};
use crate::scalar::{compensated_sum, exact_root};

pub const CSV_HEADER: &str = "alg,d,a,y,n,repeat_id,trials,mean_cost,std_cost,stderr,theory_value,fallback_count";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Mv,
    Lv,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Mv => "mv",
            Algorithm::Lv => "lv",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mv" => Ok(Algorithm::Mv),
            "lv" => Ok(Algorithm::Lv),
            other => Err(Error::Parse(format!("unknown sweep algorithm {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub algorithm: Algorithm,
    pub dim: usize,
    pub exponent: f64,
    pub side: f64,
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub repeats: usize,
    pub master_seed: u64,
    pub mode: CostMode,
    /// Worker threads; `None` uses all available cores.
    #[serde(skip)]
    pub jobs: Option<usize>,
    /// Radius factor for the subcube algorithm; defaults to the threshold.
    pub radius_factor: Option<f64>,
}

impl SweepSpec {
    /// 32 trials, 3 repeats, unit side, per-phase cost.
    pub fn new(algorithm: Algorithm, dim: usize, exponent: f64, n_list: Vec<usize>, master_seed: u64) -> Self {
        Self {
            algorithm,
            dim,
            exponent,
            side: 1.0,
            n_list,
            trials: 32,
            repeats: 3,
            master_seed,
            mode: CostMode::PerPhase,
            jobs: None,
            radius_factor: None,
        }
    }

    fn lv_params(&self) -> Result<LvParams> {
        match self.radius_factor {
            Some(f) => LvParams::new(self.exponent, self.dim, f),
            None => LvParams::at_threshold(self.exponent, self.dim),
        }
    }

    pub fn validate(&self) -> Result<()> {
        CostMetric::new(self.exponent, self.mode)?;
        if self.dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if !(self.side > 0.0) || !self.side.is_finite() {
            return Err(Error::InvalidArgument(format!("side must be positive, got {}", self.side)));
        }
        if self.trials == 0 || self.trials >= 1 << 24 {
            return Err(Error::InvalidArgument(format!("trials must be in 1..2^24, got {}", self.trials)));
        }
        if self.repeats == 0 || self.repeats > 255 {
            return Err(Error::InvalidArgument(format!("repeats must be in 1..=255, got {}", self.repeats)));
        }
        if self.n_list.is_empty() {
            return Err(Error::InvalidArgument("n-list is empty".into()));
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n == 0 || n as u64 >= 1 << 32) {
            return Err(Error::InvalidArgument(format!("sensor count {n} out of range")));
        }
        match self.algorithm {
            Algorithm::Mv => {
                if let Some(&n) = self.n_list.iter().find(|&&n| exact_root(n, self.dim).is_none()) {
                    return Err(Error::Precondition(format!(
                        "n = {n} is not a perfect {}-th power",
                        self.dim
                    )));
                }
            }
            Algorithm::Lv => {
                if self.side != 1.0 {
                    return Err(Error::Precondition("subcube algorithm runs on the unit cube (y = 1)".into()));
                }
                let params = self.lv_params()?;
                if let Some(&n) = self.n_list.iter().find(|&&n| n < params.min_sensors()) {
                    return Err(Error::Precondition(format!(
                        "subcube algorithm needs n >= ceil(x0) = {}, got n = {n}",
                        params.min_sensors()
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn trial_index(n: usize, repeat: usize, trial: usize) -> u64 {
    ((n as u64) << 32) | ((repeat as u64) << 24) | trial as u64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialOutcome {
    pub cost: f64,
    /// Set for the subcube algorithm.
    pub branch: Option<LvBranch>,
}

/// One seeded placement and displacement. Does not re-validate `spec`.
pub fn run_trial(spec: &SweepSpec, n: usize, repeat: usize, trial: usize) -> Result<TrialOutcome> {
    let seed = SeedSpec::new(spec.master_seed, trial_index(n, repeat, trial));
    let metric = CostMetric::new(spec.exponent, spec.mode)?;
    let swarm = place_uniform(n, spec.dim, spec.side, seed)?;
    match spec.algorithm {
        Algorithm::Mv => {
            let out = mvd(&swarm)?;
            Ok(TrialOutcome {
                cost: cost_of_log(&out.log, &metric)?,
                branch: None,
            })
        }
        Algorithm::Lv => {
            let params = spec.lv_params()?;
            let mut rng = seed.rng(Stream::Selection);
            let out = lvd(&swarm, &params, &mut rng)?;
            Ok(TrialOutcome {
                cost: cost_of_log(&out.displacement.log, &metric)?,
                branch: Some(out.branch),
            })
        }
    }
}

/// One CSV row: statistics of `trials` runs at one `n` and one repeat.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialStats {
    pub algorithm: Algorithm,
    pub dim: usize,
    pub exponent: f64,
    pub side: f64,
    pub n: usize,
    pub repeat_id: usize,
    pub trials: usize,
    pub mean_cost: f64,
    /// Sample standard deviation (`trials − 1` denominator; 0 for one trial).
    pub std_cost: f64,
    pub stderr: f64,
    pub theory_value: f64,
    /// Subcube runs that took the fallback branch; the rest ran per subcube.
    pub fallback_count: usize,
}

impl TrialStats {
    pub fn per_subcube_count(&self) -> usize {
        self.trials - self.fallback_count
    }
}

/// Rate `n^{1 − a/(2d)} (ln n / n)^{a/(2d)}` of the subcube algorithm.
pub fn lv_rate(n: usize, d: usize, a: f64) -> f64 {
    let nf = n as f64;
    let e = a / (2.0 * d as f64);
    nf.powf(1.0 - e) * (nf.ln() / nf).powf(e)
}

/// Constant of the subcube rate fitted on the first half of the sweep's
/// distinct `n`, checked on the second half.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub constant: f64,
    pub fit_n: Vec<usize>,
    pub validation_n: Vec<usize>,
    /// Largest `|mean/theory − 1|` over the validation rows.
    pub validation_max_rel_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<TrialStats>,
    pub lv_fit: Option<RateFit>,
}

/// Metadata written next to a sweep's CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepMeta<'a> {
    pub spec: &'a SweepSpec,
    pub cost_mode: &'static str,
    pub lv_fit: Option<&'a RateFit>,
}

impl SweepResult {
    pub fn meta<'a>(&'a self, spec: &'a SweepSpec) -> SweepMeta<'a> {
        SweepMeta {
            spec,
            cost_mode: spec.mode.as_str(),
            lv_fit: self.lv_fit.as_ref(),
        }
    }
}

fn summarize(spec: &SweepSpec, n: usize, repeat_id: usize, outcomes: &[TrialOutcome]) -> TrialStats {
    let k = outcomes.len() as f64;
    let mean = compensated_sum(outcomes.iter().map(|o| o.cost)) / k;
    let var = if outcomes.len() > 1 {
        compensated_sum(outcomes.iter().map(|o| (o.cost - mean) * (o.cost - mean))) / (k - 1.0)
    } else {
        0.0
    };
    let std = var.sqrt();
    TrialStats {
        algorithm: spec.algorithm,
        dim: spec.dim,
        exponent: spec.exponent,
        side: spec.side,
        n,
        repeat_id,
        trials: outcomes.len(),
        mean_cost: mean,
        std_cost: std,
        stderr: std / k.sqrt(),
        theory_value: f64::NAN,
        fallback_count: outcomes.iter().filter(|o| o.branch == Some(LvBranch::Fallback)).count(),
    }
}

fn distinct_in_order(ns: &[usize]) -> Vec<usize> {
    let mut seen = std::collections::HashSet::new();
    ns.iter().copied().filter(|n| seen.insert(*n)).collect()
}

/// Runs every trial of the sweep on a pool of `spec.jobs` workers. Rows come
/// out ordered by (`n` as listed, `repeat_id`); within a row trials are
/// aggregated in trial order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    use rayon::prelude::*;

    spec.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = spec.jobs {
        if jobs == 0 {
            return Err(Error::InvalidArgument("jobs must be at least 1".into()));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;

    let cells: Vec<(usize, usize)> = spec
        .n_list
        .iter()
        .flat_map(|&n| (0..spec.repeats).map(move |r| (n, r)))
        .collect();
    let mut rows = pool.install(|| {
        cells
            .par_iter()
            .map(|&(n, r)| {
                let outcomes = (0..spec.trials)
                    .into_par_iter()
                    .map(|t| run_trial(spec, n, r, t))
                    .collect::<Result<Vec<_>>>()?;
                Ok(summarize(spec, n, r, &outcomes))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let distinct = distinct_in_order(&spec.n_list);
    let mut lv_fit = None;
    match spec.algorithm {
        Algorithm::Mv => {
            let q = QuadratureConfig::default();
            let scale = spec.side.powf(spec.exponent);
            let theory = pool.install(|| {
                distinct
                    .iter()
                    .map(|&n| Ok((n, scale * recursive_expected_cost(n, spec.dim, spec.exponent, &q)?)))
                    .collect::<Result<std::collections::HashMap<_, _>>>()
            })?;
            for row in &mut rows {
                row.theory_value = theory[&row.n];
            }
        }
        Algorithm::Lv => {
            let fit = fit_lv_constant(spec, &rows, &distinct)?;
            for row in &mut rows {
                row.theory_value = fit.constant * lv_rate(row.n, spec.dim, spec.exponent);
            }
            lv_fit = Some(fit);
        }
    }
    Ok(SweepResult { rows, lv_fit })
}

fn fit_lv_constant(spec: &SweepSpec, rows: &[TrialStats], distinct: &[usize]) -> Result<RateFit> {
    let half = distinct.len().div_ceil(2);
    let (fit_n, validation_n) = distinct.split_at(half);
    let (rates, values): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| fit_n.contains(&r.n))
        .map(|r| (lv_rate(r.n, spec.dim, spec.exponent), r.mean_cost))
        .unzip();
    let constant = fit_proportional(&rates, &values)?.constant;
    let validation_max_rel_error = rows
        .iter()
        .filter(|r| validation_n.contains(&r.n))
        .map(|r| (r.mean_cost / (constant * lv_rate(r.n, spec.dim, spec.exponent)) - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(RateFit {
        constant,
        fit_n: fit_n.to_vec(),
        validation_n: validation_n.to_vec(),
        validation_max_rel_error,
    })
}

/// Log-log regression of `mean_cost` on `n` over all rows. Needs at least
/// five distinct `n` spanning two decades.
pub fn fit_exponent(stats: &[TrialStats]) -> Result<LineFit> {
    let ns = distinct_in_order(&stats.iter().map(|s| s.n).collect::<Vec<_>>());
    let lo = ns.iter().min().copied().unwrap_or(0);
    let hi = ns.iter().max().copied().unwrap_or(0);
    if ns.len() < 5 || lo == 0 || (hi as f64) < 100.0 * lo as f64 {
        return Err(Error::InvalidArgument(format!(
            "exponent fit needs >= 5 distinct n spanning two decades, got {} in [{lo}, {hi}]",
            ns.len()
        )));
    }
    if let Some(s) = stats.iter().find(|s| !(s.mean_cost > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "mean cost at n = {} is not positive",
            s.n
        )));
    }
    let xs: Vec<f64> = stats.iter().map(|s| (s.n as f64).ln()).collect();
    let ys: Vec<f64> = stats.iter().map(|s| s.mean_cost.ln()).collect();
    fit_line(&xs, &ys)
}

pub fn emit_csv<W: Write>(stats: &[TrialStats], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for s in stats {
        w.write_record([
            s.algorithm.as_str().to_string(),
            s.dim.to_string(),
            format_real(s.exponent),
            format_real(s.side),
            s.n.to_string(),
            s.repeat_id.to_string(),
            s.trials.to_string(),
            format_real(s.mean_cost),
            format_real(s.std_cost),
            format_real(s.stderr),
            format_real(s.theory_value),
            s.fallback_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_csv<R: Read>(input: R) -> Result<Vec<TrialStats>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected sweep header {:?}", header.join(","))));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let r = record?;
        let int = |k: usize| -> Result<usize> {
            r[k].parse().map_err(|_| Error::Parse(format!("bad integer {:?}", &r[k])))
        };
        let real = |k: usize| -> Result<f64> {
            r[k].parse().map_err(|_| Error::Parse(format!("bad number {:?}", &r[k])))
        };
        out.push(TrialStats {
            algorithm: r[0].parse()?,
            dim: int(1)?,
            exponent: real(2)?,
            side: real(3)?,
            n: int(4)?,
            repeat_id: int(5)?,
            trials: int(6)?,
            mean_cost: real(7)?,
            std_cost: real(8)?,
            stderr: real(9)?,
            theory_value: real(10)?,
            fallback_count: int(11)?,
        });
    }
    Ok(out)
}
