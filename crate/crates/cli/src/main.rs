//! `cubecov`: simulate sensor displacement, verify coverage, evaluate the
//! expected-cost integrals and run seeded sweeps.
//!
//! Data goes to stdout (JSON for single runs, CSV for tables), diagnostics
//! to stderr. Exit codes: 0 success, 1 domain error, 2 usage error.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cubecov::algorithms::{
    lvd, min_radius_factor, mvd, mvd_general, write_log_csv, Displacement, LvBranch, LvParams,
};
use cubecov::analytic::{
    d_total, lv_constants, phase1_cost, recursive_expected_cost, theory_const_ratio, QuadratureConfig,
};
use cubecov::coverage::{verify_exact, verify_sampled, CoverageReport};
use cubecov::experiments::{parse_n_list, run_sweep, emit_csv, Algorithm, SweepSpec};
use cubecov::io::format_real;
use cubecov::placement::{read_placement_csv, write_placement_csv};
use cubecov::{
    cost_of_log, place_uniform, CostMetric, CostMode, Error, Exact, Scalar, SeedSpec, SensorSwarm,
};
use serde::Serialize;

const SEED_ENV: &str = "CUBECOV_SEED";

#[derive(Parser)]
#[command(name = "cubecov", version, about = "Random sensor coverage of the d-dimensional cube")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Place sensors at random, run one displacement algorithm, print JSON.
    Simulate(SimulateArgs),
    /// Evaluate expected-cost integrals as CSV (or the subcube constants as JSON).
    Analytic(AnalyticArgs),
    /// Decide whether a placement covers the cube, print JSON.
    Verify(VerifyArgs),
    /// Run seeded trials over a list of sensor counts, write CSV.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SimAlg {
    /// Recursive sorting algorithm; n must be a perfect d-th power.
    Mv,
    /// Sorting algorithm on a random subset of floor(n^(1/d))^d sensors.
    MvGeneral,
    /// Subcube algorithm on the unit cube.
    Lv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    PerPhase,
    EndToEnd,
}

impl From<ModeArg> for CostMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::PerPhase => CostMode::PerPhase,
            ModeArg::EndToEnd => CostMode::EndToEnd,
        }
    }
}

#[derive(Args)]
struct SeedArg {
    /// Master seed [env: CUBECOV_SEED; default 0].
    #[arg(long, env = SEED_ENV, hide_env = true)]
    seed: Option<u64>,
}

impl SeedArg {
    fn value(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Displacement algorithm.
    #[arg(long, value_enum)]
    alg: SimAlg,
    /// Dimension.
    #[arg(long)]
    d: usize,
    /// Number of sensors.
    #[arg(long)]
    n: usize,
    /// Cost exponent a in sum of distance^a.
    #[arg(long)]
    a: f64,
    /// Side length of the cube.
    #[arg(long, default_value_t = 1.0)]
    y: f64,
    /// Radius factor (mv-general: default n^(1/d)/floor(n^(1/d)); lv: default 3^(3/d)/(3^(1/d)-1)^2).
    #[arg(long)]
    f: Option<f64>,
    #[command(flatten)]
    seed: SeedArg,
    /// Trial index combined with the seed.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Cost metric.
    #[arg(long, value_enum, default_value = "per-phase")]
    mode: ModeArg,
    /// Write every elementary move as CSV to this path.
    #[arg(long)]
    dump_log: Option<PathBuf>,
    /// Write the initial placement as CSV to this path.
    #[arg(long)]
    dump_placement: Option<PathBuf>,
    /// Write the final positions as placement CSV to this path.
    #[arg(long)]
    dump_final: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    /// Expected cost of the one-dimensional algorithm (column D_a).
    DTotal,
    /// Expected cost of the first sorting phase (column phase1).
    Phase1,
    /// Expected cost of the full recursion (recursive_total, theory_const_ratio).
    Recursive,
    /// Subcube-algorithm constants, as JSON.
    LvConstants,
}

#[derive(Args)]
struct AnalyticArgs {
    #[arg(value_enum)]
    quantity: Quantity,
    /// Sensor counts: `9`, `4,9,16`, `2..60^2` (k^2 for k in 2..=60) or `2^10..18`.
    #[arg(long)]
    n: Option<String>,
    /// Dimension.
    #[arg(long)]
    d: usize,
    /// Cost exponent.
    #[arg(long)]
    a: f64,
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Placement CSV with header sensor_id,x1,...,xd.
    #[arg(long)]
    placement: PathBuf,
    /// Sensing radius, as a decimal or an exact fraction such as 1/6.
    #[arg(long)]
    r: String,
    /// Side length of the cube, as a decimal or a fraction.
    #[arg(long, default_value = "1")]
    y: String,
    /// Exact decision over the arrangement of sensing cubes (the default).
    #[arg(long, conflicts_with = "samples")]
    exact: bool,
    /// Arithmetic for the exact decision. `rational` decides coverage for the
    /// positions exactly as written; decimal files cannot hold values such as
    /// 1/6, so grid tilings at the critical radius need a little slack.
    /// `float` uses rounded f64 interval ends.
    #[arg(long, value_enum, default_value = "rational")]
    arith: Arith,
    /// Test this many uniform random points instead.
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Arith {
    Rational,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepAlg {
    Mv,
    Lv,
}

#[derive(Args)]
struct SweepArgs {
    /// Displacement algorithm.
    #[arg(long, value_enum)]
    alg: SweepAlg,
    /// Dimension.
    #[arg(long)]
    d: usize,
    /// Cost exponent.
    #[arg(long)]
    a: f64,
    /// Side length of the cube.
    #[arg(long, default_value_t = 1.0)]
    y: f64,
    /// Sensor counts: `4,9,16`, `2..60^2` (k^2 for k in 2..=60) or `2^10..18`.
    #[arg(long)]
    n_list: String,
    /// Trials per (n, repeat).
    #[arg(long, default_value_t = 32)]
    trials: usize,
    /// Independent repeats, one CSV row each.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[command(flatten)]
    seed: SeedArg,
    /// Output CSV path, or `-` for stdout; metadata goes to `<out>.meta.json`.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads [default: all cores]; results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// Cost metric.
    #[arg(long, value_enum, default_value = "per-phase")]
    mode: ModeArg,
    /// Radius factor for the subcube algorithm [default: threshold].
    #[arg(long)]
    f: Option<f64>,
}

#[derive(Debug)]
enum Failure {
    Domain(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Analytic(args) => analytic(args),
        Command::Verify(args) => verify(args),
        Command::Sweep(args) => sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) -> Outcome {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct SimulateReport {
    alg: &'static str,
    d: usize,
    n: usize,
    a: f64,
    y: f64,
    seed: u64,
    trial: u64,
    mode: &'static str,
    cost: f64,
    /// `fallback` or `per-subcube` for the subcube algorithm.
    branch: Option<&'static str>,
    radius: f64,
    radius_factor: Option<f64>,
    moved_sensors: usize,
}

fn simulate(args: SimulateArgs) -> Outcome {
    let metric = CostMetric::new(args.a, args.mode.into())?;
    let seed = SeedSpec::new(args.seed.value(), args.trial);
    let swarm = place_uniform(args.n, args.d, args.y, seed)?;
    let mut rng = seed.rng(cubecov::Stream::Selection);
    let (name, out, branch, f): (_, Displacement<f64>, Option<LvBranch>, Option<f64>) = match args.alg {
        SimAlg::Mv => {
            if args.f.is_some() {
                return Err(Error::InvalidArgument("--f applies to mv-general and lv only".into()).into());
            }
            ("mv", mvd(&swarm)?, None, None)
        }
        SimAlg::MvGeneral => {
            let f = args.f.unwrap_or_else(|| min_radius_factor(args.n, args.d));
            ("mv-general", mvd_general(&swarm, f, &mut rng)?, None, Some(f))
        }
        SimAlg::Lv => {
            let params = match args.f {
                Some(f) => LvParams::new(args.a, args.d, f)?,
                None => LvParams::at_threshold(args.a, args.d)?,
            };
            let outcome = lvd(&swarm, &params, &mut rng)?;
            ("lv", outcome.displacement, Some(outcome.branch), Some(params.radius_factor))
        }
    };
    if let Some(path) = &args.dump_placement {
        let mut w = create(path)?;
        write_placement_csv(&swarm, &mut w)?;
        w.flush()?;
    }
    if let Some(path) = &args.dump_final {
        let mut w = create(path)?;
        write_placement_csv(&out.swarm, &mut w)?;
        w.flush()?;
    }
    if let Some(path) = &args.dump_log {
        let mut w = create(path)?;
        write_log_csv(&out.log, args.d, &mut w)?;
        w.flush()?;
    }
    let moved_sensors = (0..out.log.sensors())
        .filter(|&i| !out.log.moves(i).is_empty())
        .count();
    print_json(&SimulateReport {
        alg: name,
        d: args.d,
        n: args.n,
        a: args.a,
        y: args.y,
        seed: seed.master_seed,
        trial: seed.trial_index,
        mode: metric.mode.as_str(),
        cost: cost_of_log(&out.log, &metric)?,
        branch: branch.map(LvBranch::as_str),
        radius: *out.swarm.radius(),
        radius_factor: f,
        moved_sensors,
    })
}

#[derive(Serialize)]
struct LvConstantsReport {
    a: f64,
    d: usize,
    partition_coeff: f64,
    selection_coeff: f64,
    radius_factor_threshold: f64,
    min_n_root: f64,
    min_sensors: usize,
}

fn analytic(args: AnalyticArgs) -> Outcome {
    if let Quantity::LvConstants = args.quantity {
        let p = lv_constants(args.a, args.d)?;
        return print_json(&LvConstantsReport {
            a: args.a,
            d: args.d,
            partition_coeff: p.partition_coeff,
            selection_coeff: p.selection_coeff,
            radius_factor_threshold: p.radius_factor,
            min_n_root: p.min_n_root,
            min_sensors: p.min_sensors(),
        });
    }
    let spec = args
        .n
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--n is required for this quantity".into()))?;
    let ns = parse_n_list(spec)?;
    let q = QuadratureConfig::with_rel_tol(args.rel_tol)?;
    let mut out = io::stdout().lock();
    writeln!(out, "n,d,a,D_a,phase1,recursive_total,theory_const_ratio")?;
    for n in ns {
        let mut cols = [String::new(), String::new(), String::new(), String::new()];
        match args.quantity {
            Quantity::DTotal => cols[0] = format_real(d_total(n, args.a, &q)?),
            Quantity::Phase1 => cols[1] = format_real(phase1_cost(n, args.d, args.a, &q)?),
            Quantity::Recursive => {
                let total = recursive_expected_cost(n, args.d, args.a, &q)?;
                cols[2] = format_real(total);
                cols[3] = format_real(theory_const_ratio(total, n, args.d, args.a));
            }
            Quantity::LvConstants => unreachable!(),
        }
        writeln!(out, "{n},{},{},{}", args.d, format_real(args.a), cols.join(","))?;
    }
    Ok(())
}

fn parse_exact(flag: &str, s: &str) -> Result<Exact, Error> {
    let bad = || Error::Parse(format!("{flag} expects a number or fraction, got {s:?}"));
    if s.contains('/') {
        return s.trim().parse::<Exact>().map_err(|_| bad());
    }
    let x: f64 = s.trim().parse().map_err(|_| bad())?;
    if !x.is_finite() {
        return Err(bad());
    }
    Ok(Exact::from_real(x))
}

#[derive(Serialize)]
struct VerifyReport {
    method: &'static str,
    covered: bool,
    witness: Option<Vec<f64>>,
    cells_checked: u64,
}

impl VerifyReport {
    fn new<T: Scalar>(method: &'static str, rep: CoverageReport<T>) -> Self {
        Self {
            method,
            covered: rep.covered,
            witness: rep.witness.map(|w| w.coords().iter().map(Scalar::to_real).collect()),
            cells_checked: rep.cells_checked,
        }
    }
}

fn verify(args: VerifyArgs) -> Outcome {
    let file = File::open(&args.placement)
        .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", args.placement.display())))?;
    let (d, points) = read_placement_csv(BufReader::new(file))?;
    let r = parse_exact("--r", &args.r)?;
    let y = parse_exact("--y", &args.y)?;
    let exact_points = points.iter().map(|p| p.convert::<Exact>()).collect();
    let swarm = SensorSwarm::new(d, y, r, exact_points)?;
    let report = match args.samples {
        Some(samples) => {
            let float: SensorSwarm<f64> = swarm.convert();
            VerifyReport::new("sampled", verify_sampled(&float, samples, SeedSpec::new(args.seed.value(), 0))?)
        }
        None => match args.arith {
            Arith::Rational => VerifyReport::new("exact", verify_exact(&swarm)?),
            Arith::Float => VerifyReport::new("exact", verify_exact(&swarm.convert::<f64>())?),
        },
    };
    print_json(&report)
}

fn sweep(args: SweepArgs) -> Outcome {
    let algorithm = match args.alg {
        SweepAlg::Mv => Algorithm::Mv,
        SweepAlg::Lv => Algorithm::Lv,
    };
    if algorithm == Algorithm::Mv && args.f.is_some() {
        return Err(Error::InvalidArgument("--f applies to the lv sweep only".into()).into());
    }
    let spec = SweepSpec {
        side: args.y,
        trials: args.trials,
        repeats: args.repeats,
        mode: args.mode.into(),
        jobs: args.jobs,
        radius_factor: args.f,
        ..SweepSpec::new(algorithm, args.d, args.a, parse_n_list(&args.n_list)?, args.seed.value())
    };
    let result = run_sweep(&spec)?;
    if args.out.as_os_str() == "-" {
        let mut out = io::stdout().lock();
        emit_csv(&result.rows, &mut out)?;
        out.flush()?;
        return Ok(());
    }
    let mut w = create(&args.out)?;
    emit_csv(&result.rows, &mut w)?;
    w.flush()?;
    let mut meta_path = args.out.clone().into_os_string();
    meta_path.push(".meta.json");
    let mut m = create(Path::new(&meta_path))?;
    serde_json::to_writer_pretty(&mut m, &result.meta(&spec))?;
    writeln!(m)?;
    m.flush()?;
    Ok(())
}
