use std::path::PathBuf;

use cubecov::experiments::{emit_csv, run_sweep, Algorithm, SweepSpec};

/// Frozen small sweeps whose CSV output is checked in under `tests/golden`.
pub fn golden_sweeps() -> Vec<(&'static str, SweepSpec)> {
    let mut small = SweepSpec::new(Algorithm::Mv, 2, 2.0, vec![4, 9, 16], 7);
    small.trials = 4;
    small.repeats = 2;
    let mut single = SweepSpec::new(Algorithm::Mv, 2, 2.0, vec![4], 42);
    single.trials = 1;
    single.repeats = 1;
    let mut lv = SweepSpec::new(Algorithm::Lv, 2, 2.0, vec![100, 144, 196, 256], 5);
    lv.trials = 3;
    lv.repeats = 1;
    vec![("mv_d2_a2_small.csv", small), ("mv_single_trial.csv", single), ("lv_d2_a2_small.csv", lv)]
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn sweep_csv(spec: &SweepSpec) -> Vec<u8> {
    let mut buf = Vec::new();
    emit_csv(&run_sweep(spec).unwrap().rows, &mut buf).unwrap();
    buf
}

/// Compares against the golden file; `CUBECOV_BLESS=1` rewrites it instead.
pub fn check_golden(name: &str, spec: &SweepSpec) -> Result<(), String> {
    let got = sweep_csv(spec);
    let path = golden_path(name);
    if std::env::var_os("CUBECOV_BLESS").is_some() {
        std::fs::write(&path, &got).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let want = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if got == want {
        Ok(())
    } else {
        Err(format!(
            "{name} differs:\n--- golden\n{}\n--- got\n{}",
            String::from_utf8_lossy(&want),
            String::from_utf8_lossy(&got)
        ))
    }
}
