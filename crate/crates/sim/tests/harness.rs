//! Sweep-engine behavior: record bookkeeping, determinism, pairing and
//! aggregation.

use cogmimo_sim::export::{read_json, to_csv, write_json, CSV_HEADER};
use cogmimo_sim::{run_sweep, Method, Receiver, SweepSpec};

fn tiny_spec() -> SweepSpec {
    let mut spec = SweepSpec::default_64x16();
    spec.system.t_s = 8;
    spec.system.r_s = 4;
    spec.system.t_p = 4;
    spec.system.r_p = 4;
    spec.system.n_st = 4;
    spec.system.n_sr = 4;
    spec.system.l_s = 2;
    spec.system.l_p = 2;
    spec.num_trials = 2;
    spec.snr_grid_db = vec![0.0, 10.0];
    spec.methods = vec![Method::Digital];
    spec.receiver = Receiver::DigitalMmse;
    spec.base_seed = 11;
    spec
}

#[test]
fn single_cell_sweep_has_one_record() {
    let mut spec = tiny_spec();
    spec.num_trials = 1;
    spec.snr_grid_db = vec![10.0];
    let result = run_sweep(&spec).unwrap();
    assert_eq!(result.records.len(), 1);
    assert!(result.failures.is_empty());
    assert_eq!(result.aggregates.len(), 1);
    assert_eq!(result.aggregates[0].trials, 1);
}

#[test]
fn rerun_is_byte_identical() {
    let spec = tiny_spec();
    let a = to_csv(&run_sweep(&spec).unwrap());
    let b = to_csv(&run_sweep(&spec).unwrap());
    assert_eq!(a.as_bytes(), b.as_bytes());
}

#[test]
fn csv_row_count_matches_grid() {
    let mut spec = tiny_spec();
    spec.methods = vec![Method::Digital, Method::HybridFrob];
    let result = run_sweep(&spec).unwrap();
    let csv = to_csv(&result);
    let rows = csv.trim_end().lines().count();
    assert_eq!(
        rows,
        1 + spec.methods.len() * spec.snr_grid_db.len() * spec.num_trials
    );
    assert!(csv.starts_with(CSV_HEADER));
}

#[test]
fn empty_record_set_yields_header_only_csv() {
    let spec = tiny_spec();
    let mut result = run_sweep(&spec).unwrap();
    result.records.clear();
    result.failures.clear();
    let csv = to_csv(&result);
    assert_eq!(csv, format!("{CSV_HEADER}\n"));
}

#[test]
fn json_round_trip_reproduces_result() {
    let spec = tiny_spec();
    let result = run_sweep(&spec).unwrap();
    let dir = std::env::temp_dir().join(format!("cogmimo-json-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.json");
    write_json(&result, &path).unwrap();
    let back = read_json(&path).unwrap();
    assert_eq!(
        serde_json::to_string(&result).unwrap(),
        serde_json::to_string(&back).unwrap()
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn methods_share_channels_per_trial() {
    let mut spec = tiny_spec();
    spec.methods = vec![Method::Digital, Method::HybridFrob];
    spec.snr_grid_db = vec![10.0];
    let result = run_sweep(&spec).unwrap();
    for trial in 0..spec.num_trials {
        let seeds: Vec<u64> = result
            .records
            .iter()
            .filter(|r| r.trial == trial)
            .map(|r| r.seed)
            .collect();
        assert!(seeds.len() >= 2);
        assert!(seeds.windows(2).all(|w| w[0] == w[1]));
    }
}

#[test]
fn aggregates_recomputable_exactly() {
    let spec = tiny_spec();
    let result = run_sweep(&spec).unwrap();
    let recomputed = result.recompute_aggregates();
    assert_eq!(result.aggregates.len(), recomputed.len());
    for (a, b) in result.aggregates.iter().zip(recomputed.iter()) {
        assert_eq!(
            a.mean_spectral_efficiency.to_bits(),
            b.mean_spectral_efficiency.to_bits()
        );
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }
}

#[test]
fn digital_mean_rate_monotone_in_snr() {
    let mut spec = tiny_spec();
    spec.snr_grid_db = vec![-5.0, 0.0, 5.0, 10.0];
    spec.num_trials = 5;
    let result = run_sweep(&spec).unwrap();
    let means: Vec<f64> = spec
        .snr_grid_db
        .iter()
        .map(|&snr| {
            result
                .aggregates
                .iter()
                .find(|a| a.snr_db == snr)
                .unwrap()
                .mean_spectral_efficiency
        })
        .collect();
    for w in means.windows(2) {
        assert!(w[1] >= w[0], "mean SE decreased with SNR: {means:?}");
    }
}

#[test]
fn impossible_scenario_is_recorded_as_failure() {
    let mut spec = tiny_spec();
    // PU rank above what the paths can deliver: scenario generation fails,
    // the sweep continues and reports the failures.
    spec.system.l_p = 4;
    spec.system.t_p = 4;
    spec.system.r_p = 4;
    spec.system.n_p = 2;
    let result = run_sweep(&spec).unwrap();
    assert!(result.records.is_empty());
    assert_eq!(
        result.failures.len(),
        spec.methods.len() * spec.snr_grid_db.len() * spec.num_trials
    );
    assert!(result.failure_rate() > 0.99);
    // Failed cells still hold their place in the CSV grid.
    let csv = to_csv(&result);
    assert_eq!(
        csv.trim_end().lines().count(),
        1 + spec.methods.len() * spec.snr_grid_db.len() * spec.num_trials
    );
    assert!(csv.contains(",failed"));
}

#[test]
fn hybrid_receiver_records_convergence() {
    let mut spec = tiny_spec();
    spec.methods = vec![Method::HybridMi];
    spec.receiver = Receiver::HybridMmse;
    spec.num_trials = 1;
    spec.snr_grid_db = vec![10.0];
    let result = run_sweep(&spec).unwrap();
    assert_eq!(result.records.len(), 1);
    let record = &result.records[0];
    assert!(record.convergence.is_some());
    assert!(record.receiver_convergence.is_some());
    assert!(record.report.spectral_efficiency > 0.0);
}
