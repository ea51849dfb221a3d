//! Sweep execution: seeded scenario generation, per-method solves, paired
//! evaluation and deterministic aggregation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use cogmimo::channel::build_scenario;
use cogmimo::diagnostics::audit_convergence;
use cogmimo::digital::{digital_mmse_postcoder, solve_digital_precoder_ranked};
use cogmimo::hybrid_frob::solve_hybrid_frobenius;
use cogmimo::hybrid_mi::solve_hybrid_mi;
use cogmimo::hybrid_rx::solve_hybrid_postcoder;
use cogmimo::metrics::link_report;
use cogmimo::rng::split_seed;
use cogmimo::{AdmmTrace, LinkReport, Real, TerminationReason};

use crate::spec::{Method, Receiver, SweepSpec};
use crate::{Result, SimError};

/// Relative constraint violation above which a trial is recorded as failed
/// rather than aggregated.
const VIOLATION_CAP: Real = 1e-9;

/// Seed-domain tags so the per-trial solver streams never collide.
const DOMAIN_MI: u64 = 0x4d49;
const DOMAIN_FROB: u64 = 0x4652;
const DOMAIN_RX: u64 = 0x5258;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceSummary {
    pub termination: TerminationReason,
    pub iterations: usize,
    pub restarts: usize,
    pub inner_iterations: usize,
    pub final_primal_residual: Real,
    pub bounded_multiplier: bool,
    pub summable_diffs: bool,
    pub residual_vanishing: bool,
}

impl ConvergenceSummary {
    fn from_trace(trace: &AdmmTrace<Real>) -> Self {
        let audit = audit_convergence(trace);
        Self {
            termination: trace.termination,
            iterations: trace.iterations(),
            restarts: trace.restarts,
            inner_iterations: trace.total_inner_iterations(),
            final_primal_residual: trace.final_primal_residual(),
            bounded_multiplier: audit.bounded_multiplier,
            summable_diffs: audit.summable_diffs,
            residual_vanishing: audit.residual_vanishing,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub method: Method,
    pub snr_db: Real,
    pub trial: usize,
    pub seed: u64,
    pub report: LinkReport,
    /// Transmit-solver convergence; absent for the direct digital solve.
    pub convergence: Option<ConvergenceSummary>,
    /// Receiver-solver convergence when the hybrid receiver ran.
    pub receiver_convergence: Option<ConvergenceSummary>,
    pub solve_seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureRecord {
    pub method: Method,
    pub snr_db: Real,
    pub trial: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateRecord {
    pub method: Method,
    pub snr_db: Real,
    pub trials: usize,
    pub mean_spectral_efficiency: Real,
    pub std_error: Real,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub spec_digest: u64,
    pub base_seed: u64,
    pub build: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub records: Vec<TrialRecord>,
    pub failures: Vec<FailureRecord>,
    pub aggregates: Vec<AggregateRecord>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn failure_rate(&self) -> f64 {
        let total = self.records.len() + self.failures.len();
        if total == 0 {
            0.0
        } else {
            self.failures.len() as f64 / total as f64
        }
    }

    /// Recomputes the per-(method, SNR) aggregates from the records; used
    /// to check that stored aggregates are exact.
    pub fn recompute_aggregates(&self) -> Vec<AggregateRecord> {
        aggregate(&self.spec, &self.records)
    }
}

/// Evaluation of one (method, snr, trial) cell.
fn run_cell(
    spec: &SweepSpec,
    method: Method,
    snr_db: Real,
    trial: usize,
) -> std::result::Result<TrialRecord, String> {
    let seed = split_seed(spec.base_seed, trial as u64);
    let mut system = spec.system.clone();
    system.sigma_n_sq = spec.noise_power(snr_db);
    let scenario = build_scenario(&system, seed).map_err(|e| e.to_string())?;

    let started = std::time::Instant::now();
    // Hybrid methods keep their factored pair so the hybrid receiver can
    // consume it; the digital benchmark has no analog factorization.
    let (precoder, factored, convergence) = match method {
        Method::Digital => {
            let sol =
                solve_digital_precoder_ranked(&scenario, system.l_s).map_err(|e| e.to_string())?;
            (sol.f_d, None, None)
        }
        Method::HybridMi => {
            let (pre, trace) = solve_hybrid_mi(&scenario, &spec.admm, split_seed(seed, DOMAIN_MI))
                .map_err(|e| e.to_string())?;
            let product = pre.product();
            (
                product,
                Some(pre),
                Some(ConvergenceSummary::from_trace(&trace)),
            )
        }
        Method::HybridFrob => {
            let digital = solve_digital_precoder_ranked(&scenario, system.l_s)
                .map_err(|e| e.to_string())?;
            let (pre, trace) = solve_hybrid_frobenius(
                &scenario,
                &digital,
                &spec.frob,
                split_seed(seed, DOMAIN_FROB),
            )
            .map_err(|e| e.to_string())?;
            let product = pre.product();
            (
                product,
                Some(pre),
                Some(ConvergenceSummary::from_trace(&trace)),
            )
        }
    };

    // Receiver: the digital benchmark always uses its unconstrained MMSE
    // post-coder; hybrid methods use the configured receiver.
    let (postcoder, receiver_convergence) = match (factored, spec.receiver) {
        (Some(pair), Receiver::HybridMmse) => {
            let (post, trace) = solve_hybrid_postcoder(
                &scenario,
                &pair,
                spec.rx.beta,
                spec.rx.eps_g,
                spec.rx.eps_p2,
                spec.rx.n_max,
                split_seed(seed, DOMAIN_RX),
            )
            .map_err(|e| e.to_string())?;
            (
                post.product(),
                Some(ConvergenceSummary::from_trace(&trace)),
            )
        }
        _ => (
            digital_mmse_postcoder(&scenario, &precoder).map_err(|e| e.to_string())?,
            None,
        ),
    };
    let solve_seconds = started.elapsed().as_secs_f64();

    let report = link_report(&scenario, &precoder, &postcoder).map_err(|e| e.to_string())?;
    if report.power_violation > VIOLATION_CAP || report.interference_violation > VIOLATION_CAP {
        return Err(format!(
            "constraint violation beyond 1e-9: power {:e}, interference {:e}",
            report.power_violation, report.interference_violation
        ));
    }

    Ok(TrialRecord {
        method,
        snr_db,
        trial,
        seed,
        report,
        convergence,
        receiver_convergence,
        solve_seconds,
    })
}

fn aggregate(spec: &SweepSpec, records: &[TrialRecord]) -> Vec<AggregateRecord> {
    let mut out = Vec::new();
    for &method in &spec.methods {
        for &snr_db in &spec.snr_grid_db {
            let values: Vec<Real> = records
                .iter()
                .filter(|r| r.method == method && r.snr_db == snr_db)
                .map(|r| r.report.spectral_efficiency)
                .collect();
            if values.is_empty() {
                continue;
            }
            let n = values.len() as Real;
            let mean = values.iter().sum::<Real>() / n;
            let std_error = if values.len() > 1 {
                let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<Real>()
                    / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            out.push(AggregateRecord {
                method,
                snr_db,
                trials: values.len(),
                mean_spectral_efficiency: mean,
                std_error,
            });
        }
    }
    out
}

/// Runs the full sweep. Trials execute concurrently; the output ordering
/// is `(method, snr, trial)` regardless of completion order, so results
/// are deterministic given the spec.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;

    let mut cells: Vec<(Method, Real, usize)> = Vec::new();
    for &method in &spec.methods {
        for &snr in &spec.snr_grid_db {
            for trial in 0..spec.num_trials {
                cells.push((method, snr, trial));
            }
        }
    }

    let outcomes: Vec<std::result::Result<TrialRecord, FailureRecord>> = cells
        .par_iter()
        .map(|&(method, snr, trial)| {
            run_cell(spec, method, snr, trial).map_err(|error| FailureRecord {
                method,
                snr_db: snr,
                trial,
                seed: split_seed(spec.base_seed, trial as u64),
                error,
            })
        })
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(r) => records.push(r),
            Err(f) => failures.push(f),
        }
    }

    let aggregates = aggregate(spec, &records);
    Ok(SweepResult {
        provenance: Provenance {
            spec_digest: spec.digest(),
            base_seed: spec.base_seed,
            build: format!("cogmimo-sim {}", env!("CARGO_PKG_VERSION")),
        },
        spec: spec.clone(),
        records,
        failures,
        aggregates,
    })
}

/// Runs one (method, snr, trial) cell and returns its record.
pub fn run_single(spec: &SweepSpec, method: Method, snr_db: Real, trial: usize) -> Result<TrialRecord> {
    spec.validate()?;
    run_cell(spec, method, snr_db, trial).map_err(SimError::Spec)
}
