//! Seeded Monte Carlo sweep engine behind the `cogmimo` CLI.
//!
//! A sweep evaluates the selected transceiver designs over a grid of SNR
//! points and shared channel realizations: trial `t` derives its channel
//! seed from the base seed independently of the method, so every method
//! and SNR point sees identical channels and comparisons are paired.
//! Results are written as plot-ready CSV plus a JSON mirror with full
//! provenance; reruns with the same spec and seed produce byte-identical
//! CSV.

pub mod export;
pub mod run;
pub mod spec;

pub use run::{run_single, run_sweep, AggregateRecord, FailureRecord, SweepResult, TrialRecord};
pub use spec::{Method, Receiver, RxConfig, SweepSpec};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("solver error: {0}")]
    Solver(#[from] cogmimo::Error),
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse failure on {path}: {detail}")]
    Parse { path: String, detail: String },
    #[error("invalid sweep spec: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, SimError>;
