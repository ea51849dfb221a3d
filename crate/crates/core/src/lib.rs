//! Hybrid analog/digital transceiver design for an underlay cognitive-radio
//! MIMO link with large antenna arrays.
//!
//! A secondary user (SU) shares spectrum with a licensed primary user (PU)
//! under a transmit-power budget and an interference-temperature cap at the
//! PU receiver. Because the SU arrays are large, the beamformers are
//! factored into a phase-shifter (unit-modulus) analog part and a small
//! digital part. The crate provides:
//!
//! - [`digital`]: the fully digital benchmark — capacity-optimal precoder
//!   under both trace constraints (dual water-filling) and the linear MMSE
//!   post-coder,
//! - [`hybrid_mi`]: ADMM solver for the hybrid precoder that maximizes
//!   mutual information directly,
//! - [`hybrid_frob`]: reduced-complexity ADMM solver that matches the
//!   hybrid precoder to the digital optimum in Frobenius distance,
//! - [`hybrid_rx`]: ADMM solver for the hardware-constrained MMSE
//!   post-coder,
//! - [`projections`]: the projection operators (unit-modulus set and the
//!   power-plus-interference trace-constraint sets) all solvers share,
//! - [`channel`]: geometric multipath channel realizations and scenario
//!   assembly,
//! - [`metrics`] / [`diagnostics`]: spectral efficiency, feasibility audits
//!   and ADMM convergence audits.
//!
//! The math is generic over the real scalar type through [`Scalar`];
//! `f64` is the supported and tested precision (the solver tolerances leave
//! no headroom in single precision) and the crate-root aliases below pin it.

pub mod channel;
pub mod diagnostics;
pub mod digital;
pub mod error;
pub mod hybrid_frob;
pub mod hybrid_mi;
pub mod hybrid_rx;
pub mod metrics;
pub mod numerics;
pub mod projections;
pub mod rng;
pub mod scalar;

mod admm;

pub use admm::{AdmmTrace, TerminationReason};
pub use error::Error;
pub use scalar::Scalar;

/// Default real scalar used by the simulation harness and all tests.
pub type Real = f64;

/// Complex matrix over the default scalar.
pub type CMat = numerics::ComplexMatrix<Real>;

/// Complex number over the default scalar.
pub type Cx = num_complex::Complex<Real>;

pub type SystemConfig = channel::SystemConfig<Real>;
pub type ScenarioChannels = channel::ScenarioChannels<Real>;
pub type AdmmConfig = hybrid_mi::AdmmConfig<Real>;
pub type FrobConfig = hybrid_frob::FrobConfig<Real>;
pub type HybridPrecoder = hybrid_mi::HybridPrecoder<Real>;
pub type HybridPostcoder = hybrid_rx::HybridPostcoder<Real>;
pub type DigitalSolution = digital::DigitalSolution<Real>;
pub type LinkReport = metrics::LinkReport<Real>;
pub type ConvergenceAudit = diagnostics::ConvergenceAudit<Real>;

pub type Result<T> = std::result::Result<T, Error>;
