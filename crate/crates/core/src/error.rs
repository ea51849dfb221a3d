//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("matrix is not Hermitian: relative deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is singular in {context}: eigenvalue {eigenvalue:.6e} below floor {floor:.6e}")]
    SingularEigenvalue {
        context: &'static str,
        eigenvalue: f64,
        floor: f64,
    },

    #[error("linear system is singular or too ill-conditioned in {context}")]
    Singular { context: &'static str },

    #[error(
        "bisection for {context} did not converge: bracket [{lo:.6e}, {hi:.6e}], \
         residuals [{residual_lo:.6e}, {residual_hi:.6e}]"
    )]
    BisectionBracket {
        context: &'static str,
        lo: f64,
        hi: f64,
        residual_lo: f64,
        residual_hi: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical failure in {context}: {detail}")]
    Numerical { context: &'static str, detail: String },

    #[error("non-finite entry produced by {context}")]
    NonFinite { context: &'static str },
}
