//! Iteration records and small helpers shared by the three ADMM solvers.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::numerics::{solve_linear, ComplexMatrix};
use crate::scalar::Scalar;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminationReason {
    TolerancesMet,
    NMaxReached,
}

impl std::fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TerminationReason::TolerancesMet => write!(f, "tolerances-met"),
            TerminationReason::NMaxReached => write!(f, "n-max-reached"),
        }
    }
}

/// Per-iteration history of one ADMM solve.
///
/// `primal_residual[n]` is the equality-constraint violation
/// `‖Z_n − F_RF(n) F_BB(n)‖_F`, `successive_change[n]` the step
/// `‖Z_n − Z_{n−1}‖_F`, and `multiplier_diff_norm[n]` the multiplier step
/// `‖Λ_n − Λ_{n−1}‖_F` whose square-summability the convergence audit
/// checks. Solvers without an inner iterative loop record zero
/// `inner_iterations` everywhere.
#[derive(Debug, Clone)]
pub struct AdmmTrace<T: Scalar> {
    pub primal_residual: Vec<T>,
    pub successive_change: Vec<T>,
    pub lagrangian: Vec<T>,
    pub multiplier_norm: Vec<T>,
    pub multiplier_diff_norm: Vec<T>,
    pub inner_iterations: Vec<usize>,
    pub inner_tolerance: Vec<T>,
    pub termination: TerminationReason,
    /// Fresh-initialization retries that preceded this trace's attempt.
    pub restarts: usize,
    /// Tolerances the run used, kept so audits can judge the final state.
    pub eps_primal: T,
    pub eps_change: T,
    /// Final primal point and multiplier for stationarity spot checks.
    pub final_split_variable: Option<ComplexMatrix<T>>,
    pub final_multiplier: Option<ComplexMatrix<T>>,
}

impl<T: Scalar> AdmmTrace<T> {
    pub(crate) fn new(eps_change: T, eps_primal: T) -> Self {
        Self {
            primal_residual: Vec::new(),
            successive_change: Vec::new(),
            lagrangian: Vec::new(),
            multiplier_norm: Vec::new(),
            multiplier_diff_norm: Vec::new(),
            inner_iterations: Vec::new(),
            inner_tolerance: Vec::new(),
            termination: TerminationReason::NMaxReached,
            restarts: 0,
            eps_primal,
            eps_change,
            final_split_variable: None,
            final_multiplier: None,
        }
    }

    pub fn iterations(&self) -> usize {
        self.primal_residual.len()
    }

    pub fn final_primal_residual(&self) -> T {
        self.primal_residual.last().copied().unwrap_or_else(T::zero)
    }

    pub fn total_inner_iterations(&self) -> usize {
        self.inner_iterations.iter().sum()
    }
}

/// Solves `X G = RHS` for Hermitian `G` with a diagonal ridge
/// `1e-10 · trace(G)/n` added before the solve. `F_BB F_BBᴴ` is
/// structurally rank deficient whenever `L_s < N_st`, and an unridged
/// solve of such a system returns arbitrary null-space components even
/// when its residual looks clean; the ridge pins the stable solution.
pub(crate) fn solve_gram_right<T: Scalar>(
    rhs: &ComplexMatrix<T>,
    gram: &ComplexMatrix<T>,
    context: &'static str,
) -> Result<ComplexMatrix<T>> {
    // X G = RHS with Hermitian G is G Xᴴ = RHSᴴ.
    let adjoint_rhs = rhs.adjoint();
    match solve_linear(&add_ridge(gram), &adjoint_rhs) {
        Ok(x) => Ok(x.adjoint()),
        Err(Error::Singular { .. }) => Err(Error::Numerical {
            context,
            detail: "Gram matrix singular even after ridge regularization".into(),
        }),
        Err(e) => Err(e),
    }
}

/// Solves `X G = RHS` like [`solve_gram_right`], but when `G` is rank
/// deficient the minimizer is non-unique and the tie is broken toward
/// `anchor`: `X = anchor + (RHS − anchor·G)(G + ridge)^{-1}` equals the
/// unique solution whenever `G` is invertible, and otherwise keeps the
/// anchor's null-space component instead of zeroing it. Letting the
/// analog iterate wander the null space makes the alternation cycle.
pub(crate) fn solve_gram_right_anchored<T: Scalar>(
    anchor: &ComplexMatrix<T>,
    rhs: &ComplexMatrix<T>,
    gram: &ComplexMatrix<T>,
    context: &'static str,
) -> Result<ComplexMatrix<T>> {
    let correction_rhs = rhs - &(anchor * gram);
    let correction = solve_gram_right(&correction_rhs, gram, context)?;
    Ok(anchor + &correction)
}

/// Solves `G X = RHS` with the same ridge.
pub(crate) fn solve_gram_left<T: Scalar>(
    gram: &ComplexMatrix<T>,
    rhs: &ComplexMatrix<T>,
    context: &'static str,
) -> Result<ComplexMatrix<T>> {
    match solve_linear(&add_ridge(gram), rhs) {
        Ok(x) => Ok(x),
        Err(Error::Singular { .. }) => Err(Error::Numerical {
            context,
            detail: "Gram matrix singular even after ridge regularization".into(),
        }),
        Err(e) => Err(e),
    }
}

fn add_ridge<T: Scalar>(gram: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = gram.rows();
    let ridge = T::of(1e-10) * gram.trace().re.abs().max(T::one()) / T::of(n as f64);
    let mut out = gram.clone();
    for i in 0..n {
        let v = out.at(i, i) + Complex::new(ridge, T::zero());
        out.set(i, i, v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use crate::{CMat, Real};

    #[test]
    fn gram_solve_handles_rank_deficiency() {
        // F_BB with fewer columns than rows: F_BB F_BBᴴ is singular. The
        // analog update's right-hand side is `target F_BBᴴ`, consistent by
        // construction, and the ridged solve must return a stable solution
        // whose residual against the unridged system stays small.
        let mut rng = SeededRng::from_seed(1);
        let f_bb = CMat::random_gaussian(4, 2, &mut rng);
        let gram = (&f_bb * &f_bb.adjoint()).symmetrize();
        let target = CMat::random_gaussian(3, 2, &mut rng);
        let rhs = &target * &f_bb.adjoint();
        let x = solve_gram_right(&rhs, &gram, "test").unwrap();
        assert!(x.is_finite());
        assert_eq!(x.shape(), (3, 4));
        let res: Real = (&(&x * &gram) - &rhs).frob_norm();
        assert!(res <= 1e-7 * rhs.frob_norm(), "residual {res}");
    }

    #[test]
    fn gram_solve_exact_when_invertible() {
        let mut rng = SeededRng::from_seed(2);
        let a = CMat::random_gaussian(3, 3, &mut rng);
        let gram = (&a * &a.adjoint()).symmetrize();
        let rhs = CMat::random_gaussian(2, 3, &mut rng);
        let x = solve_gram_right(&rhs, &gram, "test").unwrap();
        let res: Real = (&(&x * &gram) - &rhs).frob_norm();
        assert!(res < 1e-8 * rhs.frob_norm());
    }
}
