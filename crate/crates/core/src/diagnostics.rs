//! Empirical convergence auditing shared by the three ADMM solvers.
//!
//! The theoretical convergence argument rests on a bounded multiplier
//! sequence with square-summable steps and a vanishing primal residual;
//! those hypotheses are checkable on any finished run, and this module
//! turns them into verdict flags. The thresholds (10³ × median for
//! boundedness, a ≤5% tail share of the cumulative squared multiplier
//! steps for summability) are flagging heuristics, not claims.

use serde::{Deserialize, Serialize};

use crate::admm::AdmmTrace;
use crate::channel::ScenarioChannels;
use crate::hybrid_mi::augmented_lagrangian_gradient;
use crate::numerics::ComplexMatrix;
use crate::scalar::Scalar;
use crate::Result;

/// Verdicts plus the series they were judged on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceAudit<T: Scalar> {
    pub multiplier_norm_series: Vec<T>,
    /// Running sum of `‖Λ_n − Λ_{n−1}‖_F²`.
    pub multiplier_diff_sq_cumsum: Vec<T>,
    pub primal_residual_series: Vec<T>,
    pub lagrangian_series: Vec<T>,
    pub bounded_multiplier: bool,
    pub summable_diffs: bool,
    pub residual_vanishing: bool,
}

impl<T: Scalar> ConvergenceAudit<T> {
    pub fn all_true(&self) -> bool {
        self.bounded_multiplier && self.summable_diffs && self.residual_vanishing
    }
}

/// Judges one finished trace. Pure function of the trace.
pub fn audit_convergence<T: Scalar>(trace: &AdmmTrace<T>) -> ConvergenceAudit<T> {
    let norms = trace.multiplier_norm.clone();
    let n = norms.len();
    assert!(n > 0, "audit needs a non-empty trace");

    let mut cumsum = Vec::with_capacity(n);
    let mut acc = T::zero();
    for d in &trace.multiplier_diff_norm {
        acc += *d * *d;
        cumsum.push(acc);
    }
    let total = acc;

    // Bounded: the peak stays within 10³ of the median norm.
    let mut sorted = norms.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) * T::of(0.5)
    };
    let peak = sorted[n - 1];
    let bounded_multiplier = peak <= T::of(1e3) * median;

    // Summable: the last decile of iterations contributes ≤ 5% of the
    // cumulative sum of squared multiplier steps.
    let tail = (n / 10).max(1);
    let tail_sum = if n > tail {
        total - cumsum[n - tail - 1]
    } else {
        total
    };
    let summable_diffs = total == T::zero() || tail_sum <= T::of(0.05) * total;

    let residual_vanishing = trace.final_primal_residual() <= trace.eps_primal;

    ConvergenceAudit {
        multiplier_norm_series: norms,
        multiplier_diff_sq_cumsum: cumsum,
        primal_residual_series: trace.primal_residual.clone(),
        lagrangian_series: trace.lagrangian.clone(),
        bounded_multiplier,
        summable_diffs,
        residual_vanishing,
    }
}

/// Stationarity spot check at the returned split point of the
/// mutual-information solver: the augmented-Lagrangian gradient at the
/// final `(Z, Λ)`, reduced by the best nonnegative combination of the
/// active constraint gradients `2Z` and `2 H_psᴴH_ps Z`.
pub fn mi_stationarity_residual<T: Scalar>(
    scenario: &ScenarioChannels<T>,
    trace: &AdmmTrace<T>,
    f_rf: &ComplexMatrix<T>,
    f_bb: &ComplexMatrix<T>,
    alpha: T,
) -> Result<T> {
    let z = trace
        .final_split_variable
        .as_ref()
        .expect("trace carries the final split variable");
    let lambda = trace
        .final_multiplier
        .as_ref()
        .expect("trace carries the final multiplier");
    let grad = augmented_lagrangian_gradient(scenario, z, f_rf, f_bb, lambda, alpha)?;

    let gram = (&scenario.h_ps.adjoint() * &scenario.h_ps).symmetrize();
    let g1 = z.scale_real(T::of(2.0));
    let g2 = (&gram * z).scale_real(T::of(2.0));

    // min over c1, c2 ≥ 0 of ‖grad + c1 g1 + c2 g2‖_F: a 2×2 nonnegative
    // least squares solved by enumerating the active sign patterns.
    let a11 = g1.re_inner(&g1);
    let a22 = g2.re_inner(&g2);
    let a12 = g1.re_inner(&g2);
    let b1 = -g1.re_inner(&grad);
    let b2 = -g2.re_inner(&grad);
    let eps = T::of(1e-30);
    let mut best: Option<(T, T)> = None;
    let det = a11 * a22 - a12 * a12;
    if det > eps {
        let c1 = (b1 * a22 - b2 * a12) / det;
        let c2 = (b2 * a11 - b1 * a12) / det;
        if c1 >= T::zero() && c2 >= T::zero() {
            best = Some((c1, c2));
        }
    }
    if best.is_none() {
        let mut candidates = vec![(T::zero(), T::zero())];
        if a11 > eps {
            candidates.push(((b1 / a11).max(T::zero()), T::zero()));
        }
        if a22 > eps {
            candidates.push((T::zero(), (b2 / a22).max(T::zero())));
        }
        let mut best_val = T::max_value().unwrap_or_else(|| T::of(f64::MAX));
        for (c1, c2) in candidates {
            let r = &(&grad + &g1.scale_real(c1)) + &g2.scale_real(c2);
            let v = r.frob_norm();
            if v < best_val {
                best_val = v;
                best = Some((c1, c2));
            }
        }
    }
    let (c1, c2) = best.unwrap_or((T::zero(), T::zero()));
    let residual = &(&grad + &g1.scale_real(c1)) + &g2.scale_real(c2);
    Ok(residual.frob_norm())
}
