//! Hardware-constrained MMSE post-coder via ADMM.
//!
//! Minimizing the MSE over `W = W_RF W_BB` with unit-modulus `W_RF` is the
//! weighted projection `min ‖C^{1/2}(W_D − W_RF W_BB)‖_F²` of the
//! unconstrained MMSE post-coder `W_D`, where `C = E{y_s y_sᴴ}`. The
//! weighted distance equals `mse(W) − mse(W_D)` exactly, which is the
//! module's core correctness check. Every ADMM block update here is closed
//! form, so the trace records zero inner iterations.

use num_complex::Complex;

use crate::admm::{solve_gram_left, solve_gram_right_anchored, AdmmTrace, TerminationReason};
use crate::channel::ScenarioChannels;
use crate::digital::interference_plus_noise;
use crate::error::Error;
use crate::hybrid_mi::HybridPrecoder;
use crate::numerics::{psd_power, solve_linear, ComplexMatrix, PsdPower};
use crate::projections::project_unit_modulus;
use crate::rng::SeededRng;
use crate::scalar::Scalar;
use crate::Result;

/// Analog/digital post-coder pair; the analog part is unit-modulus.
#[derive(Debug, Clone)]
pub struct HybridPostcoder<T: Scalar> {
    pub w_rf: ComplexMatrix<T>,
    pub w_bb: ComplexMatrix<T>,
}

impl<T: Scalar> HybridPostcoder<T> {
    pub fn product(&self) -> ComplexMatrix<T> {
        &self.w_rf * &self.w_bb
    }

    pub fn validate(&self) -> Result<()> {
        self.w_rf.ensure_finite("HybridPostcoder")?;
        self.w_bb.ensure_finite("HybridPostcoder")?;
        for z in self.w_rf.entries_row_major() {
            if (crate::numerics::modulus(z) - T::one()).abs() > T::of(1e-12) {
                return Err(Error::Numerical {
                    context: "HybridPostcoder",
                    detail: format!(
                        "analog entry modulus {:.3e} is not 1",
                        crate::numerics::modulus(z).as_f64()
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Second-order statistics of the received signal for a fixed transmit
/// precoder: `C = E{y_s y_sᴴ}`, its PSD square root, and the unconstrained
/// MMSE post-coder `W_D = C^{-1} H_ss F`.
#[derive(Debug, Clone)]
pub struct RxCovariances<T: Scalar> {
    pub cov_ys: ComplexMatrix<T>,
    pub cov_ys_sqrt: ComplexMatrix<T>,
    pub w_d: ComplexMatrix<T>,
}

/// Builds [`RxCovariances`] for the effective precoder `F = F_RF F_BB`.
pub fn rx_covariances<T: Scalar>(
    scenario: &ScenarioChannels<T>,
    precoder: &ComplexMatrix<T>,
) -> Result<RxCovariances<T>> {
    let hf = &scenario.h_ss * precoder;
    let signal = (&hf * &hf.adjoint()).symmetrize();
    let q = interference_plus_noise(scenario);
    let cov_ys = (&signal + &q).symmetrize();
    let cov_ys_sqrt = psd_power(&cov_ys, PsdPower::Sqrt)?;
    // Contract check: the root reproduces the covariance.
    let rebuilt = (&cov_ys_sqrt * &cov_ys_sqrt).symmetrize();
    if rebuilt.dist_frob(&cov_ys) > T::of(1e-8) * cov_ys.frob_norm().max(T::one()) {
        return Err(Error::Numerical {
            context: "rx_covariances",
            detail: "covariance square root lost accuracy".into(),
        });
    }
    let w_d = solve_linear(&cov_ys, &hf)?;
    Ok(RxCovariances {
        cov_ys,
        cov_ys_sqrt,
        w_d,
    })
}

/// MSE of a linear receiver evaluated exactly from second-order
/// statistics: `E‖x_s − Wᴴy_s‖² = L_s σ_s² − 2 σ_s² Re tr(Wᴴ H F) + tr(Wᴴ C W)`.
pub fn closed_form_mse<T: Scalar>(
    scenario: &ScenarioChannels<T>,
    precoder: &ComplexMatrix<T>,
    postcoder: &ComplexMatrix<T>,
) -> T {
    let sigma_s_sq = scenario.config.sigma_s_sq;
    let streams = T::of(precoder.cols() as f64);
    let hf = &scenario.h_ss * precoder;
    let signal = (&hf * &hf.adjoint()).symmetrize();
    let q = interference_plus_noise(scenario);
    let cov = (&signal.scale_real(sigma_s_sq) + &q).symmetrize();
    let cross = postcoder.re_inner(&hf) * sigma_s_sq;
    let quad = postcoder.re_inner(&(&cov * postcoder));
    streams * sigma_s_sq - (cross + cross) + quad
}

/// ADMM solve of the weighted-projection problem. All block updates are
/// closed form. Deterministic given `(scenario, precoder, rng_seed)`.
#[allow(clippy::too_many_arguments)]
pub fn solve_hybrid_postcoder<T: Scalar>(
    scenario: &ScenarioChannels<T>,
    precoder: &HybridPrecoder<T>,
    beta: T,
    eps_g: T,
    eps_p2: T,
    n_max: usize,
    rng_seed: u64,
) -> Result<(HybridPostcoder<T>, AdmmTrace<T>)> {
    if beta <= T::zero() || eps_g <= T::zero() || eps_p2 <= T::zero() || n_max == 0 {
        return Err(Error::Config(
            "beta, tolerances and n_max must be positive".into(),
        ));
    }
    let cfg = &scenario.config;
    let cov = rx_covariances(scenario, &precoder.product())?;
    let c = &cov.cov_ys;
    let w_d = &cov.w_d;

    // (C + βI), reused every iteration.
    let mut c_shift = c.clone();
    for i in 0..c_shift.rows() {
        let v = c_shift.at(i, i) + Complex::new(beta, T::zero());
        c_shift.set(i, i, v);
    }
    let cw_d = c * w_d;

    let mut rng = SeededRng::from_seed(rng_seed);
    let mut w_rf = ComplexMatrix::<T>::random_unit_modulus(cfg.r_s, cfg.n_sr, &mut rng);
    let mut w_bb = ComplexMatrix::<T>::random_gaussian(cfg.n_sr, cfg.l_s, &mut rng);
    // Scale the random start onto the magnitude of the target post-coder.
    let target_norm = w_d.frob_norm().max(T::of(1e-12));
    let product_norm = (&w_rf * &w_bb).frob_norm();
    w_bb = w_bb.scale_real(target_norm / product_norm);
    let g_raw = ComplexMatrix::<T>::random_gaussian(cfg.r_s, cfg.l_s, &mut rng);
    let mut g = g_raw.scale_real(target_norm / g_raw.frob_norm());
    let mut pi = ComplexMatrix::<T>::zeros(cfg.r_s, cfg.l_s);

    let mut trace = AdmmTrace::new(eps_g, eps_p2);

    for _n in 1..=n_max {
        // (P8A): closed form from the zero-gradient condition.
        let g_prev = g;
        let rhs = &(&cw_d - &pi) + &(&w_rf * &w_bb).scale_real(beta);
        g = solve_linear(&c_shift, &rhs)?;
        let dg = g.dist_frob(&g_prev);

        // (P8B): analog update against the previous digital iterate.
        let target = &g + &pi.scale_real(T::one() / beta);
        let gram_bb = (&w_bb * &w_bb.adjoint()).symmetrize();
        let unconstrained = solve_gram_right_anchored(
            &w_rf,
            &(&target * &w_bb.adjoint()),
            &gram_bb,
            "rx analog update",
        )?;
        w_rf = project_unit_modulus(&unconstrained);

        // (P8C): digital update.
        let gram_rf = (&w_rf.adjoint() * &w_rf).symmetrize();
        w_bb = solve_gram_left(&gram_rf, &(&w_rf.adjoint() * &target), "rx digital update")?;

        // (P8D): multiplier ascent.
        let product = &w_rf * &w_bb;
        let gap = &g - &product;
        let pi_next = &pi + &gap.scale_real(beta);
        let pi_diff = pi_next.dist_frob(&pi);
        pi = pi_next;

        let primal = gap.frob_norm();
        let weighted = &cov.cov_ys_sqrt * &(w_d - &g);
        let lagrangian = weighted.frob_norm_sq()
            + pi.re_inner(&gap)
            + beta * T::of(0.5) * gap.frob_norm_sq();
        trace.primal_residual.push(primal);
        trace.successive_change.push(dg);
        trace.lagrangian.push(lagrangian);
        trace.multiplier_norm.push(pi.frob_norm());
        trace.multiplier_diff_norm.push(pi_diff);
        trace.inner_iterations.push(0);
        trace.inner_tolerance.push(T::zero());

        if dg <= eps_g && primal <= eps_p2 {
            trace.termination = TerminationReason::TolerancesMet;
            break;
        }
    }

    // No feasibility projection here: the receiver carries no power or
    // interference constraint.
    let postcoder = HybridPostcoder { w_rf, w_bb };
    postcoder.validate()?;
    trace.final_split_variable = Some(g);
    trace.final_multiplier = Some(pi);
    Ok((postcoder, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_scenario, SystemConfig};
    use crate::hybrid_mi::{solve_hybrid_mi, AdmmConfig};
    use crate::{CMat, Cx, Real};

    fn scenario_8x4(seed: u64) -> crate::ScenarioChannels {
        let mut c = SystemConfig::<Real>::default_64x16();
        c.t_s = 8;
        c.r_s = 4;
        c.t_p = 4;
        c.r_p = 4;
        c.n_st = 4;
        c.n_sr = 4;
        c.l_s = 2;
        c.l_p = 2;
        build_scenario(&c, seed).unwrap()
    }

    fn solved_precoder(scenario: &crate::ScenarioChannels, seed: u64) -> crate::HybridPrecoder {
        solve_hybrid_mi(scenario, &AdmmConfig::default(), seed)
            .unwrap()
            .0
    }

    #[test]
    fn weighted_distance_equals_mse_gap() {
        // ‖C^{1/2}(W_D − W)‖² = mse(W) − mse(W_D), the algebra behind the
        // weighted-projection formulation.
        for seed in 0..5 {
            let scenario = scenario_8x4(seed);
            let precoder = solved_precoder(&scenario, 50 + seed);
            let f = precoder.product();
            let cov = rx_covariances(&scenario, &f).unwrap();
            let mut rng = crate::rng::SeededRng::from_seed(99 + seed);
            for _ in 0..5 {
                let w = CMat::random_gaussian(4, 2, &mut rng);
                let weighted = (&cov.cov_ys_sqrt * &(&cov.w_d - &w)).frob_norm_sq();
                let gap = closed_form_mse(&scenario, &f, &w)
                    - closed_form_mse(&scenario, &f, &cov.w_d);
                assert!(
                    (weighted - gap).abs() < 1e-8 * weighted.max(1.0),
                    "identity broke: {weighted} vs {gap}"
                );
            }
        }
    }

    #[test]
    fn mse_of_zero_receiver_is_stream_count() {
        let scenario = scenario_8x4(1);
        let f = CMat::random_gaussian(8, 2, &mut crate::rng::SeededRng::from_seed(5));
        let w = CMat::zeros(4, 2);
        let mse = closed_form_mse(&scenario, &f, &w);
        assert!((mse - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mse_scalar_case() {
        // h = f = σ_n = 1 and w = 1/2: mse = 1 − 2·(1/2) + (1/4)·2 = 1/2.
        let mut c = SystemConfig::<Real>::default_64x16();
        c.t_s = 1;
        c.r_s = 1;
        c.t_p = 1;
        c.r_p = 1;
        c.n_st = 1;
        c.n_sr = 1;
        c.l_s = 1;
        c.l_p = 1;
        c.sigma_n_sq = 1.0;
        let h_ss = CMat::from_rows(1, 1, &[Cx::new(1.0, 0.0)]);
        let h_ps = CMat::zeros(1, 1);
        let h_sp = CMat::zeros(1, 1);
        let f_p = CMat::from_rows(1, 1, &[Cx::new(1.0, 0.0)]);
        let scenario =
            crate::channel::ScenarioChannels::from_parts(h_ss, h_ps, &h_sp, f_p, c).unwrap();
        let f = CMat::from_rows(1, 1, &[Cx::new(1.0, 0.0)]);
        let w = CMat::from_rows(1, 1, &[Cx::new(0.5, 0.0)]);
        let mse = closed_form_mse(&scenario, &f, &w);
        assert!((mse - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hybrid_mse_never_beats_unconstrained() {
        for seed in 0..5 {
            let scenario = scenario_8x4(10 + seed);
            let precoder = solved_precoder(&scenario, 20 + seed);
            let f = precoder.product();
            let cov = rx_covariances(&scenario, &f).unwrap();
            let (post, trace) =
                solve_hybrid_postcoder(&scenario, &precoder, 1.0, 1e-3, 1e-4, 500, 7 + seed)
                    .unwrap();
            assert!(trace.total_inner_iterations() == 0);
            let mse_hybrid = closed_form_mse(&scenario, &f, &post.product());
            let mse_digital = closed_form_mse(&scenario, &f, &cov.w_d);
            assert!(
                mse_hybrid >= mse_digital - 1e-10,
                "hybrid {mse_hybrid} beat digital {mse_digital}"
            );
        }
    }

    #[test]
    fn full_rf_receiver_reaches_digital_postcoder() {
        // With as many receive chains as antennas the factorization is
        // unconstrained in effect; the weighted distance collapses.
        for seed in 0..20 {
            let mut c = SystemConfig::<Real>::default_64x16();
            c.t_s = 8;
            c.r_s = 4;
            c.t_p = 4;
            c.r_p = 4;
            c.n_st = 4;
            c.n_sr = 4; // equals r_s
            c.l_s = 2;
            c.l_p = 2;
            let scenario = build_scenario(&c, 700 + seed).unwrap();
            let precoder = solved_precoder(&scenario, 800 + seed);
            let f = precoder.product();
            let cov = rx_covariances(&scenario, &f).unwrap();
            let (post, _) =
                solve_hybrid_postcoder(&scenario, &precoder, 1.0, 1e-5, 1e-6, 500, 31 + seed)
                    .unwrap();
            let num = (&cov.cov_ys_sqrt * &(&cov.w_d - &post.product())).frob_norm();
            let den = (&cov.cov_ys_sqrt * &cov.w_d).frob_norm();
            assert!(
                num <= 1e-3 * den,
                "seed {seed}: weighted distance ratio {}",
                num / den
            );
        }
    }

    #[test]
    fn zero_target_drives_digital_part_to_zero() {
        // F = 0 and no PU interference: W_D = 0 and the ADMM collapses the
        // digital part onto zero.
        let mut c = SystemConfig::<Real>::default_64x16();
        c.t_s = 4;
        c.r_s = 4;
        c.t_p = 2;
        c.r_p = 2;
        c.n_st = 2;
        c.n_sr = 2;
        c.l_s = 2;
        c.l_p = 2;
        let h_ss = CMat::zeros(4, 4);
        let h_ps = CMat::zeros(2, 4);
        let h_sp = CMat::zeros(4, 2);
        let f_p = CMat::from_fn(2, 2, |i, j| {
            if i == j {
                Cx::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
            } else {
                Cx::new(0.0, 0.0)
            }
        });
        let scenario =
            crate::channel::ScenarioChannels::from_parts(h_ss, h_ps, &h_sp, f_p, c).unwrap();
        let mut rng = crate::rng::SeededRng::from_seed(3);
        let precoder = crate::HybridPrecoder {
            f_rf: CMat::random_unit_modulus(4, 2, &mut rng),
            f_bb: CMat::zeros(2, 2),
        };
        let (post, _) =
            solve_hybrid_postcoder(&scenario, &precoder, 1.0, 1e-6, 1e-7, 500, 9).unwrap();
        assert!(post.w_bb.frob_norm() < 1e-5);
        assert!(post.product().frob_norm() < 1e-5);
    }
}
