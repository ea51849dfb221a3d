//! Mutual-information-maximizing hybrid precoder via ADMM with a
//! projected-gradient inner solve.
//!
//! The split variable `Z` carries the effective precoder `F_RF F_BB`
//! (`T_s × L_s`); the equality constraint ties the two together. One outer
//! iteration is
//!
//! 1. inner projected gradient for `Z` on the augmented Lagrangian over
//!    the power/interference set,
//! 2. least-squares update of the analog part followed by the elementwise
//!    phase projection,
//! 3. least-squares update of the digital part,
//! 4. gradient ascent on the multiplier,
//!
//! terminating when both the step `‖Z_n − Z_{n−1}‖_F` and the primal
//! residual `‖Z_n − F_RF F_BB‖_F` fall under their tolerances. The inner
//! tolerance starts loose and tightens as the outer residual shrinks:
//! the inner solve stops once its step implies a stationarity error well
//! under the current primal residual, so early iterations stay cheap and
//! late ones are solved nearly exactly. A loose fixed inner tolerance
//! lets the three-block iteration fall into limit cycles, so the
//! tightening is load-bearing, not a refinement.
//!
//! The phase projection makes the problem nonconvex, and on a minority of
//! starts the iteration orbits instead of converging; when the iteration
//! cap is exhausted without meeting tolerances the solver restarts from a
//! fresh seeded initialization (up to `max_restarts` times) and returns
//! the best attempt. The returned digital precoder is projected onto the
//! post-hoc feasibility set so the final pair always satisfies both
//! constraints.

use serde::{Deserialize, Serialize};

use crate::admm::{solve_gram_left, solve_gram_right_anchored, AdmmTrace, TerminationReason};
use crate::channel::ScenarioChannels;
use crate::digital::interference_plus_noise;
use crate::error::Error;
use crate::numerics::{
    log2_det_i_plus_gram, psd_power, solve_linear, ComplexMatrix, PsdPower,
};
use crate::projections::{project_unit_modulus, HybridFeasibilitySet, TraceConstraintSet};
use crate::rng::SeededRng;
use crate::scalar::Scalar;
use crate::Result;

/// ADMM penalty, step size, tolerances and iteration caps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdmmConfig<T: Scalar> {
    /// Penalty weight on the equality constraint.
    pub alpha: T,
    /// Inner projected-gradient step size.
    pub mu: T,
    /// Tolerance on `‖Z_n − Z_{n−1}‖_F`.
    pub eps_z: T,
    /// Tolerance on the primal residual `‖Z_n − F_RF F_BB‖_F`.
    pub eps_p: T,
    /// Initial (and largest) inner tolerance on the squared step.
    pub eps_gd_initial: T,
    /// Floor of the tightening schedule.
    pub eps_gd_floor: T,
    /// Outer iteration cap.
    pub n_max: usize,
    /// Inner iteration cap per outer step.
    pub gd_max_iters: usize,
    /// Fresh-initialization retries when `n_max` exhausts without meeting
    /// the tolerances.
    pub max_restarts: usize,
}

impl<T: Scalar> Default for AdmmConfig<T> {
    fn default() -> Self {
        Self {
            alpha: T::of(10.0),
            mu: T::of(1e-3),
            eps_z: T::of(1e-3),
            eps_p: T::of(1e-4),
            eps_gd_initial: T::of(1e-2),
            eps_gd_floor: T::of(1e-18),
            n_max: 500,
            gd_max_iters: 2000,
            max_restarts: 2,
        }
    }
}

impl<T: Scalar> AdmmConfig<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("mu", self.mu),
            ("eps_z", self.eps_z),
            ("eps_p", self.eps_p),
            ("eps_gd_initial", self.eps_gd_initial),
            ("eps_gd_floor", self.eps_gd_floor),
        ] {
            if v <= T::zero() {
                return Err(Error::Config(format!("{name} must be > 0")));
            }
        }
        if self.n_max == 0 || self.gd_max_iters == 0 {
            return Err(Error::Config("iteration caps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Analog/digital precoder pair. The analog part is unit-modulus; after
/// the final feasibility projection the product satisfies both trace
/// constraints.
#[derive(Debug, Clone)]
pub struct HybridPrecoder<T: Scalar> {
    pub f_rf: ComplexMatrix<T>,
    pub f_bb: ComplexMatrix<T>,
}

impl<T: Scalar> HybridPrecoder<T> {
    pub fn product(&self) -> ComplexMatrix<T> {
        &self.f_rf * &self.f_bb
    }

    /// Checks the type invariants: unit-modulus analog entries within
    /// 1e-12 and both constraints within 1e-9 relative.
    pub fn validate(&self, scenario: &ScenarioChannels<T>) -> Result<()> {
        self.f_rf.ensure_finite("HybridPrecoder")?;
        self.f_bb.ensure_finite("HybridPrecoder")?;
        for z in self.f_rf.entries_row_major() {
            if (crate::numerics::modulus(z) - T::one()).abs() > T::of(1e-12) {
                return Err(Error::Numerical {
                    context: "HybridPrecoder",
                    detail: format!(
                        "analog entry modulus {:.3e} is not 1",
                        crate::numerics::modulus(z).as_f64()
                    ),
                });
            }
        }
        let product = self.product();
        let power = product.frob_norm_sq();
        let interference = (&scenario.h_ps * &product).frob_norm_sq();
        let cfg = &scenario.config;
        let slack = T::one() + T::of(1e-9);
        if power > cfg.p_max * slack {
            return Err(Error::Numerical {
                context: "HybridPrecoder",
                detail: format!("power {:.6e} exceeds budget", power.as_f64()),
            });
        }
        if interference > cfg.i_max * slack {
            return Err(Error::Numerical {
                context: "HybridPrecoder",
                detail: format!(
                    "interference exceeds cap by {:.6e} relative",
                    (interference / cfg.i_max - T::one()).as_f64()
                ),
            });
        }
        Ok(())
    }
}

/// Whitened channel and constraint set, computed once per solve.
pub(crate) struct MiOperator<T: Scalar> {
    pub h_tilde: ComplexMatrix<T>,
    pub set: TraceConstraintSet<T>,
    /// Whitened channel expressed in the constraint set's eigenbasis,
    /// `H̃ V`; the inner loop works entirely in those coordinates.
    w_rotated: ComplexMatrix<T>,
}

impl<T: Scalar> MiOperator<T> {
    pub fn new(scenario: &ScenarioChannels<T>) -> Result<Self> {
        let q = interference_plus_noise(scenario);
        let q_inv_sqrt = psd_power(&q, PsdPower::InvSqrt)?;
        let h_tilde =
            (&q_inv_sqrt * &scenario.h_ss).scale_real(scenario.config.sigma_s_sq.sqrt());
        let set = TraceConstraintSet::new(
            scenario.h_ps.clone(),
            scenario.config.p_max,
            scenario.config.i_max,
        )?;
        let w_rotated = &h_tilde * set.eigen_basis();
        Ok(Self {
            h_tilde,
            set,
            w_rotated,
        })
    }

    /// Gradient of the augmented Lagrangian in `Z`:
    /// `−(2/ln2) H̃ᴴ C (I + CᴴC)^{-1} + Λ + α(Z − F_RF F_BB)` with `C = H̃Z`.
    fn gradient(
        &self,
        z: &ComplexMatrix<T>,
        product: &ComplexMatrix<T>,
        lambda: &ComplexMatrix<T>,
        alpha: T,
    ) -> Result<ComplexMatrix<T>> {
        let c = &self.h_tilde * z;
        let l = c.cols();
        let gram = &(&ComplexMatrix::identity(l) + &(&c.adjoint() * &c).symmetrize()).symmetrize();
        // C (I + CᴴC)^{-1} via the Hermitian system (I + CᴴC) Xᴴ = Cᴴ.
        let x = solve_linear(gram, &c.adjoint())?.adjoint();
        let smooth = (&self.h_tilde.adjoint() * &x)
            .scale_real(-T::of(2.0) / T::of(std::f64::consts::LN_2));
        let penalty = (z - product).scale_real(alpha);
        Ok(&(&smooth + lambda) + &penalty)
    }

    fn lagrangian(
        &self,
        z: &ComplexMatrix<T>,
        product: &ComplexMatrix<T>,
        lambda: &ComplexMatrix<T>,
        alpha: T,
    ) -> Result<T> {
        let mi = log2_det_i_plus_gram(&(&self.h_tilde * z))?;
        let gap = z - product;
        Ok(-mi + lambda.re_inner(&gap) + alpha * T::of(0.5) * gap.frob_norm_sq())
    }

    /// Projected gradient in the eigenbasis of the constraint set: the
    /// projection there is a row rescale whose multipliers warm-start
    /// from the previous step, which is what makes tight inner solves
    /// affordable.
    #[allow(clippy::too_many_arguments)]
    fn projected_gradient(
        &self,
        z_init: &ComplexMatrix<T>,
        product: &ComplexMatrix<T>,
        lambda: &ComplexMatrix<T>,
        alpha: T,
        mu: T,
        eps_gd: T,
        cap: usize,
        warm: &mut (T, T),
    ) -> Result<(ComplexMatrix<T>, usize)> {
        let ln2_factor = -T::of(2.0) / T::of(std::f64::consts::LN_2);
        let lambda_rot = self.set.rotate(lambda);
        let product_rot = self.set.rotate(product);
        let mut z = self.set.project_rotated_warm(&self.set.rotate(z_init), warm)?;
        let l = z.cols();
        let id = ComplexMatrix::<T>::identity(l);
        let mut iters = cap;
        for iter in 1..=cap {
            let c = &self.w_rotated * &z;
            let gram = (&id + &(&c.adjoint() * &c).symmetrize()).symmetrize();
            let x = solve_linear(&gram, &c.adjoint())?.adjoint();
            let smooth = (&self.w_rotated.adjoint() * &x).scale_real(ln2_factor);
            let grad = &(&smooth + &lambda_rot) + &(&z - &product_rot).scale_real(alpha);
            let step = &z - &grad.scale_real(mu);
            let next = self.set.project_rotated_warm(&step, warm)?;
            let change = next.dist_frob(&z);
            z = next;
            if change * change < eps_gd {
                iters = iter;
                break;
            }
        }
        Ok((self.set.unrotate(&z), iters))
    }
}

/// Value of the augmented Lagrangian at a feasible split point, exposed
/// for gradient checks and audits.
pub fn augmented_lagrangian_value<T: Scalar>(
    scenario: &ScenarioChannels<T>,
    z: &ComplexMatrix<T>,
    f_rf: &ComplexMatrix<T>,
    f_bb: &ComplexMatrix<T>,
    lambda: &ComplexMatrix<T>,
    alpha: T,
) -> Result<T> {
    let op = MiOperator::new(scenario)?;
    op.lagrangian(z, &(f_rf * f_bb), lambda, alpha)
}

/// Gradient of the augmented Lagrangian in the split variable.
pub fn augmented_lagrangian_gradient<T: Scalar>(
    scenario: &ScenarioChannels<T>,
    z: &ComplexMatrix<T>,
    f_rf: &ComplexMatrix<T>,
    f_bb: &ComplexMatrix<T>,
    lambda: &ComplexMatrix<T>,
    alpha: T,
) -> Result<ComplexMatrix<T>> {
    let op = MiOperator::new(scenario)?;
    op.gradient(z, &(f_rf * f_bb), lambda, alpha)
}

/// Inner projected-gradient solve for the split variable, starting from
/// `z_init` and stopping when the squared step drops under `eps_gd` or the
/// iteration cap is hit. Every iterate lies in the constraint set.
#[allow(clippy::too_many_arguments)]
pub fn inner_projected_gradient<T: Scalar>(
    scenario: &ScenarioChannels<T>,
    z_init: &ComplexMatrix<T>,
    f_rf: &ComplexMatrix<T>,
    f_bb: &ComplexMatrix<T>,
    lambda: &ComplexMatrix<T>,
    mu: T,
    eps_gd: T,
    cap: usize,
) -> Result<(ComplexMatrix<T>, usize)> {
    let op = MiOperator::new(scenario)?;
    // The penalty weight rides along with the multiplier term; callers of
    // the standalone entry point pass it through the config default.
    let alpha = AdmmConfig::<T>::default().alpha;
    let mut warm = (T::zero(), T::zero());
    op.projected_gradient(z_init, &(f_rf * f_bb), lambda, alpha, mu, eps_gd, cap, &mut warm)
}

/// Ratio between the inner stationarity target and the current primal
/// residual: the inner solve stops when its projected-gradient step, and
/// hence its stationarity error `step/μ`, is this fraction of the residual.
const INNER_TOL_RATIO: f64 = 0.3;

/// Runs the full ADMM sequence and returns the feasible hybrid precoder
/// with its iteration trace. Deterministic given `(scenario, rng_seed)`;
/// restart attempts derive their initialization seeds from `rng_seed`.
pub fn solve_hybrid_mi<T: Scalar>(
    scenario: &ScenarioChannels<T>,
    config: &AdmmConfig<T>,
    rng_seed: u64,
) -> Result<(HybridPrecoder<T>, AdmmTrace<T>)> {
    config.validate()?;
    scenario.config.validate()?;
    let op = MiOperator::new(scenario)?;

    let mut best: Option<(HybridPrecoder<T>, AdmmTrace<T>, T)> = None;
    for attempt in 0..=config.max_restarts {
        let seed = if attempt == 0 {
            rng_seed
        } else {
            crate::rng::split_seed(rng_seed, attempt as u64)
        };
        let (precoder, mut trace) = run_attempt(scenario, &op, config, seed)?;
        trace.restarts = attempt;
        let done = trace.termination == TerminationReason::TolerancesMet;
        // Attempts that missed the tolerances are ranked by the objective
        // their feasible precoder actually achieves.
        let objective = log2_det_i_plus_gram(&(&op.h_tilde * &precoder.product()))?;
        let better = match &best {
            None => true,
            Some((_, _, obj)) => objective > *obj,
        };
        if better {
            best = Some((precoder, trace, objective));
        }
        if done {
            break;
        }
    }
    let (precoder, trace, _) = best.expect("at least one attempt ran");
    Ok((precoder, trace))
}

fn run_attempt<T: Scalar>(
    scenario: &ScenarioChannels<T>,
    op: &MiOperator<T>,
    config: &AdmmConfig<T>,
    init_seed: u64,
) -> Result<(HybridPrecoder<T>, AdmmTrace<T>)> {
    let cfg = &scenario.config;
    let mut rng = SeededRng::from_seed(init_seed);

    // Random start: unit-modulus phases for the analog part, Gaussian
    // digital part scaled onto the power budget, multiplier at zero.
    let mut f_rf = ComplexMatrix::<T>::random_unit_modulus(cfg.t_s, cfg.n_st, &mut rng);
    let mut f_bb = ComplexMatrix::<T>::random_gaussian(cfg.n_st, cfg.l_s, &mut rng);
    let product_norm = (&f_rf * &f_bb).frob_norm();
    f_bb = f_bb.scale_real(cfg.p_max.sqrt() / product_norm);
    let z_raw = ComplexMatrix::<T>::random_gaussian(cfg.t_s, cfg.l_s, &mut rng);
    let mut z = op
        .set
        .project(&z_raw.scale_real(cfg.p_max.sqrt() / z_raw.frob_norm()))?;
    let mut lambda = ComplexMatrix::<T>::zeros(cfg.t_s, cfg.l_s);

    let mut eps_gd = config.eps_gd_initial;
    let mut trace = AdmmTrace::new(config.eps_z, config.eps_p);
    let mut warm = (T::zero(), T::zero());

    for _n in 1..=config.n_max {
        // (P4A): inner projected gradient, smooth-started from Z_{n−1}.
        let product_prev = &f_rf * &f_bb;
        let (z_next, inner_iters) = op.projected_gradient(
            &z,
            &product_prev,
            &lambda,
            config.alpha,
            config.mu,
            eps_gd,
            config.gd_max_iters,
            &mut warm,
        )?;
        let dz = z_next.dist_frob(&z);
        z = z_next;

        // (P4B): analog update against the previous digital iterate, then
        // the phase projection.
        let target = &z + &lambda.scale_real(T::one() / config.alpha);
        let gram_bb = (&f_bb * &f_bb.adjoint()).symmetrize();
        let unconstrained = solve_gram_right_anchored(
            &f_rf,
            &(&target * &f_bb.adjoint()),
            &gram_bb,
            "analog update",
        )?;
        f_rf = project_unit_modulus(&unconstrained);

        // (P4C): digital update against the fresh analog iterate.
        let gram_rf = (&f_rf.adjoint() * &f_rf).symmetrize();
        f_bb = solve_gram_left(&gram_rf, &(&f_rf.adjoint() * &target), "digital update")?;

        // (P4D): multiplier ascent.
        let product = &f_rf * &f_bb;
        let gap = &z - &product;
        let lambda_next = &lambda + &gap.scale_real(config.alpha);
        let multiplier_diff = lambda_next.dist_frob(&lambda);
        lambda = lambda_next;

        let primal = gap.frob_norm();
        trace.primal_residual.push(primal);
        trace.successive_change.push(dz);
        trace
            .lagrangian
            .push(op.lagrangian(&z, &product, &lambda, config.alpha)?);
        trace.multiplier_norm.push(lambda.frob_norm());
        trace.multiplier_diff_norm.push(multiplier_diff);
        trace.inner_iterations.push(inner_iters);
        trace.inner_tolerance.push(eps_gd);

        if dz <= config.eps_z && primal <= config.eps_p {
            trace.termination = TerminationReason::TolerancesMet;
            break;
        }
        // Tighten the inner tolerance in step with the primal residual.
        let target_step = T::of(INNER_TOL_RATIO) * config.mu * primal;
        eps_gd = (target_step * target_step)
            .max(config.eps_gd_floor)
            .min(config.eps_gd_initial);
    }

    // Return line: the digital part is projected so the delivered pair is
    // feasible even when the primal residual is only tolerance-small.
    let feasibility =
        HybridFeasibilitySet::new(&scenario.h_ps, f_rf.clone(), cfg.p_max, cfg.i_max)?;
    let f_bb_final = feasibility.project(&f_bb)?;
    let precoder = HybridPrecoder {
        f_rf,
        f_bb: f_bb_final,
    };
    precoder.validate(scenario)?;

    trace.final_split_variable = Some(z);
    trace.final_multiplier = Some(lambda);
    Ok((precoder, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_scenario, SystemConfig};
    use crate::digital::{digital_mmse_postcoder, solve_digital_precoder_ranked};
    use crate::metrics::spectral_efficiency;
    use crate::{CMat, Real};

    fn small_scenario(seed: u64) -> crate::ScenarioChannels {
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

    #[test]
    fn zero_channel_inner_solve_reaches_projection_fixed_point() {
        // With H̃ = 0 and Λ = 0 the objective is the pure quadratic, whose
        // constrained minimizer is the projection of F_RF F_BB.
        let mut c = SystemConfig::<Real>::default_64x16();
        c.t_s = 6;
        c.r_s = 3;
        c.t_p = 3;
        c.r_p = 2;
        c.n_st = 3;
        c.n_sr = 3;
        c.l_s = 2;
        c.l_p = 2;
        let mut rng = crate::rng::SeededRng::from_seed(7);
        let h_ss = CMat::zeros(3, 6);
        let h_ps = CMat::random_gaussian(2, 6, &mut rng);
        let h_sp = CMat::zeros(3, 3);
        let f_p = CMat::random_gaussian(3, 2, &mut rng);
        let scenario =
            crate::channel::ScenarioChannels::from_parts(h_ss, h_ps.clone(), &h_sp, f_p, c)
                .unwrap();

        let f_rf = CMat::random_unit_modulus(6, 3, &mut rng);
        let f_bb = CMat::random_gaussian(3, 2, &mut rng);
        let lambda = CMat::zeros(6, 2);
        let z0 = CMat::random_gaussian(6, 2, &mut rng);
        let (z, _) = inner_projected_gradient(
            &scenario, &z0, &f_rf, &f_bb, &lambda, 0.05, 1e-24, 5000,
        )
        .unwrap();
        let set = TraceConstraintSet::new(h_ps, 1.0, 1.0).unwrap();
        let expected = set.project(&(&f_rf * &f_bb)).unwrap();
        assert!(z.dist_frob(&expected) < 1e-7);
        // Iterates live in the set.
        assert!(z.frob_norm_sq() <= 1.0 + 1e-9);
    }

    #[test]
    fn large_penalty_pins_split_variable_to_product() {
        let scenario = small_scenario(3);
        let mut rng = crate::rng::SeededRng::from_seed(9);
        let f_rf = CMat::random_unit_modulus(8, 4, &mut rng);
        let mut f_bb = CMat::random_gaussian(4, 2, &mut rng);
        // Scale the product comfortably inside the feasible set.
        let product = &f_rf * &f_bb;
        let set = TraceConstraintSet::new(scenario.h_ps.clone(), 1.0, 1.0).unwrap();
        let mut scale: Real = (0.5 / product.frob_norm_sq()).sqrt();
        let interference = (&scenario.h_ps * &product).frob_norm_sq();
        scale = scale.min((0.5 / interference).sqrt());
        f_bb = f_bb.scale_real(scale);
        let product = &f_rf * &f_bb;
        assert!(set.contains(&product));

        let op = MiOperator::new(&scenario).unwrap();
        let lambda = CMat::zeros(8, 2);
        let alpha = 1e4;
        let mut warm = (0.0, 0.0);
        let (z, _) = op
            .projected_gradient(&product, &product, &lambda, alpha, 1e-5, 1e-22, 4000, &mut warm)
            .unwrap();
        let rel = z.dist_frob(&product) / product.frob_norm();
        assert!(rel < 1e-2, "split variable strayed: {rel}");
    }

    #[test]
    fn solve_terminates_and_returns_feasible_pair() {
        let scenario = small_scenario(5);
        let config = AdmmConfig::default();
        let (precoder, trace) = solve_hybrid_mi(&scenario, &config, 42).unwrap();
        precoder.validate(&scenario).unwrap();
        assert_eq!(trace.primal_residual.len(), trace.successive_change.len());
        assert_eq!(trace.primal_residual.len(), trace.inner_iterations.len());
        assert!(trace.iterations() >= 1);
        if trace.termination == TerminationReason::TolerancesMet {
            assert!(trace.final_primal_residual() <= config.eps_p);
        }
    }

    #[test]
    fn determinism_same_seed_same_result() {
        let scenario = small_scenario(6);
        let config = AdmmConfig::default();
        let (a, _) = solve_hybrid_mi(&scenario, &config, 7).unwrap();
        let (b, _) = solve_hybrid_mi(&scenario, &config, 7).unwrap();
        assert_eq!(a.f_rf, b.f_rf);
        assert_eq!(a.f_bb, b.f_bb);
    }

    #[test]
    fn inner_tolerance_tracks_primal_residual() {
        let scenario = small_scenario(8);
        let config = AdmmConfig::default();
        let (_, trace) = solve_hybrid_mi(&scenario, &config, 11).unwrap();
        let eps = &trace.inner_tolerance;
        assert_eq!(eps[0], config.eps_gd_initial);
        for (i, w) in eps.windows(2).enumerate() {
            // Next tolerance is the clamped square of the stationarity
            // target derived from this iteration's primal residual.
            let target = INNER_TOL_RATIO * config.mu * trace.primal_residual[i];
            let expect = (target * target)
                .max(config.eps_gd_floor)
                .min(config.eps_gd_initial);
            assert!(
                (w[1] - expect).abs() <= 1e-12 * expect.max(1e-300),
                "iteration {i}: tolerance {} expected {expect}",
                w[1]
            );
        }
    }

    #[test]
    fn full_rf_chains_track_digital_benchmark() {
        // With as many RF chains as antennas the hybrid factorization can
        // represent any precoder; the achieved rate should sit within 5%
        // of the rank-matched digital benchmark on average.
        let mut ratio_acc = 0.0;
        let seeds = 20;
        for seed in 0..seeds {
            let mut c = SystemConfig::<Real>::default_64x16();
            c.t_s = 8;
            c.r_s = 4;
            c.t_p = 4;
            c.r_p = 4;
            c.n_st = 8;
            c.n_sr = 4;
            c.l_s = 2;
            c.l_p = 2;
            let scenario = build_scenario(&c, 900 + seed).unwrap();
            let digital = solve_digital_precoder_ranked(&scenario, 2).unwrap();
            let f_digital = digital.f_d.clone();
            let w_digital = digital_mmse_postcoder(&scenario, &f_digital).unwrap();
            let se_digital =
                spectral_efficiency(&scenario, &f_digital, &w_digital).unwrap();

            let (precoder, _) =
                solve_hybrid_mi(&scenario, &AdmmConfig::default(), 1234 + seed).unwrap();
            let f = precoder.product();
            let w = digital_mmse_postcoder(&scenario, &f).unwrap();
            let se = spectral_efficiency(&scenario, &f, &w).unwrap();
            ratio_acc += se / se_digital;
        }
        let mean_ratio = ratio_acc / seeds as f64;
        assert!(
            mean_ratio > 0.95,
            "hybrid with full RF chains reached only {:.3} of digital",
            mean_ratio
        );
    }

    #[test]
    fn multiplier_steps_flatten_out() {
        // Square-summability in practice: the tail of the cumulative sum of
        // squared multiplier steps carries almost none of the total.
        let scenario = small_scenario(12);
        let config = AdmmConfig::default();
        let (_, trace) = solve_hybrid_mi(&scenario, &config, 3).unwrap();
        let diffs_sq: Vec<f64> = trace
            .multiplier_diff_norm
            .iter()
            .map(|d| d * d)
            .collect();
        let total: f64 = diffs_sq.iter().sum();
        let n = diffs_sq.len();
        assert!(n >= 10, "run too short to audit");
        let decile: f64 = diffs_sq[n - n / 10..].iter().sum();
        assert!(decile <= 0.05 * total, "tail share {}", decile / total);
        if n >= 150 {
            let last50: f64 = diffs_sq[n - 50..].iter().sum();
            assert!(last50 <= 0.01 * total, "last-50 share {}", last50 / total);
        }
    }
}
