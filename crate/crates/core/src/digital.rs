//! Fully digital benchmark: the capacity-optimal transmit covariance under
//! the power and interference trace constraints, and the unconstrained
//! linear MMSE post-coder.
//!
//! The covariance problem is solved by dual water-filling. For fixed
//! multipliers `(λ1, λ2)` let `B = λ1 I + λ2 H_psᴴH_ps`; substituting
//! `F̃ = B^{-1/2} F' B^{-1/2}` turns the Lagrangian into
//! `log2 det(I + Ã F' Ãᴴ) − tr F'` with `Ã = Q^{-1/2} H_ss B^{-1/2}`, whose
//! maximizer is classical water-filling on the singular values of `Ã` at
//! the fixed level `1/ln 2`. The outer search over the multipliers is the
//! same active-set enumeration plus nested bisection used for the
//! trace-constraint projection: each constraint residual decreases in its
//! own multiplier.

use num_complex::Complex;

use crate::channel::ScenarioChannels;
use crate::error::Error;
use crate::numerics::{
    hermitian_eig, log2_det_i_plus_gram, psd_power, solve_linear, ComplexMatrix, HermitianEig,
    PsdPower,
};
use crate::scalar::Scalar;
use crate::Result;

/// Floor for the power multiplier: `B` must stay invertible even when the
/// interference Gram matrix is rank deficient.
const LAMBDA_POWER_FLOOR: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;
const BRANCH_SLACK: f64 = 1e-12;
const MAX_DOUBLINGS: usize = 200;
const MAX_BISECT: usize = 200;

/// Solution of the digital covariance problem.
#[derive(Debug, Clone)]
pub struct DigitalSolution<T: Scalar> {
    /// Optimal transmit covariance `F̃`, Hermitian PSD, `T_s × T_s`.
    pub f_tilde: ComplexMatrix<T>,
    /// `F_D` with `F_D F_Dᴴ = F̃`, orthogonal scaled columns, one per
    /// active water-filling mode.
    pub f_d: ComplexMatrix<T>,
    /// Achieved objective in bits/s/Hz.
    pub achieved_objective: T,
    /// Dual multipliers of the power and interference constraints.
    pub multipliers: (T, T),
    /// Interference-plus-noise covariance `Q` at the SU receiver.
    pub q_matrix: ComplexMatrix<T>,
}

struct DualEvaluation<T: Scalar> {
    power: T,
    interference: T,
    /// Columns `X` with `F̃ = X Xᴴ` in the original basis; `None` when no
    /// mode clears the water level.
    factor: Option<ComplexMatrix<T>>,
}

struct DualContext<T: Scalar> {
    /// Eigenbasis of `H_psᴴ H_ps`.
    gram_eig: HermitianEig<T>,
    /// Whitened channel rotated into that basis, `Q^{-1/2} H_ss V_M`.
    w: ComplexMatrix<T>,
    p_max: T,
    i_max: T,
    /// Cap on the number of allocated modes; `None` is the full-rank
    /// benchmark.
    max_modes: Option<usize>,
}

impl<T: Scalar> DualContext<T> {
    fn evaluate(&self, l1: T, l2: T) -> Result<DualEvaluation<T>> {
        let l1 = l1.max(T::of(LAMBDA_POWER_FLOOR));
        let m = &self.gram_eig.eigenvalues;
        let d: Vec<T> = m.iter().map(|&mi| l1 + l2 * mi).collect();
        let inv_sqrt_d: Vec<T> = d.iter().map(|&di| T::one() / di.sqrt()).collect();
        // Ã = W diag(d^{-1/2}); water-fill on the eigenvalues of ÃÃᴴ.
        let a_tilde = self.w.scale_cols(&inv_sqrt_d);
        let outer = (&a_tilde * &a_tilde.adjoint()).symmetrize();
        let eig = hermitian_eig(&outer)?;
        let ln2 = T::of(std::f64::consts::LN_2);
        let level = T::one() / ln2;
        let mut active = 0usize;
        let mut p = Vec::new();
        let cap = self.max_modes.unwrap_or(usize::MAX);
        // Eigenvalues are descending, so the loop allocates the strongest
        // modes first; the cap realizes the stream-limited benchmark.
        for &s2 in &eig.eigenvalues {
            if s2 > ln2 && active < cap {
                active += 1;
                p.push(level - T::one() / s2);
            }
        }
        if active == 0 {
            return Ok(DualEvaluation {
                power: T::zero(),
                interference: T::zero(),
                factor: None,
            });
        }
        // Right singular vectors for the active modes: Ṽ = Ãᴴ U diag(1/s).
        let u_r = eig.eigenvectors.leading_cols(active);
        let inv_s: Vec<T> = eig.eigenvalues[..active]
            .iter()
            .map(|&s2| T::one() / s2.sqrt())
            .collect();
        let v_r = (&a_tilde.adjoint() * &u_r).scale_cols(&inv_s);
        // G' = Ṽ diag(p) Ṽᴴ; residuals need only its diagonal.
        let sqrt_p: Vec<T> = p.iter().map(|&pi| pi.sqrt()).collect();
        let g_half = v_r.scale_cols(&sqrt_p);
        let mut power = T::zero();
        let mut interference = T::zero();
        for (i, (&di, &mi)) in d.iter().zip(m.iter()).enumerate() {
            let mut diag = T::zero();
            for k in 0..active {
                diag += g_half.at(i, k).norm_sqr();
            }
            power += diag / di;
            interference += mi * diag / di;
        }
        // F̃ = V_M diag(d^{-1/2}) G' diag(d^{-1/2}) V_Mᴴ = X Xᴴ.
        let factor = &self.gram_eig.eigenvectors * &g_half.scale_rows(&inv_sqrt_d);
        Ok(DualEvaluation {
            power,
            interference,
            factor: Some(factor),
        })
    }
}

/// Solves the digital covariance problem for one scenario at full rank.
pub fn solve_digital_precoder<T: Scalar>(
    scenario: &ScenarioChannels<T>,
) -> Result<DigitalSolution<T>> {
    solve_digital_precoder_impl(scenario, None)
}

/// Stream-limited digital benchmark: the same dual water-filling, with
/// the inner allocation restricted to the `max_streams` strongest modes
/// so the whole budget concentrates there. Truncating the full-rank
/// solution instead would strand the power carried by the discarded
/// modes and lose to the hybrid solvers.
pub fn solve_digital_precoder_ranked<T: Scalar>(
    scenario: &ScenarioChannels<T>,
    max_streams: usize,
) -> Result<DigitalSolution<T>> {
    if max_streams == 0 {
        return Err(Error::Config("max_streams must be >= 1".into()));
    }
    solve_digital_precoder_impl(scenario, Some(max_streams))
}

fn solve_digital_precoder_impl<T: Scalar>(
    scenario: &ScenarioChannels<T>,
    max_modes: Option<usize>,
) -> Result<DigitalSolution<T>> {
    let cfg = &scenario.config;
    let q = interference_plus_noise(scenario);
    let q_inv_sqrt = psd_power(&q, PsdPower::InvSqrt)?;
    let h_tilde = &q_inv_sqrt * &scenario.h_ss;

    let gram = (&scenario.h_ps.adjoint() * &scenario.h_ps).symmetrize();
    let gram_eig = hermitian_eig(&gram)?;
    let w = &h_tilde * &gram_eig.eigenvectors;
    let ctx = DualContext {
        gram_eig,
        w,
        p_max: cfg.p_max,
        i_max: cfg.i_max,
        max_modes,
    };

    let (l1, l2) = search_multipliers(&ctx)?;
    let eval = ctx.evaluate(l1, l2)?;
    let (f_tilde, f_d, objective) = match eval.factor {
        None => {
            // Channel too weak to clear the water level anywhere.
            let z = ComplexMatrix::zeros(cfg.t_s, cfg.t_s);
            let f_d = ComplexMatrix::zeros(cfg.t_s, 1);
            (z, f_d, T::zero())
        }
        Some(x) => {
            let f_tilde = (&x * &x.adjoint()).symmetrize();
            let f_d = orthogonalize_factor(&x)?;
            let objective = log2_det_i_plus_gram(&(&h_tilde * &x))?;
            (f_tilde, f_d, objective)
        }
    };
    f_tilde.ensure_finite("solve_digital_precoder")?;

    Ok(DigitalSolution {
        f_tilde,
        f_d,
        achieved_objective: objective,
        multipliers: (l1, l2),
        q_matrix: q,
    })
}

/// Active-set enumeration over the two dual multipliers.
fn search_multipliers<T: Scalar>(ctx: &DualContext<T>) -> Result<(T, T)> {
    let floor = T::of(LAMBDA_POWER_FLOOR);
    let slack = T::one() + T::of(BRANCH_SLACK);

    // Nearly unconstrained corner: a zero/negligible channel allocates
    // nothing even at the multiplier floor.
    let base = ctx.evaluate(floor, T::zero())?;
    if base.power <= ctx.p_max && base.interference <= ctx.i_max {
        return Ok((floor, T::zero()));
    }

    // Power constraint alone.
    if base.power > ctx.p_max {
        let l1 = bisect(
            |l1| Ok(ctx.evaluate(l1, T::zero())?.power - ctx.p_max),
            ctx.p_max * T::of(RESIDUAL_TOL),
            "digital power multiplier",
        )?;
        let e = ctx.evaluate(l1, T::zero())?;
        if e.interference <= ctx.i_max * slack {
            return Ok((l1, T::zero()));
        }
    }

    // Interference constraint alone.
    let base_i = ctx.evaluate(floor, T::zero())?;
    if base_i.interference > ctx.i_max {
        let l2 = bisect(
            |l2| Ok(ctx.evaluate(floor, l2)?.interference - ctx.i_max),
            ctx.i_max * T::of(RESIDUAL_TOL),
            "digital interference multiplier",
        )?;
        let e = ctx.evaluate(floor, l2)?;
        if e.power <= ctx.p_max * slack {
            return Ok((floor, l2));
        }
    }

    // Both constraints active.
    let inner = |l1: T| -> Result<T> {
        if ctx.evaluate(l1, T::zero())?.interference <= ctx.i_max {
            return Ok(T::zero());
        }
        bisect(
            |l2| Ok(ctx.evaluate(l1, l2)?.interference - ctx.i_max),
            ctx.i_max * T::of(RESIDUAL_TOL),
            "digital nested interference multiplier",
        )
    };
    let l1 = bisect(
        |l1| Ok(ctx.evaluate(l1, inner(l1)?)?.power - ctx.p_max),
        ctx.p_max * T::of(RESIDUAL_TOL),
        "digital nested power multiplier",
    )?;
    let l2 = inner(l1)?;
    Ok((l1, l2))
}

/// `F_D` from the covariance factor `X` (with `F̃ = XXᴴ`): the eigenbasis
/// of `XᴴX` rotates `X` into orthogonal columns of length `sqrt(eigenvalue)`,
/// matching the eigendecomposition recovery `U_F √Σ_F`.
fn orthogonalize_factor<T: Scalar>(x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let small = (&x.adjoint() * x).symmetrize();
    let eig = hermitian_eig(&small)?;
    Ok(x * &eig.eigenvectors)
}

/// `Q = H̃_sp H̃_spᴴ + σ_n² I`, the interference-plus-noise covariance at
/// the SU receiver.
pub fn interference_plus_noise<T: Scalar>(scenario: &ScenarioChannels<T>) -> ComplexMatrix<T> {
    let r_s = scenario.config.r_s;
    let outer = (&scenario.h_sp_tilde * &scenario.h_sp_tilde.adjoint()).symmetrize();
    let mut q = outer;
    for i in 0..r_s {
        let v = q.at(i, i) + Complex::new(scenario.config.sigma_n_sq, T::zero());
        q.set(i, i, v);
    }
    q
}

/// Linear MMSE post-coder for a given effective precoder, evaluated from
/// second-order statistics: `W = (H F Fᴴ Hᴴ + H̃_sp H̃_spᴴ + σ_n² I)^{-1} H F`.
pub fn digital_mmse_postcoder<T: Scalar>(
    scenario: &ScenarioChannels<T>,
    precoder: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    let hf = &scenario.h_ss * precoder;
    let mut c = (&hf * &hf.adjoint()).symmetrize();
    let q = interference_plus_noise(scenario);
    c = (&c + &q).symmetrize();
    solve_linear(&c, &hf)
}

/// The `rank` strongest precoder columns of a solution; `f_d` columns come
/// out of the recovery ordered by eigenvalue, so this is a prefix.
pub fn leading_precoder_columns<T: Scalar>(
    solution: &DigitalSolution<T>,
    rank: usize,
) -> ComplexMatrix<T> {
    solution.f_d.leading_cols(rank.min(solution.f_d.cols()))
}

fn bisect<T: Scalar>(
    f: impl Fn(T) -> Result<T>,
    residual_tol: T,
    context: &'static str,
) -> Result<T> {
    let mut lo = T::zero();
    let f_lo = f(lo)?;
    if f_lo <= T::zero() {
        return Ok(lo);
    }
    let mut hi = T::one();
    let mut f_hi = f(hi)?;
    let mut doublings = 0;
    while f_hi > T::zero() {
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::BisectionBracket {
                context,
                lo: lo.as_f64(),
                hi: hi.as_f64(),
                residual_lo: f_lo.as_f64(),
                residual_hi: f_hi.as_f64(),
            });
        }
        lo = hi;
        hi = hi + hi;
        f_hi = f(hi)?;
    }
    for _ in 0..MAX_BISECT {
        let mid = (lo + hi) * T::of(0.5);
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid.abs() <= residual_tol {
            return Ok(mid);
        }
        if f_mid > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}
