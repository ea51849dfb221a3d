//! Dykstra's alternating-projection oracle for the intersection of the
//! power ball with the interference ellipsoid (and the analog-weighted
//! variants).
//!
//! Dykstra's scheme with correction terms converges to the exact
//! projection onto the intersection of closed convex sets. Each half
//! projection is a single-constraint problem solved by its own scalar
//! bisection over plain dense solves, independent of the eigenbasis
//! active-set search in the library.

use cogmimo::numerics::solve_linear;
use cogmimo::{CMat, Cx};

const HALF_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 20_000;
const STOP_TOL: f64 = 1e-10;

/// `min ‖X − A‖ s.t. ‖X‖_F² ≤ p`: rescale onto the ball.
fn project_power_ball(a: &CMat, p: f64) -> CMat {
    let norm_sq = a.frob_norm_sq();
    if norm_sq <= p {
        a.clone()
    } else {
        a.scale_real((p / norm_sq).sqrt())
    }
}

/// `min ‖X − A‖ s.t. tr(Xᴴ M X) ≤ cap` for Hermitian PSD `M`:
/// `X = (I + λM)^{-1} A` with `λ` found by bisection on the monotone
/// residual, every evaluation a fresh dense solve.
fn project_quadratic_cap(a: &CMat, m: &CMat, cap: f64) -> CMat {
    let value = |x: &CMat| x.re_inner(&(m * x));
    if value(a) <= cap {
        return a.clone();
    }
    let n = a.rows();
    let id = CMat::identity(n);
    let at = |lambda: f64| -> CMat {
        let mut k = id.clone();
        for i in 0..n {
            for j in 0..n {
                let v = k.at(i, j) + m.at(i, j) * Cx::new(lambda, 0.0);
                k.set(i, j, v);
            }
        }
        solve_linear(&k, a).expect("I + λM is positive definite")
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while value(&at(hi)) > cap {
        hi *= 2.0;
        assert!(hi < 1e60, "oracle bracket blew up");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let v = value(&at(mid));
        if (v - cap).abs() <= HALF_TOL * cap {
            return at(mid);
        }
        if v > cap {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(hi)
}

fn dykstra(a: &CMat, project_1: impl Fn(&CMat) -> CMat, project_2: impl Fn(&CMat) -> CMat) -> CMat {
    let (r, c) = a.shape();
    let mut x = a.clone();
    let mut p = CMat::zeros(r, c).scale_real(0.0);
    let mut q = p.clone();
    let mut prev = x.clone();
    for sweep in 0..MAX_SWEEPS {
        let y = project_1(&(&x + &p));
        p = &(&x + &p) - &y;
        x = project_2(&(&y + &q));
        q = &(&y + &q) - &x;
        if sweep > 0 && x.dist_frob(&prev) < STOP_TOL {
            break;
        }
        prev = x.clone();
    }
    x
}

/// Oracle for the projection onto
/// `{X : ‖X‖_F² ≤ p_max, ‖H X‖_F² ≤ i_max}`.
pub fn project_power_interference(a: &CMat, h: &CMat, p_max: f64, i_max: f64) -> CMat {
    let m = (&h.adjoint() * h).symmetrize();
    dykstra(
        a,
        |y| project_power_ball(y, p_max),
        |y| project_quadratic_cap(y, &m, i_max),
    )
}

/// Oracle for the projection onto
/// `{B : ‖F_RF B‖_F² ≤ p_max, ‖H F_RF B‖_F² ≤ i_max}`.
pub fn project_hybrid_feasibility(
    a: &CMat,
    h: &CMat,
    f_rf: &CMat,
    p_max: f64,
    i_max: f64,
) -> CMat {
    let g = (&f_rf.adjoint() * f_rf).symmetrize();
    let hf = h * f_rf;
    let j = (&hf.adjoint() * &hf).symmetrize();
    dykstra(
        a,
        |y| project_quadratic_cap(y, &g, p_max),
        |y| project_quadratic_cap(y, &j, i_max),
    )
}
