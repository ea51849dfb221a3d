//! Projection operators used by the ADMM solvers: the unit-modulus set, the
//! power-plus-interference set, and the post-hoc hybrid feasibility set.
//!
//! The trace-constraint projections have the closed form
//! `X = [(1+λ1)I + λ2 H_psᴴH_ps]^{-1} A` with multipliers `λ1, λ2 ≥ 0`
//! fixed by complementary slackness. The multiplier search enumerates the
//! active set: both inactive, one constraint active (closed form or scalar
//! bisection), then a nested bisection where the outer variable is the
//! power multiplier and each inner solve re-tightens the interference
//! multiplier. Each residual is strictly decreasing in its own multiplier,
//! and the nested brackets are grown by doubling until the residual changes
//! sign, so the search cannot stall.

use num_complex::Complex;

use crate::error::Error;
use crate::numerics::{hermitian_eig, solve_linear, ComplexMatrix, HermitianEig};
use crate::scalar::Scalar;
use crate::Result;

/// Relative slack accepted when checking the non-searched constraint of a
/// single-multiplier candidate.
const BRANCH_SLACK: f64 = 1e-12;
/// Residual target for the multiplier bisections, relative to the limit.
const RESIDUAL_TOL: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 200;
const MAX_BISECT: usize = 200;

/// Elementwise projection onto unit-modulus matrices: each nonzero entry is
/// replaced by its phase, zeros stay zero.
pub fn project_unit_modulus<T: Scalar>(a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    a.map(|z| {
        let m = crate::numerics::modulus(z);
        if m == T::zero() {
            z
        } else {
            z / Complex::new(m, T::zero())
        }
    })
}

/// Which constraints the multiplier search found active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActiveBranch {
    Feasible,
    PowerOnly,
    InterferenceOnly,
    Both,
}

/// Multipliers and achieved constraint values of one projection.
#[derive(Debug, Clone, Copy)]
pub struct ProjectionReport<T: Scalar> {
    pub branch: ActiveBranch,
    pub lambda_power: T,
    pub lambda_interference: T,
    pub power: T,
    pub interference: T,
}

/// The set `{X : ‖X‖_F² ≤ P_max, ‖H_ps X‖_F² ≤ I_max}`.
///
/// Construction eigendecomposes `H_psᴴH_ps` once; every projection after
/// that reduces to scalar work in the eigenbasis.
pub struct TraceConstraintSet<T: Scalar> {
    pub h_ps: ComplexMatrix<T>,
    pub p_max: T,
    pub i_max: T,
    /// Eigendecomposition of `H_psᴴ H_ps`.
    gram_eig: HermitianEig<T>,
}

impl<T: Scalar> TraceConstraintSet<T> {
    pub fn new(h_ps: ComplexMatrix<T>, p_max: T, i_max: T) -> Result<Self> {
        if p_max <= T::zero() || i_max <= T::zero() {
            return Err(Error::Config(
                "p_max and i_max must be positive".into(),
            ));
        }
        let gram = (&h_ps.adjoint() * &h_ps).symmetrize();
        let gram_eig = hermitian_eig(&gram)?;
        Ok(Self {
            h_ps,
            p_max,
            i_max,
            gram_eig,
        })
    }

    pub fn contains(&self, a: &ComplexMatrix<T>) -> bool {
        let power = a.frob_norm_sq();
        let interference = (&self.h_ps * a).frob_norm_sq();
        power <= self.p_max && interference <= self.i_max
    }

    /// Eigenbasis of `H_psᴴH_ps`; solvers that iterate many projections
    /// work directly in these coordinates.
    pub fn eigen_basis(&self) -> &ComplexMatrix<T> {
        &self.gram_eig.eigenvectors
    }

    pub fn eigen_values(&self) -> &[T] {
        &self.gram_eig.eigenvalues
    }

    pub fn rotate(&self, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        &self.gram_eig.eigenvectors.adjoint() * a
    }

    pub fn unrotate(&self, rotated: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        &self.gram_eig.eigenvectors * rotated
    }

    pub fn project(&self, a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        Ok(self.project_with_report(a)?.0)
    }

    /// Projects a point already expressed in the eigenbasis, warm-starting
    /// the multiplier search from the previous call's multipliers. The
    /// result satisfies the same contract as [`Self::project`]; iterating
    /// solvers thread `warm` through consecutive calls because adjacent
    /// projections have nearly identical multipliers.
    pub fn project_rotated_warm(
        &self,
        rotated: &ComplexMatrix<T>,
        warm: &mut (T, T),
    ) -> Result<ComplexMatrix<T>> {
        let r = rotated.row_norms_sq();
        let report = self.search_multipliers(&r, Some(*warm))?;
        *warm = (report.lambda_power, report.lambda_interference);
        if report.branch == ActiveBranch::Feasible {
            return Ok(rotated.clone());
        }
        Ok(self.scale_rotated(rotated, report.lambda_power, report.lambda_interference))
    }

    /// Projects `a` and reports the multipliers, for slackness audits.
    pub fn project_with_report(
        &self,
        a: &ComplexMatrix<T>,
    ) -> Result<(ComplexMatrix<T>, ProjectionReport<T>)> {
        if a.rows() != self.h_ps.cols() {
            return Err(Error::Dimension {
                context: "TraceConstraintSet::project",
                expected: format!("{} rows", self.h_ps.cols()),
                found: format!("{}", a.rows()),
            });
        }
        let power = a.frob_norm_sq();
        let interference = (&self.h_ps * a).frob_norm_sq();
        if power <= self.p_max && interference <= self.i_max {
            return Ok((
                a.clone(),
                ProjectionReport {
                    branch: ActiveBranch::Feasible,
                    lambda_power: T::zero(),
                    lambda_interference: T::zero(),
                    power,
                    interference,
                },
            ));
        }

        // Power constraint alone is a pure rescale, 1+λ1 = ‖A‖_F / sqrt(P);
        // applying it to `a` directly keeps that branch rotation-free.
        let slack = T::one() + T::of(BRANCH_SLACK);
        if power > self.p_max {
            let scale = (power / self.p_max).sqrt();
            if interference / (scale * scale) <= self.i_max * slack {
                return Ok((
                    a.scale_real(T::one() / scale),
                    ProjectionReport {
                        branch: ActiveBranch::PowerOnly,
                        lambda_power: scale - T::one(),
                        lambda_interference: T::zero(),
                        power: self.p_max,
                        interference: interference / (scale * scale),
                    },
                ));
            }
        }

        let rotated = self.rotate(a);
        let r = rotated.row_norms_sq();
        let report = self.search_multipliers(&r, None)?;
        let x = self.unrotate(&self.scale_rotated(
            &rotated,
            report.lambda_power,
            report.lambda_interference,
        ));
        Ok((x, report))
    }

    /// Active-set multiplier search in the eigenbasis: with row energies
    /// `r_i` of the rotated point and eigenvalues `m_i`, scaling row `i`
    /// by `1/(1+λ1+λ2 m_i)` yields power `Σ r_i/(1+λ1+λ2 m_i)²` and
    /// interference `Σ m_i r_i/(…)²`, each strictly decreasing in its own
    /// multiplier.
    fn search_multipliers(
        &self,
        r: &[T],
        warm: Option<(T, T)>,
    ) -> Result<ProjectionReport<T>> {
        let m = &self.gram_eig.eigenvalues;
        let eval = |l1: T, l2: T| -> (T, T) {
            let mut pw = T::zero();
            let mut ifr = T::zero();
            for (ri, mi) in r.iter().zip(m.iter()) {
                let d = T::one() + l1 + l2 * *mi;
                let s = *ri / (d * d);
                pw += s;
                ifr += *mi * s;
            }
            (pw, ifr)
        };

        let (power, interference) = eval(T::zero(), T::zero());
        if power <= self.p_max && interference <= self.i_max {
            return Ok(ProjectionReport {
                branch: ActiveBranch::Feasible,
                lambda_power: T::zero(),
                lambda_interference: T::zero(),
                power,
                interference,
            });
        }
        let slack = T::one() + T::of(BRANCH_SLACK);
        let (warm_l1, warm_l2) = warm.unwrap_or((T::zero(), T::zero()));

        // Power constraint alone: closed form.
        if power > self.p_max {
            let scale = (power / self.p_max).sqrt();
            if interference / (scale * scale) <= self.i_max * slack {
                return Ok(ProjectionReport {
                    branch: ActiveBranch::PowerOnly,
                    lambda_power: scale - T::one(),
                    lambda_interference: T::zero(),
                    power: self.p_max,
                    interference: interference / (scale * scale),
                });
            }
        }

        // Interference constraint alone.
        if interference > self.i_max {
            let l2 = warm_bisect_decreasing(
                |l2| Ok(eval(T::zero(), l2).1 - self.i_max),
                warm_l2,
                self.i_max * T::of(RESIDUAL_TOL),
                "interference multiplier",
            )?;
            let (pw, ifr) = eval(T::zero(), l2);
            if pw <= self.p_max * slack {
                return Ok(ProjectionReport {
                    branch: ActiveBranch::InterferenceOnly,
                    lambda_power: T::zero(),
                    lambda_interference: l2,
                    power: pw,
                    interference: ifr,
                });
            }
        }

        // Both constraints active: outer bisection on the power multiplier
        // drives the power residual at the inner interference-tight
        // solution to zero. The inner solution warm-starts from the last
        // one found because it moves monotonically with λ1.
        let inner_warm = std::cell::Cell::new(warm_l2);
        let inner = |l1: T| -> Result<T> {
            if eval(l1, T::zero()).1 <= self.i_max {
                return Ok(T::zero());
            }
            let l2 = warm_bisect_decreasing(
                |l2| Ok(eval(l1, l2).1 - self.i_max),
                inner_warm.get(),
                self.i_max * T::of(RESIDUAL_TOL),
                "nested interference multiplier",
            )?;
            inner_warm.set(l2);
            Ok(l2)
        };
        let l1 = warm_bisect_decreasing(
            |l1| Ok(eval(l1, inner(l1)?).0 - self.p_max),
            warm_l1,
            self.p_max * T::of(RESIDUAL_TOL),
            "nested power multiplier",
        )?;
        let l2 = inner(l1)?;
        let (pw, ifr) = eval(l1, l2);
        Ok(ProjectionReport {
            branch: ActiveBranch::Both,
            lambda_power: l1,
            lambda_interference: l2,
            power: pw,
            interference: ifr,
        })
    }

    fn scale_rotated(&self, rotated: &ComplexMatrix<T>, l1: T, l2: T) -> ComplexMatrix<T> {
        let scales: Vec<T> = self
            .gram_eig
            .eigenvalues
            .iter()
            .map(|&mi| T::one() / (T::one() + l1 + l2 * mi))
            .collect();
        rotated.scale_rows(&scales)
    }
}

/// The post-hoc set `{B : ‖F_RF B‖_F² ≤ P_max, ‖H_ps F_RF B‖_F² ≤ I_max}`
/// for a fixed analog precoder, used to restore feasibility of the digital
/// part after the ADMM sequence converges.
pub struct HybridFeasibilitySet<T: Scalar> {
    pub f_rf: ComplexMatrix<T>,
    pub p_max: T,
    pub i_max: T,
    h_ps: ComplexMatrix<T>,
    /// `F_RFᴴ F_RF`.
    gram_rf: ComplexMatrix<T>,
    /// `F_RFᴴ H_psᴴ H_ps F_RF`.
    gram_interference: ComplexMatrix<T>,
}

impl<T: Scalar> HybridFeasibilitySet<T> {
    pub fn new(
        h_ps: &ComplexMatrix<T>,
        f_rf: ComplexMatrix<T>,
        p_max: T,
        i_max: T,
    ) -> Result<Self> {
        if p_max <= T::zero() || i_max <= T::zero() {
            return Err(Error::Config(
                "p_max and i_max must be positive".into(),
            ));
        }
        for z in f_rf.entries_row_major() {
            let m = crate::numerics::modulus(z);
            if (m - T::one()).abs() > T::of(1e-9) {
                return Err(Error::Config(format!(
                    "analog precoder must have unit-modulus entries, found modulus {:e}",
                    m.as_f64()
                )));
            }
        }
        let hf = h_ps * &f_rf;
        let gram_rf = (&f_rf.adjoint() * &f_rf).symmetrize();
        let gram_interference = (&hf.adjoint() * &hf).symmetrize();
        Ok(Self {
            f_rf,
            p_max,
            i_max,
            h_ps: h_ps.clone(),
            gram_rf,
            gram_interference,
        })
    }

    fn quadratic_forms(&self, b: &ComplexMatrix<T>) -> (T, T) {
        let gb = &self.gram_rf * b;
        let jb = &self.gram_interference * b;
        (b.re_inner(&gb), b.re_inner(&jb))
    }

    /// Direct constraint values of `F_RF B`, bypassing the cached Gram
    /// matrices; this is the measure callers audit against.
    fn direct_forms(&self, h_ps: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> (T, T) {
        let fb = &self.f_rf * b;
        ((&fb).frob_norm_sq(), (h_ps * &fb).frob_norm_sq())
    }

    /// The multiplier search drives the cached quadratic forms onto the
    /// limits; the residual of the inner linear solves can leave the
    /// directly measured constraints a few parts in 1e8 above them. A
    /// final exact rescale puts the returned point on the safe side
    /// without moving it measurably.
    fn finish(
        &self,
        h_ps: &ComplexMatrix<T>,
        x: ComplexMatrix<T>,
        mut report: ProjectionReport<T>,
    ) -> (ComplexMatrix<T>, ProjectionReport<T>) {
        let (pw, ifr) = self.direct_forms(h_ps, &x);
        let mut scale = T::one();
        if pw > self.p_max {
            scale = scale.min((self.p_max / pw).sqrt());
        }
        if ifr > self.i_max {
            scale = scale.min((self.i_max / ifr).sqrt());
        }
        let x = if scale < T::one() { x.scale_real(scale) } else { x };
        let (pw, ifr) = self.direct_forms(h_ps, &x);
        report.power = pw;
        report.interference = ifr;
        (x, report)
    }

    pub fn project(&self, a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        Ok(self.project_with_report(a)?.0)
    }

    /// Projects a candidate digital precoder; the result solves
    /// `[I + F_RFᴴ(γ1 I + γ2 H_psᴴH_ps)F_RF]^{-1} A` with `γ1, γ2` fixed by
    /// complementary slackness on the two constraints.
    pub fn project_with_report(
        &self,
        a: &ComplexMatrix<T>,
    ) -> Result<(ComplexMatrix<T>, ProjectionReport<T>)> {
        let n = self.f_rf.cols();
        if a.rows() != n {
            return Err(Error::Dimension {
                context: "HybridFeasibilitySet::project",
                expected: format!("{n} rows"),
                found: format!("{}", a.rows()),
            });
        }
        let (power, interference) = self.quadratic_forms(a);
        if power <= self.p_max && interference <= self.i_max {
            return Ok((
                a.clone(),
                ProjectionReport {
                    branch: ActiveBranch::Feasible,
                    lambda_power: T::zero(),
                    lambda_interference: T::zero(),
                    power,
                    interference,
                },
            ));
        }

        let slack = T::one() + T::of(BRANCH_SLACK);
        let id = ComplexMatrix::<T>::identity(n);
        let solve_at = |g1: T, g2: T| -> Result<ComplexMatrix<T>> {
            let mut k = id.clone();
            for i in 0..n {
                for j in 0..n {
                    let v = k.at(i, j)
                        + self.gram_rf.at(i, j) * Complex::new(g1, T::zero())
                        + self.gram_interference.at(i, j) * Complex::new(g2, T::zero());
                    k.set(i, j, v);
                }
            }
            solve_linear(&k, a)
        };
        let eval = |g1: T, g2: T| -> Result<(T, T)> {
            Ok(self.quadratic_forms(&solve_at(g1, g2)?))
        };

        // Power constraint alone.
        if power > self.p_max {
            let g1 = bisect_decreasing_fallible(
                |g1| Ok(eval(g1, T::zero())?.0 - self.p_max),
                self.p_max * T::of(RESIDUAL_TOL),
                "hybrid power multiplier",
            )?;
            let (pw, ifr) = eval(g1, T::zero())?;
            if ifr <= self.i_max * slack {
                let report = ProjectionReport {
                    branch: ActiveBranch::PowerOnly,
                    lambda_power: g1,
                    lambda_interference: T::zero(),
                    power: pw,
                    interference: ifr,
                };
                let h_ps = self.h_ps.clone();
                return Ok(self.finish(&h_ps, solve_at(g1, T::zero())?, report));
            }
        }

        // Interference constraint alone.
        if interference > self.i_max {
            let g2 = bisect_decreasing_fallible(
                |g2| Ok(eval(T::zero(), g2)?.1 - self.i_max),
                self.i_max * T::of(RESIDUAL_TOL),
                "hybrid interference multiplier",
            )?;
            let (pw, ifr) = eval(T::zero(), g2)?;
            if pw <= self.p_max * slack {
                let report = ProjectionReport {
                    branch: ActiveBranch::InterferenceOnly,
                    lambda_power: T::zero(),
                    lambda_interference: g2,
                    power: pw,
                    interference: ifr,
                };
                let h_ps = self.h_ps.clone();
                return Ok(self.finish(&h_ps, solve_at(T::zero(), g2)?, report));
            }
        }

        // Both active.
        let inner = |g1: T| -> Result<T> {
            if eval(g1, T::zero())?.1 <= self.i_max {
                return Ok(T::zero());
            }
            bisect_decreasing_fallible(
                |g2| Ok(eval(g1, g2)?.1 - self.i_max),
                self.i_max * T::of(RESIDUAL_TOL),
                "nested hybrid interference multiplier",
            )
        };
        let g1 = bisect_decreasing_fallible(
            |g1| Ok(eval(g1, inner(g1)?)?.0 - self.p_max),
            self.p_max * T::of(RESIDUAL_TOL),
            "nested hybrid power multiplier",
        )?;
        let g2 = inner(g1)?;
        let (pw, ifr) = eval(g1, g2)?;
        let report = ProjectionReport {
            branch: ActiveBranch::Both,
            lambda_power: g1,
            lambda_interference: g2,
            power: pw,
            interference: ifr,
        };
        let h_ps = self.h_ps.clone();
        Ok(self.finish(&h_ps, solve_at(g1, g2)?, report))
    }
}

/// Root of a decreasing residual on `λ ≥ 0`, warm-started from a
/// previous root when one is supplied: the bracket grows or shrinks
/// geometrically from the warm point until the sign flips, then plain
/// bisection finishes. With `warm = 0` this is the cold search whose
/// upper bracket doubles from 1.
fn warm_bisect_decreasing<T: Scalar>(
    f: impl Fn(T) -> Result<T>,
    warm: T,
    residual_tol: T,
    context: &'static str,
) -> Result<T> {
    let mut lo;
    let mut f_lo;
    let mut hi;
    let mut f_hi;
    if warm > T::zero() {
        let f_warm = f(warm)?;
        if f_warm.abs() <= residual_tol {
            return Ok(warm);
        }
        if f_warm > T::zero() {
            lo = warm;
            f_lo = f_warm;
            hi = warm + warm;
            f_hi = f(hi)?;
        } else {
            // Shrink toward zero until the residual turns positive.
            hi = warm;
            f_hi = f_warm;
            lo = warm * T::of(0.5);
            f_lo = f(lo)?;
            let mut halvings = 0;
            while f_lo <= T::zero() {
                halvings += 1;
                if halvings > MAX_DOUBLINGS {
                    // The constraint is inactive even at λ = 0.
                    return Ok(T::zero());
                }
                hi = lo;
                f_hi = f_lo;
                lo = lo * T::of(0.5);
                if lo < T::of(1e-300) {
                    let f_zero = f(T::zero())?;
                    if f_zero <= T::zero() {
                        return Ok(T::zero());
                    }
                    lo = T::zero();
                    f_lo = f_zero;
                    break;
                }
                f_lo = f(lo)?;
            }
        }
    } else {
        lo = T::zero();
        f_lo = f(lo)?;
        if f_lo <= T::zero() {
            return Ok(lo);
        }
        hi = T::one();
        f_hi = f(hi)?;
    }
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
        f_lo = f_hi;
        hi = hi + hi;
        f_hi = f(hi)?;
    }
    let _ = (f_lo, f_hi);
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
    // Bracket is at floating-point resolution; the feasible end wins.
    Ok(hi)
}

fn bisect_decreasing_fallible<T: Scalar>(
    f: impl Fn(T) -> Result<T>,
    residual_tol: T,
    context: &'static str,
) -> Result<T> {
    warm_bisect_decreasing(f, T::zero(), residual_tol, context)
}
