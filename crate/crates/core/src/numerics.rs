//! Minimal complex linear-algebra contract every other module builds on.
//!
//! This is the only module that touches the numerical backend (nalgebra);
//! the private `inner` field keeps it that way. All operations are
//! deterministic: identical inputs produce bit-identical outputs within
//! a build.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::Error;
use crate::rng::SeededRng;
use crate::scalar::Scalar;
use crate::Result;

/// Relative tolerance for the Hermitian-input check.
const HERMITIAN_TOL: f64 = 1e-10;
/// Relative residual accepted by [`solve_linear`].
const SOLVE_TOL: f64 = 1e-8;

/// Modulus of a complex scalar under the [`Scalar`] bounds.
pub fn modulus<T: Scalar>(z: Complex<T>) -> T {
    z.norm_sqr().sqrt()
}

/// Dense complex matrix, the universal currency of all solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T: Scalar> {
    inner: DMatrix<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex<T>) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            inner: DMatrix::from_fn(rows, cols, f),
        }
    }

    /// Builds from entries in row-major logical order.
    pub fn from_rows(rows: usize, cols: usize, entries: &[Complex<T>]) -> Self {
        assert_eq!(rows * cols, entries.len(), "entry count must match shape");
        Self::from_fn(rows, cols, |i, j| entries[i * cols + j])
    }

    pub fn from_real_diag(d: &[T]) -> Self {
        Self::from_fn(d.len(), d.len(), |i, j| {
            if i == j {
                Complex::new(d[i], T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })
    }

    /// Matrix with i.i.d. circularly symmetric unit-variance Gaussian entries.
    pub fn random_gaussian(rows: usize, cols: usize, rng: &mut SeededRng) -> Self {
        // Draw row-major so the stream layout matches the logical order.
        let entries: Vec<Complex<T>> = (0..rows * cols).map(|_| rng.complex_normal()).collect();
        Self::from_rows(rows, cols, &entries)
    }

    /// Matrix of unit-modulus entries with i.i.d. uniform phases.
    pub fn random_unit_modulus(rows: usize, cols: usize, rng: &mut SeededRng) -> Self {
        let entries: Vec<Complex<T>> = (0..rows * cols).map(|_| rng.unit_phase()).collect();
        Self::from_rows(rows, cols, &entries)
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.inner.nrows(), self.inner.ncols())
    }

    pub fn at(&self, i: usize, j: usize) -> Complex<T> {
        self.inner[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.inner[(i, j)] = v;
    }

    /// Entries in row-major logical order.
    pub fn entries_row_major(&self) -> Vec<Complex<T>> {
        let (r, c) = self.shape();
        let mut out = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            inner: self.inner.map(f),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        Self {
            inner: self.inner.map(|z| z * s),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale_complex(Complex::new(s, T::zero()))
    }

    /// Right-multiplication by a real diagonal: scales column `j` by `d[j]`.
    pub fn scale_cols(&self, d: &[T]) -> Self {
        assert_eq!(d.len(), self.cols());
        Self::from_fn(self.rows(), self.cols(), |i, j| {
            self.inner[(i, j)] * Complex::new(d[j], T::zero())
        })
    }

    /// Left-multiplication by a real diagonal: scales row `i` by `d[i]`.
    pub fn scale_rows(&self, d: &[T]) -> Self {
        assert_eq!(d.len(), self.rows());
        Self::from_fn(self.rows(), self.cols(), |i, j| {
            self.inner[(i, j)] * Complex::new(d[i], T::zero())
        })
    }

    /// The first `k` columns.
    pub fn leading_cols(&self, k: usize) -> Self {
        assert!(k >= 1 && k <= self.cols());
        Self {
            inner: self.inner.columns(0, k).into_owned(),
        }
    }

    pub fn frob_norm_sq(&self) -> T {
        let mut acc = T::zero();
        for z in self.inner.iter() {
            acc += z.norm_sqr();
        }
        acc
    }

    pub fn frob_norm(&self) -> T {
        self.frob_norm_sq().sqrt()
    }

    pub fn trace(&self) -> Complex<T> {
        assert_eq!(self.rows(), self.cols(), "trace needs a square matrix");
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.rows() {
            acc += self.inner[(i, i)];
        }
        acc
    }

    /// Real part of the Hermitian inner product `tr(selfᴴ other)`.
    pub fn re_inner(&self, other: &Self) -> T {
        assert_eq!(self.shape(), other.shape());
        let mut acc = T::zero();
        for (a, b) in self.inner.iter().zip(other.inner.iter()) {
            // Re(conj(a) * b)
            acc += a.re * b.re + a.im * b.im;
        }
        acc
    }

    /// Squared Euclidean norm of each row.
    pub fn row_norms_sq(&self) -> Vec<T> {
        let (r, c) = self.shape();
        let mut out = vec![T::zero(); r];
        for i in 0..r {
            let mut acc = T::zero();
            for j in 0..c {
                acc += self.inner[(i, j)].norm_sqr();
            }
            out[i] = acc;
        }
        out
    }

    pub fn dist_frob(&self, other: &Self) -> T {
        assert_eq!(self.shape(), other.shape());
        let mut acc = T::zero();
        for (a, b) in self.inner.iter().zip(other.inner.iter()) {
            acc += (a - b).norm_sqr();
        }
        acc.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.inner
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Errors when any entry is NaN or infinite; solvers call this before
    /// handing matrices back to callers.
    pub fn ensure_finite(&self, context: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { context })
        }
    }

    fn hermitian_deviation(&self) -> T {
        let adj = self.adjoint();
        self.dist_frob(&adj)
    }

    /// `(A + Aᴴ)/2`, absorbing round-off before eigendecomposition.
    pub fn symmetrize(&self) -> Self {
        let adj = self.adjoint();
        Self {
            inner: (&self.inner + &adj.inner).map(|z| z * Complex::new(T::of(0.5), T::zero())),
        }
    }
}

impl<T: Scalar> std::ops::Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.shape(), rhs.shape());
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl<T: Scalar> std::ops::Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.shape(), rhs.shape());
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl<T: Scalar> std::ops::Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(
            self.cols(),
            rhs.rows(),
            "inner dimensions must agree for matrix product"
        );
        ComplexMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermitianEig<T: Scalar> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Scalar> HermitianEig<T> {
    /// `V f(λ) Vᴴ` for a real function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let mapped: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let scaled = self.eigenvectors.scale_cols(&mapped);
        let result = &scaled * &self.eigenvectors.adjoint();
        result.symmetrize()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must be square and Hermitian within 1e-10 relative tolerance;
/// it is symmetrized before decomposition to absorb round-off. Eigenvalues
/// come back in descending order with orthonormal eigenvectors, and the
/// reconstruction `V diag(λ) Vᴴ` is verified against the input.
pub fn hermitian_eig<T: Scalar>(a: &ComplexMatrix<T>) -> Result<HermitianEig<T>> {
    if a.rows() != a.cols() {
        return Err(Error::Dimension {
            context: "hermitian_eig",
            expected: "square matrix".into(),
            found: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    let scale = a.frob_norm().max(T::one());
    let deviation = a.hermitian_deviation();
    if deviation > T::of(HERMITIAN_TOL) * scale {
        return Err(Error::NotHermitian {
            deviation: (deviation / scale).as_f64(),
            tolerance: HERMITIAN_TOL,
        });
    }

    let sym = a.symmetrize();
    let eig = sym.inner.clone().symmetric_eigen();

    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    // Descending eigenvalue order; ties broken by index for determinism.
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });

    let eigenvalues: Vec<T> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);

    let out = HermitianEig {
        eigenvalues,
        eigenvectors,
    };

    // Contract checks: reconstruction and orthonormality at 1e-10 relative.
    let tol = T::of(HERMITIAN_TOL) * scale;
    let rec = out.apply(|l| l);
    if rec.dist_frob(&sym) > tol {
        return Err(Error::Numerical {
            context: "hermitian_eig",
            detail: format!(
                "reconstruction error {:.3e} exceeds {:.3e}",
                rec.dist_frob(&sym).as_f64(),
                tol.as_f64()
            ),
        });
    }
    let vhv = &out.eigenvectors.adjoint() * &out.eigenvectors;
    let id = ComplexMatrix::identity(n);
    if vhv.dist_frob(&id) > T::of(HERMITIAN_TOL) {
        return Err(Error::Numerical {
            context: "hermitian_eig",
            detail: "eigenvector basis lost orthonormality".into(),
        });
    }
    Ok(out)
}

/// Exponents supported by [`psd_power`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsdPower {
    /// `A^{1/2}`
    Sqrt,
    /// `A^{-1/2}`
    InvSqrt,
    /// `A^{-1}`
    Inverse,
}

/// Real power of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues within `-1e-12 · ‖A‖_F` of zero are clamped to zero. For the
/// negative exponents every eigenvalue must stay above the floor
/// `ε = 1e-10 · trace(A)/n`; a smaller one is an error rather than a
/// silently regularized value.
pub fn psd_power<T: Scalar>(a: &ComplexMatrix<T>, p: PsdPower) -> Result<ComplexMatrix<T>> {
    let eig = hermitian_eig(a)?;
    let clamp_floor = -T::of(1e-12) * a.frob_norm();
    let mut eigenvalues = Vec::with_capacity(eig.eigenvalues.len());
    for &l in &eig.eigenvalues {
        if l < clamp_floor {
            return Err(Error::Numerical {
                context: "psd_power",
                detail: format!("eigenvalue {:.6e} is negative beyond tolerance", l.as_f64()),
            });
        }
        eigenvalues.push(if l < T::zero() { T::zero() } else { l });
    }

    if matches!(p, PsdPower::InvSqrt | PsdPower::Inverse) {
        let n = T::of(a.rows() as f64);
        let floor = T::of(1e-10) * eig.eigenvalues.iter().fold(T::zero(), |s, &l| s + l) / n;
        for &l in &eigenvalues {
            if l < floor {
                return Err(Error::SingularEigenvalue {
                    context: "psd_power",
                    eigenvalue: l.as_f64(),
                    floor: floor.as_f64(),
                });
            }
        }
    }

    let eig = HermitianEig {
        eigenvalues,
        eigenvectors: eig.eigenvectors,
    };
    Ok(match p {
        PsdPower::Sqrt => eig.apply(|l| l.sqrt()),
        PsdPower::InvSqrt => eig.apply(|l| T::one() / l.sqrt()),
        PsdPower::Inverse => eig.apply(|l| T::one() / l),
    })
}

/// Solves `A X = B` for square full-rank `A` without forming an inverse.
///
/// The residual `‖AX − B‖_F ≤ 1e-8 ‖B‖_F` is verified; failure reports the
/// system as singular so callers can regularize.
pub fn solve_linear<T: Scalar>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    if a.rows() != a.cols() {
        return Err(Error::Dimension {
            context: "solve_linear",
            expected: "square matrix".into(),
            found: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    if a.cols() != b.rows() {
        return Err(Error::Dimension {
            context: "solve_linear",
            expected: format!("{} rows in rhs", a.cols()),
            found: format!("{}", b.rows()),
        });
    }
    let lu = a.inner.clone().full_piv_lu();
    let x = lu
        .solve(&b.inner)
        .ok_or(Error::Singular {
            context: "solve_linear",
        })?;
    let x = ComplexMatrix { inner: x };
    if !x.is_finite() {
        return Err(Error::Singular {
            context: "solve_linear",
        });
    }
    let residual = (&(a * &x) - b).frob_norm();
    let b_norm = b.frob_norm();
    if residual > T::of(SOLVE_TOL) * b_norm.max(T::of(f64::MIN_POSITIVE)) {
        return Err(Error::Singular {
            context: "solve_linear",
        });
    }
    Ok(x)
}

/// `log2 det(A)` for a Hermitian positive-definite matrix.
pub fn log2_det_hermitian_pd<T: Scalar>(a: &ComplexMatrix<T>) -> Result<T> {
    let eig = hermitian_eig(a)?;
    let mut acc = T::zero();
    for &l in &eig.eigenvalues {
        if l <= T::zero() {
            return Err(Error::Numerical {
                context: "log2_det_hermitian_pd",
                detail: format!("non-positive eigenvalue {:.6e}", l.as_f64()),
            });
        }
        acc += l.ln();
    }
    Ok(acc / T::of(std::f64::consts::LN_2))
}

/// `log2 det(I + AᴴA)` evaluated through the eigenvalues of the Gram matrix.
pub fn log2_det_i_plus_gram<T: Scalar>(a: &ComplexMatrix<T>) -> Result<T> {
    let gram = (&a.adjoint() * a).symmetrize();
    let eig = hermitian_eig(&gram)?;
    let mut acc = T::zero();
    for &l in &eig.eigenvalues {
        let l = if l < T::zero() { T::zero() } else { l };
        acc += (T::one() + l).ln();
    }
    Ok(acc / T::of(std::f64::consts::LN_2))
}
