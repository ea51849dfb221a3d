//! Real scalar abstraction the whole crate is generic over.

use num_traits::NumCast;

/// Real scalar type for all matrix entries and tolerances.
///
/// `f64` is the supported precision; `f32` satisfies the bounds and can be
/// instantiated for experimentation, but the pinned tolerances (1e-10
/// eigen-reconstruction, 1e-12 unit-modulus, 1e-4 ADMM residuals) are
/// calibrated for double precision.
pub trait Scalar:
    nalgebra::RealField + NumCast + Copy + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant into the scalar type.
    fn of(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("finite f64 constant converts to scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f64 {}
impl Scalar for f32 {}
