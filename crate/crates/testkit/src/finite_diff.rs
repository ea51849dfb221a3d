//! Central finite differences against analytic complex-matrix gradients.
//!
//! Convention: for a real function `f` of a complex matrix, the gradient
//! `G = 2 ∂f/∂Z̄`, so `∂f/∂Re(z_mn) = Re(G_mn)` and
//! `∂f/∂Im(z_mn) = Im(G_mn)`.

use cogmimo::{CMat, Cx};

/// Largest relative error over all real-part and imaginary-part partials,
/// measured against the gradient's Frobenius scale.
pub fn max_relative_gradient_error(
    f: &impl Fn(&CMat) -> f64,
    z: &CMat,
    analytic: &CMat,
    step: f64,
) -> f64 {
    let scale = analytic.frob_norm().max(1e-12);
    let mut worst: f64 = 0.0;
    for i in 0..z.rows() {
        for j in 0..z.cols() {
            for re_part in [true, false] {
                let delta = if re_part {
                    Cx::new(step, 0.0)
                } else {
                    Cx::new(0.0, step)
                };
                let mut plus = z.clone();
                plus.set(i, j, z.at(i, j) + delta);
                let mut minus = z.clone();
                minus.set(i, j, z.at(i, j) - delta);
                let numeric = (f(&plus) - f(&minus)) / (2.0 * step);
                let expected = if re_part {
                    analytic.at(i, j).re
                } else {
                    analytic.at(i, j).im
                };
                worst = worst.max((numeric - expected).abs() / scale);
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_gradient_is_exact() {
        // f(Z) = ‖Z‖², gradient 2Z.
        let mut z = CMat::zeros(2, 2);
        z.set(0, 0, Cx::new(1.0, -2.0));
        z.set(1, 1, Cx::new(0.5, 0.25));
        let grad = z.scale_real(2.0);
        let f = |m: &CMat| m.frob_norm_sq();
        let err = max_relative_gradient_error(&f, &z, &grad, 1e-5);
        assert!(err < 1e-9, "err {err}");
    }
}
