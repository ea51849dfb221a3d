//! Spectral efficiency, transmit/interference powers and feasibility
//! audits — the quantities the sweeps report.

use serde::{Deserialize, Serialize};

use crate::channel::ScenarioChannels;
use crate::digital::interference_plus_noise;
use crate::numerics::{hermitian_eig, log2_det_hermitian_pd, ComplexMatrix};
use crate::scalar::Scalar;
use crate::Result;

/// Per-link evaluation record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkReport<T: Scalar> {
    /// bits/s/Hz; zero when produced by a constraint-only audit.
    pub spectral_efficiency: T,
    /// `‖F‖_F²`.
    pub tx_power: T,
    /// `‖H_ps F‖_F²`.
    pub interference_power: T,
    /// Relative excess over the power budget, 0 when satisfied.
    pub power_violation: T,
    /// Relative excess over the interference cap, 0 when satisfied.
    pub interference_violation: T,
    /// Number of receiver directions that carried information; smaller
    /// than the stream count only for rank-deficient post-coders.
    pub effective_streams: usize,
}

/// Achievable rate `log2 det(I + R_n^{-1} Wᴴ H F Fᴴ Hᴴ W)` with
/// `R_n = Wᴴ(H̃_sp H̃_spᴴ + σ_n² I) W`, under unit symbol variance.
///
/// A rank-deficient post-coder is evaluated on its column space: columns
/// of `W` are compressed onto the eigenvectors of `WᴴW` with non-negligible
/// eigenvalues, which leaves the rate unchanged and keeps `R_n`
/// invertible.
pub fn spectral_efficiency<T: Scalar>(
    scenario: &ScenarioChannels<T>,
    precoder: &ComplexMatrix<T>,
    postcoder: &ComplexMatrix<T>,
) -> Result<T> {
    Ok(link_report(scenario, precoder, postcoder)?.spectral_efficiency)
}

/// Full evaluation: rate plus the exact power audit.
pub fn link_report<T: Scalar>(
    scenario: &ScenarioChannels<T>,
    precoder: &ComplexMatrix<T>,
    postcoder: &ComplexMatrix<T>,
) -> Result<LinkReport<T>> {
    let mut report = audit(scenario, precoder);

    // Compress W onto its column space.
    let gram_w = (&postcoder.adjoint() * postcoder).symmetrize();
    let eig = hermitian_eig(&gram_w)?;
    let lead = eig.eigenvalues.first().copied().unwrap_or_else(T::zero);
    let rank = eig
        .eigenvalues
        .iter()
        .take_while(|&&l| l > lead * T::of(1e-12) && l > T::zero())
        .count();
    report.effective_streams = rank;
    if rank == 0 {
        return Ok(report);
    }
    let w_eff = postcoder * &eig.eigenvectors.leading_cols(rank);

    let q = interference_plus_noise(scenario);
    let r_n = (&(&w_eff.adjoint() * &(&q * &w_eff))).symmetrize();
    let signal = &w_eff.adjoint() * &(&scenario.h_ss * precoder);
    let total = (&r_n + &(&signal * &signal.adjoint()).symmetrize()).symmetrize();
    let rate = log2_det_hermitian_pd(&total)? - log2_det_hermitian_pd(&r_n)?;
    report.spectral_efficiency = if rate < T::zero() { T::zero() } else { rate };
    Ok(report)
}

/// Exact transmit and interference powers with relative violations,
/// `max(0, value/limit − 1)`; no spectral efficiency is evaluated.
pub fn audit<T: Scalar>(
    scenario: &ScenarioChannels<T>,
    precoder: &ComplexMatrix<T>,
) -> LinkReport<T> {
    let tx_power = precoder.frob_norm_sq();
    let interference_power = (&scenario.h_ps * precoder).frob_norm_sq();
    let rel_excess = |value: T, limit: T| {
        let e = value / limit - T::one();
        if e > T::zero() {
            e
        } else {
            T::zero()
        }
    };
    LinkReport {
        spectral_efficiency: T::zero(),
        tx_power,
        interference_power,
        power_violation: rel_excess(tx_power, scenario.config.p_max),
        interference_violation: rel_excess(interference_power, scenario.config.i_max),
        effective_streams: 0,
    }
}
