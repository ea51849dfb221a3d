//! Geometric multipath channel realizations and scenario assembly.
//!
//! Each link is a sum of `N_p` planar-wave paths between uniform linear
//! arrays, `H = sqrt(T·R/N_p) Σ_l α_l a_r(φ_l^r) a_t(φ_l^t)ᴴ`, with
//! `α_l ~ CN(0,1)` and angles uniform on `[0, 2π)`. The normalization gives
//! `E‖H‖_F² = T·R`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::numerics::{hermitian_eig, ComplexMatrix};
use crate::rng::SeededRng;
use crate::scalar::Scalar;
use crate::Result;

/// Antenna counts, RF-chain counts, stream counts and power parameters of
/// one PU/SU deployment. Powers and variances are linear units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig<T: Scalar> {
    /// SU transmit / receive antennas.
    pub t_s: usize,
    pub r_s: usize,
    /// PU transmit / receive antennas.
    pub t_p: usize,
    pub r_p: usize,
    /// SU RF chains at transmitter / receiver.
    pub n_st: usize,
    pub n_sr: usize,
    /// SU / PU stream counts.
    pub l_s: usize,
    pub l_p: usize,
    pub sigma_s_sq: T,
    pub sigma_p_sq: T,
    pub sigma_n_sq: T,
    /// SU transmit power budget.
    pub p_max: T,
    /// Interference cap at the PU receiver.
    pub i_max: T,
    /// Propagation paths per link.
    pub n_p: usize,
    /// ULA element spacing in wavelengths.
    pub d_over_lambda: T,
}

impl<T: Scalar> SystemConfig<T> {
    /// Baseline large-array setup: 64×16 SU with four RF chains per end,
    /// four streams, a 16×16 PU sending a rank-4 signal, 15 paths, λ/2
    /// spacing, unit power and interference budgets.
    pub fn default_64x16() -> Self {
        Self {
            t_s: 64,
            r_s: 16,
            t_p: 16,
            r_p: 16,
            n_st: 4,
            n_sr: 4,
            l_s: 4,
            l_p: 4,
            sigma_s_sq: T::one(),
            sigma_p_sq: T::one(),
            sigma_n_sq: T::of(0.1),
            p_max: T::one(),
            i_max: T::one(),
            n_p: 15,
            d_over_lambda: T::of(0.5),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("t_s", self.t_s),
            ("r_s", self.r_s),
            ("t_p", self.t_p),
            ("r_p", self.r_p),
            ("n_st", self.n_st),
            ("n_sr", self.n_sr),
            ("l_s", self.l_s),
            ("l_p", self.l_p),
            ("n_p", self.n_p),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be positive")));
            }
        }
        if self.l_s > self.n_st.min(self.n_sr) {
            return Err(Error::Config(format!(
                "l_s = {} exceeds min(n_st, n_sr) = {}",
                self.l_s,
                self.n_st.min(self.n_sr)
            )));
        }
        if self.n_st > self.t_s || self.n_sr > self.r_s {
            return Err(Error::Config(
                "RF chain counts cannot exceed antenna counts".into(),
            ));
        }
        for (name, v) in [
            ("sigma_s_sq", self.sigma_s_sq),
            ("sigma_p_sq", self.sigma_p_sq),
            ("sigma_n_sq", self.sigma_n_sq),
            ("p_max", self.p_max),
            ("i_max", self.i_max),
            ("d_over_lambda", self.d_over_lambda),
        ] {
            if v <= T::zero() {
                return Err(Error::Config(format!("{name} must be > 0")));
            }
        }
        Ok(())
    }
}

/// Gain and angle pair of one propagation path, retained so a realization
/// can be reproduced and inspected.
#[derive(Debug, Clone)]
pub struct PathComponent<T: Scalar> {
    pub gain: Complex<T>,
    pub angle_rx: T,
    pub angle_tx: T,
}

/// One link's channel matrix together with the paths that generated it.
#[derive(Debug, Clone)]
pub struct LinkChannel<T: Scalar> {
    pub matrix: ComplexMatrix<T>,
    pub paths: Vec<PathComponent<T>>,
}

/// The four channel matrices of one PU/SU scenario draw.
#[derive(Debug, Clone)]
pub struct ChannelRealization<T: Scalar> {
    pub h_ss: LinkChannel<T>,
    pub h_ps: LinkChannel<T>,
    pub h_sp: LinkChannel<T>,
    pub h_pp: LinkChannel<T>,
}

/// Everything the solvers consume: the SU direct channel, the SU→PU
/// interference channel, the effective PU→SU matrix `H̃_sp = H_sp F_p`, and
/// the parameters. The SU never needs `H_sp` or `F_p` separately; they are
/// retained for reproducibility.
#[derive(Debug, Clone)]
pub struct ScenarioChannels<T: Scalar> {
    pub h_ss: ComplexMatrix<T>,
    pub h_ps: ComplexMatrix<T>,
    pub h_sp_tilde: ComplexMatrix<T>,
    pub f_p: ComplexMatrix<T>,
    pub config: SystemConfig<T>,
    pub realization: Option<ChannelRealization<T>>,
}

impl<T: Scalar> ScenarioChannels<T> {
    /// Assembles a scenario from explicit matrices; `h_sp_tilde` is formed
    /// as `h_sp · f_p` so the product identity holds by construction.
    pub fn from_parts(
        h_ss: ComplexMatrix<T>,
        h_ps: ComplexMatrix<T>,
        h_sp: &ComplexMatrix<T>,
        f_p: ComplexMatrix<T>,
        config: SystemConfig<T>,
    ) -> Result<Self> {
        config.validate()?;
        let expect = |cond: bool, what: &'static str, found: (usize, usize)| {
            if cond {
                Ok(())
            } else {
                Err(Error::Dimension {
                    context: "ScenarioChannels::from_parts",
                    expected: what.into(),
                    found: format!("{}x{}", found.0, found.1),
                })
            }
        };
        expect(
            h_ss.shape() == (config.r_s, config.t_s),
            "h_ss of shape r_s x t_s",
            h_ss.shape(),
        )?;
        expect(
            h_ps.shape() == (config.r_p, config.t_s),
            "h_ps of shape r_p x t_s",
            h_ps.shape(),
        )?;
        expect(
            h_sp.shape() == (config.r_s, config.t_p),
            "h_sp of shape r_s x t_p",
            h_sp.shape(),
        )?;
        expect(
            f_p.shape() == (config.t_p, config.l_p),
            "f_p of shape t_p x l_p",
            f_p.shape(),
        )?;
        let h_sp_tilde = h_sp * &f_p;
        Ok(Self {
            h_ss,
            h_ps,
            h_sp_tilde,
            f_p,
            config,
            realization: None,
        })
    }

    /// FNV-1a hash over the bit patterns of all scenario matrices; stable
    /// within a build, used for reproducibility golden tests and
    /// provenance records.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for m in [&self.h_ss, &self.h_ps, &self.h_sp_tilde, &self.f_p] {
            for z in m.entries_row_major() {
                eat(z.re.as_f64().to_bits());
                eat(z.im.as_f64().to_bits());
            }
        }
        h
    }
}

/// Unit-norm response of a `num_elements`-element ULA at azimuth `phi`:
/// element `t` is `exp(j·t·2π·(d/λ)·sin φ) / sqrt(T)`.
pub fn ula_response<T: Scalar>(
    num_elements: usize,
    phi: T,
    d_over_lambda: T,
) -> ComplexMatrix<T> {
    assert!(num_elements >= 1);
    let norm = T::one() / T::of(num_elements as f64).sqrt();
    let step = T::of(std::f64::consts::TAU) * d_over_lambda * phi.sin();
    ComplexMatrix::from_fn(num_elements, 1, |t, _| {
        let phase = step * T::of(t as f64);
        Complex::new(phase.cos() * norm, phase.sin() * norm)
    })
}

/// Draws one link: `sqrt(T·R/N_p) Σ_l α_l a_r(φ_l^r) a_t(φ_l^t)ᴴ` with
/// `α_l ~ CN(0,1)` and angles uniform on `[0, 2π)`. Deterministic given the
/// seed.
pub fn draw_channel<T: Scalar>(
    t_antennas: usize,
    r_antennas: usize,
    n_paths: usize,
    d_over_lambda: T,
    rng_seed: u64,
) -> LinkChannel<T> {
    let mut rng = SeededRng::from_seed(rng_seed);
    draw_link(t_antennas, r_antennas, n_paths, d_over_lambda, &mut rng)
}

fn draw_link<T: Scalar>(
    t_antennas: usize,
    r_antennas: usize,
    n_paths: usize,
    d_over_lambda: T,
    rng: &mut SeededRng,
) -> LinkChannel<T> {
    assert!(n_paths >= 1);
    let mut matrix = ComplexMatrix::zeros(r_antennas, t_antennas);
    let mut paths = Vec::with_capacity(n_paths);
    let scale = T::of((t_antennas * r_antennas) as f64 / n_paths as f64).sqrt();
    for _ in 0..n_paths {
        let gain: Complex<T> = rng.complex_normal();
        let angle_rx: T = rng.angle();
        let angle_tx: T = rng.angle();
        let a_r = ula_response(r_antennas, angle_rx, d_over_lambda);
        let a_t = ula_response(t_antennas, angle_tx, d_over_lambda);
        let outer = &a_r * &a_t.adjoint();
        let term = outer.scale_complex(gain * Complex::new(scale, T::zero()));
        matrix = &matrix + &term;
        paths.push(PathComponent {
            gain,
            angle_rx,
            angle_tx,
        });
    }
    LinkChannel { matrix, paths }
}

/// Draws the four links of a scenario and forms the PU precoder.
///
/// The PU transmit behavior is abstracted: `F_p` is built from the top
/// `L_p` right singular vectors of `H_pp` (eigenbeamforming, the natural
/// rational-PU strategy) scaled so `‖F_p‖_F² = P_max`, which produces the
/// required rank-`L_p` interference signal.
pub fn build_scenario<T: Scalar>(
    config: &SystemConfig<T>,
    rng_seed: u64,
) -> Result<ScenarioChannels<T>> {
    config.validate()?;
    let attainable_rank = config.t_p.min(config.r_p).min(config.n_p);
    if config.l_p > attainable_rank {
        return Err(Error::Config(format!(
            "l_p = {} exceeds the attainable PU signal rank {}",
            config.l_p, attainable_rank
        )));
    }

    let mut rng = SeededRng::from_seed(rng_seed);
    let h_ss = draw_link(config.t_s, config.r_s, config.n_p, config.d_over_lambda, &mut rng);
    let h_ps = draw_link(config.t_s, config.r_p, config.n_p, config.d_over_lambda, &mut rng);
    let h_sp = draw_link(config.t_p, config.r_s, config.n_p, config.d_over_lambda, &mut rng);
    let h_pp = draw_link(config.t_p, config.r_p, config.n_p, config.d_over_lambda, &mut rng);

    // Top-L_p right singular vectors of H_pp via its Gram matrix.
    let gram = (&h_pp.matrix.adjoint() * &h_pp.matrix).symmetrize();
    let eig = hermitian_eig(&gram)?;
    let basis = eig.eigenvectors.leading_cols(config.l_p);
    let f_p = basis.scale_real((config.p_max / T::of(config.l_p as f64)).sqrt());

    let mut scenario = ScenarioChannels::from_parts(
        h_ss.matrix.clone(),
        h_ps.matrix.clone(),
        &h_sp.matrix,
        f_p,
        config.clone(),
    )?;
    scenario.realization = Some(ChannelRealization {
        h_ss,
        h_ps,
        h_sp,
        h_pp,
    });
    Ok(scenario)
}
