//! Sweep specification: a JSON-mappable description of one experiment.

use serde::{Deserialize, Serialize};

use cogmimo::{AdmmConfig, FrobConfig, Real, SystemConfig};

use crate::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Digital,
    HybridMi,
    HybridFrob,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Digital => "digital",
            Method::HybridMi => "hybrid-mi",
            Method::HybridFrob => "hybrid-frob",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "digital" => Ok(Method::Digital),
            "hybrid-mi" => Ok(Method::HybridMi),
            "hybrid-frob" => Ok(Method::HybridFrob),
            other => Err(format!(
                "unknown method '{other}' (expected digital, hybrid-mi or hybrid-frob)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Receiver {
    DigitalMmse,
    HybridMmse,
}

impl std::str::FromStr for Receiver {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "digital-mmse" => Ok(Receiver::DigitalMmse),
            "hybrid-mmse" => Ok(Receiver::HybridMmse),
            other => Err(format!(
                "unknown receiver '{other}' (expected digital-mmse or hybrid-mmse)"
            )),
        }
    }
}

/// Parameters of the hybrid MMSE post-coder ADMM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RxConfig {
    pub beta: Real,
    pub eps_g: Real,
    pub eps_p2: Real,
    pub n_max: usize,
}

impl Default for RxConfig {
    fn default() -> Self {
        Self {
            beta: 1.0,
            eps_g: 1e-3,
            eps_p2: 1e-4,
            n_max: 500,
        }
    }
}

/// One sweep: system, SNR grid, trial count, methods, receiver and solver
/// parameters. Maps 1:1 onto the JSON config file; CLI flags override
/// individual fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub system: SystemConfig,
    pub snr_grid_db: Vec<Real>,
    pub num_trials: usize,
    pub methods: Vec<Method>,
    pub receiver: Receiver,
    pub base_seed: u64,
    #[serde(default)]
    pub admm: AdmmConfig,
    #[serde(default)]
    pub frob: FrobConfig,
    #[serde(default)]
    pub rx: RxConfig,
}

impl SweepSpec {
    /// Baseline large-array sweep: both hybrid designs against the digital
    /// benchmark with the hybrid receiver.
    pub fn default_64x16() -> Self {
        Self {
            system: SystemConfig::default_64x16(),
            snr_grid_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0],
            num_trials: 100,
            methods: vec![Method::Digital, Method::HybridMi, Method::HybridFrob],
            receiver: Receiver::HybridMmse,
            base_seed: 1,
            admm: AdmmConfig::default(),
            frob: FrobConfig::default(),
            rx: RxConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.system
            .validate()
            .map_err(|e| SimError::Spec(e.to_string()))?;
        if self.snr_grid_db.is_empty() {
            return Err(SimError::Spec("snr_grid_db must be non-empty".into()));
        }
        if self.num_trials == 0 {
            return Err(SimError::Spec("num_trials must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(SimError::Spec("methods must be non-empty".into()));
        }
        self.admm
            .validate()
            .map_err(|e| SimError::Spec(e.to_string()))?;
        self.frob
            .validate()
            .map_err(|e| SimError::Spec(e.to_string()))?;
        if self.rx.beta <= 0.0 || self.rx.eps_g <= 0.0 || self.rx.eps_p2 <= 0.0 {
            return Err(SimError::Spec("rx parameters must be positive".into()));
        }
        if self.rx.n_max == 0 {
            return Err(SimError::Spec("rx n_max must be >= 1".into()));
        }
        Ok(())
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let spec: SweepSpec = serde_json::from_str(&text).map_err(|e| SimError::Parse {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    /// Noise power realizing an SNR point under the `P_max/σ_n²`
    /// definition.
    pub fn noise_power(&self, snr_db: Real) -> Real {
        self.system.p_max * (10f64).powf(-snr_db / 10.0)
    }

    /// FNV-1a over the canonical JSON encoding, recorded as provenance.
    pub fn digest(&self) -> u64 {
        let text = serde_json::to_string(self).expect("spec serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in text.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_is_valid_and_round_trips() {
        let spec = SweepSpec::default_64x16();
        spec.validate().unwrap();
        let text = serde_json::to_string_pretty(&spec).unwrap();
        let back: SweepSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
        assert_eq!(spec.digest(), back.digest());
    }

    #[test]
    fn snr_definition_matches_power_ratio() {
        let spec = SweepSpec::default_64x16();
        assert!((spec.noise_power(0.0) - spec.system.p_max).abs() < 1e-15);
        assert!((spec.noise_power(10.0) - spec.system.p_max * 0.1).abs() < 1e-15);
        assert!((spec.noise_power(-10.0) - spec.system.p_max * 10.0).abs() < 1e-12);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Digital, Method::HybridMi, Method::HybridFrob] {
            let parsed: Method = m.name().parse().unwrap();
            assert_eq!(parsed, m);
        }
        assert!("omp".parse::<Method>().is_err());
    }
}
