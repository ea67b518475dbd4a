//! Scenario configuration.
//!
//! A [`ScenarioConfig`] carries every physical and system parameter of the
//! relay scenario together with the switches that select between modelling
//! variants. Defaults are the reference highway scenario (28 GHz, 8-element
//! UAV array, 5 lanes, 10 ms end-to-end budget).
//!
//! Units at this boundary: angles in degrees, distances in meters, powers in
//! dBm, durations in seconds. Vehicle density is held in vehicles per meter
//! but read and written as `lambda_per_km` in config files.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::numeric::floor_tol;

/// Radio resource assignment strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RraKind {
    /// Equal split of the grid over all beams.
    Fair,
    /// Split proportional to each beam's road footprint.
    #[serde(alias = "bb")]
    BeamBased,
}

impl RraKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RraKind::Fair => "fair",
            RraKind::BeamBased => "bb",
        }
    }
}

/// How the covered road segment length is derived from altitude and field of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FootprintMode {
    /// `2 h cos(psi / 2)`.
    #[serde(alias = "paper")]
    PaperCos,
    /// `2 h tan(psi / 2)`, the planar projection of the field of view.
    #[serde(alias = "geometric")]
    GeometricTan,
}

impl FootprintMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FootprintMode::PaperCos => "paper",
            FootprintMode::GeometricTan => "geometric",
        }
    }
}

/// Whether the per-beam access probability counts the outcome with zero
/// valid requests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmptyBeamMode {
    /// Binomial sum from one request upward.
    #[serde(alias = "paper")]
    PaperExact,
    /// Full binomial CDF `Prob(requests <= resources)`.
    #[serde(alias = "include-zero")]
    IncludeZero,
}

impl EmptyBeamMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EmptyBeamMode::PaperExact => "paper",
            EmptyBeamMode::IncludeZero => "include-zero",
        }
    }
}

/// Channel fidelity used by the Monte Carlo engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimFidelity {
    /// Per-vehicle Gaussian SNR around the beam barycenter mean, footprint association.
    #[serde(alias = "model")]
    ModelMatched,
    /// Per-vehicle distance, shadowing and multipath channel, best-beam association.
    #[serde(alias = "full")]
    FullChannel,
}

impl SimFidelity {
    pub fn as_str(self) -> &'static str {
        match self {
            SimFidelity::ModelMatched => "model",
            SimFidelity::FullChannel => "full",
        }
    }
}

/// Confidence interval construction for empirical access probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethod {
    Normal,
    Wilson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// UAV altitude, m.
    pub h_uav: f64,
    /// UAV field of view, degrees.
    pub psi_fov: f64,
    /// UAV antenna elements.
    pub n_uav: usize,
    /// CAV antenna elements.
    pub n_cav: usize,
    /// UAV RF chains.
    pub n_rf: usize,
    /// CAV transmit power, dBm.
    pub p_tx_dbm: f64,
    /// Noise power, dBm.
    pub noise_dbm: f64,
    /// Excess path loss offset, dB.
    pub pl_offset_db: f64,
    /// Path loss exponent.
    pub pl_exponent: f64,
    /// Log-normal shadowing variance, dB^2.
    pub sigma_s_sq_db2: f64,
    /// Extra variance added to the per-beam SNR spread, dB^2.
    pub sigma_extra_db2: f64,
    /// Number of lanes.
    pub lanes: usize,
    /// Spatial slot length (vehicle plus safety gap), m.
    pub l_vehicle: f64,
    /// Vehicle density, vehicles per meter.
    #[serde(rename = "lambda_per_km", with = "per_km")]
    pub lambda: f64,
    /// SNR threshold, dB.
    pub gamma_th_db: f64,
    /// Carrier frequency, Hz. Informational; already folded into the path loss offset.
    pub carrier_hz: f64,
    /// Frequency subchannels.
    pub n_ch: usize,
    /// Slot duration, s.
    pub t_slot_s: f64,
    /// End-to-end latency budget, s.
    pub tau_e2e_s: f64,
    pub rra_kind: RraKind,
    pub footprint_mode: FootprintMode,
    pub empty_beam_mode: EmptyBeamMode,
    /// Hand floor remainders of the allocation to beams by largest fractional part.
    pub redistribute_remainder: bool,
    /// Multipath components.
    pub n_paths: usize,
    /// Exponential power decay between successive paths.
    pub path_decay: f64,
    pub sim_fidelity: SimFidelity,
    pub ci_method: CiMethod,
}

mod per_km {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(per_m: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(per_m * 1000.0)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(f64::deserialize(d)? / 1000.0)
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            h_uav: 250.0,
            psi_fov: 120.0,
            n_uav: 8,
            n_cav: 4,
            n_rf: 4,
            p_tx_dbm: 23.0,
            noise_dbm: -101.0,
            pl_offset_db: 84.64,
            pl_exponent: 1.55,
            sigma_s_sq_db2: 4.0,
            sigma_extra_db2: 0.0,
            lanes: 5,
            l_vehicle: 5.0,
            lambda: 0.04,
            gamma_th_db: 10.0,
            carrier_hz: 28e9,
            n_ch: 2,
            t_slot_s: 125e-6,
            tau_e2e_s: 10e-3,
            rra_kind: RraKind::Fair,
            footprint_mode: FootprintMode::PaperCos,
            empty_beam_mode: EmptyBeamMode::IncludeZero,
            redistribute_remainder: false,
            n_paths: 3,
            path_decay: 0.1,
            sim_fidelity: SimFidelity::ModelMatched,
            ci_method: CiMethod::Normal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid `{field}`: {reason}")]
pub struct ValidationError {
    pub field: &'static str,
    pub reason: String,
}

impl ValidationError {
    fn new(field: &'static str, reason: impl Into<String>) -> Self {
        Self {
            field,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

/// Slot and grid sizes derived from the latency budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceBudget {
    /// Usable temporal slots for the uplink phase.
    pub n_slot: usize,
    /// `n_slot * n_ch * n_rf`.
    pub total: usize,
}

impl ScenarioConfig {
    /// Returns the config unchanged if every invariant holds, otherwise the
    /// first violated field.
    pub fn validate(self) -> Result<Self, ValidationError> {
        let counts = [
            ("n_uav", self.n_uav),
            ("n_cav", self.n_cav),
            ("n_rf", self.n_rf),
            ("lanes", self.lanes),
            ("n_ch", self.n_ch),
            ("n_paths", self.n_paths),
        ];
        for (field, v) in counts {
            if v < 1 {
                return Err(ValidationError::new(field, "must be at least 1"));
            }
        }

        let positive = [
            ("h_uav", self.h_uav),
            ("l_vehicle", self.l_vehicle),
            ("lambda_per_km", self.lambda),
            ("carrier_hz", self.carrier_hz),
            ("t_slot_s", self.t_slot_s),
            ("tau_e2e_s", self.tau_e2e_s),
            ("pl_exponent", self.pl_exponent),
            ("path_decay", self.path_decay),
        ];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ValidationError::new(field, format!("must be finite and > 0, got {v}")));
            }
        }

        let finite = [
            ("p_tx_dbm", self.p_tx_dbm),
            ("noise_dbm", self.noise_dbm),
            ("pl_offset_db", self.pl_offset_db),
            ("gamma_th_db", self.gamma_th_db),
        ];
        for (field, v) in finite {
            if !v.is_finite() {
                return Err(ValidationError::new(field, "must be finite"));
            }
        }

        for (field, v) in [
            ("sigma_s_sq_db2", self.sigma_s_sq_db2),
            ("sigma_extra_db2", self.sigma_extra_db2),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ValidationError::new(field, format!("variance must be >= 0, got {v}")));
            }
        }

        if !(self.psi_fov > 0.0 && self.psi_fov < 180.0) {
            return Err(ValidationError::new(
                "psi_fov",
                format!("must lie in (0, 180) degrees, got {}", self.psi_fov),
            ));
        }
        if self.tau_e2e_s < 2.0 * self.t_slot_s * (1.0 - 1e-12) {
            return Err(ValidationError::new(
                "tau_e2e_s",
                "must cover at least one uplink and one downlink slot (>= 2 * t_slot_s)",
            ));
        }
        Ok(self)
    }

    /// Non-fatal remarks about the operating point.
    pub fn warnings(&self) -> Vec<String> {
        let load = self.lambda * self.l_vehicle;
        let mut out = Vec::new();
        if load > 1.0 {
            out.push(format!(
                "lambda * l_vehicle = {load:.3} > 1: slot occupancy saturates and decreases with density"
            ));
        }
        out
    }

    pub fn lambda_per_km(&self) -> f64 {
        self.lambda * 1000.0
    }

    pub fn set_lambda_per_km(&mut self, per_km: f64) {
        self.lambda = per_km / 1000.0;
    }

    /// Temporal slots and total grid size available to the uplink phase.
    /// Half of the latency budget is reserved for forwarding.
    pub fn resource_budget(&self) -> ResourceBudget {
        let n_slot = floor_tol(0.5 * self.tau_e2e_s / self.t_slot_s).max(0.0) as usize;
        ResourceBudget {
            n_slot,
            total: n_slot * self.n_ch * self.n_rf,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self, ConfigFileError> {
        let cfg: ScenarioConfig = toml::from_str(s)?;
        Ok(cfg.validate()?)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigFileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
