//! Closed-form average access probability and the altitude planner.
//!
//! Each beam's footprint holds `M_l` spatial slots. A slot is occupied with
//! probability `P_o = lambda L_v exp(-lambda L_v)` and its vehicle issues a
//! valid request when its SNR clears the threshold, which under the Gaussian
//! per-beam SNR model happens with probability `Q((gamma - mu_l) / sigma_l)`.
//! The number of valid requests is therefore `Binomial(M_l, P_o P_vr)`, and
//! a beam grants access when that count fits within its `N_l` resources.
//! The average access probability is the unweighted mean over beams.

use crate::beamgeom::{self, BeamCodebook};
use crate::channel;
use crate::numeric::CompensatedSum;
use crate::rra::{self, ResourceAllocation};
use crate::scenario::{EmptyBeamMode, ScenarioConfig, ValidationError};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticReport {
    /// Probability that a vehicle under beam `l` issues a valid request.
    pub per_beam_p_vr: Vec<f64>,
    pub per_beam_p_acc: Vec<f64>,
    /// Spatial-slot occupation probability.
    pub p_occupation: f64,
    pub avg_access: f64,
}

/// Gaussian tail probability `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Probability that a spatial slot of length `l_vehicle` holds a vehicle.
pub fn occupation_prob(lambda_per_m: f64, l_vehicle: f64) -> f64 {
    let load = lambda_per_m * l_vehicle;
    load * (-load).exp()
}

/// `Q((gamma_th - mu) / sigma)`; a zero spread degenerates to the indicator `mu >= gamma_th`.
pub fn valid_request_prob(mu_db: f64, sigma_db: f64, gamma_th_db: f64) -> f64 {
    if sigma_db == 0.0 {
        return if mu_db >= gamma_th_db { 1.0 } else { 0.0 };
    }
    q_function((gamma_th_db - mu_db) / sigma_db)
}

fn ln_choose(n: usize, k: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0) - libm::lgamma(k as f64 + 1.0) - libm::lgamma((n - k) as f64 + 1.0)
}

/// Binomial pmf evaluated in log space.
fn binomial_pmf(n: usize, k: usize, p: f64) -> f64 {
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln = ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p();
    ln.exp()
}

/// Probability that a beam with `m_max` slots and `n_res` resources grants
/// access, each slot independently holding a valid request with probability
/// `p`.
///
/// `IncludeZero` returns the binomial CDF `P(M <= n_res)`; `PaperExact`
/// drops the empty-beam term `(1 - p)^m_max` and sums from one request.
pub fn beam_access_prob(m_max: usize, n_res: usize, p: f64, mode: EmptyBeamMode) -> f64 {
    let p = p.clamp(0.0, 1.0);
    if mode == EmptyBeamMode::IncludeZero && m_max <= n_res {
        return 1.0;
    }
    let first = match mode {
        EmptyBeamMode::IncludeZero => 0,
        EmptyBeamMode::PaperExact => 1,
    };
    let last = n_res.min(m_max);
    let mut sum = CompensatedSum::default();
    if first == 0 && last as f64 >= m_max as f64 * p {
        for m in last + 1..=m_max {
            sum.add(binomial_pmf(m_max, m, p));
        }
        return (1.0 - sum.value()).clamp(0.0, 1.0);
    }
    for m in first..=last {
        sum.add(binomial_pmf(m_max, m, p));
    }
    sum.value().clamp(0.0, 1.0)
}

/// Evaluate the closed-form model for one codebook and allocation.
pub fn average_access_prob(
    cfg: &ScenarioConfig,
    codebook: &BeamCodebook,
    alloc: &ResourceAllocation,
) -> AnalyticReport {
    assert_eq!(
        codebook.len(),
        alloc.per_beam.len(),
        "allocation must be aligned with the codebook"
    );
    let p_o = occupation_prob(cfg.lambda, cfg.l_vehicle);
    let sigma = channel::beam_snr_variance_db2(cfg).sqrt();
    let mut p_vr = Vec::with_capacity(codebook.len());
    let mut p_acc = Vec::with_capacity(codebook.len());
    for (beam, &n_res) in codebook.beams.iter().zip(&alloc.per_beam) {
        let mu = channel::mean_snr_db(beam.barycenter_dist_m, cfg);
        let vr = valid_request_prob(mu, sigma, cfg.gamma_th_db);
        p_acc.push(beam_access_prob(beam.capacity, n_res, p_o * vr, cfg.empty_beam_mode));
        p_vr.push(vr);
    }
    let avg_access = p_acc.iter().sum::<f64>() / p_acc.len() as f64;
    AnalyticReport {
        per_beam_p_vr: p_vr,
        per_beam_p_acc: p_acc,
        p_occupation: p_o,
        avg_access,
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("no altitude in [{lo}, {hi}] m reaches average access probability {target}")]
    NoFeasibleAltitude { target: f64, lo: f64, hi: f64 },
    #[error("invalid planning request: {0}")]
    BadRequest(String),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AltitudePlan {
    pub h_best: f64,
    pub segment_length_m: f64,
    pub drones_per_km: f64,
    pub avg_access: f64,
}

/// Average access probability for `cfg` at altitude `h`.
pub fn access_at_altitude(cfg: &ScenarioConfig, h: f64) -> Result<f64, crate::Error> {
    let cfg = ScenarioConfig {
        h_uav: h,
        ..cfg.clone()
    }
    .validate()?;
    let cb = beamgeom::make_codebook(&cfg)?;
    let alloc = rra::allocate(&cfg, &cb);
    Ok(average_access_prob(&cfg, &cb, &alloc).avg_access)
}

/// Highest altitude on the grid `lo, lo + step, ..., <= hi` whose average
/// access probability meets `target`, and the UAV density needed to cover a
/// road with non-overlapping segments at that altitude.
pub fn plan_altitude(
    cfg: &ScenarioConfig,
    target: f64,
    h_range: (f64, f64),
    step: f64,
) -> Result<AltitudePlan, PlanError> {
    let (lo, hi) = h_range;
    if !(target > 0.0 && target < 1.0) {
        return Err(PlanError::BadRequest(format!("target {target} outside (0, 1)")));
    }
    if !(lo > 0.0 && hi >= lo && step > 0.0) {
        return Err(PlanError::BadRequest(format!(
            "altitude range [{lo}, {hi}] with step {step}"
        )));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut best: Option<(f64, f64)> = None;
    for i in 0..=n {
        let h = lo + i as f64 * step;
        let p = match access_at_altitude(cfg, h) {
            Ok(p) => p,
            Err(crate::Error::Validation(e)) => return Err(e.into()),
            Err(e) => return Err(PlanError::BadRequest(e.to_string())),
        };
        if p >= target {
            best = Some((h, p));
        }
    }
    let (h_best, avg_access) = best.ok_or(PlanError::NoFeasibleAltitude { target, lo, hi })?;
    let lf = beamgeom::segment_length(h_best, cfg.psi_fov, cfg.footprint_mode);
    Ok(AltitudePlan {
        h_best,
        segment_length_m: lf,
        drones_per_km: 1000.0 / lf,
        avg_access,
    })
}
