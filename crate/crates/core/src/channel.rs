//! Air-to-ground channel: log-distance path loss with log-normal shadowing,
//! the mean SNR used by the closed-form model, and multipath realizations
//! with UAV/CAV beamforming for the full-fidelity simulator.
//!
//! Both arrays are half-wavelength ULAs. Angles are measured from the array
//! broadside, which for the UAV points at nadir.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::beamgeom::{beamwidth, BeamCodebook};
use crate::scenario::ScenarioConfig;

pub type C64 = Complex<f64>;

/// Deterministic part of the log-distance path loss, dB.
pub fn path_loss_db(d: f64, cfg: &ScenarioConfig) -> f64 {
    cfg.pl_offset_db + cfg.pl_exponent * 10.0 * d.log10()
}

/// Array gain of both ends, dB.
pub fn array_gain_db(cfg: &ScenarioConfig) -> f64 {
    10.0 * ((cfg.n_uav * cfg.n_cav) as f64).log10()
}

/// Mean SNR at distance `d` under aligned beams with unit effective gain, dB.
pub fn mean_snr_db(d: f64, cfg: &ScenarioConfig) -> f64 {
    cfg.p_tx_dbm + array_gain_db(cfg) - path_loss_db(d, cfg) - cfg.noise_dbm
}

/// Variance of the per-beam SNR in dB^2: shadowing plus the linear noise
/// power (mW) plus the configurable extra term.
pub fn beam_snr_variance_db2(cfg: &ScenarioConfig) -> f64 {
    let noise_mw = 10f64.powf(cfg.noise_dbm / 10.0);
    cfg.sigma_s_sq_db2 + noise_mw.max(0.0) + cfg.sigma_extra_db2
}

pub fn sample_shadowing<R: Rng + ?Sized>(rng: &mut R, cfg: &ScenarioConfig) -> f64 {
    let sd = cfg.sigma_s_sq_db2.sqrt();
    if sd == 0.0 {
        return 0.0;
    }
    let z: f64 = StandardNormal.sample(rng);
    sd * z
}

/// Unit-norm array response, element `m = exp(i pi m sin(angle)) / sqrt(n)`.
pub fn steering_vector(angle_rad: f64, n: usize) -> DVector<C64> {
    let s = angle_rad.sin();
    let scale = 1.0 / (n as f64).sqrt();
    DVector::from_fn(n, |m, _| C64::from_polar(scale, std::f64::consts::PI * m as f64 * s))
}

#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub path_gains: Vec<C64>,
    /// Path power profile, sums to one.
    pub path_powers: Vec<f64>,
    /// Departure angles at the CAV, rad.
    pub aod_rad: Vec<f64>,
    /// Arrival angles at the UAV, rad.
    pub aoa_rad: Vec<f64>,
    /// `n_uav x n_cav`.
    pub matrix: DMatrix<C64>,
}

/// Normalized exponential power-delay profile `decay^(p-1)`.
pub fn path_power_profile(n_paths: usize, decay: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n_paths).map(|p| decay.powi(p as i32)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

fn clamp_angle(a: f64) -> f64 {
    let lim = std::f64::consts::FRAC_PI_2 - 1e-6;
    a.clamp(-lim, lim)
}

/// Draw a multipath channel whose first path is the geometric line of sight
/// at `aoa_center_rad`. Later paths scatter uniformly within one beamwidth of
/// the line-of-sight angles at either end.
pub fn sample_channel<R: Rng + ?Sized>(
    rng: &mut R,
    aoa_center_rad: f64,
    cfg: &ScenarioConfig,
) -> ChannelRealization {
    let powers = path_power_profile(cfg.n_paths, cfg.path_decay);
    let spread_uav = beamwidth(aoa_center_rad, cfg.n_uav).unwrap_or(0.0);
    let spread_cav = beamwidth(aoa_center_rad, cfg.n_cav).unwrap_or(0.0);

    let mut gains = Vec::with_capacity(cfg.n_paths);
    let mut aoa = Vec::with_capacity(cfg.n_paths);
    let mut aod = Vec::with_capacity(cfg.n_paths);
    let mut matrix = DMatrix::<C64>::zeros(cfg.n_uav, cfg.n_cav);
    for (p, &power) in powers.iter().enumerate() {
        let (theta, phi) = if p == 0 {
            (aoa_center_rad, aoa_center_rad)
        } else {
            (
                clamp_angle(aoa_center_rad + spread_uav * rng.random_range(-1.0..=1.0)),
                clamp_angle(aoa_center_rad + spread_cav * rng.random_range(-1.0..=1.0)),
            )
        };
        // CN(0, power): independent real and imaginary parts of variance power / 2.
        let sd = (0.5 * power).sqrt();
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        let beta = C64::new(sd * re, sd * im);
        let a_uav = steering_vector(theta, cfg.n_uav);
        let a_cav = steering_vector(phi, cfg.n_cav);
        matrix += (a_uav * a_cav.adjoint()) * beta;
        gains.push(beta);
        aoa.push(theta);
        aod.push(phi);
    }
    ChannelRealization {
        path_gains: gains,
        path_powers: powers,
        aod_rad: aod,
        aoa_rad: aoa,
        matrix,
    }
}

/// Effective scalar channel `w^H H f`.
pub fn effective_gain(h: &ChannelRealization, w: &DVector<C64>, f: &DVector<C64>) -> C64 {
    (w.adjoint() * &h.matrix * f)[(0, 0)]
}

/// Instantaneous SNR, dB. The beamforming term `20 log10 |w^H H f|` is
/// measured relative to the unit-gain mean SNR. Returns `-inf` on a null.
pub fn instantaneous_snr_db(
    h: &ChannelRealization,
    w: &DVector<C64>,
    f: &DVector<C64>,
    d: f64,
    shadow_db: f64,
    cfg: &ScenarioConfig,
) -> f64 {
    let g = effective_gain(h, w, f).norm();
    if g == 0.0 {
        return f64::NEG_INFINITY;
    }
    mean_snr_db(d, cfg) - shadow_db + 20.0 * g.log10()
}

/// Codebook beam with the largest `|w^H H f|`; ties go to the lowest index.
pub fn best_beam(h: &ChannelRealization, codebook: &BeamCodebook, f: &DVector<C64>) -> usize {
    let hf = &h.matrix * f;
    let mut best = 0;
    let mut best_gain = f64::NEG_INFINITY;
    for beam in &codebook.beams {
        let w = steering_vector(beam.pointing_rad, codebook.n_uav);
        let g = w.dotc(&hf).norm();
        if g > best_gain {
            best_gain = g;
            best = beam.index;
        }
    }
    best
}

/// Per-beam Gaussian SNR sampler used by the model-matched simulator.
pub fn beam_snr_distribution(mean_db: f64, variance_db2: f64) -> Normal<f64> {
    Normal::new(mean_db, variance_db2.sqrt()).expect("finite, non-negative variance")
}
