//! Monte Carlo estimation of access probability and connected/served counts.
//!
//! One trial is a static snapshot: vehicles are dropped onto the spatial
//! slots of the covered segment, each vehicle gets an SNR toward the UAV and
//! a serving beam, and every beam compares its valid requests with its
//! resources. Trials draw from independent ChaCha streams selected by
//! `(seed, trial index)`, so results do not depend on how trials are
//! scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use rayon::prelude::*;

use crate::analytic::occupation_prob;
use crate::beamgeom::BeamCodebook;
use crate::channel;
use crate::rra::ResourceAllocation;
use crate::scenario::{CiMethod, ScenarioConfig, SimFidelity};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupiedSlot {
    pub lane: usize,
    pub slot: usize,
    /// Road-axis position of the slot center, m.
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub occupied_slots: Vec<OccupiedSlot>,
    /// Aligned with `occupied_slots`.
    pub per_vehicle_snr_db: Vec<f64>,
    /// Serving beam of each vehicle, aligned with `occupied_slots`.
    pub per_vehicle_beam: Vec<usize>,
    pub per_beam_valid: Vec<usize>,
    pub per_beam_served: Vec<usize>,
    pub per_beam_access: Vec<bool>,
    pub connected: usize,
}

impl TrialOutcome {
    pub fn served(&self) -> usize {
        self.per_beam_served.iter().sum()
    }

    /// Fraction of beams whose valid requests fit their resources.
    pub fn access_fraction(&self) -> f64 {
        let granted = self.per_beam_access.iter().filter(|&&a| a).count();
        granted as f64 / self.per_beam_access.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccessReport {
    pub trials: usize,
    pub seed: u64,
    pub avg_access_hat: f64,
    /// Half-width of the 95% interval around `avg_access_hat`.
    pub ci_half_width: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub per_beam_access_hat: Vec<f64>,
    pub connected_mean: f64,
    pub connected_ci_half_width: f64,
    pub served_mean: f64,
    pub served_ci_half_width: f64,
}

/// Random stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Slots per lane and the road-axis center of slot `j`. The slot grid is
/// centered on the segment so that the unused remainder splits evenly
/// between both ends.
fn slot_grid(codebook: &BeamCodebook, l_vehicle: f64) -> (usize, impl Fn(usize) -> f64) {
    let lf = codebook.segment_length_m;
    let per_lane = (lf / l_vehicle + 1e-9).floor() as usize;
    let offset = -0.5 * lf + 0.5 * (lf - per_lane as f64 * l_vehicle);
    (per_lane, move |j: usize| offset + (j as f64 + 0.5) * l_vehicle)
}

/// Occupy each of the `K * floor(L_f / L_v)` spatial slots independently
/// with the slot occupation probability.
pub fn drop_vehicles<R: Rng + ?Sized>(
    rng: &mut R,
    codebook: &BeamCodebook,
    cfg: &ScenarioConfig,
) -> Vec<OccupiedSlot> {
    let p_o = occupation_prob(cfg.lambda, cfg.l_vehicle);
    let (per_lane, center) = slot_grid(codebook, cfg.l_vehicle);
    let mut out = Vec::new();
    for lane in 0..cfg.lanes {
        for slot in 0..per_lane {
            if rng.random::<f64>() < p_o {
                out.push(OccupiedSlot {
                    lane,
                    slot,
                    x: center(slot),
                });
            }
        }
    }
    out
}

pub fn run_trial<R: Rng + ?Sized>(
    rng: &mut R,
    codebook: &BeamCodebook,
    alloc: &ResourceAllocation,
    cfg: &ScenarioConfig,
) -> TrialOutcome {
    assert_eq!(codebook.len(), alloc.per_beam.len());
    let occupied = drop_vehicles(rng, codebook, cfg);
    let n_beam = codebook.len();
    let mut snrs = Vec::with_capacity(occupied.len());
    let mut beams = Vec::with_capacity(occupied.len());

    match cfg.sim_fidelity {
        SimFidelity::ModelMatched => {
            let sd2 = channel::beam_snr_variance_db2(cfg);
            let per_beam: Vec<_> = codebook
                .beams
                .iter()
                .map(|b| channel::beam_snr_distribution(channel::mean_snr_db(b.barycenter_dist_m, cfg), sd2))
                .collect();
            for v in &occupied {
                let b = codebook.beam_at(v.x).expect("slot centers lie inside the segment");
                snrs.push(per_beam[b].sample(rng));
                beams.push(b);
            }
        }
        SimFidelity::FullChannel => {
            let h = cfg.h_uav;
            for v in &occupied {
                let d = h.hypot(v.x);
                let aoa = (v.x / h).atan();
                let ch = channel::sample_channel(rng, aoa, cfg);
                let f = channel::steering_vector(aoa, cfg.n_cav);
                let b = channel::best_beam(&ch, codebook, &f);
                let w = channel::steering_vector(codebook.beams[b].pointing_rad, cfg.n_uav);
                let shadow = channel::sample_shadowing(rng, cfg);
                snrs.push(channel::instantaneous_snr_db(&ch, &w, &f, d, shadow, cfg));
                beams.push(b);
            }
        }
    }

    let mut valid = vec![0usize; n_beam];
    for (&snr, &b) in snrs.iter().zip(&beams) {
        if snr >= cfg.gamma_th_db {
            valid[b] += 1;
        }
    }
    let served: Vec<usize> = valid.iter().zip(&alloc.per_beam).map(|(&v, &n)| v.min(n)).collect();
    let access: Vec<bool> = valid.iter().zip(&alloc.per_beam).map(|(&v, &n)| v <= n).collect();
    TrialOutcome {
        occupied_slots: occupied,
        per_vehicle_snr_db: snrs,
        per_vehicle_beam: beams,
        connected: valid.iter().sum(),
        per_beam_valid: valid,
        per_beam_served: served,
        per_beam_access: access,
    }
}

struct TrialSummary {
    access: Vec<bool>,
    connected: usize,
    served: usize,
}

/// Run `trials` independent trials and aggregate them in trial order.
/// Parallelism comes from the ambient rayon pool.
pub fn run_experiment(
    seed: u64,
    trials: usize,
    codebook: &BeamCodebook,
    alloc: &ResourceAllocation,
    cfg: &ScenarioConfig,
) -> AccessReport {
    assert!(trials >= 1, "at least one trial");
    let summaries: Vec<TrialSummary> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let out = run_trial(&mut rng, codebook, alloc, cfg);
            TrialSummary {
                served: out.served(),
                connected: out.connected,
                access: out.per_beam_access,
            }
        })
        .collect();
    aggregate(seed, &summaries, codebook.len(), cfg.ci_method)
}

fn aggregate(seed: u64, s: &[TrialSummary], n_beam: usize, method: CiMethod) -> AccessReport {
    let trials = s.len();
    let mut per_beam_hits = vec![0usize; n_beam];
    let mut access_vals = Vec::with_capacity(trials);
    let mut connected = Vec::with_capacity(trials);
    let mut served = Vec::with_capacity(trials);
    for t in s {
        let mut hits = 0;
        for (b, &a) in t.access.iter().enumerate() {
            if a {
                per_beam_hits[b] += 1;
                hits += 1;
            }
        }
        access_vals.push(hits as f64 / n_beam as f64);
        connected.push(t.connected as f64);
        served.push(t.served as f64);
    }
    let per_beam_access_hat: Vec<f64> = per_beam_hits.iter().map(|&h| h as f64 / trials as f64).collect();
    let avg = per_beam_access_hat.iter().sum::<f64>() / n_beam as f64;
    let pooled = trials * n_beam;
    let (ci_low, ci_high) = access_interval(&access_vals, avg, pooled, method);
    let (connected_mean, connected_hw) = mean_and_half_width(&connected);
    let (served_mean, served_hw) = mean_and_half_width(&served);
    AccessReport {
        trials,
        seed,
        avg_access_hat: avg,
        ci_half_width: 0.5 * (ci_high - ci_low),
        ci_low,
        ci_high,
        per_beam_access_hat,
        connected_mean,
        connected_ci_half_width: connected_hw,
        served_mean,
        served_ci_half_width: served_hw,
    }
}

/// Sample mean and 95% normal half-width. A single sample has no spread
/// estimate and reports an infinite half-width.
pub fn mean_and_half_width(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Z95 * (var / n).sqrt())
}

/// Wilson score interval for `k = p_hat * n` successes out of `n`.
pub fn wilson_interval(p_hat: f64, n: usize) -> (f64, f64) {
    let n = n as f64;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// 95% interval for the average access probability. The normal interval uses
/// the spread of per-trial beam-averaged access; when every trial agrees it
/// falls back to the Wilson interval of the pooled beam indicators so the
/// interval never collapses. One trial yields the whole unit interval.
fn access_interval(per_trial: &[f64], avg: f64, pooled: usize, method: CiMethod) -> (f64, f64) {
    if per_trial.len() < 2 {
        return (0.0, 1.0);
    }
    match method {
        CiMethod::Wilson => wilson_interval(avg, pooled),
        CiMethod::Normal => {
            let (_, hw) = mean_and_half_width(per_trial);
            if hw > 0.0 {
                ((avg - hw).max(0.0), (avg + hw).min(1.0))
            } else {
                wilson_interval(avg, pooled)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::average_access_prob;
    use crate::beamgeom::make_codebook;
    use crate::rra::{allocate, allocate_with, fair_alloc};
    use crate::scenario::{FootprintMode, RraKind};

    #[test]
    fn empty_road_when_density_zero() {
        let mut cfg = ScenarioConfig::default();
        cfg.lambda = 0.0;
        let cb = make_codebook(&ScenarioConfig::default()).unwrap();
        let alloc = allocate(&ScenarioConfig::default(), &cb);
        let mut rng = trial_rng(1, 0);
        assert!(drop_vehicles(&mut rng, &cb, &cfg).is_empty());
        let out = run_trial(&mut rng, &cb, &alloc, &cfg);
        assert!(out.per_beam_access.iter().all(|&a| a));
        assert_eq!(out.connected, 0);
        assert_eq!(out.served(), 0);
    }

    #[test]
    fn occupancy_rate_matches_slot_probability() {
        let cfg = ScenarioConfig {
            h_uav: 500.0,
            ..Default::default()
        };
        let cb = make_codebook(&cfg).unwrap();
        let slots_per_drop = cfg.lanes * (cb.segment_length_m / cfg.l_vehicle) as usize;
        let drops = 100_000 / slots_per_drop + 1;
        let mut rng = trial_rng(3, 0);
        let occupied: usize = (0..drops).map(|_| drop_vehicles(&mut rng, &cb, &cfg).len()).sum();
        let rate = occupied as f64 / (drops * slots_per_drop) as f64;
        assert!((rate - occupation_prob(cfg.lambda, cfg.l_vehicle)).abs() < 0.005, "{rate}");
    }

    #[test]
    fn expected_vehicles_per_drop() {
        let cfg = ScenarioConfig::default();
        let cb = make_codebook(&cfg).unwrap();
        let n = 20_000;
        let mut rng = trial_rng(4, 0);
        let total: usize = (0..n).map(|_| drop_vehicles(&mut rng, &cb, &cfg).len()).sum();
        let mean = total as f64 / n as f64;
        assert!((mean - 250.0 * 0.16375).abs() < 0.2, "{mean}");
    }

    #[test]
    fn zero_resources_block_beams_with_requests() {
        let cfg = ScenarioConfig {
            gamma_th_db: -50.0,
            ..Default::default()
        };
        let cb = make_codebook(&cfg).unwrap();
        let alloc = fair_alloc(0, cb.len());
        let mut rng = trial_rng(5, 0);
        for _ in 0..20 {
            let out = run_trial(&mut rng, &cb, &alloc, &cfg);
            for (&v, &a) in out.per_beam_valid.iter().zip(&out.per_beam_access) {
                assert_eq!(a, v == 0);
            }
            assert_eq!(out.served(), 0);
        }
    }

    #[test]
    fn trial_invariants_both_fidelities() {
        for fidelity in [SimFidelity::ModelMatched, SimFidelity::FullChannel] {
            let cfg = ScenarioConfig {
                h_uav: 400.0,
                sim_fidelity: fidelity,
                gamma_th_db: 5.0,
                ..Default::default()
            };
            let cb = make_codebook(&cfg).unwrap();
            let alloc = allocate(&cfg, &cb);
            let mut rng = trial_rng(6, 0);
            for _ in 0..50 {
                let out = run_trial(&mut rng, &cb, &alloc, &cfg);
                assert!(out.occupied_slots.len() <= cb.segment_capacity);
                assert_eq!(out.connected, out.per_beam_valid.iter().sum::<usize>());
                let connected = out.per_vehicle_snr_db.iter().filter(|&&s| s >= cfg.gamma_th_db).count();
                assert_eq!(out.connected, connected);
                for b in 0..cb.len() {
                    assert!(out.per_beam_served[b] <= out.per_beam_valid[b].min(alloc.per_beam[b]));
                }
                assert!(out.served() <= out.connected);
            }
        }
    }

    #[test]
    fn single_trial_report_is_the_trial() {
        let cfg = ScenarioConfig::default();
        let cb = make_codebook(&cfg).unwrap();
        let alloc = allocate(&cfg, &cb);
        let rep = run_experiment(9, 1, &cb, &alloc, &cfg);
        let out = run_trial(&mut trial_rng(9, 0), &cb, &alloc, &cfg);
        assert_eq!(rep.trials, 1);
        assert_eq!(rep.avg_access_hat, out.access_fraction());
        for (hat, &a) in rep.per_beam_access_hat.iter().zip(&out.per_beam_access) {
            assert_eq!(*hat, if a { 1.0 } else { 0.0 });
        }
        assert_eq!(rep.connected_mean, out.connected as f64);
        assert_eq!(rep.served_mean, out.served() as f64);
        assert_eq!((rep.ci_low, rep.ci_high), (0.0, 1.0));
    }

    #[test]
    fn same_seed_same_report_any_pool() {
        let cfg = ScenarioConfig {
            sim_fidelity: SimFidelity::FullChannel,
            h_uav: 300.0,
            ..Default::default()
        };
        let cb = make_codebook(&cfg).unwrap();
        let alloc = allocate(&cfg, &cb);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_experiment(42, 300, &cb, &alloc, &cfg))
        };
        let one = run(1);
        assert_eq!(one, run(4));
        assert_eq!(one, run(16));
        assert_ne!(one, run_experiment(43, 300, &cb, &alloc, &cfg));
    }

    #[test]
    fn interval_never_collapses() {
        let cfg = ScenarioConfig {
            h_uav: 100.0,
            ..Default::default()
        };
        let cb = make_codebook(&cfg).unwrap();
        let alloc = allocate(&cfg, &cb);
        let rep = run_experiment(1, 50, &cb, &alloc, &cfg);
        assert_eq!(rep.avg_access_hat, 1.0);
        assert!(rep.ci_half_width > 0.0);
        assert!(rep.ci_low <= rep.avg_access_hat && rep.avg_access_hat <= rep.ci_high);
        let wilson = run_experiment(1, 50, &cb, &alloc, &ScenarioConfig { ci_method: CiMethod::Wilson, ..cfg });
        assert!(wilson.ci_half_width > 0.0);
    }

    #[test]
    fn uniform_footprints_make_strategies_identical() {
        // One beam: both strategies hand it the whole budget.
        let cfg = ScenarioConfig {
            n_uav: 1,
            h_uav: 400.0,
            lambda: 0.15,
            gamma_th_db: 0.0,
            ..Default::default()
        };
        let cb = make_codebook(&cfg).unwrap();
        let fair = allocate_with(&cfg, &cb, RraKind::Fair);
        let bb = allocate_with(&cfg, &cb, RraKind::BeamBased);
        assert_eq!(fair.per_beam, bb.per_beam);
        for t in 0..200 {
            let a = run_trial(&mut trial_rng(8, t), &cb, &fair, &cfg);
            let b = run_trial(&mut trial_rng(8, t), &cb, &bb, &cfg);
            assert_eq!(a.per_beam_served, b.per_beam_served);
        }
    }

    #[test]
    fn model_matched_per_beam_rates_track_analytic() {
        let cfg = ScenarioConfig {
            h_uav: 250.0,
            gamma_th_db: 5.0,
            footprint_mode: FootprintMode::GeometricTan,
            ..Default::default()
        };
        let cb = make_codebook(&cfg).unwrap();
        let alloc = allocate(&cfg, &cb);
        let trials = 10_000;
        let rep = run_experiment(17, trials, &cb, &alloc, &cfg);
        let ana = average_access_prob(&cfg, &cb, &alloc);
        for (b, (&sim, &exact)) in rep.per_beam_access_hat.iter().zip(&ana.per_beam_p_acc).enumerate() {
            let (lo, hi) = wilson_interval(sim, trials);
            let hw = 0.5 * (hi - lo);
            // Slot-center association differs from floor(K L / L_v) by at most a
            // few slots per beam, hence the small absolute floor.
            assert!((sim - exact).abs() <= (3.0 * hw).max(0.01), "beam {b}: sim {sim} analytic {exact}");
        }
    }
}
