use uavrelay::mcsim::run_experiment;
use uavrelay::{evaluate, FootprintMode, RraKind, ScenarioConfig, SimFidelity};

#[test]
fn reference_scenario_end_to_end() {
    let cfg = ScenarioConfig::default();
    let budget = cfg.resource_budget();
    assert_eq!((budget.n_slot, budget.total), (40, 320));

    let eval = evaluate(&cfg).unwrap();
    assert_eq!(eval.codebook.len(), eval.allocation.per_beam.len());
    assert!(eval.allocation.allocated() <= budget.total);
    let lf = eval.codebook.segment_length_m;
    assert!((eval.codebook.beams[0].x_left + lf / 2.0).abs() < 1e-9);
    assert!((eval.codebook.beams.last().unwrap().x_right - lf / 2.0).abs() < 1e-9);
    assert!(eval.report.per_beam_p_vr.iter().all(|p| (0.0..=1.0).contains(p)));
    assert!((0.0..=1.0).contains(&eval.report.avg_access));

    let sim = run_experiment(1, 200, &eval.codebook, &eval.allocation, &cfg);
    assert_eq!(sim.trials, 200);
    assert!(sim.ci_low <= sim.avg_access_hat && sim.avg_access_hat <= sim.ci_high);
    assert!(sim.served_mean <= sim.connected_mean);
}

#[test]
fn binding_budget_separates_strategies() {
    let mut base = ScenarioConfig {
        footprint_mode: FootprintMode::GeometricTan,
        h_uav: 350.0,
        ..ScenarioConfig::default()
    };
    base.set_lambda_per_km(80.0);
    let access = |rra| evaluate(&ScenarioConfig { rra_kind: rra, ..base.clone() }).unwrap().report.avg_access;
    let fair = access(RraKind::Fair);
    let bb = access(RraKind::BeamBased);
    assert!(fair < 0.99 && bb < 0.99);
    assert!((fair - 0.6004).abs() < 1e-3, "fair {fair}");
    assert!((bb - 0.6413).abs() < 1e-3, "bb {bb}");
}

#[test]
fn full_channel_runs_and_respects_budget() {
    let cfg = ScenarioConfig {
        sim_fidelity: SimFidelity::FullChannel,
        footprint_mode: FootprintMode::GeometricTan,
        ..ScenarioConfig::default()
    };
    let eval = evaluate(&cfg).unwrap();
    let sim = run_experiment(3, 300, &eval.codebook, &eval.allocation, &cfg);
    assert!(sim.served_mean <= sim.connected_mean);
    assert!(sim.connected_mean > 0.0);
    for (p, &n) in sim.per_beam_access_hat.iter().zip(&eval.allocation.per_beam) {
        assert!((0.0..=1.0).contains(p), "beam with {n} resources has rate {p}");
    }
}
