//! Radio resource assignment: splitting the `n_slot x n_ch x n_rf` grid over
//! the codebook beams.

use crate::beamgeom::BeamCodebook;
use crate::numeric::floor_tol;
use crate::scenario::{RraKind, ScenarioConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceAllocation {
    pub strategy: RraKind,
    /// Resources per beam, aligned with the codebook beam order.
    pub per_beam: Vec<usize>,
    pub total_budget: usize,
}

impl ResourceAllocation {
    pub fn allocated(&self) -> usize {
        self.per_beam.iter().sum()
    }
}

/// Every beam receives `floor(total / n_beam)`.
pub fn fair_alloc(total_budget: usize, n_beam: usize) -> ResourceAllocation {
    assert!(n_beam >= 1, "fair allocation needs at least one beam");
    ResourceAllocation {
        strategy: RraKind::Fair,
        per_beam: vec![total_budget / n_beam; n_beam],
        total_budget,
    }
}

/// Beam `l` receives `floor(total * L_l / L_f)`.
pub fn beam_based_alloc(total_budget: usize, codebook: &BeamCodebook) -> ResourceAllocation {
    let lengths: Vec<f64> = codebook.beams.iter().map(|b| b.length_m).collect();
    ResourceAllocation {
        strategy: RraKind::BeamBased,
        per_beam: proportional_floor(total_budget, &lengths, codebook.segment_length_m),
        total_budget,
    }
}

fn proportional_floor(total: usize, lengths: &[f64], lf: f64) -> Vec<usize> {
    lengths
        .iter()
        .map(|&l| floor_tol(total as f64 * l / lf).max(0.0) as usize)
        .collect()
}

/// Hand the units lost to flooring back to beams in order of decreasing
/// fractional share (ties to the lower index).
pub fn redistribute_remainder(alloc: &mut ResourceAllocation, shares: &[f64]) {
    let sum: f64 = shares.iter().sum();
    let leftover = alloc.total_budget.saturating_sub(alloc.allocated());
    if leftover == 0 || sum <= 0.0 {
        return;
    }
    let mut order: Vec<(usize, f64)> = shares
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let exact = alloc.total_budget as f64 * s / sum;
            (i, exact - alloc.per_beam[i] as f64)
        })
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    for &(i, _) in order.iter().cycle().take(leftover) {
        alloc.per_beam[i] += 1;
    }
}

/// Allocation for `cfg` according to its strategy and remainder setting.
pub fn allocate(cfg: &ScenarioConfig, codebook: &BeamCodebook) -> ResourceAllocation {
    allocate_with(cfg, codebook, cfg.rra_kind)
}

pub fn allocate_with(cfg: &ScenarioConfig, codebook: &BeamCodebook, kind: RraKind) -> ResourceAllocation {
    let total = cfg.resource_budget().total;
    let mut alloc = match kind {
        RraKind::Fair => fair_alloc(total, codebook.len()),
        RraKind::BeamBased => beam_based_alloc(total, codebook),
    };
    if cfg.redistribute_remainder {
        let shares: Vec<f64> = match kind {
            RraKind::Fair => vec![1.0; codebook.len()],
            RraKind::BeamBased => codebook.beams.iter().map(|b| b.length_m).collect(),
        };
        redistribute_remainder(&mut alloc, &shares);
    }
    alloc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamgeom::{make_codebook, Beam};
    use crate::scenario::FootprintMode;
    use proptest::prelude::*;

    fn synthetic_codebook(lengths: &[f64]) -> BeamCodebook {
        let lf: f64 = lengths.iter().sum();
        let mut x = -lf / 2.0;
        let beams = lengths
            .iter()
            .enumerate()
            .map(|(index, &l)| {
                let b = Beam {
                    index,
                    pointing_rad: 0.0,
                    beamwidth_rad: 0.1,
                    theta_left_rad: 0.0,
                    theta_right_rad: 0.0,
                    x_left: x,
                    x_right: x + l,
                    length_m: l,
                    capacity: 0,
                    barycenter_dist_m: 100.0,
                };
                x += l;
                b
            })
            .collect();
        BeamCodebook {
            beams,
            segment_length_m: lf,
            segment_capacity: 0,
            h_uav: 100.0,
            n_uav: lengths.len(),
        }
    }

    #[test]
    fn fair_examples() {
        assert_eq!(fair_alloc(320, 8).per_beam, vec![40; 8]);
        assert_eq!(fair_alloc(7, 8).per_beam, vec![0; 8]);
        assert_eq!(fair_alloc(320, 1).per_beam, vec![320]);
    }

    #[test]
    fn beam_based_uniform_matches_fair() {
        let cb = synthetic_codebook(&[30.0; 8]);
        assert_eq!(beam_based_alloc(320, &cb).per_beam, fair_alloc(320, 8).per_beam);
    }

    #[test]
    fn beam_based_fractions() {
        let cb = synthetic_codebook(&[50.0, 30.0, 20.0]);
        assert_eq!(beam_based_alloc(10, &cb).per_beam, vec![5, 3, 2]);
    }

    #[test]
    fn beam_based_reference_codebook() {
        for mode in [FootprintMode::PaperCos, FootprintMode::GeometricTan] {
            let cfg = ScenarioConfig {
                footprint_mode: mode,
                ..Default::default()
            };
            let cb = make_codebook(&cfg).unwrap();
            let alloc = beam_based_alloc(320, &cb);
            for (b, &n) in cb.beams.iter().zip(&alloc.per_beam) {
                let exact = 320.0 * b.length_m / cb.segment_length_m;
                assert!((exact - n as f64).abs() < 1.0);
            }
        }
    }

    #[test]
    fn remainder_goes_to_largest_fractions() {
        let cb = synthetic_codebook(&[45.0, 35.0, 20.0]);
        let mut alloc = beam_based_alloc(8, &cb);
        // exact shares 3.6, 2.8, 1.6
        assert_eq!(alloc.per_beam, vec![3, 2, 1]);
        redistribute_remainder(&mut alloc, &[45.0, 35.0, 20.0]);
        assert_eq!(alloc.per_beam, vec![4, 3, 1]);
        assert_eq!(alloc.allocated(), 8);
    }

    #[test]
    fn config_flag_redistributes() {
        let cfg = ScenarioConfig {
            redistribute_remainder: true,
            rra_kind: RraKind::Fair,
            tau_e2e_s: 10.25e-3,
            ..Default::default()
        };
        let cb = make_codebook(&cfg).unwrap();
        let alloc = allocate(&cfg, &cb);
        assert_eq!(alloc.allocated(), alloc.total_budget);
    }

    fn arb_codebook() -> impl Strategy<Value = BeamCodebook> {
        prop::collection::vec(0.5f64..500.0, 1..16).prop_map(|l| synthetic_codebook(&l))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn conservation_and_proportionality(total in 0usize..5000, cb in arb_codebook()) {
            let fair = fair_alloc(total, cb.len());
            let bb = beam_based_alloc(total, &cb);
            prop_assert!(fair.allocated() <= total);
            prop_assert!(bb.allocated() <= total);
            prop_assert!(fair.per_beam.iter().all(|&n| n == fair.per_beam[0]));
            for (b, &n) in cb.beams.iter().zip(&bb.per_beam) {
                let gap = total as f64 * b.length_m / cb.segment_length_m - n as f64;
                prop_assert!((-1e-6..1.0).contains(&gap), "gap {}", gap);
            }
        }

        #[test]
        fn doubling_budget_scales(total in 0usize..5000, cb in arb_codebook()) {
            let one = beam_based_alloc(total, &cb);
            let two = beam_based_alloc(2 * total, &cb);
            for (&a, &b) in one.per_beam.iter().zip(&two.per_beam) {
                prop_assert!(b + 1 >= 2 * a);
            }
        }
    }
}
