//! DFT beam codebook and beam footprints on the road.
//!
//! The UAV carries a half-wavelength ULA aligned with the road. Its DFT
//! codebook points at `asin(-1 + (2k - 1) / N)`, `k = 1..N`, measured from
//! nadir. Each beam illuminates the road between the ground projections of
//! its two edge angles, `x = h tan(angle)`. Beams that miss the covered
//! segment are dropped; the remaining raw footprints are snapped onto an
//! exact partition of `[-L_f / 2, L_f / 2]` (interior boundaries at the
//! midpoint of adjacent facing edges, outer boundaries clipped to the
//! segment edges).

use std::f64::consts::FRAC_PI_2;

use crate::numeric::floor_tol;
use crate::scenario::{FootprintMode, ScenarioConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("beam pointing {pointing_rad} rad is at endfire; beamwidth undefined")]
    Endfire { pointing_rad: f64 },
    #[error("no codebook beam illuminates the covered segment")]
    NoBeams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Beam {
    /// Zero-based position in the retained codebook, ordered by pointing angle.
    pub index: usize,
    pub pointing_rad: f64,
    pub beamwidth_rad: f64,
    pub theta_left_rad: f64,
    pub theta_right_rad: f64,
    /// Snapped footprint interval on the road axis, m.
    pub x_left: f64,
    pub x_right: f64,
    pub length_m: f64,
    /// Spatial slots under this beam over all lanes.
    pub capacity: usize,
    /// Distance from the UAV to the footprint midpoint, m.
    pub barycenter_dist_m: f64,
}

impl Beam {
    pub fn barycenter_x(&self) -> f64 {
        0.5 * (self.x_left + self.x_right)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamCodebook {
    pub beams: Vec<Beam>,
    pub segment_length_m: f64,
    /// Spatial slots in the whole segment over all lanes.
    pub segment_capacity: usize,
    pub h_uav: f64,
    pub n_uav: usize,
}

impl BeamCodebook {
    pub fn len(&self) -> usize {
        self.beams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.is_empty()
    }

    /// Beam whose footprint contains road coordinate `x`. Intervals are
    /// half-open `[x_left, x_right)` except the last, which also owns its
    /// right edge.
    pub fn beam_at(&self, x: f64) -> Option<usize> {
        let half = 0.5 * self.segment_length_m;
        if !(x >= -half && x <= half) {
            return None;
        }
        let idx = self.beams.partition_point(|b| b.x_right <= x);
        Some(idx.min(self.beams.len() - 1))
    }
}

/// Length of road covered by the UAV field of view.
pub fn segment_length(h_uav: f64, psi_fov_deg: f64, mode: FootprintMode) -> f64 {
    let half = 0.5 * psi_fov_deg.to_radians();
    match mode {
        FootprintMode::PaperCos => 2.0 * h_uav * half.cos(),
        FootprintMode::GeometricTan => 2.0 * h_uav * half.tan(),
    }
}

/// Half-power beamwidth of a DFT beam steered to `pointing_rad`.
pub fn beamwidth(pointing_rad: f64, n_uav: usize) -> Result<f64, GeomError> {
    let c = pointing_rad.cos();
    if c <= 1e-12 {
        return Err(GeomError::Endfire { pointing_rad });
    }
    Ok(2.0 / (n_uav as f64 * c))
}

/// Pointing angles of the `n`-element DFT codebook, ascending.
pub fn dft_angles(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| (-1.0 + (2 * k - 1) as f64 / n as f64).asin())
        .collect()
}

/// Spatial slots of length `l_vehicle` over `lanes` lanes in `length` meters.
pub fn slot_capacity(lanes: usize, length: f64, l_vehicle: f64) -> usize {
    floor_tol(lanes as f64 * length / l_vehicle).max(0.0) as usize
}

fn ground_x(h: f64, angle: f64) -> f64 {
    // Edges past the horizon never reach the road; saturate far outside any segment.
    let a = angle.clamp(-FRAC_PI_2 + 1e-9, FRAC_PI_2 - 1e-9);
    h * a.tan()
}

struct RawBeam {
    pointing: f64,
    width: f64,
    left: f64,
    right: f64,
}

pub fn make_codebook(cfg: &ScenarioConfig) -> Result<BeamCodebook, GeomError> {
    let h = cfg.h_uav;
    let lf = segment_length(h, cfg.psi_fov, cfg.footprint_mode);
    let half = 0.5 * lf;

    let mut raw = Vec::with_capacity(cfg.n_uav);
    for pointing in dft_angles(cfg.n_uav) {
        let width = beamwidth(pointing, cfg.n_uav)?;
        let left = ground_x(h, pointing - 0.5 * width);
        let right = ground_x(h, pointing + 0.5 * width);
        if right > -half && left < half {
            raw.push(RawBeam {
                pointing,
                width,
                left,
                right,
            });
        }
    }

    // Snapping can squeeze a barely-intersecting edge beam to nothing when its
    // neighbour overlaps it past the segment edge; such beams are dropped and
    // the partition recomputed.
    let bounds = loop {
        if raw.is_empty() {
            return Err(GeomError::NoBeams);
        }
        let mut b = Vec::with_capacity(raw.len() + 1);
        b.push(-half);
        for w in raw.windows(2) {
            b.push((0.5 * (w[0].right + w[1].left)).clamp(-half, half));
        }
        b.push(half);
        match (0..raw.len()).find(|&i| b[i + 1] - b[i] <= 0.0) {
            Some(i) => {
                raw.remove(i);
            }
            None => break b,
        }
    };

    let beams = raw
        .iter()
        .enumerate()
        .map(|(index, r)| {
            let x_left = bounds[index];
            let x_right = bounds[index + 1];
            let length_m = x_right - x_left;
            let mid = 0.5 * (x_left + x_right);
            Beam {
                index,
                pointing_rad: r.pointing,
                beamwidth_rad: r.width,
                theta_left_rad: r.pointing - 0.5 * r.width,
                theta_right_rad: r.pointing + 0.5 * r.width,
                x_left,
                x_right,
                length_m,
                capacity: slot_capacity(cfg.lanes, length_m, cfg.l_vehicle),
                barycenter_dist_m: h.hypot(mid),
            }
        })
        .collect();

    Ok(BeamCodebook {
        beams,
        segment_length_m: lf,
        segment_capacity: slot_capacity(cfg.lanes, lf, cfg.l_vehicle),
        h_uav: h,
        n_uav: cfg.n_uav,
    })
}
