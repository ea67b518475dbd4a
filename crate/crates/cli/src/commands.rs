//! Subcommand implementations. Each takes a resolved base config and a
//! writer, so they run the same in-process and behind the binary.

use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;
use uavrelay::analytic::plan_altitude;
use uavrelay::mcsim::run_experiment;
use uavrelay::{evaluate, EmptyBeamMode, PlanError, RraKind, ScenarioConfig, SimFidelity};

use crate::output::{write_rows, ResultRow};
use crate::sweep::{Overrides, SweepPlan};
use crate::CliError;

/// Environment variable consulted when no `--config` is given.
pub const CONFIG_ENV: &str = "UAV_RRA_CONFIG";

/// Load the config file (or the reference scenario when none is given) and
/// apply command-line overrides.
pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match path {
        Some(p) => ScenarioConfig::from_file(p)?,
        None => ScenarioConfig::default(),
    };
    overrides.apply(&mut cfg);
    let cfg = cfg.validate()?;
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn analytic_rows(cfgs: &[ScenarioConfig]) -> Result<Vec<ResultRow>, CliError> {
    cfgs.par_iter()
        .map(|cfg| {
            let eval = evaluate(cfg)?;
            Ok(ResultRow::analytic(cfg, &eval))
        })
        .collect()
}

pub fn cmd_analytic<W: Write>(base: &ScenarioConfig, plan: &SweepPlan, out: W) -> Result<(), CliError> {
    let rows = analytic_rows(&plan.configs(base))?;
    write_rows(out, &rows)?;
    Ok(())
}

/// Analytic and simulated columns for every sweep point. Points run
/// concurrently; rows keep sweep order.
pub fn simulate_rows(
    cfgs: &[ScenarioConfig],
    trials: usize,
    seed: u64,
    progress: bool,
) -> Result<Vec<ResultRow>, CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let done = AtomicUsize::new(0);
    let total = cfgs.len();
    cfgs.par_iter()
        .map(|cfg| {
            let eval = evaluate(cfg)?;
            let sim = run_experiment(seed, trials, &eval.codebook, &eval.allocation, cfg);
            if progress {
                let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                eprintln!(
                    "[{k}/{total}] h={} density={} gamma={} rra={} p_sim={:.4}",
                    cfg.h_uav,
                    cfg.lambda_per_km(),
                    cfg.gamma_th_db,
                    cfg.rra_kind.as_str(),
                    sim.avg_access_hat
                );
            }
            Ok(ResultRow::analytic(cfg, &eval).with_simulation(&sim))
        })
        .collect()
}

pub fn cmd_simulate<W: Write>(
    base: &ScenarioConfig,
    plan: &SweepPlan,
    trials: usize,
    seed: u64,
    progress: bool,
    out: W,
) -> Result<(), CliError> {
    let rows = simulate_rows(&plan.configs(base), trials, seed, progress)?;
    write_rows(out, &rows)?;
    Ok(())
}

/// Cartesian grid for model validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationGrid {
    pub altitudes_m: Vec<f64>,
    pub densities_per_km: Vec<f64>,
    pub gammas_db: Vec<f64>,
    pub rras: Vec<RraKind>,
}

impl Default for ValidationGrid {
    fn default() -> Self {
        Self {
            altitudes_m: vec![150.0, 250.0, 350.0],
            densities_per_km: vec![40.0, 80.0],
            gammas_db: vec![5.0, 10.0],
            rras: vec![RraKind::Fair, RraKind::BeamBased],
        }
    }
}

impl ValidationGrid {
    /// Parse `h=150,250;lambda=40,80;gamma=5,10;rra=fair,bb`. Omitted axes
    /// keep their defaults.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let mut grid = Self::default();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, vals) = part
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("grid axis `{part}` is not key=v1,v2")))?;
            let items: Vec<&str> = vals.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
            if items.is_empty() {
                return Err(CliError::Usage(format!("grid axis `{key}` has no values")));
            }
            let nums = || {
                items
                    .iter()
                    .map(|v| v.parse::<f64>().map_err(|_| CliError::Usage(format!("bad number `{v}` in grid"))))
                    .collect::<Result<Vec<f64>, _>>()
            };
            match key.trim() {
                "h" | "altitude_m" => grid.altitudes_m = nums()?,
                "lambda" | "density_per_km" => grid.densities_per_km = nums()?,
                "gamma" | "gamma_db" => grid.gammas_db = nums()?,
                "rra" => {
                    grid.rras = items
                        .iter()
                        .map(|v| parse_rra(v).ok_or_else(|| CliError::Usage(format!("unknown rra `{v}`"))))
                        .collect::<Result<_, _>>()?
                }
                other => return Err(CliError::Usage(format!("unknown grid axis `{other}`"))),
            }
        }
        Ok(grid)
    }

    pub fn configs(&self, base: &ScenarioConfig) -> Vec<ScenarioConfig> {
        let mut out = Vec::new();
        for &rra in &self.rras {
            for &g in &self.gammas_db {
                for &d in &self.densities_per_km {
                    for &h in &self.altitudes_m {
                        let mut c = base.clone();
                        c.rra_kind = rra;
                        c.gamma_th_db = g;
                        c.set_lambda_per_km(d);
                        c.h_uav = h;
                        out.push(c);
                    }
                }
            }
        }
        out
    }
}

pub fn parse_rra(s: &str) -> Option<RraKind> {
    match s {
        "fair" => Some(RraKind::Fair),
        "bb" | "beam_based" | "beam-based" => Some(RraKind::BeamBased),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationPoint {
    pub h_uav_m: f64,
    pub density_per_km: f64,
    pub gamma_db: f64,
    pub rra_kind: &'static str,
    pub p_acc_analytic: f64,
    pub p_acc_sim: f64,
    pub ci_half_width: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Minimum absolute tolerance between simulated and analytic access.
pub const VALIDATION_ABS_TOL: f64 = 0.02;

/// Model-matched simulation against the analytic model at every grid point.
/// The analytic side uses the config's empty-beam mode; the simulator always
/// counts an empty beam as granted.
pub fn validate_grid(
    base: &ScenarioConfig,
    grid: &ValidationGrid,
    trials: usize,
    seed: u64,
) -> Result<Vec<ValidationPoint>, CliError> {
    let base = ScenarioConfig {
        sim_fidelity: SimFidelity::ModelMatched,
        ..base.clone()
    };
    let rows = simulate_rows(&grid.configs(&base), trials, seed, false)?;
    Ok(rows
        .into_iter()
        .map(|r| {
            let sim = r.p_acc_sim.expect("simulated");
            let hw = 0.5 * (r.ci_high.unwrap() - r.ci_low.unwrap());
            let tolerance = VALIDATION_ABS_TOL.max(3.0 * hw);
            ValidationPoint {
                h_uav_m: r.h_uav_m,
                density_per_km: r.density_per_km,
                gamma_db: r.gamma_db,
                rra_kind: r.rra_kind,
                p_acc_analytic: r.p_acc_analytic,
                p_acc_sim: sim,
                ci_half_width: hw,
                tolerance,
                pass: (sim - r.p_acc_analytic).abs() <= tolerance,
            }
        })
        .collect())
}

pub fn cmd_validate<W: Write>(
    base: &ScenarioConfig,
    grid: &ValidationGrid,
    trials: usize,
    seed: u64,
    out: W,
) -> Result<(), CliError> {
    let points = validate_grid(base, grid, trials, seed)?;
    write_rows(out, &points)?;
    let failed: Vec<&ValidationPoint> = points.iter().filter(|p| !p.pass).collect();
    for p in &failed {
        eprintln!(
            "FAIL h={} density={} gamma={} rra={}: |{:.5} - {:.5}| > {:.5}",
            p.h_uav_m, p.density_per_km, p.gamma_db, p.rra_kind, p.p_acc_sim, p.p_acc_analytic, p.tolerance
        );
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::ValidationFailed(failed.len()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanRow {
    pub h_best_m: f64,
    pub l_f_m: f64,
    pub drones_per_km: f64,
    pub p_acc_analytic: f64,
}

pub fn cmd_plan<W: Write>(
    base: &ScenarioConfig,
    target: f64,
    h_range: (f64, f64),
    step: f64,
    out: W,
) -> Result<(), CliError> {
    let plan = plan_altitude(base, target, h_range, step).map_err(|e| match e {
        PlanError::NoFeasibleAltitude { .. } => CliError::Infeasible(e),
        PlanError::Invalid(v) => v.into(),
        PlanError::BadRequest(msg) => CliError::Usage(msg),
    })?;
    write_rows(
        out,
        &[PlanRow {
            h_best_m: plan.h_best,
            l_f_m: plan.segment_length_m,
            drones_per_km: plan.drones_per_km,
            p_acc_analytic: plan.avg_access,
        }],
    )?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodebookRow {
    pub beam_index: usize,
    pub pointing_deg: f64,
    pub beamwidth_deg: f64,
    pub x_left_m: f64,
    pub x_right_m: f64,
    pub length_m: f64,
    pub capacity: usize,
    pub barycenter_dist_m: f64,
}

pub fn cmd_codebook<W: Write>(base: &ScenarioConfig, out: W) -> Result<(), CliError> {
    let cb = uavrelay::beamgeom::make_codebook(base).map_err(uavrelay::Error::from)?;
    let rows: Vec<CodebookRow> = cb
        .beams
        .iter()
        .map(|b| CodebookRow {
            beam_index: b.index,
            pointing_deg: b.pointing_rad.to_degrees(),
            beamwidth_deg: b.beamwidth_rad.to_degrees(),
            x_left_m: b.x_left,
            x_right_m: b.x_right,
            length_m: b.length_m,
            capacity: b.capacity,
            barycenter_dist_m: b.barycenter_dist_m,
        })
        .collect();
    write_rows(out, &rows)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocRow {
    pub beam_index: usize,
    pub strategy: &'static str,
    pub n_resources: usize,
}

pub fn cmd_alloc<W: Write>(base: &ScenarioConfig, out: W) -> Result<(), CliError> {
    let eval = evaluate(base)?;
    let rows: Vec<AllocRow> = eval
        .allocation
        .per_beam
        .iter()
        .enumerate()
        .map(|(beam_index, &n)| AllocRow {
            beam_index,
            strategy: eval.allocation.strategy.as_str(),
            n_resources: n,
        })
        .collect();
    write_rows(out, &rows)?;
    Ok(())
}

pub fn parse_footprint(s: &str) -> Option<uavrelay::FootprintMode> {
    match s {
        "paper" | "paper_cos" => Some(uavrelay::FootprintMode::PaperCos),
        "geometric" | "geometric_tan" => Some(uavrelay::FootprintMode::GeometricTan),
        _ => None,
    }
}

pub fn parse_empty_beam(s: &str) -> Option<EmptyBeamMode> {
    match s {
        "paper" | "paper_exact" => Some(EmptyBeamMode::PaperExact),
        "include-zero" | "include_zero" => Some(EmptyBeamMode::IncludeZero),
        _ => None,
    }
}

pub fn parse_fidelity(s: &str) -> Option<SimFidelity> {
    match s {
        "model" | "model_matched" => Some(SimFidelity::ModelMatched),
        "full" | "full_channel" => Some(SimFidelity::FullChannel),
        _ => None,
    }
}
