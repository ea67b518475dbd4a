//! Parameter sweeps and figure presets.

use std::fmt;
use std::str::FromStr;

use uavrelay::{EmptyBeamMode, FootprintMode, RraKind, ScenarioConfig, SimFidelity};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    AltitudeM,
    DensityPerKm,
    GammaDb,
}

impl FromStr for SweepVar {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "altitude_m" | "h" | "altitude" => Ok(SweepVar::AltitudeM),
            "density_per_km" | "lambda" | "density" => Ok(SweepVar::DensityPerKm),
            "gamma_db" | "gamma" => Ok(SweepVar::GammaDb),
            other => Err(CliError::Usage(format!(
                "unknown sweep variable `{other}` (altitude_m, density_per_km, gamma_db)"
            ))),
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVar::AltitudeM => "altitude_m",
            SweepVar::DensityPerKm => "density_per_km",
            SweepVar::GammaDb => "gamma_db",
        })
    }
}

/// Partial scenario applied on top of the loaded config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub h_uav: Option<f64>,
    pub density_per_km: Option<f64>,
    pub gamma_db: Option<f64>,
    pub rra: Option<RraKind>,
    pub footprint_mode: Option<FootprintMode>,
    pub empty_beam_mode: Option<EmptyBeamMode>,
    pub fidelity: Option<SimFidelity>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(h) = self.h_uav {
            cfg.h_uav = h;
        }
        if let Some(d) = self.density_per_km {
            cfg.set_lambda_per_km(d);
        }
        if let Some(g) = self.gamma_db {
            cfg.gamma_th_db = g;
        }
        if let Some(r) = self.rra {
            cfg.rra_kind = r;
        }
        if let Some(m) = self.footprint_mode {
            cfg.footprint_mode = m;
        }
        if let Some(m) = self.empty_beam_mode {
            cfg.empty_beam_mode = m;
        }
        if let Some(f) = self.fidelity {
            cfg.sim_fidelity = f;
        }
    }

    fn sets(&self, var: SweepVar) -> bool {
        match var {
            SweepVar::AltitudeM => self.h_uav.is_some(),
            SweepVar::DensityPerKm => self.density_per_km.is_some(),
            SweepVar::GammaDb => self.gamma_db.is_some(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub overrides: Overrides,
}

impl SweepSpec {
    pub fn new(variable: SweepVar, start: f64, stop: f64, step: f64, overrides: Overrides) -> Result<Self, CliError> {
        if !(start.is_finite() && stop.is_finite() && start <= stop) {
            return Err(CliError::Usage(format!("sweep needs start <= stop, got {start}..{stop}")));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(CliError::Usage(format!("sweep step must be > 0, got {step}")));
        }
        if overrides.sets(variable) {
            return Err(CliError::Usage(format!("`{variable}` is both swept and fixed")));
        }
        Ok(Self {
            variable,
            start,
            stop,
            step,
            overrides,
        })
    }

    /// Parse `var:start:stop:step`.
    pub fn parse(s: &str, overrides: Overrides) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(CliError::Usage(format!("sweep `{s}` is not var:start:stop:step")));
        }
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad number `{t}` in sweep `{s}`")))
        };
        Self::new(parts[0].parse()?, num(parts[1])?, num(parts[2])?, num(parts[3])?, overrides)
    }

    /// Inclusive grid `start + i * step`.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }

    pub fn apply_value(&self, cfg: &mut ScenarioConfig, x: f64) {
        match self.variable {
            SweepVar::AltitudeM => cfg.h_uav = x,
            SweepVar::DensityPerKm => cfg.set_lambda_per_km(x),
            SweepVar::GammaDb => cfg.gamma_th_db = x,
        }
    }
}

/// One curve of a figure: a threshold/strategy pair layered over the sweep.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Series {
    pub gamma_db: Option<f64>,
    pub rra: Option<RraKind>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub sweep: Option<SweepSpec>,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig3a,
    Fig3b,
    Fig4a,
    Fig4b,
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fig3a" => Ok(Preset::Fig3a),
            "fig3b" => Ok(Preset::Fig3b),
            "fig4a" => Ok(Preset::Fig4a),
            "fig4b" => Ok(Preset::Fig4b),
            other => Err(CliError::Usage(format!("unknown preset `{other}`"))),
        }
    }
}

fn both_rras(gammas: &[f64]) -> Vec<Series> {
    gammas
        .iter()
        .flat_map(|&g| {
            [RraKind::Fair, RraKind::BeamBased].map(|r| Series {
                gamma_db: Some(g),
                rra: Some(r),
            })
        })
        .collect()
}

impl Preset {
    /// Access probability vs altitude (3a) and vs density (3b) for both
    /// thresholds and strategies; connected vs served over altitude at 40 (4a)
    /// and 80 (4b) vehicles/km.
    pub fn plan(self, extra: Overrides) -> Result<SweepPlan, CliError> {
        let (var, start, stop, step, fixed, series) = match self {
            Preset::Fig3a => (
                SweepVar::AltitudeM,
                50.0,
                500.0,
                10.0,
                Overrides { density_per_km: Some(40.0), ..Default::default() },
                both_rras(&[5.0, 10.0]),
            ),
            Preset::Fig3b => (
                SweepVar::DensityPerKm,
                10.0,
                100.0,
                5.0,
                Overrides { h_uav: Some(250.0), ..Default::default() },
                both_rras(&[5.0, 10.0]),
            ),
            Preset::Fig4a => (
                SweepVar::AltitudeM,
                50.0,
                500.0,
                25.0,
                Overrides { density_per_km: Some(40.0), ..Default::default() },
                both_rras(&[10.0]),
            ),
            Preset::Fig4b => (
                SweepVar::AltitudeM,
                50.0,
                500.0,
                25.0,
                Overrides { density_per_km: Some(80.0), ..Default::default() },
                both_rras(&[10.0]),
            ),
        };
        let overrides = Overrides {
            footprint_mode: extra.footprint_mode,
            empty_beam_mode: extra.empty_beam_mode,
            fidelity: extra.fidelity,
            ..fixed
        };
        let series = match extra.rra {
            Some(r) => series.into_iter().filter(|s| s.rra == Some(r)).collect(),
            None => series,
        };
        Ok(SweepPlan {
            sweep: Some(SweepSpec::new(var, start, stop, step, overrides)?),
            series,
        })
    }
}

impl SweepPlan {
    /// Fully resolved configs in output order: series-major, then sweep value.
    pub fn configs(&self, base: &ScenarioConfig) -> Vec<ScenarioConfig> {
        let series: Vec<Series> = if self.series.is_empty() {
            vec![Series::default()]
        } else {
            self.series.clone()
        };
        let mut out = Vec::new();
        for s in &series {
            let mut cfg = base.clone();
            if let Some(sweep) = &self.sweep {
                sweep.overrides.apply(&mut cfg);
            }
            if let Some(g) = s.gamma_db {
                cfg.gamma_th_db = g;
            }
            if let Some(r) = s.rra {
                cfg.rra_kind = r;
            }
            match &self.sweep {
                Some(sweep) => {
                    for x in sweep.points() {
                        let mut c = cfg.clone();
                        sweep.apply_value(&mut c, x);
                        out.push(c);
                    }
                }
                None => out.push(cfg),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_points() {
        let s = SweepSpec::parse("altitude_m:50:500:10", Overrides::default()).unwrap();
        let p = s.points();
        assert_eq!(p.len(), 46);
        assert_eq!(p[0], 50.0);
        assert_eq!(*p.last().unwrap(), 500.0);
        let single = SweepSpec::parse("gamma_db:5:5:1", Overrides::default()).unwrap();
        assert_eq!(single.points(), vec![5.0]);
        let fine = SweepSpec::parse("density_per_km:0.1:0.3:0.1", Overrides::default()).unwrap();
        assert_eq!(fine.points().len(), 3);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(SweepSpec::parse("altitude_m:500:50:10", Overrides::default()).is_err());
        assert!(SweepSpec::parse("altitude_m:50:500:0", Overrides::default()).is_err());
        assert!(SweepSpec::parse("speed:1:2:1", Overrides::default()).is_err());
        assert!(SweepSpec::parse("altitude_m:50:500", Overrides::default()).is_err());
        let fixed_h = Overrides { h_uav: Some(100.0), ..Default::default() };
        assert!(SweepSpec::parse("altitude_m:50:500:10", fixed_h).is_err());
    }

    #[test]
    fn preset_expansion() {
        let plan = Preset::Fig3a.plan(Overrides::default()).unwrap();
        let cfgs = plan.configs(&ScenarioConfig::default());
        assert_eq!(cfgs.len(), 4 * 46);
        assert!(cfgs.iter().all(|c| (c.lambda_per_km() - 40.0).abs() < 1e-9));
        assert_eq!(cfgs[0].gamma_th_db, 5.0);
        assert_eq!(cfgs[0].rra_kind, RraKind::Fair);
        assert_eq!(cfgs[46].rra_kind, RraKind::BeamBased);

        let only_bb = Preset::Fig4b
            .plan(Overrides { rra: Some(RraKind::BeamBased), ..Default::default() })
            .unwrap();
        let cfgs = only_bb.configs(&ScenarioConfig::default());
        assert!(cfgs.iter().all(|c| c.rra_kind == RraKind::BeamBased && c.gamma_th_db == 10.0));
        assert!(cfgs.iter().all(|c| (c.lambda_per_km() - 80.0).abs() < 1e-9));
    }
}
