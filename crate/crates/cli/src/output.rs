//! CSV rows. Headers are the struct field names in declaration order; the
//! writer always uses LF line endings.

use std::io::Write;

use serde::Serialize;
use uavrelay::{AccessReport, Evaluation, ScenarioConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub h_uav_m: f64,
    pub density_per_km: f64,
    pub gamma_db: f64,
    pub rra_kind: &'static str,
    pub footprint_mode: &'static str,
    pub empty_beam_mode: &'static str,
    pub p_acc_analytic: f64,
    pub p_acc_sim: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub connected_mean: Option<f64>,
    pub served_mean: Option<f64>,
    pub n_beam: usize,
    pub l_f_m: f64,
    pub seed: Option<u64>,
}

pub const RESULT_HEADER: &str = "h_uav_m,density_per_km,gamma_db,rra_kind,footprint_mode,empty_beam_mode,p_acc_analytic,p_acc_sim,ci_low,ci_high,connected_mean,served_mean,n_beam,l_f_m,seed";

impl ResultRow {
    pub fn analytic(cfg: &ScenarioConfig, eval: &Evaluation) -> Self {
        Self {
            h_uav_m: cfg.h_uav,
            density_per_km: cfg.lambda_per_km(),
            gamma_db: cfg.gamma_th_db,
            rra_kind: cfg.rra_kind.as_str(),
            footprint_mode: cfg.footprint_mode.as_str(),
            empty_beam_mode: cfg.empty_beam_mode.as_str(),
            p_acc_analytic: eval.report.avg_access,
            p_acc_sim: None,
            ci_low: None,
            ci_high: None,
            connected_mean: None,
            served_mean: None,
            n_beam: eval.codebook.len(),
            l_f_m: eval.codebook.segment_length_m,
            seed: None,
        }
    }

    pub fn with_simulation(mut self, sim: &AccessReport) -> Self {
        self.p_acc_sim = Some(sim.avg_access_hat);
        self.ci_low = Some(sim.ci_low);
        self.ci_high = Some(sim.ci_high);
        self.connected_mean = Some(sim.connected_mean);
        self.served_mean = Some(sim.served_mean);
        self.seed = Some(sim.seed);
        self
    }
}

pub fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<(), csv::Error> {
    let mut wtr = csv_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_matches_schema() {
        let cfg = ScenarioConfig::default();
        let eval = uavrelay::evaluate(&cfg).unwrap();
        let mut buf = Vec::new();
        write_rows(&mut buf, &[ResultRow::analytic(&cfg, &eval)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(RESULT_HEADER));
        let row = lines.next().unwrap();
        assert!(row.starts_with("250.0,40.0,10.0,fair,paper,include-zero,"));
        let tail = format!(",,,,,,4,{},", eval.codebook.segment_length_m);
        assert!(row.ends_with(&tail), "{row}");
        assert!(!text.contains('\r'));
    }
}
