//! Average access probability, radio resource assignment and Monte Carlo
//! validation for UAV-relayed vehicular sidelink communications.
//!
//! A beamforming UAV hovers over a highway segment and relays sidelink
//! traffic for vehicles whose direct link is blocked. The crate models
//!
//! - the DFT beam codebook and the road footprint of every beam ([`beamgeom`]),
//! - path loss, shadowing and multipath channel realizations ([`channel`]),
//! - the Fair and Beam-Based splits of the time-frequency grid ([`rra`]),
//! - the closed-form average access probability and an altitude planner
//!   built on it ([`analytic`]),
//! - a reproducible Monte Carlo engine that checks the closed form ([`mcsim`]).
//!
//! Everything is driven by a validated [`ScenarioConfig`].

pub mod analytic;
pub mod beamgeom;
pub mod channel;
pub mod mcsim;
pub mod rra;
pub mod scenario;

mod numeric;

pub use analytic::{AltitudePlan, AnalyticReport, PlanError};
pub use beamgeom::{Beam, BeamCodebook, GeomError};
pub use mcsim::{AccessReport, TrialOutcome};
pub use rra::ResourceAllocation;
pub use scenario::{
    CiMethod, EmptyBeamMode, FootprintMode, RraKind, ScenarioConfig, SimFidelity, ValidationError,
};

/// Convenience bundle: everything the model needs for one operating point.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub codebook: BeamCodebook,
    pub allocation: ResourceAllocation,
    pub report: AnalyticReport,
}

/// Validate `cfg`, build its codebook and allocation, and evaluate the
/// analytic model.
pub fn evaluate(cfg: &ScenarioConfig) -> Result<Evaluation, Error> {
    let cfg = cfg.clone().validate()?;
    let codebook = beamgeom::make_codebook(&cfg)?;
    let allocation = rra::allocate(&cfg, &codebook);
    let report = analytic::average_access_prob(&cfg, &codebook, &allocation);
    Ok(Evaluation {
        codebook,
        allocation,
        report,
    })
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Plan(#[from] PlanError),
}
