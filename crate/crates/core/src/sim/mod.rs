//! Trajectories, campaigns, metrics and reports.

pub mod campaign;
pub mod config;
pub mod metrics;
pub mod report;
pub mod selftest;
pub mod sweeps;
pub mod trajectory;

pub use campaign::{run_campaign, CampaignOutput, Scenario, TrackerKind, TrialResult};
pub use config::SimulationConfig;
