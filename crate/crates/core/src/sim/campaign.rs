//! Monte-Carlo execution of the proposed and benchmark trackers.

use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytics::{BeamAnalytics, GainConvention, RangeForm, DEFAULT_KAPPAS};
use crate::channel::{sample_scatterers, ChannelInstance, Disk, LinkBudget, Scatterer};
use crate::error::{domain, Result};
use crate::frontend::inner;
use crate::geometry::{DistanceModel, DmaGeometry, PolarPosition};
use crate::tracking::{
    fixed_step, initial_fixed_state, initial_state, tracking_step, FixedParams, SlotReport, TrackerParams,
    TrackerState,
};

use super::trajectory::{generate_trajectory, Trajectory, TrajectoryParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackerKind {
    Proposed,
    Benchmark,
}

/// Benchmark settings; `None` fields are derived from the proposed run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub interval: Option<f64>,
    pub radial_step: Option<f64>,
    pub angular_step: Option<f64>,
}

/// Fully resolved campaign inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub geometry: DmaGeometry,
    pub budget: LinkBudget,
    pub tracker: TrackerParams,
    pub trajectory: TrajectoryParams,
    pub scatterer_count: usize,
    /// Radius of the disk around the trajectory start holding scatterers (m).
    pub scatterer_radius: f64,
    /// Redraw scatterers around the UE at every estimation slot instead of
    /// keeping the trial's initial draw.
    pub redraw_scatterers: bool,
    pub constant_pathloss: bool,
    pub benchmark: Option<BenchmarkSpec>,
    pub convention: GainConvention,
    pub seed: u64,
    pub trials: usize,
}

impl Scenario {
    /// Default array, 30/5/−94 dBm budget, default tracker, one scatterer
    /// within 5 m of the start, benchmark on.
    pub fn new(seed: u64, trials: usize) -> Self {
        let geometry = DmaGeometry::default();
        Self {
            trajectory: TrajectoryParams::for_geometry(&geometry),
            geometry,
            budget: LinkBudget::default(),
            tracker: TrackerParams::default(),
            scatterer_count: 1,
            scatterer_radius: 5.0,
            redraw_scatterers: false,
            constant_pathloss: false,
            benchmark: Some(BenchmarkSpec::default()),
            convention: GainConvention::Power,
            seed,
            trials,
        }
    }

    pub fn analytics(&self) -> Result<BeamAnalytics> {
        let mut kappas: Vec<f64> = DEFAULT_KAPPAS.to_vec();
        kappas.extend([self.tracker.kappa, self.tracker.delta, self.tracker.cold_delta]);
        BeamAnalytics::with_options(self.geometry.clone(), self.convention, RangeForm::FullK, &kappas)
    }
}

/// One estimation slot as persisted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub trial: usize,
    pub tracker: TrackerKind,
    pub slot: usize,
    /// Simulated trigger time (s).
    pub time_s: f64,
    pub true_r_m: f64,
    pub true_phi_rad: f64,
    pub true_r0_m: f64,
    pub est_r_m: f64,
    pub est_phi_rad: f64,
    pub position_error_m: f64,
    /// Relative gain at the trigger instant with the new precoder.
    pub relative_gain: f64,
    pub coherence_time_s: f64,
    pub search_radius_m: f64,
    pub radial_samples: usize,
    pub grid_samples: usize,
    pub speed_estimate_mps: f64,
    pub true_speed_mps: f64,
    pub pilots: usize,
}

/// Everything one trial produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    pub tracker: TrackerKind,
    pub error: Option<String>,
    pub slots: Vec<SlotRecord>,
    /// Relative gain on the TTI grid.
    pub tti_gain: Vec<f32>,
    /// True `r0` on the TTI grid.
    pub tti_r0: Vec<f32>,
}

impl TrialResult {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// Trial `k` draws its world from stream `2k` and its noise from `2k + 1`
/// of the master seed.
fn trial_rng(seed: u64, trial: usize, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * trial as u64 + stream);
    rng
}

/// Trajectory and scatterers of a trial; shared by both trackers.
pub fn trial_world(scenario: &Scenario, trial: usize) -> Result<(Trajectory, Vec<Scatterer>)> {
    let mut rng = trial_rng(scenario.seed, trial, 0);
    let traj = generate_trajectory(&mut rng, &scenario.trajectory, &scenario.geometry)?;
    let start = traj.position_at(0.0);
    let scatterers = sample_scatterers(
        start,
        scenario.scatterer_count,
        Disk {
            center: start,
            radius: scenario.scatterer_radius,
        },
        &mut rng,
    )?;
    Ok((traj, scatterers))
}

struct GainProbe {
    geom: DmaGeometry,
    norm: f64,
}

impl GainProbe {
    fn new(geom: &DmaGeometry, budget: &LinkBudget) -> Self {
        Self {
            geom: geom.clone(),
            norm: 0.5 * budget.bs_power * geom.n_elements() as f64,
        }
    }

    /// `|a(p)ᴴ Q̄v|² / (½ P_b N)` with the exact focusing vector.
    fn relative(&self, x: &[Complex64], p: PolarPosition) -> f64 {
        let k = self.geom.wavenumber();
        let a: Vec<Complex64> = self
            .geom
            .distances(p, DistanceModel::Exact)
            .into_iter()
            .map(|d| Complex64::cis(-k * d))
            .collect();
        inner(&a, x).norm_sqr() / self.norm
    }
}

/// Runs one tracker along one trial's trajectory.
pub fn run_trial(
    scenario: &Scenario,
    an: &BeamAnalytics,
    trial: usize,
    kind: TrackerKind,
    fixed: Option<FixedParams>,
) -> Result<TrialResult> {
    let (traj, mut scatterers) = trial_world(scenario, trial)?;
    let mut rng = trial_rng(scenario.seed, trial, 1);
    let geom = &scenario.geometry;
    let budget = &scenario.budget;
    let params = &scenario.tracker;
    let probe = GainProbe::new(geom, budget);
    // The prior holds the first two trajectory samples, hence the initial
    // speed as well as the position.
    let speed = traj.speed_at(0.0);
    let start = traj.position_at(0.0);
    let mut state = match kind {
        TrackerKind::Proposed => initial_state(an, params, budget, start, speed)?,
        TrackerKind::Benchmark => {
            let f = fixed.ok_or_else(|| crate::Error::Domain("benchmark needs fixed parameters".into()))?;
            initial_fixed_state(an, params, &f, budget, start, speed)?
        }
    };
    let mut x = state.hybrid.transmit();
    let n_tti = (traj.duration() / params.tti).floor() as usize + 1;
    let mut result = TrialResult {
        trial,
        tracker: kind,
        error: None,
        slots: Vec::new(),
        tti_gain: Vec::with_capacity(n_tti),
        tti_r0: Vec::with_capacity(n_tti),
    };
    for k in 0..n_tti {
        let tau = k as f64 * params.tti;
        while state.next_trigger() <= tau {
            let now = state.next_trigger();
            let truth = traj.position_at(now);
            if scenario.redraw_scatterers {
                let area = Disk {
                    center: truth,
                    radius: scenario.scatterer_radius,
                };
                scatterers = sample_scatterers(truth, scenario.scatterer_count, area, &mut rng)?;
            }
            let ch = ChannelInstance::build(geom, truth, &scatterers, scenario.constant_pathloss)?;
            let (next, report) = match kind {
                TrackerKind::Proposed => tracking_step(an, params, budget, &state, now, &ch.h, &mut rng)?,
                TrackerKind::Benchmark => {
                    let f = fixed.expect("checked above");
                    fixed_step(an, params, &f, budget, &state, now, &ch.h, &mut rng)?
                }
            };
            state = next;
            x = state.hybrid.transmit();
            let mut record = slot_record(geom, trial, kind, &state, &report, truth, probe.relative(&x, truth));
            record.true_speed_mps = traj.speed_at(now);
            result.slots.push(record);
        }
        let truth = traj.position_at(tau);
        result.tti_gain.push(probe.relative(&x, truth) as f32);
        result.tti_r0.push(geom.r0_from_r(truth.r) as f32);
    }
    Ok(result)
}

fn slot_record(
    geom: &DmaGeometry,
    trial: usize,
    kind: TrackerKind,
    state: &TrackerState,
    report: &SlotReport,
    truth: PolarPosition,
    gain: f64,
) -> SlotRecord {
    let est = state.position_estimate;
    SlotRecord {
        trial,
        tracker: kind,
        slot: state.slot_index,
        time_s: state.trigger_time,
        true_r_m: truth.r,
        true_phi_rad: truth.phi,
        true_r0_m: geom.r0_from_r(truth.r),
        est_r_m: est.r,
        est_phi_rad: est.phi,
        position_error_m: est.distance_to(truth),
        relative_gain: gain,
        coherence_time_s: state.coherence_time,
        search_radius_m: report.search_radius,
        radial_samples: report.radial_samples,
        grid_samples: report.grid_samples,
        speed_estimate_mps: state.predicted_speed,
        true_speed_mps: f64::NAN,
        pilots: report.pilots_used,
    }
}

fn isolated(
    scenario: &Scenario,
    an: &BeamAnalytics,
    trial: usize,
    kind: TrackerKind,
    fixed: Option<FixedParams>,
) -> TrialResult {
    let outcome = catch_unwind(AssertUnwindSafe(|| run_trial(scenario, an, trial, kind, fixed)));
    let error = match outcome {
        Ok(Ok(r)) => return r,
        Ok(Err(e)) => e.to_string(),
        Err(p) => p
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| p.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into()),
    };
    TrialResult {
        trial,
        tracker: kind,
        error: Some(error),
        slots: Vec::new(),
        tti_gain: Vec::new(),
        tti_r0: Vec::new(),
    }
}

/// Runs all trials of one tracker; results are ordered by trial index.
pub fn run_trials(
    scenario: &Scenario,
    an: &BeamAnalytics,
    kind: TrackerKind,
    fixed: Option<FixedParams>,
) -> Vec<TrialResult> {
    let run = |k: usize| isolated(scenario, an, k, kind, fixed);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..scenario.trials).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..scenario.trials).map(run).collect()
    }
}

/// Benchmark parameters from a proposed run: mean `T_c`, mean radial
/// half-window `½(Δ⁻_δ + Δ⁺_δ)` and mean angular half-window at the
/// estimates. Explicit values in `spec` take precedence.
pub fn derive_fixed(an: &BeamAnalytics, params: &TrackerParams, spec: &BenchmarkSpec, proposed: &[TrialResult]) -> Result<FixedParams> {
    let slots: Vec<&SlotRecord> = proposed.iter().flat_map(|t| t.slots.iter()).collect();
    let need = spec.interval.is_none() || spec.radial_step.is_none() || spec.angular_step.is_none();
    if need && slots.is_empty() {
        return domain("cannot derive benchmark parameters from a run without slots");
    }
    let mean = |f: &dyn Fn(&SlotRecord) -> Result<f64>| -> Result<f64> {
        let mut s = 0.0;
        let mut n = 0usize;
        for r in &slots {
            let v = f(r)?;
            if v.is_finite() {
                s += v;
                n += 1;
            }
        }
        Ok(s / n.max(1) as f64)
    };
    let interval = match spec.interval {
        Some(t) => t,
        None => mean(&|r| Ok(r.coherence_time_s))?,
    };
    let radial_step = match spec.radial_step {
        Some(d) => d,
        None => mean(&|r| {
            let (m, p) = an.delta_r(r.est_r_m, params.delta)?;
            Ok(0.5 * (m + p))
        })?,
    };
    let angular_step = match spec.angular_step {
        Some(d) => d,
        None => mean(&|r| an.delta_phi(r.est_phi_rad, params.delta))?,
    };
    let f = FixedParams {
        t_fix: interval,
        dr_fix: radial_step,
        dphi_fix: angular_step,
    };
    f.validate()?;
    Ok(f)
}

/// Output of a full campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutput {
    pub proposed: Vec<TrialResult>,
    pub benchmark: Option<(FixedParams, Vec<TrialResult>)>,
}

pub fn run_campaign(scenario: &Scenario) -> Result<CampaignOutput> {
    scenario.tracker.validate()?;
    scenario.trajectory.validate(&scenario.geometry)?;
    let an = scenario.analytics()?;
    let proposed = run_trials(scenario, &an, TrackerKind::Proposed, None);
    let benchmark = match &scenario.benchmark {
        None => None,
        Some(spec) => {
            let fixed = derive_fixed(&an, &scenario.tracker, spec, &proposed)?;
            Some((fixed, run_trials(scenario, &an, TrackerKind::Benchmark, Some(fixed))))
        }
    };
    Ok(CampaignOutput { proposed, benchmark })
}
