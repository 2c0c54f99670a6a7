//! Scheduled beam tracking: pilot-based estimation on a dynamic grid,
//! geometric velocity averaging and coherence-time scheduling, plus the
//! fixed-interval benchmark.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytics::BeamAnalytics;
use crate::channel::{uplink_rx, LinkBudget};
use crate::error::{domain, Error, Result};
use crate::frontend::{angle_beamformer, inner, optimal_precoder, range_combiner, HybridConfig};
use crate::geometry::{DistanceModel, PolarPosition};
use crate::grid::{build_grid, cold_start_grid, refine_region, uniform_grid, AngularRecursion, CoordinateGrid};

/// Weighting of the speed history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityWeights {
    /// `w_j = γ^j/(γ^t − 1)`; sums to one only for γ = 2.
    #[default]
    Verbatim,
    /// `w_j = (γ − 1)γ^j/(γ^t − 1)`, always summing to one.
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackerParams {
    /// QoS level κ in percent.
    pub kappa: f64,
    /// Localization resolution δ in percent.
    pub delta: f64,
    pub gamma: f64,
    /// Speed floor in m/s.
    pub u_threshold: f64,
    pub e_c: f64,
    pub e_u: f64,
    pub n_pilots: usize,
    /// Scheduling quantum in seconds; also the floor of `T_c`.
    pub tti: f64,
    pub weights: VelocityWeights,
    /// Re-run a cold start after two consecutive slots whose best metric
    /// stays below the noise floor.
    pub escape: bool,
    /// Coarse resolution of the cold-start sweep.
    pub cold_delta: f64,
}

impl Default for TrackerParams {
    fn default() -> Self {
        Self {
            kappa: 50.0,
            delta: 99.0,
            gamma: 2.0,
            u_threshold: 2.5,
            e_c: 1.5,
            e_u: 0.5,
            n_pilots: 200,
            tti: 500e-6,
            weights: VelocityWeights::Verbatim,
            escape: false,
            cold_delta: 50.0,
        }
    }
}

impl TrackerParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa < self.delta && self.delta < 100.0) {
            return domain(format!(
                "need 0 < kappa < delta < 100, got kappa = {}, delta = {}",
                self.kappa, self.delta
            ));
        }
        if !(self.gamma > 1.0) {
            return domain(format!("gamma must exceed 1, got {}", self.gamma));
        }
        if !(self.u_threshold > 0.0) {
            return domain(format!("speed threshold must be positive, got {}", self.u_threshold));
        }
        if !(self.e_c >= 0.0 && self.e_u >= 0.0) {
            return domain("safety margins must be non-negative");
        }
        if self.n_pilots == 0 {
            return domain("at least one pilot is required");
        }
        if !(self.tti > 0.0) {
            return domain(format!("TTI must be positive, got {}", self.tti));
        }
        if !(self.cold_delta > 0.0 && self.cold_delta <= self.delta) {
            return domain(format!(
                "cold-start resolution must lie in (0, delta], got {}",
                self.cold_delta
            ));
        }
        Ok(())
    }
}

/// Outcome of one pilot burst over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub position: PolarPosition,
    pub ring: usize,
    pub angle: usize,
    /// Best scan metric per ring.
    pub ring_metrics: Vec<f64>,
    /// Averaged repetitions per ring, `⌊N_p/S_r⌋`.
    pub repeats: usize,
    pub pilots_used: usize,
    /// Complex multiplies spent in the digital scan, `N_m·Σ S_φ`.
    pub scan_ops: usize,
    /// Best metric over its expected noise-only value.
    pub metric_to_noise: f64,
}

/// Ring-wise analog combining followed by a digital azimuth scan.
pub fn estimate_position<R: Rng + ?Sized>(
    an: &BeamAnalytics,
    grid: &CoordinateGrid,
    h: &[Complex64],
    budget: &LinkBudget,
    n_pilots: usize,
    rng: &mut R,
) -> Result<Estimate> {
    let geom = an.geometry();
    let s_r = grid.radial_count();
    if s_r == 0 {
        return domain("grid has no samples");
    }
    if s_r > n_pilots {
        return Err(Error::PilotBudget {
            radial_samples: s_r,
            pilots: n_pilots,
        });
    }
    let repeats = n_pilots / s_r;
    let mut ring_metrics = Vec::with_capacity(s_r);
    let mut best = (f64::NEG_INFINITY, 0usize, 0usize, 0.0f64);
    let mut scan_ops = 0;
    for (s, ring) in grid.rings.iter().enumerate() {
        let analog = range_combiner(geom, ring.r)?;
        let y = uplink_rx(h, &analog, budget.ue_power, budget.noise_power, repeats, rng)?;
        let floor = budget.noise_power / repeats as f64 * analog.gram_diagonal().iter().sum::<f64>();
        let mut ring_best = f64::NEG_INFINITY;
        for (i, &phi) in ring.angles.iter().enumerate() {
            let v = angle_beamformer(geom, phi, ring.r)?;
            let m = inner(&v, &y).norm_sqr();
            scan_ops += v.len();
            if m > ring_best {
                ring_best = m;
            }
            if m > best.0 {
                best = (m, s, i, floor);
            }
        }
        ring_metrics.push(ring_best);
    }
    if !best.0.is_finite() {
        return domain("grid rings carry no angles");
    }
    let (metric, s, i, floor) = best;
    Ok(Estimate {
        position: PolarPosition {
            r: grid.rings[s].r,
            phi: grid.rings[s].angles[i],
        },
        ring: s,
        angle: i,
        ring_metrics,
        repeats,
        pilots_used: repeats * s_r,
        scan_ops,
        metric_to_noise: if floor > 0.0 { metric / floor } else { f64::INFINITY },
    })
}

/// Weighted speed prediction over the whole history, newest entry weighted
/// most, floored at `u_th`.
pub fn predict_speed(history: &[f64], params: &TrackerParams) -> f64 {
    let t = history.len();
    if t == 0 {
        return params.u_threshold;
    }
    let g = params.gamma;
    // γ^j/(γ^t − 1) = γ^{j−t}/(1 − γ^{−t}), stable for long histories.
    let denom = 1.0 - g.powi(-(t as i32));
    let scale = match params.weights {
        VelocityWeights::Verbatim => 1.0,
        VelocityWeights::Normalized => g - 1.0,
    };
    let avg: f64 = history
        .iter()
        .enumerate()
        .map(|(j, u)| scale * g.powi(j as i32 - t as i32) / denom * u)
        .sum();
    avg.max(params.u_threshold)
}

/// Instantaneous speed from consecutive estimates, and the prediction after
/// appending it to the history.
pub fn update_velocity(
    history: &mut Vec<f64>,
    t_prev: f64,
    now: PolarPosition,
    prev: PolarPosition,
    params: &TrackerParams,
) -> Result<(f64, f64)> {
    if !(t_prev > 0.0) {
        return domain(format!("previous interval must be positive, got {t_prev}"));
    }
    let u = now.distance_to(prev) / t_prev;
    history.push(u);
    Ok((u, predict_speed(history, params)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerState {
    pub position_estimate: PolarPosition,
    /// Instantaneous speed estimates `û_0..û_t`.
    pub velocity_history: Vec<f64>,
    /// Prediction `û_{t+1}` used for scheduling.
    pub predicted_speed: f64,
    /// `c_κ` at the current estimate.
    pub c_kappa: f64,
    pub coherence_time: f64,
    pub hybrid: HybridConfig,
    pub slot_index: usize,
    /// Time of the slot that produced this state.
    pub trigger_time: f64,
    /// Consecutive slots whose best metric stayed under the noise floor.
    pub weak_slots: usize,
}

impl TrackerState {
    pub fn next_trigger(&self) -> f64 {
        self.trigger_time + self.coherence_time
    }
}

/// Per-slot bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotReport {
    pub search_radius: f64,
    pub radial_samples: usize,
    pub grid_samples: usize,
    pub pilots_used: usize,
    pub scan_ops: usize,
    pub instantaneous_speed: f64,
    pub cold_start: bool,
    pub grid: CoordinateGrid,
}

fn schedule(an: &BeamAnalytics, params: &TrackerParams, p: PolarPosition, speed: f64) -> Result<(f64, f64)> {
    let c = an.chord_depth_min(p.r, p.phi, params.kappa)?;
    let tc = (c / (speed * (1.0 + params.e_u))).max(params.tti);
    Ok((c, tc))
}

fn precoder(an: &BeamAnalytics, budget: &LinkBudget, p: PolarPosition) -> Result<HybridConfig> {
    optimal_precoder(an.geometry(), p, budget.bs_power, DistanceModel::Fresnel)
}

/// State at time zero from a known position and speed.
pub fn initial_state(
    an: &BeamAnalytics,
    params: &TrackerParams,
    budget: &LinkBudget,
    prior: PolarPosition,
    speed: f64,
) -> Result<TrackerState> {
    params.validate()?;
    let predicted = speed.max(params.u_threshold);
    let (c, tc) = schedule(an, params, prior, predicted)?;
    Ok(TrackerState {
        position_estimate: prior,
        velocity_history: vec![speed],
        predicted_speed: predicted,
        c_kappa: c,
        coherence_time: tc,
        hybrid: precoder(an, budget, prior)?,
        slot_index: 0,
        trigger_time: 0.0,
        weak_slots: 0,
    })
}

/// Coarse sweep of the whole space followed by a refinement at `δ`.
pub fn cold_start_estimate<R: Rng + ?Sized>(
    an: &BeamAnalytics,
    params: &TrackerParams,
    budget: &LinkBudget,
    h: &[Complex64],
    rng: &mut R,
) -> Result<(Estimate, CoordinateGrid)> {
    let coarse_grid = cold_start_grid(an, f64::INFINITY, params.cold_delta, AngularRecursion::NullToNull)?;
    let coarse = estimate_position(an, &coarse_grid, h, budget, params.n_pilots, rng)?;
    let fine_grid = refine_region(an, coarse.position, params.cold_delta, params.delta)?;
    let fine = estimate_position(an, &fine_grid, h, budget, params.n_pilots, rng)?;
    Ok((fine, fine_grid))
}

/// One estimation slot at `now` given the channel `h` at that instant.
pub fn tracking_step<R: Rng + ?Sized>(
    an: &BeamAnalytics,
    params: &TrackerParams,
    budget: &LinkBudget,
    state: &TrackerState,
    now: f64,
    h: &[Complex64],
    rng: &mut R,
) -> Result<(TrackerState, SlotReport)> {
    let c_hat = state.c_kappa * (1.0 + params.e_c);
    let grid = build_grid(an, state.position_estimate, c_hat, params.delta)?;
    finish_slot(an, params, budget, state, now, h, c_hat, grid, rng, true)
}

#[allow(clippy::too_many_arguments)]
fn finish_slot<R: Rng + ?Sized>(
    an: &BeamAnalytics,
    params: &TrackerParams,
    budget: &LinkBudget,
    state: &TrackerState,
    now: f64,
    h: &[Complex64],
    c_hat: f64,
    grid: CoordinateGrid,
    rng: &mut R,
    adaptive: bool,
) -> Result<(TrackerState, SlotReport)> {
    if !(now > state.trigger_time) {
        return domain(format!(
            "slot time {now} does not follow the previous slot at {}",
            state.trigger_time
        ));
    }
    let mut est = estimate_position(an, &grid, h, budget, params.n_pilots, rng)?;
    let mut grid = grid;
    let mut pilots = est.pilots_used;
    let mut scan_ops = est.scan_ops;
    let mut weak = if est.metric_to_noise < 1.0 { state.weak_slots + 1 } else { 0 };
    let mut cold = false;
    if params.escape && weak >= 2 {
        let (fine, fine_grid) = cold_start_estimate(an, params, budget, h, rng)?;
        pilots += fine.pilots_used;
        scan_ops += fine.scan_ops;
        est = fine;
        grid = fine_grid;
        weak = 0;
        cold = true;
    }
    let p = est.position;
    let mut history = state.velocity_history.clone();
    let elapsed = now - state.trigger_time;
    let (u_inst, predicted) = update_velocity(&mut history, elapsed, p, state.position_estimate, params)?;
    let (c, tc) = if adaptive {
        schedule(an, params, p, predicted)?
    } else {
        (state.c_kappa, state.coherence_time)
    };
    let next = TrackerState {
        position_estimate: p,
        velocity_history: history,
        predicted_speed: predicted,
        c_kappa: c,
        coherence_time: tc,
        hybrid: precoder(an, budget, p)?,
        slot_index: state.slot_index + 1,
        trigger_time: now,
        weak_slots: weak,
    };
    let report = SlotReport {
        search_radius: c_hat,
        radial_samples: grid.radial_count(),
        grid_samples: grid.sample_count(),
        pilots_used: pilots,
        scan_ops,
        instantaneous_speed: u_inst,
        cold_start: cold,
        grid,
    };
    Ok((next, report))
}

/// Fixed interval and uniform grid steps of the benchmark tracker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedParams {
    /// Estimation interval in seconds.
    pub t_fix: f64,
    /// Radial half-cell in meters.
    pub dr_fix: f64,
    /// Angular half-cell in radians.
    pub dphi_fix: f64,
}

impl FixedParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_fix > 0.0 && self.dr_fix > 0.0 && self.dphi_fix > 0.0) {
            return domain("benchmark interval and steps must be positive");
        }
        Ok(())
    }
}

/// Benchmark state at time zero; the interval is `T_fix` throughout.
pub fn initial_fixed_state(
    an: &BeamAnalytics,
    params: &TrackerParams,
    fixed: &FixedParams,
    budget: &LinkBudget,
    prior: PolarPosition,
    speed: f64,
) -> Result<TrackerState> {
    fixed.validate()?;
    let mut s = initial_state(an, params, budget, prior, speed)?;
    s.coherence_time = fixed.t_fix;
    Ok(s)
}

/// Benchmark slot: uniform grid over the disk reachable within `T_fix`.
#[allow(clippy::too_many_arguments)]
pub fn fixed_step<R: Rng + ?Sized>(
    an: &BeamAnalytics,
    params: &TrackerParams,
    fixed: &FixedParams,
    budget: &LinkBudget,
    state: &TrackerState,
    now: f64,
    h: &[Complex64],
    rng: &mut R,
) -> Result<(TrackerState, SlotReport)> {
    // Capped so the uniform grid never needs more rings than there are pilots.
    let c_hat = ((1.0 + params.e_c) * (1.0 + params.e_u) * state.predicted_speed * fixed.t_fix)
        .min((params.n_pilots.max(2) - 1) as f64 * fixed.dr_fix);
    let grid = uniform_grid(an, state.position_estimate, c_hat, fixed.dr_fix, fixed.dphi_fix)?;
    finish_slot(an, params, budget, state, now, h, c_hat, grid, rng, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{los_channel, ChannelInstance};
    use crate::geometry::DmaGeometry;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn an() -> BeamAnalytics {
        BeamAnalytics::new(DmaGeometry::default()).unwrap()
    }

    fn noiseless() -> LinkBudget {
        LinkBudget::new(1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn geometric_weights() {
        let p = TrackerParams::default();
        assert!((predict_speed(&[4.0, 4.0, 4.0], &p) - 4.0).abs() < 1e-12);
        // newest weighted 4/7
        let u = predict_speed(&[0.0, 0.0, 7.0], &p);
        assert!((u - 4.0).abs() < 1e-12);
        assert_eq!(predict_speed(&[1.0, 0.5, 2.0], &p), 2.5);
        let long = vec![3.0; 5000];
        assert!((predict_speed(&long, &p) - 3.0).abs() < 1e-12);
        let g3 = TrackerParams { gamma: 3.0, ..p.clone() };
        let n3 = TrackerParams { weights: VelocityWeights::Normalized, ..g3.clone() };
        assert!((predict_speed(&[9.0; 4], &g3) - 4.5).abs() < 1e-12);
        assert!((predict_speed(&[9.0; 4], &n3) - 9.0).abs() < 1e-12);
    }

    #[test]
    fn stationary_speed_converges_to_floor() {
        let p = TrackerParams::default();
        let mut h = vec![10.0];
        let pos = PolarPosition::new(20.0, 1.0).unwrap();
        let mut last = 0.0;
        for _ in 0..40 {
            last = update_velocity(&mut h, 0.01, pos, pos, &p).unwrap().1;
        }
        assert_eq!(last, p.u_threshold);
        assert!(update_velocity(&mut h, 0.0, pos, pos, &p).is_err());
    }

    #[test]
    fn noiseless_on_grid_estimate_is_exact() {
        let an = an();
        let g = an.geometry().clone();
        let grid = build_grid(&an, PolarPosition::new(20.0, 1.1).unwrap(), 2.0, 99.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (s, i, p) in grid.samples().step_by(7) {
            let h = los_channel(&g, p, true);
            let e = estimate_position(&an, &grid, &h, &noiseless(), 200, &mut rng).unwrap();
            assert_eq!((e.ring, e.angle), (s, i), "at {p:?}");
            assert_eq!(e.position, p);
            assert!(grid.contains(e.position));
        }
    }

    #[test]
    fn pilot_bookkeeping() {
        let an = an();
        let grid = build_grid(&an, PolarPosition::new(15.0, 1.4).unwrap(), 1.5, 99.0).unwrap();
        let p = grid.samples().next().unwrap().2;
        let h = los_channel(an.geometry(), p, true);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let e = estimate_position(&an, &grid, &h, &noiseless(), 200, &mut rng).unwrap();
        let s_r = grid.radial_count();
        assert_eq!(e.repeats, 200 / s_r);
        assert_eq!(e.pilots_used, s_r * (200 / s_r));
        assert_eq!(e.scan_ops, 10 * grid.sample_count());
        match estimate_position(&an, &grid, &h, &noiseless(), s_r - 1, &mut rng) {
            Err(Error::PilotBudget { radial_samples, pilots }) => {
                assert_eq!((radial_samples, pilots), (s_r, s_r - 1));
            }
            other => panic!("expected pilot budget error, got {other:?}"),
        }
    }

    #[test]
    fn static_ue_reaches_fixed_point() {
        let an = an();
        let params = TrackerParams::default();
        let budget = noiseless();
        let truth = PolarPosition::new(18.0, 1.2).unwrap();
        let h = los_channel(an.geometry(), truth, true);
        let mut s = initial_state(&an, &params, &budget, truth, 10.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = Vec::new();
        for _ in 0..6 {
            let t = s.next_trigger();
            let (n, rep) = tracking_step(&an, &params, &budget, &s, t, &h, &mut rng).unwrap();
            assert!(rep.grid.contains(n.position_estimate));
            assert!(n.coherence_time >= params.tti);
            assert!((n.trigger_time - (s.trigger_time + s.coherence_time)).abs() < 1e-15);
            seen.push(n.position_estimate);
            s = n;
        }
        // The grid is anchored at r̂ − ĉ rather than at r̂, so the estimate may
        // wander inside the decision cell but never leaves it.
        let a = crate::frontend::FocusingVector::new(an.geometry(), truth, DistanceModel::Fresnel);
        for p in &seen {
            let b = crate::frontend::FocusingVector::new(an.geometry(), *p, DistanceModel::Fresnel);
            assert!(a.correlation(&b) >= 0.97, "{p:?}");
        }
        assert_eq!(s.predicted_speed, params.u_threshold);
    }

    #[test]
    fn larger_kappa_shortens_coherence_time() {
        let an = an();
        let budget = noiseless();
        let p = PolarPosition::new(25.0, PI / 3.0).unwrap();
        let mut prev = f64::INFINITY;
        for k in [20.0, 40.0, 60.0, 80.0] {
            let params = TrackerParams { kappa: k, ..TrackerParams::default() };
            let s = initial_state(&an, &params, &budget, p, 10.0).unwrap();
            assert!(s.coherence_time < prev);
            prev = s.coherence_time;
        }
    }

    #[test]
    fn cold_start_locates_los_user() {
        let an = an();
        let g = an.geometry().clone();
        let params = TrackerParams::default();
        let budget = LinkBudget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let truth = PolarPosition::new(20.0, 1.0).unwrap();
        let ch = ChannelInstance::build(&g, truth, &[], false).unwrap();
        let (e, grid) = cold_start_estimate(&an, &params, &budget, &ch.h, &mut rng).unwrap();
        assert!(grid.contains(e.position));
        let a = crate::frontend::FocusingVector::new(&g, truth, DistanceModel::Fresnel);
        let b = crate::frontend::FocusingVector::new(&g, e.position, DistanceModel::Fresnel);
        assert!(a.correlation(&b) > 0.9, "cold start landed at {:?}", e.position);
    }

    #[test]
    fn rejects_bad_params() {
        let bad = TrackerParams { kappa: 99.5, ..TrackerParams::default() };
        assert!(bad.validate().is_err());
        let bad = TrackerParams { gamma: 1.0, ..TrackerParams::default() };
        assert!(bad.validate().is_err());
    }
}
