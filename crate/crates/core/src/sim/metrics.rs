//! Aggregate statistics over trial results.

use serde::{Deserialize, Serialize};

use super::campaign::{TrackerKind, TrialResult};

/// Linear-interpolation percentile of sorted data, `q ∈ [0, 100]`.
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = (q / 100.0).clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    percentile_sorted(&v, q)
}

/// Cross-trial statistics at one TTI index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainPoint {
    pub tti: usize,
    pub time_s: f64,
    pub trials: usize,
    pub mean: f64,
    pub p05: f64,
    pub p10: f64,
    pub p90: f64,
    pub p95: f64,
}

/// Relative gain over time across trials still running at each TTI.
pub fn gain_over_time(trials: &[TrialResult], tti: f64) -> Vec<GainPoint> {
    let ok: Vec<&TrialResult> = trials.iter().filter(|t| !t.failed()).collect();
    let len = ok.iter().map(|t| t.tti_gain.len()).max().unwrap_or(0);
    (0..len)
        .map(|k| {
            let mut v: Vec<f64> = ok
                .iter()
                .filter_map(|t| t.tti_gain.get(k).map(|&g| g as f64))
                .collect();
            v.sort_by(f64::total_cmp);
            GainPoint {
                tti: k,
                time_s: k as f64 * tti,
                trials: v.len(),
                mean: v.iter().sum::<f64>() / v.len() as f64,
                p05: percentile_sorted(&v, 5.0),
                p10: percentile_sorted(&v, 10.0),
                p90: percentile_sorted(&v, 90.0),
                p95: percentile_sorted(&v, 95.0),
            }
        })
        .collect()
}

/// Campaign-level figures of merit for one tracker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub tracker: TrackerKind,
    pub trials: usize,
    pub failed: usize,
    pub slots: usize,
    pub ttis: usize,
    /// Mean over all TTIs of all trials.
    pub mean_gain: f64,
    /// 5th percentile over all TTIs of all trials.
    pub pooled_p05: f64,
    /// Time average of the cross-trial mean curve.
    pub time_avg_mean: f64,
    /// Time average of the cross-trial 5th-percentile curve.
    pub time_avg_p05: f64,
    /// Mean interval between estimations, over slots.
    pub mean_coherence_time_s: f64,
    pub mean_position_error_m: f64,
    pub mean_radial_samples: f64,
    pub mean_grid_samples: f64,
    pub max_radial_samples: usize,
}

pub fn summarize(tracker: TrackerKind, trials: &[TrialResult], tti: f64) -> Summary {
    let ok: Vec<&TrialResult> = trials.iter().filter(|t| !t.failed()).collect();
    let mut pooled: Vec<f64> = ok.iter().flat_map(|t| t.tti_gain.iter().map(|&g| g as f64)).collect();
    pooled.sort_by(f64::total_cmp);
    let curve = gain_over_time(trials, tti);
    let slots: Vec<_> = ok.iter().flat_map(|t| t.slots.iter()).collect();
    let n_slots = slots.len().max(1) as f64;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    Summary {
        tracker,
        trials: trials.len(),
        failed: trials.len() - ok.len(),
        slots: slots.len(),
        ttis: pooled.len(),
        mean_gain: mean(&ok.iter().flat_map(|t| t.tti_gain.iter().map(|&g| g as f64)).collect::<Vec<_>>()),
        pooled_p05: percentile_sorted(&pooled, 5.0),
        time_avg_mean: mean(&curve.iter().map(|p| p.mean).collect::<Vec<_>>()),
        time_avg_p05: mean(&curve.iter().map(|p| p.p05).collect::<Vec<_>>()),
        mean_coherence_time_s: slots.iter().map(|s| s.coherence_time_s).sum::<f64>() / n_slots,
        mean_position_error_m: slots.iter().map(|s| s.position_error_m).sum::<f64>() / n_slots,
        mean_radial_samples: slots.iter().map(|s| s.radial_samples as f64).sum::<f64>() / n_slots,
        mean_grid_samples: slots.iter().map(|s| s.grid_samples as f64).sum::<f64>() / n_slots,
        max_radial_samples: slots.iter().map(|s| s.radial_samples).max().unwrap_or(0),
    }
}

/// Per-`r0` statistics on fixed-width bins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeBin {
    pub r0_lo_m: f64,
    pub r0_hi_m: f64,
    /// Time spent in the bin (s).
    pub time_s: f64,
    pub slots: usize,
    /// Estimations per second spent in the bin.
    pub slot_rate_hz: f64,
    pub mean_gain: f64,
    pub mean_position_error_m: f64,
    /// Moving average of the position error over `window` bins.
    pub position_error_ma_m: f64,
}

pub fn range_bins(trials: &[TrialResult], tti: f64, width: f64, r0_max: f64, window: usize) -> Vec<RangeBin> {
    let n = (r0_max / width).ceil().max(1.0) as usize;
    let mut gain = vec![0.0; n];
    let mut count = vec![0usize; n];
    let mut slots = vec![0usize; n];
    let mut err = vec![0.0; n];
    let bin = |r0: f64| ((r0 / width) as usize).min(n - 1);
    for t in trials.iter().filter(|t| !t.failed()) {
        for (&g, &r0) in t.tti_gain.iter().zip(&t.tti_r0) {
            let b = bin(r0 as f64);
            gain[b] += g as f64;
            count[b] += 1;
        }
        for s in &t.slots {
            let b = bin(s.true_r0_m);
            slots[b] += 1;
            err[b] += s.position_error_m;
        }
    }
    let mean_err: Vec<f64> = (0..n)
        .map(|b| if slots[b] > 0 { err[b] / slots[b] as f64 } else { f64::NAN })
        .collect();
    let half = window / 2;
    (0..n)
        .map(|b| {
            let lo = b.saturating_sub(half);
            let hi = (b + half).min(n - 1);
            let vals: Vec<f64> = (lo..=hi).map(|i| mean_err[i]).filter(|v| v.is_finite()).collect();
            let ma = if vals.is_empty() {
                f64::NAN
            } else {
                vals.iter().sum::<f64>() / vals.len() as f64
            };
            let time = count[b] as f64 * tti;
            RangeBin {
                r0_lo_m: b as f64 * width,
                r0_hi_m: (b + 1) as f64 * width,
                time_s: time,
                slots: slots[b],
                slot_rate_hz: if time > 0.0 { slots[b] as f64 / time } else { f64::NAN },
                mean_gain: if count[b] > 0 { gain[b] / count[b] as f64 } else { f64::NAN },
                mean_position_error_m: mean_err[b],
                position_error_ma_m: ma,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_endpoints() {
        let v = [3.0, 1.0, 2.0, 4.0];
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 100.0), 4.0);
        assert_eq!(percentile(&v, 50.0), 2.5);
        assert!(percentile(&[], 5.0).is_nan());
    }
}

/// Estimations per second of simulated time spent with `r0 ∈ [lo, hi)`.
pub fn slot_rate_between(trials: &[TrialResult], tti: f64, lo: f64, hi: f64) -> f64 {
    let mut ttis = 0usize;
    let mut slots = 0usize;
    for t in trials.iter().filter(|t| !t.failed()) {
        ttis += t.tti_r0.iter().filter(|&&r| (r as f64) >= lo && (r as f64) < hi).count();
        slots += t.slots.iter().filter(|s| s.true_r0_m >= lo && s.true_r0_m < hi).count();
    }
    if ttis == 0 {
        f64::NAN
    } else {
        slots as f64 / (ttis as f64 * tti)
    }
}

/// Mean TTI gain with `r0 ∈ [lo, hi)`.
pub fn mean_gain_between(trials: &[TrialResult], lo: f64, hi: f64) -> f64 {
    let v: Vec<f64> = trials
        .iter()
        .filter(|t| !t.failed())
        .flat_map(|t| t.tti_gain.iter().zip(&t.tti_r0))
        .filter(|(_, &r)| (r as f64) >= lo && (r as f64) < hi)
        .map(|(&g, _)| g as f64)
        .collect();
    v.iter().sum::<f64>() / v.len() as f64
}
