//! Tabulated sweeps of the closed forms against brute-force correlations.

use serde::{Deserialize, Serialize};

use crate::analytics::{amplitude_level, solve_a_kappa, solve_zeta_kappa, BeamAnalytics, GainConvention};
use crate::error::Result;
use crate::frontend::FocusingVector;
use crate::geometry::{DistanceModel, PolarPosition};

/// Brute-force relative gain between two points with exact distances.
pub fn oracle_gain(an: &BeamAnalytics, p: PolarPosition, q: PolarPosition) -> f64 {
    let g = an.geometry();
    FocusingVector::new(g, p, DistanceModel::Exact).correlation(&FocusingVector::new(g, q, DistanceModel::Exact))
}

/// Geometric progression of `n ≥ 2` values from `lo` to `hi`.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepthRow {
    pub r0: f64,
    pub delta_minus: f64,
    /// Empty when the window is unbounded.
    pub delta_plus: Option<f64>,
    pub oracle_gain_minus: f64,
    pub oracle_gain_plus: Option<f64>,
}

pub fn depth_sweep(an: &BeamAnalytics, kappa: f64, phi: f64, r0s: &[f64]) -> Result<Vec<DepthRow>> {
    let g = an.geometry();
    r0s.iter()
        .map(|&r0| {
            let r = g.r_from_r0(r0);
            let (m, p) = an.delta_r(r, kappa)?;
            let focus = PolarPosition::new(r, phi)?;
            let plus = p.is_finite().then_some(p);
            Ok(DepthRow {
                r0,
                delta_minus: m,
                delta_plus: plus,
                oracle_gain_minus: oracle_gain(an, focus, PolarPosition::new(r - m, phi)?),
                oracle_gain_plus: match plus {
                    Some(p) => Some(oracle_gain(an, focus, PolarPosition::new(r + p, phi)?)),
                    None => None,
                },
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleRow {
    pub r0: f64,
    pub phi: f64,
    pub delta_phi: f64,
    pub closed_form_plus: f64,
    pub closed_form_minus: f64,
    pub oracle_plus: f64,
    pub oracle_minus: f64,
}

/// Angular window edges `φ ± Δ_κ(φ)` at fixed range.
pub fn angle_sweep(an: &BeamAnalytics, kappa: f64, phi: f64, r0s: &[f64]) -> Result<Vec<AngleRow>> {
    let g = an.geometry();
    let w = an.delta_phi(phi, kappa)?;
    r0s.iter()
        .map(|&r0| {
            let r = g.r_from_r0(r0);
            let focus = PolarPosition::new(r, phi)?;
            let hi = (phi + w).min(std::f64::consts::PI);
            let lo = (phi - w).max(0.0);
            Ok(AngleRow {
                r0,
                phi,
                delta_phi: w,
                closed_form_plus: an.corr_angle(hi - phi, r, phi)?,
                closed_form_minus: an.corr_angle(lo - phi, r, phi)?,
                oracle_plus: oracle_gain(an, focus, PolarPosition::new(r, hi)?),
                oracle_minus: oracle_gain(an, focus, PolarPosition::new(r, lo)?),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointRow {
    pub r0: f64,
    pub dr: f64,
    pub dphi: f64,
    pub closed_form: f64,
    pub oracle: f64,
}

/// The four window corners `(r ∓ Δ∓, φ ± Δ)`; the outward corners are
/// skipped when the window is unbounded.
pub fn joint_sweep(an: &BeamAnalytics, kappa: f64, phi: f64, r0s: &[f64]) -> Result<Vec<JointRow>> {
    let g = an.geometry();
    let mut rows = Vec::new();
    for &r0 in r0s {
        let r = g.r_from_r0(r0);
        let w = an.focus_window(r, phi, kappa)?;
        let focus = PolarPosition::new(r, phi)?;
        let mut drs = vec![-w.delta_r_minus];
        if !w.plus_unbounded() {
            drs.push(w.delta_r_plus);
        }
        for dr in drs {
            for s in [1.0, -1.0] {
                let q = (phi + s * w.delta_phi).clamp(0.0, std::f64::consts::PI);
                let dphi = q - phi;
                rows.push(JointRow {
                    r0,
                    dr,
                    dphi,
                    closed_form: an.corr_joint(dr, dphi, r, phi)?,
                    oracle: oracle_gain(an, focus, PolarPosition::new(r + dr, q)?),
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeProfileRow {
    pub dr: f64,
    pub closed_form: f64,
    pub oracle: f64,
}

/// Range-only correlation `|K|²` against the oracle along `r + dr`.
pub fn range_profile(an: &BeamAnalytics, r: f64, phi: f64, drs: &[f64]) -> Result<Vec<RangeProfileRow>> {
    let focus = PolarPosition::new(r, phi)?;
    drs.iter()
        .filter(|&&dr| r + dr > 0.0)
        .map(|&dr| {
            Ok(RangeProfileRow {
                dr,
                closed_form: an.corr_range(dr, r, phi)?,
                oracle: oracle_gain(an, focus, PolarPosition::new(r + dr, phi)?),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceRow {
    pub kappa: f64,
    pub r0: f64,
    pub phi: f64,
    pub c_kappa_m: f64,
    pub coherence_time_s: f64,
}

/// `c_κ` and `T_c = c_κ/u` over a range sweep.
pub fn coherence_table(an: &BeamAnalytics, kappas: &[f64], phi: f64, speed: f64, r0s: &[f64]) -> Result<Vec<CoherenceRow>> {
    let g = an.geometry();
    let mut rows = Vec::new();
    for &kappa in kappas {
        for &r0 in r0s {
            let r = g.r_from_r0(r0);
            let c = an.chord_depth_min(r, phi, kappa)?;
            rows.push(CoherenceRow {
                kappa,
                r0,
                phi,
                c_kappa_m: c,
                coherence_time_s: crate::analytics::coherence_time(c, speed)?,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub kappa: f64,
    pub convention: GainConvention,
    /// Offset ratio `b` the range core was solved at.
    pub offset_ratio: f64,
    /// Amplitude level the solvers target.
    pub level: f64,
    /// Range threshold from `I(x)` alone; empty when the level is never
    /// crossed inside the main lobe.
    pub a_kappa_core: Option<f64>,
    /// Range threshold with the worst-case fourth-order correction.
    pub a_kappa_full: Option<f64>,
    pub zeta_kappa: f64,
}

/// Thresholds under both gain conventions, at the array's own offset ratio
/// and at each extra ratio in `offsets` (e.g. `0` for a strip starting at
/// the projection of the user).
pub fn threshold_table(an: &BeamAnalytics, kappas: &[f64], offsets: &[f64]) -> Result<Vec<ThresholdRow>> {
    let slope = an.correction_slope(1.0);
    let mut bs = vec![an.offset_ratio()];
    bs.extend_from_slice(offsets);
    let mut rows = Vec::new();
    for convention in [GainConvention::Power, GainConvention::Amplitude] {
        for &b in &bs {
            for &kappa in kappas {
                rows.push(ThresholdRow {
                    kappa,
                    convention,
                    offset_ratio: b,
                    level: amplitude_level(kappa, convention),
                    a_kappa_core: solve_a_kappa(kappa, b, convention, None).ok(),
                    a_kappa_full: solve_a_kappa(kappa, b, convention, Some(slope)).ok(),
                    zeta_kappa: solve_zeta_kappa(kappa, convention)?,
                });
            }
        }
    }
    Ok(rows)
}
