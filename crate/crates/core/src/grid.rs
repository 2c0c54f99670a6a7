//! Non-uniform polar search grids.
//!
//! Radial samples are laid out by double steps of `Δ⁺_δ`, which makes them
//! uniformly spaced in `1/r`; angular samples by double steps of `Δ_δ(φ)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analytics::BeamAnalytics;
use crate::error::{domain, Result};
use crate::geometry::PolarPosition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// Disk around a prior estimate, arcs pruned per ring.
    Disk,
    /// Whole-space sweep used when no prior is available.
    ColdStart,
    /// Rectangle in `(r, φ)` around a coarse estimate.
    Refinement,
    /// Fixed-step grid of the benchmark tracker.
    Uniform,
}

/// How the per-ring angle list is pruned against the disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcPruning {
    /// Keep angles whose window meets the disk's arc at the ring radius.
    #[default]
    AtRing,
    /// Keep angles whose window meets the disk anywhere in the ring's radial
    /// decision band.
    Band,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    pub r: f64,
    pub delta_r_minus: f64,
    /// Serialised as `null` when unbounded.
    pub delta_r_plus: f64,
    pub angles: Vec<f64>,
    /// Angular half-width of each sample's decision area.
    pub delta_phi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateGrid {
    pub kind: GridKind,
    pub center: PolarPosition,
    /// Search radius `ĉ` (infinite for a cold-start sweep).
    pub radius: f64,
    pub delta_percent: f64,
    pub rings: Vec<Ring>,
    /// First ring was raised to the Fresnel-distance floor.
    pub floor_clamped: bool,
    /// `ĉ ≥ 2r̂`: the angular half-span was clamped to π.
    pub arc_clamped: bool,
    /// An unbounded radial interval was cut at a finite limit.
    pub truncated: bool,
}

impl CoordinateGrid {
    /// Number of radial samples `S_r`.
    pub fn radial_count(&self) -> usize {
        self.rings.len()
    }

    pub fn sample_count(&self) -> usize {
        self.rings.iter().map(|r| r.angles.len()).sum()
    }

    pub fn radial_samples(&self) -> Vec<f64> {
        self.rings.iter().map(|r| r.r).collect()
    }

    /// All samples with their (ring, angle) indices, ring-major.
    pub fn samples(&self) -> impl Iterator<Item = (usize, usize, PolarPosition)> + '_ {
        self.rings.iter().enumerate().flat_map(|(s, ring)| {
            ring.angles
                .iter()
                .enumerate()
                .map(move |(i, &phi)| (s, i, PolarPosition { r: ring.r, phi }))
        })
    }

    pub fn contains(&self, p: PolarPosition) -> bool {
        self.samples().any(|(_, _, q)| q == p)
    }
}

fn check_percent(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 100.0) {
        return domain(format!("resolution must lie in (0, 100), got {delta}"));
    }
    Ok(())
}

/// In-plane radius of the Fresnel-distance floor.
pub fn radial_floor(an: &BeamAnalytics) -> f64 {
    let g = an.geometry();
    g.r_from_r0(g.field_regions().r_fresnel).max(1e-3)
}

/// Angular double-step sweep over `[lo, hi]` (clamped to `[0, π]`).
fn angle_sweep(an: &BeamAnalytics, lo: f64, hi: f64, delta: f64) -> Result<Vec<f64>> {
    let lo = lo.clamp(0.0, PI);
    let hi = hi.clamp(0.0, PI);
    let mut angles = vec![lo];
    let mut phi = lo;
    while phi + an.delta_phi(phi, delta)? <= hi {
        let temp = phi + an.delta_phi(phi, delta)?;
        if temp >= PI {
            break;
        }
        let next = (temp + an.delta_phi(temp, delta)?).min(PI);
        if next <= phi {
            break;
        }
        angles.push(next);
        phi = next;
        if next >= PI {
            break;
        }
    }
    Ok(angles)
}

/// Radial double-step sweep from `lo` while the current sample's `Δ⁺`
/// window ends at or before `hi`. Returns the samples and whether an
/// unbounded window stopped the sweep.
fn radial_sweep(an: &BeamAnalytics, lo: f64, hi: f64, delta: f64) -> Result<(Vec<f64>, bool)> {
    let mut rs = vec![lo];
    let mut r = lo;
    loop {
        let (_, plus) = an.delta_r(r, delta)?;
        if plus.is_infinite() {
            return Ok((rs, true));
        }
        if r + plus > hi {
            return Ok((rs, false));
        }
        let temp = r + plus;
        let (_, plus_t) = an.delta_r(temp, delta)?;
        if plus_t.is_infinite() {
            rs.push(temp);
            return Ok((rs, true));
        }
        r = temp + plus_t;
        rs.push(r);
    }
}

fn ring(an: &BeamAnalytics, r: f64, angles: Vec<f64>, delta: f64) -> Result<Ring> {
    let (m, p) = an.delta_r(r, delta)?;
    let delta_phi = angles
        .iter()
        .map(|&a| an.delta_phi(a, delta))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ring {
        r,
        delta_r_minus: m,
        delta_r_plus: p,
        angles,
        delta_phi,
    })
}

fn arc_half_span(r: f64, center_r: f64, c: f64) -> f64 {
    ((r * r + center_r * center_r - c * c) / (2.0 * r * center_r))
        .clamp(-1.0, 1.0)
        .acos()
}

/// Largest angular half-span of the disk over the radial band `[lo, hi]`.
fn band_half_span(lo: f64, hi: f64, center_r: f64, c: f64) -> f64 {
    // The arc is widest at the tangent radius √(r̂² − ĉ²), or at the band
    // edge closest to it.
    let tangent = (center_r * center_r - c * c).max(0.0).sqrt();
    let r = tangent.clamp(lo.max(1e-9), hi.max(1e-9));
    [lo.max(1e-9), r, hi.max(1e-9)]
        .into_iter()
        .filter(|&x| x.is_finite())
        .map(|x| {
            if (x - center_r).abs() > c {
                0.0
            } else {
                arc_half_span(x, center_r, c)
            }
        })
        .fold(0.0, f64::max)
}

/// Dynamic non-uniform grid over the disk of radius `c_hat` around `center`.
pub fn build_grid(
    an: &BeamAnalytics,
    center: PolarPosition,
    c_hat: f64,
    delta: f64,
) -> Result<CoordinateGrid> {
    build_grid_with(an, center, c_hat, delta, ArcPruning::AtRing)
}

pub fn build_grid_with(
    an: &BeamAnalytics,
    center: PolarPosition,
    c_hat: f64,
    delta: f64,
    pruning: ArcPruning,
) -> Result<CoordinateGrid> {
    if !(c_hat > 0.0 && c_hat.is_finite()) {
        return domain(format!("search radius must be positive, got {c_hat}"));
    }
    check_percent(delta)?;
    let (rc, pc) = (center.r, center.phi);
    let arg = (2.0 * rc * rc - c_hat * c_hat) / (2.0 * rc * rc);
    let arc_clamped = arg < -1.0;
    let span = arg.clamp(-1.0, 1.0).acos();
    let all_angles = angle_sweep(an, pc - span, pc + span, delta)?;

    let floor = radial_floor(an);
    let floor_clamped = rc - c_hat < floor;
    let first = (rc - c_hat).max(floor);
    let (radii, _) = radial_sweep(an, first, rc + c_hat, delta)?;

    let mut rings = Vec::with_capacity(radii.len());
    for r in radii {
        let (m, p) = an.delta_r(r, delta)?;
        let half = match pruning {
            ArcPruning::AtRing => {
                if (r - rc).abs() >= c_hat {
                    0.0
                } else {
                    arc_half_span(r, rc, c_hat)
                }
            }
            ArcPruning::Band => band_half_span(r - m, (r + p).min(rc + c_hat), rc, c_hat),
        };
        let mut kept = Vec::new();
        for &a in &all_angles {
            let w = an.delta_phi(a, delta)?;
            if a + w >= pc - half && a - w <= pc + half {
                kept.push(a);
            }
        }
        rings.push(ring(an, r, kept, delta)?);
    }
    Ok(CoordinateGrid {
        kind: GridKind::Disk,
        center,
        radius: c_hat,
        delta_percent: delta,
        rings,
        floor_clamped,
        arc_clamped,
        truncated: false,
    })
}

/// Azimuth sequence for the cold-start sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngularRecursion {
    /// `cos φ_{i+1} = cos φ_i − λ/(N_m d_m)`: adjacent samples sit on each
    /// other's array-factor nulls.
    #[default]
    NullToNull,
    /// `φ_{i+1} = φ_i + λ/(N_m d_m sin φ_i)`, first step null-to-null.
    Sine,
}

/// Whole-space sweep grid for `r0 ∈ [r_FD, r0_max]` at coarse resolution.
pub fn cold_start_grid(
    an: &BeamAnalytics,
    r0_max: f64,
    delta_bar: f64,
    recursion: AngularRecursion,
) -> Result<CoordinateGrid> {
    check_percent(delta_bar)?;
    let g = an.geometry();
    let fr = g.field_regions();
    if !(r0_max >= fr.r_fresnel) {
        return domain(format!(
            "cold-start range limit {r0_max} is below the Fresnel distance {}",
            fr.r_fresnel
        ));
    }
    let step = g.wavelength / (g.n_microstrips as f64 * g.d_m);
    let mut angles = Vec::new();
    match recursion {
        AngularRecursion::NullToNull => {
            let mut i = 0usize;
            loop {
                let c = 1.0 - i as f64 * step;
                if c < -1.0 - 1e-9 {
                    break;
                }
                angles.push(c.clamp(-1.0, 1.0).acos());
                i += 1;
            }
        }
        AngularRecursion::Sine => {
            angles.push(0.0);
            let mut phi = (1.0 - step).clamp(-1.0, 1.0).acos();
            while phi < PI {
                angles.push(phi);
                let s = phi.sin();
                if s < 1e-9 {
                    break;
                }
                phi += step / s;
            }
        }
    }
    let floor = radial_floor(an);
    let r_max = if r0_max.is_finite() {
        g.r_from_r0(r0_max)
    } else {
        f64::INFINITY
    };
    let (radii, _) = radial_sweep(an, floor, r_max, delta_bar)?;
    let rings = radii
        .into_iter()
        .map(|r| ring(an, r, angles.clone(), delta_bar))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoordinateGrid {
        kind: GridKind::ColdStart,
        center: PolarPosition { r: floor, phi: PI / 2.0 },
        radius: f64::INFINITY,
        delta_percent: delta_bar,
        rings,
        floor_clamped: true,
        arc_clamped: false,
        truncated: false,
    })
}

/// Fine grid over the coarse decision cell of `coarse` (no arc pruning).
pub fn refine_region(
    an: &BeamAnalytics,
    coarse: PolarPosition,
    delta_bar: f64,
    delta_prime: f64,
) -> Result<CoordinateGrid> {
    check_percent(delta_bar)?;
    check_percent(delta_prime)?;
    if delta_prime < delta_bar {
        return domain(format!(
            "refinement resolution {delta_prime} is below the coarse resolution {delta_bar}"
        ));
    }
    let w = an.focus_window(coarse.r, coarse.phi, delta_bar)?;
    let floor = radial_floor(an);
    let lo = (coarse.r - w.delta_r_minus).max(floor);
    let (hi, truncated) = if w.plus_unbounded() {
        (an.r_lim(delta_prime)?.max(coarse.r), true)
    } else {
        (coarse.r + w.delta_r_plus, false)
    };
    let angles = angle_sweep(an, coarse.phi - w.delta_phi, coarse.phi + w.delta_phi, delta_prime)?;
    let (radii, _) = radial_sweep(an, lo, hi, delta_prime)?;
    let rings = radii
        .into_iter()
        .map(|r| ring(an, r, angles.clone(), delta_prime))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoordinateGrid {
        kind: GridKind::Refinement,
        center: coarse,
        radius: w.delta_r_minus.max(w.delta_r_plus.min(hi - coarse.r)),
        delta_percent: delta_prime,
        rings,
        floor_clamped: coarse.r - w.delta_r_minus < floor,
        arc_clamped: false,
        truncated,
    })
}

/// Fixed-step grid over the disk: rings every `2·dr`, angles every `2·dphi`,
/// each sample owning a `±dr × ±dphi` cell.
pub fn uniform_grid(
    an: &BeamAnalytics,
    center: PolarPosition,
    c_hat: f64,
    dr: f64,
    dphi: f64,
) -> Result<CoordinateGrid> {
    if !(c_hat > 0.0 && dr > 0.0 && dphi > 0.0) {
        return domain("uniform grid needs positive radius and steps");
    }
    let (rc, pc) = (center.r, center.phi);
    let arg = (2.0 * rc * rc - c_hat * c_hat) / (2.0 * rc * rc);
    let span = arg.clamp(-1.0, 1.0).acos();
    let (a_lo, a_hi) = ((pc - span).max(0.0), (pc + span).min(PI));
    let mut all_angles = vec![a_lo];
    while all_angles.last().unwrap() + dphi < a_hi {
        let next = (all_angles.last().unwrap() + 2.0 * dphi).min(PI);
        all_angles.push(next);
        if next >= PI {
            break;
        }
    }
    let floor = radial_floor(an);
    let first = (rc - c_hat).max(floor);
    let mut radii = vec![first];
    while radii.last().unwrap() + dr < rc + c_hat {
        radii.push(radii.last().unwrap() + 2.0 * dr);
    }
    let rings = radii
        .into_iter()
        .map(|r| {
            let half = if (r - rc).abs() >= c_hat {
                0.0
            } else {
                arc_half_span(r, rc, c_hat)
            };
            let angles: Vec<f64> = all_angles
                .iter()
                .copied()
                .filter(|&a| a + dphi >= pc - half && a - dphi <= pc + half)
                .collect();
            Ring {
                r,
                delta_r_minus: dr,
                delta_r_plus: dr,
                delta_phi: vec![dphi; angles.len()],
                angles,
            }
        })
        .collect();
    Ok(CoordinateGrid {
        kind: GridKind::Uniform,
        center,
        radius: c_hat,
        delta_percent: f64::NAN,
        rings,
        floor_clamped: rc - c_hat < floor,
        arc_clamped: arg < -1.0,
        truncated: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DmaGeometry;

    fn an() -> BeamAnalytics {
        BeamAnalytics::new(DmaGeometry::default()).unwrap()
    }

    #[test]
    fn figure_style_grid() {
        let an = an();
        let g = build_grid(&an, PolarPosition::new(70.0, PI / 4.0).unwrap(), 30.0, 99.0).unwrap();
        let rs = g.radial_samples();
        assert!(rs.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(rs[0], 40.0);
        let gaps: Vec<f64> = rs.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(gaps.windows(2).all(|w| w[1] >= w[0]), "radial spacing widens with r");
        // angular spacing widens towards φ = 0
        let widest = g.rings.iter().max_by_key(|r| r.angles.len()).unwrap();
        let a = &widest.angles;
        assert!(a[1] - a[0] > a[a.len() - 1] - a[a.len() - 2]);
        assert!(!g.floor_clamped);
    }

    #[test]
    fn pruned_angles_stay_within_arc() {
        let an = an();
        let center = PolarPosition::new(30.0, 1.2).unwrap();
        let c = 4.0;
        let g = build_grid(&an, center, c, 99.0).unwrap();
        for ring in &g.rings {
            let half = if (ring.r - center.r).abs() >= c { 0.0 } else { arc_half_span(ring.r, center.r, c) };
            for (a, w) in ring.angles.iter().zip(&ring.delta_phi) {
                assert!(a + w >= center.phi - half - 1e-12);
                assert!(a - w <= center.phi + half + 1e-12);
            }
        }
    }

    #[test]
    fn floor_clamp_and_arc_clamp() {
        let an = an();
        let g = build_grid(&an, PolarPosition::new(7.0, 1.0).unwrap(), 15.0, 90.0).unwrap();
        assert!(g.floor_clamped);
        assert!(g.arc_clamped);
        assert!((g.rings[0].r - radial_floor(&an)).abs() < 1e-12);
    }

    #[test]
    fn grid_is_deterministic() {
        let an = an();
        let c = PolarPosition::new(22.0, 2.0).unwrap();
        assert_eq!(build_grid(&an, c, 3.0, 99.0).unwrap(), build_grid(&an, c, 3.0, 99.0).unwrap());
    }

    #[test]
    fn cold_start_terminates_for_unbounded_range() {
        let an = an();
        let g = cold_start_grid(&an, f64::INFINITY, 50.0, AngularRecursion::NullToNull).unwrap();
        assert!(g.radial_count() > 5 && g.radial_count() < 60);
        assert_eq!(g.rings[0].angles.len(), 11);
        let sine = cold_start_grid(&an, 100.0, 50.0, AngularRecursion::Sine).unwrap();
        assert!(sine.rings[0].angles.windows(2).all(|w| w[1] > w[0]));
        assert!(cold_start_grid(&an, 1.0, 50.0, AngularRecursion::NullToNull).is_err());
    }

    #[test]
    fn refinement_degenerates_at_equal_resolution() {
        let an = an();
        let p = PolarPosition::new(25.0, 1.3).unwrap();
        let g = refine_region(&an, p, 80.0, 80.0).unwrap();
        assert!(g.radial_count() <= 3);
        assert!(g.rings.iter().all(|r| r.angles.len() <= 3));
        assert!(refine_region(&an, p, 80.0, 70.0).is_err());
    }

    #[test]
    fn uniform_grid_is_larger_than_dynamic_one() {
        let an = an();
        let center = PolarPosition::new(30.0, 1.0).unwrap();
        let dynamic = build_grid(&an, center, 3.0, 99.0).unwrap();
        // worst-case (smallest) decision extents inside the disk
        let dr = an.delta_r(27.0, 99.0).unwrap().0;
        let dphi = an.delta_phi(PI / 2.0, 99.0).unwrap();
        let uniform = uniform_grid(&an, center, 3.0, dr, dphi).unwrap();
        assert!(uniform.sample_count() > dynamic.sample_count());
    }
}
