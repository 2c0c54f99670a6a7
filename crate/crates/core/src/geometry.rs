//! DMA layout, BS–UE distances and the characteristic field-region radii.
//!
//! Frame: the DMA microstrips run along `z`, stacked along `x`; element
//! `(i, n)` sits at `[i_x d_m, 0, n d_e + z0]` with `i_x = i - (N_m - 1)/2`.
//! The UE moves in the `z = 0` plane at `[r cos φ, r sin φ, 0]`, `φ ∈ [0, π]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Where each microstrip is fed; sets the intra-strip path length `ρ_{i,n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedPoint {
    /// Port at element 0: `ρ = n d_e`.
    #[default]
    Start,
    /// Port at the strip midpoint.
    Center,
    /// Port at the last element.
    End,
}

/// Constant term of the second-order distance expansion.
///
/// The expansion of the exact distance produces `z0²/(2r)`; the printed
/// form in the literature carries `z0/(2r)`. Both are global phases for a
/// fixed `r`, so correlations are unaffected, but per-element distance
/// errors differ whenever `|z0| != 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionOffset {
    #[default]
    HeightSquared,
    AsPrinted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmaGeometry {
    pub n_microstrips: usize,
    pub n_elements_per_strip: usize,
    /// Inter-element spacing along `z` (m).
    pub d_e: f64,
    /// Inter-microstrip spacing along `x` (m).
    pub d_m: f64,
    pub wavelength: f64,
    /// Height of element 0 above the UE plane (m). May be negative to move
    /// the origin onto the aperture.
    pub z0: f64,
    pub dielectric_eps: f64,
    pub feed: FeedPoint,
    pub expansion_offset: ExpansionOffset,
}

impl Default for DmaGeometry {
    /// 10 × 200 elements at half-wavelength pitch, 30 GHz, mounted 1 m up.
    fn default() -> Self {
        Self {
            n_microstrips: 10,
            n_elements_per_strip: 200,
            d_e: 0.005,
            d_m: 0.005,
            wavelength: 0.01,
            z0: 1.0,
            dielectric_eps: 1.0,
            feed: FeedPoint::Start,
            expansion_offset: ExpansionOffset::HeightSquared,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPosition {
    pub r: f64,
    pub phi: f64,
}

impl PolarPosition {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return domain(format!("radius must be positive and finite, got {r}"));
        }
        if !(0.0..=PI).contains(&phi) {
            return domain(format!("azimuth must lie in [0, π], got {phi}"));
        }
        Ok(Self { r, phi })
    }

    pub fn to_cartesian(self) -> [f64; 2] {
        let (s, c) = self.phi.sin_cos();
        [self.r * c, self.r * s]
    }

    /// Inverse of [`to_cartesian`](Self::to_cartesian); `y` must be non-negative.
    pub fn from_cartesian(x: f64, y: f64) -> Result<Self> {
        if y < 0.0 {
            return domain(format!("point ({x}, {y}) lies behind the array (y < 0)"));
        }
        let r = x.hypot(y);
        Self::new(r, y.atan2(x).clamp(0.0, PI))
    }

    /// In-plane Euclidean distance between two UE positions.
    pub fn distance_to(self, other: PolarPosition) -> f64 {
        let [x0, y0] = self.to_cartesian();
        let [x1, y1] = other.to_cartesian();
        (x1 - x0).hypot(y1 - y0)
    }
}

/// Characteristic distances of the aperture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldRegions {
    /// Fresnel distance `0.62 √(D³/λ)`.
    pub r_fresnel: f64,
    /// Rayleigh distance `2D²/λ`.
    pub r_rayleigh: f64,
    /// In-plane radius beyond which the second-order expansion keeps the
    /// per-element phase error under π/8 at broadside.
    pub r_approx: f64,
    /// `r_approx` measured from the aperture centre.
    pub r0_approx: f64,
    pub l_z0: f64,
    pub aperture: f64,
}

impl DmaGeometry {
    pub fn validate(&self) -> Result<()> {
        if self.n_microstrips == 0 || self.n_elements_per_strip == 0 {
            return domain("element counts must be at least 1");
        }
        for (name, v) in [
            ("d_e", self.d_e),
            ("d_m", self.d_m),
            ("wavelength", self.wavelength),
            ("dielectric_eps", self.dielectric_eps),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return domain(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !self.z0.is_finite() {
            return domain("z0 must be finite");
        }
        Ok(())
    }

    pub fn n_elements(&self) -> usize {
        self.n_microstrips * self.n_elements_per_strip
    }

    /// Free-space wavenumber `2π/λ`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    /// Microstrip wavenumber `β = 2π √ε / λ`.
    pub fn waveguide_wavenumber(&self) -> f64 {
        self.wavenumber() * self.dielectric_eps.sqrt()
    }

    /// Strip length `(N_e - 1) d_e`.
    pub fn strip_length(&self) -> f64 {
        (self.n_elements_per_strip as f64 - 1.0) * self.d_e
    }

    /// Lateral extent `(N_m - 1) d_m`.
    pub fn strip_span(&self) -> f64 {
        (self.n_microstrips as f64 - 1.0) * self.d_m
    }

    pub fn aperture(&self) -> f64 {
        self.strip_length().hypot(self.strip_span())
    }

    /// Height of the aperture centre above the UE plane.
    pub fn center_height(&self) -> f64 {
        self.z0 + 0.5 * self.strip_length()
    }

    /// Distance from the aperture centre for in-plane radius `r`.
    pub fn r0_from_r(&self, r: f64) -> f64 {
        r.hypot(self.center_height())
    }

    /// In-plane radius for a centre distance `r0`; zero when `r0` is below the
    /// mount height.
    pub fn r_from_r0(&self, r0: f64) -> f64 {
        let h = self.center_height();
        (r0 * r0 - h * h).max(0.0).sqrt()
    }

    /// Signed lateral index `i - (N_m - 1)/2`.
    pub fn lateral_index(&self, i: usize) -> f64 {
        i as f64 - 0.5 * (self.n_microstrips as f64 - 1.0)
    }

    /// Intra-strip path length from the feed to element `n`.
    pub fn feed_distance(&self, n: usize) -> f64 {
        let last = self.n_elements_per_strip as f64 - 1.0;
        let n = n as f64;
        match self.feed {
            FeedPoint::Start => n * self.d_e,
            FeedPoint::Center => (n - 0.5 * last).abs() * self.d_e,
            FeedPoint::End => (last - n) * self.d_e,
        }
    }

    /// Flattened element index, strip-major.
    pub fn flat_index(&self, i: usize, n: usize) -> usize {
        i * self.n_elements_per_strip + n
    }

    fn check_indices(&self, i: usize, n: usize) -> Result<()> {
        if i >= self.n_microstrips || n >= self.n_elements_per_strip {
            return domain(format!(
                "element ({i}, {n}) outside {}×{} array",
                self.n_microstrips, self.n_elements_per_strip
            ));
        }
        Ok(())
    }

    pub fn element_position(&self, i: usize, n: usize) -> Result<[f64; 3]> {
        self.check_indices(i, n)?;
        Ok(self.element_position_unchecked(i, n))
    }

    pub(crate) fn element_position_unchecked(&self, i: usize, n: usize) -> [f64; 3] {
        [
            self.lateral_index(i) * self.d_m,
            0.0,
            n as f64 * self.d_e + self.z0,
        ]
    }

    /// Euclidean element–UE distance.
    pub fn exact_distance(&self, i: usize, n: usize, p: PolarPosition) -> Result<f64> {
        self.check_indices(i, n)?;
        Ok(self.exact_distance_unchecked(i, n, p))
    }

    pub(crate) fn exact_distance_unchecked(&self, i: usize, n: usize, p: PolarPosition) -> f64 {
        let [ex, _, ez] = self.element_position_unchecked(i, n);
        let [ux, uy] = p.to_cartesian();
        let dx = ux - ex;
        (dx * dx + uy * uy + ez * ez).sqrt()
    }

    /// Second-order (Fresnel) expansion of [`exact_distance`](Self::exact_distance).
    pub fn fresnel_distance(&self, i: usize, n: usize, p: PolarPosition) -> Result<f64> {
        self.check_indices(i, n)?;
        Ok(self.fresnel_distance_unchecked(i, n, p))
    }

    pub(crate) fn fresnel_distance_unchecked(&self, i: usize, n: usize, p: PolarPosition) -> f64 {
        let r = p.r;
        let cos = p.phi.cos();
        let x = self.lateral_index(i) * self.d_m;
        let z = n as f64 * self.d_e;
        r + x * x * (1.0 - cos * cos) / (2.0 * r) - cos * x
            + z * z / (2.0 * r)
            + self.z0 * z / r
            + self.expansion_constant() / (2.0 * r)
    }

    fn expansion_constant(&self) -> f64 {
        match self.expansion_offset {
            ExpansionOffset::HeightSquared => self.z0 * self.z0,
            ExpansionOffset::AsPrinted => self.z0,
        }
    }

    /// All element distances in flat order, exact or expanded.
    pub fn distances(&self, p: PolarPosition, model: DistanceModel) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_elements());
        match model {
            DistanceModel::Exact => {
                let [ux, uy] = p.to_cartesian();
                for i in 0..self.n_microstrips {
                    let dx = ux - self.lateral_index(i) * self.d_m;
                    let rho2 = dx * dx + uy * uy;
                    out.extend((0..self.n_elements_per_strip).map(|n| {
                        let ez = n as f64 * self.d_e + self.z0;
                        (rho2 + ez * ez).sqrt()
                    }));
                }
            }
            DistanceModel::Fresnel => {
                for i in 0..self.n_microstrips {
                    out.extend(
                        (0..self.n_elements_per_strip)
                            .map(|n| self.fresnel_distance_unchecked(i, n, p)),
                    );
                }
            }
        }
        out
    }

    pub fn field_regions(&self) -> FieldRegions {
        let lam = self.wavelength;
        let l_z0 = ((self.strip_length() + self.z0).powi(2) + 0.25 * self.strip_span().powi(2))
            .sqrt();
        let r_approx = (2.0 * l_z0.powi(4) / lam).cbrt();
        let d = self.aperture();
        FieldRegions {
            r_fresnel: 0.62 * (d.powi(3) / lam).sqrt(),
            r_rayleigh: 2.0 * d * d / lam,
            r_approx,
            r0_approx: self.r0_from_r(r_approx),
            l_z0,
            aperture: d,
        }
    }
}

/// Which distance law builds a focusing vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceModel {
    #[default]
    Exact,
    Fresnel,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn element_positions() {
        let g = DmaGeometry::default();
        assert_relative_eq!(g.element_position(0, 0).unwrap()[0], -0.0225, epsilon = 1e-12);
        assert_eq!(g.element_position(0, 0).unwrap()[2], 1.0);
        assert_relative_eq!(g.element_position(9, 0).unwrap()[0], 0.0225, epsilon = 1e-12);
        let p = g.element_position(4, 199).unwrap();
        assert_relative_eq!(p[0], -0.0025, epsilon = 1e-12);
        assert_relative_eq!(p[2], 1.995, epsilon = 1e-12);
        assert!(g.element_position(10, 0).is_err());
        assert!(g.element_position(0, 200).is_err());
    }

    #[test]
    fn exact_distance_examples() {
        let g = DmaGeometry::default();
        let p = PolarPosition::new(10.0, PI / 2.0).unwrap();
        let d = g.exact_distance(0, 0, p).unwrap();
        assert_relative_eq!(d, (0.0225f64.powi(2) + 101.0).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(d, 10.0499, epsilon = 1e-4);
        for i in 0..g.n_microstrips {
            let mirror = g.n_microstrips - 1 - i;
            assert_relative_eq!(
                g.exact_distance(i, 17, p).unwrap(),
                g.exact_distance(mirror, 17, p).unwrap(),
                epsilon = 1e-12
            );
        }
        assert!(g.exact_distance(0, 0, p).unwrap() >= p.r);
    }

    #[test]
    fn fresnel_distance_at_array_origin() {
        let g = DmaGeometry {
            n_microstrips: 1,
            z0: 2.5,
            ..DmaGeometry::default()
        };
        let p = PolarPosition::new(40.0, 1.1).unwrap();
        let d = g.fresnel_distance(0, 0, p).unwrap();
        assert_relative_eq!(d, 40.0 + 2.5 * 2.5 / 80.0, epsilon = 1e-12);
        let printed = DmaGeometry {
            expansion_offset: ExpansionOffset::AsPrinted,
            ..g.clone()
        };
        assert_relative_eq!(
            printed.fresnel_distance(0, 0, p).unwrap(),
            40.0 + 2.5 / 80.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn fresnel_distance_close_to_exact_at_thirty_metres() {
        let g = DmaGeometry::default();
        let p = PolarPosition::new(30.0, PI / 4.0).unwrap();
        let exact = g.distances(p, DistanceModel::Exact);
        let fres = g.distances(p, DistanceModel::Fresnel);
        let worst = exact
            .iter()
            .zip(&fres)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < g.wavelength / 16.0, "worst {worst}");
    }

    #[test]
    fn field_region_values() {
        let g = DmaGeometry::default();
        let f = g.field_regions();
        assert_relative_eq!(f.l_z0, 1.99513, epsilon = 1e-5);
        assert_relative_eq!(f.r_approx, 14.69, epsilon = 5e-3);
        assert_relative_eq!(f.aperture, 0.995, epsilon = 2e-3);
        assert_relative_eq!(f.r_rayleigh, 198.0, max_relative = 3e-3);
        assert!(f.r_fresnel < f.r_rayleigh);
        let h = g.z0 + 0.5 * g.strip_length();
        assert_relative_eq!(f.r0_approx, (f.r_approx.powi(2) + h * h).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn centred_origin_matches_classic_bound() {
        let mut g = DmaGeometry::default();
        g.z0 = -0.5 * g.strip_length();
        let f = g.field_regions();
        let d = f.aperture;
        let classic = 0.5 * d * (d / g.wavelength).cbrt();
        assert_relative_eq!(f.r_approx, classic, max_relative = 0.05);
    }

    #[test]
    fn field_regions_grow_with_strip_length() {
        let base = DmaGeometry::default().field_regions();
        let longer = DmaGeometry {
            n_elements_per_strip: 220,
            ..DmaGeometry::default()
        }
        .field_regions();
        assert!(longer.r_fresnel > base.r_fresnel);
        assert!(longer.r_rayleigh > base.r_rayleigh);
        assert!(longer.r_approx > base.r_approx);
    }

    #[test]
    fn polar_validation_and_cartesian_round_trip() {
        assert!(PolarPosition::new(0.0, 1.0).is_err());
        assert!(PolarPosition::new(1.0, -0.1).is_err());
        assert!(PolarPosition::new(1.0, 3.2).is_err());
        let p = PolarPosition::new(12.0, 2.0).unwrap();
        let [x, y] = p.to_cartesian();
        let q = PolarPosition::from_cartesian(x, y).unwrap();
        assert_relative_eq!(p.r, q.r, epsilon = 1e-12);
        assert_relative_eq!(p.phi, q.phi, epsilon = 1e-12);
        assert!(PolarPosition::from_cartesian(1.0, -1.0).is_err());
    }
}
