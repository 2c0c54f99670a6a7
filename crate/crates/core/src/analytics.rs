//! Closed-form beam correlation, focus windows and coherence-time analytics.
//!
//! All correlation functions return relative *power* gain in `[0, 1]`. The
//! gain convention only changes how a percentage `κ` is turned into a
//! threshold: under [`GainConvention::Power`] the amplitude-level functions
//! `I`, `K`, `L`, `M` are solved against `√(0.01κ)`, under
//! [`GainConvention::Amplitude`] against `0.01κ`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fresnel::fresnel;
use crate::geometry::{DmaGeometry, PolarPosition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainConvention {
    #[default]
    Power,
    Amplitude,
}

/// Which range-correlation form sets the depth-of-focus threshold `a_κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeForm {
    /// `K(x, φ)` at its worst case `|sin φ| = 1`, keeping `a_κ` φ-independent.
    #[default]
    FullK,
    /// `I(x)` alone.
    IOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisplacementMode {
    /// `min{Δ⁻_κ(r), 2r sin(Δ_κ(φ)/2)}`.
    #[default]
    Simplified,
    /// Simplified value refined by bisection towards the worst direction.
    Exact,
}

/// Range core `I(x) = |F(x(1+b)) − F(xb)| / x` with `F = C + jS`; `I(0) = 1`.
pub fn fresnel_core(x: f64, b: f64) -> f64 {
    let x = x.abs();
    if x < 1e-6 {
        return 1.0;
    }
    ((fresnel(x * (1.0 + b)) - fresnel(x * b)).norm() / x).min(1.0)
}

/// Fourth-order small-argument form of `|(C(x) + jS(x))/x|`.
pub fn fresnel_ratio_taylor(x: f64) -> f64 {
    1.0 - PI * PI / 90.0 * x.powi(4)
}

/// Normalised array factor `|sin x| / |n sin(x/n)|`.
pub fn array_factor(x: f64, n: usize) -> f64 {
    let den = n as f64 * (x / n as f64).sin();
    if den.abs() < 1e-12 {
        return 1.0;
    }
    (x.sin() / den).abs().min(1.0)
}

/// `|sin x / x|`.
pub fn sinc_abs(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        return 1.0;
    }
    (x.sin() / x).abs()
}

/// Amplitude level a solver targets for percentage `kappa`.
pub fn amplitude_level(kappa: f64, convention: GainConvention) -> f64 {
    match convention {
        GainConvention::Power => (0.01 * kappa).sqrt(),
        GainConvention::Amplitude => 0.01 * kappa,
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa < 100.0) {
        return domain(format!("percentage must lie in (0, 100), got {kappa}"));
    }
    Ok(())
}

/// Smallest positive `x` with `f(x) = level`, searched below the first local
/// minimum of `f` (located by a coarse scan up to `x_max`).
fn first_lobe_root(f: impl Fn(f64) -> f64, level: f64, step: f64, x_max: f64) -> Result<f64> {
    let mut x = step;
    let mut prev = f(0.0);
    let mut upper = None;
    while x <= x_max {
        let v = f(x);
        if v <= level {
            upper = Some(x);
            break;
        }
        if v > prev {
            break;
        }
        prev = v;
        x += step;
    }
    let Some(mut hi) = upper else {
        return domain(format!(
            "no crossing of level {level:.4} inside the main lobe"
        ));
    };
    let mut lo = hi - step;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Depth-of-focus threshold: smallest `x > 0` with `f(x) = level(κ)`, where
/// `f = I(x)` or `I(x)(1 − (π²/90)(x·s)⁴)` when a correction slope `s` is given.
pub fn solve_a_kappa(
    kappa: f64,
    b: f64,
    convention: GainConvention,
    correction: Option<f64>,
) -> Result<f64> {
    check_kappa(kappa)?;
    let s = correction.unwrap_or(0.0);
    let f = |x: f64| fresnel_core(x, b) * (1.0 - PI * PI / 90.0 * (x * s).powi(4)).max(0.0);
    first_lobe_root(f, amplitude_level(kappa, convention), 1e-3, 50.0)
}

/// First positive root of `|sin ζ / ζ| = level(κ)` on `(0, π]`.
pub fn solve_zeta_kappa(kappa: f64, convention: GainConvention) -> Result<f64> {
    check_kappa(kappa)?;
    let level = amplitude_level(kappa, convention);
    let (mut lo, mut hi) = (0.0, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sinc_abs(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mismatch tolerances around a focus point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocusWindow {
    pub delta_r_minus: f64,
    /// `f64::INFINITY` when `r ≥ r_lim`.
    pub delta_r_plus: f64,
    pub delta_phi: f64,
    pub r_lim: f64,
}

impl FocusWindow {
    pub fn plus_unbounded(&self) -> bool {
        self.delta_r_plus.is_infinite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstDirection {
    /// Radial part of the worst displacement, in `[-c, c]`.
    pub d_min: f64,
    pub p_min: PolarPosition,
    /// Predicted relative power gain at `p_min`.
    pub gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Thresholds {
    a: f64,
    zeta: f64,
}

fn kappa_key(kappa: f64) -> i64 {
    (kappa * 1e6).round() as i64
}

/// Percentages solved at construction unless others are requested.
pub const DEFAULT_KAPPAS: [f64; 10] = [20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 95.0, 99.0];

#[derive(Debug, Clone)]
pub struct BeamAnalytics {
    geom: DmaGeometry,
    b: f64,
    convention: GainConvention,
    range_form: RangeForm,
    cache: BTreeMap<i64, Thresholds>,
}

impl BeamAnalytics {
    pub fn new(geom: DmaGeometry) -> Result<Self> {
        Self::with_options(geom, GainConvention::Power, RangeForm::FullK, &DEFAULT_KAPPAS)
    }

    pub fn with_options(
        geom: DmaGeometry,
        convention: GainConvention,
        range_form: RangeForm,
        kappas: &[f64],
    ) -> Result<Self> {
        geom.validate()?;
        let b = geom.z0 / geom.strip_length();
        let mut me = Self {
            geom,
            b,
            convention,
            range_form,
            cache: BTreeMap::new(),
        };
        for &k in kappas {
            let t = me.solve_thresholds(k)?;
            me.cache.insert(kappa_key(k), t);
        }
        Ok(me)
    }

    /// Same analytics with extra percentages solved up front.
    pub fn with_kappas(mut self, kappas: &[f64]) -> Result<Self> {
        for &k in kappas {
            if !self.cache.contains_key(&kappa_key(k)) {
                let t = self.solve_thresholds(k)?;
                self.cache.insert(kappa_key(k), t);
            }
        }
        Ok(self)
    }

    fn solve_thresholds(&self, kappa: f64) -> Result<Thresholds> {
        let corr = match self.range_form {
            RangeForm::FullK => Some(self.correction_slope(1.0)),
            RangeForm::IOnly => None,
        };
        Ok(Thresholds {
            a: solve_a_kappa(kappa, self.b, self.convention, corr)?,
            zeta: solve_zeta_kappa(kappa, self.convention)?,
        })
    }

    fn thresholds(&self, kappa: f64) -> Result<Thresholds> {
        match self.cache.get(&kappa_key(kappa)) {
            Some(t) => Ok(*t),
            None => self.solve_thresholds(kappa),
        }
    }

    pub fn geometry(&self) -> &DmaGeometry {
        &self.geom
    }

    /// `b = z0 / ((N_e − 1) d_e)`.
    pub fn offset_ratio(&self) -> f64 {
        self.b
    }

    pub fn convention(&self) -> GainConvention {
        self.convention
    }

    pub fn range_form(&self) -> RangeForm {
        self.range_form
    }

    pub fn a_kappa(&self, kappa: f64) -> Result<f64> {
        Ok(self.thresholds(kappa)?.a)
    }

    pub fn zeta_kappa(&self, kappa: f64) -> Result<f64> {
        Ok(self.thresholds(kappa)?.zeta)
    }

    /// Slope of the fourth-order range correction at azimuth sine `sin_phi`.
    pub fn correction_slope(&self, sin_phi: f64) -> f64 {
        self.geom.strip_span() / (2.0 * self.geom.strip_length()) * sin_phi.abs()
    }

    /// `a(x) = √(2|x|/(r² + r x)) · (N_e − 1) d_e / √λ`.
    pub fn a_of(&self, dr: f64, r: f64) -> f64 {
        let l = self.geom.strip_length();
        (2.0 * dr.abs() / (r * r + r * dr)).sqrt() * l / self.geom.wavelength.sqrt()
    }

    /// `ζ(x) = N_m (π d_m / λ)(cos φ − cos(φ + x))`.
    pub fn zeta_of(&self, dphi: f64, phi: f64) -> f64 {
        let g = &self.geom;
        g.n_microstrips as f64 * PI * g.d_m / g.wavelength * (phi.cos() - (phi + dphi).cos())
    }

    /// Amplitude-level range factor `K(x, φ)`.
    pub fn k_factor(&self, x: f64, phi: f64) -> f64 {
        let t = x * self.correction_slope(phi.sin());
        fresnel_core(x, self.b) * (1.0 - PI * PI / 90.0 * t.powi(4)).max(0.0)
    }

    fn check_range(r: f64, dr: f64) -> Result<()> {
        if !(r > 0.0 && r.is_finite()) {
            return domain(format!("range must be positive, got {r}"));
        }
        if !(r + dr > 0.0) {
            return domain(format!("mismatched range r + Δr = {} is not positive", r + dr));
        }
        Ok(())
    }

    fn check_angle(phi: f64, dphi: f64) -> Result<()> {
        const SLACK: f64 = 1e-12;
        let t = phi + dphi;
        if !(-SLACK..=PI + SLACK).contains(&t) || !(0.0..=PI).contains(&phi) {
            return domain(format!("azimuths {phi} and {t} must lie in [0, π]"));
        }
        Ok(())
    }

    /// Range-only relative power gain `K²(a(Δr), φ)`.
    pub fn corr_range(&self, dr: f64, r: f64, phi: f64) -> Result<f64> {
        Self::check_range(r, dr)?;
        Ok(self.k_factor(self.a_of(dr, r), phi).powi(2))
    }

    /// Angle-only relative power gain `L²(ζ(Δφ))`.
    pub fn corr_angle(&self, dphi: f64, r: f64, phi: f64) -> Result<f64> {
        Self::check_range(r, 0.0)?;
        Self::check_angle(phi, dphi)?;
        Ok(array_factor(self.zeta_of(dphi, phi), self.geom.n_microstrips).powi(2))
    }

    /// Joint relative power gain `I²(a(Δr)) L²(ζ(Δφ))`.
    pub fn corr_joint(&self, dr: f64, dphi: f64, r: f64, phi: f64) -> Result<f64> {
        Self::check_range(r, dr)?;
        Self::check_angle(phi, dphi)?;
        Ok(self.joint_amplitude(dr, dphi, r, phi).powi(2))
    }

    fn joint_amplitude(&self, dr: f64, dphi: f64, r: f64, phi: f64) -> f64 {
        fresnel_core(self.a_of(dr, r), self.b)
            * array_factor(self.zeta_of(dphi, phi), self.geom.n_microstrips)
    }

    /// `r_lim,κ = 2 d_e² (N_e − 1)² / (λ a_κ²)`.
    pub fn r_lim(&self, kappa: f64) -> Result<f64> {
        let a = self.a_kappa(kappa)?;
        Ok(2.0 * self.geom.strip_length().powi(2) / (self.geom.wavelength * a * a))
    }

    /// `(Δ⁻_κ(r), Δ⁺_κ(r))`; `Δ⁺` is infinite at and beyond `r_lim`.
    pub fn delta_r(&self, r: f64, kappa: f64) -> Result<(f64, f64)> {
        if !(r > 0.0 && r.is_finite()) {
            return domain(format!("range must be positive, got {r}"));
        }
        let lim = self.r_lim(kappa)?;
        let minus = r * r / (lim + r);
        let plus = if lim - r > 0.0 {
            r * r / (lim - r)
        } else {
            f64::INFINITY
        };
        Ok((minus, plus))
    }

    /// Angular half-width `Δ_κ(φ)`; closed form away from the endfire
    /// directions, exact cosine inversion within 0.1 rad of them or when the
    /// closed form exceeds π/4.
    pub fn delta_phi(&self, phi: f64, kappa: f64) -> Result<f64> {
        if !(0.0..=PI).contains(&phi) {
            return domain(format!("azimuth must lie in [0, π], got {phi}"));
        }
        let g = &self.geom;
        let c = self.zeta_kappa(kappa)? * g.wavelength / (PI * g.n_microstrips as f64 * g.d_m);
        let closed = (c / phi.sin()).abs();
        if phi > 0.1 && phi < PI - 0.1 && closed <= FRAC_PI_4 {
            return Ok(closed);
        }
        Ok(angular_extent(phi, c))
    }

    pub fn focus_window(&self, r: f64, phi: f64, kappa: f64) -> Result<FocusWindow> {
        let (delta_r_minus, delta_r_plus) = self.delta_r(r, kappa)?;
        Ok(FocusWindow {
            delta_r_minus,
            delta_r_plus,
            delta_phi: self.delta_phi(phi, kappa)?,
            r_lim: self.r_lim(kappa)?,
        })
    }

    fn y_of(r: f64, c: f64, d: f64) -> f64 {
        let arg = 1.0 - (c * c - d * d) / (2.0 * r * r + 2.0 * r * d);
        arg.clamp(-1.0, 1.0).acos()
    }

    fn movement_amplitude(&self, r: f64, phi: f64, c: f64, d: f64, sign: f64) -> Option<f64> {
        let y = Self::y_of(r, c, d);
        let t = phi + sign * y;
        if !(0.0..=PI).contains(&t) {
            return None;
        }
        Some(self.joint_amplitude(d, sign * y, r, phi))
    }

    /// Displacement of length `c` that minimises the predicted gain.
    pub fn worst_direction(&self, r: f64, phi: f64, c: f64) -> Result<WorstDirection> {
        if !(c > 0.0 && c < r) {
            return domain(format!("displacement {c} must lie in (0, r = {r})"));
        }
        if !(0.0..=PI).contains(&phi) {
            return domain(format!("azimuth must lie in [0, π], got {phi}"));
        }
        const SCAN: usize = 2000;
        let eval = |d: f64, s: f64| self.movement_amplitude(r, phi, c, d, s).unwrap_or(f64::INFINITY);
        let mut best = (f64::INFINITY, 0.0, 1.0);
        for &s in &[1.0, -1.0] {
            for k in 0..=SCAN {
                let d = -c + 2.0 * c * k as f64 / SCAN as f64;
                let v = eval(d, s);
                if v < best.0 {
                    best = (v, d, s);
                }
            }
        }
        let (mut m, mut d, s) = best;
        if !m.is_finite() {
            // Both arcs leave [0, π]; only the purely radial moves remain.
            let inward = self.joint_amplitude(-c, 0.0, r, phi);
            let outward = self.joint_amplitude(c, 0.0, r, phi);
            let (m0, d0) = if inward <= outward { (inward, -c) } else { (outward, c) };
            return Ok(WorstDirection {
                d_min: d0,
                p_min: PolarPosition::new(r + d0, phi)?,
                gain: m0 * m0,
            });
        }
        // Golden-section refinement inside the bracketing scan cell.
        let h = 2.0 * c / SCAN as f64;
        let (mut lo, mut hi) = ((d - h).max(-c), (d + h).min(c));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let x1 = hi - g * (hi - lo);
            let x2 = lo + g * (hi - lo);
            if eval(x1, s) < eval(x2, s) {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        let mid = 0.5 * (lo + hi);
        let vm = eval(mid, s);
        if vm < m {
            m = vm;
            d = mid;
        }
        let y = Self::y_of(r, c, d);
        Ok(WorstDirection {
            d_min: d,
            p_min: PolarPosition::new(r + d, (phi + s * y).clamp(0.0, PI))?,
            gain: m * m,
        })
    }

    /// `c_κ = min{Δ⁻_κ(r), 2r sin(Δ_κ(φ)/2)}`.
    pub fn chord_depth_min(&self, r: f64, phi: f64, kappa: f64) -> Result<f64> {
        let w = self.focus_window(r, phi, kappa)?;
        Ok(w.delta_r_minus.min((2.0 * r * (0.5 * w.delta_phi).sin()).abs()))
    }

    /// Minimum displacement that costs a `(1 − κ%)` gain loss.
    pub fn min_displacement(&self, r: f64, phi: f64, kappa: f64, mode: DisplacementMode) -> Result<f64> {
        let c = self.chord_depth_min(r, phi, kappa)?;
        if mode == DisplacementMode::Simplified {
            return Ok(c);
        }
        if c >= r {
            return Ok(c);
        }
        let level = amplitude_level(kappa, self.convention);
        let worst = self.worst_direction(r, phi, c)?;
        if worst.gain.sqrt() >= level {
            return Ok(c);
        }
        let [x0, y0] = PolarPosition { r, phi }.to_cartesian();
        let [x1, y1] = worst.p_min.to_cartesian();
        let amp = |s: f64| {
            let (x, y) = (x0 + s * (x1 - x0), y0 + s * (y1 - y0));
            let q = PolarPosition::from_cartesian(x, y.max(0.0)).unwrap_or(PolarPosition { r, phi });
            self.joint_amplitude(q.r - r, q.phi - phi, r, phi)
        };
        const SCAN: usize = 400;
        let mut hi = 1.0;
        for k in 1..=SCAN {
            let s = k as f64 / SCAN as f64;
            if amp(s) <= level {
                hi = s;
                break;
            }
        }
        let mut lo = hi - 1.0 / SCAN as f64;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if amp(mid) > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let seg = (x1 - x0).hypot(y1 - y0);
        Ok((0.5 * (lo + hi) * seg).min(c))
    }

    /// `η_{κ,δ} = a_κ² / a_δ²`.
    pub fn eta(&self, kappa: f64, delta: f64) -> Result<f64> {
        Ok((self.a_kappa(kappa)? / self.a_kappa(delta)?).powi(2))
    }

    /// Upper bound on the number of radial samples of a grid of resolution
    /// `delta` over a disk of radius `c_κ` centred at range `r`.
    ///
    /// Uses `2 d_e²(N_e − 1)²/λ` in place of the Rayleigh distance.
    pub fn radial_sample_bound(&self, r: f64, kappa: f64, delta: f64) -> Result<f64> {
        if !(delta > kappa) {
            return domain(format!("resolution {delta} must exceed the QoS level {kappa}"));
        }
        let eta = self.eta(kappa, delta)?;
        let a_k = self.a_kappa(kappa)?;
        let rd = 2.0 * self.geom.strip_length().powi(2) / self.geom.wavelength;
        Ok(eta + r * a_k * a_k / (2.0 * rd) * (eta - 1.0) + 1.0)
    }
}

/// Smallest azimuth offset at which `|cos φ − cos(φ ± Δ)|` reaches `c`;
/// directions that hit the end of `[0, π]` first do not count. Returns π if
/// neither direction reaches `c`.
pub fn angular_extent(phi: f64, c: f64) -> f64 {
    let cos = phi.cos();
    let plus = (cos - c >= -1.0).then(|| (cos - c).acos() - phi);
    let minus = (cos + c <= 1.0).then(|| phi - (cos + c).acos());
    match (plus, minus) {
        (Some(p), Some(m)) => p.min(m),
        (Some(p), None) => p,
        (None, Some(m)) => m,
        (None, None) => PI,
    }
}

/// Forward step in azimuth that moves `cos φ` down by `c`, or `None` past π.
pub fn angular_step_forward(phi: f64, c: f64) -> Option<f64> {
    let t = phi.cos() - c;
    (t >= -1.0).then(|| t.acos() - phi)
}

/// Effective beam coherence time `c_min / u`.
pub fn coherence_time(c_min: f64, speed: f64) -> Result<f64> {
    if !(speed > 0.0 && speed.is_finite()) {
        return domain(format!("speed must be positive, got {speed}"));
    }
    Ok(c_min / speed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn analytics() -> BeamAnalytics {
        BeamAnalytics::new(DmaGeometry::default()).unwrap()
    }

    #[test]
    fn core_limits() {
        assert_eq!(fresnel_core(0.0, 1.0), 1.0);
        assert_abs_diff_eq!(fresnel_core(1e-4, 0.7), 1.0, epsilon = 1e-8);
        assert_eq!(array_factor(0.0, 10), 1.0);
        assert_abs_diff_eq!(sinc_abs(PI), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn a_kappa_values() {
        let p = GainConvention::Power;
        assert_abs_diff_eq!(solve_a_kappa(99.0, 0.0, p, None).unwrap(), 0.4626, epsilon = 5e-4);
        assert_abs_diff_eq!(solve_a_kappa(50.0, 0.0, p, None).unwrap(), 1.3183, epsilon = 5e-4);
        let b = 1.0 / 0.995;
        assert_abs_diff_eq!(solve_a_kappa(50.0, b, p, None).unwrap(), 0.7664, epsilon = 5e-4);
        assert_abs_diff_eq!(solve_a_kappa(99.0, b, p, None).unwrap(), 0.2705, epsilon = 5e-4);
        assert!(solve_a_kappa(99.99999, 0.0, p, None).unwrap() < 0.05);
        assert!(solve_a_kappa(0.0, 0.0, p, None).is_err());
        assert!(solve_a_kappa(100.0, 0.0, p, None).is_err());
    }

    #[test]
    fn zeta_values() {
        let p = GainConvention::Power;
        assert_abs_diff_eq!(solve_zeta_kappa(50.0, p).unwrap(), 1.3916, epsilon = 1e-3);
        assert_abs_diff_eq!(solve_zeta_kappa(99.0, p).unwrap(), 0.1735, epsilon = 1e-3);
        assert!(solve_zeta_kappa(99.9999, p).unwrap() < 0.01);
    }

    #[test]
    fn b_zero_analytics_for_depth_example() {
        let g = DmaGeometry { z0: 0.0, ..DmaGeometry::default() };
        let an = BeamAnalytics::with_options(g, GainConvention::Power, RangeForm::IOnly, &[99.0]).unwrap();
        let lim = an.r_lim(99.0).unwrap();
        assert!((lim / 927.9 - 1.0).abs() < 5e-3, "{lim}");
        let (m, p) = an.delta_r(30.0, 99.0).unwrap();
        assert_abs_diff_eq!(p, 1.00, epsilon = 0.01);
        assert_abs_diff_eq!(m, 0.94, epsilon = 0.01);
    }

    #[test]
    fn window_sentinel_and_asymmetry() {
        let an = analytics();
        let lim = an.r_lim(50.0).unwrap();
        assert!(an.focus_window(lim * 1.01, 1.0, 50.0).unwrap().plus_unbounded());
        let w = an.focus_window(40.0, 1.0, 50.0).unwrap();
        assert!(w.delta_r_plus > w.delta_r_minus);
        assert!(an.focus_window(0.0, 1.0, 50.0).is_err());
    }

    #[test]
    fn delta_phi_near_endfire_uses_inversion() {
        let an = analytics();
        let d0 = an.delta_phi(0.0, 50.0).unwrap();
        assert!(d0.is_finite() && d0 > 0.0 && d0 < PI);
        let mid = an.delta_phi(PI / 2.0, 50.0).unwrap();
        assert!(mid < d0);
    }

    #[test]
    fn worst_direction_dominates_endpoints() {
        let an = analytics();
        let (r, phi, c) = (20.0, 1.0, 1.0);
        let w = an.worst_direction(r, phi, c).unwrap();
        let at = |d: f64| {
            let y = BeamAnalytics::y_of(r, c, d);
            an.joint_amplitude(d, y, r, phi).powi(2).min(an.joint_amplitude(d, -y, r, phi).powi(2))
        };
        assert!(w.gain <= at(-c) + 1e-12);
        assert!(w.gain <= at(0.0) + 1e-12);
        assert!(an.worst_direction(5.0, 1.0, 5.0).is_err());
    }

    #[test]
    fn coherence_time_basics() {
        assert_abs_diff_eq!(coherence_time(1.0, 10.0).unwrap(), 0.1, epsilon = 1e-15);
        assert!(coherence_time(1.0, 0.0).is_err());
    }

    #[test]
    fn far_regime_thresholds() {
        let an = analytics();
        let eta = an.eta(50.0, 99.0).unwrap();
        assert_abs_diff_eq!(eta, 8.03, epsilon = 0.05);
        let ub = an.radial_sample_bound(10.0, 50.0, 99.0).unwrap();
        assert!((ub - (eta + 1.0)).abs() < 0.5);
        assert!(an.radial_sample_bound(10.0, 50.0, 40.0).is_err());
    }
}
