//! Random Bézier trajectories in the UE plane.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{DmaGeometry, PolarPosition};

/// How control-point radii are drawn inside the annulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialDensity {
    /// Uniform over the annulus area.
    Area,
    /// Uniform in the in-plane radius.
    Radius,
    /// Uniform in the logarithm of the in-plane radius.
    #[default]
    LogRadius,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryParams {
    pub control_points: usize,
    pub steps: usize,
    /// Target mean speed in m/s.
    pub mean_speed: f64,
    /// Annulus bounds on the distance to the array centre `r0` (m).
    pub r0_min: f64,
    pub r0_max: f64,
    /// Azimuth sector (rad).
    pub phi_min: f64,
    pub phi_max: f64,
    pub radial_density: RadialDensity,
    /// Redraw curves whose samples dip below `r0_min`.
    pub reject_inside: bool,
    pub max_attempts: usize,
}

impl TrajectoryParams {
    /// Six control points, 100 samples, 10 m/s, `r0 ∈ [r_FD, 50 m]` with
    /// log-uniform radii, `φ ∈ [10°, 170°]`.
    pub fn for_geometry(geom: &DmaGeometry) -> Self {
        use std::f64::consts::PI;
        Self {
            control_points: 6,
            steps: 100,
            mean_speed: 10.0,
            r0_min: geom.field_regions().r_fresnel,
            r0_max: 50.0,
            phi_min: PI / 18.0,
            phi_max: 17.0 * PI / 18.0,
            radial_density: RadialDensity::LogRadius,
            reject_inside: true,
            max_attempts: 1000,
        }
    }

    pub fn validate(&self, geom: &DmaGeometry) -> Result<()> {
        if self.control_points < 2 || self.steps < 2 {
            return domain("a trajectory needs at least two control points and two steps");
        }
        let h = geom.center_height();
        if !(self.r0_min > h && self.r0_max > self.r0_min) {
            return domain(format!(
                "degenerate annulus: r0 in [{}, {}] with array centre height {h}",
                self.r0_min, self.r0_max
            ));
        }
        if !(0.0 <= self.phi_min && self.phi_min < self.phi_max && self.phi_max <= std::f64::consts::PI) {
            return domain(format!("degenerate sector [{}, {}]", self.phi_min, self.phi_max));
        }
        if !(self.mean_speed > 0.0) {
            return domain(format!("mean speed must be positive, got {}", self.mean_speed));
        }
        Ok(())
    }
}

/// Point on the Bézier curve at parameter `t ∈ [0, 1]` by de Casteljau.
pub fn de_casteljau(control: &[[f64; 2]], t: f64) -> [f64; 2] {
    let mut pts = control.to_vec();
    for k in (1..pts.len()).rev() {
        for i in 0..k {
            pts[i] = [
                (1.0 - t) * pts[i][0] + t * pts[i + 1][0],
                (1.0 - t) * pts[i][1] + t * pts[i + 1][1],
            ];
        }
    }
    pts[0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub control_points: Vec<[f64; 2]>,
    /// Cartesian samples `[x, y]` in the UE plane.
    pub points: Vec<[f64; 2]>,
    pub times: Vec<f64>,
    pub mean_speed: f64,
    /// All control points coincide; the UE does not move.
    pub is_static: bool,
}

impl Trajectory {
    /// Samples the curve uniformly in its parameter and scales time so the
    /// polyline's mean speed equals `mean_speed`.
    pub fn from_control_points(control: Vec<[f64; 2]>, steps: usize, mean_speed: f64) -> Result<Self> {
        if control.len() < 2 || steps < 2 {
            return domain("a trajectory needs at least two control points and two steps");
        }
        let points: Vec<[f64; 2]> = (0..steps)
            .map(|k| de_casteljau(&control, k as f64 / (steps - 1) as f64))
            .collect();
        let length: f64 = points
            .windows(2)
            .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
            .sum();
        let is_static = length == 0.0;
        // a static UE keeps unit time steps
        let dt = if is_static {
            1.0
        } else {
            length / mean_speed / (steps - 1) as f64
        };
        let times = (0..steps).map(|k| k as f64 * dt).collect();
        Ok(Self {
            control_points: control,
            points,
            times,
            mean_speed: if is_static { 0.0 } else { mean_speed },
            is_static,
        })
    }

    pub fn duration(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
            .sum()
    }

    /// Cartesian position at time `t`, linear between samples, clamped to
    /// the ends.
    pub fn cartesian_at(&self, t: f64) -> [f64; 2] {
        let n = self.points.len();
        if t <= 0.0 || n == 1 {
            return self.points[0];
        }
        if t >= self.duration() {
            return self.points[n - 1];
        }
        let dt = self.times[1] - self.times[0];
        let k = ((t / dt) as usize).min(n - 2);
        let f = (t - self.times[k]) / dt;
        let (a, b) = (self.points[k], self.points[k + 1]);
        [a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]
    }

    /// Speed along the polyline segment containing `t`.
    pub fn speed_at(&self, t: f64) -> f64 {
        let n = self.points.len();
        if self.is_static || n < 2 {
            return 0.0;
        }
        let dt = self.times[1] - self.times[0];
        let k = ((t.max(0.0) / dt) as usize).min(n - 2);
        let (a, b) = (self.points[k], self.points[k + 1]);
        (b[0] - a[0]).hypot(b[1] - a[1]) / dt
    }

    pub fn position_at(&self, t: f64) -> PolarPosition {
        let [x, y] = self.cartesian_at(t);
        PolarPosition {
            r: x.hypot(y),
            phi: y.atan2(x).clamp(0.0, std::f64::consts::PI),
        }
    }
}

/// Draws control points uniformly (by area) in the annulus sector and
/// builds the trajectory, redrawing curves that leave the annulus' inner
/// edge when `reject_inside` is set.
pub fn generate_trajectory<R: Rng + ?Sized>(
    rng: &mut R,
    params: &TrajectoryParams,
    geom: &DmaGeometry,
) -> Result<Trajectory> {
    params.validate(geom)?;
    let r_min = geom.r_from_r0(params.r0_min);
    let r_max = geom.r_from_r0(params.r0_max);
    for _ in 0..params.max_attempts.max(1) {
        let control: Vec<[f64; 2]> = (0..params.control_points)
            .map(|_| {
                let r = match params.radial_density {
                    RadialDensity::Area => rng.random_range(r_min * r_min..=r_max * r_max).sqrt(),
                    RadialDensity::Radius => rng.random_range(r_min..=r_max),
                    RadialDensity::LogRadius => rng.random_range(r_min.ln()..=r_max.ln()).exp(),
                };
                let phi = rng.random_range(params.phi_min..=params.phi_max);
                [r * phi.cos(), r * phi.sin()]
            })
            .collect();
        let traj = Trajectory::from_control_points(control, params.steps, params.mean_speed)?;
        let inside = traj
            .points
            .iter()
            .any(|p| p[0].hypot(p[1]) < r_min || p[1] <= 0.0);
        if !(params.reject_inside && inside) {
            return Ok(traj);
        }
    }
    domain(format!(
        "no trajectory stayed outside r0 = {} after {} attempts",
        params.r0_min, params.max_attempts
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn linear_bezier_is_a_segment() {
        let t = Trajectory::from_control_points(vec![[0.0, 10.0], [4.0, 13.0]], 5, 2.0).unwrap();
        for (k, p) in t.points.iter().enumerate() {
            let s = k as f64 / 4.0;
            assert!((p[0] - 4.0 * s).abs() < 1e-12 && (p[1] - 10.0 - 3.0 * s).abs() < 1e-12);
        }
        assert!((t.duration() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn static_curve_is_flagged() {
        let t = Trajectory::from_control_points(vec![[1.0, 5.0]; 6], 10, 10.0).unwrap();
        assert!(t.is_static);
        assert_eq!(t.position_at(3.0), t.position_at(0.0));
    }

    #[test]
    fn mean_speed_is_exact() {
        let g = DmaGeometry::default();
        let p = TrajectoryParams::for_geometry(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let t = generate_trajectory(&mut rng, &p, &g).unwrap();
            assert!((t.length() / t.duration() - 10.0).abs() < 1e-9);
            let floor = g.r_from_r0(p.r0_min);
            assert!(t.points.iter().all(|q| q[0].hypot(q[1]) >= floor));
        }
    }

    #[test]
    fn interpolation_hits_samples() {
        let g = DmaGeometry::default();
        let p = TrajectoryParams::for_geometry(&g);
        let t = generate_trajectory(&mut ChaCha8Rng::seed_from_u64(2), &p, &g).unwrap();
        for k in [0, 17, 99] {
            let q = t.cartesian_at(t.times[k]);
            assert!((q[0] - t.points[k][0]).abs() < 1e-9 && (q[1] - t.points[k][1]).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_annulus_is_rejected() {
        let g = DmaGeometry::default();
        let p = TrajectoryParams { r0_max: 3.0, ..TrajectoryParams::for_geometry(&g) };
        assert!(generate_trajectory(&mut ChaCha8Rng::seed_from_u64(0), &p, &g).is_err());
    }
}
