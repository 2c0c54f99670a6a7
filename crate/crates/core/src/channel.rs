//! Line-of-sight and single-bounce channels, link budget, and the noisy
//! downlink/uplink observation models.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::frontend::{inner, AnalogConfig, FocusingVector, HybridConfig};
use crate::geometry::{DistanceModel, DmaGeometry, PolarPosition};

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * (w * 1e3).log10()
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    /// BS transmit power `P_b` (W).
    pub bs_power: f64,
    /// UE pilot power `P_u` (W).
    pub ue_power: f64,
    /// Noise power `σ²` (W), same at both ends.
    pub noise_power: f64,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self::from_dbm(30.0, 5.0, -94.0).expect("default budget is valid")
    }
}

impl LinkBudget {
    pub fn new(bs_power: f64, ue_power: f64, noise_power: f64) -> Result<Self> {
        for (name, v) in [("P_b", bs_power), ("P_u", ue_power)] {
            if !(v > 0.0 && v.is_finite()) {
                return domain(format!("{name} must be positive, got {v} W"));
            }
        }
        // zero noise gives noiseless scenarios
        if !(noise_power >= 0.0 && noise_power.is_finite()) {
            return domain(format!("noise must be non-negative, got {noise_power} W"));
        }
        Ok(Self {
            bs_power,
            ue_power,
            noise_power,
        })
    }

    pub fn from_dbm(bs_dbm: f64, ue_dbm: f64, noise_dbm: f64) -> Result<Self> {
        Self::new(dbm_to_watts(bs_dbm), dbm_to_watts(ue_dbm), dbm_to_watts(noise_dbm))
    }

    /// Pre-combining uplink SNR `P_u·PL/σ²` at centre distance `r0`.
    pub fn uplink_snr(&self, wavelength: f64, r0: f64) -> f64 {
        self.ue_power * free_space_pathloss(wavelength, r0) / self.noise_power
    }
}

/// `(λ/(4π d))²`.
pub fn free_space_pathloss(wavelength: f64, d: f64) -> f64 {
    (wavelength / (4.0 * PI * d)).powi(2)
}

/// Pathloss to the aperture centre.
pub fn pathloss(geom: &DmaGeometry, p: PolarPosition) -> f64 {
    free_space_pathloss(geom.wavelength, geom.r0_from_r(p.r))
}

/// LoS channel; with `constant_pathloss` the amplitude is the centre value.
pub fn los_channel(geom: &DmaGeometry, p: PolarPosition, constant_pathloss: bool) -> Vec<Complex64> {
    let k = geom.wavenumber();
    let lam = geom.wavelength;
    if constant_pathloss {
        let amp = pathloss(geom, p).sqrt();
        FocusingVector::new(geom, p, DistanceModel::Exact)
            .as_slice()
            .iter()
            .map(|a| a * amp)
            .collect()
    } else {
        geom.distances(p, DistanceModel::Exact)
            .into_iter()
            .map(|d| Complex64::from_polar(lam / (4.0 * PI * d), -k * d))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scatterer {
    pub position: PolarPosition,
    /// Reflection phase `w`, uniform on (−π, π].
    pub reflection_phase: f64,
    /// UE–scatterer distance `d_ℓ` for the UE position it was evaluated at.
    pub ue_distance: f64,
}

impl Scatterer {
    pub fn new(position: PolarPosition, reflection_phase: f64, ue: PolarPosition) -> Result<Self> {
        let d = position.distance_to(ue);
        if !(d > 0.0) {
            return domain("scatterer coincides with the UE");
        }
        Ok(Self {
            position,
            reflection_phase,
            ue_distance: d,
        })
    }

    /// Same scatterer seen from another UE position.
    pub fn relocated(&self, ue: PolarPosition) -> Result<Self> {
        Self::new(self.position, self.reflection_phase, ue)
    }

    /// Linear-reflection coefficient `g_ℓ`.
    pub fn coefficient(&self, wavelength: f64) -> Complex64 {
        let k = 2.0 * PI / wavelength;
        let d = self.ue_distance;
        Complex64::from_polar(wavelength / (4.0 * PI * d), -self.reflection_phase - k * d)
    }

    /// Single-bounce channel contribution; BS-side distances are exact.
    pub fn nlos_channel(&self, geom: &DmaGeometry) -> Vec<Complex64> {
        let g = self.coefficient(geom.wavelength);
        let k = geom.wavenumber();
        let lam = geom.wavelength;
        geom.distances(self.position, DistanceModel::Exact)
            .into_iter()
            .map(|d| g * Complex64::from_polar(lam / (4.0 * PI * d), -k * d))
            .collect()
    }
}

/// Disk in the UE plane, used as the scatterer drop area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: PolarPosition,
    pub radius: f64,
}

impl Disk {
    /// Uniform point of the disk in front of the array (`y ≥ 0`).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PolarPosition> {
        if !(self.radius > 0.0) {
            return domain(format!("disk radius must be positive, got {}", self.radius));
        }
        let [cx, cy] = self.center.to_cartesian();
        for _ in 0..1000 {
            let rho = self.radius * rng.random::<f64>().sqrt();
            let t = 2.0 * PI * rng.random::<f64>();
            let (x, y) = (cx + rho * t.cos(), cy + rho * t.sin());
            if y > 0.0 && x.hypot(y) > 0.0 {
                return PolarPosition::from_cartesian(x, y);
            }
        }
        domain("disk lies entirely behind the array")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelInstance {
    pub h: Vec<Complex64>,
    pub los: Vec<Complex64>,
    /// `(λ/(4π r0))²` at the UE.
    pub pathloss_los: f64,
    pub scatterers: Vec<Scatterer>,
}

impl ChannelInstance {
    /// Channel at `ue` with the given scatterers (re-evaluated for `ue`).
    pub fn build(
        geom: &DmaGeometry,
        ue: PolarPosition,
        scatterers: &[Scatterer],
        constant_pathloss: bool,
    ) -> Result<Self> {
        let los = los_channel(geom, ue, constant_pathloss);
        let mut h = los.clone();
        let mut placed = Vec::with_capacity(scatterers.len());
        for s in scatterers {
            let s = s.relocated(ue)?;
            for (hi, ni) in h.iter_mut().zip(s.nlos_channel(geom)) {
                *hi += ni;
            }
            placed.push(s);
        }
        Ok(Self {
            h,
            los,
            pathloss_los: pathloss(geom, ue),
            scatterers: placed,
        })
    }
}

/// Draws `count` scatterers uniformly in `area` and builds the channel.
pub fn sample_channel<R: Rng + ?Sized>(
    geom: &DmaGeometry,
    ue: PolarPosition,
    count: usize,
    area: Disk,
    constant_pathloss: bool,
    rng: &mut R,
) -> Result<ChannelInstance> {
    let scatterers = sample_scatterers(ue, count, area, rng)?;
    ChannelInstance::build(geom, ue, &scatterers, constant_pathloss)
}

pub fn sample_scatterers<R: Rng + ?Sized>(
    ue: PolarPosition,
    count: usize,
    area: Disk,
    rng: &mut R,
) -> Result<Vec<Scatterer>> {
    if count > 0 && !(area.radius > 0.0) {
        return domain(format!("scatterer disk radius must be positive, got {}", area.radius));
    }
    (0..count)
        .map(|_| {
            let pos = area.sample(rng)?;
            // (−π, π]
            let w = PI - 2.0 * PI * rng.random::<f64>();
            Scatterer::new(pos, w, ue)
        })
        .collect()
}

/// Circularly-symmetric complex Gaussian with variance `var`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Downlink sample `hᴴ Q̄ v + n_u` for a unit symbol.
pub fn downlink_rx<R: Rng + ?Sized>(
    h: &[Complex64],
    hybrid: &HybridConfig,
    noise_power: f64,
    rng: &mut R,
) -> Complex64 {
    let x = hybrid.transmit();
    let n = if noise_power > 0.0 {
        complex_gaussian(rng, noise_power)
    } else {
        Complex64::new(0.0, 0.0)
    };
    inner(h, &x) + n
}

/// Average of `repeats` uplink observations `Q̄ᴴ h √P_u + Q̄ᴴ n_b[m]`.
///
/// The mean of `M` independent `CN(0, σ²I)` element-noise vectors is
/// `CN(0, σ²/M·I)`, so it is drawn once and passed through the combiner;
/// its colouring by `Q̄ᴴ` is preserved.
pub fn uplink_rx<R: Rng + ?Sized>(
    h: &[Complex64],
    analog: &AnalogConfig,
    ue_power: f64,
    noise_power: f64,
    repeats: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if repeats < 1 {
        return domain("uplink averaging needs at least one repetition");
    }
    let amp = ue_power.max(0.0).sqrt();
    let var = noise_power / repeats as f64;
    let acc: Vec<Complex64> = h
        .iter()
        .map(|x| {
            let n = if var > 0.0 { complex_gaussian(rng, var) } else { Complex64::new(0.0, 0.0) };
            x * amp + n
        })
        .collect();
    Ok(analog.combine(&acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{optimal_precoder, range_combiner};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn geom() -> DmaGeometry {
        DmaGeometry::default()
    }

    #[test]
    fn dbm_round_trip() {
        assert_relative_eq!(dbm_to_watts(30.0), 1.0, epsilon = 1e-12);
        assert_relative_eq!(dbm_to_watts(-94.0), 3.981_071_705_534_97e-13, max_relative = 1e-12);
        assert_relative_eq!(watts_to_dbm(dbm_to_watts(5.0)), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn reference_snr_edges() {
        let b = LinkBudget::default();
        let lam = 0.01;
        assert_relative_eq!(free_space_pathloss(lam, 45.0), 3.13e-10, max_relative = 0.01);
        assert!((linear_to_db(b.uplink_snr(lam, 45.0)) - 4.0).abs() < 0.5);
        assert!((linear_to_db(b.uplink_snr(lam, 5.0)) - 23.0).abs() < 0.5);
    }

    #[test]
    fn constant_pathloss_norm() {
        let g = geom();
        let p = PolarPosition::new(20.0, 1.0).unwrap();
        let h = los_channel(&g, p, true);
        let e: f64 = h.iter().map(|x| x.norm_sqr()).sum();
        assert_relative_eq!(e, g.n_elements() as f64 * pathloss(&g, p), max_relative = 1e-12);
    }

    #[test]
    fn no_scatterers_means_pure_los() {
        let g = geom();
        let p = PolarPosition::new(20.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let area = Disk { center: p, radius: 3.0 };
        let c = sample_channel(&g, p, 0, area, true, &mut rng).unwrap();
        assert_eq!(c.h, c.los);
        let bad = Disk { center: p, radius: 0.0 };
        assert!(sample_channel(&g, p, 1, bad, true, &mut rng).is_err());
        assert!(sample_channel(&g, p, 0, bad, true, &mut rng).is_ok());
    }

    #[test]
    fn same_seed_same_channel() {
        let g = geom();
        let p = PolarPosition::new(14.0, 2.0).unwrap();
        let area = Disk { center: p, radius: 5.0 };
        let a = sample_channel(&g, p, 2, area, true, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_channel(&g, p, 2, area, true, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noiseless_downlink_matches_gain() {
        let g = geom();
        let p = PolarPosition::new(20.0, 1.3).unwrap();
        let h = los_channel(&g, p, true);
        let hyb = optimal_precoder(&g, p, 1.0, DistanceModel::Exact).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let y = downlink_rx(&h, &hyb, 0.0, &mut rng);
        let want = pathloss(&g, p) * 0.5 * g.n_elements() as f64;
        assert!((y.norm_sqr() / want - 1.0).abs() < 0.02);
        let hyb4 = optimal_precoder(&g, p, 4.0, DistanceModel::Exact).unwrap();
        let y4 = downlink_rx(&h, &hyb4, 0.0, &mut rng);
        assert_relative_eq!(y4.norm(), 2.0 * y.norm(), max_relative = 1e-9);
    }

    #[test]
    fn noise_only_downlink_variance() {
        let g = DmaGeometry { n_microstrips: 1, n_elements_per_strip: 4, ..geom() };
        let p = PolarPosition::new(20.0, 1.3).unwrap();
        let hyb = optimal_precoder(&g, p, 1.0, DistanceModel::Exact).unwrap();
        let h = vec![Complex64::new(0.0, 0.0); 4];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 10_000;
        let var: f64 = (0..n).map(|_| downlink_rx(&h, &hyb, 2.0, &mut rng).norm_sqr()).sum::<f64>() / n as f64;
        assert!((var / 2.0 - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn uplink_rejects_zero_repeats_and_is_zero_mean_without_pilot() {
        let g = geom();
        let q = range_combiner(&g, 10.0).unwrap();
        let h = vec![Complex64::new(1.0, 0.0); g.n_elements()];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(uplink_rx(&h, &q, 1.0, 1.0, 0, &mut rng).is_err());
        let trials = 400;
        let mut mean = vec![Complex64::new(0.0, 0.0); g.n_microstrips];
        for _ in 0..trials {
            let y = uplink_rx(&h, &q, 0.0, 1.0, 1, &mut rng).unwrap();
            for (m, yi) in mean.iter_mut().zip(y) {
                *m += yi / trials as f64;
            }
        }
        // per-output std is √(0.5 N_e) ≈ 10; the mean of 400 draws is ~0.5
        assert!(mean.iter().all(|m| m.norm() < 2.5));
    }
}
