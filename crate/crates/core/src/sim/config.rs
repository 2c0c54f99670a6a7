//! TOML scenario files. Every physical quantity carries its unit in the key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytics::GainConvention;
use crate::channel::LinkBudget;
use crate::error::{Error, Result};
use crate::geometry::{DmaGeometry, FeedPoint};
use crate::tracking::{TrackerParams, VelocityWeights};

use super::campaign::{BenchmarkSpec, Scenario};
use super::trajectory::{RadialDensity, TrajectoryParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub n_microstrips: usize,
    pub n_elements_per_strip: usize,
    pub element_spacing_m: f64,
    pub strip_spacing_m: f64,
    pub wavelength_m: f64,
    pub height_m: f64,
    pub dielectric_eps: f64,
    pub feed: FeedPoint,
}

impl Default for GeometrySection {
    fn default() -> Self {
        let g = DmaGeometry::default();
        Self {
            n_microstrips: g.n_microstrips,
            n_elements_per_strip: g.n_elements_per_strip,
            element_spacing_m: g.d_e,
            strip_spacing_m: g.d_m,
            wavelength_m: g.wavelength,
            height_m: g.z0,
            dielectric_eps: g.dielectric_eps,
            feed: g.feed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkSection {
    pub bs_power_dbm: f64,
    pub ue_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub constant_pathloss: bool,
}

impl Default for LinkSection {
    fn default() -> Self {
        Self {
            bs_power_dbm: 30.0,
            ue_power_dbm: 5.0,
            noise_power_dbm: -94.0,
            constant_pathloss: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackerSection {
    pub kappa_percent: f64,
    pub delta_percent: f64,
    pub gamma: f64,
    pub u_threshold_mps: f64,
    pub e_c: f64,
    pub e_u: f64,
    pub n_pilots: usize,
    pub tti_s: f64,
    pub velocity_weights: VelocityWeights,
    pub escape: bool,
    pub cold_delta_percent: f64,
}

impl Default for TrackerSection {
    fn default() -> Self {
        let t = TrackerParams::default();
        Self {
            kappa_percent: t.kappa,
            delta_percent: t.delta,
            gamma: t.gamma,
            u_threshold_mps: t.u_threshold,
            e_c: t.e_c,
            e_u: t.e_u,
            n_pilots: t.n_pilots,
            tti_s: t.tti,
            velocity_weights: t.weights,
            escape: t.escape,
            cold_delta_percent: t.cold_delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectorySection {
    pub control_points: usize,
    pub steps: usize,
    pub mean_speed_mps: f64,
    /// Defaults to the Fresnel distance of the array.
    pub r0_min_m: Option<f64>,
    pub r0_max_m: f64,
    pub phi_min_deg: f64,
    pub phi_max_deg: f64,
    pub radial_density: RadialDensity,
    pub reject_inside: bool,
}

impl Default for TrajectorySection {
    fn default() -> Self {
        Self {
            control_points: 6,
            steps: 100,
            mean_speed_mps: 10.0,
            r0_min_m: None,
            r0_max_m: 50.0,
            phi_min_deg: 10.0,
            phi_max_deg: 170.0,
            radial_density: RadialDensity::LogRadius,
            reject_inside: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScatterersSection {
    pub count: usize,
    pub radius_m: f64,
    pub redraw_per_slot: bool,
}

impl Default for ScatterersSection {
    fn default() -> Self {
        Self {
            count: 1,
            radius_m: 5.0,
            redraw_per_slot: false,
        }
    }
}

/// Unset steps are derived from the proposed tracker's run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchmarkSection {
    pub enabled: bool,
    pub interval_s: Option<f64>,
    pub radial_step_m: Option<f64>,
    pub angular_step_deg: Option<f64>,
}

impl Default for BenchmarkSection {
    fn default() -> Self {
        Self {
            enabled: true,
            interval_s: None,
            radial_step_m: None,
            angular_step_deg: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Write per-slot JSON lines next to the aggregates.
    pub records: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            records: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    pub seed: u64,
    pub trials: usize,
    pub convention: GainConvention,
    pub geometry: GeometrySection,
    pub link: LinkSection,
    pub tracker: TrackerSection,
    pub trajectory: TrajectorySection,
    pub scatterers: ScatterersSection,
    pub benchmark: BenchmarkSection,
    pub output: OutputSection,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: 100,
            convention: GainConvention::Power,
            geometry: GeometrySection::default(),
            link: LinkSection::default(),
            tracker: TrackerSection::default(),
            trajectory: TrajectorySection::default(),
            scatterers: ScatterersSection::default(),
            benchmark: BenchmarkSection::default(),
            output: OutputSection::default(),
        }
    }
}

fn at(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Config {
        path: path.to_string(),
        message: match e {
            Error::Domain(m) => m,
            other => other.to_string(),
        },
    }
}

fn check(ok: bool, path: &str, message: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config {
            path: path.to_string(),
            message: message.into(),
        })
    }
}

impl SimulationConfig {
    pub fn from_toml_str(text: &str, file: impl Into<PathBuf>) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ConfigParse {
            file: file.into(),
            source: Box::new(e),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Validates every section and converts to runtime types.
    pub fn resolve(&self) -> Result<Scenario> {
        let g = &self.geometry;
        let geometry = DmaGeometry {
            n_microstrips: g.n_microstrips,
            n_elements_per_strip: g.n_elements_per_strip,
            d_e: g.element_spacing_m,
            d_m: g.strip_spacing_m,
            wavelength: g.wavelength_m,
            z0: g.height_m,
            dielectric_eps: g.dielectric_eps,
            feed: g.feed,
            ..DmaGeometry::default()
        };
        geometry.validate().map_err(at("geometry"))?;

        let l = &self.link;
        let budget = LinkBudget::from_dbm(l.bs_power_dbm, l.ue_power_dbm, l.noise_power_dbm).map_err(at("link"))?;

        let t = &self.tracker;
        check(t.kappa_percent > 0.0 && t.kappa_percent < 100.0, "tracker.kappa_percent", "must lie in (0, 100)")?;
        check(
            t.delta_percent > t.kappa_percent && t.delta_percent < 100.0,
            "tracker.delta_percent",
            "must lie in (kappa_percent, 100)",
        )?;
        let tracker = TrackerParams {
            kappa: t.kappa_percent,
            delta: t.delta_percent,
            gamma: t.gamma,
            u_threshold: t.u_threshold_mps,
            e_c: t.e_c,
            e_u: t.e_u,
            n_pilots: t.n_pilots,
            tti: t.tti_s,
            weights: t.velocity_weights,
            escape: t.escape,
            cold_delta: t.cold_delta_percent,
        };
        tracker.validate().map_err(at("tracker"))?;

        let tr = &self.trajectory;
        let r0_min = tr.r0_min_m.unwrap_or(geometry.field_regions().r_fresnel);
        let trajectory = TrajectoryParams {
            control_points: tr.control_points,
            steps: tr.steps,
            mean_speed: tr.mean_speed_mps,
            r0_min,
            r0_max: tr.r0_max_m,
            phi_min: tr.phi_min_deg.to_radians(),
            phi_max: tr.phi_max_deg.to_radians(),
            radial_density: tr.radial_density,
            reject_inside: tr.reject_inside,
            max_attempts: 1000,
        };
        trajectory.validate(&geometry).map_err(at("trajectory"))?;

        let s = &self.scatterers;
        check(
            s.count == 0 || s.radius_m > 0.0,
            "scatterers.radius_m",
            "must be positive when scatterers are present",
        )?;

        let b = &self.benchmark;
        for (v, path) in [
            (b.interval_s, "benchmark.interval_s"),
            (b.radial_step_m, "benchmark.radial_step_m"),
            (b.angular_step_deg, "benchmark.angular_step_deg"),
        ] {
            if let Some(v) = v {
                check(v > 0.0, path, "must be positive")?;
            }
        }
        let benchmark = b.enabled.then(|| BenchmarkSpec {
            interval: b.interval_s,
            radial_step: b.radial_step_m,
            angular_step: b.angular_step_deg.map(f64::to_radians),
        });
        check(self.trials > 0, "trials", "must be at least 1")?;

        Ok(Scenario {
            geometry,
            budget,
            tracker,
            trajectory,
            scatterer_count: s.count,
            scatterer_radius: s.radius_m,
            redraw_scatterers: s.redraw_per_slot,
            constant_pathloss: l.constant_pathloss,
            benchmark,
            convention: self.convention,
            seed: self.seed,
            trials: self.trials,
        })
    }
}
