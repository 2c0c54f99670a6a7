//! Browser bindings: range-correlation profile, search grid and gain map
//! around a focal point of the default 10 × 200 array.

use nfbeam::analytics::BeamAnalytics;
use nfbeam::frontend::FocusingVector;
use nfbeam::geometry::{DistanceModel, DmaGeometry, PolarPosition};
use nfbeam::grid::build_grid;
use nfbeam::sim::sweeps::range_profile;
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

fn analytics() -> Result<BeamAnalytics, String> {
    BeamAnalytics::new(DmaGeometry::default()).map_err(|e| e.to_string())
}

fn focus(geom: &DmaGeometry, r0: f64, phi_deg: f64) -> Result<PolarPosition, String> {
    PolarPosition::new(geom.r_from_r0(r0), phi_deg.to_radians()).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Profile {
    r: f64,
    delta_minus: f64,
    delta_plus: Option<f64>,
    dr: Vec<f64>,
    closed_form: Vec<f64>,
    oracle: Vec<f64>,
}

/// Closed-form and brute-force correlation along the radial line through the
/// focus, plus the κ% depth-of-focus edges. JSON.
#[wasm_bindgen]
pub fn range_correlation(r0: f64, phi_deg: f64, kappa: f64, span_m: f64, points: usize) -> Result<String, String> {
    let an = analytics()?;
    let p = focus(an.geometry(), r0, phi_deg)?;
    let (m, plus) = an.delta_r(p.r, kappa).map_err(|e| e.to_string())?;
    let n = points.clamp(3, 2000);
    let drs: Vec<f64> = (0..n).map(|i| -span_m + 2.0 * span_m * i as f64 / (n - 1) as f64).collect();
    let rows = range_profile(&an, p.r, p.phi, &drs).map_err(|e| e.to_string())?;
    let profile = Profile {
        r: p.r,
        delta_minus: m,
        delta_plus: plus.is_finite().then_some(plus),
        dr: rows.iter().map(|x| x.dr).collect(),
        closed_form: rows.iter().map(|x| x.closed_form).collect(),
        oracle: rows.iter().map(|x| x.oracle).collect(),
    };
    Ok(serde_json::to_string(&profile).expect("profile serialises"))
}

/// Search grid of resolution `delta` over a disk of `scale · c_κ` around the
/// focus. JSON.
#[wasm_bindgen]
pub fn search_grid(r0: f64, phi_deg: f64, kappa: f64, delta: f64, scale: f64) -> Result<String, String> {
    let an = analytics()?;
    let p = focus(an.geometry(), r0, phi_deg)?;
    let c = scale * an.chord_depth_min(p.r, p.phi, kappa).map_err(|e| e.to_string())?;
    let grid = build_grid(&an, p, c, delta).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&grid).expect("grid serialises"))
}

/// Relative gain of a beam focused at the point, on an `n × n` Cartesian
/// patch of side `width_m` centred on it, row-major from the far edge.
/// Points behind the array are NaN.
#[wasm_bindgen]
pub fn gain_map(r0: f64, phi_deg: f64, width_m: f64, n: usize) -> Result<Vec<f64>, String> {
    let geom = DmaGeometry::default();
    let p = focus(&geom, r0, phi_deg)?;
    let beam = FocusingVector::new(&geom, p, DistanceModel::Fresnel);
    let [fx, fy] = p.to_cartesian();
    let n = n.clamp(2, 200);
    let step = width_m / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for row in 0..n {
        let y = fy + 0.5 * width_m - row as f64 * step;
        for col in 0..n {
            let x = fx - 0.5 * width_m + col as f64 * step;
            let g = match PolarPosition::from_cartesian(x, y) {
                Ok(q) => beam.correlation(&FocusingVector::new(&geom, q, DistanceModel::Exact)),
                Err(_) => f64::NAN,
            };
            out.push(g);
        }
    }
    Ok(out)
}
