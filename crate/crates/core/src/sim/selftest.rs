//! Quick oracle suites behind the `selftest` command.

use std::f64::consts::PI;

use crate::analytics::{fresnel_ratio_taylor, solve_a_kappa, BeamAnalytics, GainConvention};
use crate::error::Result;
use crate::fresnel::{fresnel_cs, fresnel_cs_quadrature, fresnel_ratio};
use crate::frontend::{optimal_precoder, FocusingVector};
use crate::geometry::{DistanceModel, DmaGeometry, PolarPosition};

use super::sweeps::{angle_sweep, depth_sweep, log_space};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

pub fn run_selftest() -> Result<Vec<Check>> {
    let geom = DmaGeometry::default();
    let an = BeamAnalytics::new(geom.clone())?;
    let fr = geom.field_regions();
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    for i in 0..=40 {
        let x = i as f64 * 0.15;
        let (c, s) = fresnel_cs(x);
        let (cq, sq) = fresnel_cs_quadrature(x, 1e-13);
        worst = worst.max((c - cq).abs()).max((s - sq).abs());
    }
    out.push(check("fresnel integrals vs quadrature", worst <= 1e-9, format!("max error {worst:.2e}")));

    let mut worst: f64 = 0.0;
    for i in 1..=50 {
        let x = i as f64 * 0.01;
        worst = worst.max((fresnel_ratio(x).norm() - fresnel_ratio_taylor(x)).abs());
    }
    out.push(check("fresnel ratio Taylor bound", worst <= 1e-3, format!("max error {worst:.2e}")));

    let w = solve_a_kappa(99.0, 0.0, GainConvention::Power, None)?;
    out.push(check("99% threshold of the ratio", (w - 0.46).abs() <= 0.005, format!("w = {w:.4}")));

    let r0s = log_space(fr.r0_approx, 100.0, 8);
    let mut worst: f64 = 0.0;
    for phi in [PI / 6.0, PI / 4.0, PI / 2.0] {
        for row in depth_sweep(&an, 50.0, phi, &r0s)? {
            worst = worst.max((row.oracle_gain_minus - 0.5).abs());
            if let Some(g) = row.oracle_gain_plus {
                worst = worst.max((g - 0.5).abs());
            }
        }
    }
    out.push(check("depth-of-focus edges at 50%", worst <= 0.05, format!("max |gain - 0.5| {worst:.4}")));

    let mut worst: f64 = 0.0;
    for row in angle_sweep(&an, 50.0, PI / 4.0, &r0s)? {
        for (c, o) in [(row.closed_form_plus, row.oracle_plus), (row.closed_form_minus, row.oracle_minus)] {
            worst = worst.max((c - o).abs() / o);
        }
    }
    out.push(check("angular width closed form", worst <= 0.03, format!("max relative error {worst:.4}")));

    let p = PolarPosition::new(geom.r_from_r0(20.0), 1.1)?;
    let hybrid = optimal_precoder(&geom, p, 1.0, DistanceModel::Exact)?;
    let a = FocusingVector::new(&geom, p, DistanceModel::Exact);
    let ratio = hybrid.gain(a.as_slice()) / (0.5 * geom.n_elements() as f64);
    out.push(check("focused gain is half of P_b N", (ratio - 1.0).abs() <= 0.02, format!("ratio {ratio:.4}")));

    Ok(out)
}
