//! Analog/digital beamforming with the DMA's Lorentzian-constrained elements.
//!
//! The analog stage is stored as the per-element metamaterial weight `q`
//! together with the waveguide phase `e^{-jβρ}`; the effective analog matrix
//! `Q̄ = P_m Q` is block-sparse with one nonzero per row, so only the `N`
//! diagonal-block entries are kept.
//!
//! Range-combiner sign convention: with `q = ½(j + e^{-j(kA - βρ)})`,
//! `A = (i_x²d_m² + n²d_e²)/(2r) + z0 n d_e / r`, and
//! `v_φ = e^{jk(i_x d_m cos φ + i_x² d_m² cos²φ/(2r))}`, the product
//! `v_φᴴ Q̄_rᴴ` equals `½ a_fᴴ(r, φ)` times the global phase
//! `e^{-jk(r + z0²/(2r))}`, plus a waveguide residual `-½j e^{jβρ} conj(v)`
//! that does not focus anywhere. The `+cos²φ` in `v_φ` combines with the
//! `+i_x²d_m²/(2r)` in `A` to give the `(1 - cos²φ)` of the distance expansion.

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::geometry::{DistanceModel, DmaGeometry, PolarPosition};

const J: Complex64 = Complex64::new(0.0, 1.0);

/// Unit-modulus phase profile `e^{-jk r_{i,n}}`, strip-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FocusingVector {
    entries: Vec<Complex64>,
}

impl FocusingVector {
    pub fn new(geom: &DmaGeometry, p: PolarPosition, model: DistanceModel) -> Self {
        let k = geom.wavenumber();
        let entries = geom
            .distances(p, model)
            .into_iter()
            .map(|d| Complex64::cis(-k * d))
            .collect();
        Self { entries }
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Relative gain `|aᴴb|²/N²` against another focusing vector.
    pub fn correlation(&self, other: &FocusingVector) -> f64 {
        correlation(&self.entries, &other.entries)
    }
}

/// `Σ conj(aᵢ) bᵢ`, summed pairwise.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len(), "inner product of unequal lengths");
    const LEAF: usize = 64;
    if a.len() <= LEAF {
        return a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    }
    let mid = a.len() / 2;
    inner(&a[..mid], &b[..mid]) + inner(&a[mid..], &b[mid..])
}

/// `|aᴴb|² / (‖a‖²‖b‖²)`; equals `|aᴴb|²/N²` for unit-modulus vectors.
pub fn correlation(a: &[Complex64], b: &[Complex64]) -> f64 {
    let na = inner(a, a).re;
    let nb = inner(b, b).re;
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    inner(a, b).norm_sqr() / (na * nb)
}

/// Oracle relative gain between a true position and a focusing point.
pub fn relative_gain(
    geom: &DmaGeometry,
    truth: PolarPosition,
    focus: PolarPosition,
    channel_model: DistanceModel,
    beam_model: DistanceModel,
) -> f64 {
    let a = FocusingVector::new(geom, truth, channel_model);
    let b = FocusingVector::new(geom, focus, beam_model);
    a.correlation(&b)
}

/// A point on the Lorentzian circle, `½(j + e^{jθ})`.
pub fn lorentzian_weight(theta: f64) -> Complex64 {
    0.5 * (J + Complex64::cis(theta))
}

/// Analog stage of the DMA: metamaterial weights plus waveguide phases.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogConfig {
    pub n_microstrips: usize,
    pub n_elements_per_strip: usize,
    /// Metamaterial weights `q_{i,n}` (entries of `Q`), strip-major.
    pub weights: Vec<Complex64>,
    /// Waveguide propagation `e^{-jβρ_{i,n}}` (diagonal of `P_m`).
    pub waveguide: Vec<Complex64>,
}

impl AnalogConfig {
    fn from_angles(geom: &DmaGeometry, theta: impl Fn(usize, usize) -> f64) -> Self {
        let beta = geom.waveguide_wavenumber();
        let mut weights = Vec::with_capacity(geom.n_elements());
        let mut waveguide = Vec::with_capacity(geom.n_elements());
        for i in 0..geom.n_microstrips {
            for n in 0..geom.n_elements_per_strip {
                weights.push(lorentzian_weight(theta(i, n)));
                waveguide.push(Complex64::cis(-beta * geom.feed_distance(n)));
            }
        }
        Self {
            n_microstrips: geom.n_microstrips,
            n_elements_per_strip: geom.n_elements_per_strip,
            weights,
            waveguide,
        }
    }

    /// Nonzero entries of `Q̄ = P_m Q`; entry `(i,n)` sits in column `i`.
    pub fn effective(&self) -> Vec<Complex64> {
        self.weights
            .iter()
            .zip(&self.waveguide)
            .map(|(q, p)| q * p)
            .collect()
    }

    /// `Q̄ᴴ x` for a length-`N` vector.
    pub fn combine(&self, x: &[Complex64]) -> Vec<Complex64> {
        let ne = self.n_elements_per_strip;
        let eff = self.effective();
        (0..self.n_microstrips)
            .map(|i| inner(&eff[i * ne..(i + 1) * ne], &x[i * ne..(i + 1) * ne]))
            .collect()
    }

    /// `Q̄ v` for a length-`N_m` digital vector.
    pub fn spread(&self, v: &[Complex64]) -> Vec<Complex64> {
        let ne = self.n_elements_per_strip;
        self.effective()
            .into_iter()
            .enumerate()
            .map(|(k, q)| q * v[k / ne])
            .collect()
    }

    /// `Q̄ᴴQ̄`; diagonal because every row has a single nonzero.
    pub fn gram_diagonal(&self) -> Vec<f64> {
        let ne = self.n_elements_per_strip;
        self.weights
            .chunks(ne)
            .map(|block| block.iter().map(|q| q.norm_sqr()).sum())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridConfig {
    pub analog: AnalogConfig,
    /// Digital precoder `v`, one entry per microstrip.
    pub digital: Vec<Complex64>,
    /// Power budget `P_b` in watts.
    pub tx_power: f64,
}

impl HybridConfig {
    /// Transmitted vector `Q̄ v` (unit symbol).
    pub fn transmit(&self) -> Vec<Complex64> {
        self.analog.spread(&self.digital)
    }

    pub fn radiated_power(&self) -> f64 {
        self.transmit().iter().map(|x| x.norm_sqr()).sum()
    }

    /// `|aᴴ Q̄ v|²` for a channel direction `a`.
    pub fn gain(&self, a: &[Complex64]) -> f64 {
        inner(a, &self.transmit()).norm_sqr()
    }
}

/// Hybrid precoder that phase-aligns the focusing vector at `p`.
///
/// The digital stage is `√(2P_b/N)·1`. The transmit power then equals `P_b`
/// up to the waveguide cross term; when that term is positive the digital
/// stage is scaled down so that `‖Q̄v‖² ≤ P_b` holds exactly.
pub fn optimal_precoder(
    geom: &DmaGeometry,
    p: PolarPosition,
    tx_power: f64,
    model: DistanceModel,
) -> Result<HybridConfig> {
    if !(tx_power > 0.0 && tx_power.is_finite()) {
        return domain(format!("transmit power must be positive, got {tx_power}"));
    }
    let a = FocusingVector::new(geom, p, model);
    let beta = geom.waveguide_wavenumber();
    let ne = geom.n_elements_per_strip;
    let analog = AnalogConfig::from_angles(geom, |i, n| {
        a.as_slice()[i * ne + n].arg() + beta * geom.feed_distance(n)
    });
    let scale = (2.0 * tx_power / geom.n_elements() as f64).sqrt();
    let mut hybrid = HybridConfig {
        analog,
        digital: vec![Complex64::new(scale, 0.0); geom.n_microstrips],
        tx_power,
    };
    let radiated = hybrid.radiated_power();
    if radiated > tx_power {
        let shrink = (tx_power / radiated).sqrt();
        for v in &mut hybrid.digital {
            *v *= shrink;
        }
    }
    Ok(hybrid)
}

/// Analog combiner focusing on range `r` (all azimuths).
pub fn range_combiner(geom: &DmaGeometry, r: f64) -> Result<AnalogConfig> {
    if !(r > 0.0 && r.is_finite()) {
        return domain(format!("combiner range must be positive, got {r}"));
    }
    let k = geom.wavenumber();
    let beta = geom.waveguide_wavenumber();
    Ok(AnalogConfig::from_angles(geom, |i, n| {
        let x = geom.lateral_index(i) * geom.d_m;
        let z = n as f64 * geom.d_e;
        let a = (x * x + z * z) / (2.0 * r) + geom.z0 * z / r;
        -(k * a - beta * geom.feed_distance(n))
    }))
}

/// Digital combiner scanning azimuth `phi` on the ring of range `r`.
pub fn angle_beamformer(geom: &DmaGeometry, phi: f64, r: f64) -> Result<Vec<Complex64>> {
    if !(r > 0.0 && r.is_finite()) {
        return domain(format!("beamformer range must be positive, got {r}"));
    }
    let k = geom.wavenumber();
    let c = phi.cos();
    Ok((0..geom.n_microstrips)
        .map(|i| {
            let x = geom.lateral_index(i) * geom.d_m;
            Complex64::cis(k * (x * c + x * x * c * c / (2.0 * r)))
        })
        .collect())
}

/// Per-strip waveguide residual `W_i = Σ_n conj(a_{i,n}) e^{-jβρ_{i,n}}`.
pub fn waveguide_residual(
    geom: &DmaGeometry,
    p: PolarPosition,
    model: DistanceModel,
) -> Vec<Complex64> {
    let a = FocusingVector::new(geom, p, model);
    let beta = geom.waveguide_wavenumber();
    let ne = geom.n_elements_per_strip;
    a.as_slice()
        .chunks(ne)
        .map(|strip| {
            strip
                .iter()
                .enumerate()
                .map(|(n, an)| an.conj() * Complex64::cis(-beta * geom.feed_distance(n)))
                .sum()
        })
        .collect()
}

/// Lorentzian-circle membership test, `|q - ½j| = ½`.
pub fn on_lorentzian_circle(q: Complex64, tol: f64) -> bool {
    ((q - 0.5 * J).norm() - 0.5).abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn geom() -> DmaGeometry {
        DmaGeometry::default()
    }

    #[test]
    fn lorentzian_examples() {
        assert_abs_diff_eq!((lorentzian_weight(PI / 2.0) - J).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lorentzian_weight(-PI / 2.0).norm(), 0.0, epsilon = 1e-15);
        let q = lorentzian_weight(0.0);
        assert_abs_diff_eq!((q - Complex64::new(0.5, 0.5)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.norm(), 2f64.sqrt() / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn self_correlation_is_one() {
        let g = geom();
        let p = PolarPosition::new(12.0, 1.0).unwrap();
        let a = FocusingVector::new(&g, p, DistanceModel::Exact);
        assert_abs_diff_eq!(a.correlation(&a), 1.0, epsilon = 1e-12);
        assert!(a.as_slice().iter().all(|x| (x.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn single_element_always_correlates() {
        let g = DmaGeometry {
            n_microstrips: 1,
            n_elements_per_strip: 1,
            ..geom()
        };
        let a = FocusingVector::new(&g, PolarPosition::new(5.0, 0.3).unwrap(), DistanceModel::Exact);
        let b = FocusingVector::new(&g, PolarPosition::new(40.0, 2.9).unwrap(), DistanceModel::Exact);
        assert_abs_diff_eq!(a.correlation(&b), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn precoder_hits_half_power_times_n() {
        let g = geom();
        let p = PolarPosition::new(20.0, 1.1).unwrap();
        let h = optimal_precoder(&g, p, 1.0, DistanceModel::Exact).unwrap();
        let a = FocusingVector::new(&g, p, DistanceModel::Exact);
        let gain = h.gain(a.as_slice());
        assert!((gain / 1000.0 - 1.0).abs() < 0.02, "gain {gain}");
        assert!(h.radiated_power() <= 1.0 + 1e-12);
        assert!(h.analog.weights.iter().all(|q| on_lorentzian_circle(*q, 1e-12)));
        assert!(optimal_precoder(&g, p, 0.0, DistanceModel::Exact).is_err());
    }

    #[test]
    fn transmit_vector_structure() {
        let g = geom();
        let p = PolarPosition::new(9.0, 2.0).unwrap();
        let h = optimal_precoder(&g, p, 2.0, DistanceModel::Exact).unwrap();
        let a = FocusingVector::new(&g, p, DistanceModel::Exact);
        let x = h.transmit();
        let beta = g.waveguide_wavenumber();
        let s = h.digital[0].re;
        for (idx, xi) in x.iter().enumerate() {
            let n = idx % g.n_elements_per_strip;
            let want = 0.5 * s * (a.as_slice()[idx] + J * Complex64::cis(-beta * g.feed_distance(n)));
            assert_abs_diff_eq!((xi - want).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn combiner_product_identity() {
        let g = geom();
        let (r, phi) = (25.0, 1.2);
        let q = range_combiner(&g, r).unwrap();
        let v = angle_beamformer(&g, phi, r).unwrap();
        let qbar = q.effective();
        let a = FocusingVector::new(&g, PolarPosition::new(r, phi).unwrap(), DistanceModel::Fresnel);
        let k = g.wavenumber();
        let global = Complex64::cis(-k * (r + g.z0 * g.z0 / (2.0 * r)));
        let beta = g.waveguide_wavenumber();
        let ne = g.n_elements_per_strip;
        for (idx, qb) in qbar.iter().enumerate() {
            let i = idx / ne;
            let n = idx % ne;
            let lhs = v[i].conj() * qb.conj();
            let residual = -0.5 * J * Complex64::cis(beta * g.feed_distance(n)) * v[i].conj();
            let rhs = 0.5 * a.as_slice()[idx].conj() * global + residual;
            assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-9);
        }
        assert!(q.weights.iter().all(|w| on_lorentzian_circle(*w, 1e-12)));
    }

    #[test]
    fn broadside_beamformer_is_all_ones() {
        let v = angle_beamformer(&geom(), PI / 2.0, 10.0).unwrap();
        for x in v {
            assert_abs_diff_eq!((x - Complex64::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn waveguide_residual_is_small() {
        let g = geom();
        let w = waveguide_residual(&g, PolarPosition::new(15.0, 0.8).unwrap(), DistanceModel::Exact);
        let worst = w.iter().map(|x| x.norm()).fold(0.0, f64::max) / g.n_elements_per_strip as f64;
        assert!(worst < 0.05, "{worst}");
    }

    #[test]
    fn gram_matrix_is_half_ne() {
        let g = geom();
        let q = range_combiner(&g, 30.0).unwrap();
        for d in q.gram_diagonal() {
            assert!((d / (0.5 * g.n_elements_per_strip as f64) - 1.0).abs() < 0.1);
        }
    }
}
