//! Normalized Fresnel integrals `C(x) = ∫₀ˣ cos(πt²/2) dt`, `S(x) = ∫₀ˣ sin(πt²/2) dt`.
//!
//! Power series below |x| = 1.5, a modified-Lentz continued fraction of the
//! complementary error function above it.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::quadrature;

const SERIES_LIMIT: f64 = 1.5;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 500;

/// Returns `(C(x), S(x))`; odd in `x`.
pub fn fresnel_cs(x: f64) -> (f64, f64) {
    let ax = x.abs();
    let (c, s) = if ax < SERIES_LIMIT {
        series(ax)
    } else {
        continued_fraction(ax)
    };
    if x < 0.0 {
        (-c, -s)
    } else {
        (c, s)
    }
}

/// `C(x) + jS(x)`.
pub fn fresnel(x: f64) -> Complex64 {
    let (c, s) = fresnel_cs(x);
    Complex64::new(c, s)
}

/// `(C(x) + jS(x))/x`, continuous at zero with value 1.
pub fn fresnel_ratio(x: f64) -> Complex64 {
    if x.abs() < 1e-8 {
        return Complex64::new(1.0, FRAC_PI_2 * x * x / 3.0);
    }
    fresnel(x) / x
}

fn series(x: f64) -> (f64, f64) {
    // term_n = (πx²/2)^n / n! · x ; C collects even n, S odd n, each over (2n+1)
    // with sign (-1)^⌊n/2⌋.
    let t = FRAC_PI_2 * x * x;
    let mut term = x;
    let mut c = 0.0;
    let mut s = 0.0;
    for n in 0..200usize {
        let contrib = term / (2 * n + 1) as f64;
        let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if n % 2 == 0 {
            c += sign * contrib;
        } else {
            s += sign * contrib;
        }
        if contrib.abs() < EPS * (c.abs() + s.abs()).max(TINY) {
            break;
        }
        term *= t / (n + 1) as f64;
    }
    (c, s)
}

fn continued_fraction(x: f64) -> (f64, f64) {
    let pix2 = PI * x * x;
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0f64;
    for _ in 1..MAX_ITER {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += 4.0;
        d = (d * a + b).inv();
        cc = b + cc.inv() * a;
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            break;
        }
    }
    h *= Complex64::new(x, -x);
    let cs = Complex64::new(0.5, 0.5) * (Complex64::new(1.0, 0.0) - Complex64::cis(0.5 * pix2) * h);
    (cs.re, cs.im)
}

/// Reference values by direct adaptive quadrature; slow, intended for tests.
pub fn fresnel_cs_quadrature(x: f64, tol: f64) -> (f64, f64) {
    let c = quadrature::integrate(|t| (FRAC_PI_2 * t * t).cos(), 0.0, x, tol);
    let s = quadrature::integrate(|t| (FRAC_PI_2 * t * t).sin(), 0.0, x, tol);
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn known_values() {
        assert_eq!(fresnel_cs(0.0), (0.0, 0.0));
        let (c, s) = fresnel_cs(1.0);
        assert_abs_diff_eq!(c, 0.779_893_400_376_822_8, epsilon = 1e-12);
        assert_abs_diff_eq!(s, 0.438_259_147_390_354_8, epsilon = 1e-12);
    }

    #[test]
    fn odd_symmetry() {
        for &x in &[0.3, 1.2, 1.5, 2.7, 9.0] {
            let (c, s) = fresnel_cs(x);
            let (cn, sn) = fresnel_cs(-x);
            assert_eq!((c, s), (-cn, -sn));
        }
    }

    #[test]
    fn asymptote() {
        let mut prev = f64::INFINITY;
        for &x in &[50.0, 100.0, 200.0] {
            let (c, s) = fresnel_cs(x);
            let err = (c - 0.5).abs().max((s - 0.5).abs());
            assert!(err < 1e-2);
            assert!(err < prev);
            prev = err;
        }
    }

    #[test]
    fn branches_agree_at_switch() {
        let (c0, s0) = series(SERIES_LIMIT);
        let (c1, s1) = continued_fraction(SERIES_LIMIT);
        assert_abs_diff_eq!(c0, c1, epsilon = 1e-13);
        assert_abs_diff_eq!(s0, s1, epsilon = 1e-13);
    }

    #[test]
    fn matches_quadrature() {
        for i in 0..=60 {
            let x = i as f64 * 0.1;
            let (c, s) = fresnel_cs(x);
            let (cq, sq) = fresnel_cs_quadrature(x, 1e-13);
            assert_abs_diff_eq!(c, cq, epsilon = 1e-9);
            assert_abs_diff_eq!(s, sq, epsilon = 1e-9);
        }
    }

    #[test]
    fn ratio_is_continuous_at_zero() {
        let near = fresnel_ratio(1e-6);
        assert_abs_diff_eq!(near.re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(fresnel_ratio(0.0).norm(), 1.0, epsilon = 1e-15);
    }
}
