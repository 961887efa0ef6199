//! Log-Gamma (real and complex), digamma, and the reciprocal Gamma with its
//! derivative (needed where the argument crosses nonpositive integers).

use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

// Lanczos, g = 7, 9 terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

fn lanczos_sum(z: Complex64) -> Complex64 {
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + (i as f64 - 1.0));
    }
    a
}

/// Principal-branch log-Gamma of a complex argument.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor() {
        return Err(Error::Domain(format!("ln_gamma pole at z = {}", z.re)));
    }
    if z.re < 0.5 {
        // reflection; adequate for the real-axis cases this library hits
        let s = (PI * z).sin();
        return Ok((PI / s).ln() - ln_gamma(1.0 - z)?);
    }
    let zm = z - 1.0;
    let t = zm + LANCZOS_G + 0.5;
    let half_ln2pi = 0.5 * (2.0 * PI).ln();
    Ok(half_ln2pi + (zm + 0.5) * t.ln() - t + lanczos_sum(zm + 1.0).ln())
}

/// Real log-Gamma for x where Gamma(x) > 0.
pub fn ln_gamma_real(x: f64) -> Result<f64> {
    let v = ln_gamma(Complex64::new(x, 0.0))?;
    Ok(v.re)
}

/// Gamma(x) for real x (any non-pole).
pub fn gamma_real(x: f64) -> Result<f64> {
    if x >= 0.5 {
        Ok(ln_gamma_real(x)?.exp())
    } else {
        if x == x.floor() {
            return Err(Error::Domain(format!("gamma pole at {x}")));
        }
        // reflection keeps the sign right for negative arguments
        Ok(PI / ((PI * x).sin() * gamma_real(1.0 - x)?))
    }
}

/// Digamma for real argument (poles excluded).
pub fn digamma(x: f64) -> f64 {
    if x <= 0.0 {
        // psi(x) = psi(1-x) - pi*cot(pi*x)
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // asymptotic series, Bernoulli terms
    acc + x.ln() - 0.5 * inv
        - inv2
            * (1.0 / 12.0
                - inv2
                    * (1.0 / 120.0
                        - inv2
                            * (1.0 / 252.0
                                - inv2
                                    * (1.0 / 240.0
                                        - inv2
                                            * (1.0 / 132.0
                                                - inv2 * (691.0 / 32760.0))))))
}

/// 1/Gamma(z) and d/dz [1/Gamma(z)], valid for every real z (entire function).
pub fn inv_gamma_with_deriv(z: f64) -> (f64, f64) {
    if z >= 0.5 {
        let v = (-ln_gamma_real(z).expect("z >= 0.5 has no pole")).exp();
        (v, -digamma(z) * v)
    } else {
        // 1/Gamma(z) = Gamma(1-z) sin(pi z)/pi
        let g = gamma_real(1.0 - z).expect("1-z >= 0.5");
        let s = (PI * z).sin();
        let c = (PI * z).cos();
        let v = g * s / PI;
        let dv = g * (PI * c - digamma(1.0 - z) * s) / PI;
        (v, dv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ln_gamma_trivial_points() {
        assert_abs_diff_eq!(ln_gamma_real(1.0).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            ln_gamma_real(0.5).unwrap(),
            PI.sqrt().ln(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(ln_gamma_real(5.0).unwrap(), 24.0f64.ln(), epsilon = 1e-13);
    }

    #[test]
    fn ln_gamma_complex_reference() {
        // mpmath loggamma(2.5 + 3.1i)
        let v = ln_gamma(Complex64::new(2.5, 3.1)).unwrap();
        assert_abs_diff_eq!(v.re, -1.569701300504592, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 2.951890141832668, epsilon = 1e-12);
        // mpmath loggamma(1 + 28.4i) (Coulomb phase scale)
        let v = ln_gamma(Complex64::new(1.0, 28.4)).unwrap();
        assert_abs_diff_eq!(v.re, -42.01848257518681, epsilon = 1e-10);
        assert_abs_diff_eq!(v.im, 67.41991549253437, epsilon = 1e-10);
    }

    #[test]
    fn ln_gamma_pole_rejected() {
        assert!(ln_gamma(Complex64::new(0.0, 0.0)).is_err());
        assert!(ln_gamma(Complex64::new(-3.0, 0.0)).is_err());
    }

    #[test]
    fn digamma_reference() {
        // psi(1) = -EulerGamma
        assert_abs_diff_eq!(digamma(1.0), -0.5772156649015329, epsilon = 1e-13);
        // mpmath digamma(0.3), digamma(-1.7)
        assert_abs_diff_eq!(digamma(0.3), -3.502524222200133, epsilon = 1e-12);
        assert_abs_diff_eq!(digamma(-1.7), -1.485717499511057, epsilon = 1e-11);
        // mpmath digamma(29.4)
        assert_abs_diff_eq!(digamma(29.4), 3.3638914723251143, epsilon = 1e-13);
    }

    #[test]
    fn inv_gamma_entire() {
        // zeros at nonpositive integers with derivative (-1)^n n!
        let (v, d) = inv_gamma_with_deriv(0.0);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-12);
        let (v, d) = inv_gamma_with_deriv(-3.0);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d, -6.0, epsilon = 1e-11);
        let (v, _) = inv_gamma_with_deriv(4.0);
        assert_abs_diff_eq!(v, 1.0 / 6.0, epsilon = 1e-14);
        // continuity across the pole lattice
        let (a, _) = inv_gamma_with_deriv(-2.0 + 1e-9);
        let (b, _) = inv_gamma_with_deriv(-2.0 - 1e-9);
        assert_abs_diff_eq!(a, b, epsilon = 1e-8);
    }
}
