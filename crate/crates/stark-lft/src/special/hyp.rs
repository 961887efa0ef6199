//! Regularized confluent hypergeometric function 1F1(a;b;x)/Gamma(b), entire
//! in b (finite at nonpositive integer b), with the parameter derivatives used
//! by the irregular-solution construction.

use super::gamma::inv_gamma_with_deriv;
use crate::{Error, Result};

const MAX_TERMS: usize = 700;

/// 1F1(a;b;x)/Gamma(b) by direct series with per-term reciprocal Gamma.
pub fn regularized_1f1(a: f64, b: f64, x: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut poch = 1.0; // (a)_k
    let mut xpow_over_fact = 1.0; // x^k / k!
    let mut small_streak = 0;
    let mut max_abs: f64 = 0.0;
    for k in 0..MAX_TERMS {
        let (ig, _) = inv_gamma_with_deriv(b + k as f64);
        let term = poch * xpow_over_fact * ig;
        sum += term;
        max_abs = max_abs.max(term.abs());
        if !sum.is_finite() {
            let ln_est = x.abs() + (a - b) * x.abs().max(1.0).ln();
            return Err(Error::Overflow { ln_abs: ln_est });
        }
        if term.abs() < 1e-17 * (sum.abs() + 1e-300) && k as f64 > x.abs() {
            small_streak += 1;
            if small_streak >= 3 {
                break;
            }
        } else {
            small_streak = 0;
        }
        poch *= a + k as f64;
        xpow_over_fact *= x / (k as f64 + 1.0);
    }
    Ok(sum)
}

/// Running Pochhammer (a)_k together with its derivative d/da (a)_k.
/// Advance with `step`; robust when factors pass through zero.
#[derive(Clone, Copy, Debug)]
pub struct PochDeriv {
    pub val: f64,
    pub deriv: f64,
}

impl PochDeriv {
    pub fn start() -> Self {
        PochDeriv {
            val: 1.0,
            deriv: 0.0,
        }
    }
    /// (a)_{k+1} = (a)_k * (a+k);  d(a)_{k+1} = d(a)_k * (a+k) + (a)_k
    pub fn step(&mut self, a_plus_k: f64) {
        let nv = self.val * a_plus_k;
        let nd = self.deriv * a_plus_k + self.val;
        self.val = nv;
        self.deriv = nd;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_term() {
        // (a, b, 0) -> 1/Gamma(b)
        assert_abs_diff_eq!(regularized_1f1(1.3, 2.0, 0.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            regularized_1f1(-0.7, 3.0, 0.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn exp_closed_form() {
        for &x in &[-3.0, 0.3, 2.0, 10.0] {
            assert_abs_diff_eq!(
                regularized_1f1(1.0, 1.0, x).unwrap(),
                x.exp(),
                epsilon = 1e-12 * x.exp().abs()
            );
        }
    }

    #[test]
    fn nonpositive_b_finite() {
        // mpmath: hyp1f1(0.7, b, 1.3)/gamma(b) continued to b = -2
        // via series sum_k (0.7)_k 1.3^k /(k! Gamma(b+k)) at b=-2:
        // reference 3.956907795570878 (50-digit mpmath series)
        let v = regularized_1f1(0.7, -2.0, 1.3).unwrap();
        assert_abs_diff_eq!(v, 3.956907795570878, epsilon = 1e-12);
        // continuity across the integer
        let a = regularized_1f1(0.7, -2.0 + 1e-7, 1.3).unwrap();
        let b = regularized_1f1(0.7, -2.0 - 1e-7, 1.3).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        assert_abs_diff_eq!(a, v, epsilon = 1e-6);
    }

    #[test]
    fn generic_reference() {
        // mpmath hyp1f1(-2.4, 4.0, 6.0)/gamma(4.0) = reference below
        let v = regularized_1f1(-2.4, 4.0, 6.0).unwrap();
        assert_abs_diff_eq!(v, -0.008114594026490458, epsilon = 1e-12);
    }

    #[test]
    fn poch_deriv_matches_finite_difference() {
        let a = -1.5;
        let h = 1e-6;
        let poch = |a: f64, n: usize| -> f64 { (0..n).map(|k| a + k as f64).product() };
        let mut p = PochDeriv::start();
        for k in 0..6 {
            p.step(a + k as f64);
        }
        let fd = (poch(a + h, 6) - poch(a - h, 6)) / (2.0 * h);
        assert_abs_diff_eq!(p.val, poch(a, 6), epsilon = 1e-12);
        assert_abs_diff_eq!(p.deriv, fd, epsilon = 1e-5);
    }
}
