//! Clamped B-spline basis (default order 8) with derivatives, plus the
//! quadrature and knot-placement helpers shared by the two channel solvers.

use crate::{Error, Result};

/// 10-point Gauss-Legendre nodes and weights on [-1, 1].
pub const GL_NODES: [f64; 10] = [
    -0.9739065285171717,
    -0.8650633666889845,
    -0.6794095682990244,
    -0.4333953941292472,
    -0.1488743389816312,
    0.1488743389816312,
    0.4333953941292472,
    0.6794095682990244,
    0.8650633666889845,
    0.9739065285171717,
];
pub const GL_WEIGHTS: [f64; 10] = [
    0.0666713443086881,
    0.1494513491505806,
    0.2190863625159820,
    0.2692667193099963,
    0.2955242247147529,
    0.2955242247147529,
    0.2692667193099963,
    0.2190863625159820,
    0.1494513491505806,
    0.0666713443086881,
];

/// Map the reference nodes/weights to an interval [a, b].
pub fn gauss_on(a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS.iter())
        .map(move |(&x, &w)| (mid + half * x, half * w))
        .collect::<Vec<_>>()
        .into_iter()
}

#[derive(Clone, Debug)]
pub struct BsplineBasis {
    pub order: usize,
    /// full clamped knot vector (endpoints repeated `order` times)
    pub knots: Vec<f64>,
    /// distinct breakpoints
    pub breaks: Vec<f64>,
}

impl BsplineBasis {
    pub fn new(order: usize, breaks: &[f64]) -> Result<Self> {
        if breaks.len() < 2 {
            return Err(Error::Domain("need at least one knot interval".into()));
        }
        for w in breaks.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Domain("breakpoints must be increasing".into()));
            }
        }
        let mut knots = Vec::with_capacity(breaks.len() + 2 * order - 2);
        for _ in 0..order {
            knots.push(breaks[0]);
        }
        knots.extend_from_slice(&breaks[1..breaks.len() - 1]);
        for _ in 0..order {
            knots.push(*breaks.last().unwrap());
        }
        Ok(BsplineBasis {
            order,
            knots,
            breaks: breaks.to_vec(),
        })
    }

    /// number of basis functions
    pub fn n(&self) -> usize {
        self.knots.len() - self.order
    }

    /// knot span index i such that knots[i] <= x < knots[i+1]
    pub fn span(&self, x: f64) -> usize {
        let n = self.n();
        let k = self.order;
        if x >= self.knots[n] {
            return n - 1;
        }
        let mut lo = k - 1;
        let mut hi = n;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if x < self.knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    /// Values and first `nders` derivatives of the `order` basis functions that
    /// are nonzero at `x`.  Returns (index of first nonzero basis function,
    /// ders) where ders[d][j] is the d-th derivative of basis `first + j`.
    pub fn eval_ders(&self, x: f64, nders: usize) -> (usize, Vec<Vec<f64>>) {
        let k = self.order;
        let p = k - 1; // polynomial degree
        let i = self.span(x);
        let t = &self.knots;

        // triangular table of all lower-order basis values plus the knot
        // differences needed for the derivative recurrences (NURBS book A2.3)
        let mut ndu = vec![vec![0.0; k]; k];
        let mut left = vec![0.0; k];
        let mut right = vec![0.0; k];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = x - t[i + 1 - j];
            right[j] = t[i + j] - x;
            let mut saved = 0.0;
            for r in 0..j {
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }

        let nd = nders.min(p);
        let mut ders = vec![vec![0.0; k]; nders + 1];
        for j in 0..k {
            ders[0][j] = ndu[j][p];
        }
        let mut a = vec![vec![0.0; k]; 2];
        for r in 0..k {
            let mut s1 = 0;
            let mut s2 = 1;
            a[0][0] = 1.0;
            for d in 1..=nd {
                let mut acc = 0.0;
                let rk = r as i64 - d as i64;
                let pk = (p - d) as i64;
                if r as i64 >= d as i64 {
                    a[s2][0] = a[s1][0] / ndu[(pk + 1) as usize][rk as usize];
                    acc = a[s2][0] * ndu[rk as usize][pk as usize];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if r as i64 - 1 <= pk {
                    d - 1
                } else {
                    p - r
                };
                for j in j1..=j2 {
                    let rkj = (rk + j as i64) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[(pk + 1) as usize][rkj];
                    acc += a[s2][j] * ndu[rkj][pk as usize];
                }
                if r as i64 <= pk {
                    a[s2][d] = -a[s1][d - 1] / ndu[(pk + 1) as usize][r];
                    acc += a[s2][d] * ndu[r][pk as usize];
                }
                ders[d][r] = acc;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut factor = p as f64;
        for d in 1..=nd {
            for j in 0..k {
                ders[d][j] *= factor;
            }
            factor *= (p - d) as f64;
        }
        (i + 1 - k, ders)
    }

    /// Value and first derivative of a coefficient expansion at `x`.
    pub fn eval_expansion(&self, coef: &[f64], x: f64) -> (f64, f64) {
        let (first, ders) = self.eval_ders(x, 1);
        let mut v = 0.0;
        let mut d = 0.0;
        for j in 0..self.order {
            let c = coef[first + j];
            v += c * ders[0][j];
            d += c * ders[1][j];
        }
        (v, d)
    }
}

/// Geometric progression of breakpoints from `a` to `b` (n intervals), first
/// interval of length `h0`.  Falls back to uniform when h0 is already large.
pub fn geometric_breaks(a: f64, b: f64, h0: f64, n: usize) -> Vec<f64> {
    let span = b - a;
    let uniform = span / n as f64;
    if h0 >= uniform {
        return (0..=n).map(|i| a + span * i as f64 / n as f64).collect();
    }
    // solve h0 (r^n - 1)/(r - 1) = span for the ratio r
    let mut lo = 1.0 + 1e-12;
    let mut hi = 4.0;
    let total = |r: f64| h0 * (r.powi(n as i32) - 1.0) / (r - 1.0);
    while total(hi) < span {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) < span {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    let mut out = Vec::with_capacity(n + 1);
    let mut x = a;
    let mut h = h0;
    out.push(a);
    for _ in 0..n - 1 {
        x += h;
        out.push(x);
        h *= r;
    }
    out.push(b);
    out
}

/// Breakpoints equidistributing the integral of a positive density on [a, b].
/// The density is sampled on a fine trapezoid grid and the cumulative integral
/// inverted; the solvers pass densities proportional to the local wavenumber.
pub fn density_breaks<F: Fn(f64) -> f64>(density: F, a: f64, b: f64, n: usize) -> Vec<f64> {
    let fine = (20 * n).max(2000);
    let h = (b - a) / fine as f64;
    let mut cum = Vec::with_capacity(fine + 1);
    cum.push(0.0);
    let mut prev = density(a).max(0.0);
    let mut acc = 0.0;
    for i in 1..=fine {
        let cur = density(a + h * i as f64).max(0.0);
        acc += 0.5 * h * (prev + cur);
        cum.push(acc);
        prev = cur;
    }
    let total = acc;
    let mut out = Vec::with_capacity(n + 1);
    out.push(a);
    let mut idx = 0;
    for j in 1..n {
        let target = total * j as f64 / n as f64;
        while idx < fine && cum[idx + 1] < target {
            idx += 1;
        }
        let frac = if cum[idx + 1] > cum[idx] {
            (target - cum[idx]) / (cum[idx + 1] - cum[idx])
        } else {
            0.0
        };
        out.push(a + h * (idx as f64 + frac));
    }
    out.push(b);
    // guard against coincident points from flat density stretches
    for i in 1..out.len() {
        if out[i] <= out[i - 1] {
            out[i] = out[i - 1] + 1e-12 * (b - a);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn partition_of_unity_and_derivative() {
        let breaks = geometric_breaks(0.0, 10.0, 0.05, 17);
        let basis = BsplineBasis::new(8, &breaks).unwrap();
        for &x in &[0.013, 0.4, 3.7, 9.999] {
            let (_, d) = basis.eval_ders(x, 2);
            let s: f64 = d[0].iter().sum();
            let s1: f64 = d[1].iter().sum();
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(s1, 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let breaks: Vec<f64> = (0..=12).map(|i| (i as f64 / 12.0).powi(2) * 5.0).collect();
        let basis = BsplineBasis::new(8, &breaks).unwrap();
        let n = basis.n();
        let coef: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let h = 1e-6;
        for &x in &[0.2, 1.1, 2.9, 4.5] {
            let (_, d) = basis.eval_expansion(&coef, x);
            let (vp, _) = basis.eval_expansion(&coef, x + h);
            let (vm, _) = basis.eval_expansion(&coef, x - h);
            assert_abs_diff_eq!(d, (vp - vm) / (2.0 * h), epsilon = 1e-4);
        }
    }

    #[test]
    fn quadrature_is_exact_for_degree_19() {
        // 10-point Gauss handles polynomials through degree 19
        let exact = 2.0 / 20.0; // int_{-1}^{1} x^18 dx... use x^18 (even)
        let got: f64 = gauss_on(-1.0, 1.0).map(|(x, w)| w * x.powi(18)).sum();
        assert_abs_diff_eq!(got, 2.0 / 19.0, epsilon = 1e-14);
        let _ = exact;
    }

    #[test]
    fn reproduces_smooth_function() {
        // collocation at Greville points reproduces sin to spline accuracy
        let breaks: Vec<f64> = (0..=24).map(|i| i as f64 * 0.25).collect();
        let basis = BsplineBasis::new(8, &breaks).unwrap();
        let n = basis.n();
        let k = basis.order;
        // Greville abscissae
        let grev: Vec<f64> = (0..n)
            .map(|i| basis.knots[i + 1..i + k].iter().sum::<f64>() / (k - 1) as f64)
            .collect();
        let mut a = vec![vec![0.0; n]; n];
        for (r, &x) in grev.iter().enumerate() {
            let (first, d) = basis.eval_ders(x, 0);
            for j in 0..k {
                a[r][first + j] = d[0][j];
            }
        }
        let b: Vec<f64> = grev.iter().map(|&x| x.sin()).collect();
        use ndarray::{Array1, Array2};
        use ndarray_linalg::Solve;
        let am = Array2::from_shape_fn((n, n), |(i, j)| a[i][j]);
        let coef = am.solve(&Array1::from(b)).unwrap().to_vec();
        for &x in &[0.13, 2.2, 4.01, 5.9] {
            let (v, d) = basis.eval_expansion(&coef, x);
            assert_abs_diff_eq!(v, x.sin(), epsilon = 1e-9);
            assert_abs_diff_eq!(d, x.cos(), epsilon = 1e-7);
        }
    }

    #[test]
    fn density_breaks_equidistribute() {
        let breaks = density_breaks(|x| 1.0 + x, 0.0, 2.0, 8);
        assert_eq!(breaks.len(), 9);
        // cumulative x + x^2/2 should advance by total/8 each interval
        let cumulative = |x: f64| x + 0.5 * x * x;
        let total = cumulative(2.0);
        for (i, w) in breaks.windows(2).enumerate() {
            let seg = cumulative(w[1]) - cumulative(w[0]);
            assert_abs_diff_eq!(seg, total / 8.0, epsilon = 2e-3);
            let _ = i;
        }
    }
}
