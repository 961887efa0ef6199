//! Positive-energy Coulomb pair for the radial equation
//!     u'' + (e2 + 2 z / x - L(L+1)/x^2) u = 0,   e2 = k^2 > 0,
//! energy-normalized (W[f, gbar] = 2/pi), on an arbitrary positive grid.
//!
//! The regular member is integrated outward from a power-series seed; the
//! irregular one inward from the large-rho asymptotic expansion.  Both
//! integrations run in s = sqrt(x), which equidistributes the Coulomb
//! oscillations, with quintic Hermite interpolation back to the caller grid.

use super::gamma::{ln_gamma, ln_gamma_real};
use super::CoulombPair;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// ln of the Coulomb barrier-penetration amplitude C_L(eta_s).
pub fn ln_coulomb_c(lam: f64, eta_s: f64) -> Result<f64> {
    Ok(lam * 2f64.ln() - PI * eta_s / 2.0
        + ln_gamma(Complex64::new(lam + 1.0, eta_s))?.re
        - ln_gamma_real(2.0 * lam + 2.0)?)
}

/// Coulomb phase sigma_L = arg Gamma(L+1 + i eta_s).
pub fn coulomb_sigma(lam: f64, eta_s: f64) -> Result<f64> {
    Ok(ln_gamma(Complex64::new(lam + 1.0, eta_s))?.im)
}

/// ln of the small-x amplitude of the energy-normalized regular member:
/// f ~ exp(lnN) x^(L+1) (1 + ...).
pub fn ln_regular_amplitude(e2: f64, z: f64, lam: f64) -> Result<f64> {
    let k = e2.sqrt();
    let eta_s = -z / k;
    Ok(0.5 * (2.0 / (PI * k)).ln() + ln_coulomb_c(lam, eta_s)? + (lam + 1.0) * k.ln())
}

/// F and G from the large-rho asymptotic expansion (valid for
/// rho well beyond both the turning point and |eta_s|^2).
fn asymptotic_fg(lam: f64, eta_s: f64, rho: f64, sigma: f64) -> (f64, f64, f64) {
    let mut fk = 1.0;
    let mut gk = 0.0;
    let mut sf = fk;
    let mut sg = gk;
    let mut prev = 1.0f64;
    let mut last = 1.0f64;
    for k in 0..80 {
        let kf = k as f64;
        let lamk = (2.0 * kf + 1.0) * eta_s / (2.0 * (kf + 1.0) * rho);
        let muk = (lam * (lam + 1.0) - kf * (kf + 1.0) + eta_s * eta_s) / (2.0 * (kf + 1.0) * rho);
        let nf = lamk * fk - muk * gk;
        let ng = lamk * gk + muk * fk;
        fk = nf;
        gk = ng;
        let t = fk.abs() + gk.abs();
        last = t;
        if t > prev {
            break; // asymptotic series started diverging
        }
        sf += fk;
        sg += gk;
        prev = t;
        if t < 1e-17 {
            break;
        }
    }
    let th = rho - eta_s * (2.0 * rho).ln() - lam * PI / 2.0 + sigma;
    let f = sg * th.cos() + sf * th.sin();
    let g = sf * th.cos() - sg * th.sin();
    (f, g, last)
}

struct SqrtGrid {
    s0: f64,
    h: f64,
    n: usize,
}

impl SqrtGrid {
    fn s(&self, i: usize) -> f64 {
        self.s0 + self.h * i as f64
    }
}

/// q(s) of the transformed equation v'' + q v = 0, v = u/sqrt(s), x = s^2.
fn q_of_s(e2: f64, w: f64, lam: f64, s: f64) -> f64 {
    4.0 * e2 * s * s + 4.0 * w - (4.0 * lam * (lam + 1.0) + 0.75) / (s * s)
}

/// Numerov sweep over the whole grid given two seed values; direction set by
/// `outward`.  Returns v at every node.
fn numerov_sweep(q: &[f64], h: f64, seed_a: f64, seed_b: f64, outward: bool) -> Vec<f64> {
    let n = q.len();
    let mut v = vec![0.0; n];
    let w: Vec<f64> = q.iter().map(|&qi| 1.0 + h * h / 12.0 * qi).collect();
    if outward {
        v[0] = seed_a;
        v[1] = seed_b;
        for i in 1..n - 1 {
            v[i + 1] = ((12.0 - 10.0 * w[i]) * v[i] - w[i - 1] * v[i - 1]) / w[i + 1];
        }
    } else {
        v[n - 1] = seed_a;
        v[n - 2] = seed_b;
        for i in (1..n - 1).rev() {
            v[i - 1] = ((12.0 - 10.0 * w[i]) * v[i] - w[i + 1] * v[i + 1]) / w[i - 1];
        }
    }
    v
}

/// v' at interior nodes to O(h^4) using v''' = -(qv)'.
fn derivative_nodes(v: &[f64], q: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut vp = vec![0.0; n];
    for i in 1..n - 1 {
        let central = (v[i + 1] - v[i - 1]) / (2.0 * h);
        let qv_slope = (q[i + 1] * v[i + 1] - q[i - 1] * v[i - 1]) / (2.0 * h);
        vp[i] = central + h * h / 6.0 * qv_slope;
    }
    vp[0] = vp[1] - h * (-q[1] * v[1]) + 0.0; // crude one-sided; endpoints unused
    vp[n - 1] = vp[n - 2] + h * (-q[n - 2] * v[n - 2]);
    vp
}

/// Two-point quintic Hermite for (value, derivative) at t in [0, h].
fn quintic(
    h: f64,
    t: f64,
    v0: f64,
    vp0: f64,
    vpp0: f64,
    v1: f64,
    vp1: f64,
    vpp1: f64,
) -> (f64, f64) {
    let u = t / h;
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u3 * u;
    let u5 = u4 * u;
    let h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
    let h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
    let h2 = 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5);
    let h3 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
    let h4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
    let h5 = 0.5 * (u3 - 2.0 * u4 + u5);
    let val = v0 * h0 + h * vp0 * h1 + h * h * vpp0 * h2 + v1 * h3 + h * vp1 * h4 + h * h * vpp1 * h5;
    let d0 = -30.0 * u2 + 60.0 * u3 - 30.0 * u4;
    let d1 = 1.0 - 18.0 * u2 + 32.0 * u3 - 15.0 * u4;
    let d2 = 0.5 * (2.0 * u - 9.0 * u2 + 12.0 * u3 - 5.0 * u4);
    let d3 = 30.0 * u2 - 60.0 * u3 + 30.0 * u4;
    let d4 = -12.0 * u2 + 28.0 * u3 - 15.0 * u4;
    let d5 = 0.5 * (3.0 * u2 - 8.0 * u3 + 5.0 * u4);
    let der = (v0 * d0 + h * vp0 * d1 + h * h * vpp0 * d2 + v1 * d3 + h * vp1 * d4 + h * h * vpp1 * d5)
        / h;
    (val, der)
}

/// Sample (u, du/dx) at the requested x points from the nodal (v, v') data.
fn sample(
    grid: &SqrtGrid,
    v: &[f64],
    vp: &[f64],
    q: &[f64],
    xs: &[f64],
    out_val: &mut Vec<f64>,
    out_der: &mut Vec<f64>,
) {
    for &x in xs {
        let st = x.sqrt();
        let fi = ((st - grid.s0) / grid.h).floor();
        let i = (fi.max(0.0) as usize).min(grid.n - 2).max(1).min(grid.n - 2);
        let t = st - grid.s(i);
        let (vv, vd) = quintic(
            grid.h,
            t,
            v[i],
            vp[i],
            -q[i] * v[i],
            v[i + 1],
            vp[i + 1],
            -q[i + 1] * v[i + 1],
        );
        let u = vv * st.sqrt();
        let up = (vd + vv / (2.0 * st)) / (2.0 * st.sqrt());
        out_val.push(u);
        out_der.push(up);
    }
}

/// Energy-normalized positive-energy pair on `xs` for charge parameter z
/// (either sign) and real angular index lam >= -1/2.
pub fn pair_on_grid(e2: f64, z: f64, lam: f64, xs: &[f64]) -> Result<CoulombPair> {
    if e2 <= 0.0 {
        return Err(Error::Domain("pair_on_grid requires positive energy".into()));
    }
    if xs.is_empty() || xs.iter().any(|&x| x <= 0.0) || xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "grid must be nonempty, strictly increasing, positive".into(),
        ));
    }
    let k = e2.sqrt();
    let w = 2.0 * z;
    let eta_s = -z / k;
    let sigma = coulomb_sigma(lam, eta_s)?;
    let ln_nf = ln_regular_amplitude(e2, z, lam)?;

    // inner seed point: series must converge crisply there
    let x0 = (0.05 / w.abs().max(1.0)).min(0.05 / k).min(xs[0]);
    // far start for the irregular member
    let rho_start = (2.05 * eta_s * eta_s + 25.0).max(k * xs[xs.len() - 1] * 1.05 + 5.0);
    let x_end = rho_start / k;

    let s0 = x0.sqrt();
    let s_end = x_end.sqrt();
    // step from the largest local momentum of the transformed equation
    let qmax = [s0, s_end, (4.0 * w.abs().max(1.0) as f64).sqrt()]
        .iter()
        .map(|&s| q_of_s(e2, w, lam, s).abs())
        .fold(0.0, f64::max)
        .max(1.0);
    let h = (0.02 / qmax.sqrt()).min((s_end - s0) / 64.0);
    // start a few nodes below the first sample so interpolation always has
    // interior neighbours with accurate derivatives
    let s0 = (s0 - 3.0 * h).max(0.5 * s0);
    let n = ((s_end - s0) / h).ceil() as usize + 2;
    let grid = SqrtGrid { s0, h, n };
    let q: Vec<f64> = (0..n).map(|i| q_of_s(e2, w, lam, grid.s(i))).collect();

    // regular member: series seed u = x^(L+1) sum a_j x^j (leading coeff 1)
    let useries = |x: f64| -> f64 {
        let mut a_jm1 = 1.0;
        let mut a_jm2 = 0.0;
        let mut sum = 1.0;
        let mut xp = 1.0;
        for j in 1..60 {
            let jf = j as f64;
            let a_j = -(w * a_jm1 + e2 * a_jm2) / (jf * (jf + 2.0 * lam + 1.0));
            xp *= x;
            sum += a_j * xp;
            a_jm2 = a_jm1;
            a_jm1 = a_j;
        }
        x.powf(lam + 1.0) * sum
    };
    let seed_f0 = useries(grid.s(0).powi(2)) / grid.s(0).sqrt();
    let seed_f1 = useries(grid.s(1).powi(2)) / grid.s(1).sqrt();
    let vf = numerov_sweep(&q, h, seed_f0, seed_f1, true);
    let vfp = derivative_nodes(&vf, &q, h);

    // irregular member: asymptotic seeds at the two outermost nodes
    let norm = (2.0 / (PI * k)).sqrt();
    let seed_g = |i: usize| -> Result<f64> {
        let x = grid.s(i).powi(2);
        let rho = k * x;
        let (_fa, ga, last) = asymptotic_fg(lam, eta_s, rho, sigma);
        if last > 1e-11 {
            return Err(Error::Convergence(format!(
                "asymptotic Coulomb expansion not converged at rho = {rho} (residual {last:.2e})"
            )));
        }
        Ok(-norm * ga / grid.s(i).sqrt())
    };
    let vg = numerov_sweep(&q, h, seed_g(n - 1)?, seed_g(n - 2)?, false);
    let vgp = derivative_nodes(&vg, &q, h);

    let mut pair = CoulombPair {
        grid: xs.to_vec(),
        f_vals: Vec::with_capacity(xs.len()),
        g_vals: Vec::with_capacity(xs.len()),
        f_deriv: Vec::with_capacity(xs.len()),
        g_deriv: Vec::with_capacity(xs.len()),
        energy: e2 / 2.0,
        ell_or_lambda: lam,
        charge_like: z,
    };
    sample(&grid, &vf, &vfp, &q, xs, &mut pair.f_vals, &mut pair.f_deriv);
    sample(&grid, &vg, &vgp, &q, xs, &mut pair.g_vals, &mut pair.g_deriv);
    // scale the series-normalized regular member to energy normalization
    let nf = ln_nf.exp();
    for v in pair.f_vals.iter_mut().chain(pair.f_deriv.iter_mut()) {
        *v *= nf;
    }
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn matches_reference_attractive() {
        // mpmath: k=0.2, Z=1 (eta_s=-5), L=0 and L=2 at x=40
        let xs = vec![10.0, 40.0, 75.0];
        let p = pair_on_grid(0.04, 1.0, 0.0, &xs).unwrap();
        let norm = (2.0 / (PI * 0.2)).sqrt();
        // coulombf(0, -5, 8) = REF_F0, coulombg(0, -5, 8) = REF_G0
        assert_abs_diff_eq!(p.f_vals[1], norm * 0.34427335473473, epsilon = 1e-8);
        assert_abs_diff_eq!(p.g_vals[1], -norm * 0.7406485002261346, epsilon = 1e-8);
    }

    #[test]
    fn wronskian_constant() {
        let xs: Vec<f64> = (1..60).map(|i| 0.7 * i as f64).collect();
        for &(e2, z, lam) in &[
            (1.2377e-3, 1.0, 6.0),
            (6.19e-4, 0.45, 0.0),
            (6.19e-4, -2.0, 0.0),
            (0.04, 1.0, 2.0),
        ] {
            let p = pair_on_grid(e2, z, lam, &xs).unwrap();
            assert!(
                p.wronskian_drift() < 1e-8,
                "drift {} for ({e2}, {z}, {lam})",
                p.wronskian_drift()
            );
        }
    }

    #[test]
    fn small_x_log_slope() {
        let xs = vec![0.004, 0.008];
        let p = pair_on_grid(0.04, 1.0, 2.0, &xs).unwrap();
        let slope = (p.f_vals[1] / p.f_vals[0]).ln() / 2f64.ln();
        assert_abs_diff_eq!(slope, 3.0, epsilon = 1e-2);
    }
}
