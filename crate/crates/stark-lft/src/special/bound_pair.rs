//! Negative-energy Coulomb pair for real (integer or half-integer) angular
//! index, built from the regularized-1F1 closed form.  The irregular member at
//! half-integer index is the l'Hopital limit of the generic-index combination,
//! evaluated with analytic parameter derivatives of every Gamma and series
//! factor.  Scaled so the pair Wronskian is 2/pi.

use super::gamma::{digamma, inv_gamma_with_deriv, ln_gamma_real};
use super::hyp::PochDeriv;
use super::CoulombPair;
use crate::{Error, Result};
use std::f64::consts::PI;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// ln A(nubar, lambda) = ln[ Gamma(lambda+nubar+1) / (nubar^(2 lambda+1) Gamma(nubar-lambda)) ]
pub fn ln_a(nubar: f64, lam: f64) -> Result<f64> {
    Ok(ln_gamma_real(lam + nubar + 1.0)? - (2.0 * lam + 1.0) * nubar.ln()
        - ln_gamma_real(nubar - lam)?)
}

/// d/dlambda ln A at fixed nubar.
pub fn dln_a_dlam(nubar: f64, lam: f64) -> f64 {
    digamma(lam + nubar + 1.0) - 2.0 * nubar.ln() + digamma(nubar - lam)
}

/// The regular-type radial factor
///   S_lambda(zeta) = 2^(lambda+1/2) zeta^(lambda+1) e^(-zeta/nubar)
///                    * 1F1reg(lambda+1-nubar; 2 lambda+2; 2 zeta/nubar)
/// together with d/dzeta, and optionally d/dlambda and d/dlambda d/dzeta.
#[derive(Clone, Copy, Debug, Default)]
pub struct SEval {
    pub val: f64,
    pub dz: f64,
    pub dlam: f64,
    pub dlam_dz: f64,
}

pub fn s_eval(lam: f64, nubar: f64, zeta: f64, with_dlam: bool) -> SEval {
    let a = lam + 1.0 - nubar;
    let b = 2.0 * lam + 2.0;
    let x = 2.0 * zeta / nubar;

    // T = sum_k (a)_k /Gamma(b+k) x^k/k!, plus x- and lambda-derivative sums
    let mut t = 0.0; // T
    let mut tx = 0.0; // dT/dx
    let mut tl = 0.0; // dT/dlambda
    let mut tlx = 0.0; // d2T/dlambda dx
    let mut poch = PochDeriv::start();
    let mut xk_over_kfact = 1.0;
    let mut streak = 0;
    for k in 0..700 {
        let kf = k as f64;
        let (ig, dig) = inv_gamma_with_deriv(b + kf);
        let c = poch.val * ig;
        let term = c * xk_over_kfact;
        t += term;
        if k >= 1 {
            tx += c * xk_over_kfact * kf / x.max(1e-300);
        }
        if with_dlam {
            // d/dlambda acts on (a)_k (da/dlambda = 1) and on 1/Gamma(b+k)
            // (db/dlambda = 2)
            let dc = poch.deriv * ig + 2.0 * poch.val * dig;
            tl += dc * xk_over_kfact;
            if k >= 1 {
                tlx += dc * xk_over_kfact * kf / x.max(1e-300);
            }
        }
        if term.abs() < 1e-18 * (t.abs() + 1e-300) && kf > x.abs() {
            streak += 1;
            if streak >= 3 {
                break;
            }
        } else {
            streak = 0;
        }
        poch.step(a + kf);
        xk_over_kfact *= x / (kf + 1.0);
    }

    let pref = 2f64.powf(lam + 0.5) * zeta.powf(lam + 1.0) * (-zeta / nubar).exp();
    let alin = (lam + 1.0) / zeta - 1.0 / nubar; // from d/dzeta of the prefactor
    let bx = 2.0 / nubar; // dx/dzeta
    let val = pref * t;
    let dz = pref * (alin * t + bx * tx);
    let (dlam, dlam_dz) = if with_dlam {
        let lnfac = 2f64.ln() + zeta.ln();
        let dl = pref * (lnfac * t + tl);
        let dldz = pref * (lnfac * (alin * t + bx * tx) + t / zeta + alin * tl + bx * tlx);
        (dl, dldz)
    } else {
        (0.0, 0.0)
    };
    SEval {
        val,
        dz,
        dlam,
        dlam_dz,
    }
}

/// Value and zeta-derivative of the energy-normalized pair (f, gbar) at one
/// point.  `lam` may be generic (uses the cot/csc combination) or half-integer
/// in the sense 2*lam+1 integer (uses the l'Hopital limit).
pub fn pair_point(lam: f64, nubar: f64, zeta: f64) -> Result<(f64, f64, f64, f64)> {
    if nubar <= lam {
        return Err(Error::Domain(format!(
            "pair_point needs nubar > lambda (nubar={nubar}, lambda={lam})"
        )));
    }
    let lna = ln_a(nubar, lam)?;
    let sqrt_a = (0.5 * lna).exp();
    let c_arg = (2.0 * lam + 1.0) * PI;
    let n_near = (2.0 * lam + 1.0).round();
    let half_integer = ((2.0 * lam + 1.0) - n_near).abs() < 1e-9;

    if !half_integer {
        let s1 = s_eval(lam, nubar, zeta, false);
        let s2 = s_eval(-lam - 1.0, nubar, zeta, false);
        let f = SQRT2 * sqrt_a * s1.val;
        let fp = SQRT2 * sqrt_a * s1.dz;
        let (sin_c, cos_c) = (c_arg.sin(), c_arg.cos());
        let g = SQRT2 * (sqrt_a * s1.val * cos_c - s2.val / sqrt_a) / sin_c;
        let gp = SQRT2 * (sqrt_a * s1.dz * cos_c - s2.dz / sqrt_a) / sin_c;
        return Ok((f, fp, g, gp));
    }

    // l'Hopital at 2*lam+1 = n: sigma = cos(n pi)
    let sigma = if (n_near as i64).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let dlna = dln_a_dlam(nubar, lam);
    let s1 = s_eval(lam, nubar, zeta, true);
    let s2 = s_eval(-lam - 1.0, nubar, zeta, true);

    let f = SQRT2 * sqrt_a * s1.val;
    let fp = SQRT2 * sqrt_a * s1.dz;

    // d/dlambda [ A^(1/2) S_lambda ]
    let d1 = sqrt_a * (0.5 * dlna * s1.val + s1.dlam);
    let d1p = sqrt_a * (0.5 * dlna * s1.dz + s1.dlam_dz);
    // d/dlambda [ A^(-1/2) S_(-lambda-1) ]; the inner index derivative picks
    // up a sign from mu = -lambda-1
    let d2 = (-0.5 * dlna * s2.val - s2.dlam) / sqrt_a;
    let d2p = (-0.5 * dlna * s2.dz - s2.dlam_dz) / sqrt_a;

    let g = SQRT2 * (d1 - d2 / sigma) / (2.0 * PI);
    let gp = SQRT2 * (d1p - d2p / sigma) / (2.0 * PI);
    Ok((f, fp, g, gp))
}

/// Generic-index pair used as the extrapolation oracle for the l'Hopital
/// branch: evaluates at lam_c +- step and averages (Richardson).
pub fn pair_point_extrapolated(
    lam_c: f64,
    nubar: f64,
    zeta: f64,
    step: f64,
) -> Result<(f64, f64, f64, f64)> {
    let up = pair_point(lam_c + step, nubar, zeta)?;
    let dn = pair_point(lam_c - step, nubar, zeta)?;
    Ok((
        0.5 * (up.0 + dn.0),
        0.5 * (up.1 + dn.1),
        0.5 * (up.2 + dn.2),
        0.5 * (up.3 + dn.3),
    ))
}

/// Negative-energy pair for half-integer lambda on a zeta grid.
pub fn coulomb_pair_half_integer(energy_bar: f64, lam: f64, grid: &[f64]) -> Result<CoulombPair> {
    if energy_bar >= 0.0 {
        return Err(Error::Unsupported(
            "half-integer closed forms cover negative scaled energy only".into(),
        ));
    }
    if grid.iter().any(|&z| z <= 0.0) {
        return Err(Error::Domain("zeta grid must be positive".into()));
    }
    let nubar = 1.0 / (-energy_bar).sqrt();
    let mut pair = CoulombPair {
        grid: grid.to_vec(),
        f_vals: Vec::with_capacity(grid.len()),
        g_vals: Vec::with_capacity(grid.len()),
        f_deriv: Vec::with_capacity(grid.len()),
        g_deriv: Vec::with_capacity(grid.len()),
        energy: energy_bar,
        ell_or_lambda: lam,
        charge_like: 1.0,
    };
    for &z in grid {
        let (f, fp, g, gp) = pair_point(lam, nubar, z)?;
        pair.f_vals.push(f);
        pair.f_deriv.push(fp);
        pair.g_vals.push(g);
        pair.g_deriv.push(gp);
    }
    Ok(pair)
}

/// Spherical-equation pair (charge 1, integer l) on an r grid, either energy
/// sign.
pub fn coulomb_pair_spherical(energy: f64, ell: u32, grid: &[f64]) -> Result<CoulombPair> {
    if energy == 0.0 {
        return Err(Error::Domain("zero energy not supported".into()));
    }
    if grid.iter().any(|&r| r <= 0.0) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "grid must be strictly increasing and positive".into(),
        ));
    }
    if energy > 0.0 {
        let mut pair = super::positive_pair::pair_on_grid(2.0 * energy, 1.0, ell as f64, grid)?;
        pair.energy = energy;
        return Ok(pair);
    }
    let nu = 1.0 / (-2.0 * energy).sqrt();
    let mut pair = CoulombPair {
        grid: grid.to_vec(),
        f_vals: Vec::with_capacity(grid.len()),
        g_vals: Vec::with_capacity(grid.len()),
        f_deriv: Vec::with_capacity(grid.len()),
        g_deriv: Vec::with_capacity(grid.len()),
        energy,
        ell_or_lambda: ell as f64,
        charge_like: 1.0,
    };
    for &r in grid {
        let (f, fp, g, gp) = pair_point(ell as f64, nu, r)?;
        pair.f_vals.push(f);
        pair.f_deriv.push(fp);
        pair.g_vals.push(g);
        pair.g_deriv.push(gp);
    }
    Ok(pair)
}
