//! Spherical <-> parabolic local frame transformation.
//!
//! U_{n1,l} couples an energy-normalized spherical partial wave (l, m) to the
//! parabolic channel n1 at the same (energy, field, m).  The closed form is a
//! finite hypergeometric-type sum over k; at positive energy the effective
//! quantum number continues to nu = i/sqrt(2 eps) and the entries stay real up
//! to a tracked continuation residue.

use crate::special::{bound_pair, gamma, positive_pair};
use crate::xi_channels::{phi_series, XiChannel};
use crate::{Error, ProblemSpec, Result};
use ndarray::{Array1, Array2};
use ndarray_linalg::SVD;
use num_complex::Complex64;

/// Normalized associated Legendre function
/// Theta_lm = sqrt((2l+1)/2 (l-m)!/(l+m)!) P_l^m(ct), Condon-Shortley phase.
pub fn theta_lm(ell: i32, m: i32, ct: f64) -> f64 {
    let m = m.abs();
    assert!(ell >= m);
    let st2 = (1.0 - ct * ct).max(0.0);
    // P_m^m = (-1)^m (2m-1)!! (1-x^2)^{m/2}
    let mut pmm = if m % 2 == 0 { 1.0 } else { -1.0 };
    for i in 0..m {
        pmm *= (2 * i + 1) as f64;
    }
    pmm *= st2.powf(m as f64 / 2.0);
    let mut p_prev = 0.0;
    let mut p = pmm;
    for l in m..ell {
        let (lf, mf) = (l as f64, m as f64);
        let next = (ct * (2.0 * lf + 1.0) * p - (lf + mf) * p_prev) / (lf - mf + 1.0);
        p_prev = p;
        p = next;
    }
    let ln_ratio = gamma::ln_gamma_real((ell - m) as f64 + 1.0).unwrap()
        - gamma::ln_gamma_real((ell + m) as f64 + 1.0).unwrap();
    ((2 * ell + 1) as f64 / 2.0 * ln_ratio.exp()).sqrt() * p
}

fn ln_factorial(n: i32) -> f64 {
    gamma::ln_gamma_real(n as f64 + 1.0).unwrap()
}

/// Binomial coefficient through log-factorials.
fn binom(n: i32, k: i32) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().round()
}

/// Effective quantum number: real at eps<0, imaginary continuation at eps>0.
pub fn nu_of(spec: &ProblemSpec) -> Complex64 {
    if spec.energy < 0.0 {
        Complex64::new(1.0 / (-2.0 * spec.energy).sqrt(), 0.0)
    } else {
        Complex64::new(0.0, 1.0 / (2.0 * spec.energy).sqrt())
    }
}

fn falling(z: Complex64, k: i32) -> Complex64 {
    let mut r = Complex64::new(1.0, 0.0);
    for i in 0..k {
        r *= z - i as f64;
    }
    r
}

fn rising(z: Complex64, k: i32) -> Complex64 {
    let mut r = Complex64::new(1.0, 0.0);
    for i in 0..k {
        r *= z + i as f64;
    }
    r
}

/// The combinatoric core of the transformation entry: everything except the
/// amplitude ratio N_xi N_eta / N_{eps l}.
pub fn t_comb(spec: &ProblemSpec, beta: f64, ell: i32) -> Result<Complex64> {
    let m = spec.m.abs();
    if ell < m {
        return Err(Error::Domain(format!("ell = {ell} < |m| = {m}")));
    }
    let nu = nu_of(spec);
    let n1p = beta * nu - 0.5 - m as f64 / 2.0;
    // ln[(2l+1)!!] = ln G(2l+2) - l ln2 - ln G(l+1)
    let ln_dfact = ln_factorial(2 * ell + 1) - ell as f64 * 2f64.ln() - ln_factorial(ell);
    let ln_pref = 0.5 * ((4 * ell + 2) as f64).ln() + 2.0 * ln_factorial(m)
        - ln_dfact
        - 0.5 * (ln_factorial(ell + m) + ln_factorial(ell - m));
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..=(ell - m) {
        let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += sgn
            * binom(ell - m, k)
            * binom(ell + m, ell - k)
            * falling(n1p, k)
            * rising(nu - n1p + (k - ell) as f64, ell - m - k);
    }
    Ok(sign * ln_pref.exp() * nu.powi(m - ell) * s)
}

/// ln of the small-eta amplitude of the energy-normalized field-free regular
/// eta solution (both energy signs).
pub fn ln_n_eta_ff(spec: &ProblemSpec, beta: f64) -> Result<f64> {
    let lam = (spec.m.abs() as f64 - 1.0) / 2.0;
    let z = (1.0 - beta) / 2.0;
    if spec.energy > 0.0 {
        positive_pair::ln_regular_amplitude(spec.energy / 2.0, z, lam)
    } else {
        if beta >= 1.0 {
            return Err(Error::Unsupported(format!(
                "eta normalization undefined for beta = {beta} >= 1 at eps < 0"
            )));
        }
        let nu = 1.0 / (-2.0 * spec.energy).sqrt();
        let nubar = (1.0 - beta) * nu;
        let s = (2.0 / (1.0 - beta)).sqrt();
        Ok(s.ln()
            + 0.5 * (2f64.ln() + bound_pair::ln_a(nubar, lam)?)
            + (lam + 0.5) * 2f64.ln()
            + (lam + 1.0) * z.ln()
            - gamma::ln_gamma_real(2.0 * lam + 2.0)?)
    }
}

/// ln of the amplitude N_{eps l} of the energy-normalized spherical regular
/// solution, f ~ N_{eps l} r^{l+1} at small r.
pub fn ln_n_eps_ell(spec: &ProblemSpec, ell: i32) -> Result<f64> {
    if spec.energy > 0.0 {
        positive_pair::ln_regular_amplitude(2.0 * spec.energy, 1.0, ell as f64)
    } else {
        let nu = 1.0 / (-2.0 * spec.energy).sqrt();
        Ok(0.5 * (2f64.ln() + bound_pair::ln_a(nu, ell as f64)?) + (ell as f64 + 0.5) * 2f64.ln()
            - gamma::ln_gamma_real(2.0 * ell as f64 + 2.0)?)
    }
}

pub struct LftMatrix {
    pub spec: ProblemSpec,
    pub ell_max: i32,
    /// n1 index of each retained row (eps<0 drops beta >= 1 channels)
    pub n1_set: Vec<usize>,
    pub betas: Vec<f64>,
    /// rows: retained channels; cols: ell = |m| ..= ell_max
    pub u: Array2<f64>,
    /// worst imaginary residue relative to the column max (eps>0 continuation)
    pub max_imag_residual: f64,
}

impl LftMatrix {
    pub fn n_channels(&self) -> usize {
        self.n1_set.len()
    }
    pub fn n_ell(&self) -> usize {
        (self.ell_max - self.spec.m.abs() + 1) as usize
    }
    pub fn ell_of_col(&self, col: usize) -> i32 {
        self.spec.m.abs() + col as i32
    }
}

pub fn lft_matrix(
    spec: &ProblemSpec,
    channels: &[XiChannel],
    ell_max: i32,
) -> Result<LftMatrix> {
    let m = spec.m.abs();
    if ell_max < m {
        return Err(Error::Domain(format!(
            "ell_max = {ell_max} below |m| = {m}"
        )));
    }
    let retained: Vec<&XiChannel> = channels
        .iter()
        .filter(|c| spec.energy > 0.0 || c.beta < 1.0)
        .collect();
    if retained.is_empty() {
        return Err(Error::Domain("no retainable channels supplied".into()));
    }
    let n_ell = (ell_max - m + 1) as usize;
    let mut u = Array2::<f64>::zeros((retained.len(), n_ell));
    let mut u_imag = Array2::<f64>::zeros((retained.len(), n_ell));
    for (row, ch) in retained.iter().enumerate() {
        let ln_ne = ln_n_eta_ff(spec, ch.beta)?;
        for col in 0..n_ell {
            let ell = m + col as i32;
            let ln_nl = ln_n_eps_ell(spec, ell)?;
            let t = t_comb(spec, ch.beta, ell)?;
            let amp = ch.n_xi * (ln_ne - ln_nl).exp();
            u[(row, col)] = amp * t.re;
            u_imag[(row, col)] = amp * t.im;
        }
    }
    let mut max_resid = 0.0f64;
    for col in 0..n_ell {
        let col_max = (0..retained.len())
            .map(|r| u[(r, col)].abs())
            .fold(0.0, f64::max);
        let imag_max = (0..retained.len())
            .map(|r| u_imag[(r, col)].abs())
            .fold(0.0, f64::max);
        if col_max > 0.0 {
            max_resid = max_resid.max(imag_max / col_max);
        }
    }
    if max_resid > 1e-10 {
        return Err(Error::Convergence(format!(
            "analytic continuation left imaginary residue {max_resid:.2e} (> 1e-10)"
        )));
    }
    Ok(LftMatrix {
        spec: *spec,
        ell_max,
        n1_set: retained.iter().map(|c| c.n1).collect(),
        betas: retained.iter().map(|c| c.beta).collect(),
        u,
        max_imag_residual: max_resid,
    })
}

/// Coefficients of the parabolic expansion of a spherical regular solution:
/// the minimum-norm solution of U^T x = d (pseudo-inverse when U is
/// rectangular).  Returns (x, residual of the projected system).
pub fn map_regular_to_parabolic(lft: &LftMatrix, d_sph: &[f64]) -> Result<(Vec<f64>, f64)> {
    let (n_ch, n_ell) = (lft.n_channels(), lft.n_ell());
    if d_sph.len() != n_ell {
        return Err(Error::Domain(format!(
            "expected {n_ell} spherical coefficients, got {}",
            d_sph.len()
        )));
    }
    // U^T: (n_ell x n_ch); SVD of U directly: U = W S V^T, U^T = V S W^T
    let (w_opt, s, vt_opt) = lft
        .u
        .svd(true, true)
        .map_err(|e| Error::Linalg(format!("svd failed: {e}")))?;
    let w = w_opt.unwrap();
    let vt = vt_opt.unwrap();
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let rank_tol = smax * 1e-12;
    if s.iter().take(n_ell.min(n_ch)).any(|&sv| sv < rank_tol) {
        return Err(Error::Linalg(format!(
            "transformation rank-deficient: condition > 1e12 (smin/smax = {:.2e})",
            s.iter().cloned().fold(f64::MAX, f64::min) / smax
        )));
    }
    // x = W S^{-1} V^T^T? minimum-norm solution of U^T x = d: x = W S^{-1} V d
    // with U = W S V^T (V: n_ell x n_ell here since n_ell <= n_ch)
    let d = Array1::from(d_sph.to_vec());
    let vd = vt.dot(&d); // (min_dim)
    let mut x = Array1::<f64>::zeros(n_ch);
    for j in 0..s.len() {
        if s[j] > rank_tol {
            let c = vd[j] / s[j];
            for i in 0..n_ch {
                x[i] += w[(i, j)] * c;
            }
        }
    }
    // residual of U^T x - d
    let mut resid = 0.0f64;
    for col in 0..n_ell {
        let mut acc = 0.0;
        for i in 0..n_ch {
            acc += lft.u[(i, col)] * x[i];
        }
        resid = resid.max((acc - d[col]).abs());
    }
    Ok((x.to_vec(), resid))
}

// ---------------------------------------------------------------------------
// irregular reconstruction (Eq. 10 bookkeeping)
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChiMode {
    /// field-free analytic parabolic functions for chi (the short-range
    /// evaluation shortcut used for the figure-style comparisons)
    AnalyticFieldFree,
    /// numeric eta-channel solutions in the true field
    NumericEta,
    /// pick per the F r^2 < 1e-6 criterion over the whole point set
    Auto,
}

pub struct Reconstruction {
    pub r: Vec<f64>,
    pub theta: f64,
    pub ell: i32,
    /// g^{LFT}(r)/r * Theta_lm(cos theta)
    pub values: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Plain Numerov sweep used by the short-range evaluators here.
fn numerov(q: &[f64], h: f64, s0: f64, s1: f64, outward: bool) -> Vec<f64> {
    let n = q.len();
    let w: Vec<f64> = q.iter().map(|&qq| 1.0 + h * h / 12.0 * qq).collect();
    let mut v = vec![0.0; n];
    if outward {
        v[0] = s0;
        v[1] = s1;
        for i in 1..n - 1 {
            v[i + 1] = ((12.0 - 10.0 * w[i]) * v[i] - w[i - 1] * v[i - 1]) / w[i + 1];
        }
    } else {
        v[n - 1] = s0;
        v[n - 2] = s1;
        for i in (1..n - 1).rev() {
            v[i - 1] = ((12.0 - 10.0 * w[i]) * v[i] - w[i + 1] * v[i + 1]) / w[i - 1];
        }
    }
    v
}

/// Quadratic interpolation on a uniform grid.
fn interp3(x0: f64, h: f64, vals: &[f64], x: f64) -> f64 {
    let fi = ((x - x0) / h).round() as i64;
    let i = (fi.max(1) as usize).min(vals.len() - 2);
    let t = (x - (x0 + h * i as f64)) / h;
    vals[i] + 0.5 * t * (vals[i + 1] - vals[i - 1])
        + 0.5 * t * t * (vals[i + 1] - 2.0 * vals[i] + vals[i - 1])
}

/// Unit-leading-coefficient regular xi function (field per `spec`) at the
/// requested xi points: outward Numerov in s = sqrt(xi) seeded by the power
/// series, Xi-hat ~ xi^{(m+1)/2} (1 + ...).
pub fn xihat_on(spec: &ProblemSpec, beta: f64, xi_targets: &[f64]) -> Vec<f64> {
    let m = spec.m.abs() as f64;
    let xi_max = xi_targets.iter().cloned().fold(0.0, f64::max);
    let h = 2.5e-3;
    let s0 = 0.03;
    let n = ((xi_max.sqrt() * 1.0001 - s0) / h).ceil() as usize + 3;
    let q: Vec<f64> = (0..n)
        .map(|i| {
            let s = s0 + h * i as f64;
            let xi = s * s;
            4.0 * xi
                * (spec.energy / 2.0 + beta / xi - spec.field * xi / 4.0
                    - (m * m - 1.0) / (4.0 * xi * xi))
                - 0.75 / xi
        })
        .collect();
    let ser = phi_series(spec, beta, 24);
    let useries = |xi: f64| {
        let mut acc = 0.0;
        for &c in ser.iter().rev() {
            acc = acc * xi + c;
        }
        xi.powf((m + 1.0) / 2.0) * acc
    };
    let sv0 = useries(s0 * s0) / s0.sqrt();
    let sv1 = useries((s0 + h) * (s0 + h)) / (s0 + h).sqrt();
    let v = numerov(&q, h, sv0, sv1, true);
    let u: Vec<f64> = v
        .iter()
        .enumerate()
        .map(|(i, &vv)| vv * (s0 + h * i as f64).sqrt())
        .collect();
    xi_targets
        .iter()
        .map(|&xi| interp3(s0, h, &u, xi.sqrt()))
        .collect()
}

/// G-hat = N_eta^ff * gbar_ff at the requested eta points (field-free
/// irregular eta function with the channel normalization attached).
pub fn ghat_on(spec: &ProblemSpec, beta: f64, eta_targets: &[f64]) -> Result<Vec<f64>> {
    let lam = (spec.m.abs() as f64 - 1.0) / 2.0;
    let z = (1.0 - beta) / 2.0;
    let ln_ne = ln_n_eta_ff(spec, beta)?;
    if spec.energy > 0.0 {
        let pair = positive_pair::pair_on_grid(spec.energy / 2.0, z, lam, eta_targets)?;
        Ok(pair.g_vals.iter().map(|&g| ln_ne.exp() * g).collect())
    } else {
        let nu = 1.0 / (-2.0 * spec.energy).sqrt();
        let nubar = (1.0 - beta) * nu;
        let s = (2.0 / (1.0 - beta)).sqrt();
        let scale = ln_ne.exp() * s;
        eta_targets
            .iter()
            .map(|&eta| {
                let (_f, _fp, g, _gp) = bound_pair::pair_point(lam, nubar, z * eta)?;
                Ok(scale * g)
            })
            .collect()
    }
}

/// Energy-normalized spherical irregular reference
/// gbar_l(r)/r * Theta_lm(cos theta) on the r grid (both energy signs).
pub fn reference_irregular_spherical(
    spec: &ProblemSpec,
    ell: i32,
    r_grid: &[f64],
    theta: f64,
) -> Result<Vec<f64>> {
    let th = theta_lm(ell, spec.m, theta.cos());
    if spec.energy > 0.0 {
        let pair = positive_pair::pair_on_grid(2.0 * spec.energy, 1.0, ell as f64, r_grid)?;
        Ok(pair
            .g_vals
            .iter()
            .zip(r_grid)
            .map(|(&g, &r)| g / r * th)
            .collect())
    } else {
        let pair = bound_pair::coulomb_pair_spherical(spec.energy, ell as u32, r_grid)?;
        Ok(pair
            .g_vals
            .iter()
            .zip(r_grid)
            .map(|(&g, &r)| g / r * th)
            .collect())
    }
}

/// Eq. 10: rebuild the spherical irregular solution from the parabolic
/// channel set.  Points are (r_i, theta); r must be strictly increasing.
pub fn reconstruct_irregular_spherical(
    spec: &ProblemSpec,
    channels: &[XiChannel],
    ell: i32,
    r_grid: &[f64],
    theta: f64,
    mode: ChiMode,
) -> Result<Reconstruction> {
    if r_grid.is_empty() || r_grid.windows(2).any(|w| w[1] <= w[0]) || r_grid[0] <= 0.0 {
        return Err(Error::Domain("r grid must be positive increasing".into()));
    }
    let m = spec.m.abs();
    if ell < m {
        return Err(Error::Domain(format!("ell = {ell} < |m| = {m}")));
    }
    let mut warnings = Vec::new();
    let r_max = r_grid[r_grid.len() - 1];
    let fr2 = spec.field * r_max * r_max;
    let mode = match mode {
        ChiMode::Auto => {
            if fr2 < 1e-6 {
                ChiMode::AnalyticFieldFree
            } else {
                ChiMode::NumericEta
            }
        }
        other => other,
    };
    if fr2 > 0.1 {
        warnings.push(format!(
            "outer points leave the Coulomb zone: F r^2 = {fr2:.2e}"
        ));
    }
    let ct = theta.cos();
    let xi_r: Vec<f64> = r_grid.iter().map(|&r| r * (1.0 + ct)).collect();
    let eta_r: Vec<f64> = r_grid.iter().map(|&r| r * (1.0 - ct)).collect();
    let eta_max = eta_r.iter().cloned().fold(0.0, f64::max);
    let ff_spec = ProblemSpec {
        field: 0.0,
        ..*spec
    };
    let ln_nl = ln_n_eps_ell(spec, ell)?;

    let mut vals = vec![0.0f64; r_grid.len()];
    for ch in channels {
        if spec.energy < 0.0 && ch.beta >= 1.0 {
            continue; // truncation prescription at negative energy
        }
        let t = t_comb(spec, ch.beta, ell)?.re;
        if ch.n_xi * ch.n_xi * t.abs() < 1e-20 {
            continue;
        }
        let xh = xihat_on(&ff_spec, ch.beta, &xi_r);
        let gh: Vec<f64> = match mode {
            ChiMode::AnalyticFieldFree => ghat_on(spec, ch.beta, &eta_r)?,
            ChiMode::NumericEta => {
                let ech = crate::eta_channels::EtaChannelParams {
                    beta: ch.beta,
                    m: spec.m,
                    energy: spec.energy,
                    field: spec.field,
                };
                let hint = 1.5 * (0.1 / spec.field.sqrt()).max(1.05 * eta_max);
                let pair = crate::eta_channels::solve_eta_channel(&ech, None, Some(hint))?;
                let ln_ne = ln_n_eta_ff(spec, ch.beta)?;
                eta_r
                    .iter()
                    .map(|&eta| {
                        let (_uf, _ufp, ug, _ugp) = pair.eval_raw(eta);
                        ln_ne.exp() * ug
                    })
                    .collect()
            }
            ChiMode::Auto => unreachable!(),
        };
        let w = ch.n_xi * ch.n_xi * t / ln_nl.exp();
        for i in 0..vals.len() {
            vals[i] += w * xh[i] * gh[i] / (xi_r[i] * eta_r[i]).sqrt();
        }
    }
    // the angular factor Theta_lm is already carried by the combinatoric sum
    Ok(Reconstruction {
        r: r_grid.to_vec(),
        theta,
        ell,
        values: vals,
        warnings,
    })
}

/// Short-range phase-nonuniformity estimate of the field:
/// delta phi = -(sqrt 2 / 5) F r^{5/2} cos theta.  The bool is false when the
/// F r^2 << 1 validity condition is violated (value still returned).
pub fn phase_uniformity_bound(field: f64, r: f64, theta: f64) -> (f64, bool) {
    let dphi = -(2f64.sqrt() / 5.0) * field * r.powf(2.5) * theta.cos();
    (dphi, field * r * r < 0.1)
}
