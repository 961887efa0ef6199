//! Bound xi-coordinate channels: quantize the effective charge beta at fixed
//! (energy, field, m) and extract the small-xi amplitudes N_xi.
//!
//! The xi equation
//!   Xi'' + [eps/2 + beta/xi - (m^2-1)/(4 xi^2) - F xi/4] Xi = 0
//! is solved as a generalized eigenvalue problem in beta.  Writing
//! Xi = xi^{(m+1)/2} phi removes the xi^{(m+1)/2} cusp exactly, leaving the
//! self-adjoint form
//!   (xi^{m+1} phi')' + (eps/2 - F xi/4) xi^{m+1} phi = -beta xi^m phi ,
//! i.e. A phi = beta B phi with the positive-definite 1/xi weight acting on
//! Xi.  Galerkin discretization on an order-8 B-spline basis gives banded
//! symmetric A, B handled by LAPACK dsbgvx.

use crate::bspline::{density_breaks, gauss_on, BsplineBasis};
use crate::{Error, ProblemSpec, Result};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct XiChannel {
    pub n1: usize,
    pub beta: f64,
    pub m: i32,
    pub energy: f64,
    pub field: f64,
    /// small-xi amplitude: Xi ~ N_xi xi^{(m+1)/2}
    pub n_xi: f64,
    pub xi_grid: Vec<f64>,
    pub xi_vals: Vec<f64>,
    basis: Arc<BsplineBasis>,
    /// coefficients of phi = Xi / xi^{(m+1)/2}
    coef: Vec<f64>,
}

impl XiChannel {
    /// Xi(xi), normalized to \int Xi^2/xi dxi = 1.
    pub fn eval(&self, xi: f64) -> f64 {
        if xi < 0.0 || xi > *self.basis.breaks.last().unwrap() {
            return 0.0;
        }
        let (phi, _) = self.basis.eval_expansion(&self.coef, xi);
        phi * xi.powf((self.m as f64 + 1.0) / 2.0)
    }

    /// (Xi, dXi/dxi) at a point.
    pub fn eval_with_deriv(&self, xi: f64) -> (f64, f64) {
        let s = (self.m as f64 + 1.0) / 2.0;
        let (phi, dphi) = self.basis.eval_expansion(&self.coef, xi);
        let p = xi.powf(s);
        (phi * p, dphi * p + phi * s * p / xi)
    }

    pub fn node_count(&self) -> usize {
        count_sign_changes(&self.xi_vals)
    }
}

fn count_sign_changes(vals: &[f64]) -> usize {
    let mx = vals.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let thr = 1e-8 * mx;
    let mut last = 0.0f64;
    let mut n = 0;
    for &v in vals {
        if v.abs() <= thr {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            n += 1;
        }
        last = v.signum();
    }
    n
}

/// Langer-corrected local momentum squared of the xi motion.
fn q_local(spec: &ProblemSpec, beta: f64, xi: f64) -> f64 {
    let m2 = (spec.m * spec.m) as f64;
    spec.energy / 2.0 + beta / xi - spec.field * xi / 4.0 - m2 / (4.0 * xi * xi)
}

/// Outer classical turning point of the xi potential at the given beta.
pub fn xi_turning_point(spec: &ProblemSpec, beta: f64) -> Result<f64> {
    // ignore the centrifugal term for the bracket, then refine by bisection
    let disc = spec.energy * spec.energy / 4.0 + spec.field * beta;
    if spec.field <= 0.0 {
        return Err(Error::Domain("turning point needs F > 0".into()));
    }
    if disc <= 0.0 {
        return Err(Error::Domain(format!(
            "no classically allowed xi region for beta = {beta}"
        )));
    }
    let tp0 = (spec.energy / 2.0 + disc.sqrt()) * 2.0 / spec.field;
    let mut lo = tp0 * 0.5;
    let mut hi = tp0 * 2.0;
    if q_local(spec, beta, lo) < 0.0 || q_local(spec, beta, hi) > 0.0 {
        // centrifugal term matters; crude scan
        lo = tp0 * 1e-3;
        hi = tp0 * 4.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q_local(spec, beta, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// WKB estimate of the number of xi states with eigenvalue below beta.
fn wkb_count(spec: &ProblemSpec, beta: f64) -> f64 {
    let tp = match xi_turning_point(spec, beta) {
        Ok(t) => t,
        Err(_) => return 0.0,
    };
    let n_panel = 400;
    let mut phase = 0.0;
    for i in 0..n_panel {
        let a = tp * i as f64 / n_panel as f64;
        let b = tp * (i + 1) as f64 / n_panel as f64;
        for (x, w) in gauss_on(a.max(1e-12), b) {
            let q = q_local(spec, beta, x);
            if q > 0.0 {
                phase += w * q.sqrt();
            }
        }
    }
    phase / std::f64::consts::PI
}

/// Estimate the largest eigenvalue beta_{n1_max} by inverting the WKB count.
pub fn beta_max_estimate(spec: &ProblemSpec, n1_max: usize) -> Result<f64> {
    let target = n1_max as f64 + 2.0;
    let mut hi = 1.0;
    while wkb_count(spec, hi) < target {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Convergence("beta_max estimate diverged".into()));
        }
    }
    let mut lo = 1e-8;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if wkb_count(spec, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Default domain size: 1.5x the outer turning point at the largest requested
/// beta (the spec's beta=1 rule truncates the highest channels, so the rule is
/// applied at beta_max instead).
pub fn default_xi_max(spec: &ProblemSpec, n1_max: usize) -> Result<f64> {
    let bmax = beta_max_estimate(spec, n1_max)?;
    let tp = xi_turning_point(spec, bmax)?;
    let mut xi_max = 1.5 * tp;
    // for weak fields the Airy wall is soft; extend until the WKB decay
    // integral guarantees the Dirichlet tail tolerance
    loop {
        let mut decay = 0.0;
        for (x, w) in gauss_on(tp, xi_max) {
            let q = q_local(spec, bmax, x);
            if q < 0.0 {
                decay += w * (-q).sqrt();
            }
        }
        if decay > 18.0 || xi_max > 20.0 * tp {
            break;
        }
        xi_max *= 1.15;
    }
    Ok(xi_max)
}

/// Power-series coefficients a_p of phi = sum_p a_p xi^p for the regular
/// solution at given beta (a_0 = 1), including the field term.
pub fn phi_series(spec: &ProblemSpec, beta: f64, n_terms: usize) -> Vec<f64> {
    let m = spec.m.unsigned_abs() as f64;
    let mut a = vec![0.0; n_terms];
    a[0] = 1.0;
    for p in 1..n_terms {
        let mut rhs = beta * a[p - 1];
        if p >= 2 {
            rhs += spec.energy / 2.0 * a[p - 2];
        }
        if p >= 3 {
            rhs -= spec.field / 4.0 * a[p - 3];
        }
        a[p] = -rhs / (p as f64 * (p as f64 + m));
    }
    a
}

pub fn solve_xi_channels(
    spec: &ProblemSpec,
    n1_max: usize,
    xi_max: f64,
) -> Result<Vec<XiChannel>> {
    if spec.field < 0.0 {
        return Err(Error::Domain("field must be >= 0".into()));
    }
    if xi_max <= 0.0 {
        return Err(Error::Domain("xi_max must be positive".into()));
    }
    let m_abs = spec.m.unsigned_abs() as i32;
    let sm = (m_abs as f64 + 1.0) / 2.0;
    let beta_hi = beta_max_estimate(spec, n1_max).unwrap_or(1.0).max(1.0);

    // knot density ~ local wavenumber at beta_hi, floored so the forbidden
    // tail keeps resolution; 8 intervals per half wavelength.  Equidistributed
    // in x = sqrt(xi) where the Coulomb-region density stays finite.
    let floor = 8.0 / xi_max;
    let x_max = xi_max.sqrt();
    let density_x = |x: f64| {
        let xi = (x * x).max(1e-14);
        let q = q_local(spec, beta_hi, xi) + (m_abs * m_abs) as f64 / (4.0 * xi * xi);
        2.0 * x.max(1e-7) * ((q.abs().sqrt() * if q > 0.0 { 1.0 } else { 0.6 }) + floor)
    };
    let mut phase = 0.0;
    let fine = 4000;
    for i in 0..fine {
        let a = x_max * i as f64 / fine as f64;
        let b = x_max * (i + 1) as f64 / fine as f64;
        phase += (b - a) * density_x(0.5 * (a + b));
    }
    let n_int = ((phase * 8.0 / std::f64::consts::PI).ceil() as usize).max(n1_max + 10) + 16;
    let breaks_x = density_breaks(density_x, 0.0, x_max, n_int);
    let breaks: Vec<f64> = breaks_x.iter().map(|&x| x * x).collect();
    let order = 8;
    let basis = Arc::new(BsplineBasis::new(order, &breaks)?);
    let nb = basis.n();
    let n = nb - 1; // Dirichlet at xi_max: drop the last spline

    // banded upper storage, bandwidth = order-1
    let ka = order - 1;
    let ldab = ka + 1;
    let mut ab = vec![0.0f64; ldab * n];
    let mut bb = vec![0.0f64; ldab * n];
    let mp1 = (m_abs + 1) as i32;
    for iv in 0..n_int {
        let (a, b) = (breaks[iv], breaks[iv + 1]);
        for (x, w) in gauss_on(a, b) {
            let (first, d) = basis.eval_ders(x, 1);
            let wm = w * x.powi(m_abs);
            let wm1 = wm * x;
            let pot = spec.energy / 2.0 - spec.field * x / 4.0;
            for jl in 0..order {
                let j = first + jl;
                if j >= n {
                    continue;
                }
                for il in 0..=jl {
                    let i = first + il;
                    let va = wm1 * (d[1][il] * d[1][jl] - pot * d[0][il] * d[0][jl]);
                    let vb = wm * d[0][il] * d[0][jl];
                    let idx = ka + i - j + j * ldab;
                    ab[idx] += va;
                    bb[idx] += vb;
                }
            }
        }
        let _ = mp1;
    }

    // dsbgvx: lowest n1_max+1 eigenpairs
    let n_want = n1_max + 1;
    if n_want > n {
        return Err(Error::Domain(format!(
            "basis too small ({n}) for {n_want} channels"
        )));
    }
    let ni = n as i32;
    let mut q = vec![0.0f64; n * n];
    let mut w = vec![0.0f64; n];
    let mut z = vec![0.0f64; n * n_want];
    let mut work = vec![0.0f64; 7 * n];
    let mut iwork = vec![0i32; 5 * n];
    let mut ifail = vec![0i32; n];
    let mut m_found = 0i32;
    let mut info = 0i32;
    unsafe {
        lapack::dsbgvx(
            b'V',
            b'I',
            b'U',
            ni,
            ka as i32,
            ka as i32,
            &mut ab,
            ldab as i32,
            &mut bb,
            ldab as i32,
            &mut q,
            ni,
            0.0,
            0.0,
            1,
            n_want as i32,
            2.0 * f64::MIN_POSITIVE,
            &mut m_found,
            &mut w,
            &mut z,
            ni,
            &mut work,
            &mut iwork,
            &mut ifail,
            &mut info,
        );
    }
    if info != 0 || m_found as usize != n_want {
        return Err(Error::Linalg(format!(
            "dsbgvx failed: info={info}, found {m_found}/{n_want} eigenpairs"
        )));
    }

    // sampling grid for node counts / output
    let mut grid = Vec::with_capacity(4 * n_int);
    for iv in 0..n_int {
        for k in 0..4 {
            grid.push(breaks[iv] + (breaks[iv + 1] - breaks[iv]) * (k as f64 + 0.5) / 4.0);
        }
    }

    let fit_hi = (0.05 * xi_max).min(4.0);
    let series = |beta: f64| phi_series(spec, beta, 40);

    let mut out = Vec::with_capacity(n_want);
    for j in 0..n_want {
        let mut coef: Vec<f64> = z[j * n..(j + 1) * n].to_vec();
        coef.push(0.0); // Dirichlet spline restored

        // small-xi amplitude by least-squares against the regular series shape
        let a_ser = series(w[j]);
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..40 {
            let xi = fit_hi * (k as f64 + 1.0) / 40.0;
            let mut shape = 0.0;
            let mut pw = 1.0;
            for &ap in &a_ser {
                shape += ap * pw;
                pw *= xi;
            }
            let (phi, _) = basis.eval_expansion(&coef, xi);
            num += phi * shape;
            den += shape * shape;
        }
        let mut n_xi = num / den;
        if n_xi < 0.0 {
            n_xi = -n_xi;
            for c in coef.iter_mut() {
                *c = -*c;
            }
        }

        let xi_vals: Vec<f64> = grid
            .iter()
            .map(|&xi| {
                let (phi, _) = basis.eval_expansion(&coef, xi);
                phi * xi.powf(sm)
            })
            .collect();

        // Dirichlet-accuracy check on the outer tail
        let mx = xi_vals.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let tail = grid
            .iter()
            .zip(xi_vals.iter())
            .filter(|(&xi, _)| xi > 0.98 * xi_max)
            .fold(0.0f64, |a, (_, &v)| a.max(v.abs()));
        if tail > 1e-6 * mx {
            return Err(Error::Truncation(format!(
                "xi_max = {xi_max} too small: channel n1 = {j} has boundary tail {:.2e} of max",
                tail / mx
            )));
        }

        out.push(XiChannel {
            n1: j,
            beta: w[j],
            m: spec.m,
            energy: spec.energy,
            field: spec.field,
            n_xi,
            xi_grid: grid.clone(),
            xi_vals,
            basis: basis.clone(),
            coef,
        });
    }
    Ok(out)
}

/// Proportional small-xi/small-eta amplitude estimates, valid for energy > 0.
pub fn amplitude_estimate(beta: f64, energy: f64) -> Result<(f64, f64)> {
    if energy <= 0.0 {
        return Err(Error::Unsupported(
            "amplitude estimate defined for positive energy only".into(),
        ));
    }
    let k = (2.0 * energy).sqrt();
    let est = |x: f64| {
        let a = 2.0 * std::f64::consts::PI / k;
        if (a * x).abs() < 1e-8 {
            1.0 / a
        } else {
            x / (1.0 - (-a * x).exp())
        }
    };
    Ok((est(beta), est(1.0 - beta)))
}
