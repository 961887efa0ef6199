//! Down-field eta-coordinate channels: two-surface eigenchannel R-matrix
//! solution of
//!   u'' + [eps/2 + (1-beta)/eta - (m^2-1)/(4 eta^2) + F eta/4] u = 0
//! on [eta1, eta2], matched at eta1 to the field-free regular/irregular pair
//! and phase-analyzed at eta2 where the motion is WKB-smooth.
//!
//! The variational solve runs in y = sqrt(eta) (v = u / sqrt(y'), eta = y^2):
//!   v'' + q(y) v = 0,
//!   q(y) = 2 eps y^2 + 4(1-beta) + F y^4 - [(m^2-1) + 3/4]/y^2 .

use crate::bspline::{density_breaks, gauss_on, BsplineBasis};
use crate::special::{bound_pair, positive_pair};
use crate::{Error, Result};
use std::sync::Arc;

pub const DEFAULT_ETA1: f64 = 0.05;

#[derive(Clone, Copy, Debug)]
pub struct EtaChannelParams {
    pub beta: f64,
    pub m: i32,
    pub energy: f64,
    pub field: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BarrierClass {
    AboveBarrier,
    BelowBarrier,
    /// beta > 1: repulsive Coulomb term, no barrier maximum forms
    NoBarrier,
}

/// Squared local momentum k^2(eta); the exact ODE coefficient (the m=1 case
/// has no centrifugal term at all).
pub fn k_squared(ch: &EtaChannelParams, eta: f64) -> f64 {
    let m2 = (ch.m * ch.m) as f64;
    ch.energy / 2.0 + (1.0 - ch.beta) / eta + ch.field * eta / 4.0
        - (m2 - 1.0) / (4.0 * eta * eta)
}

/// (|k|, classically_forbidden) at eta.
pub fn local_momentum(ch: &EtaChannelParams, eta: f64) -> (f64, bool) {
    let k2 = k_squared(ch, eta);
    (k2.abs().sqrt(), k2 < 0.0)
}

fn dk2_deta(ch: &EtaChannelParams, eta: f64) -> f64 {
    let m2 = (ch.m * ch.m) as f64;
    -(1.0 - ch.beta) / (eta * eta) + ch.field / 4.0 + (m2 - 1.0) / (2.0 * eta * eta * eta)
}

fn d2k2_deta2(ch: &EtaChannelParams, eta: f64) -> f64 {
    let m2 = (ch.m * ch.m) as f64;
    2.0 * (1.0 - ch.beta) / eta.powi(3) - 1.5 * (m2 - 1.0) / eta.powi(4)
}

/// Second-order WKB phase density 3 k'^2 / (8 k^3) - k''/(4 k^2); its tail
/// integral makes the extracted delta independent of the analysis surface.
fn wkb_phase_correction_density(ch: &EtaChannelParams, eta: f64) -> f64 {
    let k2 = k_squared(ch, eta);
    let k = k2.sqrt();
    let kp = dk2_deta(ch, eta) / (2.0 * k);
    let kpp = (d2k2_deta2(ch, eta) - 2.0 * kp * kp) / (2.0 * k);
    3.0 * kp * kp / (8.0 * k2 * k) - kpp / (4.0 * k2)
}

/// int_{eta2}^{inf} of the correction density (log panels to convergence).
fn wkb_phase_correction_tail(ch: &EtaChannelParams, eta2: f64) -> f64 {
    let mut total = 0.0;
    let mut a = eta2;
    for _ in 0..200 {
        let b = a * 1.5;
        let mut part = 0.0;
        for (eta, w) in gauss_on(a, b) {
            part += w * wkb_phase_correction_density(ch, eta);
        }
        total += part;
        a = b;
        if part.abs() < 1e-12 && a > 100.0 * eta2 {
            break;
        }
    }
    total
}

/// int_a^b of the second-order correction density, for propagating the phase
/// between two post-barrier analysis points.
pub fn phase_correction_integral(ch: &EtaChannelParams, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n_panel = (8.0 * (b / a).ln()).ceil() as usize + 4;
    let lr = (b / a).ln();
    let mut total = 0.0;
    for i in 0..n_panel {
        let e0 = a * (lr * i as f64 / n_panel as f64).exp();
        let e1 = a * (lr * (i + 1) as f64 / n_panel as f64).exp();
        for (eta, w) in gauss_on(e0, e1) {
            total += w * wkb_phase_correction_density(ch, eta);
        }
    }
    total
}

/// v-space coefficient q(y), y = sqrt(eta).
fn q_y(ch: &EtaChannelParams, y: f64) -> f64 {
    let m2 = (ch.m * ch.m) as f64;
    2.0 * ch.energy * y * y + 4.0 * (1.0 - ch.beta) + ch.field * y.powi(4)
        - ((m2 - 1.0) + 0.75) / (y * y)
}

/// Outermost classical turning point (largest root of k^2), if any, searched
/// on (1e-4, eta_hi).
pub fn outer_turning_point(ch: &EtaChannelParams, eta_hi: f64) -> Option<f64> {
    let n = 2000;
    let lo = 1e-4f64;
    let lr = (eta_hi / lo).ln();
    let mut last = k_squared(ch, lo);
    let mut last_eta = lo;
    let mut root = None;
    for i in 1..=n {
        let eta = lo * (lr * i as f64 / n as f64).exp();
        let cur = k_squared(ch, eta);
        if last < 0.0 && cur >= 0.0 || last >= 0.0 && cur < 0.0 {
            let (mut a, mut b) = (last_eta, eta);
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                if (k_squared(ch, mid) < 0.0) == (last < 0.0) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            root = Some(0.5 * (a + b));
        }
        last = cur;
        last_eta = eta;
    }
    root
}

pub fn classify_barrier(ch: &EtaChannelParams, eta_hi: f64) -> BarrierClass {
    if ch.beta > 1.0 {
        return BarrierClass::NoBarrier;
    }
    // look for a forbidden dip with allowed regions on both sides
    let n = 2000;
    let lo = 1e-3f64;
    let lr = (eta_hi / lo).ln();
    let mut seen_allowed = false;
    let mut dipped = false;
    for i in 0..=n {
        let eta = lo * (lr * i as f64 / n as f64).exp();
        let k2 = k_squared(ch, eta);
        if k2 > 0.0 {
            if dipped {
                return BarrierClass::BelowBarrier;
            }
            seen_allowed = true;
        } else if seen_allowed {
            dipped = true;
        }
    }
    BarrierClass::AboveBarrier
}

/// Phase integral int_a^b k deta for an all-allowed stretch; panels are
/// log-spaced and a sqrt substitution absorbs the turning-point singularity
/// when `a` sits at (or near) a zero of k^2.
pub fn phase_integral(ch: &EtaChannelParams, a: f64, b: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mut total = 0.0;
    // turning-point layer: integrate in t = sqrt(eta - a)
    let layer = ((b - a) * 0.02).min(1.0_f64.max(0.01 * a));
    let t_max = layer.sqrt();
    for i in 0..16 {
        let t0 = t_max * i as f64 / 16.0;
        let t1 = t_max * (i + 1) as f64 / 16.0;
        for (t, w) in gauss_on(t0, t1) {
            let eta = a + t * t;
            let k2 = k_squared(ch, eta);
            total += w * 2.0 * t * k2.max(0.0).sqrt();
            if k2 < -1e-12 * (1.0 + k2.abs()) && t * t > 1e-3 * layer {
                return Err(Error::Domain(format!(
                    "phase integral entered forbidden region at eta = {eta}"
                )));
            }
        }
    }
    let start = a + layer;
    let n_panel = (64.0 * (b / start).ln().max(1.0)).ceil() as usize + 8;
    let lr = (b / start).ln();
    for i in 0..n_panel {
        let e0 = start * (lr * i as f64 / n_panel as f64).exp();
        let e1 = start * (lr * (i + 1) as f64 / n_panel as f64).exp();
        for (eta, w) in gauss_on(e0, e1) {
            let k2 = k_squared(ch, eta);
            if k2 < 0.0 {
                return Err(Error::Domain(format!(
                    "phase integral entered forbidden region at eta = {eta}"
                )));
            }
            total += w * k2.sqrt();
        }
    }
    Ok(total)
}

/// Field-free boundary pair (f, f', g, g') of the eta equation at a point in
/// the Coulomb zone, energy-normalized (W[f,g] = 2/pi in eta).
pub fn field_free_eta_pair(ch: &EtaChannelParams, eta: f64) -> Result<(f64, f64, f64, f64)> {
    let lam = (ch.m.unsigned_abs() as f64 - 1.0) / 2.0;
    let z = (1.0 - ch.beta) / 2.0;
    if ch.energy > 0.0 {
        let pair = positive_pair::pair_on_grid(ch.energy / 2.0, z, lam, &[eta])?;
        Ok((
            pair.f_vals[0],
            pair.f_deriv[0],
            pair.g_vals[0],
            pair.g_deriv[0],
        ))
    } else {
        if ch.beta >= 1.0 {
            return Err(Error::Unsupported(format!(
                "negative-energy channel with beta = {} >= 1 omitted (solutions no longer real)",
                ch.beta
            )));
        }
        let nu = 1.0 / (-2.0 * ch.energy).sqrt();
        let nubar = (1.0 - ch.beta) * nu;
        let zeta = z * eta;
        let (f, fp, g, gp) = bound_pair::pair_point(lam, nubar, zeta)?;
        let s = (2.0 / (1.0 - ch.beta)).sqrt();
        Ok((s * f, s * z * fp, s * g, s * z * gp))
    }
}

// ---------------------------------------------------------------------------
// two-surface workspace
// ---------------------------------------------------------------------------

pub struct RMatrixWorkspace {
    pub channel: EtaChannelParams,
    pub eta1: f64,
    pub eta2: f64,
    pub basis: Arc<BsplineBasis>,
    /// closed-closed block of Gamma in LAPACK general-band storage (for the
    /// streamlined Schur elimination), dimension nb-2, kl = ku = order-1
    cc_band: Vec<f64>,
    cc_ldab: usize,
    /// open rows Gamma_I,C (I = {first, last spline})
    gic: [Vec<f64>; 2],
    gii: [[f64; 2]; 2],
}

impl RMatrixWorkspace {
    /// nonzero pattern of the surface operator Lambda: exactly (I,I) and (O,O)
    pub fn lambda_pattern(&self) -> [(usize, usize); 2] {
        let nb = self.basis.n();
        [(0, 0), (nb - 1, nb - 1)]
    }
}

/// Knot break points for a channel on [y1, y2]: 24 intervals per half
/// wavelength of the local q, floored in the forbidden region.
fn eta_breaks(ch: &EtaChannelParams, y1: f64, y2: f64) -> Vec<f64> {
    let floor = 10.0 / (y2 - y1);
    let density = |y: f64| {
        let q = q_y(ch, y.max(1e-6));
        q.abs().sqrt() * if q > 0.0 { 1.0 } else { 0.85 } + floor
    };
    let mut phase = 0.0;
    let fine = 3000;
    for i in 0..fine {
        let a = y1 + (y2 - y1) * i as f64 / fine as f64;
        let b = y1 + (y2 - y1) * (i + 1) as f64 / fine as f64;
        phase += (b - a) * density(0.5 * (a + b));
    }
    let n_int = ((phase * 56.0 / std::f64::consts::PI).ceil() as usize).max(24) + 8;
    density_breaks(density, y1, y2, n_int)
}

pub fn build_workspace(
    ch: &EtaChannelParams,
    eta1: f64,
    eta2: f64,
    breaks: Option<Vec<f64>>,
) -> Result<RMatrixWorkspace> {
    if !(eta1 > 0.0 && eta2 > eta1) {
        return Err(Error::Domain("need 0 < eta1 < eta2".into()));
    }
    let (y1, y2) = (eta1.sqrt(), eta2.sqrt());
    let breaks = match breaks {
        Some(b) => {
            if (b[0] - y1).abs() > 1e-12 || (b[b.len() - 1] - y2).abs() > 1e-12 {
                return Err(Error::Config(
                    "knot sequence does not cover [sqrt(eta1), sqrt(eta2)]".into(),
                ));
            }
            b
        }
        None => eta_breaks(ch, y1, y2),
    };
    let order = 8;
    let basis = Arc::new(BsplineBasis::new(order, &breaks)?);
    let nb = basis.n();
    let nc = nb - 2;
    let kl = order - 1;
    let ldab = 2 * kl + kl + 1; // dgbtrf layout: 2*kl + ku + 1 rows
    let mut cc_band = vec![0.0f64; ldab * nc];
    let mut gic = [vec![0.0f64; nc], vec![0.0f64; nc]];
    let mut gii = [[0.0f64; 2]; 2];

    let n_int = breaks.len() - 1;
    for iv in 0..n_int {
        let (a, b) = (breaks[iv], breaks[iv + 1]);
        for (y, w) in gauss_on(a, b) {
            let (first, d) = basis.eval_ders(y, 1);
            let q = q_y(ch, y);
            for jl in 0..order {
                let j = first + jl;
                for il in 0..order {
                    let i = first + il;
                    let val = w * (d[1][il] * d[1][jl] - q * d[0][il] * d[0][jl]);
                    let i_open = if i == 0 {
                        Some(0)
                    } else if i == nb - 1 {
                        Some(1)
                    } else {
                        None
                    };
                    let j_open = j == 0 || j == nb - 1;
                    match (i_open, j_open) {
                        (Some(io), true) => {
                            let jo = if j == 0 { 0 } else { 1 };
                            gii[io][jo] += val;
                        }
                        (Some(io), false) => gic[io][j - 1] += val,
                        (None, true) => {} // symmetric partner handled above
                        (None, false) => {
                            // band storage, row index kl+ku+i-j (0-based)
                            let (ic, jc) = (i - 1, j - 1);
                            cc_band[(2 * kl + ic - jc) + jc * ldab] += val;
                        }
                    }
                }
            }
        }
    }
    Ok(RMatrixWorkspace {
        channel: *ch,
        eta1,
        eta2,
        basis,
        cc_band,
        cc_ldab: ldab,
        gic,
        gii,
    })
}

pub struct SurfaceModes {
    /// surface eigenvalues b (common outward normal log-derivative in y)
    pub b: [f64; 2],
    /// full spline coefficient vectors of the two modes
    pub coef: [Vec<f64>; 2],
}

/// Streamlined (Schur) elimination of the closed-type coefficients followed by
/// diagonalization of the 2x2 surface block.
pub fn solve_surface_eigenproblem(ws: &RMatrixWorkspace) -> Result<SurfaceModes> {
    let nb = ws.basis.n();
    let nc = nb - 2;
    let kl = (ws.basis.order - 1) as i32;
    let mut band = ws.cc_band.clone();
    let mut ipiv = vec![0i32; nc];
    let mut info = 0i32;
    unsafe {
        lapack::dgbtrf(
            nc as i32,
            nc as i32,
            kl,
            kl,
            &mut band,
            ws.cc_ldab as i32,
            &mut ipiv,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Linalg(format!(
            "closed-closed block factorization failed (info = {info}); \
             energy pinned a closed-type eigenvalue"
        )));
    }
    // X = Gamma_CC^{-1} Gamma_CI  (Gamma_CI = Gamma_IC^T), 2 columns
    let mut x = vec![0.0f64; nc * 2];
    for c in 0..2 {
        x[c * nc..(c + 1) * nc].copy_from_slice(&ws.gic[c]);
    }
    unsafe {
        lapack::dgbtrs(
            b'N',
            nc as i32,
            kl,
            kl,
            2,
            &band,
            ws.cc_ldab as i32,
            &ipiv,
            &mut x,
            nc as i32,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Linalg("banded solve failed".into()));
    }
    // Omega = Gamma_II - Gamma_IC X
    let mut omega = ws.gii;
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = 0.0;
            for p in 0..nc {
                acc += ws.gic[i][p] * x[j * nc + p];
            }
            omega[i][j] -= acc;
        }
    }
    // symmetric 2x2 eigensolve
    let tr = omega[0][0] + omega[1][1];
    let off = 0.5 * (omega[0][1] + omega[1][0]);
    let diff = 0.5 * (omega[0][0] - omega[1][1]);
    let rad = (diff * diff + off * off).sqrt();
    let b0 = 0.5 * tr - rad;
    let b1 = 0.5 * tr + rad;
    let vecs: [[f64; 2]; 2] = if off.abs() < 1e-300 {
        if diff <= 0.0 {
            [[1.0, 0.0], [0.0, 1.0]]
        } else {
            [[0.0, 1.0], [1.0, 0.0]]
        }
    } else {
        let v0 = [b0 - omega[1][1], off];
        let n0 = (v0[0] * v0[0] + v0[1] * v0[1]).sqrt();
        [[v0[0] / n0, v0[1] / n0], [-v0[1] / n0, v0[0] / n0]]
    };
    let mut modes = SurfaceModes {
        b: [b0, b1],
        coef: [vec![0.0; nb], vec![0.0; nb]],
    };
    for (mi, v) in vecs.iter().enumerate() {
        modes.coef[mi][0] = v[0];
        modes.coef[mi][nb - 1] = v[1];
        for p in 0..nc {
            modes.coef[mi][p + 1] = -(x[p] * v[0] + x[nc + p] * v[1]);
        }
    }
    Ok(modes)
}

/// (u, du/deta) of a v-space spline expansion at eta = y^2.
fn u_of_v(basis: &BsplineBasis, coef: &[f64], eta: f64) -> (f64, f64) {
    let y = eta.sqrt();
    let (v, vp) = basis.eval_expansion(coef, y);
    let u = v * y.sqrt();
    let up = (vp * y.sqrt() + 0.5 * v / y.sqrt()) / (2.0 * y);
    (u, up)
}

#[derive(Clone)]
pub struct EtaSolutionPair {
    pub channel: EtaChannelParams,
    pub eta1: f64,
    pub eta2: f64,
    pub barrier_class: BarrierClass,
    /// outermost classical turning point (eta1 used as phase anchor if none)
    pub eta0: f64,
    /// WKB amplitudes of the raw matched pair at eta2 (units of sqrt(2/pi k))
    pub a_f: f64,
    pub a_g: f64,
    /// absolute WKB phase of the regular solution
    pub delta_n1: f64,
    /// regular-irregular relative phase, wrapped into (0, pi)
    pub gamma_n1: f64,
    /// sine arguments theta = atan2(k u, u' + (k'/2k) u) at eta2
    pub theta_f_eta2: f64,
    pub theta_g_eta2: f64,
    basis: Arc<BsplineBasis>,
    cf: Vec<f64>,
    cg: Vec<f64>,
}

impl EtaSolutionPair {
    /// Raw matched pair (u_f, u_f', u_g, u_g'): u_f coincides with the
    /// field-free regular f at eta1, u_g with the irregular g.
    pub fn eval_raw(&self, eta: f64) -> (f64, f64, f64, f64) {
        let (uf, ufp) = u_of_v(&self.basis, &self.cf, eta);
        let (ug, ugp) = u_of_v(&self.basis, &self.cg, eta);
        (uf, ufp, ug, ugp)
    }

    /// Harmin-normalized pair (Upsilon, Upsilon_bar): post-barrier amplitudes
    /// equal to one, W[Upsilon, Upsilon_bar] = (2/pi) sin(gamma).
    pub fn eval_pair(&self, eta: f64) -> (f64, f64, f64, f64) {
        let (uf, ufp, ug, ugp) = self.eval_raw(eta);
        (uf / self.a_f, ufp / self.a_f, ug / self.a_g, ugp / self.a_g)
    }

    /// WKB continuation of the normalized regular solution beyond eta2:
    /// returns (amplitude, sine argument) with
    /// Upsilon(eta) = amplitude * sin(argument).
    pub fn wkb_propagate(&self, eta_target: f64) -> Result<(f64, f64)> {
        if eta_target < self.eta2 {
            return Err(Error::Domain(
                "wkb_propagate target must lie beyond eta2".into(),
            ));
        }
        let (k, forbidden) = local_momentum(&self.channel, eta_target);
        if forbidden {
            return Err(Error::Domain("wkb_propagate target is forbidden".into()));
        }
        let phase = phase_integral(&self.channel, self.eta2, eta_target)?
            + phase_correction_integral(&self.channel, self.eta2, eta_target);
        Ok((
            (2.0 / (std::f64::consts::PI * k)).sqrt(),
            self.theta_f_eta2 + phase,
        ))
    }
}

/// Wrap into (-pi, pi].
fn wrap_pi(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut v = x % two_pi;
    if v <= -std::f64::consts::PI {
        v += two_pi;
    } else if v > std::f64::consts::PI {
        v -= two_pi;
    }
    v
}

/// Amplitude/phase decomposition against the local WKB form at eta2.
fn phase_amp(ch: &EtaChannelParams, eta2: f64, u: f64, up: f64) -> (f64, f64) {
    let k2 = k_squared(ch, eta2);
    let k = k2.sqrt();
    let kp = dk2_deta(ch, eta2) / (2.0 * k);
    let slope = up + 0.5 * kp / k * u;
    let theta = (k * u).atan2(slope);
    let amp = (u * u + (slope / k) * (slope / k)).sqrt()
        / (2.0 / (std::f64::consts::PI * k)).sqrt();
    (theta, amp)
}

/// Full per-channel solve: workspace, surface modes, matching at eta1,
/// phase extraction at eta2 (with the documented retry/extension policies).
pub fn solve_eta_channel(
    ch: &EtaChannelParams,
    eta1_opt: Option<f64>,
    eta2_opt: Option<f64>,
) -> Result<EtaSolutionPair> {
    let eta1 = eta1_opt.unwrap_or(DEFAULT_ETA1);
    if ch.field <= 0.0 {
        return Err(Error::Domain("eta channel solver requires F > 0".into()));
    }
    let coulomb_edge = 0.1 / ch.field.sqrt();
    let eta_hi_scan = 10.0 * (coulomb_edge + 1.0 / ch.field.sqrt());
    let eta0 = outer_turning_point(ch, eta_hi_scan);
    let mut eta2 = eta2_opt.unwrap_or(1.5 * eta0.unwrap_or(0.0).max(coulomb_edge));
    // WKB smoothness at the analysis surface: |k'| / k^2 < 0.01
    for _ in 0..200 {
        let k2 = k_squared(ch, eta2);
        if k2 > 0.0 {
            let k = k2.sqrt();
            let kp = dk2_deta(ch, eta2) / (2.0 * k);
            if (kp / k2).abs() < 0.01 {
                break;
            }
        }
        eta2 *= 1.2;
    }

    let barrier = classify_barrier(ch, eta2);
    let (f1, f1p, g1, g1p) = field_free_eta_pair(ch, eta1)?;

    let mut last_err = None;
    for attempt in 0..4 {
        let ws = build_workspace(ch, eta1, eta2, None)?;
        match solve_attempt(&ws, (f1, f1p, g1, g1p)) {
            Ok((cf, cg)) => {
                let (uf, ufp, ug, ugp) = {
                    let (uf, ufp) = u_of_v(&ws.basis, &cf, eta2);
                    let (ug, ugp) = u_of_v(&ws.basis, &cg, eta2);
                    (uf, ufp, ug, ugp)
                };
                let (th_f, a_f) = phase_amp(ch, eta2, uf, ufp);
                let (th_g, a_g) = phase_amp(ch, eta2, ug, ugp);
                let mut gamma = (th_f - th_g) % std::f64::consts::PI;
                if gamma < 0.0 {
                    gamma += std::f64::consts::PI;
                }
                let anchor = eta0.unwrap_or(eta1);
                let phase = phase_integral(ch, anchor.max(eta1.min(anchor)), eta2)
                    .or_else(|_| phase_integral(ch, eta1, eta2))?;
                let delta = wrap_pi(
                    th_f - phase - std::f64::consts::FRAC_PI_4
                        + wkb_phase_correction_tail(ch, eta2),
                );
                return Ok(EtaSolutionPair {
                    channel: *ch,
                    eta1,
                    eta2,
                    barrier_class: barrier,
                    eta0: eta0.unwrap_or(eta1),
                    a_f,
                    a_g,
                    delta_n1: delta,
                    gamma_n1: gamma,
                    theta_f_eta2: th_f,
                    theta_g_eta2: th_g,
                    basis: ws.basis.clone(),
                    cf,
                    cg,
                });
            }
            Err(e @ Error::Linalg(_)) => {
                // spurious closed-closed pole: shift eta2 by one knot spacing
                let brk = &ws.basis.breaks;
                let dy = brk[brk.len() - 1] - brk[brk.len() - 2];
                let y2 = eta2.sqrt() + dy;
                eta2 = y2 * y2;
                last_err = Some(e);
                let _ = attempt;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::Convergence("eta2 retries exhausted".into())))
}

fn solve_attempt(
    ws: &RMatrixWorkspace,
    boundary: (f64, f64, f64, f64),
) -> Result<(Vec<f64>, Vec<f64>)> {
    let modes = solve_surface_eigenproblem(ws)?;
    let (f1, f1p, g1, g1p) = boundary;
    let (u1, u1p) = u_of_v(&ws.basis, &modes.coef[0], ws.eta1);
    let (u2, u2p) = u_of_v(&ws.basis, &modes.coef[1], ws.eta1);
    let det = u1 * u2p - u2 * u1p;
    let norm = (u1 * u1 + u1p * u1p).sqrt() * (u2 * u2 + u2p * u2p).sqrt();
    if det.abs() < 1e-12 * norm {
        return Err(Error::Linalg(
            "surface modes numerically dependent at eta1".into(),
        ));
    }
    let solve2 = |r0: f64, r1: f64| -> (f64, f64) {
        ((r0 * u2p - r1 * u2) / det, (r1 * u1 - r0 * u1p) / det)
    };
    let (af, bf) = solve2(f1, f1p);
    let (ag, bg) = solve2(g1, g1p);
    let nb = ws.basis.n();
    let mut cf = vec![0.0; nb];
    let mut cg = vec![0.0; nb];
    for i in 0..nb {
        cf[i] = af * modes.coef[0][i] + bf * modes.coef[1][i];
        cg[i] = ag * modes.coef[0][i] + bg * modes.coef[1][i];
    }
    Ok((cf, cg))
}
