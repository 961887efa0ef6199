//! Detector-plane observables: the outgoing wave assembled from the incoming
//! wave dipole vector, the electron current density at the detector, and the
//! differential cross section per unit radial length.
//!
//! Geometry: the field points along -z, the detector plane sits at z_det < 0.
//! On that plane xi = r + z = rho^2/(r + |z|) stays moderate (the bound xi
//! motion), while eta = r - z ~ 2|z| is macroscopic, so the eta factor of every
//! channel is continued with the WKB amplitude/phase of the eta solver and the
//! xi factor is interpolated from the tabulated channel function.

use num_complex::Complex64;

use crate::constants::C_AU;
use crate::eta_channels::{local_momentum, phase_correction_integral, phase_integral, EtaSolutionPair};
use crate::xi_channels::XiChannel;
use crate::{Error, Result};

/// One retained channel prepared for detector-plane evaluation.
pub struct MicroChannel {
    pub xi: XiChannel,
    pub eta: EtaSolutionPair,
    pub d_minus: Complex64,
}

/// Detector-plane map of the differential cross section.
pub struct DetectorMap {
    pub z_det: f64,
    pub omega: f64,
    pub m: i32,
    pub rho_grid: Vec<f64>,
    /// phi-independent current density R(rho, z_det) toward the detector
    pub flux_vals: Vec<f64>,
    pub dsigma_drho: Vec<f64>,
    pub sigma_total: f64,
    pub coverage_warning: Option<String>,
}

impl DetectorMap {
    /// Trapezoid integral of dsigma/drho over the tabulated grid.
    pub fn integrated_cross_section(&self) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.rho_grid.len() {
            acc += 0.5
                * (self.dsigma_drho[i] + self.dsigma_drho[i - 1])
                * (self.rho_grid[i] - self.rho_grid[i - 1]);
        }
        acc
    }
}

/// Parabolic coordinates of a detector-plane point; xi computed in the
/// cancellation-free form.
pub fn detector_coords(rho: f64, z_det: f64) -> (f64, f64) {
    let r = (rho * rho + z_det * z_det).sqrt();
    let xi = rho * rho / (r - z_det);
    let eta = r - z_det;
    (xi, eta)
}

/// Per-channel eta-factor phases tabulated on a sorted list of eta values by
/// cumulative quadrature from the channel's analysis surface.
fn phase_table(ch: &MicroChannel, etas: &[f64]) -> Result<Vec<f64>> {
    let p = &ch.eta;
    let mut out = Vec::with_capacity(etas.len());
    let mut anchor = p.eta2;
    let mut acc = p.theta_f_eta2;
    for &eta in etas {
        if eta < p.eta2 {
            return Err(Error::Domain(format!(
                "detector eta = {eta} inside the reaction volume (eta2 = {})",
                p.eta2
            )));
        }
        acc += phase_integral(&p.channel, anchor, eta)?
            + phase_correction_integral(&p.channel, anchor, eta);
        anchor = eta;
        out.push(acc);
    }
    Ok(out)
}

/// Xi-channel factor with the extrapolation guard demanded by the detector
/// mapping (the tabulated grid must cover the classically allowed disk).
fn xi_factor(ch: &XiChannel, xi: f64) -> Result<(f64, f64)> {
    let hi = *ch.xi_grid.last().unwrap();
    if xi > hi {
        return Err(Error::Domain(format!(
            "xi = {xi:.3} beyond the tabulated channel grid (max {hi:.3}); \
             enlarge xi_max or shrink the rho window"
        )));
    }
    Ok(ch.eval_with_deriv(xi))
}

/// W and dW/dz for the phi-reduced wave W = sum D- Xi(xi) G(eta) / sqrt(xi eta)
/// with G = e^{i theta(eta)} / sqrt(pi k); theta supplied per channel.
fn w_and_dz(
    channels: &[MicroChannel],
    xi: f64,
    eta: f64,
    thetas: &[f64],
) -> Result<(Complex64, Complex64)> {
    let mut w = Complex64::new(0.0, 0.0);
    let mut dw = Complex64::new(0.0, 0.0);
    let sq_xi_eta = (xi * eta).sqrt();
    for (ch, &theta) in channels.iter().zip(thetas) {
        if ch.d_minus == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (k, forbidden) = local_momentum(&ch.eta.channel, eta);
        if forbidden {
            return Err(Error::Domain(format!(
                "detector point eta = {eta} classically forbidden for beta = {}",
                ch.eta.channel.beta
            )));
        }
        // k' from the analytic k^2 profile
        let b = ch.eta.channel.beta;
        let m2 = (ch.eta.channel.m * ch.eta.channel.m) as f64;
        let dk2 = -(1.0 - b) / (eta * eta)
            + ch.eta.channel.field / 4.0
            + (m2 - 1.0) / (2.0 * eta * eta * eta);
        let kp = dk2 / (2.0 * k);
        let (xiv, xid) = xi_factor(&ch.xi, xi)?;
        let g = Complex64::from_polar(1.0 / (std::f64::consts::PI * k).sqrt(), theta);
        // channel value and its xi/eta partials (G' = (ik - k'/2k) G)
        let val = ch.d_minus * xiv * g / sq_xi_eta;
        let d_xi = ch.d_minus * (xid - 0.5 * xiv / xi) * g / sq_xi_eta;
        let gp = g * (Complex64::new(-0.5 * kp / k, k));
        let d_eta = ch.d_minus * xiv * (gp - 0.5 * g / eta) / sq_xi_eta;
        w += val;
        dw += (xi * d_xi - eta * d_eta) * 2.0 / (xi + eta);
    }
    Ok((w, dw))
}

/// Psi_out at a single parabolic-coordinate point.  The pi*sqrt(2) prefactor
/// normalizes the detector-integrated flux to the channel-sum cross section.
pub fn outgoing_wavefunction(
    channels: &[MicroChannel],
    m: i32,
    xi: f64,
    eta: f64,
    phi: f64,
) -> Result<Complex64> {
    let thetas: Vec<f64> = channels
        .iter()
        .map(|ch| ch.eta.wkb_propagate(eta).map(|(_, th)| th))
        .collect::<Result<_>>()?;
    let (w, _) = w_and_dz(channels, xi, eta, &thetas)?;
    let pref = std::f64::consts::PI * 2f64.sqrt() / (2.0 * std::f64::consts::PI).sqrt();
    Ok(pref * Complex64::from_polar(1.0, m as f64 * phi) * w)
}

/// Current density toward the detector, Eq.-(22) form (2 pi omega / c)
/// Im[-Psi* dPsi/dz]; phi drops out for a single m.
pub fn flux_density(
    channels: &[MicroChannel],
    z_det: f64,
    rho: f64,
    _phi: f64,
    omega: f64,
) -> Result<f64> {
    if z_det >= 0.0 {
        return Err(Error::Domain("detector must sit at z < 0".into()));
    }
    let (xi, eta) = detector_coords(rho, z_det);
    let thetas: Vec<f64> = channels
        .iter()
        .map(|ch| ch.eta.wkb_propagate(eta).map(|(_, th)| th))
        .collect::<Result<_>>()?;
    let (w, dw) = w_and_dz(channels, xi, eta, &thetas)?;
    // |pi sqrt2 / sqrt(2 pi)|^2 = pi; times (2 pi omega / c)
    Ok(2.0 * std::f64::consts::PI * omega / C_AU
        * std::f64::consts::PI
        * (-w.conj() * dw).im)
}

/// (4 pi^2 omega / c) sum over open channels of |D-|^2.
pub fn total_cross_section(channels: &[MicroChannel], omega: f64) -> f64 {
    4.0 * std::f64::consts::PI.powi(2) * omega / C_AU
        * channels.iter().map(|c| c.d_minus.norm_sqr()).sum::<f64>()
}

/// dsigma/drho on a rho grid (phi integral analytic for a single m).
pub fn differential_cross_section(
    channels: &[MicroChannel],
    m: i32,
    z_det: f64,
    omega: f64,
    rho_grid: &[f64],
) -> Result<DetectorMap> {
    if z_det >= 0.0 {
        return Err(Error::Domain("detector must sit at z < 0".into()));
    }
    if rho_grid.windows(2).any(|p| p[1] <= p[0]) || rho_grid.first().is_none_or(|&r| r <= 0.0)
    {
        return Err(Error::Domain(
            "rho grid must be strictly increasing and positive".into(),
        ));
    }
    // eta increases with rho, so one cumulative phase pass per channel
    let etas: Vec<f64> = rho_grid
        .iter()
        .map(|&rho| detector_coords(rho, z_det).1)
        .collect();
    let tables: Vec<Vec<f64>> = channels
        .iter()
        .map(|ch| phase_table(ch, &etas))
        .collect::<Result<_>>()?;
    let mut flux_vals = Vec::with_capacity(rho_grid.len());
    let mut dsig = Vec::with_capacity(rho_grid.len());
    let pref = 2.0 * std::f64::consts::PI * omega / C_AU * std::f64::consts::PI;
    for (i, &rho) in rho_grid.iter().enumerate() {
        let (xi, eta) = detector_coords(rho, z_det);
        let thetas: Vec<f64> = tables.iter().map(|t| t[i]).collect();
        let (w, dw) = w_and_dz(channels, xi, eta, &thetas)?;
        let r_flux = pref * (-w.conj() * dw).im;
        flux_vals.push(r_flux);
        dsig.push(2.0 * std::f64::consts::PI * rho * r_flux);
    }
    let peak = dsig.iter().cloned().fold(0.0f64, f64::max);
    let tail = dsig.last().copied().unwrap_or(0.0);
    let coverage_warning = if peak > 0.0 && tail.abs() > 1e-3 * peak {
        Some(format!(
            "rho grid truncates the flux distribution (tail/peak = {:.2e})",
            tail / peak
        ))
    } else {
        None
    };
    Ok(DetectorMap {
        z_det,
        omega,
        m,
        rho_grid: rho_grid.to_vec(),
        flux_vals,
        dsigma_drho: dsig,
        sigma_total: total_cross_section(channels, omega),
        coverage_warning,
    })
}
