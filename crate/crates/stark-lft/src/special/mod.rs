//! Special functions: Gamma machinery, regularized 1F1, and the regular /
//! irregular Coulomb pairs (integer and half-integer angular index, both
//! energy signs) that supply boundary conditions for the channel solvers.

pub mod bound_pair;
pub mod gamma;
pub mod hyp;
pub mod positive_pair;

pub use bound_pair::{coulomb_pair_half_integer, coulomb_pair_spherical};
pub use gamma::{digamma, gamma_real, inv_gamma_with_deriv, ln_gamma, ln_gamma_real};
pub use hyp::regularized_1f1;

/// An energy-normalized regular/irregular solution pair tabulated on a grid.
///
/// Conventions: Wronskian f g' - f' g = 2/pi at every grid point; the regular
/// member vanishes at the origin like x^(l+1) (or zeta^(lambda+1)); the
/// irregular member lags the regular one by pi/2 at short range.
#[derive(Clone, Debug)]
pub struct CoulombPair {
    pub grid: Vec<f64>,
    pub f_vals: Vec<f64>,
    pub g_vals: Vec<f64>,
    pub f_deriv: Vec<f64>,
    pub g_deriv: Vec<f64>,
    pub energy: f64,
    /// integer l or half-integer lambda
    pub ell_or_lambda: f64,
    /// effective charge parameter (1 for the spherical equation, Z for the
    /// parabolic ones)
    pub charge_like: f64,
}

impl CoulombPair {
    /// Max relative drift of the Wronskian from 2/pi over the grid.
    pub fn wronskian_drift(&self) -> f64 {
        let target = 2.0 / std::f64::consts::PI;
        self.grid
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let w = self.f_vals[i] * self.g_deriv[i] - self.f_deriv[i] * self.g_vals[i];
                ((w - target) / target).abs()
            })
            .fold(0.0, f64::max)
    }
}
