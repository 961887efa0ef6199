//! Plain uniform-grid Numerov integrator used as an independent validator for
//! the variational channel solvers.  Deliberately shares no code with the
//! production R-matrix / B-spline paths.

use crate::{Error, Result};

/// One-dimensional problem u'' + q(x) u = 0 on a uniform grid.
pub struct OdeProblem {
    pub x0: f64,
    pub h: f64,
    /// q at every node
    pub q_vals: Vec<f64>,
    /// seed values at the two starting nodes (first two for outward, last two
    /// for inward; `seed[0]` is the outermost-in-direction one)
    pub seed: [f64; 2],
    pub outward: bool,
}

impl OdeProblem {
    pub fn from_potential<F: Fn(f64) -> f64>(
        x0: f64,
        h: f64,
        n: usize,
        q: F,
        seed: [f64; 2],
        outward: bool,
    ) -> Self {
        OdeProblem {
            x0,
            h,
            q_vals: (0..n).map(|i| q(x0 + h * i as f64)).collect(),
            seed,
            outward,
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.h * i as f64
    }
}

/// Fourth-order Numerov sweep.  Errors out when a step would be too coarse
/// (|k h| > 0.5 somewhere on the grid).
pub fn numerov_integrate(p: &OdeProblem) -> Result<Vec<f64>> {
    let n = p.q_vals.len();
    if n < 3 {
        return Err(Error::Domain("numerov needs at least 3 nodes".into()));
    }
    let kh_max = p
        .q_vals
        .iter()
        .map(|&q| q.max(0.0).sqrt() * p.h)
        .fold(0.0, f64::max);
    if kh_max > 0.5 {
        return Err(Error::Domain(format!(
            "step too large for accuracy: max |k h| = {kh_max:.3}"
        )));
    }
    let w: Vec<f64> = p
        .q_vals
        .iter()
        .map(|&q| 1.0 + p.h * p.h / 12.0 * q)
        .collect();
    let mut u = vec![0.0; n];
    if p.outward {
        u[0] = p.seed[0];
        u[1] = p.seed[1];
        for i in 1..n - 1 {
            u[i + 1] = ((12.0 - 10.0 * w[i]) * u[i] - w[i - 1] * u[i - 1]) / w[i + 1];
        }
    } else {
        u[n - 1] = p.seed[0];
        u[n - 2] = p.seed[1];
        for i in (1..n - 1).rev() {
            u[i - 1] = ((12.0 - 10.0 * w[i]) * u[i] - w[i + 1] * u[i + 1]) / w[i - 1];
        }
    }
    Ok(u)
}

/// Node-counting shooting eigensolver on [x0, x0 + h(n-1)] with Dirichlet
/// ends, for oracle self-checks.  `q(E, x)` is the full Numerov coefficient.
pub fn shoot_eigenvalue<F: Fn(f64, f64) -> f64>(
    q: F,
    x0: f64,
    h: f64,
    n: usize,
    mut e_lo: f64,
    mut e_hi: f64,
) -> Result<f64> {
    let end_val = |e: f64| -> Result<f64> {
        let p = OdeProblem::from_potential(x0, h, n, |x| q(e, x), [0.0, 1e-8], true);
        Ok(*numerov_integrate(&p)?.last().unwrap())
    };
    let mut f_lo = end_val(e_lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (e_lo + e_hi);
        let fm = end_val(mid)?;
        if (fm > 0.0) == (f_lo > 0.0) {
            e_lo = mid;
            f_lo = fm;
        } else {
            e_hi = mid;
        }
        if (e_hi - e_lo).abs() < 1e-13 * e_hi.abs().max(1.0) {
            break;
        }
    }
    Ok(0.5 * (e_lo + e_hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn free_particle_sine() {
        let k = 1.3;
        let h = 1e-3;
        let n = 4000;
        let p = OdeProblem::from_potential(
            0.0,
            h,
            n,
            |_| k * k,
            [0.0, (k * h).sin()],
            true,
        );
        let u = numerov_integrate(&p).unwrap();
        for (i, &ui) in u.iter().enumerate().step_by(500) {
            assert_abs_diff_eq!(ui, (k * p.x(i)).sin(), epsilon = 1e-8);
        }
    }

    #[test]
    fn harmonic_ground_state() {
        // u'' + (2E - x^2) u = 0 on symmetric interval; E0 = 0.5
        let e0 = shoot_eigenvalue(
            |e, x| 2.0 * e - x * x,
            -8.0,
            16.0 / 6000.0,
            6001,
            0.3,
            0.8,
        )
        .unwrap();
        assert_abs_diff_eq!(e0, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn coarse_step_rejected() {
        let p = OdeProblem::from_potential(0.0, 0.5, 100, |_| 4.0, [0.0, 0.1], true);
        assert!(numerov_integrate(&p).is_err());
    }

    #[test]
    fn convergence_order_is_four() {
        // Coulomb-type test problem; Richardson slope of the endpoint error
        let k2 = 1.0;
        let run = |h: f64| -> f64 {
            let n = (4.0 / h) as usize + 1;
            let p = OdeProblem::from_potential(
                1.0,
                h,
                n,
                |x| k2 + 2.0 / x,
                [0.0, 0.0],
                true,
            );
            // seed with the true solution values at the first two nodes:
            // use a very fine reference run instead
            let mut p = p;
            let fine_h = 1e-4;
            let pf = OdeProblem::from_potential(
                1.0,
                fine_h,
                (4.0 / fine_h) as usize + 1,
                |x| k2 + 2.0 / x,
                [0.0, fine_h],
                true,
            );
            let uf = numerov_integrate(&pf).unwrap();
            let pick = |x: f64| uf[((x - 1.0) / fine_h).round() as usize];
            p.seed = [pick(1.0), pick(1.0 + h)];
            let u = numerov_integrate(&p).unwrap();
            (u[n - 1] - pick(1.0 + h * (n - 1) as f64)).abs()
        };
        let e1 = run(0.02);
        let e2 = run(0.04);
        let slope = (e2 / e1).ln() / 2f64.ln();
        assert!((slope - 4.0).abs() < 0.4, "order {slope}");
    }
}
