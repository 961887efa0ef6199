//! Pipeline orchestration for the CLI modes and CSV emission.
//!
//! Energy scans run concurrently (rayon); results carry their scan index so
//! output assembly is deterministic.  With one thread the emitted bytes are
//! reproducible for a fixed config.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{Mode, RunConfig};
use crate::eta_channels::{solve_eta_channel, BarrierClass, EtaChannelParams, EtaSolutionPair};
use crate::frame_transform::{
    lft_matrix, phase_uniformity_bound, reconstruct_irregular_spherical,
    reference_irregular_spherical, LftMatrix,
};
use crate::microscopy::{differential_cross_section, MicroChannel};
use crate::scattering::{
    dipole_incoming, dipole_reaction, k_matrix, max_asymmetry, reaction_matrix, retained_rows,
    s_matrix, unitarity_deviation, Defects,
};
use crate::xi_channels::{default_xi_max, solve_xi_channels, XiChannel};
use crate::{Error, ProblemSpec, Result};

fn csv_header(cfg: &RunConfig, extra: &str) -> String {
    let mut h = String::new();
    let _ = writeln!(h, "# stark-lft {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(h, "# config sha256 {}", cfg.config_hash);
    let _ = writeln!(h, "# mode {}", cfg.mode.name());
    if !extra.is_empty() {
        let _ = writeln!(h, "# {extra}");
    }
    h
}

fn write_artifact(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)?;
    Ok(())
}

fn spec_at(cfg: &RunConfig, i: usize) -> ProblemSpec {
    ProblemSpec {
        energy: cfg.energies_au[i],
        field: cfg.field_au,
        m: cfg.m,
    }
}

/// Everything the scattering chain produces for one energy.
pub struct ChannelSolution {
    pub chans: Vec<XiChannel>,
    pub lft: LftMatrix,
    pub rows: Vec<usize>,
    pub eta: Vec<EtaSolutionPair>,
    pub cot_gamma: Vec<f64>,
    pub d_minus: Vec<Complex64>,
}

/// xi channels -> frame transformation -> eta phases -> K/R -> dipole vectors.
pub fn solve_dipole_chain(spec: &ProblemSpec, cfg: &RunConfig) -> Result<ChannelSolution> {
    let chans = solve_xi_channels(spec, cfg.n1_max, default_xi_max(spec, cfg.n1_max)?)?;
    let lft = lft_matrix(spec, &chans, cfg.ell_max)?;
    let rows = retained_rows(&lft);
    let eta: Vec<EtaSolutionPair> = rows
        .iter()
        .map(|&r| {
            solve_eta_channel(
                &EtaChannelParams {
                    beta: lft.betas[r],
                    m: spec.m,
                    energy: spec.energy,
                    field: spec.field,
                },
                None,
                None,
            )
        })
        .collect::<Result<_>>()?;
    let cot_gamma: Vec<f64> = eta
        .iter()
        .map(|e| e.gamma_n1.cos() / e.gamma_n1.sin())
        .collect();
    let k = k_matrix(&lft, &rows, &cfg.defects)?;
    let r = reaction_matrix(&k, &cot_gamma)?;
    let d_r = dipole_reaction(&cfg.dipoles, &lft, &rows, &cfg.defects, &cot_gamma)?;
    let d_minus = dipole_incoming(&d_r, &r)?;
    Ok(ChannelSolution {
        chans,
        lft,
        rows,
        eta,
        cot_gamma,
        d_minus,
    })
}

fn run_lft_map(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let bodies: Vec<(usize, Result<String>)> = cfg
        .energies_au
        .par_iter()
        .enumerate()
        .map(|(i, _)| {
            let spec = spec_at(cfg, i);
            let body = (|| {
                let chans = solve_xi_channels(&spec, cfg.n1_max, default_xi_max(&spec, cfg.n1_max)?)?;
                let lft = lft_matrix(&spec, &chans, cfg.ell_max)?;
                let mut s = csv_header(cfg, &format!("energy_cm {:.6}", cfg.energies_cm[i]));
                s.push_str("n1,beta,ell,u\n");
                for row in 0..lft.n_channels() {
                    for col in 0..lft.n_ell() {
                        let _ = writeln!(
                            s,
                            "{},{:.12e},{},{:.12e}",
                            row,
                            lft.betas[row],
                            lft.ell_of_col(col),
                            lft.u[(row, col)]
                        );
                    }
                }
                Ok(s)
            })();
            (i, body)
        })
        .collect();
    let mut paths = Vec::new();
    for (i, body) in bodies {
        let path = out_dir.join(format!("lft_map_m{}_e{:03}.csv", cfg.m, i));
        write_artifact(&path, &body?)?;
        paths.push(path);
    }
    Ok(paths)
}

fn run_reconstruct(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let r_grid: Vec<f64> = (0..cfg.r_points)
        .map(|j| {
            cfg.r_min_au
                + (cfg.r_max_au - cfg.r_min_au) * j as f64 / (cfg.r_points - 1) as f64
        })
        .collect();
    let mut jobs: Vec<(usize, i32)> = Vec::new();
    for i in 0..cfg.energies_au.len() {
        for ell in cfg.m.abs()..=cfg.ell_max {
            jobs.push((i, ell));
        }
    }
    let bodies: Vec<((usize, i32), Result<String>)> = jobs
        .par_iter()
        .map(|&(i, ell)| {
            let spec = spec_at(cfg, i);
            let body = (|| {
                let chans = solve_xi_channels(&spec, cfg.n1_max, default_xi_max(&spec, cfg.n1_max)?)?;
                let rec = reconstruct_irregular_spherical(
                    &spec, &chans, ell, &r_grid, cfg.theta_rad, cfg.chi_mode,
                )?;
                let reference = reference_irregular_spherical(&spec, ell, &r_grid, cfg.theta_rad)?;
                let scale = reference.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
                let mut s = csv_header(
                    cfg,
                    &format!("energy_cm {:.6} ell {ell}", cfg.energies_cm[i]),
                );
                for w in &rec.warnings {
                    let _ = writeln!(s, "# warning: {w}");
                }
                s.push_str("r_au,g_analytic,g_lft,rel_err\n");
                for (j, &r) in r_grid.iter().enumerate() {
                    let denom = reference[j].abs().max(1e-12 * scale.max(1e-300));
                    let _ = writeln!(
                        s,
                        "{:.6e},{:.12e},{:.12e},{:.6e}",
                        r,
                        reference[j],
                        rec.values[j],
                        (rec.values[j] - reference[j]).abs() / denom
                    );
                }
                Ok(s)
            })();
            ((i, ell), body)
        })
        .collect();
    let mut paths = Vec::new();
    for ((i, ell), body) in bodies {
        let path = out_dir.join(format!("reconstruct_m{}_e{:03}_l{}.csv", cfg.m, i, ell));
        write_artifact(&path, &body?)?;
        paths.push(path);
    }
    Ok(paths)
}

fn run_spectrum(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let rows: Vec<(usize, Result<(f64, Vec<(usize, f64)>)>)> = cfg
        .energies_au
        .par_iter()
        .enumerate()
        .map(|(i, _)| {
            let spec = spec_at(cfg, i);
            let row = (|| {
                let sol = solve_dipole_chain(&spec, cfg)?;
                let omega = cfg.photon_energies_au[i];
                let per: Vec<(usize, f64)> = sol
                    .rows
                    .iter()
                    .zip(&sol.d_minus)
                    .map(|(&r, d)| (r, d.norm_sqr()))
                    .collect();
                let sigma = 4.0 * std::f64::consts::PI.powi(2) * omega / crate::constants::C_AU
                    * per.iter().map(|p| p.1).sum::<f64>();
                Ok((sigma, per))
            })();
            (i, row)
        })
        .collect();
    let n1_hi = rows
        .iter()
        .filter_map(|(_, r)| r.as_ref().ok())
        .flat_map(|(_, per)| per.iter().map(|p| p.0))
        .max()
        .unwrap_or(0);
    let mut s = csv_header(cfg, "sigma in au; d2_* = |D^-|^2 per n1 channel");
    s.push_str("energy_cm,sigma_total");
    for n1 in 0..=n1_hi {
        let _ = write!(s, ",d2_n1_{n1}");
    }
    s.push('\n');
    for (i, row) in rows {
        let (sigma, per) = row?;
        let mut padded = vec![0.0f64; n1_hi + 1];
        for (n1, v) in per {
            padded[n1] = v;
        }
        let _ = write!(s, "{:.6},{:.12e}", cfg.energies_cm[i], sigma);
        for v in padded {
            let _ = write!(s, ",{v:.12e}");
        }
        s.push('\n');
    }
    let path = out_dir.join(format!("spectrum_m{}.csv", cfg.m));
    write_artifact(&path, &s)?;
    Ok(vec![path])
}

fn run_microscopy(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let rho_grid: Vec<f64> = (1..=cfg.rho_points)
        .map(|j| cfg.rho_max_au * j as f64 / cfg.rho_points as f64)
        .collect();
    let bodies: Vec<(usize, Result<String>)> = cfg
        .energies_au
        .par_iter()
        .enumerate()
        .map(|(i, _)| {
            let spec = spec_at(cfg, i);
            let body = (|| {
                let sol = solve_dipole_chain(&spec, cfg)?;
                let channels: Vec<MicroChannel> = sol
                    .rows
                    .iter()
                    .zip(sol.eta.into_iter())
                    .zip(&sol.d_minus)
                    .map(|((&r, eta), &d)| MicroChannel {
                        xi: sol.chans[r].clone(),
                        eta,
                        d_minus: d,
                    })
                    .collect();
                let map = differential_cross_section(
                    &channels,
                    cfg.m,
                    cfg.z_det_au,
                    cfg.photon_energies_au[i],
                    &rho_grid,
                )?;
                let mut s = csv_header(
                    cfg,
                    &format!(
                        "energy_cm {:.6} z_det_au {:.6e} sigma_total {:.12e}",
                        cfg.energies_cm[i], cfg.z_det_au, map.sigma_total
                    ),
                );
                if let Some(w) = &map.coverage_warning {
                    let _ = writeln!(s, "# warning: {w}");
                }
                s.push_str("rho_au,dsigma_drho\n");
                for (rho, v) in map.rho_grid.iter().zip(&map.dsigma_drho) {
                    let _ = writeln!(s, "{rho:.6e},{v:.12e}");
                }
                Ok(s)
            })();
            (i, body)
        })
        .collect();
    let mut paths = Vec::new();
    for (i, body) in bodies {
        let path = out_dir.join(format!("microscopy_m{}_e{:03}.csv", cfg.m, i));
        write_artifact(&path, &body?)?;
        paths.push(path);
    }
    Ok(paths)
}

/// One line of the validate-mode report.
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn check(name: &str, value: f64, threshold: f64) -> Check {
    Check {
        name: name.into(),
        value,
        threshold,
        pass: value.abs() <= threshold,
    }
}

/// Invariant suite on the configured problem (first scan energy).
pub fn validate_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let spec = spec_at(cfg, 0);
    let tol = cfg.tolerance_scale;
    let sol = solve_dipole_chain(&spec, cfg)?;
    let mut out = Vec::new();

    // Wronskians of the raw and short-range-normalized eta pairs on the
    // first, middle and last retained channels
    let picks = [0usize, sol.eta.len() / 2, sol.eta.len() - 1];
    let mut raw_dev = 0.0f64;
    let mut pair_dev = 0.0f64;
    for &p in &picks {
        let e = &sol.eta[p];
        let probes = [
            0.3 * e.eta1 + 0.7 * e.eta2,
            0.7 * e.eta1 + 0.3 * e.eta2,
        ];
        for &eta in &probes {
            let (f, fp, g, gp) = e.eval_raw(eta);
            raw_dev = raw_dev.max(((f * gp - g * fp) * std::f64::consts::PI / 2.0 - 1.0).abs());
            let sg = e.gamma_n1.sin();
            if sg > 1e-8 {
                let (f, fp, g, gp) = e.eval_pair(eta);
                pair_dev = pair_dev
                    .max(((f * gp - g * fp) * std::f64::consts::PI / (2.0 * sg) - 1.0).abs());
            }
        }
    }
    out.push(check("wronskian_raw_pair", raw_dev, 1e-6 * tol));
    out.push(check("wronskian_normalized_pair", pair_dev, 1e-6 * tol));

    let k = k_matrix(&sol.lft, &sol.rows, &cfg.defects)?;
    let r = reaction_matrix(&k, &sol.cot_gamma)?;
    out.push(check("reaction_matrix_asymmetry", max_asymmetry(&r), 1e-10 * tol));
    let s = s_matrix(&k, &sol.cot_gamma)?;
    out.push(check("s_matrix_unitarity", unitarity_deviation(&s), 1e-10 * tol));

    // hydrogen null: zero defects must give a vanishing K
    let null = Defects {
        ell_min: cfg.m.abs(),
        mu: vec![0.0; cfg.dipoles.len().max(sol.lft.n_ell())],
    };
    let k0 = k_matrix(&sol.lft, &sol.rows, &null)?;
    let k0max = k0.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    out.push(check("hydrogen_null_k", k0max, 1e-12 * tol));

    if spec.energy > 0.0 {
        let gdev = sol
            .eta
            .iter()
            .filter(|e| e.barrier_class == BarrierClass::AboveBarrier)
            .fold(0.0f64, |a, e| {
                a.max((e.gamma_n1 - std::f64::consts::FRAC_PI_2).abs())
            });
        out.push(check("gamma_above_barrier", gdev, 1e-3 * tol));
    }

    let (dphi, in_zone) = phase_uniformity_bound(spec.field, 50.0, cfg.theta_rad);
    out.push(Check {
        name: "phase_uniformity_r50".into(),
        value: dphi.abs(),
        threshold: 1e-3 * tol,
        pass: !in_zone || dphi.abs() <= 1e-3 * tol,
    });

    out.push(check(
        "lft_imaginary_residual",
        sol.lft.max_imag_residual,
        1e-10 * tol,
    ));
    Ok(out)
}

fn run_validate(cfg: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let checks = validate_checks(cfg)?;
    let mut s = csv_header(cfg, "");
    s.push_str("check,value,threshold,pass\n");
    for c in &checks {
        let _ = writeln!(
            s,
            "{},{:.6e},{:.6e},{}",
            c.name, c.value, c.threshold, c.pass
        );
    }
    let path = out_dir.join("validate.csv");
    write_artifact(&path, &s)?;
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(vec![path])
    } else {
        Err(Error::Convergence(format!(
            "validation failed: {}",
            failed.join(", ")
        )))
    }
}

/// Execute the configured mode, writing CSV artifacts into `out_dir`.
/// Returns the artifact paths in deterministic order.
pub fn run(cfg: &RunConfig, out_dir: &Path, threads: usize) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| match cfg.mode {
        Mode::LftMap => run_lft_map(cfg, out_dir),
        Mode::Reconstruct => run_reconstruct(cfg, out_dir),
        Mode::Spectrum => run_spectrum(cfg, out_dir),
        Mode::Microscopy => run_microscopy(cfg, out_dir),
        Mode::Validate => run_validate(cfg, out_dir),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn tmpdir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("stark_lft_run_{tag}_{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn lft_map_mode_emits_csv_with_hash_header() {
        let cfg = parse_config(
            r#"{"mode":"lft-map","energies_cm":[135.8231],"field_vcm":640.0,
                "m":1,"ell_max":3,"n1_max":40}"#,
        )
        .unwrap();
        let dir = tmpdir("map");
        let paths = run(&cfg, &dir, 1).unwrap();
        assert_eq!(paths.len(), 1);
        let text = std::fs::read_to_string(&paths[0]).unwrap();
        assert!(text.starts_with("# stark-lft"));
        assert!(text.contains(&cfg.config_hash));
        assert!(text.contains("n1,beta,ell,u"));
        // one row per (channel, ell) pair
        let data_rows = text.lines().filter(|l| !l.starts_with('#')).count() - 1;
        assert_eq!(data_rows % 3, 0);
        assert!(data_rows >= 40 * 3);
    }

    #[test]
    fn identical_config_single_thread_is_byte_identical() {
        let text = r#"{"mode":"lft-map","energies_cm":[135.8231],"field_vcm":640.0,
                       "m":1,"ell_max":2,"n1_max":25}"#;
        let cfg = parse_config(text).unwrap();
        let d1 = tmpdir("det1");
        let d2 = tmpdir("det2");
        let p1 = run(&cfg, &d1, 1).unwrap();
        let p2 = run(&cfg, &d2, 1).unwrap();
        let b1 = std::fs::read(&p1[0]).unwrap();
        let b2 = std::fs::read(&p2[0]).unwrap();
        assert_eq!(b1, b2);
    }

    #[test]
    fn spectrum_mode_positive_energy_runs() {
        let cfg = parse_config(
            r#"{"mode":"spectrum","energies_cm":[135.8231],"field_vcm":640.0,
                "m":1,"ell_max":3,"n1_max":40,"defects":"sodium",
                "dipoles":[0.3,1.0,0.1]}"#,
        )
        .unwrap();
        // dipoles length must match ell range |m|..=ell_max
        assert_eq!(cfg.dipoles.len(), 3);
        let dir = tmpdir("spec");
        let paths = run(&cfg, &dir, 2).unwrap();
        let text = std::fs::read_to_string(&paths[0]).unwrap();
        let row = text.lines().find(|l| l.starts_with("135.")).unwrap();
        let sigma: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!(sigma > 0.0 && sigma.is_finite());
    }

    #[test]
    fn validate_mode_on_defaults_passes() {
        let cfg = parse_config(
            r#"{"mode":"validate","energies_cm":[135.8231],"field_vcm":640.0,
                "m":1,"ell_max":3,"n1_max":40,"defects":"sodium"}"#,
        )
        .unwrap();
        let dir = tmpdir("val");
        let paths = run(&cfg, &dir, 1).unwrap();
        let text = std::fs::read_to_string(&paths[0]).unwrap();
        assert!(text.contains("wronskian_raw_pair"));
        assert!(!text.contains(",false"));
    }
}
