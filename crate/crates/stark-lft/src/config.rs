//! Run configuration: JSON document -> validated, unit-converted `RunConfig`.
//!
//! All physical quantities in the config file are in lab units (cm^-1, V/cm,
//! mm); everything downstream of `parse_config` is atomic units.

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::constants::{energy_cm_to_au, field_vcm_to_au, mm_to_au};
use crate::frame_transform::ChiMode;
use crate::scattering::{sodium_defect, Defects};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    LftMap,
    Reconstruct,
    Spectrum,
    Microscopy,
    Validate,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "lft-map" => Ok(Mode::LftMap),
            "reconstruct" => Ok(Mode::Reconstruct),
            "spectrum" => Ok(Mode::Spectrum),
            "microscopy" => Ok(Mode::Microscopy),
            "validate" => Ok(Mode::Validate),
            other => Err(Error::Config(format!(
                "unknown mode `{other}`; expected one of lft-map, reconstruct, \
                 spectrum, microscopy, validate"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::LftMap => "lft-map",
            Mode::Reconstruct => "reconstruct",
            Mode::Spectrum => "spectrum",
            Mode::Microscopy => "microscopy",
            Mode::Validate => "validate",
        }
    }
}

/// Quantum-defect table: a named preset or explicit mu_ell values starting
/// at ell = |m|.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum DefectsSpec {
    Named(String),
    Table(Vec<f64>),
}

/// Raw document shape, pre unit conversion.  Kept separate so the unknown-key
/// scan and the per-mode required-field checks stay in one place.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<String>,
    /// energies in cm^-1 relative to the zero-field ionization threshold
    energies_cm: Option<Vec<f64>>,
    field_vcm: Option<f64>,
    m: Option<i32>,
    ell_max: Option<i32>,
    /// number of xi channels retained (n1 = 0 .. n1_max - 1)
    n1_max: Option<usize>,
    defects: Option<DefectsSpec>,
    /// reduced dipole amplitudes d_ell for ell = |m| .. ell_max
    dipoles: Option<Vec<f64>>,
    z_det_mm: Option<f64>,
    /// photon energy for the overall cross-section scale; defaults to
    /// excitation from a level bound by one rydberg
    photon_energy_cm: Option<f64>,
    rho_max_au: Option<f64>,
    rho_points: Option<usize>,
    r_min_au: Option<f64>,
    r_max_au: Option<f64>,
    r_points: Option<usize>,
    theta_rad: Option<f64>,
    /// reconstruct mode: "analytic" | "numeric" | "auto"
    chi_mode: Option<String>,
    /// validate mode: loosen/tighten the pass thresholds uniformly
    tolerance_scale: Option<f64>,
}

const KNOWN_KEYS: &[&str] = &[
    "mode",
    "energies_cm",
    "field_vcm",
    "m",
    "ell_max",
    "n1_max",
    "defects",
    "dipoles",
    "z_det_mm",
    "photon_energy_cm",
    "rho_max_au",
    "rho_points",
    "r_min_au",
    "r_max_au",
    "r_points",
    "theta_rad",
    "chi_mode",
    "tolerance_scale",
];

/// Validated configuration in atomic units.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    pub energies_cm: Vec<f64>,
    pub energies_au: Vec<f64>,
    pub field_au: f64,
    pub m: i32,
    pub ell_max: i32,
    pub n1_max: usize,
    pub defects: Defects,
    pub dipoles: Vec<f64>,
    pub z_det_au: f64,
    pub photon_energies_au: Vec<f64>,
    pub rho_max_au: f64,
    pub rho_points: usize,
    pub r_min_au: f64,
    pub r_max_au: f64,
    pub r_points: usize,
    pub theta_rad: f64,
    pub chi_mode: ChiMode,
    pub tolerance_scale: f64,
    /// sha-256 of the source document, recorded in every output header
    pub config_hash: String,
}

fn require<T>(v: Option<T>, key: &str, mode: Mode) -> Result<T> {
    v.ok_or_else(|| {
        Error::Config(format!(
            "mode `{}` requires field `{key}`",
            mode.name()
        ))
    })
}

fn check_finite(vals: &[f64], key: &str) -> Result<()> {
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config(format!("`{key}` must be finite")));
    }
    Ok(())
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    // pre-pass: collect *all* unknown keys, not just the first serde hits
    let doc: serde_json::Value = serde_json::from_str(text)?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
    let unknown: Vec<&str> = obj
        .keys()
        .map(String::as_str)
        .filter(|k| !KNOWN_KEYS.contains(k))
        .collect();
    if !unknown.is_empty() {
        return Err(Error::Config(format!(
            "unknown config keys: {}",
            unknown.join(", ")
        )));
    }
    let raw: RawConfig = serde_json::from_str(text)?;

    let mode = Mode::parse(
        raw.mode
            .as_deref()
            .ok_or_else(|| Error::Config("missing required field `mode`".into()))?,
    )?;

    let energies_cm = require(raw.energies_cm, "energies_cm", mode)?;
    if energies_cm.is_empty() {
        return Err(Error::Config("`energies_cm` must be non-empty".into()));
    }
    check_finite(&energies_cm, "energies_cm")?;
    let field_vcm = require(raw.field_vcm, "field_vcm", mode)?;
    if !field_vcm.is_finite() || field_vcm < 0.0 {
        return Err(Error::Config("`field_vcm` must be finite and >= 0".into()));
    }
    let m = require(raw.m, "m", mode)?;
    let ell_max = require(raw.ell_max, "ell_max", mode)?;
    if ell_max < m.abs() {
        return Err(Error::Config(format!(
            "`ell_max` = {ell_max} below |m| = {}",
            m.abs()
        )));
    }
    let n1_max = raw.n1_max.unwrap_or(100);
    if n1_max == 0 {
        return Err(Error::Config("`n1_max` must be positive".into()));
    }

    let n_ell = (ell_max - m.abs() + 1) as usize;
    let defects = match raw.defects {
        None => Defects {
            ell_min: m.abs(),
            mu: vec![0.0; n_ell],
        },
        Some(DefectsSpec::Named(name)) => match name.as_str() {
            "hydrogen" => Defects {
                ell_min: m.abs(),
                mu: vec![0.0; n_ell],
            },
            "sodium" => Defects {
                ell_min: m.abs(),
                mu: (m.abs()..=ell_max).map(sodium_defect).collect(),
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown defects preset `{other}`; expected hydrogen or sodium"
                )))
            }
        },
        Some(DefectsSpec::Table(mu)) => {
            if mu.len() != n_ell {
                return Err(Error::Config(format!(
                    "defects table must list {n_ell} values for ell = {} .. {ell_max}, got {}",
                    m.abs(),
                    mu.len()
                )));
            }
            check_finite(&mu, "defects")?;
            Defects {
                ell_min: m.abs(),
                mu,
            }
        }
    };

    let dipoles = match mode {
        Mode::Spectrum | Mode::Microscopy => {
            let d = require(raw.dipoles, "dipoles", mode)?;
            if d.len() != n_ell {
                return Err(Error::Config(format!(
                    "`dipoles` must list {n_ell} values for ell = {} .. {ell_max}, got {}",
                    m.abs(),
                    d.len()
                )));
            }
            check_finite(&d, "dipoles")?;
            d
        }
        _ => raw.dipoles.unwrap_or_else(|| vec![0.0; n_ell]),
    };

    let (z_det_au, rho_max_au, rho_points) = match mode {
        Mode::Microscopy => {
            let z_mm = require(raw.z_det_mm, "z_det_mm", mode)?;
            if z_mm >= 0.0 {
                return Err(Error::Config("`z_det_mm` must be negative".into()));
            }
            let rho_max = require(raw.rho_max_au, "rho_max_au", mode)?;
            if !(rho_max > 0.0) {
                return Err(Error::Config("`rho_max_au` must be positive".into()));
            }
            let np = require(raw.rho_points, "rho_points", mode)?;
            if np < 2 {
                return Err(Error::Config("`rho_points` must be >= 2".into()));
            }
            (mm_to_au(z_mm), rho_max, np)
        }
        _ => (
            raw.z_det_mm.map(mm_to_au).unwrap_or(-1.0),
            raw.rho_max_au.unwrap_or(0.0),
            raw.rho_points.unwrap_or(0),
        ),
    };

    let (r_min_au, r_max_au, r_points, theta_rad) = if mode == Mode::Reconstruct {
        let r_min = raw.r_min_au.unwrap_or(10.0);
        let r_max = raw.r_max_au.unwrap_or(80.0);
        let np = raw.r_points.unwrap_or(141);
        if !(r_min > 0.0 && r_max > r_min) || np < 2 {
            return Err(Error::Config(
                "reconstruct r grid needs 0 < r_min_au < r_max_au and r_points >= 2".into(),
            ));
        }
        (
            r_min,
            r_max,
            np,
            raw.theta_rad.unwrap_or(5.0 * std::f64::consts::PI / 6.0),
        )
    } else {
        (
            raw.r_min_au.unwrap_or(10.0),
            raw.r_max_au.unwrap_or(80.0),
            raw.r_points.unwrap_or(141),
            raw.theta_rad.unwrap_or(5.0 * std::f64::consts::PI / 6.0),
        )
    };

    let chi_mode = match raw.chi_mode.as_deref() {
        None | Some("auto") => ChiMode::Auto,
        Some("analytic") => ChiMode::AnalyticFieldFree,
        Some("numeric") => ChiMode::NumericEta,
        Some(other) => {
            return Err(Error::Config(format!(
                "unknown chi_mode `{other}`; expected analytic, numeric or auto"
            )))
        }
    };

    let energies_au: Vec<f64> = energies_cm.iter().map(|&e| energy_cm_to_au(e)).collect();
    // photon energy fixes only the overall cross-section scale; default to
    // excitation out of a level bound by 0.5 hartree
    let photon_energies_au: Vec<f64> = match raw.photon_energy_cm {
        Some(p) => {
            if !(p > 0.0) {
                return Err(Error::Config("`photon_energy_cm` must be positive".into()));
            }
            vec![energy_cm_to_au(p); energies_au.len()]
        }
        None => energies_au.iter().map(|&e| e + 0.5).collect(),
    };

    let tolerance_scale = raw.tolerance_scale.unwrap_or(1.0);
    if !(tolerance_scale > 0.0) {
        return Err(Error::Config("`tolerance_scale` must be positive".into()));
    }

    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let config_hash = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect::<String>();

    Ok(RunConfig {
        mode,
        energies_cm,
        energies_au,
        field_au: field_vcm_to_au(field_vcm),
        m,
        ell_max,
        n1_max,
        defects,
        dipoles,
        z_det_au,
        photon_energies_au,
        rho_max_au,
        rho_points,
        r_min_au,
        r_max_au,
        r_points,
        theta_rad,
        chi_mode,
        tolerance_scale,
        config_hash,
    })
}
