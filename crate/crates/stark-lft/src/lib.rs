//! Local-frame-transformation treatment of an alkali Rydberg atom in a uniform
//! static electric field.
//!
//! The library quantizes the bound parabolic xi motion, solves the eta channel
//! equations with a two-surface eigenchannel R-matrix, assembles the
//! spherical<->parabolic frame transformation and the scattering matrices built
//! on top of it, and evaluates detector-plane photoionization observables.
//! Everything is in atomic units internally; the CLI layer converts from
//! spectroscopic units.

pub mod bspline;
pub mod config;
pub mod constants;
pub mod error;
pub mod eta_channels;
pub mod frame_transform;
pub mod microscopy;
pub mod oracles;
pub mod run;
pub mod scattering;
pub mod special;
pub mod xi_channels;

pub use error::{Error, Result};

/// Physical parameters shared by every stage of the pipeline (atomic units).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemSpec {
    /// electron energy relative to the field-free ionization threshold, hartree
    pub energy: f64,
    /// static field strength, a.u. (>= 0, directed along -z)
    pub field: f64,
    /// azimuthal quantum number
    pub m: i32,
}
