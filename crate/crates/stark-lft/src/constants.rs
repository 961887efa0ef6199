//! Unit conversions (CODATA) and a few shared numerical constants.

/// 1 hartree in cm^-1.
pub const HARTREE_CM: f64 = 219474.6313632;
/// 1 atomic unit of electric field in V/cm.
pub const FIELD_AU_VCM: f64 = 5.14220675e9;
/// 1 mm in bohr.
pub const MM_AU: f64 = 1.8897261e7;
/// Speed of light in atomic units.
pub const C_AU: f64 = 137.035999;

pub fn energy_cm_to_au(e_cm: f64) -> f64 {
    e_cm / HARTREE_CM
}

pub fn field_vcm_to_au(f_vcm: f64) -> f64 {
    f_vcm / FIELD_AU_VCM
}

pub fn mm_to_au(z_mm: f64) -> f64 {
    z_mm * MM_AU
}
