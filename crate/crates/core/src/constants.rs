//! Physical constants (SI, 2018/2019 redefinition values).

use std::f64::consts::PI;

/// Planck constant [J s] (exact by definition).
pub const H: f64 = 6.626_070_15e-34;
/// Reduced Planck constant [J s].
pub const HBAR: f64 = H / (2.0 * PI);
/// Speed of light in vacuum [m/s] (exact by definition).
pub const C: f64 = 299_792_458.0;
/// Boltzmann constant [J/K] (exact by definition).
pub const K_B: f64 = 1.380_649e-23;
/// Vacuum permittivity [F/m].
pub const EPSILON_0: f64 = 8.854_187_8128e-12;
/// Unified atomic mass unit [kg].
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Standard gravitational acceleration [m/s^2] (exact by convention).
pub const STANDARD_GRAVITY: f64 = 9.806_65;

/// The constants above bundled as a value, for callers that want to thread
/// them explicitly (e.g. reporting them in output manifests).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub h: f64,
    pub hbar: f64,
    pub c: f64,
    pub k_b: f64,
    pub epsilon_0: f64,
    pub amu: f64,
    pub standard_gravity: f64,
}

impl PhysicalConstants {
    /// The SI values used throughout the crate.
    pub const fn si() -> Self {
        Self {
            h: H,
            hbar: HBAR,
            c: C,
            k_b: K_B,
            epsilon_0: EPSILON_0,
            amu: AMU,
            standard_gravity: STANDARD_GRAVITY,
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::si()
    }
}
