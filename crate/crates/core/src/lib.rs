//! Simulation engine for near-field Talbot interferometry with levitated
//! dielectric nanospheres.
//!
//! The crate models a single-grating matter-wave interferometer: a sphere is
//! released from an optical trap, falls freely for a time `t1`, interacts with
//! a retro-reflected laser pulse acting as a phase/absorption grating, falls
//! for `t2`, and is detected on a screen. The modules compute
//!
//! * Mie/Rayleigh scattering of the sphere ([`optics`]),
//! * the grating's phase and decoherence action ([`grating`]),
//! * environmental decoherence from gas collisions and thermal photons
//!   ([`environment`]),
//! * spontaneous-localization (CSL) decoherence ([`csl`]),
//! * the resulting fringe pattern ([`pattern`]), and
//! * exclusion maps over the CSL parameter plane ([`analysis`]).
//!
//! All quantities are SI unless a name says otherwise.

pub mod analysis;
pub mod constants;
pub mod csl;
pub mod environment;
pub mod error;
pub mod grating;
pub mod materials;
pub mod numerics;
pub mod optics;
pub mod pattern;

pub use analysis::{aleph, exclusion_scan, AlephResult, ExclusionGrid, ScanGrid};
pub use constants::PhysicalConstants;
pub use csl::{csl_f, csl_kernel, csl_rate, form_factor, CslParams, CslShape};
pub use environment::{
    c6_coefficient, collision_rate, emission_rate, env_kernel_ln, internal_temperature_trajectory,
    spectral_rates, DecoherenceModel, EnvChannels, EnvironmentParams, GasSpecies,
    InternalTemperatureTrajectory, KernelGeometry, KernelLnParts, ScatteringTimeConvention,
    SpectralRates, TrapParams,
};
pub use error::{Error, Result};
pub use grating::{
    classical_coefficient, eikonal_phase, eikonal_quantities, talbot_coefficient,
    EikonalQuantities, GratingCoupling, GratingModel, GratingParams, MAX_HARMONIC,
};
pub use materials::{
    load_optical_table, radius_from_mass, Material, OpticalRow, OpticalTable,
};
pub use numerics::{
    bessel_j, gamma_function, integrate_adaptive, integrate_damped_semiinf, sine_integral,
    spherical_j1, Quadrature, QuadratureSpec,
};
pub use optics::{
    rayleigh_polarizability, AmplitudeProducts, CrossSections, PreparedScattering,
    ScatteringRegime, SphereOptics,
};
pub use pattern::{
    coherence_spread, derived_scales, drop_length, pattern_classical, pattern_quantum,
    t1_for_slits, thermal_sigmas, visibility, ComponentRow, DerivedScales, ExperimentConfig,
    PatternComponents, PatternKind, PatternResult, Simulation,
};
