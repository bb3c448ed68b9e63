//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by the simulation engine.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// A user-supplied parameter is out of its physical domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An optical data table could not be read or is malformed.
    #[error("optical table: {0}")]
    OpticalTable(String),

    /// An optical property was requested outside the tabulated range.
    #[error(
        "wavelength {wavelength_m:.6e} m outside tabulated optical range \
         [{min_wavelength_m:.6e}, {max_wavelength_m:.6e}] m"
    )]
    OpticalRange {
        wavelength_m: f64,
        min_wavelength_m: f64,
        max_wavelength_m: f64,
    },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error(
        "quadrature did not converge: best estimate {best_estimate:.6e} with error bound \
         {error_bound:.6e} after {subdivisions} subdivisions"
    )]
    QuadratureNonConvergence {
        best_estimate: f64,
        error_bound: f64,
        subdivisions: usize,
    },

    /// A computed quantity violated an internal consistency requirement
    /// (non-finite value, negative probability, spurious imaginary part, ...).
    #[error("numeric integrity: {0}")]
    NumericIntegrity(String),

    /// The internal-temperature time integration became unstable.
    #[error("temperature integration: {0}")]
    TemperatureIntegration(String),

    /// Two patterns were compared on incompatible grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Too many points of a parameter scan failed to evaluate.
    #[error("scan aborted: {0}")]
    ScanAborted(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
