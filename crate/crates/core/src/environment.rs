//! Environmental decoherence channels and internal heating.
//!
//! Four channels degrade fringe contrast between release and detection:
//!
//! * **collisions** — van-der-Waals scattering of residual gas molecules;
//!   a single collision resolves the superposition, so the kernel is a
//!   separation-independent survival factor,
//! * **absorption** — thermal photons absorbed from the environment,
//! * **scattering** — thermal photons elastically scattered (Rayleigh/Mie),
//! * **emission** — photons radiated by the internally hot sphere, with a
//!   spectrum that follows the internal temperature along the trajectory.
//!
//! Each channel contributes ln R_n <= 0 at the harmonic path separation
//! x_n; the fringe amplitude of harmonic n is multiplied by
//! R_n = exp(sum of enabled channels).

use crate::constants::{C, H, HBAR, K_B};
use crate::error::{Error, Result};
use crate::materials::Material;
use std::f64::consts::PI;

pub use crate::materials::GasSpecies;
use crate::numerics::{
    gamma_function, gauss_legendre_rule, integrate_adaptive, sine_integral, QuadratureSpec,
};
use crate::optics::SphereOptics;

/// Residual-gas environment around the interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentParams {
    /// Temperature of the vacuum chamber and its thermal radiation [K].
    pub temperature_k: f64,
    /// Residual gas pressure [Pa].
    pub pressure_pa: f64,
    /// Residual gas species.
    pub gas: GasSpecies,
    /// Mean gas speed override [m/s]; defaults to the most probable speed
    /// sqrt(2 k_B T / m_gas) of the Maxwell distribution.
    pub mean_gas_velocity_m_s: Option<f64>,
}

impl EnvironmentParams {
    pub fn gas_velocity_m_s(&self) -> f64 {
        self.mean_gas_velocity_m_s
            .unwrap_or_else(|| (2.0 * K_B * self.temperature_k / self.gas.mass_kg).sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature_k > 0.0 && self.temperature_k.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "environment temperature must be positive and finite, got {:e}",
                self.temperature_k
            )));
        }
        if !(self.pressure_pa >= 0.0 && self.pressure_pa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gas pressure must be non-negative and finite, got {:e}",
                self.pressure_pa
            )));
        }
        self.gas.validate()?;
        if let Some(v) = self.mean_gas_velocity_m_s {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "mean gas velocity must be positive and finite, got {v:e}"
                )));
            }
        }
        Ok(())
    }
}

/// Which decoherence channels enter the fringe-amplitude kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvChannels {
    pub collisions: bool,
    pub absorption: bool,
    pub scattering: bool,
    pub emission: bool,
}

impl Default for EnvChannels {
    fn default() -> Self {
        Self::all()
    }
}

impl EnvChannels {
    pub fn all() -> Self {
        Self {
            collisions: true,
            absorption: true,
            scattering: true,
            emission: true,
        }
    }

    pub fn none() -> Self {
        Self {
            collisions: false,
            absorption: false,
            scattering: false,
            emission: false,
        }
    }
}

/// Time weighting of the elastic-scattering channel. The two interferometer
/// segments contribute with opposite sign in the standard treatment
/// (`TimeDifference`); `TimeSum` weights both segments positively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScatteringTimeConvention {
    #[default]
    TimeDifference,
    TimeSum,
}

/// Optical-trap and cooling parameters prior to release.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapParams {
    /// Trap laser wavelength [m].
    pub wavelength_m: f64,
    /// Duration the particle is held (and heated) in the trap [s].
    pub cooling_time_s: f64,
    /// Trap laser intensity at the particle [W/m^2].
    pub intensity_w_m2: f64,
    /// Mechanical (center-of-mass) trap frequency [Hz].
    pub mech_frequency_hz: f64,
    /// Center-of-mass temperature reached by feedback cooling [K].
    pub com_temperature_k: f64,
}

impl TrapParams {
    pub fn validate(&self) -> Result<()> {
        for (value, name, strictly_positive) in [
            (self.wavelength_m, "trap wavelength", true),
            (self.cooling_time_s, "trap cooling time", false),
            (self.intensity_w_m2, "trap intensity", false),
            (self.mech_frequency_hz, "trap mechanical frequency", true),
            (self.com_temperature_k, "center-of-mass temperature", true),
        ] {
            let ok = value.is_finite() && if strictly_positive { value > 0.0 } else { value >= 0.0 };
            if !ok {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be {} and finite, got {value:e}",
                    if strictly_positive { "positive" } else { "non-negative" }
                )));
            }
        }
        Ok(())
    }
}

/// Interferometer geometry needed by the decoherence kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelGeometry {
    pub mass_kg: f64,
    pub grating_period_m: f64,
    pub t1_s: f64,
    pub t2_s: f64,
}

impl KernelGeometry {
    pub fn total_time_s(&self) -> f64 {
        self.t1_s + self.t2_s
    }

    /// Maximum path separation probed by the n-th harmonic [m].
    pub fn separation_m(&self, n: u32) -> f64 {
        n as f64 * H * self.t1_s * self.t2_s
            / (self.total_time_s() * self.mass_kg * self.grating_period_m)
    }

    pub fn validate(&self) -> Result<()> {
        for (value, name) in [
            (self.mass_kg, "mass"),
            (self.grating_period_m, "grating period"),
            (self.t1_s, "t1"),
            (self.t2_s, "t2"),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "kernel geometry: {name} must be positive and finite, got {value:e}"
                )));
            }
        }
        Ok(())
    }
}

/// Per-channel contributions to ln R_n (each <= 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelLnParts {
    pub collisions: f64,
    pub absorption: f64,
    pub scattering: f64,
    pub emission: f64,
}

impl KernelLnParts {
    /// Sum of the enabled channels.
    pub fn total(&self, channels: &EnvChannels) -> f64 {
        let mut t = 0.0;
        if channels.collisions {
            t += self.collisions;
        }
        if channels.absorption {
            t += self.absorption;
        }
        if channels.scattering {
            t += self.scattering;
        }
        if channels.emission {
            t += self.emission;
        }
        t
    }
}

/// Spectral decoherence-event densities at one angular frequency
/// [1 / (s * rad/s)]; integrate over omega for total rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralRates {
    pub absorption: f64,
    pub scattering: f64,
}

/// London dispersion coefficient between the sphere and a gas molecule,
/// C6 = (3/2) a_p a_g I_p I_g / (I_p + I_g) [J m^6], from the static
/// polarizability volumes [m^3] and ionization energies [J].
pub fn c6_coefficient(
    sphere_polarizability_m3: f64,
    sphere_ionization_j: f64,
    gas: &GasSpecies,
) -> f64 {
    1.5 * sphere_polarizability_m3
        * gas.polarizability_volume_m3
        * sphere_ionization_j
        * gas.ionization_energy_j
        / (sphere_ionization_j + gas.ionization_energy_j)
}

/// Total collision rate with the residual gas [1/s]: van-der-Waals
/// cross-section folded with the impinging flux,
/// Gamma = [4 pi G(9/10) / (5 sin(pi/5))] (3 pi C6 / (2 hbar v))^{2/5}
///         * P v / (k_B T).
pub fn collision_rate(c6_j_m6: f64, env: &EnvironmentParams) -> Result<f64> {
    env.validate()?;
    if !(c6_j_m6 > 0.0 && c6_j_m6.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "C6 coefficient must be positive and finite, got {c6_j_m6:e}"
        )));
    }
    if env.pressure_pa == 0.0 {
        return Ok(0.0);
    }
    let v = env.gas_velocity_m_s();
    let prefactor = 4.0 * PI * gamma_function(0.9) / (5.0 * (PI / 5.0).sin());
    let cross_section = (3.0 * PI * c6_j_m6 / (2.0 * HBAR * v)).powf(0.4);
    Ok(prefactor * cross_section * env.pressure_pa * v / (K_B * env.temperature_k))
}

/// Spectral decoherence densities for absorption and elastic scattering of
/// environmental thermal photons at angular frequency `omega`:
/// gamma(omega) = (omega / pi c)^2 sigma(omega) n_th(omega, T_env).
pub fn spectral_rates(
    optics: &SphereOptics,
    env: &EnvironmentParams,
    omega_rad_s: f64,
) -> Result<SpectralRates> {
    env.validate()?;
    let occupation = bose_occupation(omega_rad_s, env.temperature_k);
    let xs = optics.cross_sections(omega_rad_s)?;
    let mode_density = (omega_rad_s / (PI * C)).powi(2);
    Ok(SpectralRates {
        absorption: mode_density * xs.absorption_m2 * occupation,
        scattering: mode_density * xs.scattering_m2 * occupation,
    })
}

/// Spectral density of thermal-emission decoherence events at internal
/// temperature `t_internal_k`:
/// gamma_e(omega) = (omega / pi c)^2 sigma_abs(omega) e^{-hbar omega / k T}
///                  Im{(eps-1)/(eps+2)}.
pub fn emission_rate(
    optics: &SphereOptics,
    omega_rad_s: f64,
    t_internal_k: f64,
) -> Result<f64> {
    if !(t_internal_k > 0.0 && t_internal_k.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "internal temperature must be positive and finite, got {t_internal_k:e}"
        )));
    }
    let xs = optics.cross_sections(omega_rad_s)?;
    let eps = optics.permittivity(omega_rad_s)?;
    let im_m = ((eps - 1.0) / (eps + 2.0)).im;
    let boltzmann = boltzmann_factor(omega_rad_s, t_internal_k);
    Ok((omega_rad_s / (PI * C)).powi(2) * xs.absorption_m2 * boltzmann * im_m)
}

fn bose_occupation(omega_rad_s: f64, temperature_k: f64) -> f64 {
    let x = HBAR * omega_rad_s / (K_B * temperature_k);
    if x > 700.0 {
        0.0
    } else {
        1.0 / x.exp_m1()
    }
}

fn boltzmann_factor(omega_rad_s: f64, temperature_k: f64) -> f64 {
    (-HBAR * omega_rad_s / (K_B * temperature_k)).exp()
}

/// sin(x)/x with the removable singularity filled in.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 * (1.0 - x * x / 20.0)
    } else {
        x.sin() / x
    }
}

/// Angular-average bracket of the absorption channel,
/// Si(a)/a - 1 (exactly 0 at a = 0, tends to -1 for a '>>' 1).
fn absorption_bracket(a: f64) -> f64 {
    if a.abs() < 0.05 {
        let a2 = a * a;
        -a2 / 18.0 * (1.0 - 3.0 * a2 / 100.0)
    } else {
        sine_integral(a) / a - 1.0
    }
}

/// Angular-average bracket of the elastic-scattering channel,
/// Si(2a)/a - sinc(a)^2 - 1.
fn scattering_bracket(a: f64) -> f64 {
    if a.abs() < 0.05 {
        let a2 = a * a;
        -a2 / 9.0 * (1.0 - 2.0 * a2 / 25.0)
    } else {
        let s = sinc(a);
        sine_integral(2.0 * a) / a - s * s - 1.0
    }
}

/// Number of Gauss-Legendre nodes per optical-table segment used for the
/// thermal-emission frequency integrals.
const EMISSION_NODES_PER_SEGMENT: usize = 8;
/// Number of Gauss-Legendre nodes for the emission progress variable
/// (position of the emission event within each free-fall segment).
const EMISSION_THETA_NODES: usize = 24;

/// Frequency nodes for thermal-emission integrals, with per-node
/// coefficients that already fold in the quadrature weight, the mode
/// density, the absorption cross-section, and the dielectric loss factor.
/// With `with_photon_energy` the coefficient additionally carries
/// hbar*omega, turning event rates into radiated power.
fn emission_nodes(
    optics: &SphereOptics,
    with_photon_energy: bool,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows = optics.table().rows();
    let (base_nodes, base_weights) = gauss_legendre_rule(EMISSION_NODES_PER_SEGMENT);
    let mut omegas = Vec::new();
    let mut coeffs = Vec::new();
    // Iterate segments in ascending omega (descending wavelength) so the
    // stored node order is canonical.
    for pair in rows.windows(2).rev() {
        let omega_lo = 2.0 * PI * C / pair[1].wavelength_m;
        let omega_hi = 2.0 * PI * C / pair[0].wavelength_m;
        let mid = 0.5 * (omega_lo + omega_hi);
        let half = 0.5 * (omega_hi - omega_lo);
        for (t, w) in base_nodes.iter().zip(&base_weights) {
            let omega = mid + half * t;
            let xs = optics.cross_sections(omega)?;
            let eps = optics.permittivity(omega)?;
            let im_m = ((eps - 1.0) / (eps + 2.0)).im;
            let mut c = w * half * (omega / (PI * C)).powi(2) * xs.absorption_m2 * im_m;
            if with_photon_energy {
                c *= HBAR * omega;
            }
            if !c.is_finite() {
                return Err(Error::NumericIntegrity(format!(
                    "non-finite emission coefficient at omega = {omega:e} rad/s"
                )));
            }
            omegas.push(omega);
            coeffs.push(c);
        }
    }
    Ok((omegas, coeffs))
}

/// All environmental decoherence machinery for one sphere, prepared once.
#[derive(Debug, Clone)]
pub struct DecoherenceModel<'a> {
    optics: SphereOptics<'a>,
    env: EnvironmentParams,
    channels: EnvChannels,
    convention: ScatteringTimeConvention,
    quad: QuadratureSpec,
    collision_rate_per_s: f64,
    emission_omegas: Vec<f64>,
    emission_coeffs: Vec<f64>,
    theta_nodes: Vec<f64>,
    theta_weights: Vec<f64>,
}

impl<'a> DecoherenceModel<'a> {
    pub fn new(
        optics: SphereOptics<'a>,
        material: &Material,
        env: EnvironmentParams,
        channels: EnvChannels,
        convention: ScatteringTimeConvention,
        quad: QuadratureSpec,
    ) -> Result<Self> {
        env.validate()?;
        material.validate()?;
        quad.validate()?;
        let collision_rate_per_s = if env.pressure_pa > 0.0 {
            let c6 = c6_coefficient(
                optics.static_polarizability_volume(),
                material.ionization_energy_j,
                &env.gas,
            );
            collision_rate(c6, &env)?
        } else {
            0.0
        };
        let (emission_omegas, emission_coeffs) = emission_nodes(&optics, false)?;
        let (theta_raw, theta_w_raw) = gauss_legendre_rule(EMISSION_THETA_NODES);
        // Map from [-1, 1] to the unit interval.
        let theta_nodes: Vec<f64> = theta_raw.iter().map(|t| 0.5 * (t + 1.0)).collect();
        let theta_weights: Vec<f64> = theta_w_raw.iter().map(|w| 0.5 * w).collect();
        Ok(Self {
            optics,
            env,
            channels,
            convention,
            quad,
            collision_rate_per_s,
            emission_omegas,
            emission_coeffs,
            theta_nodes,
            theta_weights,
        })
    }

    pub fn collision_rate_per_s(&self) -> f64 {
        self.collision_rate_per_s
    }

    pub fn channels(&self) -> EnvChannels {
        self.channels
    }

    pub fn environment(&self) -> &EnvironmentParams {
        &self.env
    }

    /// Per-channel ln R_n contributions at the n-th harmonic separation.
    /// The internal-temperature trajectory supplies the emission spectrum
    /// along both free-fall segments.
    pub fn kernel_ln_parts(
        &self,
        n: u32,
        geometry: &KernelGeometry,
        trajectory: &InternalTemperatureTrajectory,
    ) -> Result<KernelLnParts> {
        geometry.validate()?;
        let t1 = geometry.t1_s;
        let t2 = geometry.t2_s;
        let t_total = geometry.total_time_s();
        let collisions = -self.collision_rate_per_s * t_total;
        if n == 0 {
            // Zero separation: the photon kernels are exactly unity.
            return Ok(KernelLnParts {
                collisions,
                absorption: 0.0,
                scattering: 0.0,
                emission: 0.0,
            });
        }
        let x = geometry.separation_m(n);
        let (omega_lo, omega_hi) = self.optics.table().omega_bounds();
        let env_t = self.env.temperature_k;
        let optics = self.optics;

        let absorption_integral = integrate_adaptive(
            |omega| {
                let occupation = bose_occupation(omega, env_t);
                if occupation == 0.0 {
                    return 0.0;
                }
                let sigma = match optics.cross_sections(omega) {
                    Ok(xs) => xs.absorption_m2,
                    Err(_) => f64::NAN,
                };
                (omega / (PI * C)).powi(2)
                    * sigma
                    * occupation
                    * absorption_bracket(x * omega / C)
            },
            omega_lo,
            omega_hi,
            &self.quad,
        )?
        .value;
        let absorption = t_total * absorption_integral;

        let scattering_integral = integrate_adaptive(
            |omega| {
                let occupation = bose_occupation(omega, env_t);
                if occupation == 0.0 {
                    return 0.0;
                }
                let sigma = match optics.cross_sections(omega) {
                    Ok(xs) => xs.scattering_m2,
                    Err(_) => f64::NAN,
                };
                (omega / (PI * C)).powi(2)
                    * sigma
                    * occupation
                    * scattering_bracket(x * omega / C)
            },
            omega_lo,
            omega_hi,
            &self.quad,
        )?
        .value;
        let scattering_time = match self.convention {
            ScatteringTimeConvention::TimeDifference => t1 - t2,
            ScatteringTimeConvention::TimeSum => t_total,
        };
        let scattering = scattering_time * scattering_integral;

        // Emission: the event position within each segment sets both the
        // Boltzmann weight (through the instantaneous internal temperature)
        // and the effective separation at emission time.
        let mut emission = 0.0;
        for (theta, w_theta) in self.theta_nodes.iter().zip(&self.theta_weights) {
            let temp_first = trajectory.temperature_free_fall(t1 * (1.0 - theta));
            let temp_second = trajectory.temperature_free_fall(t1 + t2 * theta);
            let mut sum_first = 0.0;
            let mut sum_second = 0.0;
            for (omega, coeff) in self.emission_omegas.iter().zip(&self.emission_coeffs) {
                let bracket = sinc(x * omega / C * theta) - 1.0;
                if *coeff == 0.0 || bracket == 0.0 {
                    continue;
                }
                sum_first += coeff * boltzmann_factor(*omega, temp_first) * bracket;
                sum_second += coeff * boltzmann_factor(*omega, temp_second) * bracket;
            }
            emission += w_theta * (t1 * sum_first + t2 * sum_second);
        }

        let parts = KernelLnParts {
            collisions,
            absorption,
            scattering,
            emission,
        };
        for (value, name) in [
            (parts.collisions, "collisions"),
            (parts.absorption, "absorption"),
            (parts.scattering, "scattering"),
            (parts.emission, "emission"),
        ] {
            if !value.is_finite() {
                return Err(Error::NumericIntegrity(format!(
                    "environmental kernel channel {name} is not finite at n = {n}"
                )));
            }
        }
        Ok(parts)
    }

    /// Fringe-amplitude reduction factor R_n of the enabled channels.
    pub fn kernel(
        &self,
        n: u32,
        geometry: &KernelGeometry,
        trajectory: &InternalTemperatureTrajectory,
    ) -> Result<f64> {
        Ok(self
            .kernel_ln_parts(n, geometry, trajectory)?
            .total(&self.channels)
            .exp())
    }

    /// Total event rates (integrated over the optical table) for the two
    /// photon channels; these bound the respective ln-kernel parts.
    pub fn saturated_photon_rates(&self) -> Result<SpectralRates> {
        let (omega_lo, omega_hi) = self.optics.table().omega_bounds();
        let env_t = self.env.temperature_k;
        let optics = self.optics;
        let absorption = integrate_adaptive(
            |omega| {
                let occupation = bose_occupation(omega, env_t);
                if occupation == 0.0 {
                    return 0.0;
                }
                let sigma = match optics.cross_sections(omega) {
                    Ok(xs) => xs.absorption_m2,
                    Err(_) => f64::NAN,
                };
                (omega / (PI * C)).powi(2) * sigma * occupation
            },
            omega_lo,
            omega_hi,
            &self.quad,
        )?
        .value;
        let scattering = integrate_adaptive(
            |omega| {
                let occupation = bose_occupation(omega, env_t);
                if occupation == 0.0 {
                    return 0.0;
                }
                let sigma = match optics.cross_sections(omega) {
                    Ok(xs) => xs.scattering_m2,
                    Err(_) => f64::NAN,
                };
                (omega / (PI * C)).powi(2) * sigma * occupation
            },
            omega_lo,
            omega_hi,
            &self.quad,
        )?
        .value;
        Ok(SpectralRates {
            absorption,
            scattering,
        })
    }
}

/// ln R_n over the enabled channels (convenience wrapper).
pub fn env_kernel_ln(
    model: &DecoherenceModel,
    n: u32,
    geometry: &KernelGeometry,
    trajectory: &InternalTemperatureTrajectory,
) -> Result<f64> {
    Ok(model
        .kernel_ln_parts(n, geometry, trajectory)?
        .total(&model.channels()))
}

/// Internal temperature of the sphere from trap loading to detection,
/// integrated on a uniform grid (step <= 1 ms) with classical RK4.
#[derive(Debug, Clone)]
pub struct InternalTemperatureTrajectory {
    step_s: f64,
    samples_k: Vec<f64>,
    release_time_s: f64,
}

impl InternalTemperatureTrajectory {
    /// A constant-temperature trajectory (no trap heating modeled).
    pub fn constant(temperature_k: f64, release_time_s: f64, span_s: f64) -> Result<Self> {
        if !(temperature_k > 0.0 && temperature_k.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "constant internal temperature must be positive, got {temperature_k:e}"
            )));
        }
        Ok(Self {
            step_s: span_s.max(1e-3),
            samples_k: vec![temperature_k; 2],
            release_time_s,
        })
    }

    pub fn step_s(&self) -> f64 {
        self.step_s
    }

    pub fn samples_k(&self) -> &[f64] {
        &self.samples_k
    }

    /// Time of trap release on the trajectory clock [s].
    pub fn release_time_s(&self) -> f64 {
        self.release_time_s
    }

    pub fn end_time_s(&self) -> f64 {
        (self.samples_k.len() - 1) as f64 * self.step_s
    }

    /// Internal temperature at absolute time `t` (clamped to the stored
    /// span, linear interpolation between steps).
    pub fn temperature(&self, t_s: f64) -> f64 {
        let last = self.samples_k.len() - 1;
        if !(t_s > 0.0) {
            return self.samples_k[0];
        }
        let pos = t_s / self.step_s;
        if pos >= last as f64 {
            return self.samples_k[last];
        }
        let i = pos as usize;
        let frac = pos - i as f64;
        self.samples_k[i] * (1.0 - frac) + self.samples_k[i + 1] * frac
    }

    /// Internal temperature at time `tau` after release.
    pub fn temperature_free_fall(&self, tau_s: f64) -> f64 {
        self.temperature(self.release_time_s + tau_s)
    }

    pub fn release_temperature_k(&self) -> f64 {
        self.temperature(self.release_time_s)
    }

    pub fn final_temperature_k(&self) -> f64 {
        *self.samples_k.last().expect("non-empty by construction")
    }
}

/// Integrate the internal-temperature balance
/// dT/dt = [P_abs(trap, t) - P_emi(T)] / (m c_m) from trap loading
/// (T = T_env at t = 0) through release at `cooling_time_s` to the end of
/// free fall.
pub fn internal_temperature_trajectory(
    optics: &SphereOptics,
    material: &Material,
    trap: &TrapParams,
    env: &EnvironmentParams,
    mass_kg: f64,
    free_fall_time_s: f64,
) -> Result<InternalTemperatureTrajectory> {
    trap.validate()?;
    env.validate()?;
    material.validate()?;
    if !(mass_kg > 0.0 && mass_kg.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "mass must be positive and finite, got {mass_kg:e}"
        )));
    }
    if !(free_fall_time_s >= 0.0 && free_fall_time_s.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "free-fall time must be non-negative and finite, got {free_fall_time_s:e}"
        )));
    }
    integrate_temperature(optics, material, trap, env, mass_kg, free_fall_time_s, 1e-3)
}

fn integrate_temperature(
    optics: &SphereOptics,
    material: &Material,
    trap: &TrapParams,
    env: &EnvironmentParams,
    mass_kg: f64,
    free_fall_time_s: f64,
    max_step_s: f64,
) -> Result<InternalTemperatureTrajectory> {
    let omega_trap = 2.0 * PI * C / trap.wavelength_m;
    let absorbed_power = optics.cross_sections(omega_trap)?.absorption_m2 * trap.intensity_w_m2;
    let (emi_omegas, emi_coeffs) = emission_nodes(optics, true)?;
    let heat_capacity = mass_kg * material.specific_heat_j_kg_k;
    let radiated_power = |t_k: f64| -> f64 {
        let mut p = 0.0;
        for (omega, coeff) in emi_omegas.iter().zip(&emi_coeffs) {
            p += coeff * boltzmann_factor(*omega, t_k);
        }
        p
    };
    let total_span = trap.cooling_time_s + free_fall_time_s;
    let steps = ((total_span / max_step_s).ceil() as usize).max(1);
    let dt = total_span / steps as f64;
    let release = trap.cooling_time_s;
    let derivative = |heated: bool, t_k: f64| -> f64 {
        let heating = if heated { absorbed_power } else { 0.0 };
        (heating - radiated_power(t_k)) / heat_capacity
    };
    let rk4_step = |heated: bool, temp: f64, dt: f64| -> f64 {
        let k1 = derivative(heated, temp);
        let k2 = derivative(heated, temp + 0.5 * dt * k1);
        let k3 = derivative(heated, temp + 0.5 * dt * k2);
        let k4 = derivative(heated, temp + dt * k3);
        temp + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    };
    let mut samples = Vec::with_capacity(steps + 1);
    let mut temp = env.temperature_k;
    samples.push(temp);
    for i in 0..steps {
        let start = i as f64 * dt;
        let end = start + dt;
        temp = if start >= release {
            rk4_step(false, temp, dt)
        } else if end <= release {
            rk4_step(true, temp, dt)
        } else {
            // The step straddles trap release; integrate the heated and
            // free segments separately so every RK4 stage samples a smooth
            // power balance and the scheme keeps its fourth-order accuracy.
            let at_release = rk4_step(true, temp, release - start);
            rk4_step(false, at_release, end - release)
        };
        if !(temp > 0.0 && temp.is_finite()) {
            return Err(Error::TemperatureIntegration(format!(
                "internal temperature became {temp:e} K at t = {end:e} s"
            )));
        }
        samples.push(temp);
    }
    Ok(InternalTemperatureTrajectory {
        step_s: dt,
        samples_k: samples,
        release_time_s: release,
    })
}
