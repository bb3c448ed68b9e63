//! Fringe-pattern assembly for the single-grating near-field interferometer.
//!
//! Timeline: the sphere is released from the trap, falls freely for `t1`,
//! receives the grating pulse, falls for `t2`, and is detected on a screen.
//! For Gaussian initial states the detection probability density is an
//! exact harmonic series
//!
//! P(x) = delta [ 1 + 2 sum_{n>=1} B_n R_n^env R_n^csl E_n cos(2 pi n x / D) ]
//!
//! with the grating coefficients B_n evaluated at the n-th path separation,
//! the environmental and collapse kernels R_n at the same separation, the
//! position-spread envelope E_n, the geometric magnification
//! D = d (t1 + t2) / t1 and the mean density
//! delta = m / (sqrt(2 pi) sigma_p (t1 + t2)).

use crate::constants::{H, HBAR, K_B, STANDARD_GRAVITY};
use crate::csl::{CslParams, CslShape};
use crate::environment::{
    internal_temperature_trajectory, DecoherenceModel, EnvChannels, EnvironmentParams,
    InternalTemperatureTrajectory, KernelGeometry, ScatteringTimeConvention, TrapParams,
};
use crate::error::{Error, Result};
use crate::grating::{talbot_coefficient, GratingCoupling, GratingModel, GratingParams, MAX_HARMONIC};
use crate::materials::{radius_from_mass, Material};
use crate::numerics::QuadratureSpec;
use crate::optics::{ScatteringRegime, SphereOptics};
use std::f64::consts::PI;

/// Complete description of one interferometer run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub material: Material,
    pub mass_kg: f64,
    /// Geometric radius override [m]; defaults to the radius implied by the
    /// mass and bulk density.
    pub radius_override_m: Option<f64>,
    /// Initial position spread override [m]; defaults to the trap
    /// ground-state width.
    pub sigma_x_m: Option<f64>,
    /// Initial momentum spread override [kg m/s]; defaults to the
    /// minimum-uncertainty partner of sigma_x.
    pub sigma_p_kg_m_s: Option<f64>,
    pub trap: TrapParams,
    pub grating: GratingParams,
    pub grating_model: GratingModel,
    pub scattering_regime: ScatteringRegime,
    pub t1_s: f64,
    pub t2_s: f64,
    pub env: EnvironmentParams,
    pub env_channels: EnvChannels,
    pub scattering_time_convention: ScatteringTimeConvention,
    /// Collapse-model point evaluated alongside the quantum pattern.
    pub csl: Option<CslParams>,
    /// Detection window width [m], centered on the optical axis.
    pub screen_window_m: f64,
    /// Number of screen sample points (endpoints included).
    pub screen_samples: usize,
    pub quadrature: QuadratureSpec,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        self.trap.validate()?;
        self.grating.validate()?;
        self.env.validate()?;
        self.quadrature.validate()?;
        if let Some(csl) = &self.csl {
            csl.validate()?;
        }
        if !(self.mass_kg > 0.0 && self.mass_kg.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive and finite, got {:e}",
                self.mass_kg
            )));
        }
        for (value, name) in [
            (self.radius_override_m, "radius override"),
            (self.sigma_x_m, "sigma_x override"),
            (self.sigma_p_kg_m_s, "sigma_p override"),
        ] {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "{name} must be positive and finite, got {v:e}"
                    )));
                }
            }
        }
        for (value, name) in [(self.t1_s, "t1"), (self.t2_s, "t2")] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {value:e}"
                )));
            }
        }
        if !(self.screen_window_m > 0.0 && self.screen_window_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "screen window must be positive and finite, got {:e}",
                self.screen_window_m
            )));
        }
        if self.screen_samples < 2 {
            return Err(Error::InvalidParameter(format!(
                "screen needs at least 2 samples, got {}",
                self.screen_samples
            )));
        }
        Ok(())
    }

    /// Sphere radius: explicit override or implied by mass and density.
    pub fn radius_m(&self) -> f64 {
        self.radius_override_m
            .unwrap_or_else(|| radius_from_mass(self.mass_kg, self.material.density_kg_m3))
    }
}

/// Derived quantities fixed by the configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    pub radius_m: f64,
    pub sigma_x_m: f64,
    pub sigma_p_kg_m_s: f64,
    /// Talbot time m d^2 / h [s].
    pub talbot_time_s: f64,
    /// Geometrically magnified fringe period D = d (t1 + t2) / t1 [m].
    pub magnified_period_m: f64,
    /// Mean detection probability density delta [1/m].
    pub mean_probability_per_m: f64,
}

/// Resolve the derived scales (initial spreads, Talbot time, magnification,
/// mean density) for a configuration.
pub fn derived_scales(config: &ExperimentConfig) -> Result<DerivedScales> {
    config.validate()?;
    let mass = config.mass_kg;
    let sigma_x = config.sigma_x_m.unwrap_or_else(|| {
        // Ground-state width of the mechanical trap.
        (HBAR / (4.0 * PI * mass * config.trap.mech_frequency_hz)).sqrt()
    });
    let sigma_p = config.sigma_p_kg_m_s.unwrap_or(HBAR / (2.0 * sigma_x));
    if sigma_x * sigma_p < 0.5 * HBAR * (1.0 - 1e-9) {
        return Err(Error::InvalidParameter(format!(
            "sigma_x * sigma_p = {:e} violates the uncertainty bound {:e}",
            sigma_x * sigma_p,
            0.5 * HBAR
        )));
    }
    let d = config.grating.period_m();
    let t_total = config.t1_s + config.t2_s;
    Ok(DerivedScales {
        radius_m: config.radius_m(),
        sigma_x_m: sigma_x,
        sigma_p_kg_m_s: sigma_p,
        talbot_time_s: mass * d * d / H,
        magnified_period_m: d * t_total / config.t1_s,
        mean_probability_per_m: mass / ((2.0 * PI).sqrt() * sigma_p * t_total),
    })
}

/// Position and momentum spreads of a thermal harmonic-oscillator state of
/// the center of mass at temperature `temperature_k`.
pub fn thermal_sigmas(mass_kg: f64, frequency_hz: f64, temperature_k: f64) -> (f64, f64) {
    let omega = 2.0 * PI * frequency_hz;
    let x = HBAR * omega / (2.0 * K_B * temperature_k);
    let coth = if x > 20.0 { 1.0 } else { 1.0 / x.tanh() };
    let sigma_x = (HBAR / (2.0 * mass_kg * omega) * coth).sqrt();
    let sigma_p = (0.5 * mass_kg * HBAR * omega * coth).sqrt();
    (sigma_x, sigma_p)
}

/// Free-evolution coherence width sqrt(sigma_x^2 + (hbar t / (2 m sigma_x))^2).
pub fn coherence_spread(sigma_x_m: f64, mass_kg: f64, time_s: f64) -> f64 {
    let spread = HBAR * time_s / (2.0 * mass_kg * sigma_x_m);
    (sigma_x_m * sigma_x_m + spread * spread).sqrt()
}

/// Time for the coherence width to span `n_slits` grating periods:
/// the exact root of coherence_spread(t) = n d, or 0 when the initial
/// spread already covers it.
pub fn t1_for_slits(n_slits: u32, mass_kg: f64, sigma_x_m: f64, period_m: f64) -> f64 {
    let target = n_slits as f64 * period_m;
    if sigma_x_m >= target {
        return 0.0;
    }
    2.0 * mass_kg * sigma_x_m / HBAR * (target * target - sigma_x_m * sigma_x_m).sqrt()
}

/// Free-fall drop during both interferometer segments [m].
pub fn drop_length(t1_s: f64, t2_s: f64) -> f64 {
    let t = t1_s + t2_s;
    0.5 * STANDARD_GRAVITY * t * t
}

/// One harmonic of the fringe series with its factor breakdown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentRow {
    pub n: u32,
    /// Grating coefficient B_n.
    pub talbot: f64,
    /// Environmental kernel R_n (enabled channels).
    pub env_kernel: f64,
    /// Collapse kernel R_n^csl (1 when no collapse point is evaluated).
    pub csl_kernel: f64,
    /// Initial-position-spread envelope E_n.
    pub envelope: f64,
    /// Product amplitude entering the cosine series.
    pub amplitude: f64,
}

/// All harmonics of one pattern.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PatternComponents {
    pub rows: Vec<ComponentRow>,
    /// True when the series was still significant at the supported maximum
    /// order and had to be cut.
    pub truncated_at_cap: bool,
}

/// Which propagation model produced a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    /// Matter-wave interference.
    Quantum,
    /// Ballistic (classical moire) reference.
    Classical,
}

/// A fringe pattern sampled on the detection screen.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternResult {
    pub x_m: Vec<f64>,
    pub probability_per_m: Vec<f64>,
    pub components: PatternComponents,
    pub scales: DerivedScales,
    pub warnings: Vec<String>,
}

impl PatternResult {
    /// Evaluate the harmonic series at an arbitrary screen position; `None`
    /// when the pattern carries no component breakdown (e.g. synthetic
    /// test data).
    pub fn evaluate_series(&self, x_m: f64) -> Option<f64> {
        if self.components.rows.is_empty() {
            return None;
        }
        Some(series_value(
            &self.components,
            self.scales.mean_probability_per_m,
            self.scales.magnified_period_m,
            x_m,
        ))
    }

    /// Wrap externally supplied samples as a pattern (no component
    /// breakdown; scales carry only the grid-derived quantities).
    pub fn synthetic(x_m: Vec<f64>, probability_per_m: Vec<f64>) -> Self {
        assert_eq!(x_m.len(), probability_per_m.len());
        assert!(x_m.len() >= 2, "synthetic pattern needs at least two samples");
        let span = x_m[x_m.len() - 1] - x_m[0];
        let mean = probability_per_m.iter().sum::<f64>() / probability_per_m.len() as f64;
        Self {
            x_m,
            probability_per_m,
            components: PatternComponents::default(),
            scales: DerivedScales {
                radius_m: 0.0,
                sigma_x_m: 0.0,
                sigma_p_kg_m_s: 0.0,
                talbot_time_s: 0.0,
                magnified_period_m: span,
                mean_probability_per_m: mean,
            },
            warnings: Vec::new(),
        }
    }
}

fn series_value(components: &PatternComponents, delta: f64, period: f64, x: f64) -> f64 {
    let mut acc = 0.0;
    for row in &components.rows {
        acc += row.amplitude * (2.0 * PI * row.n as f64 * x / period).cos();
    }
    delta * (1.0 + 2.0 * acc)
}

/// Fringe visibility (max - min) / (max + min). Patterns with a component
/// breakdown are evaluated over exactly one magnified period; synthetic
/// patterns fall back to the stored samples.
pub fn visibility(pattern: &PatternResult) -> f64 {
    let (lo, hi) = if pattern.components.rows.is_empty() {
        let lo = pattern
            .probability_per_m
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let hi = pattern
            .probability_per_m
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    } else {
        let period = pattern.scales.magnified_period_m;
        let samples = 2001usize;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..samples {
            let x = period * (i as f64 / (samples - 1) as f64 - 0.5);
            let p = series_value(
                &pattern.components,
                pattern.scales.mean_probability_per_m,
                period,
                x,
            );
            lo = lo.min(p);
            hi = hi.max(p);
        }
        (lo, hi)
    };
    (hi - lo) / (hi + lo)
}

/// A fully prepared interferometer simulation: derived scales, optical
/// response, grating coupling, decoherence model and heating trajectory,
/// all computed once per configuration.
#[derive(Debug, Clone)]
pub struct Simulation<'a> {
    config: &'a ExperimentConfig,
    scales: DerivedScales,
    optics: SphereOptics<'a>,
    coupling: GratingCoupling,
    decoherence: DecoherenceModel<'a>,
    trajectory: InternalTemperatureTrajectory,
}

impl<'a> Simulation<'a> {
    pub fn new(config: &'a ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let scales = derived_scales(config)?;
        let optics = SphereOptics::new(
            scales.radius_m,
            &config.material.optical,
            config.scattering_regime,
        )?;
        let coupling = GratingCoupling::new(
            &optics,
            config.grating,
            config.grating_model,
            config.quadrature,
        )?;
        let decoherence = DecoherenceModel::new(
            optics,
            &config.material,
            config.env,
            config.env_channels,
            config.scattering_time_convention,
            config.quadrature,
        )?;
        let trajectory = internal_temperature_trajectory(
            &optics,
            &config.material,
            &config.trap,
            &config.env,
            config.mass_kg,
            config.t1_s + config.t2_s,
        )?;
        Ok(Self {
            config,
            scales,
            optics,
            coupling,
            decoherence,
            trajectory,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        self.config
    }

    pub fn scales(&self) -> &DerivedScales {
        &self.scales
    }

    pub fn optics(&self) -> &SphereOptics<'a> {
        &self.optics
    }

    pub fn coupling(&self) -> &GratingCoupling {
        &self.coupling
    }

    pub fn decoherence(&self) -> &DecoherenceModel<'a> {
        &self.decoherence
    }

    pub fn trajectory(&self) -> &InternalTemperatureTrajectory {
        &self.trajectory
    }

    pub fn eikonal_phase(&self) -> f64 {
        self.coupling.eikonal_phase()
    }

    pub fn geometry(&self) -> KernelGeometry {
        KernelGeometry {
            mass_kg: self.config.mass_kg,
            grating_period_m: self.config.grating.period_m(),
            t1_s: self.config.t1_s,
            t2_s: self.config.t2_s,
        }
    }

    /// Uniform screen grid over the detection window (endpoints included).
    pub fn screen_grid(&self) -> Vec<f64> {
        let n = self.config.screen_samples;
        let w = self.config.screen_window_m;
        (0..n)
            .map(|i| w * (i as f64 / (n - 1) as f64 - 0.5))
            .collect()
    }

    /// Assemble the harmonic series for the requested propagation model,
    /// optionally with a collapse-model point applied.
    pub fn components(
        &self,
        kind: PatternKind,
        csl: Option<&CslParams>,
    ) -> Result<PatternComponents> {
        let geometry = self.geometry();
        let t_total = geometry.total_time_s();
        let shape = match csl {
            Some(params) => {
                params.validate()?;
                Some((
                    CslShape::new(
                        params.r_c_m,
                        self.scales.radius_m,
                        self.config.material.density_kg_m3,
                        self.config.quadrature,
                    )?,
                    params.lambda_per_s,
                ))
            }
            None => None,
        };
        let envelope_rate = PI * self.scales.sigma_x_m * self.config.t2_s
            / (self.scales.magnified_period_m * self.config.t1_s);
        let mut rows: Vec<ComponentRow> = Vec::new();
        let mut max_amplitude = 0.0f64;
        let mut small_run = 0usize;
        let mut truncated = true;
        for n in 1..=MAX_HARMONIC {
            let s = geometry.separation_m(n);
            let eik = match kind {
                PatternKind::Quantum => self.coupling.eikonal_quantities(s)?,
                PatternKind::Classical => self.coupling.eikonal_quantities_classical(s)?,
            };
            let talbot = talbot_coefficient(&eik, n)?;
            let parts = self
                .decoherence
                .kernel_ln_parts(n, &geometry, &self.trajectory)?;
            let env_kernel = parts.total(&self.config.env_channels).exp();
            let csl_kernel = match &shape {
                Some((shape, lambda)) => shape.kernel(*lambda, s, t_total)?,
                None => 1.0,
            };
            let envelope = (-2.0 * (n as f64 * envelope_rate).powi(2)).exp();
            let amplitude = talbot * env_kernel * csl_kernel * envelope;
            rows.push(ComponentRow {
                n,
                talbot,
                env_kernel,
                csl_kernel,
                envelope,
                amplitude,
            });
            max_amplitude = max_amplitude.max(amplitude.abs());
            if amplitude.abs() < (1e-6 * max_amplitude).max(1e-15) {
                small_run += 1;
                if small_run >= 3 {
                    truncated = false;
                    break;
                }
            } else {
                small_run = 0;
            }
        }
        Ok(PatternComponents {
            rows,
            truncated_at_cap: truncated,
        })
    }

    /// Sample a pattern on the screen grid.
    pub fn pattern(&self, kind: PatternKind, csl: Option<&CslParams>) -> Result<PatternResult> {
        let components = self.components(kind, csl)?;
        let mut warnings = Vec::new();
        if components.truncated_at_cap {
            let residual = components
                .rows
                .last()
                .map(|row| row.amplitude.abs())
                .unwrap_or(0.0);
            warnings.push(format!(
                "harmonic series truncated at order {MAX_HARMONIC} (residual amplitude {residual:e})"
            ));
        }
        let xs = self.screen_grid();
        let delta = self.scales.mean_probability_per_m;
        let period = self.scales.magnified_period_m;
        let probability: Vec<f64> = xs
            .iter()
            .map(|&x| series_value(&components, delta, period, x))
            .collect();
        for (x, p) in xs.iter().zip(&probability) {
            if !(p.is_finite() && *p > 0.0) {
                return Err(Error::NumericIntegrity(format!(
                    "pattern density is {p:e} at x = {x:e} m"
                )));
            }
        }
        Ok(PatternResult {
            x_m: xs,
            probability_per_m: probability,
            components,
            scales: self.scales,
            warnings,
        })
    }

    pub fn pattern_quantum(&self) -> Result<PatternResult> {
        self.pattern(PatternKind::Quantum, None)
    }

    pub fn pattern_classical(&self) -> Result<PatternResult> {
        self.pattern(PatternKind::Classical, None)
    }

    pub fn pattern_quantum_csl(&self, params: &CslParams) -> Result<PatternResult> {
        self.pattern(PatternKind::Quantum, Some(params))
    }
}

/// Quantum-interference pattern for a configuration (no collapse model).
pub fn pattern_quantum(config: &ExperimentConfig) -> Result<PatternResult> {
    Simulation::new(config)?.pattern_quantum()
}

/// Ballistic reference pattern for a configuration.
pub fn pattern_classical(config: &ExperimentConfig) -> Result<PatternResult> {
    Simulation::new(config)?.pattern_classical()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::AMU;
    use crate::materials::{load_optical_table, GasSpecies, OpticalTable};
    use approx::assert_relative_eq;
    use std::path::Path;

    fn si_table() -> OpticalTable {
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
        load_optical_table(&root.join("data/si_optical.csv")).unwrap()
    }

    fn si_material() -> Material {
        Material {
            name: "si".into(),
            density_kg_m3: 2329.0,
            specific_heat_j_kg_k: 700.0,
            ionization_energy_j: 5e-19,
            optical: si_table(),
        }
    }

    fn base_config(mass_amu: f64) -> ExperimentConfig {
        let mass_kg = mass_amu * AMU;
        let d = 355e-9 / 2.0;
        let talbot_time = mass_kg * d * d / H;
        ExperimentConfig {
            material: si_material(),
            mass_kg,
            radius_override_m: None,
            sigma_x_m: None,
            sigma_p_kg_m_s: None,
            trap: TrapParams {
                wavelength_m: 1550e-9,
                cooling_time_s: 1.0,
                intensity_w_m2: 90e9,
                mech_frequency_hz: 200.0,
                com_temperature_k: 0.02,
            },
            grating: GratingParams {
                wavelength_m: 355e-9,
                pulse_fluence_j_m2: 0.034,
            },
            grating_model: GratingModel::Full,
            scattering_regime: ScatteringRegime::Auto,
            t1_s: talbot_time / 2.0,
            t2_s: talbot_time / 2.0,
            env: EnvironmentParams {
                temperature_k: 300.0,
                pressure_pa: 1e-8,
                gas: GasSpecies::nitrogen(),
                mean_gas_velocity_m_s: None,
            },
            env_channels: EnvChannels::all(),
            scattering_time_convention: ScatteringTimeConvention::TimeDifference,
            csl: None,
            screen_window_m: 1e-7,
            screen_samples: 401,
            quadrature: QuadratureSpec::default(),
        }
    }

    #[test]
    fn talbot_time_anchor() {
        let config = base_config(1e6);
        let scales = derived_scales(&config).unwrap();
        assert_relative_eq!(
            scales.talbot_time_s,
            0.078_956_844_377_9,
            max_relative = 1e-10
        );
    }

    #[test]
    fn derived_scale_anchors() {
        let mass = 1e7 * AMU;
        let sigma_ground = (HBAR / (4.0 * PI * mass * 200.0)).sqrt();
        assert_relative_eq!(sigma_ground, 1.589_621_038_39e-9, max_relative = 1e-10);
        let d = 355e-9 / 2.0;
        assert_relative_eq!(
            t1_for_slits(4, mass, sigma_ground, d),
            0.355_429_764_858,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            drop_length(0.362, 0.181),
            1.445_740_472_92,
            max_relative = 1e-10
        );
        let (sx, sp) = thermal_sigmas(mass, 200.0, 0.02);
        assert_relative_eq!(sx, 3.245_056_228_54e-6, max_relative = 1e-9);
        assert!(sx * sp >= 0.5 * HBAR);
    }

    #[test]
    fn coherence_spread_grows_monotonically() {
        let mass = 1e7 * AMU;
        let sigma = 1.6e-9;
        assert_eq!(coherence_spread(sigma, mass, 0.0), sigma);
        let mut previous = sigma;
        for i in 1..=10 {
            let s = coherence_spread(sigma, mass, i as f64 * 0.1);
            assert!(s > previous);
            previous = s;
        }
        // Covering zero slits needs no time; covering from a wide state is free.
        assert_eq!(t1_for_slits(3, mass, 10e-6, 177.5e-9), 0.0);
    }

    #[test]
    fn uncertainty_product_is_enforced() {
        let mut config = base_config(1e6);
        config.sigma_x_m = Some(1e-9);
        config.sigma_p_kg_m_s = Some(HBAR / (2.0e-9) * 0.4); // product 0.4 hbar
        assert!(derived_scales(&config).is_err());
        config.sigma_p_kg_m_s = Some(HBAR / (2.0e-9)); // product = hbar
        assert!(derived_scales(&config).is_ok());
    }

    #[test]
    fn pattern_is_periodic_positive_and_centered_on_mean() {
        let config = base_config(1e6);
        let simulation = Simulation::new(&config).unwrap();
        let pattern = simulation.pattern_quantum().unwrap();
        let period = pattern.scales.magnified_period_m;
        let delta = pattern.scales.mean_probability_per_m;
        // Periodicity of the harmonic series.
        for &x in &[0.0, 0.13e-7, -0.41e-7] {
            let a = pattern.evaluate_series(x).unwrap();
            let b = pattern.evaluate_series(x + period).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
        // Mean over one period is the ballistic mean density (trapezoid over
        // a full period is exact for a finite cosine series).
        let m = 4096usize;
        let mut acc = 0.0;
        for i in 0..m {
            let x = period * (i as f64 / m as f64 - 0.5);
            acc += pattern.evaluate_series(x).unwrap();
        }
        assert_relative_eq!(acc / m as f64, delta, max_relative = 1e-10);
        // Positivity on the screen grid is enforced by construction.
        assert!(pattern.probability_per_m.iter().all(|p| *p > 0.0));
    }

    #[test]
    fn visibility_of_single_harmonic_is_twice_its_amplitude() {
        let row = ComponentRow {
            n: 1,
            talbot: 0.25,
            env_kernel: 1.0,
            csl_kernel: 1.0,
            envelope: 1.0,
            amplitude: 0.25,
        };
        let pattern = PatternResult {
            x_m: vec![0.0, 1.0],
            probability_per_m: vec![1.0, 1.0],
            components: PatternComponents {
                rows: vec![row],
                truncated_at_cap: false,
            },
            scales: DerivedScales {
                radius_m: 1.0,
                sigma_x_m: 1.0,
                sigma_p_kg_m_s: 1.0,
                talbot_time_s: 1.0,
                magnified_period_m: 1.0,
                mean_probability_per_m: 1.0,
            },
            warnings: Vec::new(),
        };
        assert_relative_eq!(visibility(&pattern), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn collapse_kernel_only_attenuates() {
        let mut config = base_config(1e6);
        config.t1_s = 0.04;
        config.t2_s = 0.04;
        let simulation = Simulation::new(&config).unwrap();
        let plain = simulation
            .components(PatternKind::Quantum, None)
            .unwrap();
        let collapsed = simulation
            .components(
                PatternKind::Quantum,
                Some(&CslParams {
                    lambda_per_s: 1e-9,
                    r_c_m: 1e-7,
                }),
            )
            .unwrap();
        for (a, b) in plain.rows.iter().zip(&collapsed.rows) {
            assert_eq!(a.n, b.n);
            assert!(b.csl_kernel > 0.0 && b.csl_kernel <= 1.0);
            assert!(
                b.amplitude.abs() <= a.amplitude.abs() * (1.0 + 1e-12),
                "collapse increased harmonic {}",
                a.n
            );
            // The factorization is exact: amplitude ratio is the kernel.
            if a.amplitude.abs() > 1e-300 {
                assert_relative_eq!(
                    b.amplitude / a.amplitude,
                    b.csl_kernel,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn ballistic_limit_matches_classical_coefficients() {
        // Scaling the mass far above the Talbot regime (at fixed geometric
        // radius) collapses the quantum coefficients onto the ballistic ones.
        let reference = base_config(1e6);
        let mut heavy = base_config(1e6);
        heavy.radius_override_m = Some(reference.radius_m());
        heavy.mass_kg = reference.mass_kg * 300.0;
        // Keep the same flight times as the light configuration.
        heavy.t1_s = reference.t1_s;
        heavy.t2_s = reference.t2_s;
        let simulation = Simulation::new(&heavy).unwrap();
        let quantum = simulation.components(PatternKind::Quantum, None).unwrap();
        let classical = simulation.components(PatternKind::Classical, None).unwrap();
        for n in 0..5usize {
            let q = quantum.rows[n].amplitude;
            let c = classical.rows[n].amplitude;
            assert_relative_eq!(q, c, max_relative = 1e-3, epsilon = 1e-15);
        }
    }

    #[test]
    fn classical_pattern_differs_from_quantum_at_talbot_times() {
        let config = base_config(1e6);
        let simulation = Simulation::new(&config).unwrap();
        let quantum = simulation.pattern_quantum().unwrap();
        let classical = simulation.pattern_classical().unwrap();
        let vq = visibility(&quantum);
        let vc = visibility(&classical);
        assert!(vq > 0.05, "quantum visibility {vq}");
        assert!(
            (vq - vc).abs() > 0.01,
            "quantum ({vq}) and ballistic ({vc}) patterns should differ"
        );
    }

    #[test]
    fn synthetic_patterns_support_grid_visibility() {
        let x: Vec<f64> = (0..101).map(|i| i as f64).collect();
        let p: Vec<f64> = x.iter().map(|x| 2.0 + (x * 0.3).sin()).collect();
        let pattern = PatternResult::synthetic(x, p);
        assert!(pattern.evaluate_series(0.0).is_none());
        let v = visibility(&pattern);
        assert!(v > 0.0 && v < 1.0);
    }
}
