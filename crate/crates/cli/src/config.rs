//! Configuration files: schema, defaults, validation, and the canonical
//! digest that ties output files to the exact physics they were computed
//! from.
//!
//! Configs are TOML. Every key is SI (the unit is part of the key name);
//! unknown keys are rejected with the offending key path. Optional keys fall
//! back to a documented defaults table (silicon sphere, 1550 nm trap,
//! 355 nm grating, room-temperature nitrogen atmosphere); the free-fall
//! times default to half a Talbot time each.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use talbot_core::{
    CslParams, EnvChannels, EnvironmentParams, ExperimentConfig, GasSpecies, GratingModel,
    GratingParams, Material, QuadratureSpec, ScanGrid, ScatteringRegime,
    ScatteringTimeConvention, TrapParams,
};

use crate::AppError;

/// Atomic mass unit [kg]; mirrors the engine's internal constant.
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Planck constant [J s], used for the default-time rule t1 = t2 = t_T / 2.
const H: f64 = 6.626_070_15e-34;

fn config_error(message: impl Into<String>) -> AppError {
    AppError::Config(message.into())
}

// ---------------------------------------------------------------------------
// Raw schema (what the TOML file may contain)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub particle: ParticleSection,
    #[serde(default)]
    pub trap: TrapSection,
    #[serde(default)]
    pub grating: GratingSection,
    #[serde(default)]
    pub times: TimesSection,
    #[serde(default)]
    pub environment: EnvironmentSection,
    #[serde(default)]
    pub screen: ScreenSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<InitialStateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csl: Option<CslSection>,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub numerics: NumericsSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSection {
    /// Material preset: "si", "sio2", or "custom".
    pub material: String,
    /// Optical response table (CSV), resolved relative to the config file.
    pub optical_table: String,
    /// Mass in atomic mass units; exactly one of mass_amu / mass_kg.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_amu: Option<f64>,
    /// Mass in kilograms; exactly one of mass_amu / mass_kg.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_kg: Option<f64>,
    /// Geometric radius override [m]; defaults to the radius implied by the
    /// mass and bulk density.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_m: Option<f64>,
    /// Bulk density [kg/m^3]; required for "custom", preset otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_kg_m3: Option<f64>,
    /// Specific heat [J/(kg K)]; required for "custom", preset otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specific_heat_j_kg_k: Option<f64>,
    /// Ionization energy [J]; required for "custom", preset otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ionization_energy_j: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapSection {
    pub wavelength_m: f64,
    pub intensity_w_m2: f64,
    pub cooling_time_s: f64,
    pub mech_frequency_hz: f64,
    pub com_temperature_k: f64,
}

impl Default for TrapSection {
    fn default() -> Self {
        Self {
            wavelength_m: 1550e-9,
            intensity_w_m2: 90e9,
            cooling_time_s: 1.0,
            mech_frequency_hz: 200.0,
            com_temperature_k: 0.02,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GratingSection {
    pub wavelength_m: f64,
    /// Pulse fluence of each travelling beam [J/m^2].
    pub pulse_fluence_j_m2: f64,
    /// "full" (phase + photon absorption/scattering) or "pure-phase".
    pub model: String,
}

impl Default for GratingSection {
    fn default() -> Self {
        Self {
            wavelength_m: 355e-9,
            pulse_fluence_j_m2: 0.034,
            model: "full".to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimesSection {
    /// Free fall before the grating pulse [s]; default t_T / 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1_s: Option<f64>,
    /// Free fall after the grating pulse [s]; default t_T / 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2_s: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvironmentSection {
    pub temperature_k: f64,
    pub pressure_pa: f64,
    /// Residual-gas properties (defaults: molecular nitrogen).
    pub gas: GasSection,
    /// Mean gas speed override [m/s]; defaults to sqrt(2 k_B T / m_gas).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_gas_velocity_m_s: Option<f64>,
    /// Enabled decoherence channels, any subset of
    /// ["collisions", "absorption", "scattering", "emission"].
    pub channels: Vec<String>,
    /// Time argument of the grating-photon scattering kernel:
    /// "difference" or "sum".
    pub scattering_time: String,
}

impl Default for EnvironmentSection {
    fn default() -> Self {
        Self {
            temperature_k: 300.0,
            pressure_pa: 1e-8,
            gas: GasSection::default(),
            mean_gas_velocity_m_s: None,
            channels: vec![
                "collisions".to_string(),
                "absorption".to_string(),
                "scattering".to_string(),
                "emission".to_string(),
            ],
            scattering_time: "difference".to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GasSection {
    /// Static polarizability volume alpha / (4 pi eps0) [m^3].
    pub polarizability_volume_m3: f64,
    pub ionization_energy_j: f64,
    pub mass_amu: f64,
}

impl Default for GasSection {
    fn default() -> Self {
        Self {
            polarizability_volume_m3: 1.74e-30,
            ionization_energy_j: 15.6e-19,
            mass_amu: 28.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScreenSection {
    /// Detection window width [m], centered on the optical axis.
    pub window_m: f64,
    /// Number of screen samples; odd, at least 201.
    pub samples: usize,
}

impl Default for ScreenSection {
    fn default() -> Self {
        Self {
            window_m: 1e-7,
            samples: 4001,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialStateSection {
    /// Initial position spread [m]; defaults to the trap ground-state width.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_x_m: Option<f64>,
    /// Initial momentum spread [kg m/s]; defaults to the minimum-uncertainty
    /// partner of sigma_x.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_p_kg_m_s: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CslSection {
    /// Collapse rate per nucleon [1/s].
    pub lambda_per_s: f64,
    /// Localization length [m].
    pub r_c_m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    pub r_c_min_m: f64,
    pub r_c_max_m: f64,
    pub r_c_points: usize,
    pub lambda_min_per_s: f64,
    pub lambda_max_per_s: f64,
    pub lambda_points: usize,
    /// Discrimination threshold on the pattern-overlap statistic.
    pub threshold: f64,
}

impl Default for ScanSection {
    fn default() -> Self {
        let grid = ScanGrid::default();
        Self {
            r_c_min_m: grid.r_c_min_m,
            r_c_max_m: grid.r_c_max_m,
            r_c_points: grid.r_c_points,
            lambda_min_per_s: grid.lambda_min_per_s,
            lambda_max_per_s: grid.lambda_max_per_s,
            lambda_points: grid.lambda_points,
            threshold: grid.aleph_threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsSection {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for NumericsSection {
    fn default() -> Self {
        let quad = QuadratureSpec::default();
        Self {
            relative_tolerance: quad.relative_tolerance,
            absolute_tolerance: quad.absolute_tolerance,
            max_subdivisions: quad.max_subdivisions,
        }
    }
}

// ---------------------------------------------------------------------------
// Loading and resolution
// ---------------------------------------------------------------------------

/// A parsed, validated configuration with every default materialized.
#[derive(Debug)]
pub struct LoadedConfig {
    pub experiment: ExperimentConfig,
    pub scan: ScanGrid,
    /// Discrimination threshold shared by the comparison commands.
    pub aleph_threshold: f64,
    /// SHA-256 over the canonical resolved form (defaults filled in, the
    /// optical table replaced by its content digest).
    pub digest_hex: String,
    /// The resolved raw form (all defaults explicit, optical table as an
    /// absolute path). Serializing it reproduces this configuration from
    /// any directory; every JSON summary embeds it.
    pub resolved: RawConfig,
}

/// Parse and resolve a configuration file.
pub fn parse_config(path: &Path) -> Result<LoadedConfig, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| config_error(format!("cannot read {}: {err}", path.display())))?;
    let raw: RawConfig = toml::from_str(&text)
        .map_err(|err| config_error(format!("{}: {err}", path.display())))?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    resolve(raw, base_dir)
}

fn resolve(raw: RawConfig, base_dir: &Path) -> Result<LoadedConfig, AppError> {
    let mut resolved = raw;

    // Particle: preset lookup, mass normalization, optical table.
    let particle = &mut resolved.particle;
    let (preset_density, preset_heat, preset_ionization) =
        match particle.material.as_str() {
            "si" => (Some(2329.0), Some(700.0), Some(5e-19)),
            "sio2" => (Some(1850.0), Some(700.0), Some(5e-19)),
            "custom" => (None, None, None),
            other => {
                return Err(config_error(format!(
                    "particle.material must be \"si\", \"sio2\" or \"custom\", got \"{other}\""
                )))
            }
        };
    particle.density_kg_m3 = particle.density_kg_m3.or(preset_density);
    particle.specific_heat_j_kg_k = particle.specific_heat_j_kg_k.or(preset_heat);
    particle.ionization_energy_j = particle.ionization_energy_j.or(preset_ionization);
    for (value, key) in [
        (particle.density_kg_m3, "particle.density_kg_m3"),
        (particle.specific_heat_j_kg_k, "particle.specific_heat_j_kg_k"),
        (particle.ionization_energy_j, "particle.ionization_energy_j"),
    ] {
        match value {
            None => {
                return Err(config_error(format!(
                    "{key} is required when particle.material = \"custom\""
                )))
            }
            Some(v) if !(v > 0.0 && v.is_finite()) => {
                return Err(config_error(format!("{key} must be positive, got {v:e}")))
            }
            _ => {}
        }
    }
    let mass_kg = match (particle.mass_amu, particle.mass_kg) {
        (Some(amu), None) => {
            if !(amu > 0.0 && amu.is_finite()) {
                return Err(config_error(format!(
                    "particle.mass_amu must be positive, got {amu:e}"
                )));
            }
            amu * AMU
        }
        (None, Some(kg)) => {
            if !(kg > 0.0 && kg.is_finite()) {
                return Err(config_error(format!(
                    "particle.mass_kg must be positive, got {kg:e}"
                )));
            }
            kg
        }
        (None, None) => {
            return Err(config_error(
                "particle needs a mass: set particle.mass_amu or particle.mass_kg",
            ))
        }
        (Some(_), Some(_)) => {
            return Err(config_error(
                "particle.mass_amu and particle.mass_kg are mutually exclusive; set exactly one",
            ))
        }
    };
    // Canonical mass representation: kilograms.
    particle.mass_amu = None;
    particle.mass_kg = Some(mass_kg);

    let table_path = base_dir.join(&particle.optical_table);
    let optical = talbot_core::load_optical_table(&table_path).map_err(|err| {
        config_error(format!(
            "particle.optical_table ({}): {err}",
            table_path.display()
        ))
    })?;
    let table_digest = file_digest(&table_path)?;
    particle.optical_table = absolute_path_string(&table_path);

    // Grating model.
    let grating_model = match resolved.grating.model.as_str() {
        "full" => GratingModel::Full,
        "pure-phase" => GratingModel::PurePhase,
        other => {
            return Err(config_error(format!(
                "grating.model must be \"full\" or \"pure-phase\", got \"{other}\""
            )))
        }
    };

    // Environment channels and conventions.
    let mut channels = EnvChannels {
        collisions: false,
        absorption: false,
        scattering: false,
        emission: false,
    };
    for name in &resolved.environment.channels {
        match name.as_str() {
            "collisions" => channels.collisions = true,
            "absorption" => channels.absorption = true,
            "scattering" => channels.scattering = true,
            "emission" => channels.emission = true,
            other => {
                return Err(config_error(format!(
                    "environment.channels: unknown channel \"{other}\" (expected \
                     collisions, absorption, scattering or emission)"
                )))
            }
        }
    }
    resolved.environment.channels.sort();
    resolved.environment.channels.dedup();
    let scattering_time = match resolved.environment.scattering_time.as_str() {
        "difference" => ScatteringTimeConvention::TimeDifference,
        "sum" => ScatteringTimeConvention::TimeSum,
        other => {
            return Err(config_error(format!(
                "environment.scattering_time must be \"difference\" or \"sum\", got \"{other}\""
            )))
        }
    };
    if !(resolved.environment.gas.mass_amu > 0.0 && resolved.environment.gas.mass_amu.is_finite())
    {
        return Err(config_error(format!(
            "environment.gas.mass_amu must be positive, got {:e}",
            resolved.environment.gas.mass_amu
        )));
    }

    // Times: default to half a Talbot time per segment.
    let period = resolved.grating.wavelength_m / 2.0;
    if !(period > 0.0 && period.is_finite()) {
        return Err(config_error(format!(
            "grating.wavelength_m must be positive, got {:e}",
            resolved.grating.wavelength_m
        )));
    }
    let talbot_time = mass_kg * period * period / H;
    let t1_s = resolved.times.t1_s.unwrap_or(talbot_time / 2.0);
    let t2_s = resolved.times.t2_s.unwrap_or(talbot_time / 2.0);
    for (value, key) in [(t1_s, "times.t1_s"), (t2_s, "times.t2_s")] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(config_error(format!("{key} must be positive, got {value:e}")));
        }
    }
    resolved.times.t1_s = Some(t1_s);
    resolved.times.t2_s = Some(t2_s);

    // Screen grid shape.
    if resolved.screen.samples < 201 || resolved.screen.samples % 2 == 0 {
        return Err(config_error(format!(
            "screen.samples must be odd and at least 201, got {}",
            resolved.screen.samples
        )));
    }

    // Scan ranges.
    let scan = ScanGrid {
        r_c_min_m: resolved.scan.r_c_min_m,
        r_c_max_m: resolved.scan.r_c_max_m,
        r_c_points: resolved.scan.r_c_points,
        lambda_min_per_s: resolved.scan.lambda_min_per_s,
        lambda_max_per_s: resolved.scan.lambda_max_per_s,
        lambda_points: resolved.scan.lambda_points,
        aleph_threshold: resolved.scan.threshold,
    };
    scan.validate()
        .map_err(|err| config_error(format!("scan: {err}")))?;

    let quadrature = QuadratureSpec {
        relative_tolerance: resolved.numerics.relative_tolerance,
        absolute_tolerance: resolved.numerics.absolute_tolerance,
        max_subdivisions: resolved.numerics.max_subdivisions,
    };
    quadrature
        .validate()
        .map_err(|err| config_error(format!("numerics: {err}")))?;

    let initial = resolved.initial_state.clone().unwrap_or_default();
    let experiment = ExperimentConfig {
        material: Material {
            name: resolved.particle.material.clone(),
            density_kg_m3: resolved.particle.density_kg_m3.unwrap(),
            specific_heat_j_kg_k: resolved.particle.specific_heat_j_kg_k.unwrap(),
            ionization_energy_j: resolved.particle.ionization_energy_j.unwrap(),
            optical,
        },
        mass_kg,
        radius_override_m: resolved.particle.radius_m,
        sigma_x_m: initial.sigma_x_m,
        sigma_p_kg_m_s: initial.sigma_p_kg_m_s,
        trap: TrapParams {
            wavelength_m: resolved.trap.wavelength_m,
            cooling_time_s: resolved.trap.cooling_time_s,
            intensity_w_m2: resolved.trap.intensity_w_m2,
            mech_frequency_hz: resolved.trap.mech_frequency_hz,
            com_temperature_k: resolved.trap.com_temperature_k,
        },
        grating: GratingParams {
            wavelength_m: resolved.grating.wavelength_m,
            pulse_fluence_j_m2: resolved.grating.pulse_fluence_j_m2,
        },
        grating_model,
        scattering_regime: ScatteringRegime::Auto,
        t1_s,
        t2_s,
        env: EnvironmentParams {
            temperature_k: resolved.environment.temperature_k,
            pressure_pa: resolved.environment.pressure_pa,
            gas: GasSpecies {
                polarizability_volume_m3: resolved.environment.gas.polarizability_volume_m3,
                ionization_energy_j: resolved.environment.gas.ionization_energy_j,
                mass_kg: resolved.environment.gas.mass_amu * AMU,
            },
            mean_gas_velocity_m_s: resolved.environment.mean_gas_velocity_m_s,
        },
        env_channels: channels,
        scattering_time_convention: scattering_time,
        csl: resolved.csl.as_ref().map(|section| CslParams {
            lambda_per_s: section.lambda_per_s,
            r_c_m: section.r_c_m,
        }),
        screen_window_m: resolved.screen.window_m,
        screen_samples: resolved.screen.samples,
        quadrature,
    };
    experiment
        .validate()
        .map_err(|err| config_error(err.to_string()))?;
    // Surface spread violations now rather than at first use.
    talbot_core::derived_scales(&experiment).map_err(|err| config_error(err.to_string()))?;

    let digest_hex = canonical_digest(&resolved, &table_digest)?;
    Ok(LoadedConfig {
        experiment,
        scan,
        aleph_threshold: resolved.scan.threshold,
        digest_hex,
        resolved,
    })
}

fn absolute_path_string(path: &Path) -> String {
    let absolute = if path.is_absolute() {
        path.to_path_buf()
    } else {
        std::env::current_dir()
            .map(|cwd| cwd.join(path))
            .unwrap_or_else(|_| path.to_path_buf())
    };
    // Normalized lexically (no symlink resolution): stable across runs.
    let mut parts: Vec<std::ffi::OsString> = Vec::new();
    for component in absolute.components() {
        use std::path::Component;
        match component {
            Component::ParentDir => {
                if parts.len() > 1 {
                    parts.pop();
                }
            }
            Component::CurDir => {}
            other => parts.push(other.as_os_str().to_os_string()),
        }
    }
    let mut out = PathBuf::new();
    for part in parts {
        out.push(part);
    }
    out.display().to_string()
}

fn file_digest(path: &Path) -> Result<String, AppError> {
    let bytes = std::fs::read(path)
        .map_err(|err| config_error(format!("cannot read {}: {err}", path.display())))?;
    Ok(hex_digest(&bytes))
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Digest of the resolved configuration. The optical table enters through
/// its content hash, not its path, so moving the repository does not change
/// the digest; everything else is the canonical resolved TOML.
fn canonical_digest(resolved: &RawConfig, table_digest: &str) -> Result<String, AppError> {
    let mut canonical = resolved.clone();
    canonical.particle.optical_table = format!("sha256:{table_digest}");
    let text = toml::to_string(&canonical)
        .map_err(|err| config_error(format!("cannot canonicalize configuration: {err}")))?;
    Ok(hex_digest(text.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn data_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
    }

    fn write_config(dir: &Path, body: &str) -> PathBuf {
        let path = dir.join("config.toml");
        let mut file = std::fs::File::create(&path).unwrap();
        file.write_all(body.as_bytes()).unwrap();
        path
    }

    fn minimal_body() -> String {
        format!(
            "[particle]\nmaterial = \"si\"\nmass_amu = 1e6\noptical_table = \"{}\"\n",
            data_dir().join("si_optical.csv").display()
        )
    }

    #[test]
    fn minimal_config_fills_documented_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), &minimal_body());
        let loaded = parse_config(&path).unwrap();
        let exp = &loaded.experiment;
        assert_eq!(exp.material.name, "si");
        assert_eq!(exp.material.density_kg_m3, 2329.0);
        assert_eq!(exp.trap.wavelength_m, 1550e-9);
        assert_eq!(exp.trap.intensity_w_m2, 90e9);
        assert_eq!(exp.trap.mech_frequency_hz, 200.0);
        assert_eq!(exp.env.temperature_k, 300.0);
        assert_eq!(exp.env.pressure_pa, 1e-8);
        assert_eq!(exp.grating.wavelength_m, 355e-9);
        assert!(exp.csl.is_none());
        // Half a Talbot time per free-fall segment.
        let d = exp.grating.period_m();
        let t_t = exp.mass_kg * d * d / H;
        assert!((exp.t1_s - t_t / 2.0).abs() < 1e-15);
        assert!((exp.t2_s - t_t / 2.0).abs() < 1e-15);
        assert_eq!(exp.screen_samples, 4001);
        assert_eq!(loaded.digest_hex.len(), 64);
    }

    #[test]
    fn unknown_keys_are_named() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!("{}massss = 1e6\n", minimal_body());
        let path = write_config(dir.path(), &body);
        let err = parse_config(&path).unwrap_err().to_string();
        assert!(err.contains("massss"), "error should name the key: {err}");
    }

    #[test]
    fn negative_time_is_rejected_with_key_path() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!("{}\n[times]\nt2_s = -1.0\n", minimal_body());
        let path = write_config(dir.path(), &body);
        let err = parse_config(&path).unwrap_err().to_string();
        assert!(
            err.contains("times.t2_s") && err.contains("positive"),
            "unexpected message: {err}"
        );
    }

    #[test]
    fn mass_is_exactly_one_of_amu_or_kg() {
        let dir = tempfile::tempdir().unwrap();
        let both = format!("{}mass_kg = 1.66e-21\n", minimal_body());
        let err = parse_config(&write_config(dir.path(), &both))
            .unwrap_err()
            .to_string();
        assert!(err.contains("mutually exclusive"), "{err}");
        let neither = format!(
            "[particle]\nmaterial = \"si\"\noptical_table = \"{}\"\n",
            data_dir().join("si_optical.csv").display()
        );
        let err = parse_config(&write_config(dir.path(), &neither))
            .unwrap_err()
            .to_string();
        assert!(err.contains("mass"), "{err}");
    }

    #[test]
    fn custom_material_requires_bulk_properties() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!(
            "[particle]\nmaterial = \"custom\"\nmass_amu = 1e6\noptical_table = \"{}\"\n",
            data_dir().join("si_optical.csv").display()
        );
        let err = parse_config(&write_config(dir.path(), &body))
            .unwrap_err()
            .to_string();
        assert!(err.contains("particle.density_kg_m3"), "{err}");
    }

    #[test]
    fn optical_table_resolves_relative_to_config_file() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::copy(
            data_dir().join("si_optical.csv"),
            dir.path().join("table.csv"),
        )
        .unwrap();
        let body = "[particle]\nmaterial = \"si\"\nmass_amu = 1e6\noptical_table = \"table.csv\"\n";
        let loaded = parse_config(&write_config(dir.path(), body)).unwrap();
        assert!(loaded.resolved.particle.optical_table.ends_with("table.csv"));
    }

    #[test]
    fn round_trip_preserves_resolution_and_digest() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!(
            "{}\n[times]\nt1_s = 0.36\nt2_s = 0.18\n\n[csl]\nlambda_per_s = 1e-12\nr_c_m = 1e-7\n",
            minimal_body()
        );
        let first = parse_config(&write_config(dir.path(), &body)).unwrap();
        let serialized = toml::to_string_pretty(&first.resolved).unwrap();
        let other_dir = tempfile::tempdir().unwrap();
        let second = parse_config(&write_config(other_dir.path(), &serialized)).unwrap();
        assert_eq!(first.digest_hex, second.digest_hex);
        assert_eq!(first.experiment.t1_s, second.experiment.t1_s);
        assert_eq!(first.experiment.mass_kg, second.experiment.mass_kg);
        assert_eq!(
            first.experiment.csl.map(|c| (c.lambda_per_s, c.r_c_m)),
            second.experiment.csl.map(|c| (c.lambda_per_s, c.r_c_m))
        );
    }

    #[test]
    fn digest_ignores_spelled_out_defaults_but_tracks_values() {
        let dir = tempfile::tempdir().unwrap();
        let implicit = parse_config(&write_config(dir.path(), &minimal_body())).unwrap();
        let explicit_default = format!("{}\n[environment]\ntemperature_k = 300.0\n", minimal_body());
        let explicit = parse_config(&write_config(dir.path(), &explicit_default)).unwrap();
        assert_eq!(implicit.digest_hex, explicit.digest_hex);
        let changed = format!("{}\n[environment]\ntemperature_k = 4.0\n", minimal_body());
        let cold = parse_config(&write_config(dir.path(), &changed)).unwrap();
        assert_ne!(implicit.digest_hex, cold.digest_hex);
    }

    #[test]
    fn channel_names_are_validated() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!(
            "{}\n[environment]\nchannels = [\"collisions\", \"sparkles\"]\n",
            minimal_body()
        );
        let err = parse_config(&write_config(dir.path(), &body))
            .unwrap_err()
            .to_string();
        assert!(err.contains("sparkles"), "{err}");
    }

    #[test]
    fn screen_grid_must_be_odd_and_large_enough() {
        let dir = tempfile::tempdir().unwrap();
        for samples in ["200", "2000"] {
            let body = format!("{}\n[screen]\nsamples = {samples}\n", minimal_body());
            let err = parse_config(&write_config(dir.path(), &body))
                .unwrap_err()
                .to_string();
            assert!(err.contains("screen.samples"), "{err}");
        }
    }
}
