//! Scenario builders shared by the criterion benches.
//!
//! The benches measure the engine's hot paths on the same silicon reference
//! setup the workspace tests use: a sphere released from a 1550 nm trap,
//! modulated by a retro-reflected 355 nm pulse, and detected after two equal
//! free-fall segments of half a Talbot time each.

use std::path::Path;

use talbot_core::constants::{AMU, H};
use talbot_core::{
    load_optical_table, EnvChannels, EnvironmentParams, ExperimentConfig, GasSpecies,
    GratingModel, GratingParams, Material, QuadratureSpec, ScatteringRegime,
    ScatteringTimeConvention, TrapParams,
};

/// Silicon sphere material backed by the optical table shipped in `data/`.
pub fn silicon() -> Material {
    let table = load_optical_table(
        &Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/si_optical.csv"),
    )
    .expect("bundled silicon optical table loads");
    Material {
        name: "si".into(),
        density_kg_m3: 2329.0,
        specific_heat_j_kg_k: 700.0,
        ionization_energy_j: 5e-19,
        optical: table,
    }
}

/// Reference interferometer setup for a silicon sphere of the given mass:
/// room-temperature chamber at 1e-8 Pa, 34 mJ/m^2 grating pulse, and the
/// screen at the first self-image (t1 = t2 = t_T / 2).
pub fn reference_config(mass_amu: f64) -> ExperimentConfig {
    let mass_kg = mass_amu * AMU;
    let d = 355e-9 / 2.0;
    let talbot_time = mass_kg * d * d / H;
    ExperimentConfig {
        material: silicon(),
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
        screen_samples: 2001,
        quadrature: QuadratureSpec::default(),
    }
}
