//! Pattern discrimination and collapse-parameter exclusion scans.
//!
//! Two sampled patterns are compared through the normalized overlap
//! discrepancy
//!
//! aleph = (1/L) Int_{-L/2}^{L/2} |P_a - P_b| / (P_a + P_b) dx,
//!
//! a dimensionless statistic in [0, 1): 0 for identical patterns, rising
//! toward 1 as the patterns separate. A collapse-parameter point whose
//! predicted pattern differs from the no-collapse prediction by at least a
//! chosen threshold is "excluded" by an experiment that observes the
//! no-collapse pattern.

use crate::csl::CslShape;
use crate::error::{Error, Result};
use crate::pattern::{PatternKind, PatternResult, Simulation};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Minimum number of screen samples inside the comparison window.
const MIN_WINDOW_SAMPLES: usize = 2001;

/// Result of one pattern comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlephResult {
    pub value: f64,
    pub threshold: f64,
    pub excluded: bool,
}

/// Normalized overlap discrepancy between two patterns sampled on the same
/// screen grid, integrated over the centered window of width `window_m`.
pub fn aleph(
    a: &PatternResult,
    b: &PatternResult,
    window_m: f64,
    threshold: f64,
) -> Result<AlephResult> {
    if !(window_m > 0.0 && window_m.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "comparison window must be positive and finite, got {window_m:e}"
        )));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "discrimination threshold must lie in (0, 1), got {threshold:e}"
        )));
    }
    if a.x_m.len() != b.x_m.len() {
        return Err(Error::GridMismatch(format!(
            "patterns sampled on {} vs {} points",
            a.x_m.len(),
            b.x_m.len()
        )));
    }
    for (i, (xa, xb)) in a.x_m.iter().zip(&b.x_m).enumerate() {
        if xa.to_bits() != xb.to_bits() {
            return Err(Error::GridMismatch(format!(
                "screen grids differ at index {i}: {xa:e} vs {xb:e}"
            )));
        }
    }
    let half = 0.5 * window_m * (1.0 + 1e-12);
    let first = a.x_m.partition_point(|x| *x < -half);
    let last = a.x_m.partition_point(|x| *x <= half);
    let count = last.saturating_sub(first);
    if count < MIN_WINDOW_SAMPLES {
        return Err(Error::GridMismatch(format!(
            "comparison window holds {count} samples; at least {MIN_WINDOW_SAMPLES} required"
        )));
    }
    let xs = &a.x_m[first..last];
    let pa = &a.probability_per_m[first..last];
    let pb = &b.probability_per_m[first..last];
    let value = overlap_discrepancy(xs, pa, pb);
    if !value.is_finite() {
        return Err(Error::NumericIntegrity(
            "overlap discrepancy is not finite (non-positive or NaN densities?)".into(),
        ));
    }
    Ok(AlephResult {
        value,
        threshold,
        excluded: value >= threshold,
    })
}

/// Trapezoidal (1/L) Int |pa - pb| / (pa + pb) dx over the given samples.
/// Returns NaN when a denominator is non-positive or any input is NaN.
fn overlap_discrepancy(xs: &[f64], pa: &[f64], pb: &[f64]) -> f64 {
    let span = xs[xs.len() - 1] - xs[0];
    if !(span > 0.0) {
        return f64::NAN;
    }
    let integrand = |i: usize| -> f64 {
        let denom = pa[i] + pb[i];
        if denom > 0.0 {
            (pa[i] - pb[i]).abs() / denom
        } else {
            f64::NAN
        }
    };
    let mut acc = 0.0;
    let mut prev = integrand(0);
    for i in 1..xs.len() {
        let next = integrand(i);
        acc += 0.5 * (prev + next) * (xs[i] - xs[i - 1]);
        prev = next;
    }
    acc / span
}

/// Log-spaced scan ranges over the collapse parameter plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub r_c_min_m: f64,
    pub r_c_max_m: f64,
    pub r_c_points: usize,
    pub lambda_min_per_s: f64,
    pub lambda_max_per_s: f64,
    pub lambda_points: usize,
    pub aleph_threshold: f64,
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self {
            r_c_min_m: 1e-9,
            r_c_max_m: 1e-4,
            r_c_points: 60,
            lambda_min_per_s: 1e-20,
            lambda_max_per_s: 1e-6,
            lambda_points: 60,
            aleph_threshold: 0.05,
        }
    }
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        for (lo, hi, name) in [
            (self.r_c_min_m, self.r_c_max_m, "r_c"),
            (self.lambda_min_per_s, self.lambda_max_per_s, "lambda"),
        ] {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "scan {name} range must satisfy 0 < min < max, got [{lo:e}, {hi:e}]"
                )));
            }
        }
        for (points, name) in [(self.r_c_points, "r_c"), (self.lambda_points, "lambda")] {
            if points < 2 {
                return Err(Error::InvalidParameter(format!(
                    "scan needs at least 2 {name} points, got {points}"
                )));
            }
        }
        if !(self.aleph_threshold > 0.0 && self.aleph_threshold < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "scan threshold must lie in (0, 1), got {:e}",
                self.aleph_threshold
            )));
        }
        Ok(())
    }

    fn r_c_values(&self) -> Vec<f64> {
        log_grid(self.r_c_min_m, self.r_c_max_m, self.r_c_points)
    }

    fn lambda_values(&self) -> Vec<f64> {
        log_grid(self.lambda_min_per_s, self.lambda_max_per_s, self.lambda_points)
    }
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let l0 = lo.log10();
    let l1 = hi.log10();
    (0..points)
        .map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / (points - 1) as f64))
        .collect()
}

/// Discrimination statistic over the collapse parameter plane, with the
/// per-localization-length exclusion boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionGrid {
    /// Localization lengths, ascending [m].
    pub r_c_m: Vec<f64>,
    /// Collapse rates, ascending [1/s].
    pub lambda_per_s: Vec<f64>,
    /// aleph[i][j] at (r_c_m[i], lambda_per_s[j]); NaN marks failed points.
    pub aleph: Vec<Vec<f64>>,
    /// Smallest excluded collapse rate per localization length, when the
    /// threshold is crossed inside the scanned range.
    pub boundary_lambda_per_s: Vec<Option<f64>>,
    pub threshold: f64,
    pub warnings: Vec<String>,
    pub failed_points: usize,
}

struct ColumnOutcome {
    aleph: Vec<f64>,
    boundary: Option<f64>,
    warnings: Vec<String>,
    failed: usize,
}

/// Scan the collapse parameter plane against the no-collapse prediction of
/// a prepared simulation. The base pattern is computed once; each
/// localization length prepares one collapse shape whose kernels rescale
/// the harmonic amplitudes per collapse rate.
pub fn exclusion_scan(simulation: &Simulation, grid: &ScanGrid) -> Result<ExclusionGrid> {
    grid.validate()?;
    let base = simulation.components(PatternKind::Quantum, None)?;
    let mut warnings = Vec::new();
    if base.truncated_at_cap {
        warnings.push("base pattern series truncated at the harmonic cap".to_string());
    }
    let xs = simulation.screen_grid();
    if xs.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "scan needs at least {MIN_WINDOW_SAMPLES} screen samples, got {}",
            xs.len()
        )));
    }
    let scales = *simulation.scales();
    let delta = scales.mean_probability_per_m;
    let period = scales.magnified_period_m;
    let geometry = simulation.geometry();
    let t_total = geometry.total_time_s();
    let density = simulation.config().material.density_kg_m3;
    let quad = simulation.config().quadrature;

    let amplitudes: Vec<f64> = base.rows.iter().map(|row| row.amplitude).collect();
    let separations: Vec<f64> = base
        .rows
        .iter()
        .map(|row| geometry.separation_m(row.n))
        .collect();
    let cos_table: Vec<Vec<f64>> = base
        .rows
        .iter()
        .map(|row| {
            xs.iter()
                .map(|x| (2.0 * PI * row.n as f64 * x / period).cos())
                .collect()
        })
        .collect();
    let p_quantum: Vec<f64> = (0..xs.len())
        .map(|i| {
            let mut acc = 0.0;
            for (amp, cos_row) in amplitudes.iter().zip(&cos_table) {
                acc += amp * cos_row[i];
            }
            delta * (1.0 + 2.0 * acc)
        })
        .collect();

    let r_c_values = grid.r_c_values();
    let lambda_values = grid.lambda_values();
    let threshold = grid.aleph_threshold;

    // aleph at one collapse rate, given the per-harmonic kernel exponents
    // c_n = (Gamma/lambda)(g(x_n) - 1) t_total.
    let aleph_at = |lambda: f64, exponents: &[f64]| -> f64 {
        let damped: Vec<f64> = amplitudes
            .iter()
            .zip(exponents)
            .map(|(amp, c)| amp * (lambda * c).exp())
            .collect();
        let p_csl: Vec<f64> = (0..xs.len())
            .map(|i| {
                let mut acc = 0.0;
                for (amp, cos_row) in damped.iter().zip(&cos_table) {
                    acc += amp * cos_row[i];
                }
                delta * (1.0 + 2.0 * acc)
            })
            .collect();
        overlap_discrepancy(&xs, &p_quantum, &p_csl)
    };

    let columns: Vec<ColumnOutcome> = (0..r_c_values.len())
        .into_par_iter()
        .map(|column_index| {
            let r_c = r_c_values[column_index];
            let mut outcome = ColumnOutcome {
                aleph: vec![f64::NAN; lambda_values.len()],
                boundary: None,
                warnings: Vec::new(),
                failed: 0,
            };
            let shape = match CslShape::new(r_c, scales.radius_m, density, quad) {
                Ok(shape) => shape,
                Err(err) => {
                    outcome.failed = lambda_values.len();
                    outcome
                        .warnings
                        .push(format!("r_c = {r_c:e}: collapse shape failed: {err}"));
                    return outcome;
                }
            };
            let mut exponents = Vec::with_capacity(separations.len());
            for s in &separations {
                match shape.g(*s) {
                    Ok(g) => exponents
                        .push(shape.gamma_per_lambda() * (g - 1.0) * t_total),
                    Err(err) => {
                        outcome.failed = lambda_values.len();
                        outcome
                            .warnings
                            .push(format!("r_c = {r_c:e}: kernel average failed: {err}"));
                        return outcome;
                    }
                }
            }
            for (i, lambda) in lambda_values.iter().enumerate() {
                let value = aleph_at(*lambda, &exponents);
                if value.is_nan() {
                    outcome.failed += 1;
                } else if i > 0 && !outcome.aleph[i - 1].is_nan() {
                    // The statistic grows with the collapse rate; flag
                    // numerical violations.
                    if value < outcome.aleph[i - 1] - 1e-12 {
                        outcome.warnings.push(format!(
                            "aleph not monotone at r_c = {r_c:e}: {value:e} after {:e} (lambda = {lambda:e})",
                            outcome.aleph[i - 1]
                        ));
                    }
                }
                outcome.aleph[i] = value;
            }
            // Exclusion boundary: smallest collapse rate at the threshold.
            if let Some(first_value) = outcome.aleph.first() {
                if first_value.is_finite() && *first_value >= threshold {
                    outcome.boundary = Some(lambda_values[0]);
                } else {
                    for i in 1..lambda_values.len() {
                        let below = outcome.aleph[i - 1];
                        let above = outcome.aleph[i];
                        if !(below.is_finite() && above.is_finite()) {
                            continue;
                        }
                        if below < threshold && above >= threshold {
                            let mut lo = lambda_values[i - 1].log10();
                            let mut hi = lambda_values[i].log10();
                            for _ in 0..20 {
                                let mid = 0.5 * (lo + hi);
                                let value = aleph_at(10f64.powf(mid), &exponents);
                                if value.is_nan() {
                                    break;
                                }
                                if value >= threshold {
                                    hi = mid;
                                } else {
                                    lo = mid;
                                }
                            }
                            outcome.boundary = Some(10f64.powf(hi));
                            break;
                        }
                    }
                }
            }
            outcome
        })
        .collect();

    let total_points = r_c_values.len() * lambda_values.len();
    let mut aleph_matrix = Vec::with_capacity(columns.len());
    let mut boundary = Vec::with_capacity(columns.len());
    let mut failed_points = 0usize;
    for outcome in columns {
        failed_points += outcome.failed;
        warnings.extend(outcome.warnings);
        aleph_matrix.push(outcome.aleph);
        boundary.push(outcome.boundary);
    }
    if failed_points * 100 > total_points {
        return Err(Error::ScanAborted(format!(
            "{failed_points} of {total_points} scan points failed (more than 1%)"
        )));
    }
    Ok(ExclusionGrid {
        r_c_m: r_c_values,
        lambda_per_s: lambda_values,
        aleph: aleph_matrix,
        boundary_lambda_per_s: boundary,
        threshold,
        warnings,
        failed_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::AMU;
    use crate::csl::CslParams;
    use crate::environment::{EnvChannels, EnvironmentParams, ScatteringTimeConvention, TrapParams};
    use crate::grating::{GratingModel, GratingParams};
    use crate::materials::{load_optical_table, GasSpecies, Material};
    use crate::numerics::QuadratureSpec;
    use crate::optics::ScatteringRegime;
    use crate::pattern::ExperimentConfig;
    use approx::assert_relative_eq;
    use std::path::Path;

    fn window_grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 / (n - 1) as f64 - 0.5).collect()
    }

    fn synthetic(values: impl Fn(f64) -> f64) -> PatternResult {
        let x = window_grid(2501);
        let p = x.iter().map(|&x| values(x)).collect();
        PatternResult::synthetic(x, p)
    }

    #[test]
    fn identical_patterns_have_zero_discrepancy() {
        let a = synthetic(|x| 2.0 + (x * 20.0).cos());
        let b = synthetic(|x| 2.0 + (x * 20.0).cos());
        let result = aleph(&a, &b, 1.0, 0.05).unwrap();
        assert_eq!(result.value, 0.0);
        assert!(!result.excluded);
    }

    #[test]
    fn uniform_rescaling_gives_closed_form() {
        let a = synthetic(|x| 2.0 + (x * 20.0).cos());
        let c = 3.0;
        let b = synthetic(|x| c * (2.0 + (x * 20.0).cos()));
        let expected = (1.0 - c as f64).abs() / (1.0 + c);
        let forward = aleph(&a, &b, 1.0, 0.05).unwrap();
        assert_relative_eq!(forward.value, expected, max_relative = 1e-12);
        assert!(forward.excluded);
        // Symmetric in the argument order.
        let backward = aleph(&b, &a, 1.0, 0.05).unwrap();
        assert_eq!(forward.value, backward.value);
        // Invariant under joint rescaling.
        let a7 = synthetic(|x| 7.0 * (2.0 + (x * 20.0).cos()));
        let b7 = synthetic(|x| 7.0 * c * (2.0 + (x * 20.0).cos()));
        let scaled = aleph(&a7, &b7, 1.0, 0.05).unwrap();
        assert_relative_eq!(scaled.value, forward.value, max_relative = 1e-12);
    }

    #[test]
    fn window_restricts_the_comparison() {
        // Patterns identical in the center, different in the wings.
        let a = synthetic(|_| 1.0);
        let b = synthetic(|x| if x.abs() > 0.3 { 2.0 } else { 1.0 });
        let wide = aleph(&a, &b, 1.0, 0.05).unwrap();
        assert!(wide.value > 0.1);
        // Narrow window sees identical patterns but must still hold enough
        // samples; 2501 points over [-0.5, 0.5] leave ~1250 in |x|<=0.25.
        let narrow = aleph(&a, &b, 0.5, 0.05);
        assert!(narrow.is_err(), "too few samples must be rejected");
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = synthetic(|_| 1.0);
        let mut b = synthetic(|_| 1.0);
        b.x_m[7] += 1e-12;
        match aleph(&a, &b, 1.0, 0.05) {
            Err(crate::error::Error::GridMismatch(_)) => {}
            other => panic!("expected grid mismatch, got {other:?}"),
        }
        let shorter = PatternResult::synthetic(window_grid(2001), vec![1.0; 2001]);
        assert!(aleph(&a, &shorter, 1.0, 0.05).is_err());
    }

    #[test]
    fn invalid_thresholds_and_windows_are_rejected() {
        let a = synthetic(|_| 1.0);
        assert!(aleph(&a, &a, 0.0, 0.05).is_err());
        assert!(aleph(&a, &a, 1.0, 0.0).is_err());
        assert!(aleph(&a, &a, 1.0, 1.0).is_err());
        let grid_bad = ScanGrid {
            r_c_points: 1,
            ..ScanGrid::default()
        };
        assert!(grid_bad.validate().is_err());
    }

    fn scan_config() -> ExperimentConfig {
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
        let table = load_optical_table(&root.join("data/si_optical.csv")).unwrap();
        ExperimentConfig {
            material: Material {
                name: "si".into(),
                density_kg_m3: 2329.0,
                specific_heat_j_kg_k: 700.0,
                ionization_energy_j: 5e-19,
                optical: table,
            },
            mass_kg: 1e6 * AMU,
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
            t1_s: 0.039_478_422_188_95,
            t2_s: 0.039_478_422_188_95,
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

    #[test]
    fn small_scan_is_consistent_and_deterministic() {
        let config = scan_config();
        let simulation = Simulation::new(&config).unwrap();
        let grid = ScanGrid {
            r_c_min_m: 1e-8,
            r_c_max_m: 1e-6,
            r_c_points: 3,
            lambda_min_per_s: 1e-12,
            lambda_max_per_s: 1e-7,
            lambda_points: 4,
            aleph_threshold: 0.05,
        };
        let scan = exclusion_scan(&simulation, &grid).unwrap();
        assert_eq!(scan.r_c_m.len(), 3);
        assert_eq!(scan.lambda_per_s.len(), 4);
        assert_eq!(scan.aleph.len(), 3);
        assert_eq!(scan.failed_points, 0);
        for column in &scan.aleph {
            assert_eq!(column.len(), 4);
            for value in column {
                assert!(value.is_finite() && (0.0..1.0).contains(value));
            }
            // Stronger collapse rates never reduce the discrepancy.
            for i in 1..column.len() {
                assert!(column[i] >= column[i - 1] - 1e-12);
            }
        }
        // Scan values agree with the direct per-point pattern comparison.
        let params = CslParams {
            lambda_per_s: scan.lambda_per_s[3],
            r_c_m: scan.r_c_m[1],
        };
        let direct = aleph(
            &simulation.pattern_quantum().unwrap(),
            &simulation.pattern_quantum_csl(&params).unwrap(),
            config.screen_window_m,
            grid.aleph_threshold,
        )
        .unwrap();
        assert_relative_eq!(scan.aleph[1][3], direct.value, max_relative = 1e-10);
        // Boundaries, where present, live inside the scanned range and sit
        // at the threshold.
        for (column, boundary) in scan.aleph.iter().zip(&scan.boundary_lambda_per_s) {
            if let Some(lambda_star) = boundary {
                assert!(
                    (grid.lambda_min_per_s..=grid.lambda_max_per_s).contains(lambda_star)
                );
                assert!(column.last().unwrap() >= &grid.aleph_threshold);
            }
        }
        // Byte-for-byte determinism across runs.
        let again = exclusion_scan(&simulation, &grid).unwrap();
        assert_eq!(scan.aleph, again.aleph);
        assert_eq!(scan.boundary_lambda_per_s, again.boundary_lambda_per_s);
    }
}
