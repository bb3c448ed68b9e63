//! Output files: CSV data with a manifest header, and a JSON run summary.
//!
//! Data files are byte-deterministic: they carry the tool version and the
//! configuration digest but no timestamp, and all numbers use the shortest
//! round-trip decimal form. The JSON summary carries the timestamp and any
//! run warnings.

use chrono::{SecondsFormat, Utc};
use serde_json::{json, Map, Value};
use std::fmt::Write as _;
use std::path::Path;
use talbot_core::{ExclusionGrid, InternalTemperatureTrajectory, PatternResult};

use crate::AppError;

pub const TOOL_NAME: &str = "talbot";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn io_error(path: &Path, err: std::io::Error) -> AppError {
    AppError::Io(format!("cannot write {}: {err}", path.display()))
}

/// Shortest decimal representation that round-trips to the same f64.
fn number(value: f64) -> String {
    format!("{value:?}")
}

fn manifest_header(digest_hex: &str) -> String {
    format!("# tool={TOOL_NAME} {TOOL_VERSION}\n# config_digest={digest_hex}\n")
}

/// Pattern CSV: `x_m,P_quantum,P_classical[,P_csl]`, one row per screen
/// sample. The collapse column is present only when the run evaluated a
/// collapse-model point.
pub fn write_pattern_csv(
    path: &Path,
    digest_hex: &str,
    quantum: &PatternResult,
    classical: &PatternResult,
    csl: Option<&PatternResult>,
) -> Result<(), AppError> {
    let mut text = manifest_header(digest_hex);
    text.push_str("x_m,P_quantum,P_classical");
    if csl.is_some() {
        text.push_str(",P_csl");
    }
    text.push('\n');
    for (i, x) in quantum.x_m.iter().enumerate() {
        let _ = write!(
            text,
            "{},{},{}",
            number(*x),
            number(quantum.probability_per_m[i]),
            number(classical.probability_per_m[i])
        );
        if let Some(pattern) = csl {
            let _ = write!(text, ",{}", number(pattern.probability_per_m[i]));
        }
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|err| io_error(path, err))
}

/// Scan grid CSV: `r_c_m,lambda_per_s,aleph`, row-major over the
/// localization-length axis; failed points print as NaN.
pub fn write_grid_csv(path: &Path, digest_hex: &str, grid: &ExclusionGrid) -> Result<(), AppError> {
    let mut text = manifest_header(digest_hex);
    text.push_str("r_c_m,lambda_per_s,aleph\n");
    for (i, r_c) in grid.r_c_m.iter().enumerate() {
        for (j, lambda) in grid.lambda_per_s.iter().enumerate() {
            let _ = writeln!(
                text,
                "{},{},{}",
                number(*r_c),
                number(*lambda),
                number(grid.aleph[i][j])
            );
        }
    }
    std::fs::write(path, text).map_err(|err| io_error(path, err))
}

/// Exclusion boundary CSV: `r_c_m,lambda_per_s`, one row per localization
/// length whose threshold crossing lies inside the scanned range.
pub fn write_boundary_csv(
    path: &Path,
    digest_hex: &str,
    grid: &ExclusionGrid,
) -> Result<(), AppError> {
    let mut text = manifest_header(digest_hex);
    text.push_str("r_c_m,lambda_per_s\n");
    for (r_c, boundary) in grid.r_c_m.iter().zip(&grid.boundary_lambda_per_s) {
        if let Some(lambda) = boundary {
            let _ = writeln!(text, "{},{}", number(*r_c), number(*lambda));
        }
    }
    std::fs::write(path, text).map_err(|err| io_error(path, err))
}

/// Temperature trajectory CSV: `t_s,T_int_k` on the integrator's grid.
/// Time runs from the start of trapping; the release time is recorded in
/// the header.
pub fn write_temperature_csv(
    path: &Path,
    digest_hex: &str,
    trajectory: &InternalTemperatureTrajectory,
) -> Result<(), AppError> {
    let mut text = manifest_header(digest_hex);
    let _ = writeln!(text, "# release_time_s={}", number(trajectory.release_time_s()));
    text.push_str("t_s,T_int_k\n");
    let step = trajectory.step_s();
    for (i, temperature) in trajectory.samples_k().iter().enumerate() {
        let _ = writeln!(text, "{},{}", number(i as f64 * step), number(*temperature));
    }
    std::fs::write(path, text).map_err(|err| io_error(path, err))
}

/// JSON run summary: manifest fields (including the timestamp), the command
/// name, the fully resolved configuration, scalar results, and accumulated
/// warnings.
pub fn summary_json(
    command: &str,
    digest_hex: &str,
    resolved_config: Value,
    results: Map<String, Value>,
    warnings: &[String],
) -> String {
    let value = json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": command,
        "config_digest": digest_hex,
        "generated_at": Utc::now().to_rfc3339_opts(SecondsFormat::Micros, true),
        "config": resolved_config,
        "results": Value::Object(results),
        "warnings": warnings,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("summary serialization");
    text.push('\n');
    text
}

pub fn write_text(path: &Path, text: &str) -> Result<(), AppError> {
    std::fs::write(path, text).map_err(|err| io_error(path, err))
}
