//! `talbot` — near-field interference simulator for levitated dielectric
//! nanospheres.
//!
//! Subcommands compute fringe patterns, compare collapse-model predictions
//! against the no-collapse pattern, scan the collapse parameter plane,
//! integrate the internal-temperature history, and report coherence-timing
//! quantities. Data goes to CSV files with a manifest header; scalar
//! results go to a JSON summary.
//!
//! Exit codes: 0 success, 1 configuration or invocation error, 2 numeric
//! integrity failure, 3 scan with failed grid points.

mod config;
mod output;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use talbot_core::{
    aleph, csl_rate, drop_length, exclusion_scan, t1_for_slits, visibility, CslParams,
    Error as EngineError, ScanGrid, Simulation,
};

use config::{parse_config, LoadedConfig};

/// Anything that can stop a run, mapped to a process exit code.
#[derive(Debug)]
pub enum AppError {
    /// Bad configuration file or command-line input.
    Config(String),
    /// Output file could not be written (or input read).
    Io(String),
    /// The engine rejected the computation.
    Engine(EngineError),
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Config(msg) => write!(f, "configuration: {msg}"),
            AppError::Io(msg) => write!(f, "{msg}"),
            AppError::Engine(err) => write!(f, "{err}"),
        }
    }
}

impl From<EngineError> for AppError {
    fn from(err: EngineError) -> Self {
        AppError::Engine(err)
    }
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) | AppError::Io(_) => 1,
            AppError::Engine(err) => match err {
                EngineError::InvalidParameter(_)
                | EngineError::OpticalTable(_)
                | EngineError::OpticalRange { .. } => 1,
                EngineError::ScanAborted(_) => 3,
                _ => 2,
            },
        }
    }
}

#[derive(Parser)]
#[command(
    name = "talbot",
    version,
    about = "Near-field interference patterns and collapse-model exclusion maps \
             for levitated nanospheres"
)]
struct Cli {
    /// Worker threads for parameter scans (default: all cores).
    /// Changes wall time only, never output bytes.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the quantum, ballistic, and (if configured) collapse-model
    /// fringe patterns on the detection screen.
    Pattern {
        #[command(flatten)]
        config: ConfigArg,
        /// Pattern CSV (x_m,P_quantum,P_classical[,P_csl]).
        #[arg(long)]
        out: PathBuf,
        /// JSON summary path (default: the CSV path with extension "json").
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Compare the collapse-model pattern against the no-collapse
    /// prediction; prints a JSON summary to standard output.
    Aleph {
        #[command(flatten)]
        config: ConfigArg,
        /// Collapse point "LAMBDA_PER_S,R_C_M" (overrides the config's [csl]).
        #[arg(long)]
        csl: Option<String>,
        /// Also write the JSON summary to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan the collapse parameter plane and extract the exclusion boundary.
    Scan {
        #[command(flatten)]
        config: ConfigArg,
        /// Grid size "RCxLAMBDA" (e.g. 60x60; overrides the config's [scan] counts).
        #[arg(long)]
        grid: Option<String>,
        /// Grid CSV (r_c_m,lambda_per_s,aleph).
        #[arg(long)]
        out: PathBuf,
        /// Boundary CSV (default: grid path with "_boundary" appended).
        #[arg(long)]
        boundary: Option<PathBuf>,
        /// JSON summary path (default: the grid CSV path with extension "json").
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Integrate the internal temperature through trapping and free fall.
    Temperature {
        #[command(flatten)]
        config: ConfigArg,
        /// Trajectory CSV (t_s,T_int_k).
        #[arg(long)]
        out: PathBuf,
        /// JSON summary path (default: the CSV path with extension "json").
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Report coherence-spread timing (time to span a number of grating
    /// periods, free-fall drop); prints a JSON summary to standard output.
    Coherence {
        #[command(flatten)]
        config: ConfigArg,
        /// Number of grating periods the wave function must span.
        #[arg(long, default_value_t = 4)]
        slits: u32,
        /// Also write the JSON summary to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} worker threads: {err}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command) -> Result<u8, AppError> {
    match command {
        Command::Pattern {
            config,
            out,
            summary,
        } => cmd_pattern(&config.config, &out, summary.as_deref()),
        Command::Aleph { config, csl, out } => {
            cmd_aleph(&config.config, csl.as_deref(), out.as_deref())
        }
        Command::Scan {
            config,
            grid,
            out,
            boundary,
            summary,
        } => cmd_scan(
            &config.config,
            grid.as_deref(),
            &out,
            boundary.as_deref(),
            summary.as_deref(),
        ),
        Command::Temperature {
            config,
            out,
            summary,
        } => cmd_temperature(&config.config, &out, summary.as_deref()),
        Command::Coherence {
            config,
            slits,
            out,
        } => cmd_coherence(&config.config, slits, out.as_deref()),
    }
}

fn default_sibling(path: &Path, extension: &str) -> PathBuf {
    path.with_extension(extension)
}

/// The resolved configuration as a JSON value for embedding in summaries.
fn resolved_value(loaded: &LoadedConfig) -> Value {
    serde_json::to_value(&loaded.resolved).unwrap_or(Value::Null)
}

/// Scalars every summary reports: geometry, initial state, and rates.
fn base_results(loaded: &LoadedConfig, simulation: &Simulation) -> Map<String, Value> {
    let scales = simulation.scales();
    let config = &loaded.experiment;
    let mut results = Map::new();
    results.insert("mass_kg".into(), json!(config.mass_kg));
    results.insert("radius_m".into(), json!(scales.radius_m));
    results.insert("sigma_x_m".into(), json!(scales.sigma_x_m));
    results.insert("sigma_p_kg_m_s".into(), json!(scales.sigma_p_kg_m_s));
    results.insert("talbot_time_s".into(), json!(scales.talbot_time_s));
    results.insert("t1_s".into(), json!(config.t1_s));
    results.insert("t2_s".into(), json!(config.t2_s));
    results.insert(
        "magnified_period_m".into(),
        json!(scales.magnified_period_m),
    );
    results.insert(
        "mean_probability_per_m".into(),
        json!(scales.mean_probability_per_m),
    );
    results.insert(
        "drop_length_m".into(),
        json!(drop_length(config.t1_s, config.t2_s)),
    );
    results.insert("eikonal_phase".into(), json!(simulation.eikonal_phase()));
    results.insert(
        "collision_rate_per_s".into(),
        json!(simulation.decoherence().collision_rate_per_s()),
    );
    results.insert(
        "internal_temperature_release_k".into(),
        json!(simulation.trajectory().release_temperature_k()),
    );
    results.insert(
        "internal_temperature_final_k".into(),
        json!(simulation.trajectory().final_temperature_k()),
    );
    if let Some(csl) = &config.csl {
        results.insert("csl_lambda_per_s".into(), json!(csl.lambda_per_s));
        results.insert("csl_r_c_m".into(), json!(csl.r_c_m));
    }
    results
}

fn csl_rate_entry(
    loaded: &LoadedConfig,
    simulation: &Simulation,
    params: &CslParams,
) -> Result<(String, Value), AppError> {
    let rate = csl_rate(
        params,
        simulation.scales().radius_m,
        loaded.experiment.material.density_kg_m3,
        loaded.experiment.quadrature,
    )?;
    Ok(("csl_rate_per_s".into(), json!(rate)))
}

fn cmd_pattern(
    config_path: &Path,
    out: &Path,
    summary: Option<&Path>,
) -> Result<u8, AppError> {
    let loaded = parse_config(config_path)?;
    let simulation = Simulation::new(&loaded.experiment)?;
    let quantum = simulation.pattern_quantum()?;
    let classical = simulation.pattern_classical()?;
    let csl_pattern = match &loaded.experiment.csl {
        Some(params) => Some(simulation.pattern_quantum_csl(params)?),
        None => None,
    };
    output::write_pattern_csv(
        out,
        &loaded.digest_hex,
        &quantum,
        &classical,
        csl_pattern.as_ref(),
    )?;

    let mut warnings = quantum.warnings.clone();
    warnings.extend(classical.warnings.iter().cloned());
    let mut results = base_results(&loaded, &simulation);
    results.insert("visibility_quantum".into(), json!(visibility(&quantum)));
    results.insert(
        "visibility_classical".into(),
        json!(visibility(&classical)),
    );
    if let (Some(pattern), Some(params)) = (&csl_pattern, &loaded.experiment.csl) {
        warnings.extend(pattern.warnings.iter().cloned());
        results.insert("visibility_csl".into(), json!(visibility(pattern)));
        let comparison = aleph(
            &quantum,
            pattern,
            loaded.experiment.screen_window_m,
            loaded.aleph_threshold,
        )?;
        results.insert("aleph".into(), json!(comparison.value));
        results.insert("aleph_excluded".into(), json!(comparison.excluded));
        let (key, value) = csl_rate_entry(&loaded, &simulation, params)?;
        results.insert(key, value);
    }
    warnings.sort();
    warnings.dedup();
    let summary_path = summary
        .map(Path::to_path_buf)
        .unwrap_or_else(|| default_sibling(out, "json"));
    let text = output::summary_json(
        "pattern",
        &loaded.digest_hex,
        resolved_value(&loaded),
        results,
        &warnings,
    );
    output::write_text(&summary_path, &text)?;
    eprintln!(
        "pattern: {} samples -> {} (summary {})",
        quantum.x_m.len(),
        out.display(),
        summary_path.display()
    );
    Ok(0)
}

fn parse_csl_flag(flag: &str) -> Result<CslParams, AppError> {
    let parts: Vec<&str> = flag.split(',').collect();
    let parse = |text: &str, what: &str| -> Result<f64, AppError> {
        text.trim().parse::<f64>().map_err(|_| {
            AppError::Config(format!("--csl: cannot parse {what} from \"{text}\""))
        })
    };
    if parts.len() != 2 {
        return Err(AppError::Config(format!(
            "--csl expects \"LAMBDA_PER_S,R_C_M\", got \"{flag}\""
        )));
    }
    Ok(CslParams {
        lambda_per_s: parse(parts[0], "the collapse rate")?,
        r_c_m: parse(parts[1], "the localization length")?,
    })
}

fn cmd_aleph(
    config_path: &Path,
    csl_flag: Option<&str>,
    out: Option<&Path>,
) -> Result<u8, AppError> {
    let loaded = parse_config(config_path)?;
    let params = match csl_flag {
        Some(flag) => parse_csl_flag(flag)?,
        None => loaded.experiment.csl.ok_or_else(|| {
            AppError::Config(
                "no collapse point: add a [csl] section to the config or pass --csl".into(),
            )
        })?,
    };
    let simulation = Simulation::new(&loaded.experiment)?;
    let quantum = simulation.pattern_quantum()?;
    let with_csl = simulation.pattern_quantum_csl(&params)?;
    let comparison = aleph(
        &quantum,
        &with_csl,
        loaded.experiment.screen_window_m,
        loaded.aleph_threshold,
    )?;

    let mut warnings = quantum.warnings.clone();
    warnings.extend(with_csl.warnings.iter().cloned());
    warnings.sort();
    warnings.dedup();
    let mut results = base_results(&loaded, &simulation);
    results.insert("csl_lambda_per_s".into(), json!(params.lambda_per_s));
    results.insert("csl_r_c_m".into(), json!(params.r_c_m));
    results.insert("aleph".into(), json!(comparison.value));
    results.insert("threshold".into(), json!(comparison.threshold));
    results.insert("excluded".into(), json!(comparison.excluded));
    results.insert("visibility_quantum".into(), json!(visibility(&quantum)));
    results.insert("visibility_csl".into(), json!(visibility(&with_csl)));
    let (key, value) = csl_rate_entry(&loaded, &simulation, &params)?;
    results.insert(key, value);
    let text = output::summary_json(
        "aleph",
        &loaded.digest_hex,
        resolved_value(&loaded),
        results,
        &warnings,
    );
    print!("{text}");
    if let Some(path) = out {
        output::write_text(path, &text)?;
    }
    Ok(0)
}

fn parse_grid_flag(flag: &str) -> Result<(usize, usize), AppError> {
    let parts: Vec<&str> = flag.split('x').collect();
    let parse = |text: &str| -> Result<usize, AppError> {
        text.trim().parse::<usize>().map_err(|_| {
            AppError::Config(format!("--grid expects \"RCxLAMBDA\" (e.g. 60x60), got \"{flag}\""))
        })
    };
    if parts.len() != 2 {
        return Err(AppError::Config(format!(
            "--grid expects \"RCxLAMBDA\" (e.g. 60x60), got \"{flag}\""
        )));
    }
    Ok((parse(parts[0])?, parse(parts[1])?))
}

fn cmd_scan(
    config_path: &Path,
    grid_flag: Option<&str>,
    out: &Path,
    boundary: Option<&Path>,
    summary: Option<&Path>,
) -> Result<u8, AppError> {
    let loaded = parse_config(config_path)?;
    let mut grid = loaded.scan;
    if let Some(flag) = grid_flag {
        let (r_c_points, lambda_points) = parse_grid_flag(flag)?;
        grid = ScanGrid {
            r_c_points,
            lambda_points,
            ..grid
        };
        grid.validate().map_err(AppError::Engine)?;
    }
    let simulation = Simulation::new(&loaded.experiment)?;
    let scan = exclusion_scan(&simulation, &grid)?;

    output::write_grid_csv(out, &loaded.digest_hex, &scan)?;
    let boundary_path = boundary.map(Path::to_path_buf).unwrap_or_else(|| {
        let stem = out
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "scan".to_string());
        let extension = out
            .extension()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "csv".to_string());
        out.with_file_name(format!("{stem}_boundary.{extension}"))
    });
    output::write_boundary_csv(&boundary_path, &loaded.digest_hex, &scan)?;

    let excluded_columns = scan
        .boundary_lambda_per_s
        .iter()
        .filter(|b| b.is_some())
        .count();
    let mut results = base_results(&loaded, &simulation);
    results.insert("r_c_points".into(), json!(scan.r_c_m.len()));
    results.insert("lambda_points".into(), json!(scan.lambda_per_s.len()));
    results.insert("threshold".into(), json!(scan.threshold));
    results.insert("failed_points".into(), json!(scan.failed_points));
    results.insert("columns_with_boundary".into(), json!(excluded_columns));
    let summary_path = summary
        .map(Path::to_path_buf)
        .unwrap_or_else(|| default_sibling(out, "json"));
    let text = output::summary_json(
        "scan",
        &loaded.digest_hex,
        resolved_value(&loaded),
        results,
        &scan.warnings,
    );
    output::write_text(&summary_path, &text)?;
    eprintln!(
        "scan: {}x{} points, {} failed, boundary in {} columns -> {} / {}",
        scan.r_c_m.len(),
        scan.lambda_per_s.len(),
        scan.failed_points,
        excluded_columns,
        out.display(),
        boundary_path.display()
    );
    Ok(if scan.failed_points > 0 { 3 } else { 0 })
}

fn cmd_temperature(
    config_path: &Path,
    out: &Path,
    summary: Option<&Path>,
) -> Result<u8, AppError> {
    let loaded = parse_config(config_path)?;
    let simulation = Simulation::new(&loaded.experiment)?;
    let trajectory = simulation.trajectory();
    output::write_temperature_csv(out, &loaded.digest_hex, trajectory)?;
    let mut results = base_results(&loaded, &simulation);
    results.insert(
        "trapping_time_s".into(),
        json!(loaded.experiment.trap.cooling_time_s),
    );
    results.insert("step_s".into(), json!(trajectory.step_s()));
    results.insert("samples".into(), json!(trajectory.samples_k().len()));
    let summary_path = summary
        .map(Path::to_path_buf)
        .unwrap_or_else(|| default_sibling(out, "json"));
    let text = output::summary_json(
        "temperature",
        &loaded.digest_hex,
        resolved_value(&loaded),
        results,
        &[],
    );
    output::write_text(&summary_path, &text)?;
    eprintln!(
        "temperature: release {:.2} K, end {:.2} K -> {}",
        trajectory.release_temperature_k(),
        trajectory.final_temperature_k(),
        out.display()
    );
    Ok(0)
}

fn cmd_coherence(config_path: &Path, slits: u32, out: Option<&Path>) -> Result<u8, AppError> {
    let loaded = parse_config(config_path)?;
    let simulation = Simulation::new(&loaded.experiment)?;
    let scales = simulation.scales();
    let config = &loaded.experiment;
    let period = config.grating.period_m();
    let mut results = base_results(&loaded, &simulation);
    results.insert("grating_period_m".into(), json!(period));
    results.insert("slits".into(), json!(slits));
    results.insert(
        "coherence_spread_t1_m".into(),
        json!(talbot_core::coherence_spread(
            scales.sigma_x_m,
            config.mass_kg,
            config.t1_s
        )),
    );
    results.insert(
        "t1_for_slits_s".into(),
        json!(t1_for_slits(
            slits,
            config.mass_kg,
            scales.sigma_x_m,
            period
        )),
    );
    let text = output::summary_json(
        "coherence",
        &loaded.digest_hex,
        resolved_value(&loaded),
        results,
        &[],
    );
    print!("{text}");
    if let Some(path) = out {
        output::write_text(path, &text)?;
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csl_flag_parses_rate_then_length() {
        let params = parse_csl_flag("1e-12, 1e-7").unwrap();
        assert_eq!(params.lambda_per_s, 1e-12);
        assert_eq!(params.r_c_m, 1e-7);
        assert!(parse_csl_flag("1e-12").is_err());
        assert!(parse_csl_flag("a,b").is_err());
    }

    #[test]
    fn grid_flag_parses_counts() {
        assert_eq!(parse_grid_flag("60x60").unwrap(), (60, 60));
        assert_eq!(parse_grid_flag("12x7").unwrap(), (12, 7));
        assert!(parse_grid_flag("60").is_err());
        assert!(parse_grid_flag("axb").is_err());
    }

    #[test]
    fn error_classification_matches_exit_codes() {
        assert_eq!(AppError::Config("x".into()).exit_code(), 1);
        assert_eq!(AppError::Io("x".into()).exit_code(), 1);
        assert_eq!(
            AppError::Engine(EngineError::InvalidParameter("x".into())).exit_code(),
            1
        );
        assert_eq!(
            AppError::Engine(EngineError::NumericIntegrity("x".into())).exit_code(),
            2
        );
        assert_eq!(
            AppError::Engine(EngineError::GridMismatch("x".into())).exit_code(),
            2
        );
        assert_eq!(
            AppError::Engine(EngineError::ScanAborted("x".into())).exit_code(),
            3
        );
    }
}
