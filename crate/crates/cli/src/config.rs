//! Run configuration: JSON config file, CLI flag overrides and validation.
//!
//! Precedence is flags over config file over defaults, except for the output
//! directory where the `LANEOPT_OUT` environment variable overrides both.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use laneopt_core::{
    calibrate::DEFAULT_DEMAND,
    ring::{DEFAULT_RING_SIZE, DEFAULT_TRIALS},
    FreewayConfig, HeadwayProfile, PenetrationRate, Scenario,
};

use crate::error::{io_error, CliError, CliResult};

/// Environment variable overriding the output directory.
pub const OUT_ENV_VAR: &str = "LANEOPT_OUT";

const DEFAULT_GRID_STEP: f64 = 0.01;
const DEFAULT_LANES: u32 = 2;
const DEFAULT_SEED: u64 = 42;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON config file; flags override its fields
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Scenario preset: neutral, conservative or aggressive
    #[arg(long)]
    pub scenario: Option<String>,
    /// Total number of freeway lanes
    #[arg(long = "L")]
    pub lanes: Option<u32>,
    /// Per-lane demand, veh/hr/lane
    #[arg(long = "D")]
    pub demand: Option<f64>,
    /// Single CAV penetration rate in [0, 1]
    #[arg(long)]
    pub p: Option<f64>,
    /// Penetration grid step in (0, 1]
    #[arg(long = "grid-step")]
    pub grid_step: Option<f64>,
    /// Base seed for the Monte Carlo verifier
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for CSV and SVG artifacts
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// JSON schema of the config file. Unknown keys are rejected so scenario
/// typos surface as parse errors instead of silently using defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    scenario: Option<String>,
    profile: Option<ProfileSpec>,
    #[serde(rename = "L")]
    lanes: Option<u32>,
    #[serde(rename = "D")]
    demand: Option<f64>,
    #[serde(rename = "C_A")]
    dedicated_capacity: Option<f64>,
    grid_step: Option<f64>,
    p: Option<f64>,
    simulate: Option<SimulateSpec>,
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileSpec {
    h_aa: f64,
    h_am: f64,
    h_ma: f64,
    h_mm: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateSpec {
    n: Option<usize>,
    trials: Option<usize>,
    seed: Option<u64>,
}

/// Fully resolved settings a command runs against.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub profile: HeadwayProfile,
    /// Preset name, or "custom" for an inline profile.
    pub scenario_label: String,
    pub lanes: u32,
    pub demand: f64,
    pub dedicated_capacity: Option<f64>,
    pub grid_step: f64,
    pub p: Option<PenetrationRate>,
    pub simulate: SimulateSettings,
    /// None when no output location was given anywhere.
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy)]
pub struct SimulateSettings {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

impl RunSettings {
    /// Builds the freeway configuration, applying the capacity override.
    pub fn freeway(&self) -> CliResult<FreewayConfig> {
        let config = match self.dedicated_capacity {
            Some(capacity) => FreewayConfig::with_dedicated_capacity(
                self.lanes,
                self.demand,
                self.profile,
                capacity,
            ),
            None => FreewayConfig::new(self.lanes, self.demand, self.profile),
        }?;
        Ok(config)
    }

    pub fn grid(&self) -> CliResult<Vec<PenetrationRate>> {
        Ok(laneopt_core::grid_with_step(self.grid_step)?)
    }

    pub fn penetration_or_input_error(&self) -> CliResult<PenetrationRate> {
        self.p
            .ok_or_else(|| CliError::Input("a penetration rate is required (--p or config)".into()))
    }
}

fn load_file(path: &Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("malformed config {}: {e}", path.display())))
}

/// Merges flags, config file and defaults into run settings.
pub fn resolve(args: &CommonArgs) -> CliResult<RunSettings> {
    let file = match &args.config {
        Some(path) => load_file(path)?,
        None => FileConfig::default(),
    };

    let (profile, scenario_label) = resolve_profile(args, &file)?;

    let simulate_spec = file.simulate;
    let simulate = SimulateSettings {
        n: simulate_spec.and_then(|s| s.n).unwrap_or(DEFAULT_RING_SIZE),
        trials: simulate_spec.and_then(|s| s.trials).unwrap_or(DEFAULT_TRIALS),
        seed: args
            .seed
            .or(simulate_spec.and_then(|s| s.seed))
            .unwrap_or(DEFAULT_SEED),
    };

    let p = match args.p.or(file.p) {
        Some(value) => Some(PenetrationRate::new(value)?),
        None => None,
    };

    let output_dir = std::env::var_os(OUT_ENV_VAR)
        .map(PathBuf::from)
        .or_else(|| args.out.clone())
        .or(file.output_dir);

    let grid_step = args.grid_step.or(file.grid_step).unwrap_or(DEFAULT_GRID_STEP);
    if !grid_step.is_finite() || grid_step <= 0.0 || grid_step > 1.0 {
        return Err(CliError::Input(format!(
            "grid step must lie in (0, 1], got {grid_step}"
        )));
    }

    Ok(RunSettings {
        profile,
        scenario_label,
        lanes: args.lanes.or(file.lanes).unwrap_or(DEFAULT_LANES),
        demand: args.demand.or(file.demand).unwrap_or(DEFAULT_DEMAND),
        dedicated_capacity: file.dedicated_capacity,
        grid_step,
        p,
        simulate,
        output_dir,
    })
}

fn resolve_profile(
    args: &CommonArgs,
    file: &FileConfig,
) -> CliResult<(HeadwayProfile, String)> {
    if let Some(name) = &args.scenario {
        let scenario: Scenario = name.parse()?;
        return Ok((scenario.profile(), scenario.name().to_string()));
    }
    match (&file.scenario, &file.profile) {
        (Some(_), Some(_)) => Err(CliError::Input(
            "config must set exactly one of 'scenario' or 'profile', not both".into(),
        )),
        (Some(name), None) => {
            let scenario: Scenario = name.parse()?;
            Ok((scenario.profile(), scenario.name().to_string()))
        }
        (None, Some(spec)) => {
            let profile = HeadwayProfile::new(spec.h_aa, spec.h_am, spec.h_ma, spec.h_mm)?;
            Ok((profile, "custom".to_string()))
        }
        (None, None) => Err(CliError::Input(
            "no scenario given: pass --scenario or set 'scenario'/'profile' in the config".into(),
        )),
    }
}

/// Writes a file atomically: contents land in a sibling temp file that is
/// renamed into place, so readers never observe a partial write.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents).map_err(|e| io_error("cannot write", &tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| io_error("cannot rename into", path, e))
}
