use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Model, design and bench-simulation tools for bistable conical-shell
/// pneumatic valves.
#[derive(Debug, Parser)]
#[command(name = "bvl", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Outer ring radius, mm.
    #[arg(long = "R", global = true, default_value_t = 8.0, value_name = "MM")]
    pub outer_radius: f64,

    /// Inner ring radius, mm.
    #[arg(long = "r", global = true, default_value_t = 4.0, value_name = "MM")]
    pub inner_radius: f64,

    /// Shell thickness, mm.
    #[arg(long = "t", global = true, default_value_t = 1.0, value_name = "MM")]
    pub thickness: f64,

    /// Slope angle, degrees.
    #[arg(long = "alpha", global = true, default_value_t = 45.0, value_name = "DEG")]
    pub alpha: f64,

    /// Shore-A hardness of the shell material [default: 50].
    #[arg(long = "shore", global = true, conflicts_with = "youngs_modulus", value_name = "SHORE_A")]
    pub shore: Option<f64>,

    /// Young's modulus of the shell material, MPa.
    #[arg(long = "E", global = true, value_name = "MPA")]
    pub youngs_modulus: Option<f64>,

    /// Number of grid points over [-h0, h0] (odd, at least 101).
    #[arg(long, global = true, default_value_t = 2001)]
    pub grid: usize,

    /// Hardness table file with `shoreA=modulus_MPa` lines.
    #[arg(long, global = true, env = "BVL_MATERIAL_TABLE", value_name = "PATH")]
    pub material_table: Option<PathBuf>,

    /// Existing directory receiving the output files.
    #[arg(long, global = true, default_value = ".", value_name = "DIR")]
    pub out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    pub format: Format,

    /// Random seed for bench simulations [default: 0, or the scenario's].
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy and pressure curves plus the valve summary.
    Curve,
    /// Critical pressure over a range of one design parameter.
    Sweep(SweepArgs),
    /// Design value that reaches a target critical pressure.
    Invert(InvertArgs),
    /// Critical-pressure search on the simulated rig.
    Simulate(SimulateArgs),
    /// Fatigue cycling on the simulated rig.
    Fatigue(FatigueArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    #[value(alias = "shore")]
    Hardness,
    Thickness,
    #[value(alias = "slope-angle")]
    Angle,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub param: SweepParam,

    /// `start:stop:step` (inclusive) or a comma list [default: the
    /// parameter's printed batch].
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InvertParam {
    #[value(alias = "shore")]
    Hardness,
    Thickness,
    #[value(alias = "slope-angle")]
    Angle,
    #[value(name = "modulus", alias = "E")]
    Modulus,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// Target critical pressure, kPa.
    #[arg(long, allow_hyphen_values = true)]
    pub target: f64,

    #[arg(long, value_enum, default_value_t = InvertParam::Thickness)]
    pub param: InvertParam,

    /// Search interval `low:high` [default depends on the parameter].
    #[arg(long)]
    pub bounds: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML scenario file.
    #[arg(long, value_name = "PATH")]
    pub scenario: Option<PathBuf>,

    /// Pressure step, kPa (overrides the scenario).
    #[arg(long)]
    pub step: Option<f64>,

    /// First trial pressure, kPa (overrides the scenario).
    #[arg(long)]
    pub start: Option<f64>,

    /// Keep every n-th sample in the log.
    #[arg(long, default_value_t = 10)]
    pub log_every: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Chemical,
    Physical,
}

#[derive(Debug, Args)]
pub struct FatigueArgs {
    #[arg(long, value_enum, default_value_t = Preset::Chemical)]
    pub preset: Preset,

    #[arg(long, default_value_t = 500)]
    pub cycles: u32,

    /// Driving pressure, kPa.
    #[arg(long, default_value_t = 35.0)]
    pub pressure: f64,

    /// Critical pressure of the chemically processed valve, kPa [default:
    /// the shell model's].
    #[arg(long, value_name = "KPA")]
    pub critical_pressure: Option<f64>,

    /// Also write the rig log, keeping every n-th sample.
    #[arg(long)]
    pub log_every: Option<u64>,
}

/// Parses `start:stop:step` or `a,b,c`. Range values are rounded to 1e-9 and
/// `stop` is included when within 1e-9 of the last step.
pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(format!("range `{text}` must be start:stop:step"));
        };
        let start = parse_number(start)?;
        let stop = parse_number(stop)?;
        let step = parse_number(step)?;
        if !(step > 0.0) {
            return Err(format!("range step must be positive, got {step}"));
        }
        if stop < start {
            return Err(format!("range stop {stop} is below start {start}"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 100_000 {
            return Err(format!("range `{text}` has {count} values"));
        }
        return Ok((0..count)
            .map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9)
            .collect());
    }
    text.split(',').map(parse_number).collect()
}

/// Parses `low:high`.
pub fn parse_bounds(text: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| format!("bounds `{text}` must be low:high"))?;
    Ok((parse_number(lo)?, parse_number(hi)?))
}

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{}` is not a number", s.trim()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{}` is not finite", s.trim()))
    }
}
