mod args;
mod output;

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use bvl_core::curves::chamber_volume_derivative;
use bvl_core::explorer::{run_sweep_parallel, DesignBaseline};
use bvl_core::format::sig;
use bvl_core::materials::PRINTABLE_SHORE;
use bvl_core::testbench::{
    fit_exponential, logs_to_csv, run_algorithm_1, run_algorithm_2, Algorithm2Options,
    BenchConfig, ExponentialFit, ProtocolResult, Scenario, ValvePreset, ValveSimModel,
};
use bvl_core::{
    characterize, invert_design, modulus_for_hardness, pressure_curve, run_sweep,
    total_energy_curve, HardnessTable, InverseParameter, InverseSolution, MaterialModel,
    ShellGeometry, SweepParameter, SweepResult, SweepSpec, ValveCharacteristic,
};
use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;

use args::{Cli, Command, FatigueArgs, GlobalArgs, InvertArgs, InvertParam, Preset, SimulateArgs, SweepArgs, SweepParam};

/// Bad flag values found after parsing.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// 1 usage, 2 I/O, 3 model domain.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 1;
        }
        if cause.is::<io::Error>() {
            return 2;
        }
        if cause.is::<bvl_core::Error>() {
            return 3;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    if g.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    output::ensure_dir(&g.out)?;
    match &cli.command {
        Command::Curve => cmd_curve(g),
        Command::Sweep(a) => cmd_sweep(g, a),
        Command::Invert(a) => cmd_invert(g, a),
        Command::Simulate(a) => cmd_simulate(g, a),
        Command::Fatigue(a) => cmd_fatigue(g, a),
    }
}

fn geometry(g: &GlobalArgs) -> Result<ShellGeometry> {
    Ok(ShellGeometry::new(g.outer_radius, g.inner_radius, g.thickness, g.alpha)?)
}

fn table(g: &GlobalArgs) -> Result<HardnessTable> {
    match &g.material_table {
        Some(path) => Ok(HardnessTable::load(path)
            .with_context(|| format!("reading material table {}", path.display()))?
            .with_context(|| format!("in material table {}", path.display()))?),
        None => Ok(HardnessTable::default()),
    }
}

fn material(g: &GlobalArgs, table: &HardnessTable) -> Result<MaterialModel> {
    Ok(match g.youngs_modulus {
        Some(e) => MaterialModel::explicit(e)?,
        None => modulus_for_hardness(table, g.shore.unwrap_or(50.0))?,
    })
}

fn baseline(g: &GlobalArgs) -> Result<DesignBaseline> {
    let table = table(g)?;
    Ok(DesignBaseline {
        geometry: geometry(g)?,
        material: material(g, &table)?,
        table,
        grid_n: g.grid,
    })
}

#[derive(Serialize)]
struct Provenance<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    geometry: ShellGeometry,
    material: MaterialModel,
    grid: usize,
    material_table: Option<String>,
    seed: Option<u64>,
}

fn provenance<'a>(g: &GlobalArgs, base: &DesignBaseline, command: &'a str, seed: Option<u64>) -> Provenance<'a> {
    Provenance {
        tool: "bvl",
        version: env!("CARGO_PKG_VERSION"),
        command,
        geometry: base.geometry,
        material: base.material,
        grid: base.grid_n,
        material_table: g.material_table.as_ref().map(|p| p.display().to_string()),
        seed,
    }
}

fn report(written: &[String]) {
    if !written.is_empty() {
        println!("wrote {}", written.join(", "));
    }
}

fn write(out: &Path, written: &mut Vec<String>, name: &str, contents: &str) -> Result<()> {
    output::write(out, name, contents)?;
    written.push(name.to_string());
    Ok(())
}

fn model_critical_pressure(base: &DesignBaseline) -> Result<f64> {
    let ch = characterize(&base.geometry, &base.material, base.grid_n)?;
    ch.critical_pressure_kpa.ok_or_else(|| {
        bvl_core::Error::InvalidConfig("the shell design is monostable, so it has no critical pressure".into()).into()
    })
}

#[derive(Serialize)]
struct CurveSummary<'a> {
    provenance: Provenance<'a>,
    rest_height_mm: f64,
    slant_length_mm: f64,
    volume_rate_mm2: f64,
    bistable: bool,
    characteristic: ValveCharacteristic,
    h_mm: &'a [f64],
    u_mj: &'a [f64],
    p_kpa: &'a [f64],
}

fn cmd_curve(g: &GlobalArgs) -> Result<()> {
    let base = baseline(g)?;
    let geom = base.geometry;
    let ch = characterize(&geom, &base.material, base.grid_n)?;
    let energy = total_energy_curve(&geom, &base.material, base.grid_n)?;
    let pressure = pressure_curve(&energy, &geom);

    let mut written = Vec::new();
    if g.format.csv() {
        write(&g.out, &mut written, "energy.csv", &energy.to_csv())?;
        write(&g.out, &mut written, "pressure.csv", &pressure.to_csv())?;
    }
    if g.format.json() {
        let summary = CurveSummary {
            provenance: provenance(g, &base, "curve", None),
            rest_height_mm: geom.rest_height(),
            slant_length_mm: geom.slant_length(),
            volume_rate_mm2: chamber_volume_derivative(&geom),
            bistable: ch.is_bistable(),
            characteristic: ch.clone(),
            h_mm: energy.heights(),
            u_mj: energy.energies(),
            p_kpa: pressure.pressures(),
        };
        write(&g.out, &mut written, "curve.json", &output::json(&summary)?)?;
    }
    println!("bistable: {}", ch.is_bistable());
    if let Some(p) = ch.critical_pressure_kpa {
        println!("critical pressure: {} kPa", sig(p));
    }
    if !ch.stable_states.is_empty() {
        let states: Vec<String> = ch.stable_states.iter().map(|&h| sig(h)).collect();
        println!("stable states: {} mm", states.join(", "));
    }
    report(&written);
    Ok(())
}

fn sweep_values(a: &SweepArgs) -> Result<Vec<f64>> {
    match &a.values {
        Some(text) => args::parse_values(text).map_err(usage),
        None => Ok(match a.param {
            SweepParam::Hardness => SweepSpec::batch_a().values,
            SweepParam::Thickness => SweepSpec::batch_b().values,
            SweepParam::Angle => SweepSpec::batch_c().values,
        }),
    }
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    provenance: Provenance<'a>,
    result: &'a SweepResult,
}

fn cmd_sweep(g: &GlobalArgs, a: &SweepArgs) -> Result<()> {
    let base = baseline(g)?;
    let parameter = match a.param {
        SweepParam::Hardness => SweepParameter::ShoreHardness,
        SweepParam::Thickness => SweepParameter::Thickness,
        SweepParam::Angle => SweepParameter::SlopeAngle,
    };
    let spec = SweepSpec::new(parameter, sweep_values(a)?).with_baseline(base.clone());
    let result = if g.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(g.jobs)
            .build()
            .context("starting worker threads")?;
        pool.install(|| run_sweep_parallel(&spec))?
    } else {
        run_sweep(&spec)?
    };

    let mut written = Vec::new();
    if g.format.csv() {
        write(&g.out, &mut written, "sweep.csv", &result.to_csv())?;
    }
    if g.format.json() {
        let out = SweepOutput {
            provenance: provenance(g, &base, "sweep", None),
            result: &result,
        };
        write(&g.out, &mut written, "sweep.json", &output::json(&out)?)?;
    }
    for row in &result.rows {
        match row.critical_pressure_kpa {
            Some(p) => println!("{} = {}: P_c = {} kPa", parameter.name(), sig(row.value), sig(p)),
            None => println!("{} = {}: monostable", parameter.name(), sig(row.value)),
        }
    }
    report(&written);
    Ok(())
}

#[derive(Serialize)]
struct InvertOutput<'a> {
    provenance: Provenance<'a>,
    bounds: (f64, f64),
    solution: &'a InverseSolution,
}

fn cmd_invert(g: &GlobalArgs, a: &InvertArgs) -> Result<()> {
    let base = baseline(g)?;
    let (parameter, default_bounds) = match a.param {
        InvertParam::Hardness => (
            InverseParameter::ShoreHardness,
            (PRINTABLE_SHORE[0], PRINTABLE_SHORE[PRINTABLE_SHORE.len() - 1]),
        ),
        InvertParam::Thickness => (InverseParameter::Thickness, (0.7, 1.3)),
        InvertParam::Angle => (InverseParameter::SlopeAngle, (30.0, 40.0)),
        InvertParam::Modulus => (InverseParameter::YoungsModulus, (0.5, 5.0)),
    };
    let bounds = match &a.bounds {
        Some(text) => args::parse_bounds(text).map_err(usage)?,
        None => default_bounds,
    };
    let sol = invert_design(a.target, parameter, bounds, &base)?;

    let mut written = Vec::new();
    if g.format.csv() {
        let csv = format!(
            "param,target_kPa,value,achieved_kPa,iterations\n{:?},{},{},{},{}\n",
            parameter,
            sig(sol.target_kpa),
            sig(sol.value),
            sig(sol.achieved_kpa),
            sol.iterations
        );
        write(&g.out, &mut written, "invert.csv", &csv)?;
    }
    if g.format.json() {
        let out = InvertOutput {
            provenance: provenance(g, &base, "invert", None),
            bounds,
            solution: &sol,
        };
        write(&g.out, &mut written, "invert.json", &output::json(&out)?)?;
    }
    println!(
        "{:?} = {} gives P_c = {} kPa (target {} kPa)",
        parameter,
        sig(sol.value),
        sig(sol.achieved_kpa),
        sig(sol.target_kpa)
    );
    report(&written);
    Ok(())
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    provenance: Provenance<'a>,
    scenario: &'a Scenario,
    valve: &'a ValveSimModel,
    bench: &'a BenchConfig,
    result: &'a ProtocolResult,
}

fn cmd_simulate(g: &GlobalArgs, a: &SimulateArgs) -> Result<()> {
    let base = baseline(g)?;
    let mut scenario = match &a.scenario {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading scenario {}", path.display()))?;
            Scenario::from_toml_str(&text).with_context(|| format!("in scenario {}", path.display()))?
        }
        None => Scenario::default(),
    };
    if let Some(step) = a.step {
        scenario.step_kpa = step;
    }
    if let Some(start) = a.start {
        scenario.start_kpa = start;
    }
    if let Some(seed) = g.seed {
        scenario.seed = seed;
    }
    if a.log_every == 0 {
        return Err(usage("--log-every must be at least 1"));
    }
    let model_pc = match scenario.critical_pressure_kpa {
        Some(p) => p,
        None => model_critical_pressure(&base)?,
    };
    let valve = scenario.valve_model(model_pc)?;
    let config = scenario.bench_config();
    let mut opts = scenario.algorithm1_options();
    opts.log_every = Some(a.log_every);
    let result = run_algorithm_1(valve.clone(), &config, &opts)?;

    let mut written = Vec::new();
    if g.format.csv() {
        write(&g.out, &mut written, "simulate_log.csv", &logs_to_csv(&result.log))?;
    }
    if g.format.json() {
        let out = SimulateOutput {
            provenance: provenance(g, &base, "simulate", Some(scenario.seed)),
            scenario: &scenario,
            valve: &valve,
            bench: &config,
            result: &result,
        };
        write(&g.out, &mut written, "simulate.json", &output::json(&out)?)?;
    }
    if let Some(p) = result.critical_pressure_kpa {
        println!(
            "measured critical pressure: {} kPa after {} trials (valve {} kPa)",
            sig(p),
            result.trials,
            sig(valve.critical_pressure_kpa)
        );
    }
    if let Some(Some(t)) = result.extracted_response_times.first() {
        println!("response time: {} s", sig(*t));
    }
    report(&written);
    Ok(())
}

#[derive(Serialize)]
struct FatigueOutput<'a> {
    provenance: Provenance<'a>,
    preset: ValvePreset,
    valve: &'a ValveSimModel,
    pressure_kpa: f64,
    cycles_requested: u32,
    fit: Option<ExponentialFit>,
    result: &'a ProtocolResult,
}

fn cmd_fatigue(g: &GlobalArgs, a: &FatigueArgs) -> Result<()> {
    let base = baseline(g)?;
    if a.log_every == Some(0) {
        return Err(usage("--log-every must be at least 1"));
    }
    let preset = match a.preset {
        Preset::Chemical => ValvePreset::Chemical,
        Preset::Physical => ValvePreset::Physical,
    };
    let chemical_pc = match a.critical_pressure {
        Some(p) => p,
        None => model_critical_pressure(&base)?,
    };
    let valve = preset.model(chemical_pc)?;
    let opts = Algorithm2Options {
        cycles: a.cycles,
        pressure_kpa: a.pressure,
        log_every: a.log_every,
    };
    let result = run_algorithm_2(valve.clone(), &BenchConfig::default(), &opts)?;
    let series: Vec<(f64, f64)> = result
        .response_times
        .iter()
        .enumerate()
        .map(|(i, &t)| ((i + 1) as f64, t))
        .collect();
    let fit = (series.len() >= 10).then(|| fit_exponential(&series)).transpose()?;

    let mut written = Vec::new();
    if g.format.csv() {
        let mut csv = String::from("cycle,T_s,T_extracted_s\n");
        for (i, &(n, t)) in series.iter().enumerate() {
            let extracted = result
                .extracted_response_times
                .get(i)
                .copied()
                .flatten()
                .map(sig)
                .unwrap_or_default();
            csv.push_str(&format!("{},{},{}\n", n, sig(t), extracted));
        }
        write(&g.out, &mut written, "fatigue.csv", &csv)?;
        if a.log_every.is_some() {
            write(&g.out, &mut written, "fatigue_log.csv", &logs_to_csv(&result.log))?;
        }
    }
    if g.format.json() {
        let out = FatigueOutput {
            provenance: provenance(g, &base, "fatigue", None),
            preset,
            valve: &valve,
            pressure_kpa: a.pressure,
            cycles_requested: a.cycles,
            fit,
            result: &result,
        };
        write(&g.out, &mut written, "fatigue.json", &output::json(&out)?)?;
    }
    println!("completed cycles: {}", result.trials);
    if let Some(n) = result.failed_after_cycle {
        println!("valve failed after {n} complete cycles");
    }
    if let Some(f) = fit {
        println!("fit: T = {} exp({} n), rms {}", sig(f.a), sig(f.b), sig(f.rms_residual));
    }
    report(&written);
    Ok(())
}

