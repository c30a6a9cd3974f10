//! Command-line front end: loads a scenario, runs the requested analysis,
//! and writes plot-ready CSV/JSON reports plus a run manifest.
//!
//! Exit codes: 0 success, 2 input or format error, 3 empty network
//! (no visibility to analyze), 4 numerical non-convergence.

mod output;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use tsa_core::catalog::{load_scenario, Scenario};
use tsa_core::interaction::{analyze_interactions, PmfPooling};
use tsa_core::pipeline::ScenarioEngine;
use tsa_core::spectra::run_intra;
use tsa_core::visibility::TemporalSpectrum;
use tsa_core::{Error, Result};

use output::{
    digest_inputs, matrix_csv, pmf_csv, sanitize_id, steps_csv, strength_csv, to_json_bytes,
    windows_csv, InterJson, IntraJson, OutputSet, RunManifest,
};

#[derive(Parser)]
#[command(
    name = "tsa",
    version,
    about = "Temporal spectrum analysis for multi-constellation ground-space networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute access windows and export per-pair pulse trains
    Access(AccessArgs),
    /// Rank each constellation's ground stations by shared visibility
    Intra(IntraArgs),
    /// Quantify pulse interactions between constellations
    Inter(InterArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario TOML file
    #[arg(long, value_name = "FILE")]
    scenario: PathBuf,

    /// Override the scenario's sampling interval, in whole seconds
    #[arg(long, value_name = "SECONDS")]
    alpha: Option<u64>,

    /// Override the scenario's elevation mask, in degrees
    #[arg(long, value_name = "DEGREES")]
    min_elevation: Option<f64>,

    /// Output directory
    #[arg(long, value_name = "DIR", default_value = "tsa-out")]
    out: PathBuf,

    /// Worker threads (default: all processors)
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct AccessArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Restrict to one constellation's pairs
    #[arg(long, value_name = "ID")]
    constellation: Option<String>,

    /// Restrict to one ground station
    #[arg(long, value_name = "ID")]
    station: Option<String>,

    /// Restrict to one satellite
    #[arg(long, value_name = "ID")]
    satellite: Option<String>,

    /// Write one combined window list instead of per-pair files
    #[arg(long)]
    aggregate: bool,
}

#[derive(Args)]
struct IntraArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Analyze one constellation instead of all of them
    #[arg(long, value_name = "ID")]
    constellation: Option<String>,
}

#[derive(Args)]
struct InterArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Pool hourly pulse counts at the strongest station only
    #[arg(long)]
    best_station: bool,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(error) => {
            eprintln!("error: {error}");
            exit_code(&error)
        }
    };
    std::process::exit(code);
}

fn exit_code(error: &Error) -> i32 {
    match error {
        Error::EmptyNetwork(_) => 3,
        Error::Convergence(_) | Error::Division(_) => 4,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Access(args) => cmd_access(args),
        Command::Intra(args) => cmd_intra(args),
        Command::Inter(args) => cmd_inter(args),
    }
}

/// Scenario, output sink, and manifest skeleton shared by all commands.
struct Prepared {
    scenario: Scenario,
    outputs: OutputSet,
    manifest: RunManifest,
    started: Instant,
}

fn prepare(common: &CommonArgs, command: &str) -> Result<Prepared> {
    if let Some(jobs) = common.jobs {
        if jobs == 0 {
            return Err(Error::Format("--jobs must be at least 1".into()));
        }
        // The pool can only be sized once per process; later calls keep the
        // existing pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let mut scenario = load_scenario(&common.scenario)?;
    if let Some(alpha) = common.alpha {
        if alpha == 0 {
            return Err(Error::Format("--alpha must be at least 1 second".into()));
        }
        scenario.alpha_s = alpha;
    }
    if let Some(mask) = common.min_elevation {
        if !(-90.0..=90.0).contains(&mask) {
            return Err(Error::Range(format!(
                "--min-elevation {mask} outside [-90, 90] degrees"
            )));
        }
        scenario.min_elevation_deg = mask;
    }
    let outputs = OutputSet::new(&common.out)?;
    let inputs = digest_inputs(&scenario.source_files)?;
    let manifest = RunManifest {
        tool: "tsa",
        version: env!("CARGO_PKG_VERSION"),
        command: command.to_string(),
        argv: std::env::args().skip(1).collect(),
        scenario: common.scenario.display().to_string(),
        alpha_s: scenario.alpha_s,
        min_elevation_deg: scenario.min_elevation_deg,
        jobs: common.jobs,
        duration_s: 0.0,
        inputs,
        outputs: Vec::new(),
    };
    Ok(Prepared {
        scenario,
        outputs,
        manifest,
        started: Instant::now(),
    })
}

fn finish(mut prepared: Prepared) -> Result<()> {
    prepared.manifest.duration_s = prepared.started.elapsed().as_secs_f64();
    prepared.outputs.write_manifest(&prepared.manifest)
}

fn cmd_access(args: AccessArgs) -> Result<()> {
    let mut p = prepare(&args.common, "access")?;
    let engine = ScenarioEngine::new(&p.scenario)?;
    if let Some(id) = &args.constellation {
        engine.constellation_index(id)?;
    }

    let mut selected: Vec<TemporalSpectrum> = Vec::new();
    for index in 0..p.scenario.constellations.len() {
        let id = &p.scenario.constellations[index].id;
        if args.constellation.as_deref().is_some_and(|f| f != id) {
            continue;
        }
        selected.extend(engine.spectra(index, index)?);
    }
    if let Some(station) = &args.station {
        selected.retain(|s| s.station_id == *station);
    }
    if let Some(satellite) = &args.satellite {
        selected.retain(|s| s.satellite_id == *satellite);
    }
    if selected.is_empty() {
        return Err(no_match_error(&p.scenario, args.constellation.as_deref()));
    }

    if args.aggregate {
        let refs: Vec<&TemporalSpectrum> = selected.iter().collect();
        p.outputs.write("windows.csv", &windows_csv(&refs)?)?;
    } else {
        for spectrum in &selected {
            let base = format!(
                "{}_{}",
                sanitize_id(&spectrum.station_id),
                sanitize_id(&spectrum.satellite_id)
            );
            p.outputs
                .write(&format!("windows_{base}.csv"), &windows_csv(&[spectrum])?)?;
            p.outputs.write(
                &format!("steps_{base}.csv"),
                &steps_csv(spectrum, p.scenario.span_start, p.scenario.span_end)?,
            )?;
        }
    }
    let total_windows: usize = selected.iter().map(|s| s.windows.len()).sum();
    println!(
        "access: {} pairs, {} windows; wrote {} files to {}",
        selected.len(),
        total_windows,
        p.outputs.file_count(),
        p.outputs.dir().display()
    );
    finish(p)
}

/// Filter mismatch error listing what the scenario actually contains.
fn no_match_error(scenario: &Scenario, constellation: Option<&str>) -> Error {
    let in_scope = scenario
        .constellations
        .iter()
        .filter(|c| constellation.map_or(true, |f| f == c.id));
    let mut stations = Vec::new();
    let mut satellites = Vec::new();
    for c in in_scope {
        stations.extend(c.stations.iter().map(|s| s.id.clone()));
        satellites.extend(c.satellites.iter().map(|t| t.id()));
    }
    Error::CrossReference(format!(
        "no (station, satellite) pairs match the filters; stations: [{}]; satellites: [{}]",
        stations.join(", "),
        satellites.join(", ")
    ))
}

fn cmd_intra(args: IntraArgs) -> Result<()> {
    let mut p = prepare(&args.common, "intra")?;
    let engine = ScenarioEngine::new(&p.scenario)?;
    let targets: Vec<String> = match &args.constellation {
        Some(id) => {
            engine.constellation_index(id)?;
            vec![id.clone()]
        }
        None => p
            .scenario
            .constellations
            .iter()
            .map(|c| c.id.clone())
            .collect(),
    };
    for id in &targets {
        let report = run_intra(&engine, id)?;
        let safe = sanitize_id(id);
        p.outputs.write(
            &format!("intra_{safe}.json"),
            &to_json_bytes(&IntraJson::from_report(&report))?,
        )?;
        p.outputs
            .write(&format!("strength_{safe}.csv"), &strength_csv(&report)?)?;
        println!(
            "intra {}: dominant station {}, isolated station {} ({} stations x {} satellites)",
            id,
            report.dominant_station(),
            report.isolated_station(),
            report.spectrum.station_ids.len(),
            report.spectrum.satellite_ids.len()
        );
    }
    println!(
        "wrote {} files to {}",
        p.outputs.file_count(),
        p.outputs.dir().display()
    );
    finish(p)
}

fn cmd_inter(args: InterArgs) -> Result<()> {
    let mut p = prepare(&args.common, "inter")?;
    let engine = ScenarioEngine::new(&p.scenario)?;
    let pooling = if args.best_station {
        PmfPooling::BestStation
    } else {
        PmfPooling::AllPairs
    };
    let analysis = analyze_interactions(&engine, pooling)?;
    p.outputs.write(
        "inter.json",
        &to_json_bytes(&InterJson::from_analysis(&analysis))?,
    )?;
    p.outputs.write("p_matrix.csv", &matrix_csv(&analysis)?)?;
    p.outputs.write("pmf.csv", &pmf_csv(&analysis)?)?;
    if let Some(gamma) = analysis.eigen.eigenvalues.first() {
        println!(
            "inter: {} constellations; dominant eigenvalue {:.3}{:+.3}j",
            analysis.constellation_ids.len(),
            gamma.re,
            gamma.im
        );
    }
    println!(
        "wrote {} files to {}",
        p.outputs.file_count(),
        p.outputs.dir().display()
    );
    finish(p)
}
