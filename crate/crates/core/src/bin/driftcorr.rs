use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use driftcorr::corrector::{EpochSolve, HeadingAnchor};
use driftcorr::io::{read_trajectory, write_json, write_text, write_trajectory, RunConfig};
use driftcorr::plot::{render_svg, Layer, Role};
use driftcorr::prelude::*;
use driftcorr::simulator::store::{load_scenario, save_scenario};
use driftcorr::simulator::{format_table, make_scenario_with, ScenarioOptions};
use driftcorr::worldmap::io::{read_field, read_map, write_field};
use driftcorr::worldmap::rasterize;

const OUTPUT_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "driftcorr", version, about = "Map-aided drift correction for planar trajectories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rasterize a map and write its distance field.
    Dt(DtArgs),
    /// Correct a SLAM trajectory against a map.
    Correct(CorrectArgs),
    /// Generate a synthetic scenario directory.
    Simulate(SimulateArgs),
    /// Compare corrected and SLAM trajectories with a reference.
    Eval(EvalArgs),
    /// Draw trajectories (and optionally a field) as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RasterArgs {
    /// JSON run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    cell_size: Option<f64>,
    #[arg(long)]
    d_max: Option<f64>,
    #[arg(long)]
    margin: Option<f64>,
}

#[derive(Args)]
struct DtArgs {
    #[arg(long)]
    map: PathBuf,
    #[command(flatten)]
    raster: RasterArgs,
    /// Output field file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CorrectArgs {
    /// Scenario directory written by `simulate`.
    #[arg(long, conflicts_with_all = ["slam", "map"])]
    scenario: Option<PathBuf>,
    #[arg(long)]
    slam: Option<PathBuf>,
    #[arg(long)]
    map: Option<PathBuf>,
    /// Precomputed distance field; replaces rasterizing the map.
    #[arg(long)]
    field: Option<PathBuf>,
    /// Reference trajectory for the printed summary.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Initial heading in radians; defaults to the first SLAM step.
    #[arg(long, allow_hyphen_values = true)]
    heading0: Option<f64>,
    #[command(flatten)]
    raster: RasterArgs,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Output directory for corrected.csv and epochs.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TuningArgs {
    /// Four comma-separated standard deviations.
    #[arg(long, value_parser = parse_array::<4>)]
    sigma: Option<[f64; 4]>,
    /// Four comma-separated term weights.
    #[arg(long, value_parser = parse_array::<4>)]
    weight: Option<[f64; 4]>,
    #[arg(long)]
    sigma2_rel: Option<f64>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    grad_tol: Option<f64>,
    #[arg(long)]
    step_tol: Option<f64>,
    /// Heading used to measure candidate turns: corrected or slam.
    #[arg(long, value_parser = parse_anchor)]
    anchor: Option<HeadingAnchor>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value = "straight")]
    kind: ScenarioKind,
    #[arg(long, default_value_t = 500.0)]
    length: f64,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    heading_bias: f64,
    /// Multiplier on every step length.
    #[arg(long, default_value_t = 1.0)]
    scale_bias: f64,
    #[arg(long, default_value_t = 0.0)]
    angle_noise: f64,
    #[arg(long, default_value_t = 0.0)]
    mag_noise: f64,
    #[arg(long, default_value_t = 50.0)]
    segment_length: f64,
    /// Offset of the map from the true path, as `dx,dy` in meters.
    #[arg(long, value_parser = parse_array::<2>, allow_hyphen_values = true)]
    map_shift: Option<[f64; 2]>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output scenario directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, requires_all = ["slam", "reference"], conflicts_with = "scenario")]
    corrected: Option<PathBuf>,
    #[arg(long)]
    slam: Option<PathBuf>,
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Scenario directories; each is corrected unless it holds corrected.csv.
    #[arg(long, num_args = 1..)]
    scenario: Vec<PathBuf>,
    #[command(flatten)]
    raster: RasterArgs,
    /// Output directory for report.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    corrected: Option<PathBuf>,
    #[arg(long)]
    slam: Option<PathBuf>,
    /// Shade this distance field under the trajectories.
    #[arg(long)]
    field: Option<PathBuf>,
    /// Output SVG file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct EpochLog<'a> {
    version: u32,
    converged_fraction: f64,
    epochs: &'a [EpochSolve],
}

#[derive(Serialize)]
struct EvalLog {
    version: u32,
    rows: Vec<EvalRow>,
}

#[derive(Serialize)]
struct EvalRow {
    name: String,
    #[serde(flatten)]
    report: EvalReport,
}

fn parse_array<const N: usize>(s: &str) -> std::result::Result<[f64; N], String> {
    let values = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    values
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected {N} comma-separated numbers, got {}", v.len()))
}

fn parse_anchor(s: &str) -> std::result::Result<HeadingAnchor, String> {
    match s {
        "corrected" => Ok(HeadingAnchor::Corrected),
        "slam" => Ok(HeadingAnchor::Slam),
        _ => Err(format!("expected `corrected` or `slam`, got `{s}`")),
    }
}

fn load_config(raster: &RasterArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = match &raster.config {
        Some(path) => RunConfig::read(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = raster.cell_size {
        cfg.raster.cell_size = v;
    }
    if let Some(v) = raster.d_max {
        cfg.raster.d_max = v;
    }
    if let Some(v) = raster.margin {
        cfg.raster.margin = v;
    }
    Ok(cfg)
}

fn apply_tuning(cfg: &mut RunConfig, t: &TuningArgs) {
    if let Some(s) = t.sigma {
        cfg.priors.sigma = s;
    }
    if let Some(w) = t.weight {
        cfg.priors.weight = w;
    }
    if let Some(v) = t.sigma2_rel {
        cfg.priors.sigma2_rel = v;
    }
    if let Some(v) = t.lr {
        cfg.solver.learning_rate = v;
    }
    if let Some(v) = t.max_iters {
        cfg.solver.max_iters = v;
    }
    if let Some(v) = t.grad_tol {
        cfg.solver.grad_tol = v;
    }
    if let Some(v) = t.step_tol {
        cfg.solver.step_tol = v;
    }
    if let Some(v) = t.anchor {
        cfg.solver.heading_anchor = v;
    }
}

fn create_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn cmd_dt(args: DtArgs) -> anyhow::Result<()> {
    let cfg = load_config(&args.raster)?;
    let map = read_map(&args.map)?;
    let spec = RasterSpec::covering(&map, cfg.raster.cell_size, cfg.raster.margin)?;
    let occupied = rasterize(&map, &spec)?.count();
    let field = DistanceField::from_map(&map, spec, cfg.raster.d_max)?;
    write_field(&args.out, &field)?;
    println!(
        "grid {}x{} cell {} m origin ({}, {}) occupied {} d_max {} m",
        spec.width, spec.height, spec.cell_size, spec.origin.x, spec.origin.y, occupied, cfg.raster.d_max
    );
    Ok(())
}

fn cmd_correct(args: CorrectArgs) -> anyhow::Result<()> {
    let mut cfg = load_config(&args.raster)?;
    apply_tuning(&mut cfg, &args.tuning);

    let (slam, map_path, init, mut reference) = match &args.scenario {
        Some(dir) => {
            let s = load_scenario(dir)?;
            (s.slam, Some(dir.join("map.json")), Some(s.manifest.init), Some(s.truth))
        }
        None => {
            let Some(slam_path) = &args.slam else {
                bail!("either --scenario or --slam is required");
            };
            (read_trajectory(slam_path)?, args.map.clone(), None, None)
        }
    };
    let field = match (&args.field, &map_path) {
        (Some(path), _) => read_field(path)?,
        (None, Some(path)) => cfg.raster.build_field(&read_map(path)?)?,
        (None, None) => bail!("one of --map or --field is required"),
    };
    let mut init = match init {
        Some(init) => init,
        None => InitialConditions::from_trajectory(&slam)?,
    };
    if let Some(h) = args.heading0 {
        init = InitialConditions::new(init.p0, h)?;
    }
    if let Some(path) = &args.reference {
        reference = Some(read_trajectory(path)?);
    }

    let out = correct_trajectory(&slam, init, &field, &cfg.priors, &cfg.solver)?;
    create_dir(&args.out)?;
    write_trajectory(args.out.join("corrected.csv"), &out.trajectory)?;
    write_json(
        &args.out.join("epochs.json"),
        &EpochLog {
            version: OUTPUT_VERSION,
            converged_fraction: out.converged_fraction(),
            epochs: &out.epochs,
        },
    )?;

    println!(
        "epochs {} converged {:.1}%",
        out.epochs.len(),
        100.0 * out.converged_fraction()
    );
    if let Some(reference) = reference {
        let r = evaluate(&out.trajectory, &slam, &reference)?;
        println!(
            "closing corrected {:.1} m slam {:.1} m improvement {:.1}x",
            r.closing_corrected, r.closing_slam, r.improvement_factor
        );
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let drift = DriftModel {
        heading_rate_bias: args.heading_bias,
        scale_bias: args.scale_bias,
        angle_noise_std: args.angle_noise,
        magnitude_noise_std: args.mag_noise,
        seed: args.seed,
    };
    let options = ScenarioOptions {
        segment_length: args.segment_length,
        map_shift: args
            .map_shift
            .map_or(Point2::ORIGIN, |[x, y]| Point2::new(x, y)),
    };
    let scenario = make_scenario_with(args.kind, args.length, args.step, drift, options)?;
    save_scenario(&args.out, &scenario)?;
    println!(
        "{}: {} epochs written to {}",
        scenario.name,
        scenario.truth.len() - 1,
        args.out.display()
    );
    Ok(())
}

fn eval_scenario(dir: &Path, cfg: &RunConfig) -> anyhow::Result<(String, EvalReport)> {
    let s = load_scenario(dir)?;
    let corrected_path = dir.join("corrected.csv");
    let corrected = if corrected_path.exists() {
        read_trajectory(&corrected_path)?
    } else {
        let field = cfg.raster.build_field(&s.map)?;
        correct_trajectory(&s.slam, s.manifest.init, &field, &cfg.priors, &cfg.solver)?.trajectory
    };
    Ok((s.manifest.name, evaluate(&corrected, &s.slam, &s.truth)?))
}

fn cmd_eval(args: EvalArgs) -> anyhow::Result<()> {
    let cfg = load_config(&args.raster)?;
    let rows = if let Some(corrected) = &args.corrected {
        let (Some(slam), Some(reference)) = (&args.slam, &args.reference) else {
            bail!("--corrected needs --slam and --reference");
        };
        let report = evaluate(
            &read_trajectory(corrected)?,
            &read_trajectory(slam)?,
            &read_trajectory(reference)?,
        )?;
        let name = corrected
            .file_stem()
            .map_or_else(|| "corrected".to_owned(), |s| s.to_string_lossy().into_owned());
        vec![(name, report)]
    } else if !args.scenario.is_empty() {
        thread::scope(|scope| {
            let handles: Vec<_> = args
                .scenario
                .iter()
                .map(|dir| scope.spawn(|| eval_scenario(dir, &cfg)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("evaluation worker panicked"))
                .collect::<anyhow::Result<Vec<_>>>()
        })?
    } else {
        bail!("either --corrected/--slam/--reference or --scenario is required");
    };

    print!("{}", format_table(&rows));
    if let Some(out) = &args.out {
        create_dir(out)?;
        let log = EvalLog {
            version: OUTPUT_VERSION,
            rows: rows
                .into_iter()
                .map(|(name, report)| EvalRow { name, report })
                .collect(),
        };
        write_json(&out.join("report.json"), &log)?;
    }
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> anyhow::Result<()> {
    let mut loaded = Vec::new();
    for (path, label, role) in [
        (&args.reference, "reference", Role::Reference),
        (&args.corrected, "corrected", Role::Corrected),
        (&args.slam, "slam", Role::Slam),
    ] {
        if let Some(path) = path {
            loaded.push((label, role, read_trajectory(path)?));
        }
    }
    if loaded.is_empty() {
        bail!("nothing to plot: pass at least one of --reference, --corrected, --slam");
    }
    let field = args.field.as_ref().map(read_field).transpose()?;
    let layers: Vec<Layer<'_>> = loaded
        .iter()
        .map(|(label, role, t)| Layer::new(*label, *role, t))
        .collect();
    let svg = render_svg(&layers, field.as_ref())?;
    write_text(&args.out, &svg)?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<driftcorr::Error>() {
        Some(e) if e.is_numerical() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Dt(a) => cmd_dt(a),
        Command::Correct(a) => cmd_correct(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
