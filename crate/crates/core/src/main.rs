use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use darpsv::bench::{run_bench, write_csv, write_json_lines, BenchCase};
use darpsv::events::enumerate_events;
use darpsv::formulations::{build_model, solve, Formulation, SolveConfig};
use darpsv::fragments::enumerate_fragments;
use darpsv::instance::{build_dataset, load_instance, DatasetParams, Instance, Variant};
use darpsv::milp::{BackendKind, Status};
use darpsv::solution::SolutionFile;
use darpsv::validate::check_solution;

const EXIT_INFEASIBLE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_TIME_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "darpsv",
    version,
    about = "Exact solvers for dial-a-ride with synchronized visits"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance.
    Solve(SolveArgs),
    /// Write dataset instances for a parameter grid.
    GenDataset(GenArgs),
    /// Run a method x instance matrix and write CSV.
    Bench(BenchArgs),
    /// Check a solution file; exit 0 iff it has no violations.
    Validate {
        instance: PathBuf,
        solution: PathBuf,
    },
    /// Instance inspection.
    Inst {
        #[command(subcommand)]
        cmd: InstCmd,
    },
    /// Network inspection.
    Net {
        #[command(subcommand)]
        cmd: NetCmd,
    },
}

#[derive(Subcommand)]
enum InstCmd {
    /// Print the (possibly transformed) instance as JSON.
    Dump {
        instance: PathBuf,
        #[command(flatten)]
        data: DatasetArgs,
    },
}

#[derive(Subcommand)]
enum NetCmd {
    /// Print the event network.
    DumpEvents {
        instance: PathBuf,
        #[command(flatten)]
        data: DatasetArgs,
    },
    /// Print the fragment set.
    DumpFragments {
        instance: PathBuf,
        #[command(flatten)]
        data: DatasetArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DatasetKind {
    /// Use the file as is.
    Raw,
    Set1,
    Set2,
    Darp,
    Pdptw,
}

/// Builds a dataset instance from a raw benchmark file.
#[derive(Args, Clone, Debug)]
struct DatasetArgs {
    #[arg(long, value_enum, default_value = "raw")]
    dataset: DatasetKind,
    /// Fraction of large customers (R_L).
    #[arg(long)]
    large_fraction: Option<f64>,
    /// Pickup window width in minutes (P_TW).
    #[arg(long)]
    pickup_window: Option<f64>,
    /// Ride-time factor (P_De).
    #[arg(long)]
    ride_factor: Option<f64>,
    #[arg(long)]
    fleet_multiplier: Option<usize>,
}

impl DatasetArgs {
    fn params(&self) -> Option<DatasetParams> {
        let base = match self.dataset {
            DatasetKind::Raw => return None,
            DatasetKind::Set1 => DatasetParams::set1(),
            DatasetKind::Set2 => DatasetParams::set2(1.0 / 3.0, 15.0, 1.5),
            DatasetKind::Darp => DatasetParams::darp(1.5),
            DatasetKind::Pdptw => DatasetParams::pdptw(1.5),
        };
        Some(DatasetParams {
            large_fraction: self.large_fraction.unwrap_or(base.large_fraction),
            pickup_window: self.pickup_window.unwrap_or(base.pickup_window),
            ride_factor: self.ride_factor.unwrap_or(base.ride_factor),
            fleet_multiplier: self.fleet_multiplier.unwrap_or(base.fleet_multiplier),
            variant: base.variant,
        })
    }

    fn load(&self, path: &Path) -> anyhow::Result<(Instance, Option<DatasetParams>)> {
        let raw = load_instance(path).with_context(|| format!("reading {}", path.display()))?;
        match self.params() {
            None => Ok((raw, None)),
            Some(p) => Ok((build_dataset(&raw, &p)?, Some(p))),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value = "tsfrag")]
    formulation: String,
    /// Dynamic discretization discovery (time-space formulations).
    #[arg(long)]
    ddd: bool,
    /// Fixed grid step in minutes.
    #[arg(long)]
    resolution: Option<f64>,
    /// Infeasible-path cuts on a fixed grid (tsfrag only).
    #[arg(long)]
    callbacks: bool,
    /// Seconds.
    #[arg(long, default_value_t = 1800.0)]
    time_limit: f64,
    #[arg(long)]
    backend: Option<String>,
    /// Solution JSON path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the initial model in LP format.
    #[arg(long)]
    lp: Option<PathBuf>,
    #[command(flatten)]
    data: DatasetArgs,
}

#[derive(Args)]
struct GenArgs {
    /// Raw benchmark files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "set2")]
    dataset: DatasetKind,
    /// R_L values; defaults to the full grid of the dataset.
    #[arg(long, value_delimiter = ',')]
    large_fraction: Vec<f64>,
    /// P_TW values.
    #[arg(long, value_delimiter = ',')]
    pickup_window: Vec<f64>,
    /// P_De values.
    #[arg(long, value_delimiter = ',')]
    ride_factor: Vec<f64>,
    #[arg(long)]
    fleet_multiplier: Option<usize>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files.
    instances: Vec<PathBuf>,
    /// Comma-separated methods, e.g. `ebf,abf,tsfrag+ddd,tsfrag+c@1,tsef@10`.
    #[arg(long, value_delimiter = ',', default_value = "tsfrag+ddd")]
    methods: Vec<String>,
    #[arg(long, default_value_t = 1800.0)]
    time_limit: f64,
    #[arg(long)]
    backend: Option<String>,
    /// Independent solves run concurrently.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    /// CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write one JSON object per row to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    #[command(flatten)]
    data: DatasetArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let ddd = matches!(&cli.cmd, Command::Solve(a) if a.ddd)
        || matches!(&cli.cmd, Command::Bench(a) if a.methods.iter().any(|m| m.contains("ddd")));
    let filter = if ddd { "warn,darpsv::ddd=info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(filter))
        .format_target(false)
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e
                .downcast_ref::<darpsv::Error>()
                .is_some_and(|e| matches!(e, darpsv::Error::Config(_) | darpsv::Error::Params(_)));
            ExitCode::from(if usage { EXIT_USAGE } else { 1 })
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.cmd {
        Command::Solve(a) => cmd_solve(a),
        Command::GenDataset(a) => cmd_gen_dataset(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Validate { instance, solution } => {
            let inst = load_instance(&instance)?;
            let text = std::fs::read_to_string(&solution)
                .with_context(|| format!("reading {}", solution.display()))?;
            let file = SolutionFile::from_json(&text)?;
            let violations = check_solution(&inst, &file);
            for v in &violations {
                println!("{v}");
            }
            println!("{} violation(s)", violations.len());
            Ok(if violations.is_empty() { 0 } else { 1 })
        }
        Command::Inst {
            cmd: InstCmd::Dump { instance, data },
        } => {
            let (inst, _) = data.load(&instance)?;
            println!("{}", inst.to_json()?);
            Ok(0)
        }
        Command::Net {
            cmd: NetCmd::DumpEvents { instance, data },
        } => {
            let (inst, _) = data.load(&instance)?;
            print!("{}", enumerate_events(&inst).dump());
            Ok(0)
        }
        Command::Net {
            cmd: NetCmd::DumpFragments { instance, data },
        } => {
            let (inst, _) = data.load(&instance)?;
            print!("{}", enumerate_fragments(&inst).dump());
            Ok(0)
        }
    }
}

fn config(
    formulation: &str,
    time_limit: f64,
    backend: Option<&str>,
) -> anyhow::Result<SolveConfig> {
    let f: Formulation = formulation.parse()?;
    let mut cfg = SolveConfig::new(f).with_time_limit(time_limit);
    cfg.backend = BackendKind::resolve(backend)?;
    Ok(cfg)
}

fn cmd_solve(a: SolveArgs) -> anyhow::Result<u8> {
    let mut cfg = config(&a.formulation, a.time_limit, a.backend.as_deref())?;
    cfg.ddd = a.ddd;
    cfg.callbacks = a.callbacks;
    cfg.resolution = a.resolution;
    cfg.validate()?;
    let (inst, _) = a.data.load(&a.instance)?;
    if let Some(path) = &a.lp {
        std::fs::write(path, build_model(&inst, &cfg)?.to_lp())?;
    }
    let rep = solve(&inst, &cfg)?;
    let file = rep.to_file();
    match &a.out {
        Some(path) => std::fs::write(path, file.to_json()?)?,
        None => println!("{}", file.to_json()?),
    }
    let obj = file
        .objective
        .map_or("NA".to_string(), |o| format!("{o:.2}"));
    let lb = file.bound.map_or("NA".to_string(), |b| format!("{b:.2}"));
    eprintln!(
        "{} {}: {} obj={obj} lb={lb} time={:.2}s{}",
        inst.name,
        rep.method,
        rep.status,
        rep.stats.seconds,
        if rep.approximate {
            " (approximate)"
        } else {
            ""
        }
    );
    Ok(match rep.status {
        Status::Optimal => 0,
        Status::Infeasible => EXIT_INFEASIBLE,
        Status::FeasibleWithGap | Status::TimeLimit => EXIT_TIME_LIMIT,
    })
}

fn grid_values(given: &[f64], full: &[f64]) -> Vec<f64> {
    if given.is_empty() {
        full.to_vec()
    } else {
        given.to_vec()
    }
}

fn cmd_gen_dataset(a: GenArgs) -> anyhow::Result<u8> {
    let (variant, rl, tw, de): (Variant, Vec<f64>, Vec<f64>, Vec<f64>) = match a.dataset {
        DatasetKind::Raw => bail!(darpsv::Error::Config(
            "gen-dataset needs a dataset other than raw".into()
        )),
        DatasetKind::Set1 => (Variant::DarpsvSet1, vec![1.0 / 3.0], vec![15.0], vec![1.5]),
        DatasetKind::Set2 => (
            Variant::DarpsvSet2,
            grid_values(&a.large_fraction, &[1.0 / 6.0, 1.0 / 3.0]),
            grid_values(&a.pickup_window, &[15.0, 30.0]),
            grid_values(&a.ride_factor, &[1.5, 1.75, 2.0]),
        ),
        DatasetKind::Darp | DatasetKind::Pdptw => (
            if a.dataset == DatasetKind::Darp {
                Variant::Darp
            } else {
                Variant::Pdptw
            },
            vec![0.0],
            grid_values(&a.pickup_window, &[15.0, 30.0]),
            grid_values(&a.ride_factor, &[1.5, 1.75, 2.0]),
        ),
    };
    let fleet = a
        .fleet_multiplier
        .unwrap_or(if variant == Variant::DarpsvSet1 { 3 } else { 4 });
    std::fs::create_dir_all(&a.out_dir)?;
    let mut written = 0;
    for input in &a.inputs {
        let raw = load_instance(input).with_context(|| format!("reading {}", input.display()))?;
        for &l in &rl {
            for &w in &tw {
                for &d in &de {
                    let params = DatasetParams {
                        large_fraction: l,
                        pickup_window: w,
                        ride_factor: d,
                        fleet_multiplier: fleet,
                        variant,
                    };
                    match build_dataset(&raw, &params) {
                        Ok(inst) => {
                            let path = a.out_dir.join(format!("{}.json", inst.name));
                            std::fs::write(&path, inst.to_json()?)?;
                            println!("{}", path.display());
                            written += 1;
                        }
                        Err(e @ darpsv::Error::Params(_)) => return Err(e.into()),
                        Err(e) => log::warn!("{}: skipped ({e})", raw.name),
                    }
                }
            }
        }
    }
    eprintln!("{written} instance(s) written");
    Ok(0)
}

fn cmd_bench(a: BenchArgs) -> anyhow::Result<u8> {
    let backend = BackendKind::resolve(a.backend.as_deref())?;
    let methods: Vec<SolveConfig> = a
        .methods
        .iter()
        .map(|m| {
            let mut cfg = SolveConfig::parse_method(m)?.with_time_limit(a.time_limit);
            cfg.backend = backend;
            Ok(cfg)
        })
        .collect::<darpsv::Result<_>>()?;
    let cases: Vec<BenchCase> = a
        .instances
        .iter()
        .map(|p| {
            let (instance, params) = a.data.load(p)?;
            Ok(BenchCase { instance, params })
        })
        .collect::<anyhow::Result<_>>()?;
    let rows = run_bench(&cases, &methods, a.parallel.max(1))?;
    match &a.out {
        Some(path) => write_csv(BufWriter::new(File::create(path)?), &rows)?,
        None => write_csv(io::stdout().lock(), &rows)?,
    }
    if let Some(path) = &a.json {
        let mut w = BufWriter::new(File::create(path)?);
        write_json_lines(&mut w, &rows)?;
        w.flush()?;
    }
    Ok(0)
}
