use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use steenres::checkpoint::{self, CheckpointError};
use steenres::engine::{resolve_range_with, EngineContext};
use steenres::stats::{write_tsv_header, write_tsv_rows};
use steenres::strategy::is_applicable;
use steenres::{apply_differential, chart, element_degree, lift_cycle, make_for_window, verify};
use steenres::{EngineError, LiftError, Resolution, Strategy, SubalgebraSpec};

mod element;

const THREADS_ENV: &str = "STEENRES_THREADS";

#[derive(Parser)]
#[command(name = "steenres", version, about = "Minimal resolutions over the mod 2 Steenrod algebra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extend a resolution through a range of stems.
    Resolve(ResolveArgs),
    /// Export the Ext chart of a checkpoint.
    Chart(ChartArgs),
    /// Check a checkpoint for consistency.
    Verify(VerifyArgs),
    /// Lift a cycle one homological degree up.
    Lift(LiftArgs),
}

#[derive(clap::Args)]
struct ResolveArgs {
    /// Largest stem t - s to resolve.
    #[arg(long, allow_negative_numbers = true, value_parser = clap::value_parser!(i64).range(0..))]
    max_stem: i64,
    /// Largest homological degree; defaults to the stem bound.
    #[arg(long)]
    max_s: Option<u32>,
    /// naive, auto, auto:below, auto:above or fixed:NAME.
    #[arg(long, default_value = "auto")]
    strategy: Strategy,
    /// Loaded if present; rewritten after every internal degree.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Per-step matrix statistics as TSV.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Worker threads (overridden by STEENRES_THREADS).
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Capacity of the LRU matrix cache; 0 disables it.
    #[arg(long, default_value_t = 0)]
    cache: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
    Svg,
}

#[derive(clap::Args)]
struct ChartArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Also recompute homology at every completed step.
    #[arg(long)]
    deep: bool,
}

#[derive(clap::Args)]
struct LiftArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Element file holding a cycle of some C_s.
    #[arg(long)]
    cycle: PathBuf,
    #[arg(long)]
    subalgebra: SubalgebraSpec,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Checkpoint { path: PathBuf, source: CheckpointError },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error("{0}")]
    Other(String),
    #[error("{0} violation(s)")]
    Violations(usize),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn load_checkpoint(path: &Path) -> Result<(Resolution, checkpoint::Header), CliError> {
    let file = File::open(path).map_err(io_err(path))?;
    checkpoint::load(BufReader::new(file)).map_err(|source| CliError::Checkpoint {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes through a sibling temporary file so an interrupted save leaves the
/// previous checkpoint intact.
fn save_checkpoint(path: &Path, res: &Resolution, strategy: &str) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let file = File::create(&tmp).map_err(io_err(&tmp))?;
    checkpoint::save(res, strategy, BufWriter::new(file)).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(io_err(path)),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Other(e.to_string())),
    }
}

fn thread_count(flag: usize) -> Result<usize, CliError> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Other(format!("{THREADS_ENV}={v:?} is not a thread count")))?,
        Err(_) => flag,
    };
    if n == 0 {
        return Err(CliError::Other("thread count must be positive".into()));
    }
    Ok(n)
}

fn resolve(args: ResolveArgs) -> Result<(), CliError> {
    let max_s = args.max_s.unwrap_or(args.max_stem as u32);
    let threads = thread_count(args.threads)?;
    let mut res = match &args.checkpoint {
        Some(path) if path.exists() => load_checkpoint(path)?.0,
        _ => Resolution::new(),
    };
    let strategy_name = args.strategy.to_string();
    let ctx = EngineContext::with_cache(args.cache);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Other(e.to_string()))?;
    let start = Instant::now();
    let before = res.total_generators();
    let checkpoint_path = args.checkpoint.as_deref();
    let stats = pool.install(|| {
        resolve_range_with::<CliError>(
            &mut res,
            max_s,
            args.max_stem,
            &|s, t| args.strategy.choose(s, t),
            &ctx,
            &mut |res, _t| match checkpoint_path {
                Some(path) => save_checkpoint(path, res, &strategy_name),
                None => Ok(()),
            },
        )
    })?;
    if let Some(path) = checkpoint_path {
        save_checkpoint(path, &res, &strategy_name)?;
    }
    if let Some(path) = &args.stats {
        let file = File::create(path).map_err(io_err(path))?;
        let mut out = BufWriter::new(file);
        write_tsv_header(&mut out)
            .and_then(|_| write_tsv_rows(&mut out, &stats))
            .and_then(|_| out.flush())
            .map_err(io_err(path))?;
    }
    let steps = stats
        .iter()
        .filter(|r| r.phase == steenres::Phase::Hom)
        .count();
    eprintln!(
        "resolved t-s <= {}, s <= {max_s} with {strategy_name}: {} new generators, {} total, {steps} hom records, {:.2?}",
        args.max_stem,
        res.total_generators() - before,
        res.total_generators(),
        start.elapsed()
    );
    Ok(())
}

fn chart_cmd(args: ChartArgs) -> Result<(), CliError> {
    let (res, _) = load_checkpoint(&args.checkpoint)?;
    let entries = res.chart();
    let text = match args.format {
        Format::Json => chart::to_json(&entries),
        Format::Tsv => chart::to_tsv(&entries),
        Format::Svg => chart::to_svg(&entries),
    };
    write_output(args.out.as_deref(), &text)
}

fn verify_cmd(args: VerifyArgs) -> Result<(), CliError> {
    let (res, _) = load_checkpoint(&args.checkpoint)?;
    let report = verify(&res, args.deep);
    for v in &report.violations {
        println!("{v}");
    }
    if !report.is_ok() {
        return Err(CliError::Violations(report.violations.len()));
    }
    print!("ok: {} generators", res.total_generators());
    if args.deep {
        print!(", exactness rechecked at {} steps", report.exactness_checked);
    }
    println!();
    Ok(())
}

fn lift_cmd(args: LiftArgs) -> Result<(), CliError> {
    let (res, _) = load_checkpoint(&args.checkpoint)?;
    let text = fs::read_to_string(&args.cycle).map_err(io_err(&args.cycle))?;
    let z = element::parse(&text, &res).map_err(|message| CliError::Input {
        path: args.cycle.clone(),
        message,
    })?;
    let (s, t) = if z.is_zero() {
        (0, 0)
    } else {
        element_degree(&z).map_err(LiftError::from)?
    };
    let b = make_for_window(args.subalgebra, t).map_err(|e| CliError::Other(e.to_string()))?;
    if !z.is_zero() && !is_applicable(&b, s + 1, t) {
        eprintln!("warning: {} is not known to be applicable at (s={}, t={t})", b.label(), s + 1);
    }
    let w = lift_cycle(&res, &b, &z)?;
    if apply_differential(&res, &w) != z {
        return Err(CliError::Other("lift does not map to the cycle".into()));
    }
    write_output(args.out.as_deref(), &element::render(&w))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Resolve(a) => resolve(a),
        Command::Chart(a) => chart_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Lift(a) => lift_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
