//! `odlm`: oscillator-network image segmentation with a structured heap
//! queue backend, plus queue benchmarks and differential fuzzing.

mod commands;
mod config;
mod netpbm;
mod palette;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use commands::{BenchOptions, CliError, FuzzOptions};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "odlm", version, about = "Event-driven oscillator-network image segmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment a grayscale PGM image into synchrony groups.
    Segment(SegmentArgs),
    /// Queue cycle-model benchmarks and scaling sweeps (CSV report).
    Bench(BenchArgs),
    /// Differential fuzzing of the heap queues against the reference queue.
    Fuzz(FuzzArgs),
}

#[derive(Args)]
struct SegmentArgs {
    /// Input image (binary PGM, maxval 255).
    #[arg(long)]
    image: Option<PathBuf>,
    /// Config file with key = value lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Simulated duration in milliseconds.
    #[arg(long)]
    duration_ms: Option<f64>,
    /// Seed for the initial membrane potentials.
    #[arg(long)]
    seed: Option<u64>,
    /// Event queue implementation: naive, memopt or oracle.
    #[arg(long)]
    queue: Option<String>,
    /// Phase-gap threshold (ticks) for segment extraction.
    #[arg(long)]
    eps: Option<u64>,
    /// Output label image (binary PPM).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write run statistics as JSON.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Write raw per-pixel labels as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Count queue pipeline cycles (measured, 7 per update).
    #[arg(long)]
    accounting: bool,
    /// Include wall-clock time in the stats JSON (breaks byte-for-byte
    /// reproducibility of the stats file).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Write the CSV report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated queue capacities to sweep.
    #[arg(long, default_value = "256,4096,65536")]
    sizes: String,
    /// delete-insert, insert, find-min, read-top or all.
    #[arg(long, default_value = "all")]
    workload: String,
    /// Comparator width of the scan baseline.
    #[arg(long, default_value_t = 16)]
    k: u64,
    /// Operations per (structure, size) cell.
    #[arg(long, default_value_t = 300)]
    ops: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write a micro-step pipeline trace of a short representative run.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Operations per campaign.
    #[arg(long, default_value_t = 10_000)]
    ops: usize,
    /// Tree levels of the queue under test.
    #[arg(long, default_value_t = 6)]
    levels: u8,
    /// naive, memopt or both.
    #[arg(long, default_value = "both")]
    variant: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let result = match cli.command {
        Command::Segment(args) => segment(args),
        Command::Bench(args) => bench(args),
        Command::Fuzz(args) => fuzz(args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn segment(args: SegmentArgs) -> Result<(), CliError> {
    let mut config = RunConfig::default();
    if let Some(path) = &args.config {
        config.apply_file(path).map_err(CliError::Usage)?;
    }
    if let Some(image) = args.image {
        config.image = Some(image);
    }
    if let Some(duration) = args.duration_ms {
        config.duration_ms = duration;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(queue) = &args.queue {
        config.queue = config::QueueChoice::parse(queue).map_err(CliError::Usage)?;
    }
    if let Some(eps) = args.eps {
        config.eps_ticks = eps;
    }
    if let Some(out) = args.out {
        config.out = out;
    }
    if let Some(stats) = args.stats {
        config.stats = Some(stats);
    }
    if let Some(trace) = args.trace {
        config.trace = Some(trace);
    }
    if args.accounting {
        config.accounting = true;
    }
    if args.timing {
        config.timing = true;
    }
    commands::run_segmentation(&config)
}

fn bench(args: BenchArgs) -> Result<(), CliError> {
    if args.k == 0 {
        return Err(CliError::Usage("comparator width must be positive".into()));
    }
    let options = BenchOptions {
        out: args.out,
        sizes: commands::parse_sizes(&args.sizes)?,
        workloads: commands::parse_workloads(&args.workload)?,
        comparator_width: args.k,
        ops: args.ops,
        seed: args.seed,
        trace: args.trace,
    };
    commands::run_bench(&options)
}

fn fuzz(args: FuzzArgs) -> Result<(), CliError> {
    let options = FuzzOptions {
        seed: args.seed,
        ops: args.ops,
        levels: args.levels,
        variants: commands::parse_variants(&args.variant)?,
    };
    commands::run_fuzz(&options)
}
