//! Subcommand implementations.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use odlm::{levels_for, Engine, EngineConfig, PixelGrid, RunStats, SegmentMap};
use shq::bench::{sweep, Structure, Workload};
use shq::fuzz::{fuzz_compare, FuzzConfig, Variant};
use shq::pipeline::{PipelineSim, QueueOp};
use shq::{Element, EventQueue, MemOptShq, NaiveShq};

use crate::config::{QueueChoice, RunConfig};
use crate::netpbm;
use crate::palette;

/// Command failures, split by exit status: usage errors exit 1, runtime
/// errors exit 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

#[derive(Serialize)]
struct StatsJson<'a> {
    image: &'a str,
    width: u32,
    height: u32,
    queue: String,
    seed: u64,
    duration_ms: f64,
    duration_ticks: u64,
    tick_seconds: f64,
    period_ticks: u64,
    eps_ticks: u64,
    events: u64,
    neuron_updates: u64,
    clamps: u64,
    dt_clamps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    queue_cycles: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cycles_per_update: Option<u64>,
    segments: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<f64>,
}

struct SegOutcome {
    stats: RunStats,
    map: SegmentMap,
    duration_ticks: u64,
    tick_seconds: f64,
    period_ticks: u64,
}

fn run_engine<Q: EventQueue>(
    image: &PixelGrid,
    config: &RunConfig,
    queue: Q,
) -> Result<SegOutcome, CliError> {
    let engine_config = EngineConfig {
        seed: config.seed,
        weight_form: config.weight_form,
        queue_cycle_accounting: config.accounting,
    };
    let mut engine = Engine::new(image, &config.params, &engine_config, queue)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let duration_ticks =
        (config.duration_ms / 1000.0 / engine.clock().tick_seconds).floor() as u64;
    let stats = engine
        .run_until(duration_ticks)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let map = engine.extract_segments(config.eps_ticks);
    Ok(SegOutcome {
        stats,
        map,
        duration_ticks,
        tick_seconds: engine.clock().tick_seconds,
        period_ticks: engine.period_ticks(),
    })
}

pub fn run_segmentation(config: &RunConfig) -> Result<(), CliError> {
    config.validate().map_err(CliError::Usage)?;
    let image_path = config
        .image
        .clone()
        .ok_or_else(|| CliError::Usage("an input image is required (--image)".into()))?;
    let started = Instant::now();
    let image = netpbm::read_pgm(&image_path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", image_path.display())))?;

    let levels = levels_for(image.len());
    let outcome = match config.queue {
        QueueChoice::Naive => {
            let queue = NaiveShq::with_levels(levels)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            run_engine(&image, config, queue)?
        }
        QueueChoice::Memopt => {
            let queue = MemOptShq::with_levels(levels)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            run_engine(&image, config, queue)?
        }
        QueueChoice::Oracle => {
            run_engine(&image, config, shq::oracle::OracleQueue::new())?
        }
    };

    let rgb = palette::render_labels(&outcome.map.labels);
    netpbm::write_ppm(&config.out, image.width(), image.height(), &rgb)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", config.out.display())))?;

    if let Some(trace_path) = &config.trace {
        write_label_csv(trace_path, &image, &outcome.map)?;
    }

    if let Some(stats_path) = &config.stats {
        let stats = StatsJson {
            image: image_path.to_str().unwrap_or("<non-utf8>"),
            width: image.width(),
            height: image.height(),
            queue: config.queue.to_string(),
            seed: config.seed,
            duration_ms: config.duration_ms,
            duration_ticks: outcome.duration_ticks,
            tick_seconds: outcome.tick_seconds,
            period_ticks: outcome.period_ticks,
            eps_ticks: config.eps_ticks,
            events: outcome.stats.events,
            neuron_updates: outcome.stats.neuron_updates,
            clamps: outcome.stats.clamps,
            dt_clamps: outcome.stats.dt_clamps,
            queue_cycles: outcome.stats.queue_cycles,
            cycles_per_update: outcome.stats.cycles_per_update,
            segments: outcome.map.segment_count,
            wall_ms: config.timing.then(|| started.elapsed().as_secs_f64() * 1000.0),
        };
        let json = serde_json::to_string_pretty(&stats)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        fs::write(stats_path, json + "\n")
            .map_err(|e| CliError::Runtime(format!("{}: {e}", stats_path.display())))?;
    }

    println!(
        "segmented {} ({}x{}) into {} segments; {} events, {} updates",
        image_path.display(),
        image.width(),
        image.height(),
        outcome.map.segment_count,
        outcome.stats.events,
        outcome.stats.neuron_updates,
    );
    Ok(())
}

fn write_label_csv(path: &PathBuf, image: &PixelGrid, map: &SegmentMap) -> Result<(), CliError> {
    let mut csv = String::from("x,y,label\n");
    for y in 0..image.height() {
        for x in 0..image.width() {
            let label = map.labels[(y * image.width() + x) as usize];
            let _ = writeln!(csv, "{x},{y},{label}");
        }
    }
    fs::write(path, csv).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

pub struct BenchOptions {
    pub out: Option<PathBuf>,
    pub sizes: Vec<u64>,
    pub workloads: Vec<Workload>,
    pub comparator_width: u64,
    pub ops: usize,
    pub seed: u64,
    pub trace: Option<PathBuf>,
}

pub fn parse_sizes(raw: &str) -> Result<Vec<u64>, CliError> {
    let sizes: Result<Vec<u64>, _> = raw.split(',').map(|s| s.trim().parse::<u64>()).collect();
    let mut sizes = sizes.map_err(|_| CliError::Usage(format!("bad size list {raw:?}")))?;
    sizes.sort_unstable();
    Ok(sizes)
}

pub fn parse_workloads(raw: &str) -> Result<Vec<Workload>, CliError> {
    match raw {
        "all" => Ok(vec![Workload::DeleteInsert, Workload::Insert, Workload::FindMin]),
        "delete-insert" => Ok(vec![Workload::DeleteInsert]),
        "insert" => Ok(vec![Workload::Insert]),
        "find-min" => Ok(vec![Workload::FindMin]),
        "read-top" => Ok(vec![Workload::ReadTop]),
        other => Err(CliError::Usage(format!(
            "unknown workload {other:?}: expected delete-insert, insert, find-min, read-top or all"
        ))),
    }
}

pub fn run_bench(options: &BenchOptions) -> Result<(), CliError> {
    let structures = [Structure::Shq, Structure::Scan { width: options.comparator_width }];
    let mut csv = String::new();
    for (i, &workload) in options.workloads.iter().enumerate() {
        let report = sweep(&structures, &options.sizes, workload, options.ops, options.seed);
        let rendered = report.to_csv();
        if i == 0 {
            csv.push_str(&rendered);
        } else {
            // Drop the repeated header.
            csv.extend(rendered.lines().skip(1).map(|l| format!("{l}\n")));
        }
    }
    match &options.out {
        Some(path) => fs::write(path, &csv)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?,
        None => print!("{csv}"),
    }

    if let Some(trace_path) = &options.trace {
        let trace = representative_trace(options.seed);
        fs::write(trace_path, trace)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", trace_path.display())))?;
    }
    Ok(())
}

/// Micro-step trace of a short delete-insert run, for inspection.
fn representative_trace(seed: u64) -> String {
    let mut tree = NaiveShq::with_levels(4).expect("static levels");
    for id in 0..4u32 {
        tree.insert(Element::new(id, 100 + id as u64)).unwrap();
    }
    let mut sim = PipelineSim::new(tree);
    for i in 0..4u64 {
        let id = ((seed + i) % 4) as u32;
        sim.submit(QueueOp::DeleteInsert { id, new_key: 200 + i }).unwrap();
    }
    sim.run_until_drained();
    sim.trace_csv()
}

pub struct FuzzOptions {
    pub seed: u64,
    pub ops: usize,
    pub levels: u8,
    pub variants: Vec<Variant>,
}

pub fn parse_variants(raw: &str) -> Result<Vec<Variant>, CliError> {
    match raw {
        "naive" => Ok(vec![Variant::Naive]),
        "memopt" => Ok(vec![Variant::Memopt]),
        "both" => Ok(vec![Variant::Naive, Variant::Memopt]),
        other => Err(CliError::Usage(format!(
            "unknown variant {other:?}: expected naive, memopt or both"
        ))),
    }
}

pub fn run_fuzz(options: &FuzzOptions) -> Result<(), CliError> {
    let mut failures = 0;
    for &variant in &options.variants {
        let report = fuzz_compare(&FuzzConfig {
            seed: options.seed,
            op_count: options.ops,
            levels: options.levels,
            variant,
        });
        println!("{report}");
        if !report.is_success() {
            failures += 1;
        }
    }
    if failures > 0 {
        return Err(CliError::Runtime(format!("{failures} fuzz campaign(s) diverged")));
    }
    Ok(())
}
