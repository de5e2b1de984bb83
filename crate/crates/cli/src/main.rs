//! `hfc-refine`: refine a k-way partition of an hMetis hypergraph with
//! flow-based pair refinement.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use hfc_core::{
    connectivity_metric, greedy_initial_partition, imbalance, is_balanced, max_block_weight, parse_hmetis, parse_partition,
    refine_kway, write_partition, HfcConfig, Hypergraph, ParseError, Partition, RefineConfig, RefineStats, SizeConstraint,
    Weight,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    /// Flow problems limited to a fifth of each block.
    Hfc,
    /// Flow problems limited by `(1 + 16 eps) * ceil(total / k)` minus the opposite block.
    HfcStar,
}

#[derive(Debug, Parser)]
#[command(name = "hfc-refine", version, about = "Flow-based refinement of hypergraph partitions")]
struct Args {
    /// Hypergraph in hMetis format.
    #[arg(long)]
    hypergraph: PathBuf,
    /// Number of blocks.
    #[arg(short = 'k')]
    k: usize,
    /// Allowed imbalance.
    #[arg(short = 'e', default_value_t = 0.03)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Hfc)]
    mode: Mode,
    /// Start from this partition instead of a generated one.
    #[arg(long)]
    input_partition: Option<PathBuf>,
    #[arg(long)]
    output_partition: Option<PathBuf>,
    /// Write a one-line JSON report.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Include wall-clock times in the report. Makes it non-reproducible.
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    no_iso_dp: bool,
    #[arg(long)]
    no_distance: bool,
    #[arg(long)]
    no_mbc: bool,
    #[arg(long, default_value_t = 7)]
    mbc_repetitions: usize,
    /// Input partitions may exceed the imbalance by this much; refinement
    /// then tries to repair them.
    #[arg(long, default_value_t = 0.1)]
    repair_tolerance: f64,
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Parse(String),
    InfeasibleK(String),
    Imbalanced(String),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Parse(_) => 2,
            Failure::InfeasibleK(_) => 3,
            Failure::Imbalanced(_) => 4,
            Failure::Invariant(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Parse(m) | Failure::InfeasibleK(m) | Failure::Imbalanced(m) | Failure::Invariant(m) => m,
        }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::Io(e) => Failure::Io(e.to_string()),
            e => Failure::Parse(e.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
struct Timings {
    read_ms: f64,
    initial_ms: f64,
    refine_ms: f64,
    total_ms: f64,
}

#[derive(Debug, Serialize)]
struct Report {
    hypergraph: String,
    vertices: usize,
    hyperedges: usize,
    k: usize,
    epsilon: f64,
    seed: u64,
    mode: Mode,
    iso_dp: bool,
    distance_piercing: bool,
    most_balanced_cut: bool,
    mbc_repetitions: usize,
    input_partition: bool,
    initial_connectivity: Weight,
    final_connectivity: Weight,
    initial_imbalance: f64,
    final_imbalance: f64,
    balanced: bool,
    rounds: usize,
    flow_problems: u64,
    improvements: u64,
    infeasible_flow_problems: u64,
    flow_computations: u64,
    pierce_steps: u64,
    dp_activations: u64,
    mbc_steps: u64,
    mbc_improvements: u64,
    flow_problem_vertices: u64,
    max_flow_problem_vertices: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<Timings>,
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Generated start partition: the most balanced of a few attempts.
fn initial_partition(hg: &Hypergraph, args: &Args) -> Result<Partition, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut best: Option<Partition> = None;
    for _ in 0..16 {
        let p = greedy_initial_partition(hg, args.k, &mut rng).map_err(|e| Failure::InfeasibleK(e.to_string()))?;
        if is_balanced(hg, &p, args.epsilon) {
            return Ok(p);
        }
        if best.as_ref().map_or(true, |b| p.max_block_weight() < b.max_block_weight()) {
            best = Some(p);
        }
    }
    Ok(best.expect("at least one attempt"))
}

fn run(args: &Args) -> Result<(), Failure> {
    let start = Instant::now();
    if !(args.epsilon >= 0.0 && args.epsilon.is_finite()) {
        return Err(Failure::Parse(format!("epsilon must be a non-negative number, got {}", args.epsilon)));
    }
    if !(args.repair_tolerance >= 0.0 && args.repair_tolerance.is_finite()) {
        return Err(Failure::Parse(format!("repair tolerance must be non-negative, got {}", args.repair_tolerance)));
    }
    let hg = parse_hmetis(open(&args.hypergraph)?)?;
    let n = hg.num_vertices();
    if args.k < 2 || args.k > n {
        return Err(Failure::InfeasibleK(format!("cannot split {n} vertices into {} blocks", args.k)));
    }
    let limit = max_block_weight(hg.total_vertex_weight(), args.k, args.epsilon);
    if let Some(v) = hg.vertices().find(|&v| hg.vertex_weight(v) > limit) {
        return Err(Failure::InfeasibleK(format!(
            "vertex {} has weight {} above the block limit {limit}",
            v + 1,
            hg.vertex_weight(v)
        )));
    }
    let read_ms = ms(start);

    let phase = Instant::now();
    let mut p = match &args.input_partition {
        Some(path) => {
            let p = parse_partition(open(path)?, &hg, args.k)?;
            if !is_balanced(&hg, &p, args.epsilon + args.repair_tolerance) {
                return Err(Failure::Imbalanced(format!(
                    "input partition has imbalance {:.4}, allowed {} + {}",
                    imbalance(&hg, &p),
                    args.epsilon,
                    args.repair_tolerance
                )));
            }
            p
        }
        None => initial_partition(&hg, args)?,
    };
    let initial_ms = ms(phase);
    let initial_connectivity = connectivity_metric(&hg, &p);
    let initial_imbalance = imbalance(&hg, &p);
    let was_balanced = is_balanced(&hg, &p, args.epsilon);

    let config = RefineConfig {
        epsilon: args.epsilon,
        constraint: match args.mode {
            Mode::Hfc => SizeConstraint::Fifth,
            Mode::HfcStar => SizeConstraint::Relaxed,
        },
        hfc: HfcConfig {
            isolated_dp: !args.no_iso_dp,
            distance_piercing: !args.no_distance,
            most_balanced_cut: !args.no_mbc,
            mbc_repetitions: args.mbc_repetitions,
            ..HfcConfig::default()
        },
        seed: args.seed,
        ..RefineConfig::default()
    };
    let phase = Instant::now();
    let stats: RefineStats = panic::catch_unwind(AssertUnwindSafe(|| refine_kway(&hg, &mut p, &config)))
        .map_err(|e| Failure::Invariant(format!("refinement aborted: {}", panic_message(&e))))?;
    let refine_ms = ms(phase);

    let mut bytes = Vec::new();
    write_partition(&p, &mut bytes).map_err(|e| Failure::Io(e.to_string()))?;
    // Check the written form, not the in-memory one.
    let reread = parse_partition(bytes.as_slice(), &hg, args.k)
        .map_err(|e| Failure::Invariant(format!("written partition does not parse: {e}")))?;
    let final_connectivity = connectivity_metric(&hg, &reread);
    let balanced = is_balanced(&hg, &reread, args.epsilon);
    if final_connectivity != initial_connectivity - stats.total_gain {
        return Err(Failure::Invariant(format!(
            "connectivity {final_connectivity} but {initial_connectivity} - gain {} expected",
            stats.total_gain
        )));
    }
    if final_connectivity > initial_connectivity || (was_balanced && !balanced) {
        return Err(Failure::Invariant("refinement made the partition worse".into()));
    }
    if !stats.audit_failures.is_empty() {
        return Err(Failure::Invariant(stats.audit_failures.join("; ")));
    }

    if let Some(path) = &args.output_partition {
        std::fs::write(path, &bytes).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = &args.stats {
        let report = Report {
            hypergraph: args.hypergraph.display().to_string(),
            vertices: n,
            hyperedges: hg.num_edges(),
            k: args.k,
            epsilon: args.epsilon,
            seed: args.seed,
            mode: args.mode,
            iso_dp: !args.no_iso_dp,
            distance_piercing: !args.no_distance,
            most_balanced_cut: !args.no_mbc,
            mbc_repetitions: args.mbc_repetitions,
            input_partition: args.input_partition.is_some(),
            initial_connectivity,
            final_connectivity,
            initial_imbalance,
            final_imbalance: imbalance(&hg, &reread),
            balanced,
            rounds: stats.rounds,
            flow_problems: stats.flow_problems,
            improvements: stats.improvements,
            infeasible_flow_problems: stats.infeasible,
            flow_computations: stats.flow_computations,
            pierce_steps: stats.pierce_steps,
            dp_activations: stats.dp_activations,
            mbc_steps: stats.mbc_steps,
            mbc_improvements: stats.mbc_improvements,
            flow_problem_vertices: stats.flow_problem_vertices,
            max_flow_problem_vertices: stats.max_flow_problem_vertices,
            timings: args.timings.then(|| Timings {
                read_ms,
                initial_ms,
                refine_ms,
                total_ms: ms(start),
            }),
        };
        let file = File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let mut out = BufWriter::new(file);
        serde_json::to_writer(&mut out, &report).map_err(|e| Failure::Io(e.to_string()))?;
        writeln!(out).and_then(|_| out.flush()).map_err(|e| Failure::Io(e.to_string()))?;
    }
    Ok(())
}

fn panic_message(payload: &Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<String>()
        .cloned()
        .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown panic".into())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hfc-refine: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
