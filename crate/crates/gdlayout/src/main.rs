use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gdlayout::compare::{self, Plan};
use gdlayout::io::{self, IoError, LayoutMeta, NamedGraph, QualityReport, SvgOptions};
use gdlayout::settings::{FamilySpec, RunSettings};
use gdlayout_core::graph::shortest_paths;
use gdlayout_core::{criteria, random_layout, run, Error, Graph, OptimizerConfig, WeightSchedule};
use serde_json::json;

/// Graph layout by gradient descent on weighted readability criteria.
#[derive(Debug, Parser)]
#[command(name = "gdlayout", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a generated graph family as a graph file.
    Generate {
        #[command(flatten)]
        family: FamilySpec,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimize a layout.
    Layout(LayoutArgs),
    /// Compute the nine quality measures of a layout.
    Eval {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        layout: PathBuf,
        /// `.csv` for CSV, anything else for JSON. Defaults to JSON on stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Batch-optimize every (graph, initial layout) pair and report improvements.
    Compare(CompareArgs),
    /// Run the interactive session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
    },
}

#[derive(Debug, Args)]
struct Tuning {
    #[arg(long, default_value_t = RunSettings::default().iters)]
    iters: usize,
    #[arg(long, default_value_t = RunSettings::default().lr)]
    lr: f64,
    /// `full` or `stochastic`.
    #[arg(long, default_value = "full")]
    mode: String,
    /// Terms per criterion sampled in stochastic mode.
    #[arg(long, default_value_t = RunSettings::default().batch)]
    batch: usize,
}

impl Tuning {
    fn config(&self, seed: u64) -> Result<OptimizerConfig, CliError> {
        RunSettings { seed, iters: self.iters, lr: self.lr, mode: self.mode.clone(), batch: self.batch }
            .config()
            .map_err(CliError::Usage)
    }
}

#[derive(Debug, Args)]
struct LayoutArgs {
    #[arg(long)]
    graph: PathBuf,
    /// `random` or a layout file.
    #[arg(long, default_value = "random")]
    init: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Constant weights, e.g. `ST=1,CN=0.5`.
    #[arg(long, conflicts_with = "schedule", required_unless_present = "schedule")]
    weights: Option<String>,
    /// Schedule file: `{"ST": [[0, 1]], "CN": [[999, 0], [1000, 100]]}`.
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
    /// Layout file to write. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Color SVG edges by their deviation from the ideal length.
    #[arg(long)]
    color_edges: bool,
    /// Loss trace as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = OptimizerConfig::default().snapshot_every)]
    snapshot_every: usize,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    graphs: PathBuf,
    /// Holds `<graph name>/<init name>.json` layouts.
    #[arg(long)]
    inits: Option<PathBuf>,
    /// Also start every graph from `random_layout(n, seed)` for each seed.
    #[arg(long, value_delimiter = ',')]
    random_seeds: Vec<u64>,
    #[arg(long, conflicts_with = "per_criterion", required_unless_present = "per_criterion")]
    schedule: Option<PathBuf>,
    /// Run each criterion on its own and judge it on that run.
    #[arg(long)]
    per_criterion: bool,
    #[command(flatten)]
    tuning: Tuning,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `.json` for JSON, anything else for CSV. Defaults to CSV on stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate { family, out } => {
            let family = family.to_family().map_err(CliError::Usage)?;
            let g = Graph::generate(family).map_err(|e| CliError::Usage(e.to_string()))?;
            emit(out.as_deref(), &io::write_graph(&NamedGraph::from(g)))
        }
        Command::Layout(args) => layout(args),
        Command::Eval { graph, layout, out } => {
            let g = read_graph(&graph)?;
            let (x, _) = io::read_layout_for(&io::read_file(&layout)?, &g.graph)?;
            let d = shortest_paths(&g.graph).map_err(|e| CliError::Io(e.to_string()))?;
            let c = OptimizerConfig::default();
            let q =
                criteria::all_qualities(&g.graph, &d, &x, c.np, &c.hyper).map_err(|e| CliError::Io(e.to_string()))?;
            let report = QualityReport {
                graph: stem(&graph),
                source: stem(&layout),
                qualities: q,
                baseline: None,
                failed: vec![],
            };
            emit_report(out.as_deref(), &[report], false)
        }
        Command::Compare(args) => {
            let plan = match &args.schedule {
                Some(path) => Plan::Schedule(io::read_schedule(&io::read_file(path)?)?),
                None => Plan::PerCriterion,
            };
            let config = args.tuning.config(args.seed)?;
            let cells = compare::load_cells(&args.graphs, args.inits.as_deref(), &args.random_seeds)?;
            let reports = compare::compare(&cells, &plan, &config)?;
            emit_report(args.out.as_deref(), &reports, true)
        }
        Command::Serve { addr } => {
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
            eprintln!("listening on {addr}");
            runtime.block_on(gdlayout::service::serve(&addr)).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn layout(args: LayoutArgs) -> Result<(), CliError> {
    let g = read_graph(&args.graph)?;
    let schedule = match (&args.weights, &args.schedule) {
        (Some(w), _) => WeightSchedule::constant(io::parse_weights(w).map_err(|e| CliError::Usage(e.to_string()))?),
        (None, Some(path)) => io::read_schedule(&io::read_file(path)?)?,
        (None, None) => unreachable!("clap requires one of them"),
    };
    if schedule.is_empty() {
        return Err(CliError::Usage("no active criteria".into()));
    }
    let init = match args.init.as_str() {
        "random" => random_layout(g.graph.node_count(), args.seed),
        path => io::read_layout_for(&io::read_file(Path::new(path))?, &g.graph)?.0,
    };
    let config = OptimizerConfig { snapshot_every: args.snapshot_every, ..args.tuning.config(args.seed)? };
    let out = match run(&g.graph, &init, &schedule, &config) {
        Ok(out) => out,
        Err(failure) => {
            return Err(match failure.error {
                Error::InvalidGraph(_) | Error::DisconnectedGraph(_) | Error::LayoutSizeMismatch { .. } => {
                    CliError::Io(failure.error.to_string())
                }
                Error::InvalidParameter(_) | Error::KOutOfRange { .. } => CliError::Usage(failure.error.to_string()),
                e => CliError::Numerical(e.to_string()),
            })
        }
    };
    if let Some(path) = &args.trace {
        let entries: Vec<_> = out
            .trace
            .entries
            .iter()
            .map(|e| {
                json!({
                    "iteration": e.iteration,
                    "total": e.total,
                    "losses": io::CriterionMap::from_options(&e.losses),
                })
            })
            .collect();
        let stop = match out.stop {
            gdlayout_core::StopReason::Converged => "converged",
            gdlayout_core::StopReason::IterationLimit => "iteration_limit",
        };
        let doc = json!({ "iterations": out.iterations, "stop": stop, "entries": entries });
        io::write_file(path, &serde_json::to_vec_pretty(&doc).expect("traces always serialize"))?;
    }
    if let Some(path) = &args.svg {
        let options = SvgOptions { edge_color_by_length: args.color_edges };
        io::write_file(path, &io::export_svg(&g.graph, &out.layout, options))?;
    }
    let meta = LayoutMeta::new(args.seed, out.iterations, &schedule);
    emit(args.out.as_deref(), &io::write_layout(&out.layout, Some(&meta)))
}

fn read_graph(path: &Path) -> Result<NamedGraph, CliError> {
    io::read_graph(&io::read_file(path)?).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => Ok(io::write_file(path, bytes)?),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn emit_report(out: Option<&Path>, reports: &[QualityReport], csv_by_default: bool) -> Result<(), CliError> {
    let ext = out.and_then(|p| p.extension()).map(|e| e.to_string_lossy().to_ascii_lowercase());
    let csv = match ext.as_deref() {
        Some("csv") => true,
        Some("json") => false,
        _ => csv_by_default,
    };
    let bytes = if csv { io::write_report_csv(reports) } else { io::write_report_json(reports) };
    emit(out, &bytes)
}
