//! Batch runs over (graph, initial layout) cells with an improvement report.

use std::path::{Path, PathBuf};

use gdlayout_core::graph::shortest_paths;
use gdlayout_core::{
    random_layout, run, CriterionId, DistanceMatrix, Layout, OptimizerConfig, Qualities, WeightSchedule, Weights,
};
use rayon::prelude::*;

use crate::io::{self, IoError, NamedGraph, QualityReport};

/// What to optimize in every cell.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Plan {
    /// One run under a shared schedule; every criterion is judged on it.
    Schedule(WeightSchedule),
    /// Nine runs, each optimizing a single criterion with weight 1. Each
    /// criterion is judged on its own run.
    PerCriterion,
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub graph_name: String,
    pub init_name: String,
    pub graph: NamedGraph,
    pub init: Layout,
}

/// Reads `*.json` graphs from `graphs` and, for a graph `g`, the `*.json`
/// layouts in `inits/g/`. Missing directories count as empty. Each graph
/// additionally gets one random init per seed in `random_seeds`, named
/// `random-<seed>`. Cells are ordered by graph name, then init name.
pub fn load_cells(graphs: &Path, inits: Option<&Path>, random_seeds: &[u64]) -> Result<Vec<Cell>, IoError> {
    let mut cells = Vec::new();
    for (graph_name, path) in json_files(graphs)? {
        let graph = io::read_graph(&io::read_file(&path)?)
            .map_err(|e| IoError::field(path.display().to_string(), e.to_string()))?;
        let mut named_inits = Vec::new();
        if let Some(dir) = inits {
            for (init_name, path) in json_files(&dir.join(&graph_name))? {
                let (layout, _) = io::read_layout_for(&io::read_file(&path)?, &graph.graph)
                    .map_err(|e| IoError::field(path.display().to_string(), e.to_string()))?;
                named_inits.push((init_name, layout));
            }
        }
        for &seed in random_seeds {
            named_inits.push((format!("random-{seed}"), random_layout(graph.graph.node_count(), seed)));
        }
        named_inits.sort_by(|a, b| a.0.cmp(&b.0));
        for (init_name, init) in named_inits {
            cells.push(Cell { graph_name: graph_name.clone(), init_name, graph: graph.clone(), init });
        }
    }
    Ok(cells)
}

fn json_files(dir: &Path) -> Result<Vec<(String, PathBuf)>, IoError> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let entries = std::fs::read_dir(dir).map_err(|source| IoError::File { path: dir.to_owned(), source })?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|source| IoError::File { path: dir.to_owned(), source })?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.push((stem.to_string(), path));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Runs every cell, in parallel, and reports final against initial qualities.
pub fn compare(cells: &[Cell], plan: &Plan, config: &OptimizerConfig) -> Result<Vec<QualityReport>, IoError> {
    cells.par_iter().map(|cell| run_cell(cell, plan, config)).collect()
}

pub fn run_cell(cell: &Cell, plan: &Plan, config: &OptimizerConfig) -> Result<QualityReport, IoError> {
    let g = &cell.graph.graph;
    let d = shortest_paths(g)?;
    let initial = qualities(&d, cell, &cell.init, config)?;
    let mut report = QualityReport {
        graph: cell.graph_name.clone(),
        source: cell.init_name.clone(),
        qualities: Qualities::default(),
        baseline: Some(initial),
        failed: Vec::new(),
    };
    match plan {
        Plan::Schedule(schedule) => {
            let (layout, ok) = final_layout(cell, schedule, config);
            report.qualities = qualities(&d, cell, &layout, config)?;
            if !ok {
                report.failed = CriterionId::ALL.to_vec();
            }
        }
        Plan::PerCriterion => {
            for c in CriterionId::ALL {
                let (layout, ok) = final_layout(cell, &WeightSchedule::constant(Weights::single(c, 1.0)), config);
                let q = gdlayout_core::criteria::quality(c, g, &d, &layout, config.np, &config.hyper)?;
                report.qualities.set(c, q);
                if !ok {
                    report.failed.push(c);
                }
            }
        }
    }
    Ok(report)
}

fn final_layout(cell: &Cell, schedule: &WeightSchedule, config: &OptimizerConfig) -> (Layout, bool) {
    match run(&cell.graph.graph, &cell.init, schedule, config) {
        Ok(out) => (out.layout, true),
        Err(failure) => (failure.layout, false),
    }
}

fn qualities(d: &DistanceMatrix, cell: &Cell, layout: &Layout, config: &OptimizerConfig) -> Result<Qualities, IoError> {
    Ok(gdlayout_core::criteria::all_qualities(&cell.graph.graph, d, layout, config.np, &config.hyper)?)
}
