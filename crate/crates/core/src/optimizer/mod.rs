//! Weighted-sum objective and the descent loop.
//!
//! Each iteration evaluates the weight schedule, refreshes the crossing set
//! and fits the crossing separators when a crossing criterion is active,
//! then moves every node by `−lr · ∇(Σ_c w_c L_c)`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::criteria::{self, crossings, CriterionId, CrossingSeparators, Hyper, LossResult, NpConfig, Qualities};
use crate::geometry::{detect_crossings, incident_pairs, CrossingPair, Layout, Vec2};
use crate::graph::{shortest_paths, DistanceMatrix, Graph};
use crate::{Error, Result};

mod schedule;

pub use self::schedule::{WeightSchedule, Weights};

/// Crossing detection runs every iteration up to this many edges, and every
/// [`CROSSING_REFRESH_PERIOD`] iterations above it.
pub const CROSSING_REFRESH_EDGE_LIMIT: usize = 200;
pub const CROSSING_REFRESH_PERIOD: usize = 10;
/// A run has converged once no coordinate moves more than this ...
pub const STALL_DISPLACEMENT: f64 = 1e-7;
/// ... for this many consecutive active iterations after the last schedule
/// breakpoint.
pub const STALL_ITERATIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Every term of every active criterion, every step.
    #[default]
    Full,
    /// `batch` terms sampled with replacement per decomposable criterion,
    /// scaled by `terms / batch`. IL, NP and AR are always evaluated in full.
    Stochastic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub lr: f64,
    pub iters: usize,
    pub mode: Mode,
    pub batch: usize,
    pub seed: u64,
    /// Multiplicative learning-rate decay per iteration, in `(0, 1]`.
    pub lr_decay: f64,
    /// Trace recording period.
    pub snapshot_every: usize,
    /// Separator updates per iteration.
    pub m_steps: usize,
    pub hyper: Hyper,
    pub np: NpConfig,
    /// Keep a copy of the layout in every trace entry.
    pub record_layouts: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            lr: 0.05,
            iters: 2000,
            mode: Mode::Full,
            batch: 32,
            seed: 0,
            lr_decay: 0.999,
            snapshot_every: 10,
            m_steps: crossings::DEFAULT_M_STEPS,
            hyper: Hyper::default(),
            np: NpConfig::default(),
            record_layouts: false,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("learning rate must be positive");
        }
        if self.iters == 0 {
            return bad("iteration count must be at least 1");
        }
        if self.batch == 0 {
            return bad("batch size must be at least 1");
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return bad("learning-rate decay must be in (0, 1]");
        }
        if self.snapshot_every == 0 {
            return bad("snapshot period must be at least 1");
        }
        self.hyper.validate()
    }
}

/// Auxiliary state carried between iterations by the crossing criteria.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CriterionStates {
    pub separators: CrossingSeparators,
    /// Crossing set the crossing losses run over. `None` means detect afresh.
    pub crossings: Option<Vec<CrossingPair>>,
}

/// Per-criterion loss values of one evaluation; `None` for skipped criteria.
pub type CriterionLosses = [Option<f64>; 9];

/// Full weighted objective: `Σ_c w_c L_c` and its gradient. Criteria with
/// zero weight are not evaluated at all.
pub fn total_loss_and_grad(
    g: &Graph,
    d: &DistanceMatrix,
    layout: &Layout,
    weights: &Weights,
    states: &CriterionStates,
    hyper: &Hyper,
    np: NpConfig,
) -> Result<(LossResult, CriterionLosses)> {
    weights.validate()?;
    let detected;
    let pairs: &[CrossingPair] = match &states.crossings {
        Some(p) => p,
        None => {
            detected = if CriterionId::ALL.iter().any(|c| c.uses_crossings() && weights.get(*c) > 0.0) {
                detect_crossings(g, layout)
            } else {
                Vec::new()
            };
            &detected
        }
    };
    let mut total = LossResult::zero(g.node_count());
    let mut losses = [None; 9];
    for (c, w) in weights.active() {
        let r = evaluate(c, g, d, layout, pairs, &states.separators, hyper, np)?;
        total.value += w * r.value;
        for (acc, g) in total.grad.iter_mut().zip(&r.grad) {
            *acc += w * *g;
        }
        losses[c.index()] = Some(r.value);
    }
    Ok((total, losses))
}

/// One criterion's full loss, crossing criteria over the given pairs.
#[allow(clippy::too_many_arguments)]
pub fn evaluate(
    c: CriterionId,
    g: &Graph,
    d: &DistanceMatrix,
    layout: &Layout,
    pairs: &[CrossingPair],
    seps: &CrossingSeparators,
    hyper: &Hyper,
    np: NpConfig,
) -> Result<LossResult> {
    match c {
        CriterionId::Stress => criteria::loss_stress(g, d, layout),
        CriterionId::IdealEdgeLength => criteria::loss_ideal_edge_length(g, layout),
        CriterionId::NeighborhoodPreservation => criteria::loss_neighborhood(g, layout, np),
        CriterionId::Crossings => crossings::loss_over(g, layout, pairs, seps),
        CriterionId::CrossingAngle => criteria::crossing_angle::loss_over(g, layout, pairs),
        CriterionId::AspectRatio => criteria::loss_aspect_ratio(layout, hyper),
        CriterionId::AngularResolution => criteria::loss_angular_resolution(g, layout, hyper),
        CriterionId::VertexResolution => criteria::loss_vertex_resolution(layout, hyper),
        CriterionId::Gabriel => criteria::loss_gabriel(g, layout),
    }
}

/// Uniform random layout in the unit square, deterministic per seed.
pub fn random_layout(n: usize, seed: u64) -> Layout {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = (0..n).map(|_| Vec2::new(rng.random::<f64>(), rng.random::<f64>())).collect();
    Layout::new(positions).expect("uniform samples are finite")
}

/// One recorded point of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    /// Weighted total loss.
    pub total: f64,
    pub losses: CriterionLosses,
    pub layout: Option<Layout>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub entries: Vec<TraceEntry>,
}

/// What one [`Optimizer::step`] did.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// Index of the iteration just performed.
    pub iteration: usize,
    pub weights: Weights,
    /// Weighted loss before the move (an estimate in stochastic mode).
    pub total: f64,
    pub losses: CriterionLosses,
    pub max_displacement: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pin {
    at: Vec2,
    remaining: usize,
}

/// A resumable descent over one graph.
///
/// [`run`] drives it to completion; interactive callers step it one
/// iteration at a time and may change weights or move nodes in between.
#[derive(Debug, Clone)]
pub struct Optimizer {
    graph: Graph,
    dist: DistanceMatrix,
    pairs: Vec<(usize, usize)>,
    triples: Vec<(usize, usize, usize)>,
    layout: Layout,
    schedule: WeightSchedule,
    config: OptimizerConfig,
    states: CriterionStates,
    iteration: usize,
    lr: f64,
    rng: ChaCha8Rng,
    stall: usize,
    converged: bool,
    pins: BTreeMap<usize, Pin>,
}

impl Optimizer {
    pub fn new(graph: Graph, layout: Layout, schedule: WeightSchedule, config: OptimizerConfig) -> Result<Self> {
        config.validate()?;
        config.np.validate(graph.node_count())?;
        layout.check_for(&graph)?;
        let dist = shortest_paths(&graph)?;
        let n = graph.node_count();
        let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let triples = incident_pairs(&graph);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(1);
        Ok(Optimizer {
            graph,
            dist,
            pairs,
            triples,
            layout,
            schedule,
            lr: config.lr,
            config,
            states: CriterionStates::default(),
            iteration: 0,
            rng,
            stall: 0,
            converged: false,
            pins: BTreeMap::new(),
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn distances(&self) -> &DistanceMatrix {
        &self.dist
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    /// Number of iterations performed so far.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn learning_rate(&self) -> f64 {
        self.lr
    }

    pub fn separators(&self) -> &CrossingSeparators {
        &self.states.separators
    }

    /// Weights that the next iteration will use.
    pub fn current_weights(&self) -> Weights {
        self.schedule.at(self.iteration)
    }

    /// Replaces the schedule with constant weights from the next iteration on.
    pub fn set_weights(&mut self, weights: Weights) -> Result<()> {
        weights.validate()?;
        self.schedule = WeightSchedule::constant(weights);
        self.converged = false;
        self.stall = 0;
        Ok(())
    }

    pub fn schedule(&self) -> &WeightSchedule {
        &self.schedule
    }

    pub fn set_schedule(&mut self, schedule: WeightSchedule) {
        self.schedule = schedule;
        self.converged = false;
        self.stall = 0;
    }

    /// Moves `node` to `at`. With `hold > 0` the node stays there for the
    /// next `hold` iterations.
    pub fn drag(&mut self, node: usize, at: Vec2, hold: usize) -> Result<()> {
        if node >= self.graph.node_count() {
            return Err(Error::InvalidParameter(alloc::format!("node {node} does not exist")));
        }
        if !at.is_finite() {
            return Err(Error::NonFiniteCoordinate(node));
        }
        self.layout[node] = at;
        if hold > 0 {
            self.pins.insert(node, Pin { at, remaining: hold });
        } else {
            self.pins.remove(&node);
        }
        self.converged = false;
        self.stall = 0;
        Ok(())
    }

    /// Whether the stall criterion has been met.
    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Why the run should stop, if it should.
    pub fn stop_reason(&self) -> Option<StopReason> {
        if self.converged {
            Some(StopReason::Converged)
        } else if self.iteration >= self.config.iters {
            Some(StopReason::IterationLimit)
        } else {
            None
        }
    }

    pub fn qualities(&self) -> Result<Qualities> {
        criteria::all_qualities(&self.graph, &self.dist, &self.layout, self.config.np, &self.config.hyper)
    }

    /// Full-mode losses of the current layout under `weights`, reusing the
    /// current crossing state.
    pub fn evaluate(&self, weights: &Weights) -> Result<(LossResult, CriterionLosses)> {
        total_loss_and_grad(
            &self.graph,
            &self.dist,
            &self.layout,
            weights,
            &self.states,
            &self.config.hyper,
            self.config.np,
        )
    }

    /// Brings the crossing set and separators up to date for `weights`, as
    /// the start of an iteration does.
    pub fn prepare(&mut self, weights: &Weights) {
        self.refresh_crossings(weights);
    }

    fn refresh_crossings(&mut self, weights: &Weights) {
        let wants = CriterionId::ALL.iter().any(|c| c.uses_crossings() && weights.get(*c) > 0.0);
        if !wants {
            self.states.crossings = None;
            return;
        }
        let due = self.graph.edge_count() <= CROSSING_REFRESH_EDGE_LIMIT
            || self.iteration.is_multiple_of(CROSSING_REFRESH_PERIOD)
            || self.states.crossings.is_none();
        if due {
            self.states.crossings = Some(detect_crossings(&self.graph, &self.layout));
        }
        if weights.get(CriterionId::Crossings) > 0.0 {
            let pairs = self.states.crossings.as_deref().unwrap_or(&[]);
            self.states.separators = crossings::fit_over(
                &self.graph,
                &self.layout,
                pairs,
                &self.states.separators,
                self.lr,
                self.config.m_steps,
            );
        }
    }

    fn sampled(&mut self, weights: &Weights) -> Result<(LossResult, CriterionLosses)> {
        let n = self.graph.node_count();
        let batch = self.config.batch;
        let mut total = LossResult::zero(n);
        let mut losses = [None; 9];
        let pairs = self.states.crossings.clone().unwrap_or_default();
        for (c, w) in weights.active() {
            let terms = match c {
                CriterionId::Stress | CriterionId::VertexResolution => self.pairs.len(),
                CriterionId::Gabriel => criteria::gabriel::term_count(&self.graph),
                CriterionId::AngularResolution => self.triples.len(),
                CriterionId::Crossings | CriterionId::CrossingAngle => pairs.len(),
                CriterionId::IdealEdgeLength | CriterionId::NeighborhoodPreservation | CriterionId::AspectRatio => {
                    let r = evaluate(
                        c,
                        &self.graph,
                        &self.dist,
                        &self.layout,
                        &pairs,
                        &self.states.separators,
                        &self.config.hyper,
                        self.config.np,
                    )?;
                    total.value += w * r.value;
                    for (acc, g) in total.grad.iter_mut().zip(&r.grad) {
                        *acc += w * *g;
                    }
                    losses[c.index()] = Some(r.value);
                    continue;
                }
            };
            if terms == 0 {
                losses[c.index()] = Some(0.0);
                continue;
            }
            let scale = terms as f64 / batch as f64;
            let reach = if c == CriterionId::VertexResolution {
                criteria::vertex_resolution::reach(&self.layout, &self.config.hyper)?
            } else {
                0.0
            };
            let mut value = 0.0;
            let grad = &mut total.grad;
            for _ in 0..batch {
                let t = self.rng.random_range(0..terms);
                let x = &self.layout;
                value += match c {
                    CriterionId::Stress => {
                        let (i, j) = self.pairs[t];
                        criteria::stress::stress_term(&self.dist, x, i, j, w * scale, grad)?
                    }
                    CriterionId::VertexResolution => {
                        let (i, j) = self.pairs[t];
                        criteria::vertex_resolution::pair_term(x, i, j, reach, w * scale, grad)
                    }
                    CriterionId::Gabriel => {
                        let (edge, k) = criteria::gabriel::term_at(&self.graph, t);
                        criteria::gabriel::disk_term(x, edge, k, w * scale, grad)?
                    }
                    CriterionId::AngularResolution => criteria::angular_resolution::angle_term(
                        x,
                        self.triples[t],
                        self.config.hyper.sensitivity,
                        w * scale,
                        grad,
                    )?,
                    CriterionId::Crossings => {
                        let pair = pairs[t];
                        let sep = self
                            .states
                            .separators
                            .get(&pair)
                            .ok_or(Error::MissingSeparator(pair.first, pair.second))?;
                        crossings::pair_term(&self.graph, x, pair, sep, w * scale, grad)
                    }
                    CriterionId::CrossingAngle => {
                        criteria::crossing_angle::pair_term(&self.graph, x, pairs[t], w * scale, grad)?
                    }
                    _ => unreachable!("handled above"),
                };
            }
            let estimate = value * scale;
            total.value += w * estimate;
            losses[c.index()] = Some(estimate);
        }
        Ok((total, losses))
    }

    /// Stochastic gradient of the current objective, without moving, over
    /// the crossing state left by the last [`prepare`](Self::prepare) or
    /// step. Advances the sampling RNG.
    pub fn sample_gradient(&mut self, weights: &Weights) -> Result<LossResult> {
        self.sampled(weights).map(|r| r.0)
    }

    /// Performs one iteration.
    pub fn step(&mut self) -> Result<StepReport> {
        let t = self.iteration;
        let weights = self.schedule.at(t);
        if weights.is_idle() {
            self.states.crossings = None;
            self.finish_iteration(0.0, false);
            return Ok(StepReport { iteration: t, weights, total: 0.0, losses: [None; 9], max_displacement: 0.0 });
        }
        self.refresh_crossings(&weights);
        let (result, losses) = match self.config.mode {
            Mode::Full => self.evaluate(&weights)?,
            Mode::Stochastic => self.sampled(&weights)?,
        };
        if !result.value.is_finite() || result.grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NumericalDivergence(t));
        }
        let lr = self.lr;
        let mut moved = 0.0f64;
        for (node, (p, g)) in self.layout.positions_mut().iter_mut().zip(&result.grad).enumerate() {
            if self.pins.contains_key(&node) {
                continue;
            }
            let step = lr * *g;
            moved = moved.max(step.x.abs()).max(step.y.abs());
            *p -= step;
        }
        self.finish_iteration(moved, true);
        Ok(StepReport { iteration: t, weights, total: result.value, losses, max_displacement: moved })
    }

    fn finish_iteration(&mut self, moved: f64, active: bool) {
        let layout = &mut self.layout;
        self.pins.retain(|&node, pin| {
            layout[node] = pin.at;
            pin.remaining -= 1;
            pin.remaining > 0
        });
        self.iteration += 1;
        self.lr *= self.config.lr_decay;
        // Standing still before the schedule has settled is not convergence.
        if active && moved < STALL_DISPLACEMENT && self.iteration > self.schedule.settled_at() {
            self.stall += 1;
        } else {
            self.stall = 0;
        }
        if self.stall >= STALL_ITERATIONS {
            self.converged = true;
        }
    }

    pub fn into_layout(self) -> Layout {
        self.layout
    }
}

/// Result of a completed [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub layout: Layout,
    pub trace: RunTrace,
    pub stop: StopReason,
    pub iterations: usize,
}

/// A run that failed part way, with everything recorded until then.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error}")]
pub struct RunFailure {
    pub error: Error,
    pub trace: RunTrace,
    pub layout: Layout,
}

impl From<Error> for RunFailure {
    fn from(error: Error) -> Self {
        RunFailure { error, trace: RunTrace::default(), layout: Layout::default() }
    }
}

/// Runs the descent from `layout0` until convergence or the iteration cap.
///
/// A trace entry is recorded every `snapshot_every` iterations, plus one
/// for the final layout.
pub fn run(
    g: &Graph,
    layout0: &Layout,
    schedule: &WeightSchedule,
    config: &OptimizerConfig,
) -> core::result::Result<RunOutput, RunFailure> {
    let mut opt = Optimizer::new(g.clone(), layout0.clone(), schedule.clone(), config.clone())?;
    let mut trace = RunTrace::default();
    let stop = loop {
        if let Some(reason) = opt.stop_reason() {
            break reason;
        }
        let before = config.record_layouts.then(|| opt.layout().clone());
        match opt.step() {
            Ok(report) => {
                if report.iteration % config.snapshot_every == 0 {
                    trace.entries.push(TraceEntry {
                        iteration: report.iteration,
                        total: report.total,
                        losses: report.losses,
                        layout: before,
                    });
                }
            }
            Err(error) => {
                return Err(RunFailure { error, trace, layout: opt.into_layout() });
            }
        }
    };
    let iterations = opt.iteration();
    let weights = opt.schedule.at(iterations.saturating_sub(1));
    if trace.entries.last().map(|e| e.iteration) != Some(iterations) {
        match opt.evaluate(&weights) {
            Ok((r, losses)) => trace.entries.push(TraceEntry {
                iteration: iterations,
                total: r.value,
                losses,
                layout: config.record_layouts.then(|| opt.layout().clone()),
            }),
            Err(error) => return Err(RunFailure { error, trace, layout: opt.into_layout() }),
        }
    }
    Ok(RunOutput { layout: opt.into_layout(), trace, stop, iterations })
}
