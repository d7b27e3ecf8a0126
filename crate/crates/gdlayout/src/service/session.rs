//! The per-session optimizer thread.
//!
//! Control requests arrive on a channel and are applied between iterations,
//! so the optimizer itself needs no locking and every published state is one
//! that existed between two whole iterations.

use std::sync::mpsc::{self, Receiver, TryRecvError};
use std::sync::{Arc, Mutex};

use gdlayout_core::{Optimizer, Vec2, WeightSchedule, Weights};
use serde::Serialize;
use tokio::sync::{broadcast, oneshot};

use crate::io::CriterionMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Running,
    Paused,
    Finished,
    Failed,
    Deleted,
}

impl Status {
    pub fn is_terminal(self) -> bool {
        matches!(self, Status::Finished | Status::Failed | Status::Deleted)
    }
}

/// One streamed event. Serialized as a single JSON object per line.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum Event {
    Snapshot(Snapshot),
    Status {
        status: Status,
        iteration: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
    Heartbeat {
        status: Status,
        iteration: usize,
    },
}

impl Event {
    pub fn is_terminal(&self) -> bool {
        matches!(self, Event::Status { status, .. } if status.is_terminal())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Snapshot {
    pub iteration: usize,
    pub positions: Vec<[f64; 2]>,
    /// Weighted-in criteria only, evaluated at `positions`.
    pub losses: CriterionMap<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qualities: Option<CriterionMap<f64>>,
}

/// The latest between-iterations state, readable without asking the thread.
#[derive(Debug, Clone)]
pub struct View {
    pub status: Status,
    pub iteration: usize,
    pub positions: Vec<[f64; 2]>,
    pub weights: Weights,
    pub schedule: WeightSchedule,
    pub error: Option<String>,
}

#[derive(Debug)]
pub enum Command {
    SetWeights(Weights, oneshot::Sender<Result<usize, String>>),
    Drag { node: usize, at: Vec2, hold: usize, reply: oneshot::Sender<Result<usize, String>> },
    Pause(oneshot::Sender<Result<View, String>>),
    Resume(oneshot::Sender<Result<View, String>>),
    Shutdown,
}

struct Worker {
    opt: Optimizer,
    status: Status,
    /// Set by an all-zero weight override: the session keeps running but
    /// takes no steps.
    idle: bool,
    cadence: usize,
    view: Arc<Mutex<View>>,
    events: broadcast::Sender<Event>,
}

/// Starts the thread for a new, paused session.
pub fn spawn(
    opt: Optimizer,
    cadence: usize,
    events: broadcast::Sender<Event>,
) -> (mpsc::Sender<Command>, Arc<Mutex<View>>, std::thread::JoinHandle<()>) {
    let view = Arc::new(Mutex::new(View {
        status: Status::Paused,
        iteration: opt.iteration(),
        positions: positions(&opt),
        weights: opt.current_weights(),
        schedule: opt.schedule().clone(),
        error: None,
    }));
    let (tx, rx) = mpsc::channel();
    let worker =
        Worker { opt, status: Status::Paused, idle: false, cadence: cadence.max(1), view: view.clone(), events };
    worker.publish_snapshot();
    let thread = std::thread::spawn(move || worker.run(rx));
    (tx, view, thread)
}

fn positions(opt: &Optimizer) -> Vec<[f64; 2]> {
    opt.layout().positions().iter().map(|&p| p.into()).collect()
}

impl Worker {
    fn run(mut self, rx: Receiver<Command>) {
        loop {
            let stepping = self.status == Status::Running && !self.idle;
            let command = if stepping {
                match rx.try_recv() {
                    Ok(c) => Some(c),
                    Err(TryRecvError::Empty) => None,
                    Err(TryRecvError::Disconnected) => return,
                }
            } else {
                match rx.recv() {
                    Ok(c) => Some(c),
                    Err(_) => return,
                }
            };
            match command {
                Some(Command::Shutdown) => {
                    self.set_status(Status::Deleted, None);
                    return;
                }
                Some(c) => self.handle(c),
                None => self.step(),
            }
        }
    }

    fn handle(&mut self, command: Command) {
        match command {
            Command::SetWeights(w, reply) => {
                let result = self.opt.set_weights(w).map(|()| self.opt.iteration()).map_err(|e| e.to_string());
                if result.is_ok() {
                    self.idle = w.is_idle();
                    let mut view = self.view.lock().unwrap();
                    view.weights = w;
                    view.schedule = self.opt.schedule().clone();
                }
                let _ = reply.send(result);
            }
            Command::Drag { node, at, hold, reply } => {
                let result = self.opt.drag(node, at, hold).map(|()| self.opt.iteration()).map_err(|e| e.to_string());
                if result.is_ok() {
                    self.view.lock().unwrap().positions = positions(&self.opt);
                }
                let _ = reply.send(result);
            }
            Command::Pause(reply) => {
                let result = match self.status {
                    Status::Running | Status::Paused => {
                        self.set_status(Status::Paused, None);
                        Ok(self.view.lock().unwrap().clone())
                    }
                    s => Err(format!("session is {}", status_name(s))),
                };
                let _ = reply.send(result);
            }
            Command::Resume(reply) => {
                let result = match self.status {
                    Status::Running | Status::Paused => {
                        self.set_status(Status::Running, None);
                        Ok(self.view.lock().unwrap().clone())
                    }
                    s => Err(format!("session is {}", status_name(s))),
                };
                let _ = reply.send(result);
            }
            Command::Shutdown => unreachable!("handled by the loop"),
        }
    }

    fn step(&mut self) {
        if self.opt.stop_reason().is_some() {
            self.set_status(Status::Finished, None);
            return;
        }
        match self.opt.step() {
            Ok(_) => {
                {
                    let mut view = self.view.lock().unwrap();
                    view.iteration = self.opt.iteration();
                    view.positions = positions(&self.opt);
                    view.weights = self.opt.current_weights();
                }
                if self.opt.iteration().is_multiple_of(self.cadence) {
                    self.publish_snapshot();
                }
                if self.opt.stop_reason().is_some() {
                    self.set_status(Status::Finished, None);
                }
            }
            Err(e) => self.set_status(Status::Failed, Some(e.to_string())),
        }
    }

    fn publish_snapshot(&self) {
        let losses = match self.opt.evaluate(&self.opt.current_weights()) {
            Ok((_, per)) => CriterionMap::from_options(&per),
            Err(_) => CriterionMap(Vec::new()),
        };
        let _ = self.events.send(Event::Snapshot(Snapshot {
            iteration: self.opt.iteration(),
            positions: positions(&self.opt),
            losses,
            qualities: None,
        }));
    }

    fn set_status(&mut self, status: Status, error: Option<String>) {
        let changed = self.status != status;
        self.status = status;
        let iteration = {
            let mut view = self.view.lock().unwrap();
            view.status = status;
            if error.is_some() {
                view.error = error.clone();
            }
            view.iteration
        };
        if changed {
            let _ = self.events.send(Event::Status { status, iteration, error });
        }
    }
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::Running => "running",
        Status::Paused => "paused",
        Status::Finished => "finished",
        Status::Failed => "failed",
        Status::Deleted => "deleted",
    }
}
