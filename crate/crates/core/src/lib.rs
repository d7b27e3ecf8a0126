//! Graph layout by gradient descent on weighted readability criteria.
//!
//! The crate is `no_std` and only needs `alloc`. It holds the pure numerical
//! part of the engine:
//!
//! * [`graph`] builds graphs (including a handful of standard families) and
//!   their hop-count distance matrices.
//! * [`geometry`] contains the layout type and the geometric predicates the
//!   criteria are built on (crossings, angles, k-NN cutoffs, bounding boxes).
//! * [`criteria`] implements the nine losses with analytic gradients and the
//!   nine quality measures.
//! * [`optimizer`] assembles the weighted objective and runs full or
//!   stochastic gradient descent under a weight schedule.
//!
//! File formats, the command line and the interactive session service live in
//! the `gdlayout` crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod criteria;
mod error;
pub mod geometry;
pub mod graph;
mod math;
pub mod optimizer;

pub use crate::criteria::{CriterionId, Hyper, LossResult, NpConfig, Qualities};
pub use crate::error::Error;
pub use crate::geometry::{Layout, Vec2};
pub use crate::graph::{DistanceMatrix, Family, Graph};
pub use crate::optimizer::{
    random_layout, run, Mode, Optimizer, OptimizerConfig, RunOutput, RunTrace, StopReason, WeightSchedule, Weights,
};

pub type Result<T, E = Error> = core::result::Result<T, E>;
