//! The nine readability criteria: losses with analytic gradients, and the
//! quality measure each loss stands in for.
//!
//! | id  | loss                                   | quality                         |
//! |-----|----------------------------------------|---------------------------------|
//! | ST  | weighted stress                        | same as the loss (lower better) |
//! | IL  | RMS relative edge-length deviation     | same as the loss (lower better) |
//! | NP  | Lovász hinge of the k-NN Jaccard loss  | Jaccard index (higher better)   |
//! | CN  | separating-line hinge (EM)             | crossing count (lower better)   |
//! | CAM | sum of squared crossing cosines        | worst deviation from 90°        |
//! | AR  | cross-entropy of soft box proportions  | worst rotated box ratio         |
//! | ANR | angular energy `e^{-sφ}`               | min angle / (2π / max degree)   |
//! | VR  | squared hinge on short pair distances  | min distance vs. target, capped |
//! | GA  | squared hinge on edge-disk intrusions  | min center distance / radius    |

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::geometry::{Layout, Vec2};
use crate::graph::Graph;
use crate::{math, Error, Result};

pub mod angular_resolution;
pub mod aspect_ratio;
pub mod crossing_angle;
pub mod crossings;
pub mod gabriel;
pub mod ideal_length;
pub(crate) mod lovasz;
pub mod neighborhood;
pub mod quality;
pub mod stress;
pub mod vertex_resolution;

pub use self::angular_resolution::loss_angular_resolution;
pub use self::aspect_ratio::loss_aspect_ratio;
pub use self::crossing_angle::loss_crossing_angle;
pub use self::crossings::{fit_separators, loss_crossings, CrossingSeparators, Separator};
pub use self::gabriel::loss_gabriel;
pub use self::ideal_length::loss_ideal_edge_length;
pub use self::neighborhood::loss_neighborhood;
pub use self::quality::{all_qualities, quality};
pub use self::stress::loss_stress;
pub use self::vertex_resolution::loss_vertex_resolution;

/// Identifies one of the nine criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CriterionId {
    Stress,
    IdealEdgeLength,
    NeighborhoodPreservation,
    Crossings,
    CrossingAngle,
    AspectRatio,
    AngularResolution,
    VertexResolution,
    Gabriel,
}

impl CriterionId {
    pub const ALL: [CriterionId; 9] = [
        CriterionId::Stress,
        CriterionId::IdealEdgeLength,
        CriterionId::NeighborhoodPreservation,
        CriterionId::Crossings,
        CriterionId::CrossingAngle,
        CriterionId::AspectRatio,
        CriterionId::AngularResolution,
        CriterionId::VertexResolution,
        CriterionId::Gabriel,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// Short code used in files and on the command line.
    pub fn code(self) -> &'static str {
        match self {
            CriterionId::Stress => "ST",
            CriterionId::IdealEdgeLength => "IL",
            CriterionId::NeighborhoodPreservation => "NP",
            CriterionId::Crossings => "CN",
            CriterionId::CrossingAngle => "CAM",
            CriterionId::AspectRatio => "AR",
            CriterionId::AngularResolution => "ANR",
            CriterionId::VertexResolution => "VR",
            CriterionId::Gabriel => "GA",
        }
    }

    /// Whether a larger quality value is better.
    pub fn higher_is_better(self) -> bool {
        !matches!(
            self,
            CriterionId::Stress | CriterionId::IdealEdgeLength | CriterionId::Crossings | CriterionId::CrossingAngle
        )
    }

    /// Whether this criterion depends on the current set of crossings.
    pub fn uses_crossings(self) -> bool {
        matches!(self, CriterionId::Crossings | CriterionId::CrossingAngle)
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for CriterionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CriterionId::ALL
            .iter()
            .copied()
            .find(|c| c.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParameter(alloc::format!("unknown criterion {s:?}")))
    }
}

/// A loss value and its gradient with respect to every node position.
#[derive(Debug, Clone, PartialEq)]
pub struct LossResult {
    pub value: f64,
    pub grad: Vec<Vec2>,
}

impl LossResult {
    pub fn zero(n: usize) -> Self {
        LossResult { value: 0.0, grad: vec![Vec2::ZERO; n] }
    }
}

/// Tunable constants shared by several criteria. The stress exponent is
/// fixed (`w_ij = d_ij^-2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyper {
    /// Angular energy sensitivity `s` in `e^{-sφ}`.
    pub sensitivity: f64,
    /// Target vertex resolution; `None` means `1/√n`.
    pub target_resolution: Option<f64>,
    /// Number of rotations sampled by the aspect-ratio loss and quality.
    pub rotations: usize,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper { sensitivity: 1.0, target_resolution: None, rotations: 7 }
    }
}

impl Hyper {
    pub fn validate(&self) -> Result<()> {
        if !(self.sensitivity > 0.0 && self.sensitivity.is_finite()) {
            return Err(Error::InvalidParameter("sensitivity must be positive".into()));
        }
        if let Some(r) = self.target_resolution {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::InvalidParameter("target resolution must be in (0, 1]".into()));
            }
        }
        if self.rotations == 0 {
            return Err(Error::InvalidParameter("at least one rotation is required".into()));
        }
        Ok(())
    }

    pub fn resolution(&self, n: usize) -> f64 {
        self.target_resolution.unwrap_or_else(|| 1.0 / math::sqrt(n.max(1) as f64))
    }

    /// The sampled angles `2πk/N`.
    pub fn rotation_angles(&self) -> impl Iterator<Item = f64> {
        let n = self.rotations;
        (0..n).map(move |k| 2.0 * core::f64::consts::PI * k as f64 / n as f64)
    }
}

/// Neighborhood size for the NP criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NpConfig {
    /// `None` uses each node's own degree; `Some(k)` a global `k` with
    /// `1 ≤ k ≤ n − 2`.
    pub k: Option<usize>,
}

impl NpConfig {
    pub fn fixed(k: usize) -> Self {
        NpConfig { k: Some(k) }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self.k {
            Some(k) if k == 0 || k + 2 > n => Err(Error::KOutOfRange { k, n }),
            _ => Ok(()),
        }
    }

    pub(crate) fn k_for(&self, g: &Graph, i: usize) -> usize {
        self.k.unwrap_or_else(|| g.degree(i))
    }
}

/// One quality score per criterion, indexed by [`CriterionId`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Qualities(pub [f64; 9]);

impl Qualities {
    pub fn get(&self, c: CriterionId) -> f64 {
        self.0[c.index()]
    }

    pub fn set(&mut self, c: CriterionId, v: f64) {
        self.0[c.index()] = v;
    }

    pub fn iter(&self) -> impl Iterator<Item = (CriterionId, f64)> + '_ {
        CriterionId::ALL.iter().map(move |&c| (c, self.get(c)))
    }
}

/// Unit vector from `b` to `a`, or `None` if they coincide.
#[inline]
pub(crate) fn unit(a: Vec2, b: Vec2) -> Option<(Vec2, f64)> {
    let d = a - b;
    let len = d.norm();
    if len > 0.0 {
        Some(((1.0 / len) * d, len))
    } else {
        None
    }
}

pub(crate) fn check_layout(g: &Graph, layout: &Layout) -> Result<()> {
    layout.check_for(g)
}
