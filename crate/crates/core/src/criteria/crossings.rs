//! Crossing minimization by alternating fits of per-crossing separating
//! lines (M step) and node moves against those lines (E step).
//!
//! For a crossing pair with first edge `(i, j)` (label `+1`) and second edge
//! `(k, l)` (label `−1`) the pair loss is
//! `Σ_α ReLU(1 − t_α (X_α·w + b)) + ‖w‖²`. It is zero only when the line
//! `X·w + b = 0` separates the two edges with margin.

use alloc::collections::BTreeMap;

use crate::criteria::{check_layout, LossResult};
use crate::geometry::{detect_crossings, CrossingPair, Layout, Vec2};
use crate::graph::Graph;
use crate::{Error, Result};

/// Default number of separator updates per outer iteration.
pub const DEFAULT_M_STEPS: usize = 30;

/// A separating line `{p : p·w + b = 0}` for one crossing pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separator {
    pub w: Vec2,
    pub b: f64,
}

/// Separators keyed by crossing pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CrossingSeparators {
    map: BTreeMap<CrossingPair, Separator>,
}

impl CrossingSeparators {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, pair: &CrossingPair) -> Option<&Separator> {
        self.map.get(pair)
    }

    pub fn insert(&mut self, pair: CrossingPair, sep: Separator) {
        self.map.insert(pair, sep);
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CrossingPair, &Separator)> {
        self.map.iter()
    }
}

/// Initial separator for a new pair: the perpendicular bisector of the two
/// edge midpoints, oriented so the first edge lies on the positive side.
pub fn init_separator(g: &Graph, layout: &Layout, pair: CrossingPair) -> Separator {
    let (i, j, k, l) = pair.endpoints(g);
    let m1 = 0.5 * (layout[i] + layout[j]);
    let m2 = 0.5 * (layout[k] + layout[l]);
    let d = m1 - m2;
    let len = d.norm();
    let w = if len > 0.0 {
        (1.0 / len) * d
    } else {
        // Midpoints coincide: use the normal of the first edge.
        let e = layout[j] - layout[i];
        let el = e.norm();
        if el > 0.0 {
            Vec2::new(-e.y / el, e.x / el)
        } else {
            Vec2::new(1.0, 0.0)
        }
    };
    let mid = 0.5 * (m1 + m2);
    Separator { w, b: -mid.dot(w) }
}

#[inline]
fn labelled(g: &Graph, pair: CrossingPair) -> [(usize, f64); 4] {
    let (i, j, k, l) = pair.endpoints(g);
    [(i, 1.0), (j, 1.0), (k, -1.0), (l, -1.0)]
}

/// Hinge part of one pair's loss.
pub fn pair_hinge(g: &Graph, layout: &Layout, pair: CrossingPair, sep: &Separator) -> f64 {
    labelled(g, pair).iter().map(|&(a, t)| (1.0 - t * (layout[a].dot(sep.w) + sep.b)).max(0.0)).sum()
}

/// Adds `scale ×` the X-gradient of one pair's loss and returns its value.
pub(crate) fn pair_term(
    g: &Graph,
    layout: &Layout,
    pair: CrossingPair,
    sep: &Separator,
    scale: f64,
    grad: &mut [Vec2],
) -> f64 {
    let mut value = sep.w.dot(sep.w);
    for (a, t) in labelled(g, pair) {
        let margin = 1.0 - t * (layout[a].dot(sep.w) + sep.b);
        if margin > 0.0 {
            value += margin;
            grad[a] -= (scale * t) * sep.w;
        }
    }
    value
}

/// E-step loss over the given pairs.
pub(crate) fn loss_over(
    g: &Graph,
    layout: &Layout,
    pairs: &[CrossingPair],
    seps: &CrossingSeparators,
) -> Result<LossResult> {
    let mut out = LossResult::zero(g.node_count());
    for &pair in pairs {
        let sep = seps.get(&pair).ok_or(Error::MissingSeparator(pair.first, pair.second))?;
        out.value += pair_term(g, layout, pair, sep, 1.0, &mut out.grad);
    }
    Ok(out)
}

/// E-step loss over the crossings currently present in `layout`, with the
/// separators held fixed.
pub fn loss_crossings(g: &Graph, layout: &Layout, seps: &CrossingSeparators) -> Result<LossResult> {
    check_layout(g, layout)?;
    let pairs = detect_crossings(g, layout);
    loss_over(g, layout, &pairs, seps)
}

/// `steps` gradient updates of one separator at fixed node positions.
///
/// The updates run in coordinates centered on the pair's four endpoints,
/// i.e. on `(w, b + w·o)` with `o` their centroid, so the fit does not depend
/// on where the drawing sits.
pub fn fit_one(g: &Graph, layout: &Layout, pair: CrossingPair, sep: Separator, lr: f64, steps: usize) -> Separator {
    let pts = labelled(g, pair);
    let o = 0.25 * pts.iter().fold(Vec2::ZERO, |acc, &(a, _)| acc + layout[a]);
    let local = pts.map(|(a, t)| (layout[a] - o, t));
    let mut w = sep.w;
    let mut b = sep.b + w.dot(o);
    for _ in 0..steps {
        let mut gw = 2.0 * w;
        let mut gb = 0.0;
        for &(p, t) in &local {
            if 1.0 - t * (p.dot(w) + b) > 0.0 {
                gw -= t * p;
                gb -= t;
            }
        }
        w -= lr * gw;
        b -= lr * gb;
    }
    Separator { w, b: b - w.dot(o) }
}

/// M step over the given pairs: keeps separators of pairs that still cross,
/// initializes new ones, drops the rest, then refines each.
pub(crate) fn fit_over(
    g: &Graph,
    layout: &Layout,
    pairs: &[CrossingPair],
    seps: &CrossingSeparators,
    lr: f64,
    steps: usize,
) -> CrossingSeparators {
    let mut next = CrossingSeparators::new();
    for &pair in pairs {
        let start = seps.get(&pair).copied().unwrap_or_else(|| init_separator(g, layout, pair));
        next.insert(pair, fit_one(g, layout, pair, start, lr, steps));
    }
    next
}

/// M step over the crossings currently present in `layout`.
pub fn fit_separators(
    g: &Graph,
    layout: &Layout,
    seps: &CrossingSeparators,
    lr: f64,
    steps: usize,
) -> CrossingSeparators {
    let pairs = detect_crossings(g, layout);
    fit_over(g, layout, &pairs, seps, lr, steps)
}
