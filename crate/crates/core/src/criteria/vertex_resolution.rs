//! Vertex resolution: `Σ_{i<j} ReLU(1 − ‖X_i − X_j‖ / (r·d_max))²`.
//!
//! `d_max`, the layout diameter, is a constant within a step.

use crate::criteria::{unit, Hyper, LossResult};
use crate::geometry::{Layout, Vec2};
use crate::{Error, Result};

/// Lower bound on `d_max`.
pub const DMAX_EPS: f64 = 1e-12;

/// Adds `scale ×` the gradient of the `(i, j)` term. `reach` is `r·d_max`.
pub(crate) fn pair_term(layout: &Layout, i: usize, j: usize, reach: f64, scale: f64, grad: &mut [Vec2]) -> f64 {
    let (dir, len) = match unit(layout[i], layout[j]) {
        Some(u) => u,
        // Coincident nodes: full penalty, zero subgradient.
        None => return 1.0,
    };
    let t = 1.0 - len / reach;
    if t <= 0.0 {
        return 0.0;
    }
    let g = (-scale * 2.0 * t / reach) * dir;
    grad[i] += g;
    grad[j] -= g;
    t * t
}

/// The denominator `r·d_max` for the current layout.
pub(crate) fn reach(layout: &Layout, hyper: &Hyper) -> Result<f64> {
    let dmax = layout.diameter();
    if dmax < DMAX_EPS {
        return Err(Error::DegenerateLayout);
    }
    Ok(hyper.resolution(layout.len()) * dmax)
}

pub fn loss_vertex_resolution(layout: &Layout, hyper: &Hyper) -> Result<LossResult> {
    let n = layout.len();
    if n < 2 {
        return Err(Error::InvalidParameter("vertex resolution needs at least two nodes".into()));
    }
    let reach = reach(layout, hyper)?;
    let mut out = LossResult::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            out.value += pair_term(layout, i, j, reach, 1.0, &mut out.grad);
        }
    }
    Ok(out)
}
