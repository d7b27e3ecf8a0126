//! Aspect ratio through softened bounding boxes.
//!
//! For each sampled rotation the layout is turned about its centroid, the
//! soft width `w` and height `h` are computed from softmax-weighted extreme
//! coordinates, and the cross-entropy between `[w, h]/(w + h)` and
//! `[½, ½]` is accumulated. The minimum, `N·ln 2`, is reached when every
//! sampled box is square.

use alloc::vec::Vec;

use crate::criteria::{Hyper, LossResult};
use crate::geometry::{soft_extent, Layout, Vec2};
use crate::{math, Error, Result};

/// Guards the proportions against zero-size boxes.
pub const BOX_EPS: f64 = 1e-12;

/// `∂w/∂v_m` for the soft extent `w` of coordinates `v`.
fn extent_grad(v: &[f64], p: &[f64], q: &[f64]) -> Vec<f64> {
    let s: f64 = p.iter().zip(v).map(|(a, b)| a * b).sum();
    let t: f64 = q.iter().zip(v).map(|(a, b)| a * b).sum();
    v.iter().zip(p.iter().zip(q)).map(|(&x, (&pm, &qm))| pm * (1.0 + x - s) - qm * (1.0 - x + t)).collect()
}

pub fn loss_aspect_ratio(layout: &Layout, hyper: &Hyper) -> Result<LossResult> {
    let n = layout.len();
    if n < 2 {
        return Err(Error::InvalidParameter("aspect ratio needs at least two nodes".into()));
    }
    if layout.diameter() == 0.0 {
        return Err(Error::DegenerateLayout);
    }
    let centroid = layout.centroid();
    let mut out = LossResult::zero(n);
    for theta in hyper.rotation_angles() {
        let (sin, cos) = math::sin_cos(theta);
        let pts: Vec<Vec2> = layout.positions().iter().map(|&p| (p - centroid).rotated(sin, cos)).collect();
        let xs: Vec<f64> = pts.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.y).collect();
        let (w, pw, qw) = soft_extent(&xs);
        let (h, ph, qh) = soft_extent(&ys);
        let (w, h) = (w.max(0.0) + BOX_EPS, h.max(0.0) + BOX_EPS);
        // −½ ln(w/(w+h)) − ½ ln(h/(w+h))
        out.value += -0.5 * math::ln(w) - 0.5 * math::ln(h) + math::ln(w + h);
        let dw = -0.5 / w + 1.0 / (w + h);
        let dh = -0.5 / h + 1.0 / (w + h);
        let gx = extent_grad(&xs, &pw, &qw);
        let gy = extent_grad(&ys, &ph, &qh);
        // The centroid shift drops out: both extent gradients sum to zero.
        for m in 0..n {
            let (a, b) = (dw * gx[m], dh * gy[m]);
            out.grad[m] += Vec2::new(a * cos + b * sin, -a * sin + b * cos);
        }
    }
    Ok(out)
}
