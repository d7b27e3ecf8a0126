//! Total angular energy `Σ e^{−s·φ}` over pairs of edges sharing a node.

use crate::criteria::{check_layout, Hyper, LossResult};
use crate::geometry::{angle_between, incident_pairs, Layout, Vec2};
use crate::graph::Graph;
use crate::{math, Error, Result};

/// Adds `scale ×` the gradient of the energy of angle `a–center–b`.
pub(crate) fn angle_term(
    layout: &Layout,
    (a, center, b): (usize, usize, usize),
    s: f64,
    scale: f64,
    grad: &mut [Vec2],
) -> Result<f64> {
    let u = layout[a] - layout[center];
    let v = layout[b] - layout[center];
    let (uu, vv) = (u.dot(u), v.dot(v));
    if uu == 0.0 {
        return Err(Error::ZeroLengthEdge(a.min(center), a.max(center)));
    }
    if vv == 0.0 {
        return Err(Error::ZeroLengthEdge(b.min(center), b.max(center)));
    }
    let phi = angle_between(u, v);
    let energy = math::exp(-s * phi);
    // φ = atan2(|u×v|, u·v); dφ = (dot·d|cr| − |cr|·d dot) / (|u|²|v|²)
    let cr = u.cross(v);
    let sign = if cr > 0.0 {
        1.0
    } else if cr < 0.0 {
        -1.0
    } else {
        0.0
    };
    let dot = u.dot(v);
    let denom = uu * vv;
    let dphi_du = (1.0 / denom) * ((dot * sign) * Vec2::new(v.y, -v.x) - cr.abs() * v);
    let dphi_dv = (1.0 / denom) * ((dot * sign) * Vec2::new(-u.y, u.x) - cr.abs() * u);
    let f = -s * energy * scale;
    grad[a] += f * dphi_du;
    grad[b] += f * dphi_dv;
    grad[center] -= f * (dphi_du + dphi_dv);
    Ok(energy)
}

pub fn loss_angular_resolution(g: &Graph, layout: &Layout, hyper: &Hyper) -> Result<LossResult> {
    check_layout(g, layout)?;
    let mut out = LossResult::zero(g.node_count());
    for t in incident_pairs(g) {
        out.value += angle_term(layout, t, hyper.sensitivity, 1.0, &mut out.grad)?;
    }
    Ok(out)
}
