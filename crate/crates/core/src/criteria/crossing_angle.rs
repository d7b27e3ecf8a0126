//! Sum of squared cosines of the crossing angles.

use crate::criteria::{check_layout, LossResult};
use crate::geometry::{detect_crossings, CrossingPair, Layout, Vec2};
use crate::graph::Graph;
use crate::{Error, Result};

/// Adds `scale ×` the gradient of one crossing's `cos²` and returns it.
pub(crate) fn pair_term(g: &Graph, layout: &Layout, pair: CrossingPair, scale: f64, grad: &mut [Vec2]) -> Result<f64> {
    let (i, j, k, l) = pair.endpoints(g);
    let u = layout[i] - layout[j];
    let v = layout[k] - layout[l];
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 {
        return Err(Error::ZeroLengthEdge(i, j));
    }
    if nv == 0.0 {
        return Err(Error::ZeroLengthEdge(k, l));
    }
    let c = u.dot(v) / (nu * nv);
    // ∂c/∂u = v/(|u||v|) − c u/|u|², symmetric for v.
    let du = (1.0 / (nu * nv)) * v - (c / (nu * nu)) * u;
    let dv = (1.0 / (nu * nv)) * u - (c / (nv * nv)) * v;
    let f = scale * 2.0 * c;
    grad[i] += f * du;
    grad[j] -= f * du;
    grad[k] += f * dv;
    grad[l] -= f * dv;
    Ok(c * c)
}

pub(crate) fn loss_over(g: &Graph, layout: &Layout, pairs: &[CrossingPair]) -> Result<LossResult> {
    let mut out = LossResult::zero(g.node_count());
    for &pair in pairs {
        out.value += pair_term(g, layout, pair, 1.0, &mut out.grad)?;
    }
    Ok(out)
}

/// Loss over the crossings present in `layout`; the set is held fixed when
/// differentiating.
pub fn loss_crossing_angle(g: &Graph, layout: &Layout) -> Result<LossResult> {
    check_layout(g, layout)?;
    loss_over(g, layout, &detect_crossings(g, layout))
}
