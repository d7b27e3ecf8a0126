//! Quality measures. These are evaluation metrics, not losses: they never
//! fail on degenerate drawings (coincident nodes, zero-length edges) and
//! instead report the worst score where a measure is undefined.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::criteria::ideal_length::ideal_length_value;
use crate::criteria::stress::stress_value;
use crate::criteria::{check_layout, CriterionId, Hyper, NpConfig, Qualities};
use crate::geometry::{
    angle_between, crossing_angle, detect_crossings, hard_bounding_box, incident_pairs, neighbors_by_distance, Layout,
};
use crate::graph::{DistanceMatrix, Graph};
use crate::Result;

pub fn quality(
    criterion: CriterionId,
    g: &Graph,
    d: &DistanceMatrix,
    layout: &Layout,
    cfg: NpConfig,
    hyper: &Hyper,
) -> Result<f64> {
    check_layout(g, layout)?;
    Ok(match criterion {
        CriterionId::Stress => stress_value(d, layout),
        CriterionId::IdealEdgeLength => ideal_length_value(g, layout),
        CriterionId::NeighborhoodPreservation => {
            cfg.validate(g.node_count())?;
            neighborhood_jaccard(g, layout, cfg)
        }
        CriterionId::Crossings => detect_crossings(g, layout).len() as f64,
        CriterionId::CrossingAngle => crossing_angle_deviation(g, layout),
        CriterionId::AspectRatio => aspect_ratio(layout, hyper),
        CriterionId::AngularResolution => angular_resolution(g, layout),
        CriterionId::VertexResolution => vertex_resolution(layout, hyper),
        CriterionId::Gabriel => gabriel(g, layout),
    })
}

/// All nine quality scores.
pub fn all_qualities(
    g: &Graph,
    d: &DistanceMatrix,
    layout: &Layout,
    cfg: NpConfig,
    hyper: &Hyper,
) -> Result<Qualities> {
    let mut q = Qualities::default();
    for c in CriterionId::ALL {
        q.set(c, quality(c, g, d, layout, cfg, hyper)?);
    }
    Ok(q)
}

/// Jaccard index between the k-NN relation of the drawing and adjacency.
fn neighborhood_jaccard(g: &Graph, layout: &Layout, cfg: NpConfig) -> f64 {
    let n = g.node_count();
    let (mut both, mut either) = (0usize, 0usize);
    for i in 0..n {
        let k = cfg.k_for(g, i).min(n - 1);
        let knn: Vec<usize> = neighbors_by_distance(layout, i).iter().take(k).map(|p| p.1).collect();
        for j in (0..n).filter(|&j| j != i) {
            let predicted = knn.contains(&j);
            let actual = g.is_adjacent(i, j);
            both += usize::from(predicted && actual);
            either += usize::from(predicted || actual);
        }
    }
    if either == 0 {
        1.0
    } else {
        both as f64 / either as f64
    }
}

fn crossing_angle_deviation(g: &Graph, layout: &Layout) -> f64 {
    detect_crossings(g, layout)
        .into_iter()
        .filter_map(|pair| crossing_angle(g, pair, layout).ok())
        .map(|theta| (theta - FRAC_PI_2).abs() / FRAC_PI_2)
        .fold(0.0, f64::max)
}

fn aspect_ratio(layout: &Layout, hyper: &Hyper) -> f64 {
    hyper
        .rotation_angles()
        .map(|theta| {
            let (w, h) = hard_bounding_box(layout, theta);
            let hi = w.max(h);
            if hi > 0.0 {
                w.min(h) / hi
            } else {
                0.0
            }
        })
        .fold(1.0, f64::min)
}

fn angular_resolution(g: &Graph, layout: &Layout) -> f64 {
    let pairs = incident_pairs(g);
    if pairs.is_empty() {
        return 1.0;
    }
    let min = pairs
        .into_iter()
        .map(|(a, c, b)| {
            let (u, v) = (layout[a] - layout[c], layout[b] - layout[c]);
            if u.norm() == 0.0 || v.norm() == 0.0 {
                0.0
            } else {
                angle_between(u, v)
            }
        })
        .fold(f64::INFINITY, f64::min);
    min / (2.0 * PI / g.max_degree() as f64)
}

fn vertex_resolution(layout: &Layout, hyper: &Hyper) -> f64 {
    let n = layout.len();
    if n < 2 {
        return 1.0;
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..n {
        for j in i + 1..n {
            let d = layout.distance(i, j);
            lo = lo.min(d);
            hi = hi.max(d);
        }
    }
    if hi == 0.0 {
        return 0.0;
    }
    (lo / (hyper.resolution(n) * hi)).min(1.0)
}

fn gabriel(g: &Graph, layout: &Layout) -> f64 {
    let mut best = 1.0f64;
    for &(i, j) in g.edges() {
        let radius = 0.5 * layout.distance(i, j);
        if radius == 0.0 {
            continue;
        }
        let center = 0.5 * (layout[i] + layout[j]);
        for k in (0..g.node_count()).filter(|&k| k != i && k != j) {
            best = best.min((layout[k] - center).norm() / radius);
        }
    }
    best
}
