//! Finite-difference checks of the analytic loss gradients. Each loss value
//! is rewritten here from its definition. Quantities the optimizer holds
//! constant within a step (NP cutoffs, the IL average length, the VR
//! diameter, crossing sets and separators) are frozen at the base layout on
//! the oracle side too.
//!
//! Every check draws `configs` random graphs and layouts and returns the
//! first mismatch.

use gdlayout_core::criteria::{self, crossings, CrossingSeparators};
use gdlayout_core::geometry::detect_crossings;
use gdlayout_core::{graph, CriterionId, Graph, Hyper, Layout, LossResult, NpConfig, Vec2};
use rand::Rng;

use crate::{dist, floyd_warshall, lovasz_hinge, random_graph, random_points, rng};

const H: f64 = 1e-5;
const REL_TOL: f64 = 1e-4;
const ABS_TOL: f64 = 1e-8;

type Oracle<'a> = Box<dyn Fn(&[Vec2]) -> f64 + 'a>;

fn check(name: &str, seed: u64, analytic: &LossResult, base: &Layout, oracle: Oracle<'_>) -> Result<(), String> {
    let mut pts = base.positions().to_vec();
    let v0 = oracle(&pts);
    if (v0 - analytic.value).abs() > 1e-9 * v0.abs().max(1.0) {
        return Err(format!("{name} seed {seed}: value {} vs oracle {v0}", analytic.value));
    }
    for m in 0..pts.len() {
        for axis in 0..2 {
            let orig = pts[m];
            let bump = |p: Vec2, h: f64| if axis == 0 { Vec2::new(p.x + h, p.y) } else { Vec2::new(p.x, p.y + h) };
            pts[m] = bump(orig, H);
            let up = oracle(&pts);
            pts[m] = bump(orig, -H);
            let down = oracle(&pts);
            pts[m] = orig;
            let fd = (up - down) / (2.0 * H);
            let an = if axis == 0 { analytic.grad[m].x } else { analytic.grad[m].y };
            let err = (an - fd).abs();
            if err > ABS_TOL && err > REL_TOL * an.abs().max(fd.abs()) {
                return Err(format!("{name} seed {seed}: node {m} axis {axis}: analytic {an} vs fd {fd}"));
            }
        }
    }
    Ok(())
}

fn setup(seed: u64) -> (Graph, Layout) {
    let mut r = rng(seed);
    let n = r.random_range(6..12);
    let extra = r.random_range(2..8);
    let g = random_graph(&mut r, n, extra);
    let x = random_points(&mut r, n, 3.0);
    (g, x)
}

fn norm(v: Vec2) -> f64 {
    (v.x * v.x + v.y * v.y).sqrt()
}

pub fn stress(configs: u64) -> Result<(), String> {
    for seed in 0..configs {
        let (g, x) = setup(seed);
        let d = graph::shortest_paths(&g).unwrap();
        let fw = floyd_warshall(&g);
        let r = criteria::loss_stress(&g, &d, &x).unwrap();
        check(
            "stress",
            seed,
            &r,
            &x,
            Box::new(|p| {
                let mut s = 0.0;
                for i in 0..p.len() {
                    for j in i + 1..p.len() {
                        s += (dist(p[i], p[j]) - fw[i][j]).powi(2) / (fw[i][j] * fw[i][j]);
                    }
                }
                s
            }),
        )?;
    }
    Ok(())
}

pub fn ideal_edge_length(configs: u64) -> Result<(), String> {
    for seed in 0..configs {
        let (g, x) = setup(seed);
        let g = if seed % 2 == 0 {
            let lens = (0..g.edge_count()).map(|e| 0.5 + 0.1 * e as f64).collect();
            g.with_ideal_lengths(lens).unwrap()
        } else {
            g
        };
        let r = criteria::loss_ideal_edge_length(&g, &x).unwrap();
        let m = g.edge_count() as f64;
        let frozen_avg = g.edges().iter().map(|&(i, j)| dist(x[i], x[j])).sum::<f64>() / m;
        check(
            "ideal edge length",
            seed,
            &r,
            &x,
            Box::new(|p| {
                let mut s = 0.0;
                for (e, &(i, j)) in g.edges().iter().enumerate() {
                    let l = g.ideal_lengths().map_or(frozen_avg, |l| l[e]);
                    s += ((dist(p[i], p[j]) - l) / l).powi(2);
                }
                (s / m).sqrt()
            }),
        )?;
    }
    Ok(())
}

/// Hinge errors of the flattened score matrix, with labels.
fn np_errors(g: &Graph, x: &Layout) -> Vec<(f64, bool)> {
    criteria::neighborhood::neighbor_scores(g, x, NpConfig::default())
        .unwrap()
        .into_iter()
        .map(|(i, j, s)| {
            let y = g.is_adjacent(i, j);
            (1.0 - s * if y { 1.0 } else { -1.0 }, y)
        })
        .collect()
}

/// The loss is piecewise linear in the scores. Its kinks are where an error
/// crosses zero or two errors with different labels swap order; finite
/// differences are only meaningful away from them.
fn away_from_np_kinks(g: &Graph, x: &Layout) -> bool {
    let errs = np_errors(g, x);
    errs.iter().all(|e| e.0.abs() > 1e-4)
        && errs
            .iter()
            .enumerate()
            .all(|(a, ea)| errs[a + 1..].iter().all(|eb| ea.1 == eb.1 || (ea.0 - eb.0).abs() > 1e-4))
}

pub fn neighborhood_preservation(configs: u64) -> Result<(), String> {
    let mut checked = 0;
    for seed in 0.. {
        if checked == configs {
            break;
        }
        let (g, x) = setup(3000 + seed);
        if !away_from_np_kinks(&g, &x) {
            continue;
        }
        checked += 1;
        let n = g.node_count();
        let r = criteria::loss_neighborhood(&g, &x, NpConfig::default()).unwrap();
        // Cutoff of row i from a full sort of its distances.
        let cutoffs: Vec<Option<f64>> = (0..n)
            .map(|i| {
                let k = g.degree(i);
                if k + 1 > n - 1 {
                    return None;
                }
                let mut ds: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dist(x[i], x[j])).collect();
                ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
                Some(0.5 * (ds[k - 1] + ds[k]))
            })
            .collect();
        check(
            "neighborhood",
            seed,
            &r,
            &x,
            Box::new(|p| {
                let mut scores = Vec::new();
                let mut labels = Vec::new();
                for i in 0..n {
                    let Some(c) = cutoffs[i] else { continue };
                    for j in (0..n).filter(|&j| j != i) {
                        scores.push(c - dist(p[i], p[j]));
                        labels.push(g.is_adjacent(i, j));
                    }
                }
                lovasz_hinge(&scores, &labels)
            }),
        )?;
    }
    Ok(())
}

pub fn crossings_e_step(configs: u64) -> Result<(), String> {
    let mut checked = 0;
    for seed in 0..configs * 3 {
        if checked == configs {
            break;
        }
        let (g, x) = setup(1000 + seed);
        let pairs = detect_crossings(&g, &x);
        if pairs.is_empty() {
            continue;
        }
        checked += 1;
        let seps = crossings::fit_separators(&g, &x, &CrossingSeparators::new(), 0.05, 7);
        let r = crossings::loss_crossings(&g, &x, &seps).unwrap();
        check(
            "crossings",
            seed,
            &r,
            &x,
            Box::new(|p| {
                let mut s = 0.0;
                for pair in &pairs {
                    let sep = seps.get(pair).unwrap();
                    let (i, j) = g.edges()[pair.first];
                    let (k, l) = g.edges()[pair.second];
                    for (a, t) in [(i, 1.0), (j, 1.0), (k, -1.0), (l, -1.0)] {
                        s += (1.0 - t * (p[a].x * sep.w.x + p[a].y * sep.w.y + sep.b)).max(0.0);
                    }
                    s += sep.w.x * sep.w.x + sep.w.y * sep.w.y;
                }
                s
            }),
        )?;
    }
    if checked != configs {
        return Err(format!("only {checked} of {configs} configurations had crossings"));
    }
    Ok(())
}

pub fn crossing_angle(configs: u64) -> Result<(), String> {
    let mut checked = 0;
    for seed in 0..configs * 3 {
        if checked == configs {
            break;
        }
        let (g, x) = setup(2000 + seed);
        let pairs = detect_crossings(&g, &x);
        if pairs.is_empty() {
            continue;
        }
        checked += 1;
        let r = criteria::loss_crossing_angle(&g, &x).unwrap();
        check(
            "crossing angle",
            seed,
            &r,
            &x,
            Box::new(|p| {
                pairs
                    .iter()
                    .map(|pair| {
                        let (i, j) = g.edges()[pair.first];
                        let (k, l) = g.edges()[pair.second];
                        let u = p[j] - p[i];
                        let v = p[l] - p[k];
                        (u.dot(v) / (norm(u) * norm(v))).powi(2)
                    })
                    .sum()
            }),
        )?;
    }
    if checked != configs {
        return Err(format!("only {checked} of {configs} configurations had crossings"));
    }
    Ok(())
}

pub fn aspect_ratio(configs: u64) -> Result<(), String> {
    let hyper = Hyper::default();
    for seed in 0..configs {
        let (_, x) = setup(seed);
        let r = criteria::loss_aspect_ratio(&x, &hyper).unwrap();
        check(
            "aspect ratio",
            seed,
            &r,
            &x,
            Box::new(|p| {
                let n = p.len() as f64;
                let cx = p.iter().map(|q| q.x).sum::<f64>() / n;
                let cy = p.iter().map(|q| q.y).sum::<f64>() / n;
                let soft = |v: &[f64]| {
                    let z: f64 = v.iter().map(|a| a.exp()).sum();
                    let zn: f64 = v.iter().map(|a| (-a).exp()).sum();
                    v.iter().map(|a| a * a.exp()).sum::<f64>() / z - v.iter().map(|a| a * (-a).exp()).sum::<f64>() / zn
                };
                (0..7)
                    .map(|k| {
                        let th = 2.0 * std::f64::consts::PI * k as f64 / 7.0;
                        let (s, c) = th.sin_cos();
                        let xs: Vec<f64> = p.iter().map(|q| c * (q.x - cx) - s * (q.y - cy)).collect();
                        let ys: Vec<f64> = p.iter().map(|q| s * (q.x - cx) + c * (q.y - cy)).collect();
                        let (w, h) = (soft(&xs) + 1e-12, soft(&ys) + 1e-12);
                        -0.5 * (w / (w + h)).ln() - 0.5 * (h / (w + h)).ln()
                    })
                    .sum()
            }),
        )?;
    }
    Ok(())
}

pub fn angular_resolution(configs: u64) -> Result<(), String> {
    for seed in 0..configs {
        let (g, x) = setup(seed);
        let hyper = Hyper { sensitivity: 0.5 + seed as f64 * 0.1, ..Hyper::default() };
        let r = criteria::loss_angular_resolution(&g, &x, &hyper).unwrap();
        check(
            "angular resolution",
            seed,
            &r,
            &x,
            Box::new(|p| {
                let mut s = 0.0;
                for c in 0..g.node_count() {
                    let nb = g.neighbors(c);
                    for (ai, &a) in nb.iter().enumerate() {
                        for &b in &nb[ai + 1..] {
                            let u = p[a] - p[c];
                            let v = p[b] - p[c];
                            let phi = (u.dot(v) / (norm(u) * norm(v))).clamp(-1.0, 1.0).acos();
                            s += (-hyper.sensitivity * phi).exp();
                        }
                    }
                }
                s
            }),
        )?;
    }
    Ok(())
}

pub fn vertex_resolution(configs: u64) -> Result<(), String> {
    for seed in 0..configs {
        let (_, x) = setup(seed);
        let n = x.len();
        // Large target resolution so that many pairs are active.
        let hyper = Hyper { target_resolution: Some(0.3 + 0.02 * seed as f64), ..Hyper::default() };
        let r = criteria::loss_vertex_resolution(&x, &hyper).unwrap();
        let p0 = x.positions();
        let dmax =
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| dist(p0[i], p0[j])).fold(0.0, f64::max);
        let reach = hyper.target_resolution.unwrap() * dmax;
        check(
            "vertex resolution",
            seed,
            &r,
            &x,
            Box::new(|p| {
                let mut s = 0.0;
                for i in 0..n {
                    for j in i + 1..n {
                        s += (1.0 - dist(p[i], p[j]) / reach).max(0.0).powi(2);
                    }
                }
                s
            }),
        )?;
    }
    Ok(())
}

pub fn gabriel(configs: u64) -> Result<(), String> {
    for seed in 0..configs {
        let (g, x) = setup(seed);
        let r = criteria::loss_gabriel(&g, &x).unwrap();
        if seed == 0 && r.value <= 0.0 {
            return Err("first configuration should violate the property".into());
        }
        check(
            "gabriel",
            seed,
            &r,
            &x,
            Box::new(|p| {
                let mut s = 0.0;
                for &(i, j) in g.edges() {
                    let c = Vec2::new(0.5 * (p[i].x + p[j].x), 0.5 * (p[i].y + p[j].y));
                    let rad = 0.5 * dist(p[i], p[j]);
                    for k in (0..p.len()).filter(|&k| k != i && k != j) {
                        s += (rad - dist(p[k], c)).max(0.0).powi(2);
                    }
                }
                s
            }),
        )?;
    }
    Ok(())
}

/// Runs the check for one criterion.
pub fn check_criterion(c: CriterionId, configs: u64) -> Result<(), String> {
    match c {
        CriterionId::Stress => stress(configs),
        CriterionId::IdealEdgeLength => ideal_edge_length(configs),
        CriterionId::NeighborhoodPreservation => neighborhood_preservation(configs),
        CriterionId::Crossings => crossings_e_step(configs),
        CriterionId::CrossingAngle => crossing_angle(configs),
        CriterionId::AspectRatio => aspect_ratio(configs),
        CriterionId::AngularResolution => angular_resolution(configs),
        CriterionId::VertexResolution => vertex_resolution(configs),
        CriterionId::Gabriel => gabriel(configs),
    }
}
