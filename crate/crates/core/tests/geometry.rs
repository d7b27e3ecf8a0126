use gdlayout_testkit as common;

use common::{brute_force_cross, brute_force_crossings, dist, random_points, rng};
use gdlayout_core::geometry::{
    crossing_angle, detect_crossings, hard_bounding_box, incident_angles, knn_cutoffs, segments_cross,
    soft_bounding_box,
};
use gdlayout_core::{random_layout, Family, Graph, Layout, Vec2};
use rand::Rng;

fn pairs_of(g: &Graph, x: &Layout) -> Vec<(usize, usize)> {
    detect_crossings(g, x).into_iter().map(|p| (p.first, p.second)).collect()
}

#[test]
fn complete_five_matches_brute_force() {
    let g = Graph::generate(Family::Complete(5)).unwrap();
    let x = random_layout(5, 42);
    assert_eq!(pairs_of(&g, &x), brute_force_crossings(&g, &x));
}

#[test]
fn random_families_match_brute_force() {
    let families = [
        Family::Cycle(10),
        Family::Grid { w: 5, h: 5 },
        Family::BalancedTree { branch: 2, depth: 4 },
        Family::Complete(8),
        Family::CompleteBipartite(4, 5),
        Family::Dodecahedron,
    ];
    for f in families {
        let g = Graph::generate(f).unwrap();
        for seed in 0..50 {
            let x = random_layout(g.node_count(), seed);
            assert_eq!(pairs_of(&g, &x), brute_force_crossings(&g, &x), "{f:?} seed {seed}");
        }
    }
}

#[test]
fn predicate_is_symmetric() {
    let mut r = rng(5);
    let mut crossed = 0;
    for _ in 0..2000 {
        let p: Vec<Vec2> = (0..4).map(|_| Vec2::new(r.random(), r.random())).collect();
        let base = segments_cross(p[0], p[1], p[2], p[3]);
        crossed += base as usize;
        assert_eq!(base, segments_cross(p[2], p[3], p[0], p[1]));
        assert_eq!(base, segments_cross(p[1], p[0], p[2], p[3]));
        assert_eq!(base, segments_cross(p[0], p[1], p[3], p[2]));
        assert_eq!(base, brute_force_cross(p[0], p[1], p[2], p[3]));
    }
    assert!(crossed > 100);
}

#[test]
fn crossing_angles_match_dot_products() {
    let g = Graph::generate(Family::Complete(8)).unwrap();
    for seed in 0..20 {
        let x = random_layout(8, seed);
        for pair in detect_crossings(&g, &x) {
            let (i, j) = g.edges()[pair.first];
            let (k, l) = g.edges()[pair.second];
            let u = x[j] - x[i];
            let v = x[l] - x[k];
            let expect = (u.dot(v).abs() / (dist(x[i], x[j]) * dist(x[k], x[l]))).acos();
            let got = crossing_angle(&g, pair, &x).unwrap();
            assert!((got - expect).abs() < 1e-9);
            assert!(got > 0.0 && got <= std::f64::consts::FRAC_PI_2);
        }
    }
}

#[test]
fn incident_angles_match_atan2() {
    let g = Graph::generate(Family::Cube).unwrap();
    let x = random_layout(8, 3);
    let angles = incident_angles(&g, &x).unwrap();
    let degree_pairs: usize = (0..8).map(|v| g.degree(v) * (g.degree(v) - 1) / 2).sum();
    assert_eq!(angles.len(), degree_pairs);
    for a in angles {
        let u = x[a.a] - x[a.center];
        let v = x[a.b] - x[a.center];
        let mut diff = (v.y.atan2(v.x) - u.y.atan2(u.x)).abs();
        if diff > std::f64::consts::PI {
            diff = 2.0 * std::f64::consts::PI - diff;
        }
        assert!((a.angle - diff).abs() < 1e-12);
    }
}

#[test]
fn knn_cutoffs_match_full_sort() {
    let mut r = rng(9);
    let x = random_points(&mut r, 20, 1.0);
    let cut = knn_cutoffs(&x, 3).unwrap();
    for i in 0..20 {
        let mut d: Vec<f64> = (0..20).filter(|&j| j != i).map(|j| dist(x[i], x[j])).collect();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(cut[i], (d[2], d[3]));
    }
    assert!(knn_cutoffs(&x, 0).is_err());
    assert!(knn_cutoffs(&x, 19).is_err());
}

#[test]
fn hard_box_matches_brute_force() {
    let mut r = rng(13);
    for _ in 0..20 {
        let x = random_points(&mut r, 15, 4.0);
        let theta: f64 = r.random_range(0.0..std::f64::consts::TAU);
        let n = x.len() as f64;
        let (cx, cy) =
            (x.positions().iter().map(|p| p.x).sum::<f64>() / n, x.positions().iter().map(|p| p.y).sum::<f64>() / n);
        let (s, c) = theta.sin_cos();
        let xs: Vec<f64> = x.positions().iter().map(|p| c * (p.x - cx) - s * (p.y - cy)).collect();
        let ys: Vec<f64> = x.positions().iter().map(|p| s * (p.x - cx) + c * (p.y - cy)).collect();
        let span = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
        let (w, h) = hard_bounding_box(&x, theta);
        assert!((w - span(&xs)).abs() < 1e-12 && (h - span(&ys)).abs() < 1e-12);
        let (sw, sh) = soft_bounding_box(&x, theta);
        assert!(sw <= w + 1e-12 && sh <= h + 1e-12);
    }
}

#[test]
fn soft_box_approaches_hard_box_when_scaled() {
    let mut r = rng(21);
    for _ in 0..10 {
        let x = random_points(&mut r, 12, 1.0);
        let big = Layout::new(x.positions().iter().map(|&p| 100.0 * p).collect()).unwrap();
        for k in 0..7 {
            let theta = k as f64;
            let (sw, sh) = soft_bounding_box(&big, theta);
            let (w, h) = hard_bounding_box(&big, theta);
            assert!((w - sw) / w < 0.01 && (h - sh) / h < 0.01);
        }
    }
}

#[test]
fn unit_square_boxes() {
    let x =
        Layout::new(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)]).unwrap();
    let (w, h) = hard_bounding_box(&x, std::f64::consts::FRAC_PI_4);
    assert!((w - 2f64.sqrt()).abs() < 1e-12 && (h - 2f64.sqrt()).abs() < 1e-12);
}
