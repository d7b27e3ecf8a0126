//! Weighted stress majorization (SMACOF) with weights d⁻², used as the
//! reference minimum for the stress criterion.

use gdlayout_core::Vec2;
use nalgebra::DMatrix;

use crate::dist;

/// Σ_{i<j} (‖x_i − x_j‖ − d_ij)² / d_ij².
pub fn stress(d: &[Vec<f64>], x: &[Vec2]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += (dist(x[i], x[j]) - d[i][j]).powi(2) / (d[i][j] * d[i][j]);
        }
    }
    s
}

/// Iterates Guttman transforms from `x0` until the relative decrease in
/// stress drops below `tol` or `max_iter` is reached.
pub fn smacof(d: &[Vec<f64>], x0: &[Vec2], max_iter: usize, tol: f64) -> Vec<Vec2> {
    let n = x0.len();
    let w = |i: usize, j: usize| 1.0 / (d[i][j] * d[i][j]);
    let mut v = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                v[(i, j)] = -w(i, j);
                v[(i, i)] += w(i, j);
            }
        }
    }
    // Moore–Penrose inverse of the Laplacian via the rank-one shift.
    let ones = DMatrix::<f64>::from_element(n, n, 1.0);
    let vplus = (v + &ones).try_inverse().expect("weighted Laplacian of a connected graph") - ones / (n * n) as f64;

    let mut x = DMatrix::<f64>::from_fn(n, 2, |i, c| if c == 0 { x0[i].x } else { x0[i].y });
    let to_pts = |x: &DMatrix<f64>| (0..n).map(|i| Vec2::new(x[(i, 0)], x[(i, 1)])).collect::<Vec<_>>();
    let mut prev = stress(d, &to_pts(&x));
    for _ in 0..max_iter {
        let mut b = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let dx = ((x[(i, 0)] - x[(j, 0)]).powi(2) + (x[(i, 1)] - x[(j, 1)]).powi(2)).sqrt();
                if dx > 0.0 {
                    b[(i, j)] = -w(i, j) * d[i][j] / dx;
                    b[(i, i)] -= b[(i, j)];
                }
            }
        }
        x = &vplus * b * &x;
        let s = stress(d, &to_pts(&x));
        if prev - s <= tol * prev {
            break;
        }
        prev = s;
    }
    to_pts(&x)
}
