//! Lovász hinge: the convex extension of the Jaccard loss over real scores.

use alloc::vec;
use alloc::vec::Vec;

/// Jaccard-loss increments for labels already sorted by descending error.
fn jaccard_increments(sorted_labels: impl Iterator<Item = bool>, positives: usize) -> Vec<f64> {
    let gts = positives as f64;
    let (mut cum_pos, mut cum_neg) = (0.0, 0.0);
    let mut prev = 0.0;
    sorted_labels
        .map(|label| {
            if label {
                cum_pos += 1.0;
            } else {
                cum_neg += 1.0;
            }
            let jac = 1.0 - (gts - cum_pos) / (gts + cum_neg);
            let inc = jac - prev;
            prev = jac;
            inc
        })
        .collect()
}

/// Lovász hinge of `scores` against binary `labels`, and its (sub)gradient
/// with respect to each score.
///
/// Errors are `1 − score·sign(label)`; they are visited in descending order
/// (ties by position) and weighted by the Jaccard-loss increments.
pub(crate) fn lovasz_hinge(scores: &[f64], labels: &[bool]) -> (f64, Vec<f64>) {
    debug_assert_eq!(scores.len(), labels.len());
    let sign = |l: bool| if l { 1.0 } else { -1.0 };
    let errors: Vec<f64> = scores.iter().zip(labels).map(|(&s, &l)| 1.0 - s * sign(l)).collect();
    let mut order: Vec<usize> = (0..errors.len()).collect();
    order.sort_by(|&a, &b| errors[b].total_cmp(&errors[a]).then(a.cmp(&b)));
    let positives = labels.iter().filter(|&&l| l).count();
    let inc = jaccard_increments(order.iter().map(|&m| labels[m]), positives);

    let mut value = 0.0;
    let mut grad = vec![0.0; scores.len()];
    for (rank, &m) in order.iter().enumerate() {
        let e = errors[m];
        if e > 0.0 {
            value += e * inc[rank];
            grad[m] = -sign(labels[m]) * inc[rank];
        }
    }
    (value, grad)
}
