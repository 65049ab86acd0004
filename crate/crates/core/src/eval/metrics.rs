use crate::error::{Error, Result};

/// 1 + the number of candidates scoring at least as high as the target.
/// Ties count against the target. `excluded[i]` removes item `i` from the
/// candidate set.
pub fn rank_of_target(scores: &[f64], target: usize, excluded: &[bool]) -> Result<usize> {
    if target >= scores.len() {
        return Err(Error::IndexOutOfRange {
            what: "score vector",
            index: target,
            len: scores.len(),
        });
    }
    if excluded.get(target).copied().unwrap_or(false) {
        return Err(Error::TargetExcluded(target));
    }
    let t = scores[target];
    let above = scores
        .iter()
        .enumerate()
        .filter(|&(i, &s)| i != target && !excluded.get(i).copied().unwrap_or(false) && s >= t)
        .count();
    Ok(1 + above)
}

/// Fraction of ranks within the top `k`.
pub fn hr_at_k(ranks: &[usize], k: usize) -> f64 {
    if ranks.is_empty() {
        return 0.0;
    }
    ranks.iter().filter(|&&r| r <= k).count() as f64 / ranks.len() as f64
}

/// Single-relevant-item gain: `1 / log2(rank + 1)` inside the cutoff, else 0.
pub fn ndcg_gain(rank: usize, k: usize) -> f64 {
    if rank >= 1 && rank <= k {
        1.0 / ((rank + 1) as f64).log2()
    } else {
        0.0
    }
}

pub fn ndcg_at_k(ranks: &[usize], k: usize) -> f64 {
    if ranks.is_empty() {
        return 0.0;
    }
    ranks.iter().map(|&r| ndcg_gain(r, k)).sum::<f64>() / ranks.len() as f64
}

/// Ranks with ties sharing their average position (1-based).
fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (Pearson correlation of average ranks).
/// Returns 0 when either side is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "spearman inputs must have equal length");
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}
