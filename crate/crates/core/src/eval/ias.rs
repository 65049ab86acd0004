//! Intent-awareness score: how evenly a recommendation list spreads over the
//! model's latent intents.
//!
//! Each item is assigned its nearest intent by inner product. For every
//! user, the Shannon entropy of the intent histogram of their list is
//! divided by `ln K`; the score is the mean over users, in `[0, 1]`.

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::model::Model;

/// `argmax_k z_k · e_i`, lowest `k` on ties.
pub fn assign_intent(model: &Model, item: usize) -> Result<usize> {
    let e = model.embed_item(item)?;
    let bank = &model.params.intent_bank;
    let mut best = 0;
    let mut best_score = dot(bank.row(0), e);
    for k in 1..bank.rows() {
        let s = dot(bank.row(k), e);
        if s > best_score {
            best = k;
            best_score = s;
        }
    }
    Ok(best)
}

/// Intent of every catalog item.
pub fn intent_table(model: &Model) -> Vec<usize> {
    (0..model.n_items())
        .map(|i| assign_intent(model, i).expect("index within catalog"))
        .collect()
}

/// Normalized intent entropy of a single list.
pub fn list_intent_entropy(list: &[usize], intent_of: &[usize], n_intents: usize) -> f64 {
    if n_intents <= 1 || list.is_empty() {
        return 0.0;
    }
    let mut counts = vec![0usize; n_intents];
    for &item in list {
        counts[intent_of[item]] += 1;
    }
    let n = list.len() as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    (h / (n_intents as f64).ln()).clamp(0.0, 1.0)
}

/// Mean normalized intent entropy over users' top-k lists.
pub fn ias(lists: &[Vec<usize>], intent_of: &[usize], n_intents: usize) -> Result<f64> {
    if lists.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (u, list) in lists.iter().enumerate() {
        if list.is_empty() {
            return Err(Error::EmptyList(u));
        }
        total += list_intent_entropy(list, intent_of, n_intents);
    }
    Ok(total / lists.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::model::ModelConfig;

    #[test]
    fn assignment_follows_nearest_intent() {
        let mut m = Model::zeros(ModelConfig::new(3, 3, 4, 5).unwrap());
        m.params.intent_bank = Matrix::identity(3);
        m.params.item_embeddings = Matrix::from_fn(4, 3, |r, c| {
            [
                [1.0, 0.0, 0.0],
                [0.0, 0.2, 0.9],
                [0.5, 0.5, 0.5],
                [0.0, 1.0, 0.0],
            ][r][c]
        });
        assert_eq!(assign_intent(&m, 0).unwrap(), 0);
        assert_eq!(assign_intent(&m, 1).unwrap(), 2);
        // Equidistant from all intents: lowest index wins.
        assert_eq!(assign_intent(&m, 2).unwrap(), 0);
        assert_eq!(intent_table(&m), vec![0, 2, 0, 1]);
        assert!(assign_intent(&m, 4).is_err());
    }

    #[test]
    fn ias_extremes_and_half() {
        let intent_of: Vec<usize> = (0..40).map(|i| i % 4).collect();
        let single = vec![vec![0, 4, 8, 12]];
        assert_eq!(ias(&single, &intent_of, 4).unwrap(), 0.0);
        let uniform = vec![vec![0, 1, 2, 3, 4, 5, 6, 7]];
        assert!((ias(&uniform, &intent_of, 4).unwrap() - 1.0).abs() < 1e-12);
        // Five and five over two of four intents: ln 2 / ln 4.
        let half = vec![vec![0, 4, 8, 12, 16, 1, 5, 9, 13, 17]];
        assert!((ias(&half, &intent_of, 4).unwrap() - 0.5).abs() < 1e-9);
        assert!(matches!(
            ias(&[vec![0], vec![]], &intent_of, 4),
            Err(Error::EmptyList(1))
        ));
    }
}
