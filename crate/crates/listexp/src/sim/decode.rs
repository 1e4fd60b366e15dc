//! Decoder scores and list ranking.
//!
//! Every engine (literal Monte-Carlo, closed-form binary fast path, and
//! the exhaustive oracle) scores a codeword through the same functions of
//! the integer joint counts. Identical counts therefore produce bitwise
//! identical score floats everywhere, which keeps tie handling consistent
//! across engines.

use crate::channel::Dmc;
use crate::sim::Codebook;

/// Joint occurrence counts of `(x_i, y_i)` pairs.
pub fn joint_counts(x: &[usize], y: &[usize], kx: usize, ky: usize) -> Vec<Vec<u64>> {
    debug_assert_eq!(x.len(), y.len());
    let mut counts = vec![vec![0u64; ky]; kx];
    for (&a, &b) in x.iter().zip(y.iter()) {
        counts[a][b] += 1;
    }
    counts
}

/// Log-likelihood score `sum a_xy ln W(y|x)`; negative infinity when a
/// zero-probability transition occurs.
pub fn ml_score(counts: &[Vec<u64>], w: &Dmc) -> f64 {
    let mut s = 0.0;
    for (x, row) in counts.iter().enumerate() {
        for (y, &a) in row.iter().enumerate() {
            if a > 0 {
                let p = w.prob(x, y);
                if p == 0.0 {
                    return f64::NEG_INFINITY;
                }
                s += a as f64 * p.ln();
            }
        }
    }
    s
}

/// Empirical mutual information score in the counts domain:
/// `sum a_xy ln(a_xy n / (a_x a_y))`. Channel-agnostic. Monotone in the
/// normalized empirical mutual information for a fixed block length, so
/// rankings agree with it.
pub fn mmi_score(counts: &[Vec<u64>]) -> f64 {
    let kx = counts.len();
    let ky = counts[0].len();
    let mut row_sums = vec![0u64; kx];
    let mut col_sums = vec![0u64; ky];
    let mut n = 0u64;
    for (x, row) in counts.iter().enumerate() {
        for (y, &a) in row.iter().enumerate() {
            row_sums[x] += a;
            col_sums[y] += a;
            n += a;
        }
    }
    let mut s = 0.0;
    for (x, row) in counts.iter().enumerate() {
        for (y, &a) in row.iter().enumerate() {
            if a > 0 {
                s += a as f64
                    * ((a as f64 * n as f64) / (row_sums[x] as f64 * col_sums[y] as f64)).ln();
            }
        }
    }
    s
}

/// Indices of the `l` highest scores, ties broken by smaller index. The
/// result at list size `l` is a prefix of the result at `l + 1`.
pub fn rank_by_score(scores: &[f64], l: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("scores are never NaN")
            .then(a.cmp(&b))
    });
    order.truncate(l.min(scores.len()));
    order
}

/// Maximum-likelihood list decoder: the `l` most likely codewords.
pub fn ml_list_decode(codebook: &Codebook, y: &[usize], l: usize, w: &Dmc) -> Vec<usize> {
    let scores: Vec<f64> = codebook
        .words()
        .iter()
        .map(|x| ml_score(&joint_counts(x, y, w.input_size(), w.output_size()), w))
        .collect();
    rank_by_score(&scores, l)
}

/// Maximum empirical mutual information list decoder; needs no channel.
pub fn mmi_list_decode(codebook: &Codebook, y: &[usize], l: usize, ky: usize) -> Vec<usize> {
    let kx = codebook.alphabet_size();
    let scores: Vec<f64> = codebook
        .words()
        .iter()
        .map(|x| mmi_score(&joint_counts(x, y, kx, ky)))
        .collect();
    rank_by_score(&scores, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Dmc;
    use crate::sim::Codebook;

    fn book(words: Vec<Vec<usize>>) -> Codebook {
        Codebook::from_words(words, 2)
    }

    #[test]
    fn ml_full_list_is_sorted_by_likelihood_then_index() {
        let w = Dmc::bsc(0.1).unwrap();
        // scores: word0 two agreements, word1 zero, word2 two (tie with 0)
        let cb = book(vec![vec![0, 1], vec![1, 0], vec![0, 1]]);
        let y = vec![0, 1];
        assert_eq!(ml_list_decode(&cb, &y, 3, &w), vec![0, 2, 1]);
        // nested prefix
        assert_eq!(ml_list_decode(&cb, &y, 1, &w), vec![0]);
        assert_eq!(ml_list_decode(&cb, &y, 2, &w), vec![0, 2]);
    }

    #[test]
    fn ml_hand_computed_ranking() {
        // n=2, BSC(0.1): likelihoods 0.81 (both match), 0.09, 0.01
        let w = Dmc::bsc(0.1).unwrap();
        let cb = book(vec![vec![1, 1], vec![0, 1], vec![0, 0]]);
        let y = vec![1, 1];
        assert_eq!(ml_list_decode(&cb, &y, 3, &w), vec![0, 1, 2]);
        let s0 = ml_score(&joint_counts(&[1, 1], &y, 2, 2), &w);
        assert!((s0 - 2.0 * 0.9f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn noiseless_channel_ranks_transmitted_first() {
        let w = Dmc::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let cb = book(vec![vec![0, 1, 0], vec![1, 1, 0], vec![0, 0, 0]]);
        let y = vec![0, 1, 0];
        assert_eq!(ml_list_decode(&cb, &y, 1, &w)[0], 0);
    }

    #[test]
    fn mmi_maximal_when_y_equals_a_balanced_codeword() {
        let cb = book(vec![vec![0, 1, 0, 1], vec![0, 0, 1, 1], vec![1, 1, 0, 0]]);
        let y = vec![0, 0, 1, 1];
        let list = mmi_list_decode(&cb, &y, 3, 2);
        assert_eq!(list[0], 1, "perfect coupling attains the entropy bound");
    }

    #[test]
    fn mmi_ties_broken_by_index() {
        let cb = book(vec![vec![0, 1], vec![0, 1], vec![0, 1]]);
        let y = vec![1, 0];
        assert_eq!(mmi_list_decode(&cb, &y, 2, 2), vec![0, 1]);
    }

    #[test]
    fn mmi_hand_case() {
        // x0 = 0011 against y = 0111: joint counts [[1,1],[0,2]],
        // row sums (2,2), column sums (1,3), so the unnormalized score
        // is 1 ln(4/2) + 1 ln(4/6) + 2 ln(8/6)
        let c = joint_counts(&[0, 0, 1, 1], &[0, 1, 1, 1], 2, 2);
        let want = 2.0f64.ln() + (4.0f64 / 6.0).ln() + 2.0 * (8.0f64 / 6.0).ln();
        assert!((mmi_score(&c) - want).abs() < 1e-12);
        // x1 = 0101 against the same y: counts [[1,1],[0,2]] identical
        let c1 = joint_counts(&[0, 1, 0, 1], &[0, 1, 1, 1], 2, 2);
        assert_eq!(mmi_score(&c), mmi_score(&c1));
    }
}
