//! Fixed-composition codebook generation.
//!
//! Each codeword is an independent uniform draw from the type class of
//! the rounded composition `n q`: a fixed template with exactly the
//! composition's symbol counts, shuffled in place per codeword.

use crate::channel::InputDistribution;
use crate::opt::largest_remainder_composition;
use crate::Result;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Codebook {
    words: Vec<Vec<usize>>,
    alphabet: usize,
    /// Set when the composition puts all mass on one symbol of a larger
    /// alphabet: every codeword is then identical.
    pub degenerate: bool,
}

impl Codebook {
    pub fn from_words(words: Vec<Vec<usize>>, alphabet: usize) -> Self {
        Self {
            words,
            alphabet,
            degenerate: false,
        }
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn word(&self, m: usize) -> &[usize] {
        &self.words[m]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }
}

/// The template word realizing a symbol-count composition.
pub fn composition_template(comp: &[usize]) -> Vec<usize> {
    let mut t = Vec::with_capacity(comp.iter().sum());
    for (symbol, &count) in comp.iter().enumerate() {
        t.extend(std::iter::repeat(symbol).take(count));
    }
    t
}

/// Draws `m` independent codewords uniformly from the type class of the
/// rounded composition, using the provided generator.
pub fn generate_with_rng<R: Rng>(
    n: usize,
    m: u64,
    comp: &[usize],
    rng: &mut R,
) -> Codebook {
    debug_assert_eq!(comp.iter().sum::<usize>(), n);
    let template = composition_template(comp);
    let mut words = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let mut word = template.clone();
        word.shuffle(rng);
        words.push(word);
    }
    Codebook {
        words,
        alphabet: comp.len(),
        degenerate: comp.len() > 1 && comp.iter().any(|&c| c == n),
    }
}

/// Public entry mirroring the simulator contract: `m` codewords from the
/// type class of `n q`, deterministic in `seed`.
pub fn generate_fixed_composition_code(
    n: usize,
    m: u64,
    q: &InputDistribution,
    seed: u64,
) -> Result<Codebook> {
    let comp = largest_remainder_composition(q.probs(), n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(generate_with_rng(n, m, &comp, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_codeword_has_the_exact_composition() {
        let q = InputDistribution::new(vec![0.3, 0.5, 0.2]).unwrap();
        let cb = generate_fixed_composition_code(10, 50, &q, 1).unwrap();
        for word in cb.words() {
            let mut counts = [0usize; 3];
            for &s in word {
                counts[s] += 1;
            }
            assert_eq!(counts, [3, 5, 2]);
        }
        assert!(!cb.degenerate);
    }

    #[test]
    fn degenerate_composition_is_flagged() {
        let q = InputDistribution::new(vec![1.0, 0.0]).unwrap();
        let cb = generate_fixed_composition_code(5, 3, &q, 1).unwrap();
        assert!(cb.degenerate);
        for word in cb.words() {
            assert_eq!(word, &vec![0usize; 5]);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let q = InputDistribution::uniform(2);
        let a = generate_fixed_composition_code(8, 16, &q, 42).unwrap();
        let b = generate_fixed_composition_code(8, 16, &q, 42).unwrap();
        assert_eq!(a.words(), b.words());
        let c = generate_fixed_composition_code(8, 16, &q, 43).unwrap();
        assert_ne!(a.words(), c.words());
    }

    #[test]
    fn draws_are_uniform_over_the_type_class() {
        // n=4 binary balanced: 6 possible words; chi-square against the
        // uniform law over them, deterministic via the fixed seed
        let q = InputDistribution::uniform(2);
        let draws = 100_000u64;
        let cb = generate_fixed_composition_code(4, draws, &q, 7).unwrap();
        let mut freq = std::collections::HashMap::new();
        for word in cb.words() {
            *freq.entry(word.clone()).or_insert(0u64) += 1;
        }
        assert_eq!(freq.len(), 6);
        let expect = draws as f64 / 6.0;
        let chi2: f64 = freq
            .values()
            .map(|&c| {
                let d = c as f64 - expect;
                d * d / expect
            })
            .sum();
        // 5 degrees of freedom; 11.07 is the 5% point, leave headroom
        // since the seed is fixed and the statistic is reproducible
        assert!(chi2 < 15.0, "chi-square statistic {chi2}");
    }
}
