//! Trial engines.
//!
//! The literal engine plays out each trial in full: draw a codebook,
//! pass the transmitted word through the channel, score every codeword.
//! The fast engine is specific to binary-input binary-output channels:
//! conditioned on the transmitted joint type, a competitor's joint type
//! is a hypergeometric overlap, so the per-codeword comparison outcomes
//! are three-way Bernoulli draws and the exceeder counts are binomial.
//! Both engines compute scores with the same functions of the same
//! integer counts, so the comparison events agree exactly, including
//! ties.
//!
//! Per-trial randomness comes from a counter-based stream split of the
//! master seed, making results independent of worker scheduling.

use crate::opt::LnFactorials;
use crate::sim::codebook::generate_with_rng;
use crate::sim::decode::{joint_counts, ml_score, mmi_score};
use crate::sim::{Decoder, SimConfig};
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

/// Largest message count the literal engine will materialize per trial.
pub const LITERAL_MESSAGE_CAP: u64 = 200_000;

/// Strict (`>`) and weak (`>=`) exceeder counts of one trial.
#[derive(Debug, Clone, Copy)]
pub struct TrialOutcome {
    pub strict: u64,
    pub weak: u64,
}

fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

fn sample_symbol<R: Rng>(row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    row.len() - 1
}

pub(crate) struct LiteralEngine {
    cfg: SimConfig,
    comp: Vec<usize>,
    m: u64,
}

impl LiteralEngine {
    pub fn new(cfg: &SimConfig, comp: Vec<usize>, m: u64) -> Result<Self> {
        if m > LITERAL_MESSAGE_CAP {
            return Err(Error::SizeCap(format!(
                "literal engine materializes {m} codewords per trial, cap is {LITERAL_MESSAGE_CAP}; \
                 use the fast engine (binary channels) or lower the rate"
            )));
        }
        Ok(Self {
            cfg: cfg.clone(),
            comp,
            m,
        })
    }

    pub fn trial(&self, trial: u64) -> TrialOutcome {
        let cfg = &self.cfg;
        let kx = cfg.w.input_size();
        let ky = cfg.w.output_size();
        let mut rng = trial_rng(cfg.master_seed, trial);
        let cb = generate_with_rng(cfg.n, self.m, &self.comp, &mut rng);
        let x0 = cb.word(0);
        let y: Vec<usize> = x0
            .iter()
            .map(|&x| sample_symbol(&cfg.w.rows()[x], &mut rng))
            .collect();
        let scores: Vec<f64> = cb
            .words()
            .iter()
            .map(|x| {
                let counts = joint_counts(x, &y, kx, ky);
                match cfg.decoder {
                    Decoder::Ml => ml_score(&counts, &cfg.w),
                    Decoder::Mmi => mmi_score(&counts),
                }
            })
            .collect();
        let s0 = scores[0];
        let mut strict = 0u64;
        let mut weak = 0u64;
        for &s in &scores[1..] {
            if s > s0 {
                strict += 1;
                weak += 1;
            } else if s == s0 {
                weak += 1;
            }
        }
        // independent guess-count route: rank the transmitted word with
        // every tie broken against it; must equal the weak count plus one
        let guess = 1 + scores
            .iter()
            .enumerate()
            .filter(|&(i, &s)| i != 0 && s >= s0)
            .count() as u64;
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| {
            scores[b]
                .partial_cmp(&scores[a])
                .expect("scores are never NaN")
                .then((a == 0).cmp(&(b == 0)))
                .then(a.cmp(&b))
        });
        let rank = 1 + order.iter().position(|&i| i == 0).unwrap() as u64;
        assert_eq!(rank, guess, "adversarial-tie rank must equal weak count + 1");
        assert_eq!(guess, weak + 1);
        TrialOutcome { strict, weak }
    }
}

pub(crate) struct FastEngine {
    master_seed: u64,
    m_minus_1: u64,
    c0: usize,
    c1: usize,
    /// Channel probabilities of output 1 for each input.
    w01: f64,
    w11: f64,
    /// Per transmitted joint type `(b01, b11)`: probability that an
    /// independent competitor scores strictly above the transmitted word,
    /// and the conditional tie probability given it does not.
    tables: Vec<(f64, f64)>,
}

impl FastEngine {
    pub fn supports(cfg: &SimConfig) -> bool {
        cfg.w.input_size() == 2 && cfg.w.output_size() == 2
    }

    pub fn new(cfg: &SimConfig, comp: Vec<usize>, m: u64) -> Self {
        debug_assert!(Self::supports(cfg));
        let n = cfg.n;
        let (c0, c1) = (comp[0], comp[1]);
        let lf = LnFactorials::new(n);
        let score = |counts: &[Vec<u64>]| match cfg.decoder {
            Decoder::Ml => ml_score(counts, &cfg.w),
            Decoder::Mmi => mmi_score(counts),
        };
        let mut tables = Vec::with_capacity((c0 + 1) * (c1 + 1));
        for b01 in 0..=c0 {
            for b11 in 0..=c1 {
                let n1 = b01 + b11;
                let transmitted = vec![
                    vec![(c0 - b01) as u64, b01 as u64],
                    vec![(c1 - b11) as u64, b11 as u64],
                ];
                let s0 = score(&transmitted);
                let j_lo = (c1 + n1).saturating_sub(n);
                let j_hi = c1.min(n1);
                let mut p_gt = 0.0;
                let mut p_eq = 0.0;
                for j in j_lo..=j_hi {
                    // j >= c1 + n1 - n keeps the zero-zero count nonnegative
                    let counts = vec![
                        vec![(n + j - c1 - n1) as u64, (n1 - j) as u64],
                        vec![(c1 - j) as u64, j as u64],
                    ];
                    let s = score(&counts);
                    if s < s0 {
                        continue;
                    }
                    // hypergeometric overlap of the competitor's ones
                    // with the n1 output-one positions
                    let pmf = (lf.ln_choose(n1, j) + lf.ln_choose(n - n1, c1 - j)
                        - lf.ln_choose(n, c1))
                    .exp();
                    if s > s0 {
                        p_gt += pmf;
                    } else {
                        p_eq += pmf;
                    }
                }
                p_gt = p_gt.min(1.0);
                let p_cond = if p_gt < 1.0 {
                    (p_eq / (1.0 - p_gt)).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                tables.push((p_gt, p_cond));
            }
        }
        Self {
            master_seed: cfg.master_seed,
            m_minus_1: m - 1,
            c0,
            c1,
            w01: cfg.w.prob(0, 1),
            w11: cfg.w.prob(1, 1),
            tables,
        }
    }

    fn binomial<R: Rng>(n: u64, p: f64, rng: &mut R) -> u64 {
        if n == 0 || p <= 0.0 {
            return 0;
        }
        if p >= 1.0 {
            return n;
        }
        Binomial::new(n, p).expect("p validated").sample(rng)
    }

    pub fn trial(&self, trial: u64) -> TrialOutcome {
        let mut rng = trial_rng(self.master_seed, trial);
        let b01 = Self::binomial(self.c0 as u64, self.w01, &mut rng) as usize;
        let b11 = Self::binomial(self.c1 as u64, self.w11, &mut rng) as usize;
        let (p_gt, p_cond) = self.tables[b01 * (self.c1 + 1) + b11];
        let strict = Self::binomial(self.m_minus_1, p_gt, &mut rng);
        let ties = Self::binomial(self.m_minus_1 - strict, p_cond, &mut rng);
        TrialOutcome {
            strict,
            weak: strict + ties,
        }
    }
}

pub(crate) enum EngineImpl {
    Literal(LiteralEngine),
    Fast(FastEngine),
}

impl EngineImpl {
    pub fn trial(&self, trial: u64) -> TrialOutcome {
        match self {
            EngineImpl::Literal(e) => e.trial(trial),
            EngineImpl::Fast(e) => e.trial(trial),
        }
    }
}
