//! Exhaustive ground truth for tiny instances.
//!
//! For binary alphabets with `n <= 6` and `M <= 4`, the ensemble average
//! list-error probability is computed exactly: enumerate the transmitted
//! codeword over the type class, every channel output with its
//! probability, and every competitor tuple over the type class, weighted
//! uniformly. Scores go through the same count-based functions as the
//! Monte-Carlo engines.

use crate::sim::decode::{joint_counts, ml_score, mmi_score};
use crate::sim::{Decoder, SimConfig};
use crate::{Error, Result};

/// Enumerates the binary type class with `c1` ones among `n` positions.
fn binary_type_class(n: usize, c1: usize) -> Vec<Vec<usize>> {
    let mut words = Vec::new();
    for bits in 0u32..(1 << n) {
        if bits.count_ones() as usize == c1 {
            words.push((0..n).map(|i| ((bits >> i) & 1) as usize).collect());
        }
    }
    words
}

/// Exact ensemble-average list-error probability by full enumeration.
pub fn exact_list_error(cfg: &SimConfig) -> Result<f64> {
    cfg.validate()?;
    if cfg.w.input_size() != 2 || cfg.w.output_size() != 2 {
        return Err(Error::SizeCap(
            "exhaustive oracle supports binary alphabets only".into(),
        ));
    }
    if cfg.n > 6 {
        return Err(Error::SizeCap(format!(
            "exhaustive oracle supports n <= 6, got {}",
            cfg.n
        )));
    }
    let m = cfg.message_count();
    if m > 4 {
        return Err(Error::SizeCap(format!(
            "exhaustive oracle supports M <= 4, got {m}"
        )));
    }
    let l = cfg.list_size()? as u64;
    let n = cfg.n;
    let comp = cfg.composition();
    let class = binary_type_class(n, comp[1]);
    let t = class.len();
    let score = |x: &[usize], y: &[usize]| {
        let counts = joint_counts(x, y, 2, 2);
        match cfg.decoder {
            Decoder::Ml => ml_score(&counts, &cfg.w),
            Decoder::Mmi => mmi_score(&counts),
        }
    };

    let competitors = (m - 1) as usize;
    let mut total = 0.0;
    for x0 in &class {
        // all 2^n outputs with their channel probabilities
        for ybits in 0u32..(1 << n) {
            let y: Vec<usize> = (0..n).map(|i| ((ybits >> i) & 1) as usize).collect();
            let mut py = 1.0;
            for (&xs, &ys) in x0.iter().zip(y.iter()) {
                py *= cfg.w.prob(xs, ys);
            }
            if py == 0.0 {
                continue;
            }
            let s0 = score(x0, &y);
            let exceed_flags: Vec<bool> = class.iter().map(|x| score(x, &y) > s0).collect();
            // every competitor tuple, uniformly weighted
            let mut error_tuples = 0u64;
            let mut idx = vec![0usize; competitors];
            'tuples: loop {
                let strict = idx.iter().filter(|&&i| exceed_flags[i]).count() as u64;
                if strict >= l {
                    error_tuples += 1;
                }
                for slot in (0..competitors).rev() {
                    idx[slot] += 1;
                    if idx[slot] < t {
                        continue 'tuples;
                    }
                    idx[slot] = 0;
                    if slot == 0 {
                        break 'tuples;
                    }
                }
            }
            total += py * error_tuples as f64 / (t as f64).powi(competitors as i32);
        }
    }
    Ok(total / t as f64)
}
