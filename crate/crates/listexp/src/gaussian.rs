//! Closed-form expurgated exponents for the memoryless additive Gaussian
//! channel under a power constraint.
//!
//! For tuples of codewords at the same energy, the relevant tuple distance
//! and multi-information depend on the codewords only through their
//! empirical correlation matrix. Symmetrization reduces the matrix to a
//! single off-diagonal value `rho`, whose log-determinant has the closed
//! eigenvalue form `ln(1+rho L) + L ln(1-rho)`. The exponent is then a
//! one-dimensional problem with an explicit piecewise answer: a curvy
//! branch below the tangency rate and an affine tangent of slope `-L`
//! above it.

use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Agreement tolerance between the eigenvalue form of the symmetric
/// log-determinant and the generic dense factorization.
pub const LOGDET_AGREEMENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    /// Energy per symbol.
    pub power: f64,
    /// Noise variance per symbol.
    pub noise_var: f64,
}

impl GaussianSpec {
    pub fn new(power: f64, noise_var: f64) -> Result<Self> {
        if !(power > 0.0) || !power.is_finite() {
            return Err(Error::OutOfRange(format!("power {power} must be positive")));
        }
        if !(noise_var > 0.0) || !noise_var.is_finite() {
            return Err(Error::OutOfRange(format!(
                "noise variance {noise_var} must be positive"
            )));
        }
        Ok(Self { power, noise_var })
    }
}

/// Empirical correlation matrix of an (L+1)-tuple of unit-energy words.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    entries: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    /// Validates symmetry, unit diagonal, off-diagonals in (-1, 1), and
    /// positive definiteness through the leading principal minors.
    pub fn new(entries: Vec<Vec<f64>>) -> Result<Self> {
        let n = entries.len();
        if n < 2 {
            return Err(Error::Dimension(
                "correlation matrix needs dimension at least 2".into(),
            ));
        }
        for row in &entries {
            if row.len() != n {
                return Err(Error::Dimension("correlation matrix must be square".into()));
            }
        }
        for i in 0..n {
            if (entries[i][i] - 1.0).abs() > 1e-12 {
                return Err(Error::OutOfRange(format!(
                    "diagonal entry {} is {}, expected 1",
                    i, entries[i][i]
                )));
            }
            for j in 0..i {
                if (entries[i][j] - entries[j][i]).abs() > 1e-12 {
                    return Err(Error::OutOfRange(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
                if entries[i][j].abs() >= 1.0 {
                    return Err(Error::OutOfRange(format!(
                        "off-diagonal entry {} is outside (-1, 1)",
                        entries[i][j]
                    )));
                }
            }
        }
        for k in 1..=n {
            if leading_minor(&entries, k) <= 0.0 {
                return Err(Error::OutOfRange(format!(
                    "leading principal minor of order {k} is not positive"
                )));
            }
        }
        Ok(Self { entries })
    }

    /// Totally symmetric matrix with common off-diagonal `rho`.
    pub fn symmetric(l: u32, rho: f64) -> Result<Self> {
        let n = l as usize + 1;
        if l == 0 {
            return Err(Error::Dimension("need at least a pair of words".into()));
        }
        let mut entries = vec![vec![rho; n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self::new(entries)
    }

    /// Dimension L+1.
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Tuple order L.
    pub fn order(&self) -> u32 {
        (self.entries.len() - 1) as u32
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn sum_upper_off_diagonal(&self) -> f64 {
        let n = self.size();
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += self.entries[i][j];
            }
        }
        s
    }

    /// Generic log-determinant by Cholesky factorization; independent of
    /// the symmetric eigenvalue shortcut.
    pub fn log_det(&self) -> f64 {
        cholesky_log_det(&self.entries).expect("validated matrix is positive definite")
    }
}

fn leading_minor(a: &[Vec<f64>], k: usize) -> f64 {
    let mut m: Vec<Vec<f64>> = (0..k).map(|i| a[i][..k].to_vec()).collect();
    let mut det = 1.0;
    for c in 0..k {
        let mut piv = c;
        for r in (c + 1)..k {
            if m[r][c].abs() > m[piv][c].abs() {
                piv = r;
            }
        }
        if m[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            m.swap(piv, c);
            det = -det;
        }
        det *= m[c][c];
        for r in (c + 1)..k {
            let f = m[r][c] / m[c][c];
            for col in c..k {
                m[r][col] -= f * m[c][col];
            }
        }
    }
    det
}

fn cholesky_log_det(a: &[Vec<f64>]) -> Option<f64> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    let mut log_det = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i][j] = s.sqrt();
                log_det += s.ln();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(log_det)
}

/// Normalized tuple-distance growth rate for a general correlation matrix:
/// `(L S) / (2 sigma^2 (L+1)^2) * (L+1 - (2/L) sum_{i<j} rho_ij)`.
pub fn gaussian_tuple_distance_rate(corr: &CorrelationMatrix, spec: &GaussianSpec) -> f64 {
    let l = corr.order() as f64;
    let lead = l * spec.power / (2.0 * spec.noise_var * (l + 1.0) * (l + 1.0));
    lead * (l + 1.0 - (2.0 / l) * corr.sum_upper_off_diagonal())
}

/// Distance rate of the totally symmetric matrix: `S L (1-rho) / (2 sigma^2 (L+1))`.
/// Continuous extension of [`gaussian_tuple_distance_rate`] to the closed
/// interval `[-1, 1]` (identical words at 1, antipodal at -1).
pub fn symmetric_distance_rate(rho: f64, l: u32, spec: &GaussianSpec) -> f64 {
    let lf = l as f64;
    spec.power * lf * (1.0 - rho) / (2.0 * spec.noise_var * (lf + 1.0))
}

/// `ln(1+rho L) + L ln(1-rho)`, the log-determinant of the totally
/// symmetric correlation matrix via its eigenvalues.
pub fn symmetric_logdet(rho: f64, l: u32) -> Result<f64> {
    let lf = l as f64;
    if l == 0 {
        return Err(Error::Dimension("need at least a pair of words".into()));
    }
    if !(rho > -1.0 / lf && rho < 1.0) {
        return Err(Error::OutOfRange(format!(
            "rho {rho} outside the positive-definite range (-1/{l}, 1)"
        )));
    }
    Ok((1.0 + rho * lf).ln() + lf * (1.0 - rho).ln())
}

/// Multi-information rate of the symmetric tuple: `-logdet / 2`.
fn symmetric_multi_info(rho: f64, l: u32) -> f64 {
    let lf = l as f64;
    -0.5 * ((1.0 + rho * lf).ln() + lf * (1.0 - rho).ln())
}

/// Solves `-ln(1+rho L)/2 - L ln(1-rho)/2 = L rate` for `rho` in `[0, 1)`.
///
/// Closed form for L=1 and L=2 (principal-branch arccosine); monotone
/// bisection with Newton polish otherwise. The defining-equation residual
/// is at most 1e-12 in all branches.
pub fn gaussian_rho_of_rate(rate: f64, l: u32) -> Result<f64> {
    if l == 0 {
        return Err(Error::Dimension("need at least a pair of words".into()));
    }
    if !(rate >= 0.0) {
        return Err(Error::OutOfRange(format!("rate {rate} must be nonnegative")));
    }
    if rate == 0.0 {
        return Ok(0.0);
    }
    match l {
        1 => Ok((1.0 - (-2.0 * rate).exp()).sqrt()),
        2 => {
            let s = (1.0 - (-4.0 * rate).exp()).sqrt();
            Ok(s / (2.0 * ((-s).acos() / 3.0).cos()))
        }
        _ => {
            let lf = l as f64;
            let h = |rho: f64| symmetric_multi_info(rho, l) - lf * rate;
            let mut hi = 0.5;
            while h(hi) < 0.0 {
                hi = 0.5 * (1.0 + hi);
            }
            let mut rho = crate::opt::bisect_root(h, 0.0, hi, 1e-12, 200);
            // Newton polish to push the equation residual below 1e-12
            for _ in 0..8 {
                let grad = 0.5 * lf * (1.0 / (1.0 - rho) - 1.0 / (1.0 + rho * lf));
                if grad <= 0.0 {
                    break;
                }
                rho = (rho - h(rho) / grad).clamp(0.0, 1.0 - 1e-16);
            }
            Ok(rho)
        }
    }
}

/// Tangency point of the affine continuation: the rate `R0` at which the
/// curvy branch has slope exactly `-L`, found by bisection on the rate
/// using the analytic slope from the constraint equation, together with
/// the correlation `rho0` there.
pub fn gaussian_tangency(l: u32, spec: &GaussianSpec) -> Result<(f64, f64)> {
    if l == 0 {
        return Err(Error::Dimension("need at least a pair of words".into()));
    }
    let lf = l as f64;
    let c = spec.power * lf / (2.0 * spec.noise_var * (lf + 1.0));
    // slope of the curvy branch at rate R: -c * drho/dR with
    // dR/drho = rho (L+1) / (2 (1-rho)(1+rho L))
    let slope = |rate: f64| -> Result<f64> {
        let rho = gaussian_rho_of_rate(rate, l)?;
        Ok(-c * 2.0 * (1.0 - rho) * (1.0 + rho * lf) / (rho * (lf + 1.0)))
    };
    // slope rises from -infinity at 0+ toward 0; bracket the -L crossing
    let mut lo = 1e-14;
    let mut hi = 0.1;
    while slope(hi)? < -lf {
        hi *= 2.0;
    }
    while slope(lo)? > -lf {
        lo *= 0.5;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-10 * (1.0 + hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if slope(mid)? < -lf {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r0 = 0.5 * (lo + hi);
    Ok((gaussian_rho_of_rate(r0, l)?, r0))
}

/// Curvy branch of the exponent: tuple distance at the constraint-active
/// correlation `varrho(R)`. Valid below the tangency rate.
pub fn gaussian_curvy_exponent(rate: f64, l: u32, spec: &GaussianSpec) -> Result<f64> {
    let rho = gaussian_rho_of_rate(rate, l)?;
    Ok(symmetric_distance_rate(rho, l, spec))
}

/// Piecewise expurgated exponent for the Gaussian channel: the curvy
/// branch below the tangency rate `R0`, and the tangent line of slope
/// `-L` at and above it.
pub fn gaussian_ckm_exponent(rate: f64, l: u32, spec: &GaussianSpec) -> Result<f64> {
    if !(rate >= 0.0) {
        return Err(Error::OutOfRange(format!("rate {rate} must be nonnegative")));
    }
    let (rho0, r0) = gaussian_tangency(l, spec)?;
    if rate < r0 {
        gaussian_curvy_exponent(rate, l, spec)
    } else {
        let lf = l as f64;
        Ok(symmetric_distance_rate(rho0, l, spec) + symmetric_multi_info(rho0, l)
            - lf * rate)
    }
}

/// Outcome of the random search for a correlation matrix beating the
/// symmetric optimizer.
#[derive(Debug, Clone)]
pub struct SymmetryReport {
    pub trials: usize,
    pub violations: usize,
    /// Most negative margin `J(sample) - E` seen (negative would be a
    /// violation); positive means every sample stayed above the optimum.
    pub worst_margin: f64,
    pub ok: bool,
}

/// Samples random feasible correlation matrices and verifies that none
/// beats the symmetric piecewise optimum by more than 1e-8. Also checks
/// the Jensen step: symmetrizing any sample never increases the
/// objective. Deterministic for a fixed `seed`.
pub fn symmetric_optimality_check(
    l: u32,
    spec: &GaussianSpec,
    rate: f64,
    trials: usize,
    seed: u64,
) -> Result<SymmetryReport> {
    if l == 0 || l > 6 {
        return Err(Error::OutOfRange(format!("order {l} outside 1..=6")));
    }
    let lf = l as f64;
    let n = l as usize + 1;
    let best = gaussian_ckm_exponent(rate, l, spec)?;
    let budget = -2.0 * lf * rate; // feasibility: log-det at least this
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut worst = f64::INFINITY;

    let objective = |corr: &CorrelationMatrix| -> f64 {
        gaussian_tuple_distance_rate(corr, spec) - 0.5 * corr.log_det() - lf * rate
    };

    for _ in 0..trials {
        // Gram matrix of random unit vectors: positive definite with unit
        // diagonal almost surely
        let vecs: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let mut v: Vec<f64> =
                    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                for x in &mut v {
                    *x /= norm;
                }
                v
            })
            .collect();
        let mut entries = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                entries[i][j] = vecs[i]
                    .iter()
                    .zip(vecs[j].iter())
                    .map(|(a, b)| a * b)
                    .sum::<f64>();
            }
            entries[i][i] = 1.0;
        }
        // shrink toward the identity until the log-det constraint holds;
        // the boundary is where the optimum lives, so keep samples there
        let feasible_at = |t: f64| -> Option<f64> {
            let mixed: Vec<Vec<f64>> = entries
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, &v)| if i == j { 1.0 } else { (1.0 - t) * v })
                        .collect()
                })
                .collect();
            cholesky_log_det(&mixed).filter(|&ld| ld >= budget).map(|_| t)
        };
        let t = if feasible_at(0.0).is_some() {
            0.0
        } else {
            let mut lo = 0.0;
            let mut hi = 1.0;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if feasible_at(mid).is_some() {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        };
        let sample: Vec<Vec<f64>> = entries
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, &v)| if i == j { 1.0 } else { (1.0 - t) * v })
                    .collect()
            })
            .collect();
        let corr = match CorrelationMatrix::new(sample) {
            Ok(c) => c,
            Err(_) => continue, // degenerate draw
        };
        let j = objective(&corr);
        let margin = j - best;
        worst = worst.min(margin);
        if margin < -1e-8 {
            violations += 1;
        }
        // Jensen symmetrization step never increases the objective
        let avg = corr.sum_upper_off_diagonal() / (n * (n - 1) / 2) as f64;
        if let Ok(sym) = CorrelationMatrix::symmetric(l, avg) {
            debug_assert!(objective(&sym) <= j + 1e-10);
        }
    }
    Ok(SymmetryReport {
        trials,
        violations,
        worst_margin: worst,
        ok: violations == 0,
    })
}
