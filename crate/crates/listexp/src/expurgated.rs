//! Expurgated exponents in the constrained tuple-distance form: the
//! Bhattacharyya distance extended to `L+1` variables, the minimization of
//! expected distance plus multi-information over joints with equal
//! marginals, the distortion-rate curve, and the critical rate.
//!
//! The solver exploits the structure of the inner problem: with all
//! marginals pinned to `Q`, the multi-information differs from the negative
//! joint entropy by a constant, so minimizing `E[d] + (1+mu) I(P)` over the
//! constraint set is a maximum-entropy problem whose solution is an
//! exponential family `P ∝ exp(-d/(1+mu)) * prod_i a_i(x_i)`. Iterative
//! proportional fitting on that kernel (in the log domain) finds the
//! potentials `a_i`; a bisection on `mu >= 0` then enforces the
//! multi-information budget `L R`.

use crate::channel::{Dmc, InputDistribution, TupleJoint};
use crate::info::multi_information;
use crate::opt::{bisect_root, logsumexp, maximize_on_simplex};
use crate::{Error, Result};

/// Dense tensor cap for building a tuple distance table.
pub const DISTANCE_TABLE_CAP: usize = 1_000_000;

/// Dense tensor cap for the constrained solver (IPF sweeps are a constant
/// factor heavier than a table build).
pub const SOLVER_TENSOR_CAP: usize = 100_000;

/// Tuple Bhattacharyya distances `d(x_0, ..., x_L)`, stored with the same
/// index layout as [`TupleJoint`] (coordinate 0 fastest).
#[derive(Debug, Clone)]
pub struct TupleDistanceTable {
    dims: usize,
    order: usize,
    table: Vec<f64>,
}

impl TupleDistanceTable {
    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Number of variables, i.e. `L + 1`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn get(&self, coords: &[usize]) -> f64 {
        debug_assert_eq!(coords.len(), self.order);
        let mut idx = 0;
        for &c in coords.iter().rev() {
            idx = idx * self.dims + c;
        }
        self.table[idx]
    }

    /// `E[d]` under independent draws from `q` in every coordinate.
    pub fn expectation_under_product(&self, q: &InputDistribution) -> f64 {
        let mut acc = 0.0;
        let mut coords = vec![0usize; self.order];
        for (idx, &d) in self.table.iter().enumerate() {
            let mut rem = idx;
            let mut w = 1.0;
            for c in coords.iter_mut() {
                *c = rem % self.dims;
                rem /= self.dims;
                w *= q.prob(*c);
            }
            if w > 0.0 {
                if d.is_infinite() {
                    return f64::INFINITY;
                }
                acc += w * d;
            }
        }
        acc
    }
}

/// `d(x_0,...,x_L) = -ln sum_y prod_i W(y|x_i)^{1/(L+1)}`, the Bhattacharyya
/// distance extended from two to `L+1` variables. Zero on the diagonal,
/// symmetric under coordinate permutations, possibly infinite when the rows
/// have disjoint supports.
pub fn tuple_bhattacharyya(w: &Dmc, l: u32) -> Result<TupleDistanceTable> {
    let dims = w.input_size();
    let order = l as usize + 1;
    let size = dims
        .checked_pow(order as u32)
        .filter(|&s| s <= DISTANCE_TABLE_CAP)
        .ok_or_else(|| {
            Error::SizeCap(format!(
                "distance table {dims}^{order} exceeds cap {DISTANCE_TABLE_CAP}"
            ))
        })?;
    let inv = 1.0 / order as f64;
    let mut table = vec![0.0; size];
    let mut coords = vec![0usize; order];
    for (idx, slot) in table.iter_mut().enumerate() {
        let mut rem = idx;
        for c in coords.iter_mut() {
            *c = rem % dims;
            rem /= dims;
        }
        let mut sum = 0.0;
        for y in 0..w.output_size() {
            let mut prod = 1.0;
            for &x in &coords {
                prod *= w.prob(x, y).powf(inv);
                if prod == 0.0 {
                    break;
                }
            }
            sum += prod;
        }
        *slot = if sum > 0.0 { (-sum.ln()).max(0.0) } else { f64::INFINITY };
    }
    Ok(TupleDistanceTable { dims, order, table })
}

/// Output of the constrained minimizations over tuple joints.
#[derive(Debug, Clone)]
pub struct CkmSolve {
    /// The reported exponent (or distortion) value in nats.
    pub value: f64,
    /// Lagrange multiplier of the multi-information budget at the optimum;
    /// zero when the budget is slack.
    pub multiplier: f64,
    /// The minimizing joint distribution.
    pub joint: TupleJoint,
    pub multi_info: f64,
    pub expected_distance: f64,
    pub converged: bool,
}

/// Fits the exponential family `exp(ln_kernel + sum_i u_i(x_i))` to have
/// marginal `q` on every axis, in the log domain. Returns the joint and a
/// convergence flag (max marginal deviation at most 1e-9).
fn ipf_fit(
    ln_kernel: &[f64],
    dims: usize,
    order: usize,
    q: &InputDistribution,
    max_sweeps: usize,
) -> (TupleJoint, bool) {
    let ln_q: Vec<f64> = q
        .probs()
        .iter()
        .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
        .collect();
    let mut ln_p = ln_kernel.to_vec();
    // start from a normalized tensor so early marginals are comparable to q
    let z = logsumexp(&ln_p);
    debug_assert!(z.is_finite(), "kernel must have positive mass");
    for v in ln_p.iter_mut() {
        *v -= z;
    }
    let mut converged = false;
    let mut bucket = vec![f64::NEG_INFINITY; dims];
    for _ in 0..max_sweeps {
        let mut worst: f64 = 0.0;
        for axis in 0..order {
            let stride = dims.pow(axis as u32);
            // log-marginal of this axis
            for b in bucket.iter_mut() {
                *b = f64::NEG_INFINITY;
            }
            for (idx, &v) in ln_p.iter().enumerate() {
                let c = (idx / stride) % dims;
                // incremental logsumexp accumulation
                let m = bucket[c];
                bucket[c] = if v <= m {
                    m + (1.0 + (v - m).exp()).ln()
                } else {
                    v + (1.0 + (m - v).exp()).ln()
                };
            }
            for (x, &m) in bucket.iter().enumerate() {
                let dev = (m.exp() - q.prob(x)).abs();
                worst = worst.max(dev);
            }
            for (idx, v) in ln_p.iter_mut().enumerate() {
                let c = (idx / stride) % dims;
                if bucket[c] == f64::NEG_INFINITY {
                    // axis value unused by the kernel; only legal when q
                    // gives it no mass
                    continue;
                }
                *v += ln_q[c] - bucket[c];
            }
        }
        if worst < 1e-13 {
            converged = true;
            break;
        }
    }
    let mut table: Vec<f64> = ln_p.iter().map(|&v| v.exp()).collect();
    let mass: f64 = table.iter().sum();
    for v in table.iter_mut() {
        *v /= mass;
    }
    let joint = TupleJoint::new(order, dims, table).expect("IPF output is a distribution");
    (joint, converged)
}

fn expected_distance(joint: &TupleJoint, d: &TupleDistanceTable) -> f64 {
    let mut acc = 0.0;
    for (&p, &dist) in joint.table().iter().zip(d.table().iter()) {
        if p > 0.0 {
            if dist.is_infinite() {
                return f64::INFINITY;
            }
            acc += p * dist;
        }
    }
    acc
}

struct InnerSolve {
    joint: TupleJoint,
    multi_info: f64,
    expected_distance: f64,
    converged: bool,
}

/// Minimizes `E[d] + beta * I(P)` over joints with all marginals `q`, for
/// `beta > 0`, via the exponential-family fixed point.
fn inner_min(d: &TupleDistanceTable, q: &InputDistribution, beta: f64) -> InnerSolve {
    debug_assert!(beta > 0.0);
    let ln_kernel: Vec<f64> = d
        .table()
        .iter()
        .map(|&v| if v.is_infinite() { f64::NEG_INFINITY } else { -v / beta })
        .collect();
    let (joint, converged) = ipf_fit(&ln_kernel, d.dims(), d.order(), q, 100_000);
    InnerSolve {
        multi_info: multi_information(&joint),
        expected_distance: expected_distance(&joint, d),
        converged,
        joint,
    }
}

fn product_solve(d: &TupleDistanceTable, q: &InputDistribution) -> InnerSolve {
    let joint = TupleJoint::product_of(q, d.order());
    InnerSolve {
        multi_info: multi_information(&joint),
        expected_distance: expected_distance(&joint, d),
        converged: true,
        joint,
    }
}

fn check_solver_cap(w: &Dmc, l: u32) -> Result<()> {
    let order = l as usize + 1;
    let ok = w
        .input_size()
        .checked_pow(order as u32)
        .map(|s| s <= SOLVER_TENSOR_CAP)
        .unwrap_or(false);
    if ok {
        Ok(())
    } else {
        Err(Error::SizeCap(format!(
            "solver tensor {}^{order} exceeds cap {SOLVER_TENSOR_CAP}",
            w.input_size()
        )))
    }
}

/// The list expurgated exponent in constrained form at fixed composition:
/// minimum of `E[d] + I(P) - L R` over tuple joints `P` with every marginal
/// equal to `q` and multi-information at most `L R`.
pub fn ckm_exponent(rate: f64, l: u32, w: &Dmc, q: &InputDistribution) -> Result<CkmSolve> {
    if rate < 0.0 {
        return Err(Error::OutOfRange(format!("rate {rate} is negative")));
    }
    if l == 0 {
        return Err(Error::OutOfRange("list size must be positive".into()));
    }
    check_solver_cap(w, l)?;
    let d = tuple_bhattacharyya(w, l)?;
    let budget = l as f64 * rate;

    if budget <= 1e-12 {
        // zero budget forces an independent joint
        let s = product_solve(&d, q);
        return Ok(CkmSolve {
            value: s.expected_distance,
            multiplier: 0.0,
            joint: s.joint,
            multi_info: s.multi_info,
            expected_distance: s.expected_distance,
            converged: true,
        });
    }

    // mu = 0: unconstrained minimizer of E[d] + I
    let base = inner_min(&d, q, 1.0);
    if base.multi_info <= budget + 1e-10 {
        return Ok(CkmSolve {
            value: base.expected_distance + base.multi_info - budget,
            multiplier: 0.0,
            multi_info: base.multi_info,
            expected_distance: base.expected_distance,
            converged: base.converged,
            joint: base.joint,
        });
    }

    // the budget binds; bisect the multiplier so that I(P) = budget
    let mut hi = 1.0;
    let mut bracketed = false;
    for _ in 0..60 {
        if inner_min(&d, q, 1.0 + hi).multi_info <= budget {
            bracketed = true;
            break;
        }
        hi *= 2.0;
    }
    if !bracketed {
        return Err(Error::NonConvergence(
            "no multiplier brings the multi-information within budget".into(),
        ));
    }
    let mu = bisect_root(
        |m| inner_min(&d, q, 1.0 + m).multi_info - budget,
        0.0,
        hi,
        1e-13,
        200,
    );
    let fin = inner_min(&d, q, 1.0 + mu);
    let feasible = fin.multi_info <= budget + 1e-8;
    Ok(CkmSolve {
        value: fin.expected_distance + fin.multi_info - budget,
        multiplier: mu,
        multi_info: fin.multi_info,
        expected_distance: fin.expected_distance,
        converged: fin.converged && feasible,
        joint: fin.joint,
    })
}

/// Maximizes [`ckm_exponent`] over the input distribution.
pub fn ckm_exponent_optimized(rate: f64, l: u32, w: &Dmc) -> Result<(InputDistribution, CkmSolve)> {
    check_solver_cap(w, l)?;
    let dim = w.input_size();
    let best = maximize_on_simplex(
        |p| match InputDistribution::new(p.to_vec()) {
            Ok(q) => ckm_exponent(rate, l, w, &q).map(|s| s.value).unwrap_or(f64::NEG_INFINITY),
            Err(_) => f64::NEG_INFINITY,
        },
        dim,
        1e-10,
    );
    let q = InputDistribution::new(best.point)?;
    let solve = ckm_exponent(rate, l, w, &q)?;
    Ok((q, solve))
}

/// Distortion-rate curve: the minimum of `E[d]` alone over the same
/// constraint set (marginals `q`, multi-information at most `L R`).
pub fn distortion_rate(rate: f64, l: u32, w: &Dmc, q: &InputDistribution) -> Result<CkmSolve> {
    if rate < 0.0 {
        return Err(Error::OutOfRange(format!("rate {rate} is negative")));
    }
    if l == 0 {
        return Err(Error::OutOfRange("list size must be positive".into()));
    }
    check_solver_cap(w, l)?;
    let d = tuple_bhattacharyya(w, l)?;
    let budget = l as f64 * rate;

    if budget <= 1e-12 {
        let s = product_solve(&d, q);
        return Ok(CkmSolve {
            value: s.expected_distance,
            multiplier: f64::INFINITY,
            multi_info: s.multi_info,
            expected_distance: s.expected_distance,
            converged: true,
            joint: s.joint,
        });
    }

    // here the multiplier scales E[d] + mu I; small mu approaches the raw
    // transport minimum of E[d] under the marginal constraints
    let mu_lo = 1e-4;
    let lo = inner_min(&d, q, mu_lo);
    if lo.multi_info <= budget {
        return Ok(CkmSolve {
            value: lo.expected_distance,
            multiplier: mu_lo,
            multi_info: lo.multi_info,
            expected_distance: lo.expected_distance,
            converged: lo.converged,
            joint: lo.joint,
        });
    }
    let mut hi = 1.0;
    let mut bracketed = false;
    for _ in 0..60 {
        if inner_min(&d, q, hi).multi_info <= budget {
            bracketed = true;
            break;
        }
        hi *= 2.0;
    }
    if !bracketed {
        return Err(Error::NonConvergence(
            "no multiplier brings the multi-information within budget".into(),
        ));
    }
    let mu = bisect_root(
        |m| inner_min(&d, q, m).multi_info - budget,
        mu_lo,
        hi,
        1e-13,
        200,
    );
    let fin = inner_min(&d, q, mu);
    Ok(CkmSolve {
        value: fin.expected_distance,
        multiplier: mu,
        multi_info: fin.multi_info,
        expected_distance: fin.expected_distance,
        converged: fin.converged && fin.multi_info <= budget + 1e-8,
        joint: fin.joint,
    })
}

/// Critical rate `I*/L`, where `I*` is the multi-information of the
/// unconstrained (infinite-budget) minimizer of `E[d] + I(P)`. Beyond it
/// the exponent is affine in the rate with slope `-L`.
pub fn ckm_critical_rate(l: u32, w: &Dmc, q: &InputDistribution) -> Result<f64> {
    if l == 0 {
        return Err(Error::OutOfRange("list size must be positive".into()));
    }
    check_solver_cap(w, l)?;
    let d = tuple_bhattacharyya(w, l)?;
    let base = inner_min(&d, q, 1.0);
    if !base.converged {
        return Err(Error::NonConvergence(
            "unconstrained tuple minimization did not converge".into(),
        ));
    }
    Ok(base.multi_info / l as f64)
}
