//! Entropies, divergences, mutual information, multi-information, and
//! channel capacity. Values are in nats; `0 ln 0 = 0` throughout, and
//! `x ln(x/0) = +inf` for `x > 0` is returned as `f64::INFINITY` rather
//! than raised as an error.

use crate::channel::{
    ConditionalChannel, Dmc, InputDistribution, JointType, RowStochastic, TupleJoint,
};
use crate::{Error, Result};

/// Shannon entropy of a (sub)probability vector.
pub fn entropy(p: &[f64]) -> f64 {
    let mut h = 0.0;
    for &v in p {
        if v > 0.0 {
            h -= v * v.ln();
        }
    }
    h
}

/// Kullback-Leibler divergence between two vectors of equal length.
/// Infinite when `p` puts mass where `q` has none.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    let mut d = 0.0;
    for (&a, &b) in p.iter().zip(q.iter()) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            d += a * (a / b).ln();
        }
    }
    d.max(0.0)
}

/// Output marginal `V(y) = sum_x q(x) w(y|x)`.
pub fn output_marginal<W: RowStochastic>(q: &InputDistribution, w: &W) -> Vec<f64> {
    let rows = w.stochastic_rows();
    let mut v = vec![0.0; rows[0].len()];
    for (x, row) in rows.iter().enumerate() {
        let qx = q.prob(x);
        if qx == 0.0 {
            continue;
        }
        for (slot, &p) in v.iter_mut().zip(row.iter()) {
            *slot += qx * p;
        }
    }
    v
}

/// Mutual information `I(X;Y)` for `X ~ q` and `Y|X ~ w`.
pub fn mutual_information<W: RowStochastic>(q: &InputDistribution, w: &W) -> Result<f64> {
    let rows = w.stochastic_rows();
    if rows.len() != q.len() {
        return Err(Error::Dimension(format!(
            "input distribution has {} symbols, channel has {} rows",
            q.len(),
            rows.len()
        )));
    }
    let v = output_marginal(q, w);
    let mut i = 0.0;
    for (x, row) in rows.iter().enumerate() {
        let qx = q.prob(x);
        if qx == 0.0 {
            continue;
        }
        for (y, &p) in row.iter().enumerate() {
            if p > 0.0 {
                i += qx * p * (p / v[y]).ln();
            }
        }
    }
    Ok(i.max(0.0))
}

/// Conditional divergence `D(pt || w | q)`. Infinite (not an error) when
/// `pt` puts mass outside the support of `w` on a `q`-positive row.
pub fn conditional_divergence(
    pt: &ConditionalChannel,
    w: &Dmc,
    q: &InputDistribution,
) -> Result<f64> {
    if pt.input_size() != w.input_size()
        || pt.output_size() != w.output_size()
        || q.len() != w.input_size()
    {
        return Err(Error::Dimension(format!(
            "test channel {}x{}, channel {}x{}, input distribution {}",
            pt.input_size(),
            pt.output_size(),
            w.input_size(),
            w.output_size(),
            q.len()
        )));
    }
    let mut d = 0.0;
    for x in 0..w.input_size() {
        let qx = q.prob(x);
        if qx == 0.0 {
            continue;
        }
        let term = kl_divergence(&pt.rows()[x], &w.rows()[x]);
        if term.is_infinite() {
            return Ok(f64::INFINITY);
        }
        d += qx * term;
    }
    Ok(d.max(0.0))
}

/// Multi-information `sum_i H(X_i) - H(X_0, ..., X_L)`, the natural
/// extension of mutual information to tuples.
pub fn multi_information(pj: &TupleJoint) -> f64 {
    let mut h_sum = 0.0;
    for axis in 0..pj.order() {
        h_sum += entropy(&pj.marginal(axis));
    }
    (h_sum - entropy(pj.table())).max(0.0)
}

/// Multi-information computed the other way, as the divergence from the
/// joint to the product of its marginals. Agrees with
/// [`multi_information`] to high accuracy; kept as an independent route
/// for cross-checking.
pub fn multi_information_kl(pj: &TupleJoint) -> f64 {
    let marginals: Vec<Vec<f64>> = (0..pj.order()).map(|a| pj.marginal(a)).collect();
    let dims = pj.dims();
    let mut coords = vec![0usize; pj.order()];
    let mut d = 0.0;
    for (idx, &p) in pj.table().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let mut rem = idx;
        let mut prod = 1.0;
        for (axis, c) in coords.iter_mut().enumerate() {
            *c = rem % dims;
            rem /= dims;
            prod *= marginals[axis][*c];
        }
        if prod <= 0.0 {
            return f64::INFINITY;
        }
        d += p * (p / prod).ln();
    }
    d.max(0.0)
}

/// Binary divergence `a ln(a/b) + (1-a) ln((1-a)/(1-b))`.
pub fn binary_divergence(a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
        return Err(Error::OutOfRange(format!(
            "binary divergence arguments ({a}, {b}) outside [0,1]"
        )));
    }
    let mut d = 0.0;
    if a > 0.0 {
        if b == 0.0 {
            return Ok(f64::INFINITY);
        }
        d += a * (a / b).ln();
    }
    if a < 1.0 {
        if b == 1.0 {
            return Ok(f64::INFINITY);
        }
        d += (1.0 - a) * ((1.0 - a) / (1.0 - b)).ln();
    }
    Ok(d.max(0.0))
}

/// Empirical mutual information of a joint type: the mutual information of
/// the normalized type, computed through the same code path.
pub fn empirical_mutual_information(t: &JointType) -> f64 {
    let (q, rows) = t.normalized();
    mutual_information(&q, &rows).expect("normalized type has consistent shape")
}

/// Channel capacity `max_Q I(Q, W)` by the classical alternating
/// maximization, together with the achieving input distribution.
pub fn capacity(w: &Dmc, tol: f64, max_iter: usize) -> (f64, InputDistribution) {
    let k = w.input_size();
    let mut q = vec![1.0 / k as f64; k];
    let mut cap = 0.0;
    for _ in 0..max_iter {
        let qd = InputDistribution::new(q.clone()).expect("valid interior point");
        let v = output_marginal(&qd, w);
        // exponent of the per-symbol divergence D(W(.|x) || V)
        let mut d = vec![0.0; k];
        for (x, row) in w.rows().iter().enumerate() {
            let mut acc = 0.0;
            for (y, &p) in row.iter().enumerate() {
                if p > 0.0 {
                    acc += p * (p / v[y]).ln();
                }
            }
            d[x] = acc;
        }
        // certified bracket: I(q) <= C <= max_x D_x, gap -> 0 under the
        // multiplicative update
        let lo = d.iter().zip(q.iter()).map(|(&dx, &qx)| qx * dx).sum::<f64>();
        let hi = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        cap = lo;
        if hi - lo < tol {
            cap = hi.min(lo + tol);
            break;
        }
        let mut z = 0.0;
        for (qx, &dx) in q.iter_mut().zip(d.iter()) {
            *qx *= dx.exp();
            z += *qx;
        }
        for qx in q.iter_mut() {
            *qx /= z;
        }
    }
    let qd = InputDistribution::new(q).expect("valid interior point");
    let i = mutual_information(&qd, w).expect("dimensions agree");
    (i.max(cap.max(0.0)).min(i + tol), qd)
}
