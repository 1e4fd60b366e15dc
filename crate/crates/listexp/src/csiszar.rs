//! Fixed-composition (type-based) exponents.
//!
//! The central object is `E(R, L, Q) = min over test channels P~ of
//! D(P~ || W | Q) + L [I(Q, P~) - R]_+`, computed by two independent
//! routes:
//!
//! * dual: `max over rho in [0, L]` of `min_P~ D + rho (I - R)`, the inner
//!   minimum found by an alternating (tilted) fixed point;
//! * primal: direct projected-gradient minimization over the product of
//!   row simplices, with the kink `[.]_+` handled by a case split on
//!   whether the mutual-information constraint binds.
//!
//! The same inner machinery yields the sphere-packing exponent in
//! constrained-divergence form, the critical list size, the
//! exponential-list-size exponent, and an exact finite-blocklength bound
//! that enumerates joint types.

use crate::channel::{ConditionalChannel, Dmc, InputDistribution, JointType};
use crate::info::{
    conditional_divergence, empirical_mutual_information, mutual_information,
};
use crate::opt::{
    bisect_root, golden_max, largest_remainder_composition, maximize_on_simplex,
    project_to_masked_simplex, LnFactorials,
};
use crate::{Error, Result};

/// Cap standing in for `rho -> infinity` in the sphere-packing dual.
pub const CSP_RHO_CAP: f64 = 1e4;

/// Iteration cap for the tilted inner fixed point.
const INNER_CAP: usize = 10_000;

/// Entry-wise convergence tolerance for the tilted inner fixed point.
const INNER_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct FixedCompQuery {
    pub rate: f64,
    pub l: u32,
    pub q: InputDistribution,
    pub w: Dmc,
}

/// Solution record for `E(R, L, Q)`.
#[derive(Debug, Clone)]
pub struct FixedCompResult {
    pub value: f64,
    /// Multiplier on `I - R` at the optimum (the dual variable in `[0, L]`).
    pub rho: f64,
    /// Minimizing test channel.
    pub test_channel: ConditionalChannel,
    /// Mutual information at the minimizer.
    pub info: f64,
    /// Conditional divergence at the minimizer.
    pub divergence: f64,
    /// Saddle certificate `L [I-R]_+ - rho (I-R)`, nonnegative, near zero
    /// at a true saddle point.
    pub gap: f64,
    pub converged: bool,
}

struct Inner {
    rows: Vec<Vec<f64>>,
    divergence: f64,
    info: f64,
    converged: bool,
}

/// Minimizes `D(P~||W|Q) + rho I(Q, P~)` by alternating between the
/// closed-form tilted rows and the induced output marginal.
fn tilted_inner(rho: f64, q: &InputDistribution, w: &Dmc) -> Inner {
    let kx = w.input_size();
    let ky = w.output_size();
    let mut rows: Vec<Vec<f64>> = w.rows().to_vec();
    let mut converged = rho == 0.0;
    if rho > 0.0 {
        let a = 1.0 / (1.0 + rho);
        let b = rho / (1.0 + rho);
        let wpow: Vec<Vec<f64>> = w
            .rows()
            .iter()
            .map(|r| r.iter().map(|&p| p.powf(a)).collect())
            .collect();
        for _ in 0..INNER_CAP {
            let mut v = vec![0.0; ky];
            for x in 0..kx {
                let qx = q.prob(x);
                if qx == 0.0 {
                    continue;
                }
                for (slot, &p) in v.iter_mut().zip(rows[x].iter()) {
                    *slot += qx * p;
                }
            }
            let vpow: Vec<f64> = v.iter().map(|&t| t.powf(b)).collect();
            let mut delta: f64 = 0.0;
            for x in 0..kx {
                if q.prob(x) == 0.0 {
                    continue;
                }
                let mut fresh: Vec<f64> =
                    wpow[x].iter().zip(vpow.iter()).map(|(&a, &b)| a * b).collect();
                let z: f64 = fresh.iter().sum();
                debug_assert!(z > 0.0);
                for (t, old) in fresh.iter_mut().zip(rows[x].iter()) {
                    *t /= z;
                    delta = delta.max((*t - old).abs());
                }
                rows[x] = fresh;
            }
            if delta < INNER_TOL {
                converged = true;
                break;
            }
        }
    }
    let pt = ConditionalChannel::new(rows.clone()).expect("tilted rows are stochastic");
    let divergence = conditional_divergence(&pt, w, q).expect("dimensions agree");
    let info = mutual_information(q, &pt).expect("dimensions agree");
    Inner {
        rows,
        divergence,
        info,
        converged,
    }
}

/// Dual route for `E(R, L, Q)`: golden-section over the multiplier.
pub fn fixed_composition_exponent_dual(
    rate: f64,
    l: u32,
    q: &InputDistribution,
    w: &Dmc,
) -> FixedCompResult {
    let lf = l as f64;
    let g = |rho: f64| {
        let inner = tilted_inner(rho, q, w);
        inner.divergence + rho * (inner.info - rate)
    };
    let r = golden_max(g, 0.0, lf, 1e-10, 200);
    let at = tilted_inner(r.arg, q, w);
    let value = (at.divergence + r.arg * (at.info - rate)).max(0.0);
    let excess = at.info - rate;
    let gap = lf * excess.max(0.0) - r.arg * excess;
    FixedCompResult {
        value,
        rho: r.arg,
        test_channel: ConditionalChannel::new(at.rows).expect("stochastic"),
        info: at.info,
        divergence: at.divergence,
        gap,
        converged: at.converged,
    }
}

struct PgdSolve {
    rows: Vec<Vec<f64>>,
    divergence: f64,
    info: f64,
    converged: bool,
}

/// Minimizes `h(P~) = D(P~||W|Q) + mu I(Q, P~)` by projected gradient
/// descent with Armijo backtracking over the product of row simplices.
/// Kept deliberately different from [`tilted_inner`] so the two exponent
/// routes share no solver code.
fn pgd_inner(mu: f64, q: &InputDistribution, w: &Dmc) -> PgdSolve {
    let kx = w.input_size();
    let ky = w.output_size();
    let masks: Vec<Vec<bool>> = w
        .rows()
        .iter()
        .map(|r| r.iter().map(|&p| p > 0.0).collect())
        .collect();
    let active: Vec<usize> = (0..kx).filter(|&x| q.prob(x) > 0.0).collect();
    let mut rows: Vec<Vec<f64>> = w.rows().to_vec();

    let eval = |rows: &[Vec<f64>]| -> (f64, f64, f64) {
        let mut v = vec![0.0; ky];
        for &x in &active {
            for (slot, &p) in v.iter_mut().zip(rows[x].iter()) {
                *slot += q.prob(x) * p;
            }
        }
        let mut d = 0.0;
        let mut i = 0.0;
        for &x in &active {
            let qx = q.prob(x);
            for y in 0..ky {
                let p = rows[x][y];
                if p > 0.0 {
                    d += qx * p * (p / w.prob(x, y)).ln();
                    i += qx * p * (p / v[y]).ln();
                }
            }
        }
        (d + mu * i.max(0.0), d.max(0.0), i.max(0.0))
    };

    let (mut h, mut d, mut i) = eval(&rows);
    let mut converged = false;
    let mut stall = 0;
    for _ in 0..20_000 {
        let mut v = vec![0.0; ky];
        for &x in &active {
            for (slot, &p) in v.iter_mut().zip(rows[x].iter()) {
                *slot += q.prob(x) * p;
            }
        }
        // per-row reduced gradient; the q(x) block weight is a positive
        // diagonal rescaling and does not change the minimizer
        let mut grad: Vec<Vec<f64>> = vec![vec![0.0; ky]; kx];
        for &x in &active {
            for y in 0..ky {
                if !masks[x][y] {
                    continue;
                }
                let p = rows[x][y].max(1e-300);
                grad[x][y] =
                    (p / w.prob(x, y)).ln() + 1.0 + mu * (p / v[y].max(1e-300)).ln();
            }
        }
        let mut accepted = false;
        let mut step = 1.0;
        while step > 1e-16 {
            let mut cand = rows.clone();
            let mut decrease_model = 0.0;
            for &x in &active {
                let trial: Vec<f64> = rows[x]
                    .iter()
                    .zip(grad[x].iter())
                    .map(|(&p, &g)| p - step * g)
                    .collect();
                cand[x] = project_to_masked_simplex(&trial, &masks[x]);
                for y in 0..ky {
                    decrease_model += q.prob(x) * grad[x][y] * (rows[x][y] - cand[x][y]);
                }
            }
            let (hc, dc, ic) = eval(&cand);
            if hc <= h - 1e-4 * decrease_model.max(0.0) && hc < h {
                let gain = h - hc;
                rows = cand;
                h = hc;
                d = dc;
                i = ic;
                accepted = true;
                if gain < 1e-13 * (1.0 + h.abs()) {
                    stall += 1;
                } else {
                    stall = 0;
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted || stall >= 3 {
            converged = true;
            break;
        }
    }
    PgdSolve {
        rows,
        divergence: d,
        info: i,
        converged,
    }
}

/// Primal route for `E(R, L, Q)`: direct convex minimization, split on
/// whether the mutual-information excess is active at the optimum.
pub fn fixed_composition_exponent_primal(
    rate: f64,
    l: u32,
    q: &InputDistribution,
    w: &Dmc,
) -> FixedCompResult {
    let lf = l as f64;
    let i_w = mutual_information(q, w).expect("dimensions agree");
    if i_w <= rate {
        return FixedCompResult {
            value: 0.0,
            rho: 0.0,
            test_channel: ConditionalChannel::from_dmc(w),
            info: i_w,
            divergence: 0.0,
            gap: 0.0,
            converged: true,
        };
    }

    let report = |s: PgdSolve, mu: f64| {
        let excess = s.info - rate;
        FixedCompResult {
            value: s.divergence + lf * excess.max(0.0),
            rho: mu,
            test_channel: ConditionalChannel::new(s.rows).expect("stochastic"),
            info: s.info,
            divergence: s.divergence,
            gap: lf * excess.max(0.0) - mu * excess,
            converged: s.converged,
        }
    };

    // smooth phase: if the unrestricted minimizer of D + L (I - R) still
    // has I >= R, the clipped and unclipped objectives agree at and below
    // the optimum and we are done
    let smooth = pgd_inner(lf, q, w);
    if smooth.info >= rate - 1e-10 {
        return report(smooth, lf);
    }

    // boundary phase: the optimum has I = R; pick the multiplier whose
    // unconstrained minimizer lands on the boundary
    let mu_star = bisect_root(
        |mu| pgd_inner(mu, q, w).info - rate,
        0.0,
        lf,
        1e-12,
        100,
    );
    report(pgd_inner(mu_star, q, w), mu_star)
}

/// `E(R, L, Q)` through the dual route (the house solver), as a query.
pub fn fixed_composition_exponent(query: &FixedCompQuery) -> FixedCompResult {
    fixed_composition_exponent_dual(query.rate, query.l, &query.q, &query.w)
}

/// Maximizes `E(R, L, Q)` over the composition.
pub fn fixed_composition_exponent_optimized(
    rate: f64,
    l: u32,
    w: &Dmc,
) -> (InputDistribution, FixedCompResult) {
    let best = maximize_on_simplex(
        |p| match InputDistribution::new(p.to_vec()) {
            Ok(q) => fixed_composition_exponent_dual(rate, l, &q, w).value,
            Err(_) => f64::NEG_INFINITY,
        },
        w.input_size(),
        1e-10,
    );
    let q = InputDistribution::new(best.point).expect("projected point is a distribution");
    let r = fixed_composition_exponent_dual(rate, l, &q, w);
    (q, r)
}

/// Sphere-packing exponent in constrained-divergence form.
#[derive(Debug, Clone)]
pub struct CspResult {
    pub value: f64,
    /// Multiplier at which the information constraint is met.
    pub rho: f64,
    pub divergent: bool,
    pub converged: bool,
}

/// `min { D(P~||W|Q) : I(Q, P~) <= R }`, solved through the concave dual
/// `max over rho >= 0` of `min_P~ D + rho (I - R)`. Because the dual
/// derivative is the information excess, the maximizer is located by
/// bisection on `I(rho) = R`, which is monotone.
pub fn sphere_packing_csiszar(rate: f64, q: &InputDistribution, w: &Dmc) -> CspResult {
    let at0 = tilted_inner(0.0, q, w);
    if at0.info <= rate {
        return CspResult {
            value: 0.0,
            rho: 0.0,
            divergent: false,
            converged: true,
        };
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut bracketed = false;
    while hi <= CSP_RHO_CAP {
        if tilted_inner(hi, q, w).info <= rate {
            bracketed = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !bracketed {
        return CspResult {
            value: f64::INFINITY,
            rho: CSP_RHO_CAP,
            divergent: true,
            converged: true,
        };
    }
    let rho = bisect_root(|r| tilted_inner(r, q, w).info - rate, lo, hi, 1e-12, 200);
    let at = tilted_inner(rho, q, w);
    CspResult {
        value: (at.divergence + rho * (at.info - rate)).max(0.0),
        rho,
        divergent: false,
        converged: at.converged,
    }
}

/// Maximizes [`sphere_packing_csiszar`] over the composition.
pub fn sphere_packing_csiszar_optimized(rate: f64, w: &Dmc) -> (InputDistribution, CspResult) {
    let best = maximize_on_simplex(
        |p| match InputDistribution::new(p.to_vec()) {
            Ok(q) => {
                let r = sphere_packing_csiszar(rate, &q, w);
                if r.divergent {
                    f64::INFINITY
                } else {
                    r.value
                }
            }
            Err(_) => f64::NEG_INFINITY,
        },
        w.input_size(),
        1e-10,
    );
    let q = InputDistribution::new(best.point).expect("projected point is a distribution");
    let r = sphere_packing_csiszar(rate, &q, w);
    (q, r)
}

/// Smallest list size at which `E(R, L, Q)` saturates to the
/// sphere-packing value, detected through the minimizer: saturation means
/// the information constraint is met at the optimum.
pub fn critical_list_size(rate: f64, q: &InputDistribution, w: &Dmc, l_cap: u32) -> Result<u32> {
    if rate <= 0.0 {
        return Err(Error::OutOfRange(format!("rate {rate} must be positive")));
    }
    let i_w = mutual_information(q, w)?;
    if i_w <= rate {
        return Ok(1);
    }
    // at saturation the optimal multiplier is interior and the minimizer
    // sits on the information boundary, up to inner-solver scatter
    for l in 1..=l_cap {
        let r = fixed_composition_exponent_dual(rate, l, q, w);
        if r.info <= rate + 1e-7 {
            return Ok(l);
        }
    }
    Err(Error::Divergent(format!(
        "no list size up to {l_cap} saturates the exponent at rate {rate}"
    )))
}

/// Exponent of the exponential-list-size regime `L = e^{lambda n}`: the
/// sphere-packing exponent at the reduced rate `R - lambda`.
pub fn exponential_list_exponent(
    rate: f64,
    lambda: f64,
    w: &Dmc,
    q: Option<&InputDistribution>,
) -> Result<CspResult> {
    if !(lambda > 0.0 && lambda < rate) {
        return Err(Error::OutOfRange(format!(
            "lambda must lie strictly between 0 and the rate, got lambda {lambda}, rate {rate}"
        )));
    }
    let reduced = rate - lambda;
    Ok(match q {
        Some(q) => sphere_packing_csiszar(reduced, q, w),
        None => sphere_packing_csiszar_optimized(reduced, w).1,
    })
}

/// Query for the finite-blocklength union bound over joint types.
#[derive(Debug, Clone)]
pub struct Theorem1Query {
    pub n: usize,
    pub rate: f64,
    pub l: u32,
    pub q: InputDistribution,
    pub w: Dmc,
    /// Type-counting slack; `None` selects `|X||Y| ln(n+1)/n`.
    pub delta_n: Option<f64>,
}

/// Exact evaluation of the finite-`n` list-error upper bound: a sum over
/// joint types of the type probability times
/// `exp(-n L [I^ + ln(L)/n - R - delta_n - 1/n]_+)`, clipped to 1.
///
/// The input composition is `n q` rounded by largest remainder; the
/// enumeration covers every conditional type of the output given that
/// composition.
pub fn theorem1_bound(query: &Theorem1Query) -> Result<f64> {
    let n = query.n;
    let w = &query.w;
    let kx = w.input_size();
    let ky = w.output_size();
    if n == 0 {
        return Err(Error::OutOfRange("block length must be positive".into()));
    }
    if query.q.len() != kx {
        return Err(Error::Dimension(format!(
            "composition has {} symbols, channel has {kx}",
            query.q.len()
        )));
    }
    if query.l == 0 {
        return Err(Error::OutOfRange("list size must be positive".into()));
    }
    let m_cap = (n as f64 * query.rate).exp().ceil();
    if query.l as f64 > m_cap {
        return Err(Error::OutOfRange(format!(
            "list size {} exceeds ceil(e^(nR)) = {m_cap}",
            query.l
        )));
    }
    let delta = query
        .delta_n
        .unwrap_or((kx * ky) as f64 * ((n + 1) as f64).ln() / n as f64);

    let comp = largest_remainder_composition(query.q.probs(), n);
    let lf = LnFactorials::new(n);

    // per input symbol, all output-count rows and their log-probabilities
    let mut per_x: Vec<Vec<(Vec<usize>, f64)>> = Vec::with_capacity(kx);
    let mut total_types: f64 = 1.0;
    for x in 0..kx {
        let mut rows = Vec::new();
        let mut row = vec![0usize; ky];
        fill_compositions(comp[x], 0, &mut row, &mut |r| {
            let mut lp = lf.ln_multinomial(comp[x], r);
            for (y, &c) in r.iter().enumerate() {
                if c > 0 {
                    let p = w.prob(x, y);
                    if p == 0.0 {
                        return; // zero-probability conditional type
                    }
                    lp += c as f64 * p.ln();
                }
            }
            rows.push((r.to_vec(), lp));
        });
        total_types *= rows.len().max(1) as f64;
        per_x.push(rows);
    }
    if total_types > 5e6 {
        return Err(Error::SizeCap(format!(
            "{total_types:.0} joint types exceed the enumeration cap"
        )));
    }

    let lr = query.l as f64;
    let shift = (lr.ln()) / n as f64 - query.rate - delta - 1.0 / n as f64;
    let mut bound = 0.0;
    let mut counts = vec![vec![0u64; ky]; kx];
    let mut stack_lp = vec![0.0f64; kx + 1];
    // depth-first product over the per-symbol conditional types
    let mut idx = vec![0usize; kx];
    let mut depth = 0usize;
    loop {
        if depth == kx {
            let t = JointType::new(counts.clone()).expect("counts total n");
            let ihat = empirical_mutual_information(&t);
            let bracket = (ihat + shift).max(0.0);
            bound += (stack_lp[kx] - n as f64 * lr * bracket).exp();
            depth -= 1;
            idx[depth] += 1;
            continue;
        }
        if idx[depth] >= per_x[depth].len() {
            if depth == 0 {
                break;
            }
            idx[depth] = 0;
            depth -= 1;
            idx[depth] += 1;
            continue;
        }
        let (row, lp) = &per_x[depth][idx[depth]];
        for (y, &c) in row.iter().enumerate() {
            counts[depth][y] = c as u64;
        }
        stack_lp[depth + 1] = stack_lp[depth] + lp;
        depth += 1;
    }
    Ok(bound.min(1.0))
}

fn fill_compositions(total: usize, cell: usize, row: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cell + 1 == row.len() {
        row[cell] = total;
        f(row);
        return;
    }
    for c in 0..=total {
        row[cell] = c;
        fill_compositions(total - c, cell + 1, row, f);
    }
}
