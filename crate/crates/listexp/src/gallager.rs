//! The Gallager function `E0` and the exponents built by optimizing it
//! over `rho`: the list random-coding exponent (`rho` in `[0, L]`), the
//! sphere-packing exponent (`rho` unbounded, capped), and the expurgated
//! exponent in Gallager form (`rho >= 1`).

use crate::channel::{Dmc, InputDistribution};
use crate::expurgated::{tuple_bhattacharyya, TupleDistanceTable};
use crate::opt::{golden_max, logsumexp, maximize_on_simplex, GoldenResult};
use crate::Result;

/// Upper end of the search interval for unbounded `rho` optimizations.
pub const RHO_CAP: f64 = 1e4;

/// A positive slope at the cap larger than this flags a genuinely
/// unbounded supremum. Suprema that converge to a finite value also push
/// the maximizer toward the cap, but their slope decays to zero, which is
/// why a simple position test is not enough.
const DIVERGENCE_SLOPE_TOL: f64 = 1e-6;

/// Result of a one-dimensional `rho` optimization.
#[derive(Debug, Clone, Copy)]
pub struct RhoOpt {
    /// Optimal value in nats; `f64::INFINITY` when `divergent` is set.
    pub value: f64,
    /// The maximizing `rho`.
    pub rho: f64,
    /// Set when the supremum grows without bound past the search cap.
    pub divergent: bool,
}

/// Gallager function
/// `E0(rho, Q) = -ln sum_y [sum_x Q(x) W(y|x)^{1/(1+rho)}]^{1+rho}`.
///
/// Exactly zero at `rho = 0`. Evaluated in the log domain so large `rho`
/// does not underflow the outer power.
pub fn e0(rho: f64, q: &InputDistribution, w: &Dmc) -> f64 {
    debug_assert!(rho >= 0.0);
    if rho == 0.0 {
        return 0.0;
    }
    let s = 1.0 / (1.0 + rho);
    let mut ln_terms = Vec::with_capacity(w.output_size());
    for y in 0..w.output_size() {
        let mut a = 0.0;
        for x in 0..w.input_size() {
            let p = w.prob(x, y);
            if p > 0.0 {
                a += q.prob(x) * p.powf(s);
            }
        }
        if a > 0.0 {
            ln_terms.push((1.0 + rho) * a.ln());
        }
    }
    -logsumexp(&ln_terms)
}

fn check_divergent<F: Fn(f64) -> f64>(f: &F, r: &GoldenResult, hi: f64) -> bool {
    if r.arg < 0.999 * hi {
        return false;
    }
    let h = 1e-6 * hi;
    let slope = (f(hi) - f(hi - h)) / h;
    slope > DIVERGENCE_SLOPE_TOL
}

/// `rho` search on a genuinely bounded interval: hitting the upper end is
/// a legitimate optimum, not divergence.
fn rho_opt_bounded<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> RhoOpt {
    let r = golden_max(&f, lo, hi, 1e-10, 200);
    RhoOpt {
        value: r.value,
        rho: r.arg,
        divergent: false,
    }
}

/// `rho` search where the interval end is an artificial cap standing in
/// for infinity; a positive slope there flags a divergent supremum.
fn rho_opt_capped<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> RhoOpt {
    let r = golden_max(&f, lo, hi, 1e-10, 200);
    if check_divergent(&f, &r, hi) {
        return RhoOpt {
            value: f64::INFINITY,
            rho: hi,
            divergent: true,
        };
    }
    RhoOpt {
        value: r.value,
        rho: r.arg,
        divergent: false,
    }
}

fn optimize_q<G: Fn(&InputDistribution) -> RhoOpt>(inner: G, dim: usize) -> RhoOpt {
    let best = maximize_on_simplex(
        |p| match InputDistribution::new(p.to_vec()) {
            Ok(q) => inner(&q).value,
            Err(_) => f64::NEG_INFINITY,
        },
        dim,
        1e-10,
    );
    let q = InputDistribution::new(best.point).expect("projected point is a distribution");
    inner(&q)
}

/// List random-coding exponent: `sup` over `rho` in `[0, L]` (and over `Q`
/// when `q` is `None`) of `E0(rho, Q) - rho R`. Zero at and above the
/// capacity of the chosen input distribution.
pub fn random_coding_exponent(rate: f64, l: u32, w: &Dmc, q: Option<&InputDistribution>) -> RhoOpt {
    let fixed = |q: &InputDistribution| {
        let r = rho_opt_bounded(|rho| e0(rho, q, w) - rho * rate, 0.0, l as f64);
        if r.value <= 0.0 {
            RhoOpt {
                value: 0.0,
                rho: 0.0,
                divergent: false,
            }
        } else {
            r
        }
    };
    match q {
        Some(q) => fixed(q),
        None => optimize_q(fixed, w.input_size()),
    }
}

/// Sphere-packing exponent in `rho` form: `sup` over `rho >= 0` (capped at
/// [`RHO_CAP`]) of `E0(rho, Q) - rho R`, optionally maximized over `Q`.
/// Flags divergence when the supremum still grows at the cap, which
/// happens at low rates for channels with zero transition probabilities.
pub fn sphere_packing_exponent(rate: f64, w: &Dmc, q: Option<&InputDistribution>) -> RhoOpt {
    let fixed = |q: &InputDistribution| {
        let r = rho_opt_capped(|rho| e0(rho, q, w) - rho * rate, 0.0, RHO_CAP);
        if !r.divergent && r.value <= 0.0 {
            RhoOpt {
                value: 0.0,
                rho: 0.0,
                divergent: false,
            }
        } else {
            r
        }
    };
    match q {
        Some(q) => fixed(q),
        None => optimize_q(fixed, w.input_size()),
    }
}

fn expurgated_objective(table: &TupleDistanceTable, q: &InputDistribution, lr: f64) -> impl Fn(f64) -> f64 {
    // flatten to (weight, distance) pairs once; the objective is evaluated
    // many times inside the golden-section search
    let dims = table.dims();
    let order = table.order();
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    let mut coords = vec![0usize; order];
    for (idx, &d) in table.table().iter().enumerate() {
        let mut rem = idx;
        let mut weight = 1.0;
        for c in coords.iter_mut() {
            *c = rem % dims;
            rem /= dims;
            weight *= q.prob(*c);
        }
        if weight > 0.0 {
            pairs.push((weight, d));
        }
    }
    move |rho: f64| {
        let mut a = 0.0;
        for &(weight, d) in &pairs {
            if d.is_finite() {
                a += weight * (-d / rho).exp();
            }
            // infinite distance contributes zero
        }
        debug_assert!(a > 0.0, "diagonal tuples keep the sum positive");
        -rho * a.ln() - rho * lr
    }
}

/// Expurgated exponent in Gallager form: `sup` over `rho >= 1` (and
/// optionally `Q`) of
/// `-rho ln sum_tuples prod_i Q(x_i) exp(-d(x_0..x_L)/rho) - rho L R`,
/// with `d` the tuple Bhattacharyya distance. Divergent at low rates for
/// channels whose rows have disjoint supports.
pub fn gallager_expurgated(
    rate: f64,
    l: u32,
    w: &Dmc,
    q: Option<&InputDistribution>,
) -> Result<RhoOpt> {
    let table = tuple_bhattacharyya(w, l)?;
    let lr = l as f64 * rate;
    let fixed = |q: &InputDistribution| {
        let obj = expurgated_objective(&table, q, lr);
        rho_opt_capped(obj, 1.0, RHO_CAP)
    };
    Ok(match q {
        Some(q) => fixed(q),
        None => optimize_q(fixed, w.input_size()),
    })
}
