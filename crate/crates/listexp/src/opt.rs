//! Shared numerical machinery: log-sum-exp, golden-section search,
//! bisection, simplex projection, projected-gradient ascent over the
//! simplex with deterministic restarts, and log-factorial tables.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `ln sum_i exp(x_i)`, stable for widely spread inputs. Empty input and
/// all `-inf` both give `-inf`.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

#[derive(Debug, Clone, Copy)]
pub struct GoldenResult {
    pub arg: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section search for the maximum of a unimodal function on
/// `[lo, hi]`.
///
/// The iteration cap matters: for wide intervals an absolute interval
/// tolerance can sit below the float spacing, and the loop would never
/// terminate without it.
pub fn golden_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> GoldenResult {
    debug_assert!(lo <= hi);
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo;
    let mut b = hi;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while b - a > tol * (1.0 + a.abs().max(b.abs())) && iterations < max_iter {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    // evaluate the endpoints too; the maximum may sit on the boundary
    let mid = 0.5 * (a + b);
    let candidates = [(lo, f(lo)), (hi, f(hi)), (mid, f(mid)), (c, fc), (d, fd)];
    let mut best = candidates[0];
    for &cand in &candidates[1..] {
        if cand.1 > best.1 {
            best = cand;
        }
    }
    GoldenResult {
        arg: best.0,
        value: best.1,
        iterations,
    }
}

/// Bisection for a root of `f` on `[lo, hi]`, assuming `f(lo)` and `f(hi)`
/// bracket a sign change. Returns the midpoint of the final interval.
pub fn bisect_root<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> f64 {
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    debug_assert!(
        fa.signum() != fb.signum(),
        "bisection endpoints do not bracket a root"
    );
    for _ in 0..max_iter {
        if b - a <= tol * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Euclidean projection onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut tau = 0.0;
    let mut hit = 0;
    for (i, &s) in sorted.iter().enumerate() {
        cum += s;
        let candidate = (cum - 1.0) / (i + 1) as f64;
        if s - candidate > 0.0 {
            tau = candidate;
            hit = i + 1;
        }
    }
    debug_assert!(hit > 0);
    let _ = hit;
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

/// Projection onto the sub-simplex where masked-out coordinates are pinned
/// to zero. Used when a test channel must stay inside the support of `W`.
pub fn project_to_masked_simplex(v: &[f64], mask: &[bool]) -> Vec<f64> {
    debug_assert_eq!(v.len(), mask.len());
    let free: Vec<f64> = v
        .iter()
        .zip(mask.iter())
        .filter(|(_, &m)| m)
        .map(|(&x, _)| x)
        .collect();
    debug_assert!(!free.is_empty());
    let proj = project_to_simplex(&free);
    let mut out = vec![0.0; v.len()];
    let mut k = 0;
    for (slot, &m) in out.iter_mut().zip(mask.iter()) {
        if m {
            *slot = proj[k];
            k += 1;
        }
    }
    out
}

/// Uniform sample from the simplex (Dirichlet with unit parameters) via
/// normalized exponentials.
pub fn sample_simplex<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim)
        .map(|_| {
            let u: f64 = rng.gen_range(1e-12..1.0);
            -u.ln()
        })
        .collect();
    let s: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= s;
    }
    v
}

#[derive(Debug, Clone)]
pub struct SimplexMax {
    pub point: Vec<f64>,
    pub value: f64,
}

/// Fixed seed for the restart batch, so optimized-Q results are
/// reproducible run to run.
pub const RESTART_SEED: u64 = 0x5eed_1157;

/// Number of random restarts used on top of the uniform start.
pub const RESTARTS: usize = 8;

/// Maximizes `f` over the probability simplex by projected-gradient ascent
/// with central-difference gradients and Armijo backtracking, restarted
/// from the uniform point and [`RESTARTS`] seeded random points.
///
/// The objective is treated as a black box; it must be finite on the
/// interior of the simplex. Infinite values are clamped so a divergent
/// region dominates every finite one.
pub fn maximize_on_simplex<F: Fn(&[f64]) -> f64>(f: F, dim: usize, gain_tol: f64) -> SimplexMax {
    const HUGE: f64 = 1e100;
    let eval = |p: &[f64]| -> f64 {
        let v = f(p);
        if v.is_nan() {
            return -HUGE;
        }
        v.clamp(-HUGE, HUGE)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
    let mut starts = vec![vec![1.0 / dim as f64; dim]];
    for _ in 0..RESTARTS {
        starts.push(sample_simplex(&mut rng, dim));
    }
    let mut best = SimplexMax {
        point: starts[0].clone(),
        value: f64::NEG_INFINITY,
    };
    for start in starts {
        let mut x = start;
        let mut fx = eval(&x);
        let h = 1e-6;
        for _ in 0..400 {
            // central differences along each coordinate, renormalized back
            // onto the simplex so the objective is always fed a valid point
            let mut g = vec![0.0; dim];
            for i in 0..dim {
                let mut plus = x.clone();
                plus[i] += h;
                let plus = project_to_simplex(&plus);
                let mut minus = x.clone();
                minus[i] = (minus[i] - h).max(0.0);
                let minus = project_to_simplex(&minus);
                g[i] = (eval(&plus) - eval(&minus)) / (2.0 * h);
            }
            let mut improved = false;
            let mut step = 1.0;
            while step > 1e-14 {
                let trial: Vec<f64> = x.iter().zip(g.iter()).map(|(&a, &b)| a + step * b).collect();
                let trial = project_to_simplex(&trial);
                let ft = eval(&trial);
                if ft > fx + 1e-12 {
                    let gain = ft - fx;
                    x = trial;
                    fx = ft;
                    improved = true;
                    if gain < gain_tol {
                        improved = false;
                    }
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        if fx > best.value {
            best = SimplexMax { point: x, value: fx };
        }
    }
    best
}

/// Table of `ln k!` for `k = 0..=n_max`, accumulated directly so no
/// special-function dependency is needed.
#[derive(Debug, Clone)]
pub struct LnFactorials {
    table: Vec<f64>,
}

impl LnFactorials {
    pub fn new(n_max: usize) -> Self {
        let mut table = Vec::with_capacity(n_max + 1);
        table.push(0.0);
        let mut acc = 0.0;
        for k in 1..=n_max {
            acc += (k as f64).ln();
            table.push(acc);
        }
        Self { table }
    }

    pub fn ln_factorial(&self, k: usize) -> f64 {
        self.table[k]
    }

    pub fn ln_choose(&self, n: usize, k: usize) -> f64 {
        debug_assert!(k <= n);
        self.table[n] - self.table[k] - self.table[n - k]
    }

    pub fn ln_multinomial(&self, n: usize, counts: &[usize]) -> f64 {
        debug_assert_eq!(counts.iter().sum::<usize>(), n);
        let mut v = self.table[n];
        for &c in counts {
            v -= self.table[c];
        }
        v
    }
}

/// Rounds `n * q` to integer counts summing to `n` by largest remainder.
pub fn largest_remainder_composition(q: &[f64], n: usize) -> Vec<usize> {
    let mut counts: Vec<usize> = q.iter().map(|&p| (p * n as f64).floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut remainders: Vec<(usize, f64)> = q
        .iter()
        .enumerate()
        .map(|(i, &p)| (i, p * n as f64 - counts[i] as f64))
        .collect();
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for k in 0..(n - assigned) {
        counts[remainders[k].0] += 1;
    }
    counts
}
