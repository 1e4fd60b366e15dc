//! Monte-Carlo and exhaustive validation of the exponent formulas:
//! fixed-composition random codes, ML and MMI list decoders in the fixed
//! and exponential list-size regimes, exceeder-count statistics with
//! guessing moments, and an exact small-instance oracle.
//!
//! Determinism contract: a `SimConfig` fully determines the result.
//! Per-trial randomness is derived from the master seed by stream
//! splitting, and aggregation is integer-only until the final summary
//! pass, so results are identical for any worker count.

pub mod codebook;
pub mod decode;
mod engine;
pub mod oracle;

pub use codebook::{generate_fixed_composition_code, Codebook};
pub use decode::{ml_list_decode, mmi_list_decode};
pub use oracle::exact_list_error;

use crate::channel::{Dmc, InputDistribution};
use crate::opt::largest_remainder_composition;
use crate::{Error, Result};
use engine::{EngineImpl, FastEngine, LiteralEngine};
use serde::Serialize;
use std::collections::BTreeMap;

/// Environment variable overriding the default worker count.
pub const THREADS_ENV_VAR: &str = "LISTEXP_THREADS";

/// Hard cap on the message count `M`.
pub const MESSAGE_CAP: u64 = 1_000_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ListMode {
    /// Constant list size.
    Fixed(u32),
    /// List size growing as `ceil(e^{lambda n})`.
    Exponential(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decoder {
    Ml,
    Mmi,
}

impl Decoder {
    pub fn name(self) -> &'static str {
        match self {
            Decoder::Ml => "ml",
            Decoder::Mmi => "mmi",
        }
    }
}

/// How trials are played out. `Auto` picks the closed-form binary engine
/// when the channel is binary-in binary-out and the literal engine
/// otherwise; both sample the same per-trial law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Auto,
    Literal,
    Fast,
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub n: usize,
    /// Nominal rate in nats; the message count is `ceil(e^{nR}) + 1`.
    pub rate: f64,
    pub list_mode: ListMode,
    pub q: InputDistribution,
    pub w: Dmc,
    pub decoder: Decoder,
    pub trials: u64,
    pub master_seed: u64,
}

impl SimConfig {
    /// `M = ceil(e^{nR}) + 1`; one transmitted plus `M - 1` competitors.
    pub fn message_count(&self) -> u64 {
        ((self.n as f64 * self.rate).exp().ceil() as u64) + 1
    }

    /// Rate actually realized by the integer message count.
    pub fn effective_rate(&self) -> f64 {
        ((self.message_count() - 1) as f64).ln() / self.n as f64
    }

    /// Resolved list size for either mode.
    pub fn list_size(&self) -> Result<u32> {
        let l = match self.list_mode {
            ListMode::Fixed(l) => {
                if l == 0 {
                    return Err(Error::OutOfRange("list size must be positive".into()));
                }
                l as u64
            }
            ListMode::Exponential(lambda) => {
                if !(lambda > 0.0) {
                    return Err(Error::OutOfRange(format!(
                        "list exponent {lambda} must be positive"
                    )));
                }
                (lambda * self.n as f64).exp().ceil() as u64
            }
        };
        let m = self.message_count();
        if l > m - 1 {
            return Err(Error::OutOfRange(format!(
                "list size {l} exceeds M - 1 = {}",
                m - 1
            )));
        }
        Ok(l as u32)
    }

    /// Rounded composition the codewords are drawn from.
    pub fn composition(&self) -> Vec<usize> {
        largest_remainder_composition(self.q.probs(), self.n)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::OutOfRange("block length must be positive".into()));
        }
        if !(self.rate > 0.0) || !self.rate.is_finite() {
            return Err(Error::OutOfRange(format!(
                "rate {} must be positive",
                self.rate
            )));
        }
        if self.trials == 0 {
            return Err(Error::OutOfRange("need at least one trial".into()));
        }
        if self.q.len() != self.w.input_size() {
            return Err(Error::Dimension(format!(
                "composition has {} symbols, channel has {}",
                self.q.len(),
                self.w.input_size()
            )));
        }
        if (self.n as f64 * self.rate) > (MESSAGE_CAP as f64).ln() {
            return Err(Error::SizeCap(format!(
                "message count exceeds cap {MESSAGE_CAP}"
            )));
        }
        self.list_size().map(|_| ())
    }
}

/// Moment summary for one requested order.
#[derive(Debug, Clone, Serialize)]
pub struct MomentEstimate {
    pub rho: f64,
    /// Empirical mean of `N^rho`, with `N^rho` taken as 0 at `N = 0`.
    pub n_mean: f64,
    /// `(1/n) ln` of the mean; absent when the mean is zero.
    pub n_exponent: Option<f64>,
    /// Empirical mean of `G^rho = (N+1)^rho`.
    pub g_mean: f64,
    pub g_exponent: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub trials: u64,
    pub list_size: u32,
    pub effective_rate: f64,
    /// Trials where at least `list_size` competitors scored strictly
    /// higher than the transmitted word.
    pub error_count: u64,
    pub estimate: f64,
    /// 95% normal-approximation half width.
    pub ci_half_width: f64,
    /// Weak exceeder count `N` histogram as (value, count) pairs.
    pub exceeder_histogram: Vec<(u64, u64)>,
    /// Strict exceeder count histogram as (value, count) pairs.
    pub strict_histogram: Vec<(u64, u64)>,
    pub moments: Vec<MomentEstimate>,
}

impl SimResult {
    /// Error count the same trial stream would give at another list size:
    /// a trial errs at list size `l` exactly when its strict exceeder
    /// count reaches `l`, so this is a histogram tail sum.
    pub fn error_count_for(&self, l: u32) -> u64 {
        self.strict_histogram
            .iter()
            .filter(|&&(value, _)| value >= l as u64)
            .map(|&(_, count)| count)
            .sum()
    }
}

fn default_workers() -> usize {
    if let Ok(v) = std::env::var(THREADS_ENV_VAR) {
        if let Ok(k) = v.trim().parse::<usize>() {
            if k >= 1 {
                return k;
            }
        }
    }
    std::thread::available_parallelism().map_or(1, |p| p.get())
}

/// Runs the trial loop on an explicit worker count. Exposed so the
/// scheduling-independence contract is testable; results are identical
/// for every `workers` value.
pub fn run_simulation_with_workers(
    cfg: &SimConfig,
    rho_list: &[f64],
    engine: EngineChoice,
    workers: usize,
) -> Result<SimResult> {
    cfg.validate()?;
    for &rho in rho_list {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::OutOfRange(format!(
                "moment order {rho} must be positive"
            )));
        }
    }
    let m = cfg.message_count();
    let l = cfg.list_size()?;
    let comp = cfg.composition();
    let engine = match engine {
        EngineChoice::Literal => EngineImpl::Literal(LiteralEngine::new(cfg, comp, m)?),
        EngineChoice::Fast => {
            if !FastEngine::supports(cfg) {
                return Err(Error::Dimension(
                    "fast engine requires a binary-input binary-output channel".into(),
                ));
            }
            EngineImpl::Fast(FastEngine::new(cfg, comp, m))
        }
        EngineChoice::Auto => {
            if FastEngine::supports(cfg) {
                EngineImpl::Fast(FastEngine::new(cfg, comp, m))
            } else {
                EngineImpl::Literal(LiteralEngine::new(cfg, comp, m)?)
            }
        }
    };

    let workers = workers.max(1).min(cfg.trials as usize).max(1);
    let chunk = cfg.trials / workers as u64;
    let remainder = cfg.trials % workers as u64;
    // contiguous per-worker trial ranges; merge order is worker index, so
    // the aggregate is independent of scheduling
    let mut ranges = Vec::with_capacity(workers);
    let mut start = 0u64;
    for k in 0..workers as u64 {
        let len = chunk + u64::from(k < remainder);
        ranges.push(start..start + len);
        start += len;
    }

    type Hists = (BTreeMap<u64, u64>, BTreeMap<u64, u64>);
    let run_range = |range: std::ops::Range<u64>| -> Hists {
        let mut strict: BTreeMap<u64, u64> = BTreeMap::new();
        let mut weak: BTreeMap<u64, u64> = BTreeMap::new();
        for trial in range {
            let out = engine.trial(trial);
            *strict.entry(out.strict).or_insert(0) += 1;
            *weak.entry(out.weak).or_insert(0) += 1;
        }
        (strict, weak)
    };

    let parts: Vec<Hists> = if workers == 1 {
        vec![run_range(ranges.pop().unwrap())]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .into_iter()
                .map(|r| scope.spawn(|| run_range(r)))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        })
    };

    let mut strict_hist: BTreeMap<u64, u64> = BTreeMap::new();
    let mut weak_hist: BTreeMap<u64, u64> = BTreeMap::new();
    for (s, w) in parts {
        for (value, count) in s {
            *strict_hist.entry(value).or_insert(0) += count;
        }
        for (value, count) in w {
            *weak_hist.entry(value).or_insert(0) += count;
        }
    }

    let trials = cfg.trials;
    let error_count: u64 = strict_hist
        .iter()
        .filter(|&(&value, _)| value >= l as u64)
        .map(|(_, &count)| count)
        .sum();
    let estimate = error_count as f64 / trials as f64;
    let ci_half_width = 1.96 * (estimate * (1.0 - estimate) / trials as f64).sqrt();

    let n = cfg.n as f64;
    let moments = rho_list
        .iter()
        .map(|&rho| {
            let mut n_sum = 0.0;
            let mut g_sum = 0.0;
            for (&value, &count) in &weak_hist {
                let c = count as f64;
                if value > 0 {
                    n_sum += c * (value as f64).powf(rho);
                }
                g_sum += c * ((value + 1) as f64).powf(rho);
            }
            let n_mean = n_sum / trials as f64;
            let g_mean = g_sum / trials as f64;
            MomentEstimate {
                rho,
                n_mean,
                n_exponent: (n_mean > 0.0).then(|| n_mean.ln() / n),
                g_mean,
                g_exponent: g_mean.ln() / n,
            }
        })
        .collect();

    Ok(SimResult {
        trials,
        list_size: l,
        effective_rate: cfg.effective_rate(),
        error_count,
        estimate,
        ci_half_width,
        exceeder_histogram: weak_hist.into_iter().collect(),
        strict_histogram: strict_hist.into_iter().collect(),
        moments,
    })
}

/// Full simulation with engine choice and the default worker count.
pub fn run_simulation(
    cfg: &SimConfig,
    rho_list: &[f64],
    engine: EngineChoice,
) -> Result<SimResult> {
    run_simulation_with_workers(cfg, rho_list, engine, default_workers())
}

/// Monte-Carlo estimate of the ensemble-average list-error probability.
pub fn estimate_list_error(cfg: &SimConfig) -> Result<SimResult> {
    run_simulation(cfg, &[], EngineChoice::Auto)
}

/// Exceeder-count statistics with guessing moments for the given orders.
pub fn exceeder_statistics(cfg: &SimConfig, rho_list: &[f64]) -> Result<SimResult> {
    run_simulation(cfg, rho_list, EngineChoice::Auto)
}
