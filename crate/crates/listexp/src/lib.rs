//! Error exponents for list decoding over discrete memoryless channels and
//! the memoryless Gaussian channel.
//!
//! The library computes, for a channel `W` and an input distribution `Q`:
//!
//! * the Gallager function `E0` and the list random-coding exponent
//!   (`rho` stretched to `[0, L]`), see [`gallager`];
//! * sphere-packing exponents in both the `rho`-optimization form and the
//!   constrained-divergence (test-channel) form, see [`gallager`] and
//!   [`csiszar`];
//! * the fixed-composition list exponent `E(R, L, Q)` by independent primal
//!   and dual solvers, the critical list size, the exponential-list-size
//!   exponent, and an exact finite-blocklength union bound over joint types,
//!   see [`csiszar`];
//! * expurgated exponents in Gallager form and in the constrained
//!   tuple-distance (CKM) form, with the distortion-rate curve and critical
//!   rate, see [`expurgated`];
//! * closed-form expurgated exponents for the Gaussian channel, see
//!   [`gaussian`];
//! * exponents of the guessing moments `E[N^rho]` of the exceeder count,
//!   see [`guessing`].
//!
//! Everything is validated against a Monte-Carlo fixed-composition list
//! decoding simulator and an exhaustive small-instance oracle in [`sim`].
//!
//! All rates and exponents are in nats. The CLI in [`cli`] accepts a
//! `--bits` flag that converts on the way in and out.

pub mod channel;
pub mod cli;
pub mod csiszar;
pub mod expurgated;
pub mod gallager;
pub mod gaussian;
pub mod guessing;
pub mod info;
pub mod opt;
pub mod records;
pub mod sim;

use thiserror::Error;

/// Library-wide error type.
///
/// `NonConvergence` and `Divergent` are the only variants the CLI maps to
/// exit code 3; everything else is a validation failure (exit code 2).
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid distribution: {0}")]
    Distribution(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("problem size exceeds documented cap: {0}")]
    SizeCap(String),
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("quantity diverges: {0}")]
    Divergent(String),
    #[error("malformed record: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
