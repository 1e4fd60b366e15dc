//! Expurgated exponents in the Gallager form and in the constrained
//! tuple-distance form, which dominates it at low rates once the input
//! distribution is optimized jointly with the tuple distribution.
//!
//! Run with: cargo run --example expurgated_pair

use listexp::channel::{Dmc, InputDistribution};
use listexp::expurgated::{ckm_critical_rate, ckm_exponent, distortion_rate};
use listexp::gallager::gallager_expurgated;

fn main() -> listexp::Result<()> {
    let w = Dmc::bsc(0.1)?;
    let q = InputDistribution::uniform(2);
    let l = 1;

    let r_crit = ckm_critical_rate(l, &w, &q)?;
    println!("BSC(0.1), uniform Q, L = {l}; critical rate = {r_crit:.9}\n");

    println!(
        "{:>6}  {:>14}  {:>14}  {:>12}",
        "rate", "gallager", "tuple-dist", "distortion"
    );
    for rate in [0.002, 0.01, 0.02, r_crit, 0.05, 0.08, 0.1] {
        let g = gallager_expurgated(rate, l, &w, Some(&q))?;
        let c = ckm_exponent(rate, l, &w, &q)?;
        let d = distortion_rate(rate, l, &w, &q)?;
        println!(
            "{:>6.4}  {:>14.10}  {:>14.10}  {:>12.8}",
            rate, g.value, c.value, d.value
        );
        // the tuple-distance form never falls below the Gallager form at
        // the same input distribution
        assert!(c.value >= g.value - 1e-6);
        // above the critical rate the budget constraint goes slack and
        // the exponent is affine with slope -L
        if rate > r_crit + 1e-9 {
            assert!(c.multiplier < 1e-6);
        }
    }

    // at rates above critical the exponent is the distortion value at the
    // critical point minus L times the rate excess
    let base = ckm_exponent(r_crit, l, &w, &q)?;
    let above = ckm_exponent(r_crit + 0.03, l, &w, &q)?;
    println!(
        "\naffine check: E(Rc + 0.03) = {:.10} vs E(Rc) - L * 0.03 = {:.10}",
        above.value,
        base.value - l as f64 * 0.03
    );
    Ok(())
}
