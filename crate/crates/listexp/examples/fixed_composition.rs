//! The fixed-composition list exponent E(R, L, Q) computed two independent
//! ways (test-channel minimization and its dual), the critical list size
//! at which it saturates, and the finite-blocklength union bound over
//! joint types approaching the asymptotic exponent from above.
//!
//! Run with: cargo run --example fixed_composition

use listexp::channel::{Dmc, InputDistribution};
use listexp::csiszar::{
    critical_list_size, fixed_composition_exponent_dual, fixed_composition_exponent_primal,
    sphere_packing_csiszar, theorem1_bound, Theorem1Query,
};

fn main() -> listexp::Result<()> {
    let w = Dmc::bsc(0.1)?;
    let q = InputDistribution::uniform(2);
    let rate = 0.2;

    println!("E(R, L, Q) on BSC(0.1), uniform Q, R = {rate}\n");
    println!(
        "{:>3}  {:>14}  {:>14}  {:>9}",
        "L", "primal", "dual", "|gap|"
    );
    for l in 1..=4 {
        let primal = fixed_composition_exponent_primal(rate, l, &q, &w);
        let dual = fixed_composition_exponent_dual(rate, l, &q, &w);
        println!(
            "{:>3}  {:>14.10}  {:>14.10}  {:>9.2e}",
            l,
            primal.value,
            dual.value,
            (primal.value - dual.value).abs()
        );
    }

    // the exponent stops growing once L reaches the critical list size
    let csp = sphere_packing_csiszar(rate, &q, &w);
    let lc = critical_list_size(rate, &q, &w, 64)?;
    println!(
        "\nsphere-packing value {:.10}; saturation at L_c = {lc}",
        csp.value
    );

    // finite-n union bound over joint types, no slack term: the implied
    // finite-n exponent approaches the asymptotic value from above
    let asym = fixed_composition_exponent_dual(rate, 1, &q, &w);
    println!("\nfinite-n bound at R = {rate}, L = 1 (delta_n = 0):");
    println!("{:>4}  {:>12}  {:>14}", "n", "bound", "-(1/n) ln");
    for n in [8, 16, 24, 32, 40, 48] {
        let query = Theorem1Query {
            n,
            rate,
            l: 1,
            q: q.clone(),
            w: w.clone(),
            delta_n: Some(0.0),
        };
        let bound = theorem1_bound(&query)?;
        println!(
            "{:>4}  {:>12.6e}  {:>14.10}",
            n,
            bound,
            -bound.ln() / n as f64
        );
    }
    println!("asymptotic exponent {:>14.10}", asym.value);
    Ok(())
}
