//! Closed-form expurgated exponents for the memoryless Gaussian channel:
//! the curvy low-rate branch, the tangency point, and the affine tail with
//! slope -L, for several list sizes. Also spot-checks that the symmetric
//! correlation structure is the minimizer.
//!
//! Run with: cargo run --example gaussian_curve

use listexp::gaussian::{
    gaussian_ckm_exponent, gaussian_rho_of_rate, gaussian_tangency, symmetric_optimality_check,
    GaussianSpec,
};

fn main() -> listexp::Result<()> {
    let spec = GaussianSpec::new(1.0, 1.0)?;
    println!("Gaussian channel, power 1, noise variance 1\n");

    for l in 1..=3u32 {
        let (rho0, r0) = gaussian_tangency(l, &spec)?;
        println!("L = {l}: tangency at R0 = {r0:.9} (correlation {rho0:.9})");
    }

    // larger lists start higher at zero rate (the limit is S L / (2
    // sigma^2 (L+1))) but the affine tail falls with slope -L, so the
    // curves cross at moderate rates
    println!("\n{:>6}  {:>13}  {:>13}  {:>13}", "rate", "L=1", "L=2", "L=3");
    for i in 0..=10 {
        let rate = 0.05 * i as f64;
        let row: Vec<f64> = (1..=3)
            .map(|l| gaussian_ckm_exponent(rate, l, &spec))
            .collect::<listexp::Result<_>>()?;
        println!(
            "{:>6.3}  {:>13.9}  {:>13.9}  {:>13.9}",
            rate, row[0], row[1], row[2]
        );
        if i == 0 {
            assert!(row[1] >= row[0] && row[2] >= row[1], "ordering at R = 0");
        }
    }

    // the optimal pairwise correlation of the codeword tuple, from the
    // L=1 closed form sqrt(1 - e^{-2R}) up to the L=3 solver
    println!("\n{:>6}  {:>12}  {:>12}  {:>12}", "rate", "rho(L=1)", "rho(L=2)", "rho(L=3)");
    for rate in [0.1, 0.3, 0.5] {
        let r: Vec<f64> = (1..=3)
            .map(|l| gaussian_rho_of_rate(rate, l))
            .collect::<listexp::Result<_>>()?;
        println!("{:>6.2}  {:>12.9}  {:>12.9}  {:>12.9}", rate, r[0], r[1], r[2]);
    }

    // random feasible correlation matrices never beat the symmetric one
    let report = symmetric_optimality_check(2, &spec, 0.3, 500, 42)?;
    println!(
        "\nsymmetric optimality: {} random correlation matrices, {} violations (worst margin {:.3e})",
        report.trials, report.violations, report.worst_margin
    );
    assert!(report.ok);
    Ok(())
}
