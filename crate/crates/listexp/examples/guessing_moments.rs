//! Exponents of the guessing moments E[N^rho] of the exceeder count: the
//! established lower bound and the conjectured achievable value, as
//! functions of the moment order at a fixed coding rate.
//!
//! Run with: cargo run --example guessing_moments

use listexp::channel::Dmc;
use listexp::guessing::{
    guessing_moment_conjectured_exponent, guessing_moment_lower_exponent, sp_rho_achiever,
    GuessingQuery,
};

fn main() -> listexp::Result<()> {
    let w = Dmc::bsc(0.1)?;
    let rate = 0.2;
    let crossover = sp_rho_achiever(rate, &w)?;
    println!("BSC(0.1), R = {rate}: sphere-packing order crossover at rho = {crossover:.6}\n");

    println!(
        "{:>6}  {:>14}  {:>14}  {:>10}",
        "rho", "lower", "conjectured", "gap"
    );
    for i in 1..=12 {
        let rho = 0.25 * i as f64;
        let query = GuessingQuery::new(rho, rate, w.clone())?;
        let lower = guessing_moment_lower_exponent(&query)?;
        let conj = guessing_moment_conjectured_exponent(&query)?;
        assert!(conj.conjecture, "the conjectured value carries its marker");
        // the conjecture never undercuts the established bound
        assert!(conj.value >= lower.value - 1e-9);
        println!(
            "{:>6.2}  {:>14.10}  {:>14.10}  {:>10.2e}",
            rho,
            lower.value,
            conj.value,
            conj.value - lower.value
        );
    }

    // below the crossover the moment decays (negative exponent, driven by
    // the sphere-packing exponent); above it the moment grows
    let low = guessing_moment_lower_exponent(&GuessingQuery::new(0.2, rate, w.clone())?)?;
    let high = guessing_moment_lower_exponent(&GuessingQuery::new(3.0, rate, w)?)?;
    println!(
        "\nsign change across the crossover: value({:.1}) = {:.6} < 0 < value({:.1}) = {:.6}",
        0.2, low.value, 3.0, high.value
    );
    assert!(low.value < 0.0 && high.value > 0.0);
    Ok(())
}
