//! Random-coding and sphere-packing exponent curves for a binary symmetric
//! channel, comparing the two sphere-packing forms and showing where the
//! list random-coding exponent meets the sphere-packing bound.
//!
//! Run with: cargo run --example exponent_curves

use listexp::channel::{Dmc, InputDistribution};
use listexp::csiszar::sphere_packing_csiszar;
use listexp::gallager::{random_coding_exponent, sphere_packing_exponent};
use listexp::info::capacity;

fn main() -> listexp::Result<()> {
    let w = Dmc::bsc(0.1)?;
    let q = InputDistribution::uniform(2);
    let (c, _) = capacity(&w, 1e-12, 10_000);
    println!("BSC(0.1), uniform input, capacity = {c:.6} nats\n");

    println!(
        "{:>6}  {:>12}  {:>12}  {:>12}  {:>12}  {:>12}",
        "rate", "E_r(R,L=1)", "E_r(R,L=2)", "E_r(R,L=4)", "E_sp rho", "E_sp div"
    );
    for i in 1..=10 {
        let rate = c * i as f64 / 11.0;
        let e1 = random_coding_exponent(rate, 1, &w, Some(&q));
        let e2 = random_coding_exponent(rate, 2, &w, Some(&q));
        let e4 = random_coding_exponent(rate, 4, &w, Some(&q));
        let sp = sphere_packing_exponent(rate, &w, Some(&q));
        let csp = sphere_packing_csiszar(rate, &q, &w);
        println!(
            "{:>6.3}  {:>12.8}  {:>12.8}  {:>12.8}  {:>12.8}  {:>12.8}",
            rate, e1.value, e2.value, e4.value, sp.value, csp.value
        );
        // the two sphere-packing forms are the same function
        assert!((sp.value - csp.value).abs() < 1e-6);
        // larger lists only help
        assert!(e2.value >= e1.value - 1e-12 && e4.value >= e2.value - 1e-12);
    }

    // above the critical rate of the list the random-coding exponent
    // already sits on the sphere-packing curve
    let rate = 0.3;
    let sp = sphere_packing_exponent(rate, &w, Some(&q));
    let er = random_coding_exponent(rate, 8, &w, Some(&q));
    println!(
        "\nat R = {rate}: E_r(R, L=8) = {:.9} vs E_sp(R) = {:.9}",
        er.value, sp.value
    );
    Ok(())
}
