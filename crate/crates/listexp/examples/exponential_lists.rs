//! The exponential list-size regime L = e^{lambda n}: its exponent is the
//! sphere-packing exponent at the reduced rate R - lambda. Shows the
//! trade-off against lambda, the critical (finite) list size at several
//! rates, and a small Monte-Carlo spot check of the regime.
//!
//! Run with: cargo run --release --example exponential_lists

use listexp::channel::{Dmc, InputDistribution};
use listexp::csiszar::{critical_list_size, exponential_list_exponent, sphere_packing_csiszar};
use listexp::sim::{run_simulation, Decoder, EngineChoice, ListMode, SimConfig};

fn main() -> listexp::Result<()> {
    let w = Dmc::bsc(0.1)?;
    let q = InputDistribution::uniform(2);

    let rate = 0.3;
    println!("BSC(0.1), uniform Q, R = {rate}\n");
    println!("{:>8}  {:>14}", "lambda", "E(R, lambda)");
    for i in 1..=5 {
        let lambda = 0.05 * i as f64;
        let e = exponential_list_exponent(rate, lambda, &w, Some(&q))?;
        println!("{:>8.2}  {:>14.10}", lambda, e.value);
        // paying rate for list growth always helps the exponent
        let plain = sphere_packing_csiszar(rate, &q, &w);
        assert!(e.value >= plain.value - 1e-12);
    }

    // with a constant list size the benefit stops at the critical size
    println!("\n{:>6}  {:>5}", "rate", "L_c");
    for rate in [0.05, 0.1, 0.2, 0.25, 0.3] {
        let lc = critical_list_size(rate, &q, &w, 64)?;
        println!("{:>6.2}  {:>5}", rate, lc);
    }

    // Monte-Carlo spot check of the regime: the decay SLOPE of ln(error)
    // across blocklengths estimates the exponent; single-n values absorb
    // a polynomial prefactor and are not comparable by themselves
    let (rate, lambda) = (0.4, 0.15);
    println!("\nsimulated exponential regime at R = {rate}, lambda = {lambda}:");
    let mut samples = Vec::new();
    for n in [24usize, 32, 40, 48] {
        let cfg = SimConfig {
            n,
            rate,
            list_mode: ListMode::Exponential(lambda),
            q: q.clone(),
            w: w.clone(),
            decoder: Decoder::Ml,
            trials: 1_000_000,
            master_seed: 9,
        };
        let r = run_simulation(&cfg, &[], EngineChoice::Auto)?;
        println!(
            "  n = {:>2}: L = {:>4}, error = {:.5} +- {:.5}",
            n, r.list_size, r.estimate, r.ci_half_width
        );
        samples.push((n as f64, -r.estimate.ln()));
    }
    // least-squares slope of -ln(error) against n
    let k = samples.len() as f64;
    let (sx, sy): (f64, f64) = samples.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let sxx: f64 = samples.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = samples.iter().map(|p| p.0 * p.1).sum();
    let slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    println!(
        "decay slope {:.4} nats vs asymptotic exponent {:.4}",
        slope,
        exponential_list_exponent(rate, lambda, &w, Some(&q))?.value
    );
    Ok(())
}
