//! Randomized invariants: identities that must hold on every valid input,
//! exercised over generated channels, distributions, and documents.

use listexp::channel::{Dmc, InputDistribution, TupleJoint};
use listexp::gallager::e0;
use listexp::info::{capacity, kl_divergence, multi_information, multi_information_kl, mutual_information};
use listexp::opt::{largest_remainder_composition, logsumexp, project_to_simplex};
use listexp::records::{CurveDocument, CurvePoint, ExponentCurve};
use listexp::sim::decode::rank_by_score;
use listexp::sim::{
    generate_fixed_composition_code, run_simulation_with_workers, Decoder, EngineChoice, ListMode,
    SimConfig,
};
use proptest::prelude::*;

fn normalized(raw: Vec<f64>) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

fn dist(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01..1.0f64, k).prop_map(normalized)
}

fn channel(kx: usize, ky: usize) -> impl Strategy<Value = Dmc> {
    prop::collection::vec(dist(ky), kx).prop_map(|rows| Dmc::new(rows).unwrap())
}

/// (q, w) over alphabets up to 3x3.
fn instance() -> impl Strategy<Value = (InputDistribution, Dmc)> {
    (2usize..=3, 2usize..=3).prop_flat_map(|(kx, ky)| {
        (dist(kx), channel(kx, ky))
            .prop_map(|(q, w)| (InputDistribution::new(q).unwrap(), w))
    })
}

proptest! {
    /// Both multi-information routes (entropy sum minus joint entropy,
    /// and KL against the product of marginals) agree to near machine
    /// precision.
    #[test]
    fn multi_information_routes_agree(
        (order, dims) in (2usize..=3, 2usize..=3),
        raw in prop::collection::vec(0.001..1.0f64, 27),
    ) {
        let len = dims.pow(order as u32);
        let pj = TupleJoint::new(order, dims, normalized(raw[..len].to_vec())).unwrap();
        let a = multi_information(&pj);
        let b = multi_information_kl(&pj);
        prop_assert!((a - b).abs() <= 1e-12, "entropy route {a} vs kl route {b}");
        prop_assert!(a >= -1e-12);
    }

    /// The parallel-channel function is zero at the origin, nondecreasing
    /// and concave in the tilt parameter.
    #[test]
    fn e0_is_concave_and_monotone(
        (q, w) in instance(),
        a in 0.0..8.0f64,
        b in 0.0..8.0f64,
    ) {
        prop_assert_eq!(e0(0.0, &q, &w), 0.0);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(e0(lo, &q, &w) <= e0(hi, &q, &w) + 1e-12);
        let mid = 0.5 * (lo + hi);
        prop_assert!(e0(mid, &q, &w) >= 0.5 * (e0(lo, &q, &w) + e0(hi, &q, &w)) - 1e-9);
    }

    /// Divergence is nonnegative; mutual information sits inside its
    /// alphabet bounds and never exceeds capacity.
    #[test]
    fn information_quantities_respect_bounds((q, w) in instance()) {
        let i = mutual_information(&q, &w).unwrap();
        let bound = (w.input_size() as f64).ln().min((w.output_size() as f64).ln());
        prop_assert!(i >= -1e-13 && i <= bound + 1e-12);
        let (cap, _) = capacity(&w, 1e-10, 20_000);
        prop_assert!(cap + 1e-7 >= i, "capacity {cap} below I = {i}");
    }

    #[test]
    fn kl_divergence_is_nonnegative(p in dist(4), q in dist(4)) {
        prop_assert!(kl_divergence(&p, &q) >= -1e-13);
        prop_assert!(kl_divergence(&p, &p).abs() <= 1e-13);
    }

    /// logsumexp matches the naive sum and shifts by constants.
    #[test]
    fn logsumexp_identities(xs in prop::collection::vec(-30.0..30.0f64, 1..8), c in -50.0..50.0f64) {
        let naive = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        let fast = logsumexp(&xs);
        prop_assert!((fast - naive).abs() <= 1e-12 * (1.0 + naive.abs()));
        let shifted: Vec<f64> = xs.iter().map(|x| x + c).collect();
        prop_assert!((logsumexp(&shifted) - fast - c).abs() <= 1e-10);
    }

    /// Simplex projection lands on the simplex, is idempotent, and is the
    /// nearest simplex point in Euclidean distance.
    #[test]
    fn simplex_projection_is_nearest_point(
        v in prop::collection::vec(-5.0..5.0f64, 2..8),
        wraw in prop::collection::vec(0.01..1.0f64, 8),
    ) {
        let p = project_to_simplex(&v);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let again = project_to_simplex(&p);
        for (a, b) in p.iter().zip(&again) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        let w = normalized(wraw[..v.len()].to_vec());
        let d2 = |a: &[f64]| -> f64 {
            a.iter().zip(&v).map(|(x, y)| (x - y) * (x - y)).sum()
        };
        prop_assert!(d2(&p) <= d2(&w) + 1e-9);
    }

    /// Codebook generation is seed-deterministic and every word carries
    /// the exact rounded composition.
    #[test]
    fn codebooks_are_deterministic_and_constant_composition(
        n in 4usize..16,
        m in 1u64..40,
        qraw in dist(3),
        seed in any::<u64>(),
    ) {
        let q = InputDistribution::new(qraw).unwrap();
        let a = generate_fixed_composition_code(n, m, &q, seed).unwrap();
        let b = generate_fixed_composition_code(n, m, &q, seed).unwrap();
        prop_assert_eq!(a.words(), b.words());
        let comp = largest_remainder_composition(q.probs(), n);
        for word in a.words() {
            let mut counts = vec![0usize; 3];
            for &s in word {
                counts[s] += 1;
            }
            prop_assert_eq!(&counts, &comp);
        }
    }

    /// Score ranking agrees with a naive stable sort, ties broken by
    /// index.
    #[test]
    fn rank_by_score_matches_naive_sort(
        scores in prop::collection::vec(-10.0..10.0f64, 1..20),
        lraw in 0usize..20,
    ) {
        let l = 1 + lraw % scores.len();
        let got = rank_by_score(&scores, l);
        let mut idx: Vec<usize> = (0..scores.len()).collect();
        idx.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
        prop_assert_eq!(got, &idx[..l]);
    }

    /// Curves written as CSV parse back to the identical points; the
    /// shortest round-trip float format makes the nats form exact.
    #[test]
    fn curve_csv_round_trips(
        steps in prop::collection::vec(0.01..0.5f64, 1..12),
        exps in prop::collection::vec(0.0..2.0f64, 12),
        midx in 0usize..5,
        l in 0.0..8.0f64,
    ) {
        let methods = [
            "random-coding",
            "sphere-packing",
            "fixed-composition",
            "expurgated-ckm",
            "guessing-lower",
        ];
        let mut rate = 0.0;
        let mut points = Vec::new();
        for (i, s) in steps.iter().enumerate() {
            rate += s;
            points.push(CurvePoint {
                rate_nats: rate,
                exponent_nats: exps[i],
                method: methods[midx].to_string(),
                l_or_lambda: l,
                q_mode: "uniform".to_string(),
                converged: i % 2 == 0,
            });
        }
        let curve = ExponentCurve::new(points).unwrap();
        let back = ExponentCurve::from_csv(&curve.to_csv(false)).unwrap();
        prop_assert_eq!(&back, &curve);
        // bits mode loses at most a rounding step in the scale factor
        let bits = ExponentCurve::from_csv(&curve.to_csv(true)).unwrap();
        for (a, b) in bits.points().iter().zip(curve.points()) {
            prop_assert!((a.rate_nats - b.rate_nats).abs() <= 1e-12 * (1.0 + b.rate_nats.abs()));
            prop_assert!((a.exponent_nats - b.exponent_nats).abs() <= 1e-12);
        }
        let doc = CurveDocument::new(serde_json::json!({"kind": "test"}), curve.clone(), false);
        let parsed = CurveDocument::from_json_str(&doc.to_json_string()).unwrap();
        prop_assert_eq!(parsed.curve.points(), curve.points());
        prop_assert_eq!(listexp::records::check_document(&doc.to_json_string()).unwrap(), "curve");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The simulator is bitwise deterministic in the master seed, for any
    /// worker count, on the literal engine.
    #[test]
    fn simulation_is_seed_deterministic(
        n in 4usize..=8,
        rate in 0.15..0.35f64,
        seed in any::<u64>(),
        workers in 1usize..=3,
    ) {
        let cfg = SimConfig {
            n,
            rate,
            list_mode: ListMode::Fixed(1),
            q: InputDistribution::uniform(2),
            w: Dmc::bsc(0.1).unwrap(),
            decoder: Decoder::Ml,
            trials: 120,
            master_seed: seed,
        };
        let a = run_simulation_with_workers(&cfg, &[1.0], EngineChoice::Literal, workers).unwrap();
        let b = run_simulation_with_workers(&cfg, &[1.0], EngineChoice::Literal, 1).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
