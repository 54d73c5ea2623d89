//! The bootstrap against exact enumeration of every resample of a tiny
//! sample.

use favorit_core::{bootstrap_mean_distribution, percentile_ci, summarize_period, Period};
use proptest::prelude::*;

const VALUES: [f64; 3] = [1.0, 2.0, 3.0];
const SEED: u64 = 20_240_601;

/// All n^n equally likely index resamples of `values`, as sorted means.
fn exhaustive_means(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let total = n.pow(n as u32);
    let mut means: Vec<f64> = (0..total)
        .map(|mut code| {
            let mut sum = 0.0;
            for _ in 0..n {
                sum += values[code % n];
                code /= n;
            }
            sum / n as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    means
}

/// Inverse-CDF quantile of the uniform distribution over `sorted`.
fn oracle_quantile(sorted: &[f64], q: f64) -> f64 {
    let k = sorted.len() as f64;
    let idx = ((q * k).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

#[test]
fn oracle_enumerates_27_resamples() {
    let m = exhaustive_means(&VALUES);
    assert_eq!(m.len(), 27);
    let count = |x: f64| m.iter().filter(|&&v| (v - x).abs() < 1e-12).count();
    // Multiplicities of sums 3..=9 over three draws from {1,2,3}.
    let expected = [1, 3, 6, 7, 6, 3, 1];
    for (i, &c) in expected.iter().enumerate() {
        assert_eq!(count((3 + i) as f64 / 3.0), c);
    }
}

#[test]
fn quantiles_match_exhaustive_oracle() {
    let dist = bootstrap_mean_distribution(&VALUES, 200_000, SEED).unwrap();
    let oracle = exhaustive_means(&VALUES);
    for q in [0.025, 0.975] {
        let got = dist.quantile(q);
        let want = oracle_quantile(&oracle, q);
        assert!((got - want).abs() <= 0.05, "q={q}: {got} vs {want}");
    }
    let ci = percentile_ci(&dist, 0.95).unwrap();
    assert!((ci.lower - oracle_quantile(&oracle, 0.025)).abs() <= 0.05);
    assert!((ci.upper - oracle_quantile(&oracle, 0.975)).abs() <= 0.05);
}

#[test]
fn replicate_frequencies_match_oracle() {
    let b = 200_000;
    let dist = bootstrap_mean_distribution(&VALUES, b, SEED).unwrap();
    let oracle = exhaustive_means(&VALUES);
    for s in 3..=9 {
        let x = s as f64 / 3.0;
        let p = oracle.iter().filter(|&&v| (v - x).abs() < 1e-9).count() as f64 / 27.0;
        let freq = dist.replicate_means.iter().filter(|&&v| (v - x).abs() < 1e-9).count() as f64
            / b as f64;
        let se = (p * (1.0 - p) / b as f64).sqrt();
        assert!((freq - p).abs() < 5.0 * se, "mean {x}: {freq} vs {p}");
    }
}

#[test]
fn deterministic_bit_for_bit() {
    let a = bootstrap_mean_distribution(&VALUES, 200_000, SEED).unwrap();
    let b = bootstrap_mean_distribution(&VALUES, 200_000, SEED).unwrap();
    assert!(a
        .replicate_means
        .iter()
        .zip(&b.replicate_means)
        .all(|(x, y)| x.to_bits() == y.to_bits()));
    let c = bootstrap_mean_distribution(&VALUES, 200_000, SEED + 1).unwrap();
    assert_ne!(a.replicate_means, c.replicate_means);
}

/// Maps under which every replicate mean of {1,2,3} transforms without
/// rounding in binary floating point.
const EXACT_MAPS: [(f64, f64); 5] = [(1.0, 10.0), (0.5, 0.0), (3.0, -1.0), (1000.0, 5.0), (2.0, 0.5)];

fn mapped(k: f64, c: f64) -> Vec<f64> {
    VALUES.iter().map(|v| k * v + c).collect()
}

#[test]
fn affine_equivariance_exact_maps() {
    let base = bootstrap_mean_distribution(&VALUES, 20_000, SEED).unwrap();
    let ci = percentile_ci(&base, 0.95).unwrap();
    for (k, c) in EXACT_MAPS {
        let d = bootstrap_mean_distribution(&mapped(k, c), 20_000, SEED).unwrap();
        for (x, y) in base.replicate_means.iter().zip(&d.replicate_means) {
            assert_eq!((k * x + c).to_bits(), y.to_bits(), "k={k} c={c}");
        }
        let mci = percentile_ci(&d, 0.95).unwrap();
        assert_eq!(mci.lower, k * ci.lower + c);
        assert_eq!(mci.upper, k * ci.upper + c);
    }
}

#[test]
fn affine_equivariance_general_maps() {
    let base = bootstrap_mean_distribution(&VALUES, 20_000, SEED).unwrap();
    for (k, c) in [(2.0, 10.0), (7.0, 3.0), (0.1, 0.0), (123.456, -7.5)] {
        let d = bootstrap_mean_distribution(&mapped(k, c), 20_000, SEED).unwrap();
        for (x, y) in base.replicate_means.iter().zip(&d.replicate_means) {
            let want = k * x + c;
            assert!((want - y).abs() <= 1e-12 * want.abs().max(1.0), "k={k} c={c}");
        }
    }
}

#[test]
fn shift_by_ten_is_exact() {
    let base = bootstrap_mean_distribution(&VALUES, 5_000, 7).unwrap();
    let shifted = bootstrap_mean_distribution(&mapped(1.0, 10.0), 5_000, 7).unwrap();
    for (x, y) in base.replicate_means.iter().zip(&shifted.replicate_means) {
        assert_eq!(x + 10.0, *y);
    }
}

#[test]
fn hand_computed_summary() {
    let s = summarize_period(Period::Month(3), &[2.0, 4.0, 6.0], 10_000, SEED).unwrap();
    assert_eq!(s.mean, 4.0);
    assert_eq!(s.sd, 2.0);
    assert_eq!(s.flap, 2.0);
    assert!(2.0 <= s.ci.lower && s.ci.upper <= 6.0);
    assert!(s.ci.lower < s.mean && s.mean < s.ci.upper);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn replicates_within_sample_range(
        values in prop::collection::vec(1.0f64..10_000.0, 1..15),
        b in 1usize..400,
        seed in any::<u64>(),
    ) {
        let d = bootstrap_mean_distribution(&values, b, seed).unwrap();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(d.replicate_means.len(), b);
        prop_assert!(d.replicate_means.windows(2).all(|w| w[0] <= w[1]));
        let slack = 1e-9 * hi;
        prop_assert!(d.replicate_means.iter().all(|&m| lo - slack <= m && m <= hi + slack));
    }

    #[test]
    fn ci_nested_in_replicate_range(
        values in prop::collection::vec(1.0f64..10_000.0, 2..15),
        seed in any::<u64>(),
    ) {
        let d = bootstrap_mean_distribution(&values, 500, seed).unwrap();
        let ci = percentile_ci(&d, 0.95).unwrap();
        prop_assert!(d.replicate_means[0] <= ci.lower);
        prop_assert!(ci.lower <= ci.upper);
        prop_assert!(ci.upper <= d.replicate_means[499]);
    }
}
