use favorit_core::ranking::{dominance, DominanceRelation, Rule, Side};
use favorit_core::{
    advise_shift, compare_periods, flap_index, rank_periods, ConfidenceInterval, FlapSummary,
    Period,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn summary(period: Period, mean: f64, lower: f64, upper: f64, flap: f64) -> FlapSummary {
    FlapSummary {
        period,
        n_years: 11,
        mean,
        sd: mean / flap,
        ci: ConfidenceInterval { lower, upper, level: 0.95 },
        flap,
    }
}

/// Rule 1 or rule 2 says `a` must rank above `b`.
fn must_precede(a: &FlapSummary, b: &FlapSummary) -> bool {
    a.ci.lower > b.ci.upper || a.mean > b.ci.upper
}

fn arb_summary(period: Period) -> impl Strategy<Value = FlapSummary> {
    (100.0f64..3000.0, 0.0f64..800.0, 0.0f64..800.0, 0.3f64..6.0)
        .prop_map(move |(mean, below, above, flap)| summary(period, mean, mean - below, mean + above, flap))
}

fn arb_set() -> impl Strategy<Value = Vec<FlapSummary>> {
    (2usize..=12)
        .prop_flat_map(|k| Just((1..=12u8).collect::<Vec<_>>()).prop_shuffle().prop_map(move |v| v[..k].to_vec()))
        .prop_flat_map(|months| {
            months
                .into_iter()
                .map(|m| arb_summary(Period::Month(m)))
                .collect::<Vec<_>>()
        })
}

/// Intervals all contain [900, 1200] and means sit in [1000, 1100], so no
/// period dominates another.
fn arb_dominance_free() -> impl Strategy<Value = Vec<FlapSummary>> {
    (2usize..=12).prop_flat_map(|k| {
        (0..k)
            .map(|i| {
                (1000.0f64..1100.0, 0.0f64..300.0, 0.0f64..300.0, 0.3f64..6.0).prop_map(
                    move |(mean, lo, hi, flap)| {
                        summary(Period::Month(i as u8 + 1), mean, 900.0 - lo, 1200.0 + hi, flap)
                    },
                )
            })
            .collect::<Vec<_>>()
    })
}

fn flap_descending(s: &[FlapSummary]) -> Vec<Period> {
    let mut v = s.to_vec();
    v.sort_by(|a, b| b.flap.total_cmp(&a.flap).then(a.period.cmp(&b.period)));
    v.iter().map(|x| x.period).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn output_respects_every_dominance_pair(set in arb_set()) {
        let ranking = rank_periods(&set).unwrap();
        let order: Vec<FlapSummary> = ranking.entries.iter().map(|e| e.summary).collect();
        prop_assert_eq!(order.len(), set.len());
        for i in 0..order.len() {
            for j in (i + 1)..order.len() {
                prop_assert!(!must_precede(&order[j], &order[i]),
                    "{} placed after {} despite dominating it", order[j].period, order[i].period);
            }
        }
        for (idx, e) in ranking.entries.iter().enumerate() {
            prop_assert_eq!(e.rank, idx + 1);
        }
    }

    #[test]
    fn dominance_free_sets_rank_by_flap(set in arb_dominance_free()) {
        let ranking = rank_periods(&set).unwrap();
        prop_assert!(ranking.dominance_edges.is_empty());
        prop_assert_eq!(ranking.order(), flap_descending(&set));
    }

    #[test]
    fn input_order_irrelevant(set in arb_set(), seed in any::<u64>()) {
        let mut shuffled = set.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(rank_periods(&set).unwrap(), rank_periods(&shuffled).unwrap());
    }

    #[test]
    fn price_scale_irrelevant(set in arb_set(), k in prop::sample::select(vec![0.01, 0.5, 3.0, 1000.0])) {
        let scaled: Vec<FlapSummary> = set
            .iter()
            .map(|s| summary(s.period, k * s.mean, k * s.ci.lower, k * s.ci.upper, s.flap))
            .collect();
        prop_assert_eq!(rank_periods(&set).unwrap().order(), rank_periods(&scaled).unwrap().order());
    }

    #[test]
    fn rule2_relation_is_a_strict_partial_order(set in arb_set()) {
        for a in &set {
            prop_assert!(!must_precede(a, a));
            for b in &set {
                if must_precede(a, b) {
                    prop_assert!(!must_precede(b, a));
                    for c in &set {
                        if must_precede(b, c) {
                            prop_assert!(must_precede(a, c));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn comparison_is_antisymmetric(set in arb_set()) {
        for a in &set {
            for b in &set {
                if a.period == b.period {
                    continue;
                }
                let ab = compare_periods(a, b);
                let ba = compare_periods(b, a);
                prop_assert_eq!(ab.rule, ba.rule);
                prop_assert_ne!(ab.winner, ba.winner);
                let rule_oracle = if a.ci.lower > b.ci.upper || b.ci.lower > a.ci.upper {
                    Rule::IntervalDisjoint
                } else if a.mean > b.ci.upper || b.mean > a.ci.upper {
                    Rule::MeanAboveUpper
                } else {
                    Rule::Flap
                };
                prop_assert_eq!(ab.rule, rule_oracle);
                if rule_oracle != Rule::Flap {
                    prop_assert_eq!(ab.winner == Side::A, must_precede(a, b));
                    let dominated = matches!(dominance(a, b), DominanceRelation::Dominates { .. });
                    prop_assert!(dominated);
                }
            }
        }
    }

    #[test]
    fn advice_lists_exactly_the_better_periods(set in arb_set()) {
        let ranking = rank_periods(&set).unwrap();
        for e in &ranking.entries {
            let advice = advise_shift(&ranking, e.period, None).unwrap();
            prop_assert_eq!(advice.current_rank, e.rank);
            prop_assert_eq!(advice.better_periods.len(), e.rank - 1);
            prop_assert_eq!(advice.stay, e.rank == 1);
            prop_assert!(advice.better_periods.windows(2).all(|w| (w[0].distance, w[0].rank) <= (w[1].distance, w[1].rank)));
            let capped = advise_shift(&ranking, e.period, Some(2)).unwrap();
            prop_assert!(capped.better_periods.iter().all(|o| o.distance <= 2));
        }
    }
}

fn oracle_flap(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let ss: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    mean / (ss / (n - 1.0)).sqrt()
}

#[test]
fn flap_matches_mean_over_sample_sd() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let n = rng.random_range(2..40);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(10.0..5000.0)).collect();
        let got = flap_index(&x).unwrap();
        let want = oracle_flap(&x);
        assert!((got - want).abs() <= 1e-12 * want.abs(), "{got} vs {want}");
    }
}

#[test]
fn flap_is_scale_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let n = rng.random_range(2..40);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(10.0..5000.0)).collect();
        let base = flap_index(&x).unwrap();
        for k in [0.1, 7.0, 1000.0] {
            let scaled: Vec<f64> = x.iter().map(|v| k * v).collect();
            let f = flap_index(&scaled).unwrap();
            assert!((f - base).abs() <= 1e-9 * base.abs(), "k={k}: {f} vs {base}");
        }
    }
}

#[test]
fn rejects_duplicate_periods() {
    let a = summary(Period::Month(1), 100.0, 90.0, 110.0, 2.0);
    assert!(rank_periods(&[a, a]).is_err());
    assert!(rank_periods(&[]).is_err());
}

#[test]
fn flap_ties_go_to_calendar_order() {
    let s: Vec<FlapSummary> = [5u8, 2, 9]
        .iter()
        .map(|&m| summary(Period::Month(m), 1000.0, 900.0, 1100.0, 2.0))
        .collect();
    assert_eq!(
        rank_periods(&s).unwrap().order(),
        vec![Period::Month(2), Period::Month(5), Period::Month(9)]
    );
}

#[test]
fn weeks_rank_and_advise_linearly() {
    let s: Vec<FlapSummary> = (1..=6u32)
        .map(|w| summary(Period::Week(w), 1000.0, 900.0, 1100.0, w as f64))
        .collect();
    let ranking = rank_periods(&s).unwrap();
    assert_eq!(ranking.entries[0].period, Period::Week(6));
    let advice = advise_shift(&ranking, Period::Week(1), None).unwrap();
    let dists: Vec<u32> = advice.better_periods.iter().map(|o| o.distance).collect();
    assert_eq!(dists, vec![1, 2, 3, 4, 5]);
}
