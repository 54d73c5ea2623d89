//! Ranking of seasonal periods by risk-adjusted price.
//!
//! Three rules compare two periods A and B, tried in order:
//!
//! 1. A's interval lower limit exceeds B's upper limit.
//! 2. A's mean exceeds B's upper limit.
//! 3. A's FLAP index (mean / sd) exceeds B's.
//!
//! Because every summary satisfies `lower ≤ mean ≤ upper`, rule 1 implies
//! rule 2, and the rule-2 relation is a strict partial order (means fall
//! strictly along every edge). [`rank_periods`] emits a linear extension of
//! that order, choosing the highest-FLAP undominated period at each step.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bootstrap::FlapSummary;
use crate::error::{Error, Result};
use crate::period::Period;
use crate::stats;

/// Fluctuation-adjusted price: mean over sample sd, the inverse of the
/// coefficient of variation. Zero spread yields `f64::INFINITY`.
pub fn flap_index(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InsufficientYears(values.len()));
    }
    let sd = stats::sample_sd(values);
    if sd == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(stats::mean(values) / sd)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "rule1")]
    IntervalDisjoint,
    #[serde(rename = "rule2")]
    MeanAboveUpper,
    #[serde(rename = "rule3")]
    Flap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    A,
    B,
}

/// Outcome of the dominance rules (1 and 2) alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DominanceRelation {
    Dominates { winner: Side, rule: Rule },
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub winner: Side,
    pub rule: Rule,
}

pub fn dominance(a: &FlapSummary, b: &FlapSummary) -> DominanceRelation {
    use DominanceRelation::Dominates;
    if a.ci.lower > b.ci.upper {
        Dominates { winner: Side::A, rule: Rule::IntervalDisjoint }
    } else if b.ci.lower > a.ci.upper {
        Dominates { winner: Side::B, rule: Rule::IntervalDisjoint }
    } else if a.mean > b.ci.upper {
        Dominates { winner: Side::A, rule: Rule::MeanAboveUpper }
    } else if b.mean > a.ci.upper {
        Dominates { winner: Side::B, rule: Rule::MeanAboveUpper }
    } else {
        DominanceRelation::None
    }
}

/// Applies rules 1, 2, 3 in order. An exact FLAP tie goes to the earlier
/// calendar period.
pub fn compare_periods(a: &FlapSummary, b: &FlapSummary) -> Comparison {
    if let DominanceRelation::Dominates { winner, rule } = dominance(a, b) {
        return Comparison { winner, rule };
    }
    let winner = if flap_before(a, b) { Side::A } else { Side::B };
    Comparison { winner, rule: Rule::Flap }
}

/// True when `a` is preferred to `b` on FLAP, calendar order breaking ties.
fn flap_before(a: &FlapSummary, b: &FlapSummary) -> bool {
    match a.flap.partial_cmp(&b.flap) {
        Some(std::cmp::Ordering::Greater) => true,
        Some(std::cmp::Ordering::Less) => false,
        _ => a.period <= b.period,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedPeriod {
    pub rank: usize,
    pub period: Period,
    pub summary: FlapSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominanceEdge {
    pub winner: Period,
    pub loser: Period,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    /// Ordered by rank, 1 first.
    pub entries: Vec<RankedPeriod>,
    pub dominance_edges: Vec<DominanceEdge>,
}

impl Ranking {
    pub fn rank_of(&self, period: Period) -> Option<usize> {
        self.entries.iter().find(|e| e.period == period).map(|e| e.rank)
    }

    pub fn order(&self) -> Vec<Period> {
        self.entries.iter().map(|e| e.period).collect()
    }
}

/// Totally orders the periods: rule-1/2 dominance is always respected, and
/// among undominated periods the highest FLAP goes first.
pub fn rank_periods(summaries: &[FlapSummary]) -> Result<Ranking> {
    if summaries.is_empty() {
        return Err(Error::InvalidArgument("no periods to rank".into()));
    }
    let mut items: Vec<&FlapSummary> = summaries.iter().collect();
    items.sort_by_key(|s| s.period);
    for w in items.windows(2) {
        if w[0].period == w[1].period {
            return Err(Error::DuplicateLabel(w[0].period.to_string()));
        }
    }
    for s in &items {
        s.validate()?;
    }

    let k = items.len();
    let mut edges = Vec::new();
    let mut losers_of: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut indegree = vec![0usize; k];
    for i in 0..k {
        for j in (i + 1)..k {
            if let DominanceRelation::Dominates { winner, rule } = dominance(items[i], items[j]) {
                let (w, l) = match winner {
                    Side::A => (i, j),
                    Side::B => (j, i),
                };
                losers_of[w].push(l);
                indegree[l] += 1;
                edges.push(DominanceEdge {
                    winner: items[w].period,
                    loser: items[l].period,
                    rule,
                });
            }
        }
    }

    let mut placed = vec![false; k];
    let mut entries = Vec::with_capacity(k);
    for rank in 1..=k {
        let next = (0..k)
            .filter(|&i| !placed[i] && indegree[i] == 0)
            .reduce(|best, i| if flap_before(items[best], items[i]) { best } else { i })
            .expect("rule-2 dominance is acyclic");
        placed[next] = true;
        for &l in &losers_of[next] {
            indegree[l] -= 1;
        }
        entries.push(RankedPeriod {
            rank,
            period: items[next].period,
            summary: *items[next],
        });
    }

    edges.sort_by_key(|e| (e.winner, e.loser));
    Ok(Ranking {
        entries,
        dominance_edges: edges,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftOption {
    pub period: Period,
    pub rank: usize,
    pub distance: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Advice {
    pub current_period: Period,
    pub current_rank: usize,
    /// Nearest in calendar first, then by rank.
    pub better_periods: Vec<ShiftOption>,
    pub stay: bool,
}

/// Lists every period ranked above `current`, nearest first, optionally
/// limited to `max_distance` calendar steps away.
pub fn advise_shift(ranking: &Ranking, current: Period, max_distance: Option<u32>) -> Result<Advice> {
    let current_rank = ranking
        .rank_of(current)
        .ok_or_else(|| Error::UnknownPeriod(current.to_string()))?;
    let mut better: Vec<ShiftOption> = ranking
        .entries
        .iter()
        .filter(|e| e.rank < current_rank)
        .filter_map(|e| {
            let distance = current.calendar_distance(e.period)?;
            Some(ShiftOption {
                period: e.period,
                rank: e.rank,
                distance,
            })
        })
        .filter(|o| max_distance.is_none_or(|m| o.distance <= m))
        .collect();
    better.sort_by_key(|o| (o.distance, o.rank));
    Ok(Advice {
        current_period: current,
        current_rank,
        stay: better.is_empty(),
        better_periods: better,
    })
}

/// Rank-by-market table: row `r` lists each market's period of rank `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub markets: Vec<String>,
    pub rows: Vec<RankRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub rank: usize,
    pub periods: BTreeMap<String, Period>,
}

impl RankTable {
    pub fn from_rankings(rankings: &[(String, Ranking)]) -> Self {
        let depth = rankings.iter().map(|(_, r)| r.entries.len()).max().unwrap_or(0);
        let rows = (0..depth)
            .map(|i| RankRow {
                rank: i + 1,
                periods: rankings
                    .iter()
                    .filter_map(|(m, r)| r.entries.get(i).map(|e| (m.clone(), e.period)))
                    .collect(),
            })
            .collect();
        Self {
            markets: rankings.iter().map(|(m, _)| m.clone()).collect(),
            rows,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bootstrap::ConfidenceInterval;

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

    fn m(n: u8) -> Period {
        Period::Month(n)
    }

    #[test]
    fn flap_examples() {
        assert_eq!(flap_index(&[2.0, 4.0, 6.0]).unwrap(), 2.0);
        assert_eq!(flap_index(&[20.0, 40.0, 60.0]).unwrap(), 2.0);
        assert_eq!(flap_index(&[7.0, 7.0, 7.0]).unwrap(), f64::INFINITY);
        assert!(matches!(flap_index(&[1.0]), Err(Error::InsufficientYears(1))));
    }

    #[test]
    fn rule_precedence() {
        let july = summary(m(7), 1519.0, 1128.0, 1944.0, 2.12);
        let feb = summary(m(2), 683.0, 562.0, 898.0, 2.52);
        let jan = summary(m(1), 945.0, 746.0, 1233.0, 2.11);
        assert_eq!(compare_periods(&july, &feb), Comparison { winner: Side::A, rule: Rule::IntervalDisjoint });
        assert_eq!(compare_periods(&feb, &july), Comparison { winner: Side::B, rule: Rule::IntervalDisjoint });
        assert_eq!(compare_periods(&july, &jan), Comparison { winner: Side::A, rule: Rule::MeanAboveUpper });
        assert_eq!(compare_periods(&jan, &july), Comparison { winner: Side::B, rule: Rule::MeanAboveUpper });
    }

    #[test]
    fn flap_tie_goes_to_earlier_period() {
        let a = summary(m(5), 100.0, 90.0, 110.0, 2.0);
        let b = summary(m(3), 100.0, 90.0, 110.0, 2.0);
        assert_eq!(compare_periods(&a, &b).winner, Side::B);
        assert_eq!(compare_periods(&b, &a).winner, Side::A);
        assert_eq!(compare_periods(&a, &b).rule, Rule::Flap);
    }

    #[test]
    fn dominance_free_reduces_to_flap_order() {
        let s = [
            summary(m(1), 100.0, 50.0, 150.0, 1.0),
            summary(m(2), 100.0, 50.0, 150.0, 3.0),
            summary(m(3), 100.0, 50.0, 150.0, 2.0),
        ];
        let r = rank_periods(&s).unwrap();
        assert_eq!(r.order(), vec![m(2), m(3), m(1)]);
        assert!(r.dominance_edges.is_empty());
    }

    #[test]
    fn chain_overrides_flap() {
        let s = [
            summary(m(1), 300.0, 290.0, 310.0, 1.0),
            summary(m(2), 200.0, 190.0, 210.0, 2.0),
            summary(m(3), 100.0, 90.0, 110.0, 3.0),
        ];
        let r = rank_periods(&s).unwrap();
        assert_eq!(r.order(), vec![m(1), m(2), m(3)]);
        assert_eq!(r.dominance_edges.len(), 3);
    }

    #[test]
    fn duplicate_and_invalid_inputs() {
        let a = summary(m(1), 100.0, 90.0, 110.0, 2.0);
        assert!(matches!(rank_periods(&[a, a]), Err(Error::DuplicateLabel(_))));
        let bad = summary(m(2), 100.0, 120.0, 130.0, 2.0);
        assert!(matches!(rank_periods(&[a, bad]), Err(Error::InvalidSummary { .. })));
        assert!(rank_periods(&[]).is_err());
    }

    #[test]
    fn advice_ordering_and_filtering() {
        // Ranks: May 1, Dec 2, Aug 3, Jun 4 (all dominance-free).
        let s = [
            summary(m(5), 100.0, 50.0, 150.0, 4.0),
            summary(m(12), 100.0, 50.0, 150.0, 3.0),
            summary(m(8), 100.0, 50.0, 150.0, 2.0),
            summary(m(6), 100.0, 50.0, 150.0, 1.0),
        ];
        let r = rank_periods(&s).unwrap();
        let a = advise_shift(&r, m(6), None).unwrap();
        let order: Vec<Period> = a.better_periods.iter().map(|o| o.period).collect();
        assert_eq!(order, vec![m(5), m(8), m(12)]);
        assert!(!a.stay);

        let near = advise_shift(&r, m(6), Some(1)).unwrap();
        assert_eq!(near.better_periods.len(), 1);

        let top = advise_shift(&r, m(5), None).unwrap();
        assert!(top.stay && top.better_periods.is_empty());

        assert!(matches!(advise_shift(&r, m(1), None), Err(Error::UnknownPeriod(_))));
    }

    #[test]
    fn equidistant_options_ordered_by_rank() {
        let s = [
            summary(m(7), 100.0, 50.0, 150.0, 3.0),
            summary(m(5), 100.0, 50.0, 150.0, 4.0),
            summary(m(6), 100.0, 50.0, 150.0, 1.0),
        ];
        let r = rank_periods(&s).unwrap();
        let a = advise_shift(&r, m(6), None).unwrap();
        assert_eq!(a.better_periods[0].period, m(5));
        assert_eq!(a.better_periods[1].period, m(7));
    }

    #[test]
    fn rank_table_shape() {
        let s = [
            summary(m(1), 100.0, 50.0, 150.0, 1.0),
            summary(m(2), 100.0, 50.0, 150.0, 3.0),
        ];
        let r = rank_periods(&s).unwrap();
        let t = RankTable::from_rankings(&[("Satara".into(), r.clone()), ("Wai".into(), r)]);
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].periods["Satara"], m(2));
        let json = serde_json::to_value(&t).unwrap();
        assert_eq!(json["rows"][0]["periods"]["Wai"], "February");
    }
}
