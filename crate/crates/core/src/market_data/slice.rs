use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use super::PriceSeries;
use crate::error::{Error, Result};

/// Longest run of missing days that is forward-filled.
pub const MAX_FILL_GAP_DAYS: i64 = 3;

/// A calendar-regular daily price vector ending on `end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecentWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub values: Vec<f64>,
    /// Days whose value was carried forward from an earlier observation.
    pub filled: usize,
}

impl RecentWindow {
    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> {
        self.start.iter_days().take(self.values.len())
    }
}

/// Daily prices for the `length_days` calendar days ending on `end_date`.
/// Runs of up to three missing days take the previous observed price;
/// longer runs are an error.
pub fn slice_recent(
    series: &PriceSeries,
    end_date: NaiveDate,
    length_days: usize,
) -> Result<RecentWindow> {
    if length_days == 0 {
        return Err(Error::InvalidArgument("window length must be positive".into()));
    }
    let start = end_date - Duration::days(length_days as i64 - 1);
    let entries = series.entries();
    let insufficient = || Error::InsufficientHistory {
        end: end_date,
        needed: length_days,
        available: if series.first_date() > end_date {
            0
        } else {
            ((end_date - series.first_date()).num_days() + 1) as usize
        },
    };

    // Index of the last observation on or before `start`.
    let mut i = match entries.partition_point(|p| p.date <= start) {
        0 => return Err(insufficient()),
        k => k - 1,
    };

    let mut values = Vec::with_capacity(length_days);
    let mut filled = 0;
    for day in start.iter_days().take(length_days) {
        while i + 1 < entries.len() && entries[i + 1].date <= day {
            i += 1;
        }
        let last = entries[i];
        let missing = (day - last.date).num_days();
        if missing > MAX_FILL_GAP_DAYS {
            let gap_end = entries.get(i + 1).map_or(end_date + Duration::days(1), |p| p.date);
            return Err(Error::GapTooLarge {
                date: gap_end,
                days: (gap_end - last.date).num_days() - 1,
            });
        }
        if missing > 0 {
            filled += 1;
        }
        values.push(last.price);
    }
    Ok(RecentWindow {
        start,
        end: end_date,
        values,
        filled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_data::PricePoint;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn with_missing(len: usize, missing: &[usize]) -> PriceSeries {
        let start = d(2021, 1, 1);
        let pts = (0..len)
            .filter(|i| !missing.contains(i))
            .map(|i| PricePoint {
                date: start + Duration::days(i as i64),
                price: 100.0 + i as f64,
            })
            .collect();
        PriceSeries::new("m", "c", pts).unwrap()
    }

    #[test]
    fn consecutive_days_pass_through() {
        let s = with_missing(100, &[]);
        let w = slice_recent(&s, s.last_date(), 100).unwrap();
        let expect: Vec<f64> = s.entries().iter().map(|p| p.price).collect();
        assert_eq!(w.values, expect);
        assert_eq!(w.filled, 0);
        assert_eq!(w.start, d(2021, 1, 1));
    }

    #[test]
    fn short_gap_is_forward_filled() {
        let s = with_missing(100, &[50, 51]);
        let w = slice_recent(&s, s.last_date(), 100).unwrap();
        assert_eq!(w.filled, 2);
        assert_eq!(w.values[50], w.values[49]);
        assert_eq!(w.values[51], w.values[49]);
        assert_eq!(w.values[52], 152.0);
        assert_eq!(w.values.len(), 100);
    }

    #[test]
    fn long_gap_is_error() {
        let s = with_missing(100, &[40, 41, 42, 43, 44]);
        match slice_recent(&s, s.last_date(), 100) {
            Err(Error::GapTooLarge { days, date }) => {
                assert_eq!(days, 5);
                assert_eq!(date, d(2021, 2, 15));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn end_date_after_data_is_filled_or_rejected() {
        let s = with_missing(100, &[]);
        let w = slice_recent(&s, s.last_date() + Duration::days(2), 100).unwrap();
        assert_eq!(*w.values.last().unwrap(), 199.0);
        assert_eq!(w.filled, 2);
        assert!(matches!(
            slice_recent(&s, s.last_date() + Duration::days(4), 100),
            Err(Error::GapTooLarge { .. })
        ));
    }

    #[test]
    fn insufficient_history() {
        let s = with_missing(50, &[]);
        assert!(matches!(
            slice_recent(&s, s.last_date(), 100),
            Err(Error::InsufficientHistory { available: 50, .. })
        ));
    }

    #[test]
    fn end_date_mid_series() {
        let s = with_missing(200, &[]);
        let w = slice_recent(&s, d(2021, 4, 10), 100).unwrap();
        assert_eq!(w.values.len(), 100);
        assert_eq!(*w.values.last().unwrap(), s.price_on(d(2021, 4, 10)).unwrap());
        assert_eq!(w.dates().last().unwrap(), d(2021, 4, 10));
    }
}
