//! Seasonal period labels: calendar months, or numbered weeks inside a
//! per-year window.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

pub const MONTH_NAMES: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

/// A seasonal period. Ordering follows the calendar: months January..December,
/// weeks 1..K. Months always sort before weeks, but the two kinds never mix
/// inside one panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Period {
    /// Month number, 1..=12.
    Month(u8),
    /// Week number inside the seasonal window, 1-based.
    Week(u32),
}

impl Period {
    pub fn month(m: u32) -> Result<Self, Error> {
        if (1..=12).contains(&m) {
            Ok(Period::Month(m as u8))
        } else {
            Err(Error::UnknownPeriod(m.to_string()))
        }
    }

    pub fn of_date(date: NaiveDate) -> Self {
        Period::Month(date.month() as u8)
    }

    /// Calendar distance between two periods of the same kind. Months wrap
    /// around the year; weeks do not.
    pub fn calendar_distance(self, other: Period) -> Option<u32> {
        match (self, other) {
            (Period::Month(a), Period::Month(b)) => {
                let diff = (a as i32 - b as i32).unsigned_abs();
                Some(diff.min(12 - diff))
            }
            (Period::Week(a), Period::Week(b)) => Some(a.abs_diff(b)),
            _ => None,
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Period::Month(m) => f.write_str(MONTH_NAMES[*m as usize - 1]),
            Period::Week(w) => write!(f, "W{w}"),
        }
    }
}

impl FromStr for Period {
    type Err = Error;

    /// Accepts full or three-letter month names (any case), month numbers
    /// `1`..`12`, and week labels `W3` / `week-3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        for (i, name) in MONTH_NAMES.iter().enumerate() {
            let name = name.to_ascii_lowercase();
            if lower == name || (lower.len() == 3 && name.starts_with(&lower)) {
                return Ok(Period::Month(i as u8 + 1));
            }
        }
        let week = lower
            .strip_prefix("week-")
            .or_else(|| lower.strip_prefix("week"))
            .or_else(|| lower.strip_prefix('w'));
        if let Some(num) = week {
            if let Ok(w) = num.trim().parse::<u32>() {
                if w >= 1 {
                    return Ok(Period::Week(w));
                }
            }
        } else if let Ok(m) = lower.parse::<u32>() {
            return Period::month(m);
        }
        Err(Error::UnknownPeriod(t.to_string()))
    }
}

impl Serialize for Period {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Period {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
