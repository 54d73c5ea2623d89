use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use super::PriceSeries;
use crate::error::{Error, Result};
use crate::period::Period;

/// A per-year window of consecutive 7-day blocks starting on a fixed
/// month-day (e.g. weeks 1..8 from September 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeekWindow {
    pub start_month: u32,
    pub start_day: u32,
    pub weeks: u32,
}

impl WeekWindow {
    pub fn new(start_month: u32, start_day: u32, weeks: u32) -> Result<Self> {
        // 2021 is not a leap year, so a Feb 29 start is rejected too.
        if NaiveDate::from_ymd_opt(2021, start_month, start_day).is_none() {
            return Err(Error::InvalidArgument(format!(
                "invalid window start {start_month:02}-{start_day:02}"
            )));
        }
        if weeks == 0 || weeks > 52 {
            return Err(Error::InvalidArgument(format!(
                "week count must be in 1..=52, got {weeks}"
            )));
        }
        Ok(Self {
            start_month,
            start_day,
            weeks,
        })
    }

    /// Parses `MM-DD`.
    pub fn parse_start(s: &str, weeks: u32) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("window start must be MM-DD, got {s:?}"));
        let (m, d) = s.trim().split_once('-').ok_or_else(bad)?;
        let m = m.parse().map_err(|_| bad())?;
        let d = d.parse().map_err(|_| bad())?;
        Self::new(m, d, weeks)
    }

    fn start_in(&self, year: i32) -> NaiveDate {
        NaiveDate::from_ymd_opt(year, self.start_month, self.start_day)
            .expect("validated at construction")
    }

    /// Week number and window year for `date`, if it falls inside a window.
    /// A window that crosses New Year belongs to the year it starts in.
    pub fn locate(&self, date: NaiveDate) -> Option<(Period, i32)> {
        for year in [date.year(), date.year() - 1] {
            let offset = (date - self.start_in(year)).num_days();
            if offset >= 0 && offset < 7 * self.weeks as i64 {
                return Some((Period::Week(offset as u32 / 7 + 1), year));
            }
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Granularity {
    Month,
    Week(WeekWindow),
}

impl Granularity {
    /// Builds a granularity from user-facing parts: `month`, or `week`
    /// with a `MM-DD` window start and a week count.
    pub fn from_parts(kind: &str, window_start: Option<&str>, weeks: Option<u32>) -> Result<Self> {
        match kind.trim().to_ascii_lowercase().as_str() {
            "month" | "monthly" => Ok(Granularity::Month),
            "week" | "weekly" => {
                let (Some(start), Some(weeks)) = (window_start, weeks) else {
                    return Err(Error::InvalidArgument(
                        "week granularity needs a window start (MM-DD) and a week count".into(),
                    ));
                };
                Ok(Granularity::Week(WeekWindow::parse_start(start, weeks)?))
            }
            other => Err(Error::InvalidArgument(format!(
                "granularity must be month or week, got {other:?}"
            ))),
        }
    }

    fn locate(&self, date: NaiveDate) -> Option<(Period, i32)> {
        match self {
            Granularity::Month => Some((Period::of_date(date), date.year())),
            Granularity::Week(w) => w.locate(date),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanelCell {
    pub period: Period,
    pub year: i32,
    pub mean: f64,
    pub count: usize,
}

/// (period, year) → mean daily price. Cells without observations are absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalPanel {
    pub granularity: Granularity,
    cells: BTreeMap<(Period, i32), (f64, usize)>,
}

impl SeasonalPanel {
    pub fn empty(granularity: Granularity) -> Self {
        Self {
            granularity,
            cells: BTreeMap::new(),
        }
    }

    /// Builds a panel directly from cell means (e.g. published monthly
    /// averages). Each supplied cell counts as one observation.
    pub fn from_means(
        granularity: Granularity,
        cells: impl IntoIterator<Item = (Period, i32, f64)>,
    ) -> Self {
        Self {
            granularity,
            cells: cells
                .into_iter()
                .map(|(p, y, mean)| ((p, y), (mean, 1)))
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, period: Period, year: i32) -> Option<PanelCell> {
        self.cells.get(&(period, year)).map(|&(mean, count)| PanelCell {
            period,
            year,
            mean,
            count,
        })
    }

    pub fn cells(&self) -> impl Iterator<Item = PanelCell> + '_ {
        self.cells
            .iter()
            .map(|(&(period, year), &(mean, count))| PanelCell {
                period,
                year,
                mean,
                count,
            })
    }

    /// Periods present, in calendar order.
    pub fn periods(&self) -> Vec<Period> {
        let mut ps: Vec<Period> = self.cells.keys().map(|(p, _)| *p).collect();
        ps.dedup();
        ps
    }

    pub fn years(&self) -> Vec<i32> {
        let mut ys: Vec<i32> = self.cells.keys().map(|(_, y)| *y).collect();
        ys.sort_unstable();
        ys.dedup();
        ys
    }

    /// Yearly means for one period, ordered by year.
    pub fn values_for(&self, period: Period) -> Vec<f64> {
        self.cells
            .range((period, i32::MIN)..=(period, i32::MAX))
            .map(|(_, &(mean, _))| mean)
            .collect()
    }
}

/// Averages daily prices into (period, year) cells.
pub fn aggregate_panel(series: &PriceSeries, granularity: Granularity) -> SeasonalPanel {
    let mut sums: BTreeMap<(Period, i32), (f64, usize)> = BTreeMap::new();
    for p in series.entries() {
        if let Some(key) = granularity.locate(p.date) {
            let slot = sums.entry(key).or_insert((0.0, 0));
            slot.0 += p.price;
            slot.1 += 1;
        }
    }
    SeasonalPanel {
        granularity,
        cells: sums
            .into_iter()
            .map(|(k, (sum, n))| (k, (sum / n as f64, n)))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YearExtremes {
    pub year: i32,
    pub min_period: Period,
    pub min_price: f64,
    pub max_period: Period,
    pub max_price: f64,
    /// max_price / min_price
    pub ratio: f64,
}

/// Lowest and highest period mean for every year in the panel. Ties go to
/// the earlier calendar period.
pub fn extremes_by_year(panel: &SeasonalPanel) -> Vec<YearExtremes> {
    let mut per_year: BTreeMap<i32, YearExtremes> = BTreeMap::new();
    // Cells iterate in (period, year) order, so the first cell seen for a
    // given price is the earlier period; strict comparisons keep it.
    for c in panel.cells() {
        per_year
            .entry(c.year)
            .and_modify(|e| {
                if c.mean < e.min_price {
                    e.min_price = c.mean;
                    e.min_period = c.period;
                }
                if c.mean > e.max_price {
                    e.max_price = c.mean;
                    e.max_period = c.period;
                }
            })
            .or_insert(YearExtremes {
                year: c.year,
                min_period: c.period,
                min_price: c.mean,
                max_period: c.period,
                max_price: c.mean,
                ratio: 1.0,
            });
    }
    per_year
        .into_values()
        .map(|mut e| {
            e.ratio = e.max_price / e.min_price;
            e
        })
        .collect()
}
