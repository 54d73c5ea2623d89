//! Ingestion, cleaning, persistence and seasonal aggregation of daily
//! wholesale price records.
//!
//! The representative daily price is the modal price. Minimum/maximum
//! prices and arrivals are carried through ingestion but no analytics
//! consume them.

mod clean;
mod csv_io;
mod panel;
mod slice;
mod store;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use clean::clean_series;
pub use csv_io::{parse_price_csv, write_price_csv, CsvSchema, ParseOutcome, RowError};
pub use panel::{
    aggregate_panel, extremes_by_year, Granularity, PanelCell, SeasonalPanel, WeekWindow,
    YearExtremes,
};
pub use slice::{slice_recent, RecentWindow, MAX_FILL_GAP_DAYS};
pub use store::{load_dataset, save_dataset, Dataset, Manifest, FORMAT_VERSION};

/// One row of a market price report. Prices are Rs/quintal, arrivals tonnes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceRecord {
    pub market: String,
    pub commodity: String,
    pub date: NaiveDate,
    pub min_price: Option<f64>,
    pub max_price: Option<f64>,
    pub modal_price: f64,
    pub arrivals: Option<f64>,
}

impl PriceRecord {
    pub fn new(market: &str, commodity: &str, date: NaiveDate, modal_price: f64) -> Self {
        Self {
            market: market.to_string(),
            commodity: commodity.to_string(),
            date,
            min_price: None,
            max_price: None,
            modal_price,
            arrivals: None,
        }
    }

    /// Checks the record invariants, returning the row-error reason on failure.
    pub fn validate(&self) -> std::result::Result<(), &'static str> {
        if !self.modal_price.is_finite() || self.modal_price <= 0.0 {
            return Err("nonpositive price");
        }
        if let (Some(lo), Some(hi)) = (self.min_price, self.max_price) {
            if !(lo <= self.modal_price && self.modal_price <= hi) {
                return Err("modal price outside min/max");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricePoint {
    pub date: NaiveDate,
    pub price: f64,
}

/// Accounting for [`clean_series`]:
/// `total_records == other_series + dropped_nonpositive + merged + kept`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub total_records: usize,
    pub other_series: usize,
    pub dropped_nonpositive: usize,
    pub merged: usize,
    pub kept: usize,
}

/// Clean daily price history for one market and commodity. Dates are
/// strictly increasing and every price is positive and finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries")]
pub struct PriceSeries {
    market: String,
    commodity: String,
    entries: Vec<PricePoint>,
    cleaning_report: CleaningReport,
}

#[derive(Deserialize)]
struct RawSeries {
    market: String,
    commodity: String,
    entries: Vec<PricePoint>,
    #[serde(default)]
    cleaning_report: CleaningReport,
}

impl TryFrom<RawSeries> for PriceSeries {
    type Error = Error;

    fn try_from(raw: RawSeries) -> Result<Self> {
        PriceSeries::new(&raw.market, &raw.commodity, raw.entries)
            .map(|s| s.with_report(raw.cleaning_report))
    }
}

impl PriceSeries {
    pub fn new(market: &str, commodity: &str, entries: Vec<PricePoint>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptySeries {
                market: market.to_string(),
                commodity: commodity.to_string(),
            });
        }
        for w in entries.windows(2) {
            if w[0].date >= w[1].date {
                return Err(Error::InvalidArgument(format!(
                    "dates not strictly increasing at {}",
                    w[1].date
                )));
            }
        }
        if let Some(p) = entries
            .iter()
            .find(|p| !p.price.is_finite() || p.price <= 0.0)
        {
            return Err(Error::InvalidArgument(format!(
                "nonpositive price on {}",
                p.date
            )));
        }
        let kept = entries.len();
        Ok(Self {
            market: market.to_string(),
            commodity: commodity.to_string(),
            entries,
            cleaning_report: CleaningReport {
                total_records: kept,
                kept,
                ..Default::default()
            },
        })
    }

    /// Convenience constructor for consecutive daily prices starting at `start`.
    pub fn from_daily(
        market: &str,
        commodity: &str,
        start: NaiveDate,
        prices: &[f64],
    ) -> Result<Self> {
        let entries = prices
            .iter()
            .zip(start.iter_days())
            .map(|(&price, date)| PricePoint { date, price })
            .collect();
        Self::new(market, commodity, entries)
    }

    pub fn with_report(mut self, report: CleaningReport) -> Self {
        self.cleaning_report = report;
        self
    }

    pub fn market(&self) -> &str {
        &self.market
    }

    pub fn commodity(&self) -> &str {
        &self.commodity
    }

    pub fn entries(&self) -> &[PricePoint] {
        &self.entries
    }

    pub fn cleaning_report(&self) -> &CleaningReport {
        &self.cleaning_report
    }

    pub fn first_date(&self) -> NaiveDate {
        self.entries[0].date
    }

    pub fn last_date(&self) -> NaiveDate {
        self.entries[self.entries.len() - 1].date
    }

    /// Observed price on `date`, if any.
    pub fn price_on(&self, date: NaiveDate) -> Option<f64> {
        self.entries
            .binary_search_by_key(&date, |p| p.date)
            .ok()
            .map(|i| self.entries[i].price)
    }

    /// Whether this series belongs to the given market and commodity
    /// (ASCII case-insensitive, surrounding whitespace ignored).
    pub fn matches(&self, market: &str, commodity: &str) -> bool {
        same_name(&self.market, market) && same_name(&self.commodity, commodity)
    }
}

pub(crate) fn same_name(a: &str, b: &str) -> bool {
    a.trim().eq_ignore_ascii_case(b.trim())
}
