//! End-to-end analyses over one price series, shared by the command line
//! and the HTTP service so both report identical results.

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::bootstrap::FlapSummary;
use crate::error::{Error, Result};
use crate::forecast::{auto_forecast, ArimaModel, CandidateScore, ForecastOptions, ForecastPoint};
use crate::market_data::{aggregate_panel, slice_recent, Granularity, PriceSeries};
use crate::period::Period;
use crate::prim::recommend_market_day;
use crate::ranking::{advise_shift, rank_periods, Advice, Ranking};
use crate::summarize_panel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intervals {
    pub granularity: Granularity,
    pub replicates: usize,
    pub seed: u64,
    pub summaries: Vec<FlapSummary>,
    /// Periods with fewer than two yearly values.
    pub insufficient_periods: Vec<Period>,
}

pub fn intervals(
    series: &PriceSeries,
    granularity: Granularity,
    replicates: usize,
    seed: u64,
) -> Result<Intervals> {
    let panel = aggregate_panel(series, granularity);
    let (summaries, insufficient_periods) = summarize_panel(&panel, replicates, seed)?;
    if summaries.is_empty() {
        return Err(Error::InsufficientYears(panel.years().len()));
    }
    Ok(Intervals {
        granularity,
        replicates,
        seed,
        summaries,
        insufficient_periods,
    })
}

pub fn ranking(
    series: &PriceSeries,
    granularity: Granularity,
    replicates: usize,
    seed: u64,
) -> Result<Ranking> {
    rank_periods(&intervals(series, granularity, replicates, seed)?.summaries)
}

pub fn advice(
    series: &PriceSeries,
    granularity: Granularity,
    replicates: usize,
    seed: u64,
    current: Period,
    max_distance: Option<u32>,
) -> Result<Advice> {
    advise_shift(&ranking(series, granularity, replicates, seed)?, current, max_distance)
}

/// Forecast for the days after `end`, fitted on the `fit_len` days ending
/// there, with the recommended market day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketDayForecast {
    pub fit_start: NaiveDate,
    pub fit_end: NaiveDate,
    /// Days in the fitting window carried forward over short gaps.
    pub filled_days: usize,
    pub model: ArimaModel,
    pub candidates: Vec<CandidateScore>,
    pub log_transform: bool,
    pub points: Vec<ForecastPoint>,
    pub recommended_date: NaiveDate,
}

pub fn market_day_forecast(
    series: &PriceSeries,
    end: NaiveDate,
    horizon: usize,
    fit_len: usize,
    options: ForecastOptions,
) -> Result<MarketDayForecast> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    let window = slice_recent(series, end, fit_len)?;
    let fc = auto_forecast(&window.values, horizon, end + Duration::days(1), options)?;
    let recommended_date = recommend_market_day(&fc.points)?;
    Ok(MarketDayForecast {
        fit_start: window.start,
        fit_end: window.end,
        filled_days: window.filled,
        model: fc.model,
        candidates: fc.candidates,
        log_transform: fc.log_transform,
        points: fc.points,
        recommended_date,
    })
}
