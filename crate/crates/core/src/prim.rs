//! Market-day recommendation and its evaluation by price realization
//! improvement (PRIM): the actual price on the recommended day minus the
//! mean actual price over the decision window, i.e. what a seller picking
//! a day at random would expect.

use std::io::{Read, Write};

use chrono::{Duration, NaiveDate};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::{auto_forecast, ArimaOrder, ForecastOptions, ForecastPoint};
use crate::market_data::{slice_recent, PricePoint, PriceSeries};
use crate::stats;

/// Date of the highest predicted price; the earliest such date on ties.
pub fn recommend_market_day(forecasts: &[ForecastPoint]) -> Result<NaiveDate> {
    let mut best = forecasts.first().ok_or(Error::EmptyForecast)?;
    for f in &forecasts[1..] {
        if f.predicted_price > best.predicted_price
            || (f.predicted_price == best.predicted_price && f.date < best.date)
        {
            best = f;
        }
    }
    Ok(best.date)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimReport {
    pub window: Vec<NaiveDate>,
    pub recommended_date: NaiveDate,
    pub predicted_at_recommendation: Option<f64>,
    /// Actual price on the recommended date.
    pub realized: f64,
    /// Mean actual price over the window.
    pub benchmark: f64,
    pub gain: f64,
    /// Strictly positive gain.
    pub success: bool,
}

/// Scores a recommended date against the window's actual prices.
pub fn evaluate_prim(recommended_date: NaiveDate, actuals: &[PricePoint]) -> Result<PrimReport> {
    if actuals.is_empty() {
        return Err(Error::InvalidArgument("no actual prices in window".into()));
    }
    let realized = actuals
        .iter()
        .find(|a| a.date == recommended_date)
        .ok_or(Error::MissingActual(recommended_date))?
        .price;
    let prices: Vec<f64> = actuals.iter().map(|a| a.price).collect();
    let benchmark = stats::mean(&prices);
    let gain = realized - benchmark;
    Ok(PrimReport {
        window: actuals.iter().map(|a| a.date).collect(),
        recommended_date,
        predicted_at_recommendation: None,
        realized,
        benchmark,
        gain,
        success: gain > 0.0,
    })
}

/// Recommends from `forecasts` (restricted to dates with an actual price)
/// and evaluates the recommendation.
pub fn prim_for_forecast(forecasts: &[ForecastPoint], actuals: &[PricePoint]) -> Result<PrimReport> {
    let tradable: Vec<ForecastPoint> = forecasts
        .iter()
        .filter(|f| actuals.iter().any(|a| a.date == f.date))
        .copied()
        .collect();
    let day = recommend_market_day(&tradable)?;
    let mut report = evaluate_prim(day, actuals)?;
    report.predicted_at_recommendation = tradable
        .iter()
        .find(|f| f.date == day)
        .map(|f| f.predicted_price);
    Ok(report)
}

/// One row of a predicted-vs-actual table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimRow {
    pub date: NaiveDate,
    pub predicted: f64,
    pub actual: f64,
}

/// Reads a `date,predicted,actual` CSV with dates in `date_format`.
pub fn parse_prim_table<R: Read>(input: R, date_format: &str) -> Result<Vec<PrimRow>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(id), Some(ip), Some(ia)) = (col("date"), col("predicted"), col("actual")) else {
        let missing = ["date", "predicted", "actual"]
            .into_iter()
            .filter(|c| col(c).is_none())
            .map(String::from)
            .collect();
        return Err(Error::MissingColumns(missing));
    };
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |what: &str| Error::InvalidArgument(format!("line {line}: invalid {what}"));
        let date = NaiveDate::parse_from_str(rec.get(id).unwrap_or(""), date_format)
            .map_err(|_| bad("date"))?;
        let num = |i: usize, what: &str| -> Result<f64> {
            rec.get(i)
                .and_then(|v| v.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(what))
        };
        rows.push(PrimRow {
            date,
            predicted: num(ip, "predicted price")?,
            actual: num(ia, "actual price")?,
        });
    }
    Ok(rows)
}

pub fn prim_for_table(rows: &[PrimRow]) -> Result<PrimReport> {
    let forecasts: Vec<ForecastPoint> = rows
        .iter()
        .map(|r| ForecastPoint { date: r.date, predicted_price: r.predicted })
        .collect();
    let actuals: Vec<PricePoint> = rows
        .iter()
        .map(|r| PricePoint { date: r.date, price: r.actual })
        .collect();
    prim_for_forecast(&forecasts, &actuals)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BacktestConfig {
    pub fit_len: usize,
    pub horizon: usize,
    pub step: usize,
    #[serde(default)]
    pub forecast: ForecastOptions,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        Self {
            fit_len: 100,
            horizon: 8,
            step: 8,
            forecast: ForecastOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowResult {
    /// Last day of the fitting window.
    pub anchor: NaiveDate,
    pub order: ArimaOrder,
    pub forecasts: Vec<ForecastPoint>,
    pub report: PrimReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedWindow {
    pub anchor: NaiveDate,
    pub code: String,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacktestAggregates {
    pub count: usize,
    pub mean_gain: f64,
    pub median_gain: f64,
    /// Standard error of the mean gain (sample sd / √count).
    pub gain_std_error: f64,
    pub success_rate: f64,
}

impl BacktestAggregates {
    pub fn from_windows(windows: &[WindowResult]) -> Self {
        let gains: Vec<f64> = windows.iter().map(|w| w.report.gain).collect();
        let count = gains.len();
        if count == 0 {
            return Self {
                count,
                mean_gain: 0.0,
                median_gain: 0.0,
                gain_std_error: 0.0,
                success_rate: 0.0,
            };
        }
        let mut sorted = gains.clone();
        sorted.sort_by(f64::total_cmp);
        let successes = windows.iter().filter(|w| w.report.success).count();
        Self {
            count,
            mean_gain: stats::mean(&gains),
            median_gain: stats::median(&sorted),
            gain_std_error: if count > 1 {
                stats::sample_sd(&gains) / (count as f64).sqrt()
            } else {
                0.0
            },
            success_rate: successes as f64 / count as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub config: BacktestConfig,
    /// Ordered by anchor date.
    pub windows: Vec<WindowResult>,
    pub skipped: Vec<SkippedWindow>,
    pub aggregates: BacktestAggregates,
}

impl BacktestReport {
    /// One row per evaluated window.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "anchor",
            "order",
            "recommended_date",
            "predicted",
            "realized",
            "benchmark",
            "gain",
            "success",
        ])?;
        for win in &self.windows {
            let r = &win.report;
            w.write_record([
                win.anchor.to_string(),
                win.order.to_string(),
                r.recommended_date.to_string(),
                r.predicted_at_recommendation.map(|v| v.to_string()).unwrap_or_default(),
                r.realized.to_string(),
                r.benchmark.to_string(),
                r.gain.to_string(),
                r.success.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn run_window(series: &PriceSeries, anchor: NaiveDate, config: &BacktestConfig) -> Result<WindowResult> {
    let window = slice_recent(series, anchor, config.fit_len)?;
    let actuals: Vec<PricePoint> = (1..=config.horizon as i64)
        .filter_map(|k| {
            let date = anchor + Duration::days(k);
            series.price_on(date).map(|price| PricePoint { date, price })
        })
        .collect();
    if actuals.is_empty() {
        return Err(Error::InvalidArgument("no observed prices in the horizon".into()));
    }
    let fc = auto_forecast(&window.values, config.horizon, anchor + Duration::days(1), config.forecast)?;
    let report = prim_for_forecast(&fc.points, &actuals)?;
    Ok(WindowResult {
        anchor,
        order: fc.model.order(),
        forecasts: fc.points,
        report,
    })
}

/// Repeats fit → forecast → recommend → evaluate over windows advancing by
/// `step` days. Windows whose data fail the gap rule are skipped and listed.
pub fn rolling_backtest(series: &PriceSeries, config: &BacktestConfig) -> Result<BacktestReport> {
    if config.fit_len == 0 || config.horizon == 0 || config.step == 0 {
        return Err(Error::InvalidArgument("fit_len, horizon and step must be positive".into()));
    }
    let span = (series.last_date() - series.first_date()).num_days() as usize + 1;
    let needed = config.fit_len + config.horizon;
    if span < needed {
        return Err(Error::SeriesTooShort { needed, got: span });
    }
    let first_anchor = series.first_date() + Duration::days(config.fit_len as i64 - 1);
    let anchors: Vec<NaiveDate> = (0..)
        .map(|k| first_anchor + Duration::days((k * config.step) as i64))
        .take_while(|a| *a + Duration::days(config.horizon as i64) <= series.last_date())
        .collect();

    let outcomes: Vec<(NaiveDate, Result<WindowResult>)> = anchors
        .par_iter()
        .map(|&a| (a, run_window(series, a, config)))
        .collect();

    let mut windows = Vec::new();
    let mut skipped = Vec::new();
    for (anchor, outcome) in outcomes {
        match outcome {
            Ok(w) => windows.push(w),
            Err(e) => skipped.push(SkippedWindow {
                anchor,
                code: e.code().to_string(),
                reason: e.to_string(),
            }),
        }
    }
    Ok(BacktestReport {
        config: *config,
        aggregates: BacktestAggregates::from_windows(&windows),
        windows,
        skipped,
    })
}
