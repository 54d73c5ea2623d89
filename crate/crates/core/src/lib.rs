//! Decision support for taking produce to market: volatility-adjusted
//! rankings of months or weeks from historical wholesale prices, and
//! short-horizon ARIMA forecasts that recommend a market day.
//!
//! The pipeline, module by module:
//!
//! * [`market_data`] parses, cleans, stores and aggregates daily prices.
//! * [`bootstrap`] builds per-period bootstrap intervals and summaries.
//! * [`ranking`] orders periods and suggests better ones to shift to.
//! * [`forecast`] fits ARIMA models and forecasts daily prices.
//! * [`prim`] picks a market day and scores it against the window mean.
//! * [`pipeline`] chains the above for one series, as the CLI and the HTTP
//!   service run them.

pub mod bootstrap;
pub mod error;
pub mod forecast;
pub mod market_data;
pub mod period;
pub mod pipeline;
pub mod prim;
pub mod ranking;
pub mod stats;

pub use bootstrap::{
    bootstrap_mean_distribution, parse_summary_table, percentile_ci, summarize_period,
    write_summary_table, ConfidenceInterval, FlapSummary, ReplicateDistribution,
};
pub use error::{Error, Result};
pub use forecast::{
    auto_forecast, choose_differencing, fit_arima, forecast_h, select_order, ArimaModel,
    ArimaOrder, AutoForecast, ForecastOptions, ForecastPoint, OrderGrid,
};
pub use market_data::{
    aggregate_panel, clean_series, extremes_by_year, load_dataset, parse_price_csv,
    save_dataset, slice_recent, CsvSchema, Dataset, Granularity, PricePoint, PriceRecord,
    PriceSeries, SeasonalPanel, WeekWindow,
};
pub use period::Period;
pub use prim::{
    evaluate_prim, parse_prim_table, prim_for_table, recommend_market_day, rolling_backtest,
    BacktestConfig, BacktestReport, PrimReport,
};
pub use ranking::{advise_shift, compare_periods, flap_index, rank_periods, Advice, Ranking};

/// Summarizes every period of a panel that has at least two yearly values.
/// Periods with fewer are returned separately.
pub fn summarize_panel(
    panel: &SeasonalPanel,
    replicates: usize,
    seed: u64,
) -> Result<(Vec<FlapSummary>, Vec<Period>)> {
    let mut summaries = Vec::new();
    let mut insufficient = Vec::new();
    for period in panel.periods() {
        let values = panel.values_for(period);
        if values.len() < 2 {
            insufficient.push(period);
            continue;
        }
        summaries.push(summarize_period(period, &values, replicates, seed)?);
    }
    Ok((summaries, insufficient))
}
