use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, Method};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::NaiveDate;
use favorit_core::pipeline::{self, MarketDayForecast};
use favorit_core::{
    advise_shift, rank_periods, rolling_backtest, Advice, BacktestConfig, BacktestReport,
    FlapSummary, ForecastOptions, Granularity, Period, PriceSeries, Ranking,
};
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::services::ServeDir;

use crate::{ApiError, AppState, PublishedSummaries, ServiceConfig};

const MAX_HORIZON: usize = 366;

/// Wrapper around every successful response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub dataset_version: String,
    pub seed: u64,
    /// `computed` from the dataset or `published` from a summary fixture.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_key: Option<ForecastKey>,
    pub result: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ForecastKey {
    pub market: String,
    pub commodity: String,
    pub end: NaiveDate,
    pub h: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MarketQuery {
    pub market: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PeriodQuery {
    pub market: String,
    pub commodity: String,
    pub granularity: Option<String>,
    pub window_start: Option<String>,
    pub weeks: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct AdviseRequest {
    pub market: String,
    pub commodity: String,
    pub current_period: String,
    pub max_distance: Option<u32>,
    pub granularity: Option<String>,
    pub window_start: Option<String>,
    pub weeks: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ForecastQuery {
    pub market: String,
    pub commodity: String,
    /// Last day of the fitting window; the series' last date when absent.
    pub end: Option<NaiveDate>,
    pub h: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BacktestRequest {
    pub market: String,
    pub commodity: String,
    pub fit_len: Option<usize>,
    pub horizon: Option<usize>,
    pub step: Option<usize>,
}

type Shared = Arc<AppState>;
type ApiResult<T> = Result<Json<Envelope<T>>, ApiError>;

pub fn router(state: Shared, config: &ServiceConfig) -> Router {
    let api = Router::new()
        .route("/markets", get(markets))
        .route("/commodities", get(commodities))
        .route("/intervals", get(intervals))
        .route("/ranking", get(ranking))
        .route("/advise", post(advise))
        .route("/forecast", get(forecast))
        .route("/backtest", post(backtest))
        .fallback(|| async { ApiError::not_found("no_route", "no such endpoint") });

    let mut app = Router::new().nest("/v1", api).with_state(state).layer(cors(config));
    if let Some(dir) = &config.static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    app
}

fn cors(config: &ServiceConfig) -> CorsLayer {
    let layer = CorsLayer::new()
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    match &config.cors_origins {
        None => layer.allow_origin(Any),
        Some(origins) => layer.allow_origin(AllowOrigin::list(
            origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()),
        )),
    }
}

fn envelope<T>(state: &AppState, source: Option<&str>, result: T) -> Envelope<T> {
    Envelope {
        dataset_version: state.version.clone(),
        seed: state.seed,
        source: source.map(str::to_string),
        cache_key: None,
        result,
    }
}

/// Runs CPU-heavy work off the async runtime.
async fn blocking<T, F>(state: Shared, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&AppState) -> Result<T, ApiError> + Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&state))
        .await
        .map_err(|e| ApiError::new(axum::http::StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
}

fn series<'a>(state: &'a AppState, market: &str, commodity: &str) -> Result<&'a PriceSeries, ApiError> {
    state.dataset.find(market, commodity).ok_or_else(|| {
        ApiError::not_found("unknown_series", format!("no data for market {market:?} and commodity {commodity:?}"))
    })
}

enum Source<'a> {
    Published(&'a PublishedSummaries),
    Computed(&'a PriceSeries),
}

impl Source<'_> {
    fn label(&self) -> &'static str {
        match self {
            Source::Published(_) => "published",
            Source::Computed(_) => "computed",
        }
    }
}

/// Published summaries take precedence for monthly requests; everything
/// else is computed from the dataset.
fn source<'a>(
    state: &'a AppState,
    market: &str,
    commodity: &str,
    granularity: Granularity,
) -> Result<Source<'a>, ApiError> {
    if granularity == Granularity::Month {
        if let Some(p) = state.published(market, commodity) {
            return Ok(Source::Published(p));
        }
    }
    series(state, market, commodity).map(Source::Computed)
}

fn granularity(kind: Option<&str>, window_start: Option<&str>, weeks: Option<u32>) -> Result<Granularity, ApiError> {
    Ok(Granularity::from_parts(kind.unwrap_or("month"), window_start, weeks)?)
}

fn compute_intervals(state: &AppState, src: &Source, g: Granularity) -> Result<Vec<FlapSummary>, ApiError> {
    Ok(match src {
        Source::Published(p) => p.summaries.clone(),
        Source::Computed(s) => pipeline::intervals(s, g, state.replicates, state.seed)?.summaries,
    })
}

fn compute_ranking(state: &AppState, src: &Source, g: Granularity) -> Result<Ranking, ApiError> {
    Ok(match src {
        Source::Published(p) => rank_periods(&p.summaries)?,
        Source::Computed(s) => pipeline::ranking(s, g, state.replicates, state.seed)?,
    })
}

async fn markets(State(state): State<Shared>) -> ApiResult<Vec<String>> {
    let mut names = state.dataset.markets();
    for p in &state.published {
        if !names.iter().any(|n| n.eq_ignore_ascii_case(&p.market)) {
            names.push(p.market.clone());
        }
    }
    names.sort();
    Ok(Json(envelope(&state, None, names)))
}

async fn commodities(
    State(state): State<Shared>,
    query: Result<Query<MarketQuery>, QueryRejection>,
) -> ApiResult<Vec<String>> {
    let Query(q) = query?;
    let mut names = state.dataset.commodities(&q.market);
    for p in state.published.iter().filter(|p| p.market.eq_ignore_ascii_case(q.market.trim())) {
        if !names.iter().any(|n| n.eq_ignore_ascii_case(&p.commodity)) {
            names.push(p.commodity.clone());
        }
    }
    if names.is_empty() {
        return Err(ApiError::not_found("unknown_market", format!("no data for market {:?}", q.market)));
    }
    names.sort();
    Ok(Json(envelope(&state, None, names)))
}

async fn intervals(
    State(state): State<Shared>,
    query: Result<Query<PeriodQuery>, QueryRejection>,
) -> ApiResult<Vec<FlapSummary>> {
    let Query(q) = query?;
    blocking(state, move |state| {
        let g = granularity(q.granularity.as_deref(), q.window_start.as_deref(), q.weeks)?;
        let src = source(state, &q.market, &q.commodity, g)?;
        let result = compute_intervals(state, &src, g)?;
        Ok(Json(envelope(state, Some(src.label()), result)))
    })
    .await
}

async fn ranking(
    State(state): State<Shared>,
    query: Result<Query<PeriodQuery>, QueryRejection>,
) -> ApiResult<Ranking> {
    let Query(q) = query?;
    blocking(state, move |state| {
        let g = granularity(q.granularity.as_deref(), q.window_start.as_deref(), q.weeks)?;
        let src = source(state, &q.market, &q.commodity, g)?;
        let result = compute_ranking(state, &src, g)?;
        Ok(Json(envelope(state, Some(src.label()), result)))
    })
    .await
}

async fn advise(
    State(state): State<Shared>,
    body: Result<Json<AdviseRequest>, JsonRejection>,
) -> ApiResult<Advice> {
    let Json(req) = body?;
    blocking(state, move |state| {
        let g = granularity(req.granularity.as_deref(), req.window_start.as_deref(), req.weeks)?;
        let current: Period = req.current_period.parse()?;
        let src = source(state, &req.market, &req.commodity, g)?;
        let ranking = compute_ranking(state, &src, g)?;
        let result = advise_shift(&ranking, current, req.max_distance)?;
        Ok(Json(envelope(state, Some(src.label()), result)))
    })
    .await
}

async fn forecast(
    State(state): State<Shared>,
    query: Result<Query<ForecastQuery>, QueryRejection>,
) -> ApiResult<MarketDayForecast> {
    let Query(q) = query?;
    blocking(state, move |state| {
        let s = series(state, &q.market, &q.commodity)?;
        let h = q.h.unwrap_or(8);
        if h == 0 || h > MAX_HORIZON {
            return Err(favorit_core::Error::InvalidArgument(format!(
                "h must be between 1 and {MAX_HORIZON}"
            ))
            .into());
        }
        let key = ForecastKey {
            market: s.market().to_string(),
            commodity: s.commodity().to_string(),
            end: q.end.unwrap_or_else(|| s.last_date()),
            h,
            seed: state.seed,
        };
        let result = match state.forecasts.get(&key) {
            Some(hit) => Arc::clone(&hit),
            None => {
                let fc = pipeline::market_day_forecast(s, key.end, h, state.fit_len, ForecastOptions::default())?;
                let fc = Arc::new(fc);
                state.forecasts.insert(key.clone(), Arc::clone(&fc));
                fc
            }
        };
        let mut env = envelope(state, None, (*result).clone());
        env.cache_key = Some(key);
        Ok(Json(env))
    })
    .await
}

async fn backtest(
    State(state): State<Shared>,
    body: Result<Json<BacktestRequest>, JsonRejection>,
) -> ApiResult<BacktestReport> {
    let Json(req) = body?;
    blocking(state, move |state| {
        let s = series(state, &req.market, &req.commodity)?;
        let defaults = BacktestConfig {
            fit_len: state.fit_len,
            ..BacktestConfig::default()
        };
        let config = BacktestConfig {
            fit_len: req.fit_len.unwrap_or(defaults.fit_len),
            horizon: req.horizon.unwrap_or(defaults.horizon),
            step: req.step.unwrap_or(defaults.step),
            forecast: ForecastOptions::default(),
        };
        if config.horizon > MAX_HORIZON {
            return Err(favorit_core::Error::InvalidArgument(format!(
                "horizon must be at most {MAX_HORIZON}"
            ))
            .into());
        }
        let result = rolling_backtest(s, &config)?;
        Ok(Json(envelope(state, None, result)))
    })
    .await
}
