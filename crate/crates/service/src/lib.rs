//! HTTP API over the favorit analyses.
//!
//! Every successful response is an [`Envelope`] whose `result` is the JSON
//! the core library produces for the same inputs, so the service and the
//! command line always agree. Errors are returned as [`ApiError`] bodies.

mod config;
mod error;
mod routes;

use std::fs::File;
use std::sync::Arc;

use dashmap::DashMap;
use favorit_core::pipeline::MarketDayForecast;
use favorit_core::{load_dataset, parse_summary_table, Dataset, FlapSummary};
use serde::{Deserialize, Serialize};

pub use config::{ConfigError, ServiceConfig, SummaryFixture};
pub use error::ApiError;
pub use routes::{
    router, AdviseRequest, BacktestRequest, Envelope, ForecastKey, ForecastQuery, PeriodQuery,
};

/// Published monthly summaries loaded from a [`SummaryFixture`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedSummaries {
    pub market: String,
    pub commodity: String,
    pub summaries: Vec<FlapSummary>,
}

/// Shared, read-only state behind every request, plus the forecast cache.
#[derive(Debug)]
pub struct AppState {
    dataset: Dataset,
    version: String,
    seed: u64,
    replicates: usize,
    fit_len: usize,
    published: Vec<PublishedSummaries>,
    forecasts: DashMap<ForecastKey, Arc<MarketDayForecast>>,
}

impl AppState {
    pub fn new(dataset: Dataset, config: &ServiceConfig) -> favorit_core::Result<Self> {
        let mut published = Vec::new();
        for fixture in &config.summary_fixtures {
            published.push(PublishedSummaries {
                market: fixture.market.clone(),
                commodity: fixture.commodity.clone(),
                summaries: parse_summary_table(File::open(&fixture.path)?)?,
            });
        }
        Ok(Self {
            version: dataset.version(),
            dataset,
            seed: config.seed,
            replicates: config.replicates,
            fit_len: config.fit_len,
            published,
            forecasts: DashMap::new(),
        })
    }

    /// Loads the configured dataset directory, or starts empty when none
    /// is configured.
    pub fn from_config(config: &ServiceConfig) -> favorit_core::Result<Self> {
        let dataset = match &config.dataset {
            Some(dir) => load_dataset(dir)?,
            None => Dataset::new("empty", Vec::new()),
        };
        Self::new(dataset, config)
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn dataset_version(&self) -> &str {
        &self.version
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cached_forecasts(&self) -> usize {
        self.forecasts.len()
    }

    fn published(&self, market: &str, commodity: &str) -> Option<&PublishedSummaries> {
        self.published.iter().find(|p| {
            p.market.trim().eq_ignore_ascii_case(market.trim())
                && p.commodity.trim().eq_ignore_ascii_case(commodity.trim())
        })
    }
}

/// Binds the configured address and serves until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let state = AppState::from_config(&config).map_err(std::io::Error::other)?;
    tracing::info!(
        version = state.dataset_version(),
        series = state.dataset().series().len(),
        "dataset loaded"
    );
    let app = router(Arc::new(state), &config);
    let listener = tokio::net::TcpListener::bind(config.listen).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

