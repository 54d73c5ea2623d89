use std::net::SocketAddr;
use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "favorit", version, about = "Volatility-aware market timing for farm produce")]
pub struct Cli {
    /// Dataset directory written by `favorit ingest`.
    #[arg(long, global = true, env = "FAVORIT_DATA_DIR")]
    pub dataset: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a price CSV, clean it and store it as a dataset.
    Ingest(IngestArgs),
    /// Bootstrap mean intervals and FLAP for every period.
    Intervals(PeriodArgs),
    /// Rank periods by volatility-adjusted price.
    Rank(PeriodArgs),
    /// Suggest better periods to move a sale to.
    Advise(AdviseArgs),
    /// Lowest and highest period mean in every year.
    Extremes(ExtremesArgs),
    /// Forecast the next days and recommend a market day.
    Forecast(ForecastArgs),
    /// Replay the market-day recommendation over rolling windows.
    Backtest(BacktestArgs),
    /// Score a predicted-vs-actual table.
    PrimDemo(PrimDemoArgs),
    /// Run the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Price CSV with date, market, commodity and modal_price columns.
    pub input: PathBuf,
    #[arg(long, default_value = "%d-%m-%Y")]
    pub date_format: String,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Label recorded in the manifest; the input file name by default.
    #[arg(long)]
    pub source: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    #[arg(long)]
    pub market: String,
    #[arg(long)]
    pub commodity: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct GranularityArgs {
    #[arg(long, default_value = "month")]
    pub granularity: String,
    /// First day of a weekly window, as MM-DD.
    #[arg(long)]
    pub window_start: Option<String>,
    #[arg(long)]
    pub weeks: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct PeriodArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    pub granularity: GranularityArgs,
    /// Bootstrap replicates.
    #[arg(long = "B", default_value_t = favorit_core::bootstrap::DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Use a published monthly summary table instead of the dataset.
    #[arg(long)]
    pub summaries: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AdviseArgs {
    #[command(flatten)]
    pub period: PeriodArgs,
    /// The period the sale is planned for, e.g. `June` or `W3`.
    #[arg(long)]
    pub current: String,
    #[arg(long)]
    pub max_distance: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ExtremesArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[command(flatten)]
    pub granularity: GranularityArgs,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Last day of the fitting window; the last observed day by default.
    #[arg(long)]
    pub end: Option<NaiveDate>,
    #[arg(long, default_value_t = 8)]
    pub horizon: usize,
    #[arg(long, default_value_t = 100)]
    pub fit_len: usize,
    /// Fit on log prices.
    #[arg(long)]
    pub log: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BacktestArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[arg(long, default_value_t = 100)]
    pub fit_len: usize,
    #[arg(long, default_value_t = 8)]
    pub horizon: usize,
    #[arg(long, default_value_t = 8)]
    pub step: usize,
    #[arg(long)]
    pub log: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PrimDemoArgs {
    /// CSV with date, predicted and actual columns.
    #[arg(long, visible_alias = "table6")]
    pub table: PathBuf,
    #[arg(long, default_value = "%d-%m-%Y")]
    pub date_format: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// TOML service config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub listen: Option<SocketAddr>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "B")]
    pub replicates: Option<usize>,
    /// Directory of static files served next to the API.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
}
