use std::fs::File;
use std::path::{Path, PathBuf};

use favorit_core::market_data::{Manifest, RowError};
use favorit_core::pipeline::{self, Intervals};
use favorit_core::{
    advise_shift, aggregate_panel, extremes_by_year, load_dataset, parse_prim_table,
    parse_summary_table, prim_for_table, rank_periods, rolling_backtest, save_dataset,
    BacktestConfig, CsvSchema, Dataset, FlapSummary, ForecastOptions, Granularity,
    Period, PriceSeries, Ranking,
};
use favorit_service::ServiceConfig;
use serde::{Deserialize, Serialize};

use crate::args::*;
use crate::output::{num, render, text, write_output, CliError, Metadata, Rows};

pub struct Context {
    pub dataset: Option<PathBuf>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Context { dataset: cli.dataset, format: cli.format, out: cli.out };
    match cli.command {
        Command::Ingest(a) => ingest(&ctx, a),
        Command::Intervals(a) => intervals(&ctx, a),
        Command::Rank(a) => rank(&ctx, a),
        Command::Advise(a) => advise(&ctx, a),
        Command::Extremes(a) => extremes(&ctx, a),
        Command::Forecast(a) => forecast(&ctx, a),
        Command::Backtest(a) => backtest(&ctx, a),
        Command::PrimDemo(a) => prim_demo(&ctx, a),
        Command::Serve(a) => serve(&ctx, a),
    }
}

fn emit<T: Serialize>(ctx: &Context, meta: &Metadata, result: &T, rows: &Rows) -> Result<(), CliError> {
    let bytes = render(meta, result, rows, ctx.format)?;
    write_output(&bytes, ctx.out.as_deref())
}

fn dataset_dir(ctx: &Context) -> Result<&Path, CliError> {
    ctx.dataset
        .as_deref()
        .ok_or_else(|| CliError::Usage("no dataset: pass --dataset or set FAVORIT_DATA_DIR".into()))
}

fn open_dataset(ctx: &Context) -> Result<Dataset, CliError> {
    let dir = dataset_dir(ctx)?;
    if !dir.is_dir() {
        return Err(CliError::Data(format!("dataset directory {} does not exist", dir.display())));
    }
    load_dataset(dir).map_err(|e| CliError::Data(format!("cannot load dataset {}: {e}", dir.display())))
}

fn find_series<'a>(ds: &'a Dataset, s: &SeriesArgs) -> Result<&'a PriceSeries, CliError> {
    if !ds.has_market(&s.market) {
        return Err(CliError::Data(format!("no data for market {:?}", s.market)));
    }
    let commodity = s
        .commodity
        .as_deref()
        .ok_or_else(|| CliError::Usage("--commodity is required".into()))?;
    ds.find(&s.market, commodity).ok_or_else(|| {
        CliError::Data(format!("no data for commodity {commodity:?} in market {:?}", s.market))
    })
}

fn granularity(g: &GranularityArgs) -> Result<Granularity, CliError> {
    Granularity::from_parts(&g.granularity, g.window_start.as_deref(), g.weeks)
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn series_inputs(meta: Metadata, s: &SeriesArgs) -> Metadata {
    meta.input("market", &s.market).input("commodity", &s.commodity)
}

fn period_inputs(meta: Metadata, a: &PeriodArgs) -> Metadata {
    series_inputs(meta, &a.series)
        .input("granularity", &a.granularity.granularity)
        .input("window_start", &a.granularity.window_start)
        .input("weeks", a.granularity.weeks)
        .input("replicates", a.summaries.is_none().then_some(a.replicates))
        .input("summaries", a.summaries.as_ref().map(|p| p.display().to_string()))
}

/// Summaries either computed from the dataset or read from a published
/// monthly table.
fn summaries(ctx: &Context, a: &PeriodArgs, meta: &mut Metadata) -> Result<Intervals, CliError> {
    let g = granularity(&a.granularity)?;
    if let Some(path) = &a.summaries {
        if g != Granularity::Month {
            return Err(CliError::Usage("--summaries holds monthly figures; use --granularity month".into()));
        }
        let file = File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        meta.source = Some("published".into());
        return Ok(Intervals {
            granularity: g,
            replicates: 0,
            seed: a.seed,
            summaries: parse_summary_table(file)?,
            insufficient_periods: Vec::new(),
        });
    }
    if a.replicates == 0 {
        return Err(CliError::Usage("--B must be positive".into()));
    }
    let ds = open_dataset(ctx)?;
    let series = find_series(&ds, &a.series)?;
    meta.dataset_version = Some(ds.version());
    meta.source = Some("computed".into());
    Ok(pipeline::intervals(series, g, a.replicates, a.seed)?)
}

fn summary_rows(summaries: &[FlapSummary]) -> Rows {
    let mut rows = Rows::new(&["period", "n_years", "mean", "lower", "upper", "flap"]);
    for s in summaries {
        rows.push(vec![
            text(s.period),
            text(s.n_years),
            num(s.mean),
            num(s.ci.lower),
            num(s.ci.upper),
            num(s.flap),
        ]);
    }
    rows
}

fn ranking_rows(r: &Ranking) -> Rows {
    let mut rows = Rows::new(&["rank", "period", "mean", "lower", "upper", "flap"]);
    for e in &r.entries {
        rows.push(vec![
            text(e.rank),
            text(e.period),
            num(e.summary.mean),
            num(e.summary.ci.lower),
            num(e.summary.ci.upper),
            num(e.summary.flap),
        ]);
    }
    rows
}

#[derive(Debug, Serialize, Deserialize)]
pub struct IngestResult {
    pub dataset_version: String,
    pub total_rows: usize,
    pub accepted_rows: usize,
    pub rejected: Vec<RowError>,
    pub manifest: Manifest,
}

fn ingest(ctx: &Context, a: IngestArgs) -> Result<(), CliError> {
    let dir = dataset_dir(ctx)?;
    if !a.delimiter.is_ascii() {
        return Err(CliError::Usage("--delimiter must be a single ASCII character".into()));
    }
    let schema = CsvSchema { date_format: a.date_format.clone(), delimiter: a.delimiter as u8 };
    let file = File::open(&a.input).map_err(|e| CliError::Data(format!("{}: {e}", a.input.display())))?;
    let source = a.source.clone().unwrap_or_else(|| {
        a.input.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
    });
    let (ds, parsed) = Dataset::ingest(file, &schema, &source)?;
    save_dataset(&ds, dir)?;

    let mut meta = Metadata::new("ingest", DEFAULT_SEED)
        .input("input", a.input.display().to_string())
        .input("dataset", dir.display().to_string())
        .input("date_format", &a.date_format)
        .input("delimiter", a.delimiter.to_string())
        .input("source", &source);
    meta.dataset_version = Some(ds.version());
    let manifest = ds.manifest();
    let mut rows = Rows::new(&["market", "commodity", "records", "kept", "merged", "dropped_nonpositive"]);
    for s in &manifest.cleaning_report.series {
        rows.push(vec![
            text(&s.market),
            text(&s.commodity),
            text(s.report.total_records - s.report.other_series),
            text(s.report.kept),
            text(s.report.merged),
            text(s.report.dropped_nonpositive),
        ]);
    }
    let result = IngestResult {
        dataset_version: ds.version(),
        total_rows: parsed.total_rows(),
        accepted_rows: parsed.records.len(),
        rejected: parsed.errors,
        manifest,
    };
    emit(ctx, &meta, &result, &rows)
}

fn intervals(ctx: &Context, a: PeriodArgs) -> Result<(), CliError> {
    let mut meta = period_inputs(Metadata::new("intervals", a.seed), &a);
    let result = summaries(ctx, &a, &mut meta)?;
    emit(ctx, &meta, &result, &summary_rows(&result.summaries))
}

fn rank(ctx: &Context, a: PeriodArgs) -> Result<(), CliError> {
    let mut meta = period_inputs(Metadata::new("rank", a.seed), &a);
    let result = rank_periods(&summaries(ctx, &a, &mut meta)?.summaries)?;
    emit(ctx, &meta, &result, &ranking_rows(&result))
}

fn advise(ctx: &Context, a: AdviseArgs) -> Result<(), CliError> {
    let current: Period = a.current.parse().map_err(|e: favorit_core::Error| CliError::Usage(e.to_string()))?;
    let mut meta = period_inputs(Metadata::new("advise", a.period.seed), &a.period)
        .input("current", current)
        .input("max_distance", a.max_distance);
    let ranking = rank_periods(&summaries(ctx, &a.period, &mut meta)?.summaries)?;
    let result = advise_shift(&ranking, current, a.max_distance)?;
    let mut rows = Rows::new(&["period", "rank", "distance"]);
    for o in &result.better_periods {
        rows.push(vec![text(o.period), text(o.rank), text(o.distance)]);
    }
    emit(ctx, &meta, &result, &rows)
}

fn extremes(ctx: &Context, a: ExtremesArgs) -> Result<(), CliError> {
    let g = granularity(&a.granularity)?;
    let ds = open_dataset(ctx)?;
    let series = find_series(&ds, &a.series)?;
    let mut meta = series_inputs(Metadata::new("extremes", a.seed), &a.series)
        .input("granularity", &a.granularity.granularity)
        .input("window_start", &a.granularity.window_start)
        .input("weeks", a.granularity.weeks);
    meta.dataset_version = Some(ds.version());
    let result = extremes_by_year(&aggregate_panel(series, g));
    let mut rows = Rows::new(&["year", "min_period", "min_price", "max_period", "max_price", "ratio"]);
    for e in &result {
        rows.push(vec![
            text(e.year),
            text(e.min_period),
            num(e.min_price),
            text(e.max_period),
            num(e.max_price),
            num(e.ratio),
        ]);
    }
    emit(ctx, &meta, &result, &rows)
}

fn forecast(ctx: &Context, a: ForecastArgs) -> Result<(), CliError> {
    let ds = open_dataset(ctx)?;
    let series = find_series(&ds, &a.series)?;
    let end = a.end.unwrap_or_else(|| series.last_date());
    let mut meta = series_inputs(Metadata::new("forecast", a.seed), &a.series)
        .input("end", end)
        .input("horizon", a.horizon)
        .input("fit_len", a.fit_len)
        .input("log", a.log);
    meta.dataset_version = Some(ds.version());
    let options = ForecastOptions { log_transform: a.log };
    let result = pipeline::market_day_forecast(series, end, a.horizon, a.fit_len, options)?;
    let mut rows = Rows::new(&["date", "predicted_price", "recommended"]);
    for p in &result.points {
        rows.push(vec![text(p.date), num(p.predicted_price), text(p.date == result.recommended_date)]);
    }
    emit(ctx, &meta, &result, &rows)
}

fn backtest(ctx: &Context, a: BacktestArgs) -> Result<(), CliError> {
    let ds = open_dataset(ctx)?;
    let series = find_series(&ds, &a.series)?;
    let mut meta = series_inputs(Metadata::new("backtest", a.seed), &a.series)
        .input("fit_len", a.fit_len)
        .input("horizon", a.horizon)
        .input("step", a.step)
        .input("log", a.log);
    meta.dataset_version = Some(ds.version());
    let config = BacktestConfig {
        fit_len: a.fit_len,
        horizon: a.horizon,
        step: a.step,
        forecast: ForecastOptions { log_transform: a.log },
    };
    let result = rolling_backtest(series, &config)?;
    let mut rows = Rows::new(&[
        "anchor", "order", "recommended_date", "predicted", "realized", "benchmark", "gain", "success",
    ]);
    for w in &result.windows {
        let r = &w.report;
        rows.push(vec![
            text(w.anchor),
            text(w.order),
            text(r.recommended_date),
            r.predicted_at_recommendation.map(num).unwrap_or_else(|| text("")),
            num(r.realized),
            num(r.benchmark),
            num(r.gain),
            text(r.success),
        ]);
    }
    emit(ctx, &meta, &result, &rows)
}

fn prim_demo(ctx: &Context, a: PrimDemoArgs) -> Result<(), CliError> {
    let file = File::open(&a.table).map_err(|e| CliError::Data(format!("{}: {e}", a.table.display())))?;
    let table = parse_prim_table(file, &a.date_format)?;
    let result = prim_for_table(&table)?;
    let meta = Metadata::new("prim-demo", a.seed)
        .input("table", a.table.display().to_string())
        .input("date_format", &a.date_format);
    let mut rows = Rows::new(&["date", "predicted", "actual", "recommended"]);
    for r in &table {
        rows.push(vec![text(r.date), num(r.predicted), num(r.actual), text(r.date == result.recommended_date)]);
    }
    emit(ctx, &meta, &result, &rows)
}

fn serve(ctx: &Context, a: ServeArgs) -> Result<(), CliError> {
    let mut config = match &a.config {
        Some(path) => ServiceConfig::load(path).map_err(|e| CliError::Usage(e.to_string()))?,
        None => ServiceConfig::default(),
    };
    if let Some(dir) = &ctx.dataset {
        config.dataset = Some(dir.clone());
    }
    if let Some(listen) = a.listen {
        config.listen = listen;
    }
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    if let Some(b) = a.replicates {
        config.replicates = b;
    }
    if let Some(dir) = a.static_dir {
        config.static_dir = Some(dir);
    }
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .init();
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(favorit_service::serve(config))?;
    Ok(())
}
