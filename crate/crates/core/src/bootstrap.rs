//! Bootstrap distribution of a period's mean price and percentile
//! confidence intervals.
//!
//! Resampling is index-based over a ChaCha8 stream seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`. Replicate `i` consumes draws
//! `[i·n, (i+1)·n)` of the stream, each an index drawn with
//! `Rng::random_range(0..n)`, so a distribution with more replicates
//! extends, rather than reshuffles, one with fewer. The outcome depends
//! only on `(seed, B, n)` and the values themselves.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::period::Period;
use crate::ranking::flap_index;
use crate::stats::{self, quantile_sorted};

pub const DEFAULT_REPLICATES: usize = 10_000;
pub const DEFAULT_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateDistribution {
    /// Ascending.
    pub replicate_means: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    /// Size of the resampled data.
    pub n: usize,
}

impl ReplicateDistribution {
    pub fn quantile(&self, q: f64) -> f64 {
        quantile_sorted(&self.replicate_means, q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

/// Unsorted replicate means, in stream order.
fn replicate_means(values: &[f64], replicates: usize, seed: u64) -> Vec<f64> {
    let n = values.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..replicates)
        .map(|_| {
            let mut sum = 0.0;
            for _ in 0..n {
                sum += values[rng.random_range(0..n)];
            }
            sum / n as f64
        })
        .collect()
}

/// Means of `replicates` with-replacement resamples of `values`.
pub fn bootstrap_mean_distribution(
    values: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<ReplicateDistribution> {
    if values.is_empty() {
        return Err(Error::EmptyValues);
    }
    if replicates == 0 {
        return Err(Error::InvalidArgument("replicate count must be at least 1".into()));
    }
    let mut means = replicate_means(values, replicates, seed);
    means.sort_by(f64::total_cmp);
    Ok(ReplicateDistribution {
        replicate_means: means,
        replicates,
        seed,
        n: values.len(),
    })
}

/// Equal-tailed percentile interval: the `(1 − level)/2` and
/// `1 − (1 − level)/2` empirical quantiles of the replicate means.
pub fn percentile_ci(dist: &ReplicateDistribution, level: f64) -> Result<ConfidenceInterval> {
    if !(0.0..=1.0).contains(&level) {
        return Err(Error::InvalidArgument(format!("level must be in [0, 1], got {level}")));
    }
    let tail = (1.0 - level) / 2.0;
    Ok(ConfidenceInterval {
        lower: dist.quantile(tail),
        upper: dist.quantile(1.0 - tail),
        level,
    })
}

/// Per-period statistics feeding the ranking rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSummary")]
pub struct FlapSummary {
    pub period: Period,
    pub n_years: usize,
    pub mean: f64,
    /// Sample sd (n − 1) of the yearly means.
    pub sd: f64,
    pub ci: ConfidenceInterval,
    /// mean / sd; `f64::INFINITY` when sd is zero.
    #[serde(with = "crate::stats::inf_sentinel")]
    pub flap: f64,
}

#[derive(Deserialize)]
struct RawSummary {
    period: Period,
    n_years: usize,
    mean: f64,
    sd: f64,
    ci: ConfidenceInterval,
    #[serde(with = "crate::stats::inf_sentinel")]
    flap: f64,
}

impl TryFrom<RawSummary> for FlapSummary {
    type Error = Error;

    fn try_from(r: RawSummary) -> Result<Self> {
        let s = FlapSummary {
            period: r.period,
            n_years: r.n_years,
            mean: r.mean,
            sd: r.sd,
            ci: r.ci,
            flap: r.flap,
        };
        s.validate()?;
        Ok(s)
    }
}

impl FlapSummary {
    /// Builds a summary from published mean / interval / FLAP figures,
    /// recovering sd as mean / FLAP.
    pub fn from_published(
        period: Period,
        n_years: usize,
        mean: f64,
        lower: f64,
        upper: f64,
        flap: f64,
    ) -> Result<Self> {
        let s = FlapSummary {
            period,
            n_years,
            mean,
            sd: if flap.is_infinite() { 0.0 } else { mean / flap },
            ci: ConfidenceInterval {
                lower,
                upper,
                level: DEFAULT_LEVEL,
            },
            flap,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| {
            Err(Error::InvalidSummary {
                label: self.period.to_string(),
                reason: reason.to_string(),
            })
        };
        if ![self.mean, self.sd, self.ci.lower, self.ci.upper].iter().all(|v| v.is_finite()) {
            return bad("non-finite statistic");
        }
        if self.flap.is_nan() {
            return bad("FLAP is NaN");
        }
        if self.sd < 0.0 {
            return bad("negative sd");
        }
        if !(self.ci.lower <= self.mean && self.mean <= self.ci.upper) {
            return bad("mean outside confidence interval");
        }
        Ok(())
    }
}

/// Mean, sample sd, 95% bootstrap interval and FLAP index of one period's
/// yearly mean prices.
pub fn summarize_period(
    period: Period,
    values: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<FlapSummary> {
    if values.len() < 2 {
        return Err(Error::InsufficientYears(values.len()));
    }
    let dist = bootstrap_mean_distribution(values, replicates, seed)?;
    let mut ci = percentile_ci(&dist, DEFAULT_LEVEL)?;
    let mean = stats::mean(values);
    // Percentile intervals of very skewed or tiny samples can miss the
    // sample mean by an order statistic; the summary contract needs
    // lower ≤ mean ≤ upper.
    ci.lower = ci.lower.min(mean);
    ci.upper = ci.upper.max(mean);
    let summary = FlapSummary {
        period,
        n_years: values.len(),
        mean,
        sd: stats::sample_sd(values),
        ci,
        flap: flap_index(values)?,
    };
    summary.validate()?;
    Ok(summary)
}

#[derive(Deserialize)]
struct SummaryRow {
    period: String,
    n_years: usize,
    mean: f64,
    lower: f64,
    upper: f64,
    flap: String,
}

/// Reads a table of published summaries with header
/// `period,n_years,mean,lower,upper,flap`. The sd column is implied by
/// mean / flap; `inf` is accepted for an infinite FLAP. Lines starting
/// with `#` are skipped.
pub fn parse_summary_table<R: Read>(input: R) -> Result<Vec<FlapSummary>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut out: Vec<FlapSummary> = Vec::new();
    for row in reader.deserialize::<SummaryRow>() {
        let row = row?;
        let period: Period = row.period.parse()?;
        let flap = match row.flap.as_str() {
            "inf" => f64::INFINITY,
            "-inf" => f64::NEG_INFINITY,
            other => other.parse().map_err(|_| Error::InvalidSummary {
                label: row.period.clone(),
                reason: format!("bad FLAP value {other:?}"),
            })?,
        };
        if out.iter().any(|s| s.period == period) {
            return Err(Error::DuplicateLabel(period.to_string()));
        }
        out.push(FlapSummary::from_published(period, row.n_years, row.mean, row.lower, row.upper, flap)?);
    }
    Ok(out)
}

/// Writes summaries in the format read by [`parse_summary_table`].
pub fn write_summary_table<W: Write>(summaries: &[FlapSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["period", "n_years", "mean", "lower", "upper", "flap"])?;
    for s in summaries {
        let flap = if s.flap.is_infinite() {
            if s.flap > 0.0 { "inf".to_string() } else { "-inf".to_string() }
        } else {
            s.flap.to_string()
        };
        w.write_record([
            s.period.to_string(),
            s.n_years.to_string(),
            s.mean.to_string(),
            s.ci.lower.to_string(),
            s.ci.upper.to_string(),
            flap,
        ])?;
    }
    w.flush()?;
    Ok(())
}
