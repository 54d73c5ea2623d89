//! Short-horizon daily price forecasting with ARIMA models fitted by
//! conditional sum of squares.

mod arima;
mod select;
pub mod simplex;
pub mod transform;

use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

pub use arima::{aicc, css, CONDITIONING_LAGS, css_residuals, fit_arima, forecast_h, ArimaModel, TrainingTail};
pub use select::{
    select_order, select_order_auto, CandidateScore, OrderGrid, Selection, COMMON_ROOT_TOLERANCE,
    MIN_ROOT_MODULUS,
};

pub const MAX_P: usize = 3;
pub const MAX_D: usize = 2;
pub const MAX_Q: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrder {
    pub fn new(p: usize, d: usize, q: usize) -> Result<Self> {
        let o = Self { p, d, q };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p > MAX_P || self.d > MAX_D || self.q > MAX_Q {
            return Err(Error::InvalidOrder {
                p: self.p,
                d: self.d,
                q: self.q,
            });
        }
        Ok(())
    }
}

impl fmt::Display for ArimaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.d, self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForecastPoint {
    pub date: NaiveDate,
    pub predicted_price: f64,
}

/// Applies the first difference `d` times.
pub fn difference(xs: &[f64], d: usize) -> Vec<f64> {
    let mut out = xs.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    out
}

pub const MIN_DIFFERENCING_LEN: usize = 20;

/// Picks d ∈ {0, 1, 2} minimizing the sample variance of the differenced
/// series. A smaller d wins when its variance is within 1% of the minimum.
pub fn choose_differencing(series: &[f64]) -> Result<usize> {
    if series.len() < MIN_DIFFERENCING_LEN {
        return Err(Error::SeriesTooShort {
            needed: MIN_DIFFERENCING_LEN,
            got: series.len(),
        });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let variances: Vec<f64> = (0..=MAX_D)
        .map(|d| stats::sample_variance(&difference(series, d)))
        .collect();
    let min = variances.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(variances
        .iter()
        .position(|&v| v <= min * 1.01)
        .expect("the minimum itself qualifies"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ForecastOptions {
    /// Fit and forecast log prices, reporting forecasts back on the price scale.
    pub log_transform: bool,
}

/// Output of the automatic pipeline: differencing choice, order
/// selection, fit and forecast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoForecast {
    pub model: ArimaModel,
    pub candidates: Vec<CandidateScore>,
    pub log_transform: bool,
    pub points: Vec<ForecastPoint>,
}

pub fn auto_forecast(
    values: &[f64],
    horizon: usize,
    start_date: NaiveDate,
    options: ForecastOptions,
) -> Result<AutoForecast> {
    let transformed: Vec<f64> = if options.log_transform {
        if values.iter().any(|v| *v <= 0.0) {
            return Err(Error::InvalidArgument("log transform needs positive prices".into()));
        }
        values.iter().map(|v| v.ln()).collect()
    } else {
        values.to_vec()
    };
    let selection = select_order_auto(&transformed)?;
    let mut points = forecast_h(&selection.model, horizon, start_date);
    if options.log_transform {
        for p in &mut points {
            p.predicted_price = p.predicted_price.exp();
        }
    }
    Ok(AutoForecast {
        model: selection.model,
        candidates: selection.candidates,
        log_transform: options.log_transform,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn differencing_examples() {
        let walk: Vec<f64> = noise(11, 300)
            .iter()
            .scan(0.0, |acc, e| {
                *acc += e;
                Some(*acc)
            })
            .collect();
        assert_eq!(choose_differencing(&walk).unwrap(), 1);
        assert_eq!(choose_differencing(&noise(12, 300)).unwrap(), 0);
        assert_eq!(choose_differencing(&[42.0; 30]).unwrap(), 0);
        let trend: Vec<f64> = (0..30).map(f64::from).collect();
        assert_eq!(choose_differencing(&trend).unwrap(), 1);
        assert!(matches!(
            choose_differencing(&[1.0; 10]),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn order_bounds() {
        assert!(ArimaOrder::new(3, 2, 3).is_ok());
        assert!(matches!(ArimaOrder::new(4, 0, 0), Err(Error::InvalidOrder { .. })));
        assert!(ArimaOrder::new(0, 3, 0).is_err());
        assert_eq!(ArimaOrder::new(1, 0, 2).unwrap().to_string(), "(1,0,2)");
    }

    #[test]
    fn difference_twice() {
        assert_eq!(difference(&[1.0, 4.0, 9.0, 16.0], 2), vec![2.0, 2.0]);
        assert_eq!(difference(&[1.0, 4.0], 0), vec![1.0, 4.0]);
    }

    #[test]
    fn log_pipeline_stays_positive() {
        let start = NaiveDate::from_ymd_opt(2021, 1, 1).unwrap();
        let xs: Vec<f64> = noise(5, 100).iter().map(|e| 500.0 * (0.1 * e).exp()).collect();
        let f = auto_forecast(&xs, 8, start, ForecastOptions { log_transform: true }).unwrap();
        assert_eq!(f.points.len(), 8);
        assert!(f.points.iter().all(|p| p.predicted_price > 0.0));
        let mut bad = xs.clone();
        bad[3] = -1.0;
        assert!(auto_forecast(&bad, 8, start, ForecastOptions { log_transform: true }).is_err());
    }
}
