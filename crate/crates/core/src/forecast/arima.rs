use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::simplex::{self, SimplexOptions};
use super::transform::{constrain, is_invertible, is_stationary};
use super::{difference, ArimaOrder, ForecastPoint, MAX_P};
use crate::error::{Error, Result};
use crate::stats;

/// Restart seeds are fixed so a fit depends only on the data and the order.
pub const FIT_SEED: u64 = 0x00c0_41a4_d3a5;
pub const FIT_RESTARTS: usize = 3;
pub const FIT_REL_TOL: f64 = 1e-8;

/// What a fitted model must remember about the end of its training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTail {
    /// Last `max(p + d, 1)` levels, oldest first.
    pub levels: Vec<f64>,
    /// Last `q` one-step residuals on the differenced scale, oldest first.
    pub residuals: Vec<f64>,
}

/// A fitted ARIMA(p, d, q) model.
///
/// On the d-times differenced series `w`, with `x = w − μ` (μ only when
/// d = 0, otherwise zero):
/// `x_t = φ₁x_{t−1} + … + φₚx_{t−p} + e_t + θ₁e_{t−1} + … + θ_qe_{t−q}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct ArimaModel {
    order: ArimaOrder,
    ar: Vec<f64>,
    ma: Vec<f64>,
    mean: Option<f64>,
    sigma2: f64,
    css: f64,
    n_fit: usize,
    #[serde(with = "crate::stats::inf_sentinel")]
    aicc: f64,
    training_tail: TrainingTail,
}

#[derive(Deserialize)]
struct RawModel {
    order: ArimaOrder,
    ar: Vec<f64>,
    ma: Vec<f64>,
    mean: Option<f64>,
    sigma2: f64,
    css: f64,
    n_fit: usize,
    #[serde(with = "crate::stats::inf_sentinel")]
    aicc: f64,
    training_tail: TrainingTail,
}

impl TryFrom<RawModel> for ArimaModel {
    type Error = Error;

    fn try_from(r: RawModel) -> Result<Self> {
        let mut m = ArimaModel::new(r.order, r.ar, r.ma, r.mean, r.training_tail)?;
        m.sigma2 = r.sigma2;
        m.css = r.css;
        m.n_fit = r.n_fit;
        m.aicc = r.aicc;
        Ok(m)
    }
}

impl ArimaModel {
    /// Assembles a model from known coefficients, e.g. for scenario
    /// forecasts. Fit statistics are zero and the AICc is +∞.
    pub fn new(
        order: ArimaOrder,
        ar: Vec<f64>,
        ma: Vec<f64>,
        mean: Option<f64>,
        training_tail: TrainingTail,
    ) -> Result<Self> {
        order.validate()?;
        let invalid = |why: String| Err(Error::InvalidArgument(why));
        if ar.len() != order.p || ma.len() != order.q {
            return invalid(format!("coefficient counts do not match order {order}"));
        }
        if mean.is_some() != (order.d == 0) {
            return invalid("a mean term is present exactly when d = 0".into());
        }
        if training_tail.levels.len() < (order.p + order.d).max(1)
            || training_tail.residuals.len() < order.q
        {
            return invalid("training tail too short for the order".into());
        }
        if !is_stationary(&ar) {
            return invalid("AR polynomial is not stationary".into());
        }
        if !is_invertible(&ma) {
            return invalid("MA polynomial is not invertible".into());
        }
        if ar.iter().chain(&ma).chain(mean.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            order,
            ar,
            ma,
            mean,
            sigma2: 0.0,
            css: 0.0,
            n_fit: 0,
            aicc: f64::INFINITY,
            training_tail,
        })
    }

    pub fn order(&self) -> ArimaOrder {
        self.order
    }

    pub fn ar(&self) -> &[f64] {
        &self.ar
    }

    pub fn ma(&self) -> &[f64] {
        &self.ma
    }

    pub fn mean(&self) -> Option<f64> {
        self.mean
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn css(&self) -> f64 {
        self.css
    }

    pub fn n_fit(&self) -> usize {
        self.n_fit
    }

    pub fn aicc(&self) -> f64 {
        self.aicc
    }

    pub fn training_tail(&self) -> &TrainingTail {
        &self.training_tail
    }

    pub fn last_level(&self) -> f64 {
        *self.training_tail.levels.last().expect("tail holds at least one level")
    }
}

/// Every order is conditioned on the same leading observations so that
/// likelihoods, and hence AICc values, are computed over a common sample.
pub const CONDITIONING_LAGS: usize = MAX_P;

/// One-step residuals conditional on the first [`CONDITIONING_LAGS`]
/// observations; residuals before that are taken as zero. Returns the
/// residuals for `t = CONDITIONING_LAGS..`.
pub fn css_residuals(w: &[f64], ar: &[f64], ma: &[f64], mean: f64) -> Vec<f64> {
    let start = CONDITIONING_LAGS.max(ar.len()).min(w.len());
    let x: Vec<f64> = w.iter().map(|v| v - mean).collect();
    let mut e = vec![0.0; x.len()];
    for t in start..x.len() {
        let mut pred = 0.0;
        for (i, phi) in ar.iter().enumerate() {
            pred += phi * x[t - 1 - i];
        }
        for (j, theta) in ma.iter().enumerate() {
            if t > j {
                pred += theta * e[t - 1 - j];
            }
        }
        e[t] = x[t] - pred;
    }
    e.split_off(start)
}

pub fn css(w: &[f64], ar: &[f64], ma: &[f64], mean: f64) -> f64 {
    css_residuals(w, ar, ma, mean).iter().map(|e| e * e).sum()
}

/// Small-sample corrected AIC from the Gaussian likelihood evaluated at
/// σ² = CSS / n. `k` counts σ² along with the coefficients.
pub fn aicc(sigma2: f64, n: usize, k: usize) -> f64 {
    let n_f = n as f64;
    let loglik = -0.5 * n_f * ((2.0 * std::f64::consts::PI * sigma2).ln() + 1.0);
    if n <= k + 1 {
        return f64::INFINITY;
    }
    -2.0 * loglik + 2.0 * k as f64 + 2.0 * (k * (k + 1)) as f64 / (n_f - k as f64 - 1.0)
}

/// Maps the search vector to (φ, θ, μ). μ is searched in units of the
/// differenced series' sd around its mean, so fits are invariant to the
/// price scale.
struct Layout {
    p: usize,
    q: usize,
    with_mean: bool,
    center: f64,
    scale: f64,
}

impl Layout {
    fn dim(&self) -> usize {
        self.p + self.q + self.with_mean as usize
    }

    fn unpack(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let ar = constrain(&v[..self.p]);
        let ma: Vec<f64> = constrain(&v[self.p..self.p + self.q]).into_iter().map(|c| -c).collect();
        let mean = if self.with_mean {
            self.center + self.scale * v[self.p + self.q]
        } else {
            0.0
        };
        (ar, ma, mean)
    }
}

/// Fits an ARIMA model by minimizing the conditional sum of squares.
pub fn fit_arima(series: &[f64], order: ArimaOrder) -> Result<ArimaModel> {
    order.validate()?;
    let ArimaOrder { p, d, q } = order;
    let needed = d + 10 * (p + q).max(1);
    if series.len() < needed {
        return Err(Error::SeriesTooShort {
            needed,
            got: series.len(),
        });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }

    let w = difference(series, d);
    let with_mean = d == 0;
    let sd = stats::sample_sd(&w);
    let layout = Layout {
        p,
        q,
        with_mean,
        center: stats::mean(&w),
        scale: if sd > 0.0 { sd } else { 1.0 },
    };
    let objective = |v: &[f64]| {
        let (ar, ma, mean) = layout.unpack(v);
        css(&w, &ar, &ma, mean)
    };
    let opts = SimplexOptions {
        rel_tol: FIT_REL_TOL,
        max_evals: 500 * (p + q + 1),
        step: 0.5,
        restarts: FIT_RESTARTS,
        seed: FIT_SEED,
    };
    let best = simplex::minimize(objective, &vec![0.0; layout.dim()], &opts);
    let (ar, ma, mean) = layout.unpack(&best.x);

    let residuals = css_residuals(&w, &ar, &ma, mean);
    let n_fit = residuals.len();
    let css_value: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = css_value / n_fit as f64;
    let k = p + q + with_mean as usize + 1;

    let tail_levels = series[series.len() - (p + d).max(1)..].to_vec();
    let tail_residuals = residuals[residuals.len() - q..].to_vec();
    let mut model = ArimaModel::new(
        order,
        ar,
        ma,
        with_mean.then_some(mean),
        TrainingTail {
            levels: tail_levels,
            residuals: tail_residuals,
        },
    )?;
    model.sigma2 = sigma2;
    model.css = css_value;
    model.n_fit = n_fit;
    model.aicc = aicc(sigma2, n_fit, k);
    Ok(model)
}

/// Point forecasts for `h` days, the first dated `start_date`. Future
/// innovations are zero; differenced forecasts are integrated back to
/// price levels.
pub fn forecast_h(model: &ArimaModel, h: usize, start_date: NaiveDate) -> Vec<ForecastPoint> {
    let ArimaOrder { p, d, q } = model.order;
    let levels = &model.training_tail.levels;
    let mean = model.mean.unwrap_or(0.0);

    // Last value of each differencing stage 0..d, and the last p values of
    // the fully differenced series.
    let mut stage = levels.clone();
    let mut last_of_stage = Vec::with_capacity(d);
    for _ in 0..d {
        last_of_stage.push(*stage.last().unwrap());
        stage = difference(&stage, 1);
    }
    let mut x: Vec<f64> = stage[stage.len() - p..].iter().map(|v| v - mean).collect();
    let mut e: Vec<f64> = model.training_tail.residuals[model.training_tail.residuals.len() - q..].to_vec();

    let mut out = Vec::with_capacity(h);
    for date in start_date.iter_days().take(h) {
        let mut pred = 0.0;
        for (i, phi) in model.ar.iter().enumerate() {
            pred += phi * x[x.len() - 1 - i];
        }
        // Future innovations are pushed as zeros.
        for (j, theta) in model.ma.iter().enumerate() {
            pred += theta * e[e.len() - 1 - j];
        }
        x.push(pred);
        e.push(0.0);

        let mut value = pred + mean;
        for k in (0..d).rev() {
            value += last_of_stage[k];
            last_of_stage[k] = value;
        }
        out.push(ForecastPoint {
            date,
            predicted_price: value,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn random_walk_order_has_closed_form() {
        let ys = [300.0, 310.0, 305.0, 320.0, 318.0, 330.0, 325.0, 340.0, 335.0, 350.0, 352.0];
        let m = fit_arima(&ys, ArimaOrder::new(0, 1, 0).unwrap()).unwrap();
        assert!(m.ar().is_empty() && m.ma().is_empty() && m.mean().is_none());
        let diffs = &difference(&ys, 1)[CONDITIONING_LAGS..];
        let expect = diffs.iter().map(|v| v * v).sum::<f64>() / diffs.len() as f64;
        assert!((m.sigma2() - expect).abs() < 1e-9);
        assert_eq!(m.n_fit(), 10 - CONDITIONING_LAGS);
    }

    #[test]
    fn too_short() {
        let ys = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!(matches!(
            fit_arima(&ys, ArimaOrder::new(3, 0, 3).unwrap()),
            Err(Error::SeriesTooShort { needed: 60, got: 5 })
        ));
    }

    #[test]
    fn non_finite_input() {
        let mut ys = vec![1.0; 50];
        ys[10] = f64::NAN;
        assert!(matches!(fit_arima(&ys, ArimaOrder::new(1, 0, 0).unwrap()), Err(Error::NonFinite)));
    }

    #[test]
    fn flat_forecast_for_random_walk() {
        let model = ArimaModel::new(
            ArimaOrder::new(0, 1, 0).unwrap(),
            vec![],
            vec![],
            None,
            TrainingTail { levels: vec![300.0], residuals: vec![] },
        )
        .unwrap();
        let f = forecast_h(&model, 8, d(2021, 6, 28));
        assert_eq!(f.len(), 8);
        assert!(f.iter().all(|p| p.predicted_price == 300.0));
        assert_eq!(f[7].date, d(2021, 7, 5));
    }

    #[test]
    fn ar1_decay() {
        let model = ArimaModel::new(
            ArimaOrder::new(1, 0, 0).unwrap(),
            vec![0.5],
            vec![],
            Some(0.0),
            TrainingTail { levels: vec![10.0], residuals: vec![] },
        )
        .unwrap();
        let f: Vec<f64> = forecast_h(&model, 4, d(2021, 1, 1)).iter().map(|p| p.predicted_price).collect();
        assert_eq!(f, vec![5.0, 2.5, 1.25, 0.625]);
        assert!(forecast_h(&model, 0, d(2021, 1, 1)).is_empty());
    }

    #[test]
    fn ma_terms_fade_after_q_steps() {
        let model = ArimaModel::new(
            ArimaOrder::new(0, 0, 2).unwrap(),
            vec![],
            vec![0.5, 0.25],
            Some(100.0),
            TrainingTail { levels: vec![104.0], residuals: vec![2.0, 4.0] },
        )
        .unwrap();
        let f: Vec<f64> = forecast_h(&model, 3, d(2021, 1, 1)).iter().map(|p| p.predicted_price).collect();
        assert_eq!(f, vec![100.0 + 0.5 * 4.0 + 0.25 * 2.0, 100.0 + 0.25 * 4.0, 100.0]);
    }

    #[test]
    fn double_integration() {
        // Linear trend under ARIMA(0,2,0): forecasts continue the line.
        let model = ArimaModel::new(
            ArimaOrder::new(0, 2, 0).unwrap(),
            vec![],
            vec![],
            None,
            TrainingTail { levels: vec![10.0, 12.0], residuals: vec![] },
        )
        .unwrap();
        let f: Vec<f64> = forecast_h(&model, 3, d(2021, 1, 1)).iter().map(|p| p.predicted_price).collect();
        assert_eq!(f, vec![14.0, 16.0, 18.0]);
    }

    #[test]
    fn rejects_invalid_parts() {
        let tail = TrainingTail { levels: vec![1.0], residuals: vec![] };
        let o = ArimaOrder::new(1, 0, 0).unwrap();
        assert!(ArimaModel::new(o, vec![1.1], vec![], Some(0.0), tail.clone()).is_err());
        assert!(ArimaModel::new(o, vec![0.5], vec![], None, tail.clone()).is_err());
        assert!(ArimaModel::new(o, vec![], vec![], Some(0.0), tail).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let ys: Vec<f64> = (0..60).map(|i| 100.0 + ((i * 7) % 11) as f64).collect();
        let m = fit_arima(&ys, ArimaOrder::new(1, 0, 1).unwrap()).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: ArimaModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn aicc_penalizes_parameters() {
        assert!(aicc(1.0, 100, 2) < aicc(1.0, 100, 3));
        assert!(aicc(1.0, 3, 2).is_infinite());
    }
}
