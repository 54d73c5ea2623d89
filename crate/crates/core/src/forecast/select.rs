use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::transform::{polynomial_roots, roots_outside};
use super::{choose_differencing, fit_arima, ArimaModel, ArimaOrder, MAX_P, MAX_Q};

/// Candidates with an AR or MA root inside this radius are passed over
/// when any better-conditioned candidate exists.
pub const MIN_ROOT_MODULUS: f64 = 1.01;

/// An AR root and an MA root closer than this (relative to the AR root's
/// modulus) are treated as a common factor. Such a model is equivalent to
/// one of lower order and its extra parameters only chase noise.
pub const COMMON_ROOT_TOLERANCE: f64 = 0.05;

fn has_common_factor(m: &ArimaModel) -> bool {
    if m.ar().is_empty() || m.ma().is_empty() {
        return false;
    }
    let neg_ar: Vec<f64> = m.ar().iter().map(|a| -a).collect();
    let ar_roots = polynomial_roots(&neg_ar);
    let ma_roots = polynomial_roots(m.ma());
    ar_roots.iter().any(|a| {
        ma_roots
            .iter()
            .any(|b| (a - b).norm() < COMMON_ROOT_TOLERANCE * a.norm())
    })
}

fn well_conditioned(m: &ArimaModel) -> bool {
    let neg_ma: Vec<f64> = m.ma().iter().map(|t| -t).collect();
    roots_outside(m.ar(), MIN_ROOT_MODULUS)
        && roots_outside(&neg_ma, MIN_ROOT_MODULUS)
        && !has_common_factor(m)
}
use crate::error::{Error, Result};

/// Candidate (p, q) pairs at a fixed differencing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderGrid {
    pub d: usize,
    pub pq: Vec<(usize, usize)>,
}

impl OrderGrid {
    /// p, q ∈ 0..=3.
    pub fn standard(d: usize) -> Self {
        Self {
            d,
            pq: (0..=MAX_P)
                .flat_map(|p| (0..=MAX_Q).map(move |q| (p, q)))
                .collect(),
        }
    }

    fn orders(&self) -> Result<Vec<ArimaOrder>> {
        self.pq
            .iter()
            .map(|&(p, q)| ArimaOrder::new(p, self.d, q))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub order: ArimaOrder,
    #[serde(with = "crate::stats::inf_sentinel")]
    pub aicc: f64,
    /// All AR and MA roots lie outside [`MIN_ROOT_MODULUS`] and no AR root
    /// nearly coincides with an MA root.
    pub well_conditioned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub order: ArimaOrder,
    pub model: ArimaModel,
    /// Every successfully fitted candidate, in grid order.
    pub candidates: Vec<CandidateScore>,
}

/// Fits every grid member and keeps the lowest AICc; ties go to the smaller
/// p + q, then the smaller q. Candidates whose fit fails (e.g. too little
/// data for their order) are skipped. Near-unit-root candidates and
/// candidates with a near-common AR/MA factor only compete when no
/// well-conditioned candidate exists.
pub fn select_order(series: &[f64], grid: &OrderGrid) -> Result<Selection> {
    let orders = grid.orders()?;
    if orders.is_empty() {
        return Err(Error::EmptyGrid);
    }
    // Parallel fits; the winner is chosen by score, never completion order.
    let fits: Vec<Result<ArimaModel>> = orders.par_iter().map(|&o| fit_arima(series, o)).collect();
    let models: Vec<ArimaModel> = fits.into_iter().filter_map(Result::ok).collect();

    let any_well_conditioned = models.iter().any(well_conditioned);
    let best = models
        .iter()
        .filter(|m| !any_well_conditioned || well_conditioned(m))
        .min_by(|a, b| {
            let key = |m: &ArimaModel| (m.order().p + m.order().q, m.order().q);
            a.aicc().total_cmp(&b.aicc()).then(key(a).cmp(&key(b)))
        })
        .ok_or(Error::AllFitsFailed)?
        .clone();
    Ok(Selection {
        order: best.order(),
        candidates: models
            .iter()
            .map(|m| CandidateScore {
                order: m.order(),
                aicc: m.aicc(),
                well_conditioned: well_conditioned(m),
            })
            .collect(),
        model: best,
    })
}

/// [`select_order`] over the standard grid at the differencing order from
/// [`choose_differencing`].
pub fn select_order_auto(series: &[f64]) -> Result<Selection> {
    let d = choose_differencing(series)?;
    select_order(series, &OrderGrid::standard(d))
}
