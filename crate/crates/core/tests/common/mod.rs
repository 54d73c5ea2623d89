#![allow(dead_code)]

use std::fs::File;
use std::path::PathBuf;

use chrono::NaiveDate;
use favorit_core::prim::PrimRow;
use favorit_core::{parse_prim_table, parse_summary_table, FlapSummary, PriceSeries};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const BURN_IN: usize = 200;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn satara_summaries() -> Vec<FlapSummary> {
    parse_summary_table(File::open(fixture("satara_tomato_monthly_summaries.csv")).unwrap()).unwrap()
}

pub fn window_rows(name: &str) -> Vec<PrimRow> {
    parse_prim_table(File::open(fixture(name)).unwrap(), "%d-%m-%Y").unwrap()
}

pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

/// Zero-mean AR(1) with N(0,1) innovations, started at 0 and run through a
/// burn-in before the `n` returned values.
pub fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = 0.0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n + BURN_IN {
        let e: f64 = StandardNormal.sample(&mut rng);
        x = phi * x + e;
        if i >= BURN_IN {
            out.push(x);
        }
    }
    out
}

pub fn white_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

pub fn random_walk(n: usize, seed: u64) -> Vec<f64> {
    white_noise(n, seed)
        .into_iter()
        .scan(0.0, |acc, e| {
            *acc += e;
            Some(*acc)
        })
        .collect()
}

pub const SIGNAL_SIGMA: f64 = 20.0;
pub const SIGNAL_LEVEL: f64 = 1000.0;
pub const SIGNAL_PERIOD_DAYS: f64 = 8.0;

/// Daily prices `level + 3σ·sin(2πt/8) + σ·ε` from 2020-01-01.
pub fn sinusoid_prices(days: usize, seed: u64) -> PriceSeries {
    let noise = white_noise(days, seed);
    let prices: Vec<f64> = noise
        .iter()
        .enumerate()
        .map(|(t, e)| {
            let phase = 2.0 * std::f64::consts::PI * t as f64 / SIGNAL_PERIOD_DAYS;
            SIGNAL_LEVEL + 3.0 * SIGNAL_SIGMA * phase.sin() + SIGNAL_SIGMA * e
        })
        .collect();
    PriceSeries::from_daily("Synthetic", "Sinusoid", date(2020, 1, 1), &prices).unwrap()
}

/// Daily prices `level + σ·ε` from 2020-01-01.
pub fn iid_prices(days: usize, seed: u64) -> PriceSeries {
    let prices: Vec<f64> = white_noise(days, seed)
        .iter()
        .map(|e| SIGNAL_LEVEL + SIGNAL_SIGMA * e)
        .collect();
    PriceSeries::from_daily("Synthetic", "Noise", date(2020, 1, 1), &prices).unwrap()
}
