use std::collections::BTreeMap;

use chrono::NaiveDate;

use super::{same_name, CleaningReport, PricePoint, PriceRecord, PriceSeries};
use crate::error::{Error, Result};

/// Builds the clean daily series for one market and commodity.
///
/// Records for other series are skipped, nonpositive prices dropped, and
/// same-date duplicates merged into their arithmetic mean.
pub fn clean_series(records: &[PriceRecord], market: &str, commodity: &str) -> Result<PriceSeries> {
    let mut report = CleaningReport {
        total_records: records.len(),
        ..Default::default()
    };
    let mut by_date: BTreeMap<NaiveDate, Vec<f64>> = BTreeMap::new();
    let mut names: Option<(&str, &str)> = None;

    for r in records {
        if !(same_name(&r.market, market) && same_name(&r.commodity, commodity)) {
            report.other_series += 1;
            continue;
        }
        if !r.modal_price.is_finite() || r.modal_price <= 0.0 {
            report.dropped_nonpositive += 1;
            continue;
        }
        let spelled = (r.market.trim(), r.commodity.trim());
        if names.is_none_or(|cur| spelled < cur) {
            names = Some(spelled);
        }
        by_date.entry(r.date).or_default().push(r.modal_price);
    }

    let entries: Vec<PricePoint> = by_date
        .into_iter()
        .map(|(date, mut prices)| {
            report.merged += prices.len() - 1;
            // Summing in sorted order makes the merge independent of the
            // input row order, bit for bit.
            prices.sort_by(f64::total_cmp);
            PricePoint {
                date,
                price: prices.iter().sum::<f64>() / prices.len() as f64,
            }
        })
        .collect();
    report.kept = entries.len();

    let (m, c) = names.unwrap_or((market, commodity));
    if entries.is_empty() {
        return Err(Error::EmptySeries {
            market: m.to_string(),
            commodity: c.to_string(),
        });
    }
    Ok(PriceSeries::new(m, c, entries)?.with_report(report))
}
