use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::PriceRecord;
use crate::error::{Error, Result};

pub const COLUMNS: [&str; 7] = [
    "date",
    "market",
    "commodity",
    "min_price",
    "max_price",
    "modal_price",
    "arrivals",
];

const MANDATORY: [&str; 4] = ["date", "market", "commodity", "modal_price"];

/// Input layout. Columns are located by header name, so their order in the
/// file does not matter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvSchema {
    /// chrono format string; `%d-%m-%Y` matches `28-06-2021`.
    pub date_format: String,
    pub delimiter: u8,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            date_format: "%d-%m-%Y".to_string(),
            delimiter: b',',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    /// 1-based line number in the input, header included.
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParseOutcome {
    pub records: Vec<PriceRecord>,
    pub errors: Vec<RowError>,
}

impl ParseOutcome {
    pub fn total_rows(&self) -> usize {
        self.records.len() + self.errors.len()
    }
}

/// Parses a headered price CSV. Well-formed rows become records; every
/// other row is reported with its line number.
pub fn parse_price_csv<R: Read>(input: R, schema: &CsvSchema) -> Result<ParseOutcome> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
    };
    let missing: Vec<String> = MANDATORY
        .iter()
        .filter(|c| col(c).is_none())
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingColumns(missing));
    }
    let idx_date = col("date").unwrap();
    let idx_market = col("market").unwrap();
    let idx_commodity = col("commodity").unwrap();
    let idx_modal = col("modal_price").unwrap();
    let idx_min = col("min_price");
    let idx_max = col("max_price");
    let idx_arrivals = col("arrivals");

    let mut out = ParseOutcome::default();
    for row in reader.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                if let csv::ErrorKind::Io(_) = e.kind() {
                    return Err(e.into());
                }
                out.errors.push(RowError {
                    line,
                    reason: format!("malformed row: {e}"),
                });
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| row.get(i).unwrap_or("");
        let optional = |i: Option<usize>| -> std::result::Result<Option<f64>, String> {
            match i.map(field) {
                None | Some("") => Ok(None),
                Some(v) => parse_number(v).map(Some),
            }
        };
        let parsed = (|| -> std::result::Result<PriceRecord, String> {
            let date = NaiveDate::parse_from_str(field(idx_date), &schema.date_format)
                .map_err(|_| format!("date format: {:?}", field(idx_date)))?;
            let market = field(idx_market);
            let commodity = field(idx_commodity);
            if market.is_empty() || commodity.is_empty() {
                return Err("missing market or commodity".to_string());
            }
            let modal = field(idx_modal);
            if modal.is_empty() {
                return Err("missing modal price".to_string());
            }
            let record = PriceRecord {
                market: market.to_string(),
                commodity: commodity.to_string(),
                date,
                min_price: optional(idx_min)?,
                max_price: optional(idx_max)?,
                modal_price: parse_number(modal)?,
                arrivals: optional(idx_arrivals)?,
            };
            record.validate().map_err(str::to_string)?;
            Ok(record)
        })();
        match parsed {
            Ok(r) => out.records.push(r),
            Err(reason) => out.errors.push(RowError { line, reason }),
        }
    }
    Ok(out)
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("invalid number: {s:?}")),
    }
}

/// Writes records in the canonical column order. Numbers use the shortest
/// representation that parses back to the same `f64`.
pub fn write_price_csv<W: Write>(
    records: &[PriceRecord],
    output: W,
    schema: &CsvSchema,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(schema.delimiter)
        .from_writer(output);
    w.write_record(COLUMNS)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        w.write_record([
            r.date.format(&schema.date_format).to_string(),
            r.market.clone(),
            r.commodity.clone(),
            opt(r.min_price),
            opt(r.max_price),
            r.modal_price.to_string(),
            opt(r.arrivals),
        ])?;
    }
    w.flush()?;
    Ok(())
}
