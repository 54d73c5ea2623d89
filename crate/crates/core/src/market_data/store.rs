use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{
    clean_series, parse_price_csv, same_name, write_price_csv, CleaningReport, CsvSchema,
    ParseOutcome, PricePoint, PriceRecord, PriceSeries,
};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
const PRICES_FILE: &str = "prices.csv";
const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub market: String,
    pub commodity: String,
    #[serde(flatten)]
    pub report: CleaningReport,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub rejected_rows: usize,
    pub series: Vec<SeriesReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub source: String,
    pub cleaning_report: DatasetReport,
}

/// An immutable collection of clean series, ordered by (market, commodity).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    source: String,
    rejected_rows: usize,
    series: Vec<PriceSeries>,
}

impl Dataset {
    pub fn new(source: &str, mut series: Vec<PriceSeries>) -> Self {
        series.sort_by(|a, b| {
            (a.market(), a.commodity()).cmp(&(b.market(), b.commodity()))
        });
        Self {
            source: source.to_string(),
            rejected_rows: 0,
            series,
        }
    }

    /// Parses raw rows and cleans every (market, commodity) pair found.
    /// Returns the dataset together with the row-level parse outcome.
    pub fn ingest<R: Read>(input: R, schema: &CsvSchema, source: &str) -> Result<(Self, ParseOutcome)> {
        let parsed = parse_price_csv(input, schema)?;
        let mut dataset = Self::from_records(source, &parsed.records)?;
        dataset.rejected_rows = parsed.errors.len();
        Ok((dataset, parsed))
    }

    pub fn from_records(source: &str, records: &[PriceRecord]) -> Result<Self> {
        let mut keys: BTreeMap<(String, String), (String, String)> = BTreeMap::new();
        for r in records {
            let key = (
                r.market.trim().to_ascii_lowercase(),
                r.commodity.trim().to_ascii_lowercase(),
            );
            // Among case variants, the smallest spelling names the series,
            // whatever the row order.
            let spelled = (r.market.trim().to_string(), r.commodity.trim().to_string());
            keys.entry(key)
                .and_modify(|cur| {
                    if spelled < *cur {
                        *cur = spelled.clone();
                    }
                })
                .or_insert(spelled);
        }
        let mut series = Vec::with_capacity(keys.len());
        for (market, commodity) in keys.into_values() {
            match clean_series(records, &market, &commodity) {
                Ok(s) => series.push(s),
                Err(Error::EmptySeries { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(Self::new(source, series))
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn series(&self) -> &[PriceSeries] {
        &self.series
    }

    pub fn find(&self, market: &str, commodity: &str) -> Option<&PriceSeries> {
        self.series.iter().find(|s| s.matches(market, commodity))
    }

    pub fn has_market(&self, market: &str) -> bool {
        self.series.iter().any(|s| same_name(s.market(), market))
    }

    pub fn markets(&self) -> Vec<String> {
        let mut m: Vec<String> = self.series.iter().map(|s| s.market().to_string()).collect();
        m.dedup();
        m
    }

    pub fn commodities(&self, market: &str) -> Vec<String> {
        self.series
            .iter()
            .filter(|s| same_name(s.market(), market))
            .map(|s| s.commodity().to_string())
            .collect()
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            format_version: FORMAT_VERSION,
            source: self.source.clone(),
            cleaning_report: DatasetReport {
                rejected_rows: self.rejected_rows,
                series: self
                    .series
                    .iter()
                    .map(|s| SeriesReport {
                        market: s.market().to_string(),
                        commodity: s.commodity().to_string(),
                        report: *s.cleaning_report(),
                    })
                    .collect(),
            },
        }
    }

    fn records(&self) -> Vec<PriceRecord> {
        self.series
            .iter()
            .flat_map(|s| {
                s.entries()
                    .iter()
                    .map(|p| PriceRecord::new(s.market(), s.commodity(), p.date, p.price))
            })
            .collect()
    }

    fn encode(&self) -> Result<(Vec<u8>, Vec<u8>)> {
        let mut csv = Vec::new();
        write_price_csv(&self.records(), &mut csv, &CsvSchema::default())?;
        let manifest = serde_json::to_vec_pretty(&self.manifest())?;
        Ok((csv, manifest))
    }

    /// Short content hash of the persisted form; identifies a dataset
    /// snapshot in reports and API responses.
    pub fn version(&self) -> String {
        let (csv, manifest) = self.encode().expect("in-memory encoding cannot fail");
        let digest = Sha256::new()
            .chain_update(&csv)
            .chain_update(&manifest)
            .finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Writes `prices.csv` and `manifest.json` into `dir`, creating it if needed.
pub fn save_dataset(dataset: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let (csv, manifest) = dataset.encode()?;
    fs::write(dir.join(PRICES_FILE), csv)?;
    fs::write(dir.join(MANIFEST_FILE), manifest)?;
    Ok(())
}

pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let manifest_bytes = fs::read(dir.join(MANIFEST_FILE))?;
    let manifest: Manifest = serde_json::from_slice(&manifest_bytes)
        .map_err(|e| Error::CorruptDataset(format!("manifest: {e}")))?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(manifest.format_version));
    }
    let csv = fs::read(dir.join(PRICES_FILE))?;
    let parsed = parse_price_csv(csv.as_slice(), &CsvSchema::default())?;
    if let Some(e) = parsed.errors.first() {
        return Err(Error::CorruptDataset(format!(
            "{PRICES_FILE} line {}: {}",
            e.line, e.reason
        )));
    }

    // Stored rows are already clean: group them verbatim and re-validate.
    let mut groups: BTreeMap<(String, String), Vec<PricePoint>> = BTreeMap::new();
    for r in parsed.records {
        groups
            .entry((r.market, r.commodity))
            .or_default()
            .push(PricePoint {
                date: r.date,
                price: r.modal_price,
            });
    }
    let reports: BTreeMap<(&str, &str), CleaningReport> = manifest
        .cleaning_report
        .series
        .iter()
        .map(|s| ((s.market.as_str(), s.commodity.as_str()), s.report))
        .collect();
    let mut series = Vec::with_capacity(groups.len());
    for ((market, commodity), points) in groups {
        let s = PriceSeries::new(&market, &commodity, points)
            .map_err(|e| Error::CorruptDataset(format!("{market}/{commodity}: {e}")))?;
        let report = reports
            .get(&(market.as_str(), commodity.as_str()))
            .copied()
            .ok_or_else(|| {
                Error::CorruptDataset(format!("no cleaning report for {market}/{commodity}"))
            })?;
        series.push(s.with_report(report));
    }
    let mut ds = Dataset::new(&manifest.source, series);
    ds.rejected_rows = manifest.cleaning_report.rejected_rows;
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RAW: &str = "date,market,commodity,min_price,max_price,modal_price,arrivals
28-06-2021,Solapur,Coriander,500,900,700,1.2
29-06-2021,Solapur,Coriander,,,500,
29-06-2021,Solapur,Coriander,,,501.5,
30-06-2021,Solapur,Coriander,,,0,
17-09-2021,Kolhapur,Coriander,,,5250,
18-09-2021,kolhapur,coriander,,,7000,
";

    #[test]
    fn ingest_groups_and_cleans() {
        let (ds, parsed) = Dataset::ingest(RAW.as_bytes(), &CsvSchema::default(), "raw.csv").unwrap();
        assert_eq!(parsed.errors.len(), 1);
        assert_eq!(ds.markets(), vec!["Kolhapur", "Solapur"]);
        let s = ds.find("solapur", "coriander").unwrap();
        assert_eq!(s.entries().len(), 2);
        assert_eq!(s.entries()[1].price, 500.75);
        assert_eq!(ds.find("Kolhapur", "Coriander").unwrap().entries().len(), 2);
        assert_eq!(ds.commodities("Solapur"), vec!["Coriander"]);
    }

    #[test]
    fn save_load_round_trip() {
        let (ds, _) = Dataset::ingest(RAW.as_bytes(), &CsvSchema::default(), "raw.csv").unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&ds, dir.path()).unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(back, ds);
        assert_eq!(back.version(), ds.version());
    }

    #[test]
    fn missing_path_is_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_dataset(&dir.path().join("nope")),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn unsupported_version() {
        let (ds, _) = Dataset::ingest(RAW.as_bytes(), &CsvSchema::default(), "raw.csv").unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&ds, dir.path()).unwrap();
        let mut m = ds.manifest();
        m.format_version = 99;
        fs::write(dir.path().join(MANIFEST_FILE), serde_json::to_vec(&m).unwrap()).unwrap();
        let err = load_dataset(dir.path()).unwrap_err();
        assert!(matches!(err, Error::UnsupportedVersion(99)));
        assert_eq!(err.to_string(), "unsupported version 99");
    }

    #[test]
    fn corrupt_files() {
        let (ds, _) = Dataset::ingest(RAW.as_bytes(), &CsvSchema::default(), "raw.csv").unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_dataset(&ds, dir.path()).unwrap();
        fs::write(dir.path().join(PRICES_FILE), "date,market\n").unwrap();
        assert!(matches!(load_dataset(dir.path()), Err(Error::MissingColumns(_))));
        fs::write(dir.path().join(MANIFEST_FILE), "{not json").unwrap();
        assert!(matches!(load_dataset(dir.path()), Err(Error::CorruptDataset(_))));
    }
}
