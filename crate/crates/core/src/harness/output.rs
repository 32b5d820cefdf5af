use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind, Resolved};
use super::experiments::{columns, header, record_passes, TrialRecord, Value};
use crate::error::Result;

pub const RECORDS_FILE: &str = "records.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Distribution of one column over the trials where it is present.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fraction_true: Option<f64>,
}

/// Linearly interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Median and quartiles of numeric columns, fraction true of flags.
pub fn summarize(kind: ExperimentKind, records: &[TrialRecord]) -> BTreeMap<String, Summary> {
    let mut out = BTreeMap::new();
    for (i, &name) in columns(kind).iter().enumerate() {
        let cells: Vec<&Value> = records
            .iter()
            .map(|r| &r.values[i])
            .filter(|v| **v != Value::Missing)
            .collect();
        let flags: Vec<bool> = cells.iter().filter_map(|v| v.as_bool()).collect();
        let summary = if !flags.is_empty() {
            Summary {
                count: flags.len(),
                median: None,
                q1: None,
                q3: None,
                fraction_true: Some(
                    flags.iter().filter(|&&b| b).count() as f64 / flags.len() as f64,
                ),
            }
        } else {
            let mut xs: Vec<f64> = cells.iter().filter_map(|v| v.as_f64()).collect();
            xs.sort_by(f64::total_cmp);
            let stat = |q| (!xs.is_empty()).then(|| quantile(&xs, q));
            Summary {
                count: xs.len(),
                median: stat(0.5),
                q1: stat(0.25),
                q3: stat(0.75),
                fraction_true: None,
            }
        };
        out.insert(name.to_string(), summary);
    }
    out
}

/// Everything needed to interpret and replay a run.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub version: String,
    pub config: ExperimentConfig,
    /// Per-trial parameters when they vary (imported graphs), otherwise
    /// the single resolved set.
    pub resolved: Vec<Resolved>,
    pub trials: usize,
    pub header: Vec<String>,
    pub summaries: BTreeMap<String, Summary>,
    /// Outcome of the acceptance check for `certify` and `tail-check`.
    pub check_passed: Option<bool>,
    pub wall_time_s: f64,
}

impl Manifest {
    pub fn new(config: &ExperimentConfig, records: &[TrialRecord]) -> Result<Self> {
        let mut resolved: Vec<Resolved> = Vec::new();
        for r in records {
            if !resolved.contains(&r.params) {
                resolved.push(r.params);
            }
        }
        let check_passed = config
            .kind
            .is_check()
            .then(|| records.iter().all(|r| record_passes(config.kind, r)));
        Ok(Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            resolved,
            trials: records.len(),
            header: header(config.kind).into_iter().map(String::from).collect(),
            summaries: summarize(config.kind, records),
            check_passed,
            wall_time_s: records.iter().map(|r| r.wall_time_s).sum(),
        })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(dir.join(MANIFEST_FILE), json + "\n")?;
        Ok(())
    }
}

/// Header and rows of a `records.csv`.
pub fn read_records(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|r| r.iter().map(String::from).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok((header, rows))
}
