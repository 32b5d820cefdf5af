//! Monte Carlo experiment driver: configuration, per-trial seeding, and
//! CSV/manifest output.
//!
//! Trials run on a rayon pool. Each finished record is sent to a single
//! writer that buffers out-of-order arrivals, so `records.csv` is the same
//! whatever the scheduling.

mod config;
mod experiments;
mod output;

pub use config::{ExperimentConfig, ExperimentKind, PSpec, Resolved};
pub use experiments::{
    columns, experiment_below_threshold, experiment_certify, experiment_cohomology_hit,
    experiment_connectivity_gap, experiment_graph_gap, experiment_link_audit,
    experiment_poisson_betti, experiment_t_hit, experiment_tail_check, header, record_passes,
    run_trial, verification_trial, witness_floor, TrialRecord, Value, BETTI_MAX_ROWS,
    CERTIFICATE_SLACK, COMMON_COLUMNS,
};
pub use output::{read_records, summarize, Manifest, Summary, MANIFEST_FILE, RECORDS_FILE};

use std::collections::BTreeMap;
use std::fs;
use std::sync::mpsc;

use rayon::prelude::*;

use crate::error::Result;

/// Result of [`run`].
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub records: Vec<TrialRecord>,
    pub manifest: Manifest,
}

impl RunOutput {
    /// `None` for kinds without an acceptance check.
    pub fn passed(&self) -> Option<bool> {
        self.manifest.check_passed
    }
}

/// Trial count actually run: single-object kinds run once.
pub fn effective_trials(config: &ExperimentConfig) -> usize {
    match config.kind {
        ExperimentKind::TailCheck => 1,
        ExperimentKind::Certify if config.import.is_some() => 1,
        _ => config.trials,
    }
}

/// Runs every trial, writing `records.csv` and `manifest.json` under
/// `config.out`.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    config.validate()?;
    fs::create_dir_all(&config.out)?;
    let trials = effective_trials(config);
    let mut writer = csv::Writer::from_path(config.out.join(RECORDS_FILE))?;
    writer.write_record(header(config.kind))?;

    let (tx, rx) = mpsc::channel::<(usize, Result<TrialRecord>)>();
    let records = std::thread::scope(|scope| -> Result<Vec<TrialRecord>> {
        let producer = scope.spawn(move || {
            (0..trials).into_par_iter().for_each_with(tx, |tx, i| {
                // The receiver only hangs up after an error.
                let _ = tx.send((i, run_trial(config, i)));
            });
        });
        let mut pending = BTreeMap::new();
        let mut records = Vec::with_capacity(trials);
        let mut failure = None;
        for (i, rec) in rx {
            match rec {
                Ok(r) => {
                    pending.insert(i, r);
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    break;
                }
            }
            while let Some(r) = pending.remove(&records.len()) {
                writer.write_record(r.cells())?;
                writer.flush()?;
                records.push(r);
            }
        }
        producer.join().expect("trial workers do not panic");
        match failure {
            Some(e) => Err(e),
            None => Ok(records),
        }
    })?;
    writer.flush()?;

    let manifest = Manifest::new(config, &records)?;
    manifest.write(&config.out)?;
    Ok(RunOutput { records, manifest })
}
