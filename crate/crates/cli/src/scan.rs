//! Resumable range scans. A scan enumerates a fixed item list, works
//! through it in parallel batches, and can persist its state to a JSON
//! checkpoint after every batch. Resuming replays nothing: the saved
//! cursor marks exactly how many items are already in the file, so an
//! interrupted-and-resumed scan produces the same report as an
//! uninterrupted one.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::Failure;

pub const SCHEMA_VERSION: u32 = 1;

/// Everything a scan needs to resume: identity, parameters, cursor, and
/// the results so far. Doubles as the on-disk checkpoint format.
#[derive(Debug, Serialize, Deserialize)]
pub struct ScanReport<P, T> {
    pub schema_version: u32,
    pub scan_id: String,
    pub params: P,
    pub total: u64,
    pub cursor: u64,
    pub wall_ms: u64,
    pub items: Vec<T>,
    pub counterexamples: Vec<T>,
}

impl<P, T> ScanReport<P, T> {
    pub fn complete(&self) -> bool {
        self.cursor >= self.total
    }
}

fn load<P, T>(path: &Path, scan_id: &str, params: &P) -> Result<Option<ScanReport<P, T>>, Failure>
where
    P: DeserializeOwned + PartialEq,
    T: DeserializeOwned,
{
    if !path.exists() {
        return Ok(None);
    }
    let raw = fs::read_to_string(path)
        .map_err(|e| Failure::Run(format!("cannot read checkpoint {}: {e}", path.display())))?;
    let report: ScanReport<P, T> = serde_json::from_str(&raw)
        .map_err(|e| Failure::Usage(format!("malformed checkpoint {}: {e}", path.display())))?;
    if report.schema_version != SCHEMA_VERSION {
        return Err(Failure::Usage(format!(
            "checkpoint {} has schema {} but this build writes {SCHEMA_VERSION}",
            path.display(),
            report.schema_version
        )));
    }
    if report.scan_id != scan_id || &report.params != params {
        return Err(Failure::Usage(format!(
            "checkpoint {} belongs to scan '{}', not to this one ('{scan_id}')",
            path.display(),
            report.scan_id
        )));
    }
    if report.cursor as usize != report.items.len() {
        return Err(Failure::Usage(format!(
            "checkpoint {} is inconsistent: cursor {} but {} items",
            path.display(),
            report.cursor,
            report.items.len()
        )));
    }
    Ok(Some(report))
}

fn save<P: Serialize, T: Serialize>(path: &Path, report: &ScanReport<P, T>) -> Result<(), Failure> {
    let body = serde_json::to_string_pretty(report)
        .map_err(|e| Failure::Run(format!("cannot encode checkpoint: {e}")))?;
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, body)
        .map_err(|e| Failure::Run(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| Failure::Run(format!("cannot move checkpoint into place: {e}")))?;
    Ok(())
}

/// Runs (or resumes) a scan over `total` items. `compute` maps an item
/// index to its result; batches run on the worker pool and results keep
/// enumeration order. Stops early after `max_items` new items when set.
pub fn run_scan<P, T>(
    checkpoint: Option<&Path>,
    scan_id: String,
    params: P,
    total: u64,
    max_items: Option<u64>,
    compute: impl Fn(u64) -> Result<T, Failure> + Sync,
    is_counterexample: impl Fn(&T) -> bool,
) -> Result<ScanReport<P, T>, Failure>
where
    P: Serialize + DeserializeOwned + PartialEq,
    T: Serialize + DeserializeOwned + Clone + Send,
{
    let mut mark = Instant::now();
    let mut report = match checkpoint {
        Some(path) => load(path, &scan_id, &params)?,
        None => None,
    }
    .unwrap_or(ScanReport {
        schema_version: SCHEMA_VERSION,
        scan_id,
        params,
        total,
        cursor: 0,
        wall_ms: 0,
        items: Vec::new(),
        counterexamples: Vec::new(),
    });

    let batch_size = (rayon::current_num_threads() * 4).max(1) as u64;
    let mut allowance = max_items.unwrap_or(u64::MAX);

    while report.cursor < total && allowance > 0 {
        let end = total.min(report.cursor + batch_size.min(allowance));
        let batch: Vec<Result<T, Failure>> =
            (report.cursor..end).into_par_iter().map(&compute).collect();
        for result in batch {
            let item = result?;
            if is_counterexample(&item) {
                report.counterexamples.push(item.clone());
            }
            report.items.push(item);
        }
        allowance -= end - report.cursor;
        report.cursor = end;
        report.wall_ms += mark.elapsed().as_millis() as u64;
        mark = Instant::now();
        if let Some(path) = checkpoint {
            save(path, &report)?;
        }
    }
    Ok(report)
}
