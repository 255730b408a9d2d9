//! Campaign CSV and JSON manifest.
//!
//! CSV columns: `N, seed, d, max_deviation, num_maximal_points`, then one
//! `A_gamma_<γ>` column per configured γ holding `true`/`false`. Floats use
//! Rust's shortest round-trip formatting, so identical records always
//! produce identical bytes.
//!
//! The manifest sits next to the CSV with extension `.json`:
//!
//! ```json
//! {
//!   "tool": "kpzlab",
//!   "version": "0.1.0",
//!   "status": "complete" | "partial",
//!   "config": { "n_values": [...], "trials_per_n": 200, "gamma_values": [...],
//!               "master_seed": 1, "intensity": 1.0, "output_path": "..." },
//!   "csv_path": "...",
//!   "records_written": 800,
//!   "fits": { "chi": ScalingFit | null, "xi": ScalingFit | null },
//!   "wall_time_seconds": 12.3,
//!   "error": null | "message"
//! }
//! ```

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

use super::campaign::{ExperimentConfig, TrialRecord};
use super::estimators::ScalingFit;

const FIXED_COLUMNS: [&str; 5] = ["N", "seed", "d", "max_deviation", "num_maximal_points"];

pub fn gamma_column(gamma: f64) -> String {
    format!("A_gamma_{gamma}")
}

pub fn write_campaign_csv<W: Write>(
    records: &[TrialRecord],
    gammas: &[f64],
    writer: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(gammas.iter().map(|&g| gamma_column(g)));
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.n.to_string(),
            r.seed.to_string(),
            r.d.to_string(),
            r.max_deviation.to_string(),
            r.num_maximal_points.to_string(),
        ];
        for &g in gammas {
            let a = r
                .event(g)
                .ok_or_else(|| LabError::invalid(format!("record lacks gamma = {g}")))?;
            row.push(a.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| LabError::io("<campaign csv>", e))?;
    Ok(())
}

/// Parses a campaign CSV; returns the records and the γ columns found.
pub fn read_campaign_csv<R: Read>(reader: R) -> Result<(Vec<TrialRecord>, Vec<f64>)> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    for (i, name) in FIXED_COLUMNS.iter().enumerate() {
        if headers.get(i) != Some(name) {
            return Err(LabError::invalid(format!(
                "expected column {i} to be {name}, got {:?}",
                headers.get(i)
            )));
        }
    }
    let gammas = headers
        .iter()
        .skip(FIXED_COLUMNS.len())
        .map(|h| {
            h.strip_prefix("A_gamma_")
                .and_then(|g| g.parse::<f64>().ok())
                .ok_or_else(|| LabError::invalid(format!("unexpected column {h}")))
        })
        .collect::<Result<Vec<f64>>>()?;

    let bad = |field: &str, line: usize| LabError::invalid(format!("bad {field} on row {line}"));
    let mut records = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let get = |i: usize| row.get(i).unwrap_or("");
        let n: f64 = get(0).parse().map_err(|_| bad("N", line))?;
        let seed: u64 = get(1).parse().map_err(|_| bad("seed", line))?;
        let d: u64 = get(2).parse().map_err(|_| bad("d", line))?;
        let max_deviation: f64 = get(3).parse().map_err(|_| bad("max_deviation", line))?;
        let num_maximal_points: u64 = get(4)
            .parse()
            .map_err(|_| bad("num_maximal_points", line))?;
        let event_a = gammas
            .iter()
            .enumerate()
            .map(|(k, &g)| {
                get(FIXED_COLUMNS.len() + k)
                    .parse::<bool>()
                    .map(|a| (g, a))
                    .map_err(|_| bad("event column", line))
            })
            .collect::<Result<Vec<_>>>()?;
        records.push(TrialRecord {
            n,
            seed,
            d,
            max_deviation,
            num_maximal_points,
            event_a,
        });
    }
    Ok((records, gammas))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub chi: Option<ScalingFit>,
    pub xi: Option<ScalingFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub status: String,
    pub config: ExperimentConfig,
    pub csv_path: PathBuf,
    pub records_written: usize,
    pub fits: FitSummary,
    pub wall_time_seconds: f64,
    pub error: Option<String>,
}

pub fn manifest_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let file = File::create(path).map_err(|e| LabError::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, manifest)?;
    w.write_all(b"\n").map_err(|e| LabError::io(path, e))?;
    w.flush().map_err(|e| LabError::io(path, e))
}

/// Writes the campaign CSV to `config.output_path` and its manifest.
///
/// If the CSV cannot be written, a manifest with status `partial` and the
/// error message is attempted before the error is returned.
pub fn persist_campaign(
    config: &ExperimentConfig,
    records: &[TrialRecord],
    fits: FitSummary,
    wall_time_seconds: f64,
) -> Result<PathBuf> {
    let csv_path = config
        .output_path
        .clone()
        .ok_or_else(|| LabError::invalid("output_path is not set"))?;
    let mut manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        status: "complete".into(),
        config: config.clone(),
        csv_path: csv_path.clone(),
        records_written: records.len(),
        fits,
        wall_time_seconds,
        error: None,
    };
    let written = File::create(&csv_path)
        .map_err(|e| LabError::io(&csv_path, e))
        .and_then(|f| write_campaign_csv(records, &config.gamma_values, BufWriter::new(f)));
    if let Err(err) = written {
        manifest.status = "partial".into();
        manifest.records_written = 0;
        manifest.error = Some(err.to_string());
        // Best effort: the CSV failure is the error reported to the caller.
        let _ = write_manifest(&manifest_path(&csv_path), &manifest);
        return Err(err);
    }
    write_manifest(&manifest_path(&csv_path), &manifest)?;
    Ok(csv_path)
}
