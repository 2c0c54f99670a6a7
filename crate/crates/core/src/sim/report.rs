//! CSV aggregates and JSON-lines records.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

use super::campaign::{CampaignOutput, Scenario, TrackerKind, TrialResult};
use super::metrics::{gain_over_time, range_bins, summarize};

/// Bumped whenever a column changes.
pub const CSV_VERSION: u32 = 1;

/// CSV text with a `# nfbeam <table> v<N>` header line.
pub fn csv_string<T: Serialize>(table: &str, rows: &[T]) -> Result<String> {
    let mut out = format!("# nfbeam {table} v{CSV_VERSION}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for r in rows {
            w.serialize(r).map_err(|e| Error::Domain(format!("csv encoding of {table}: {e}")))?;
        }
        w.flush().map_err(|e| Error::Domain(format!("csv encoding of {table}: {e}")))?;
    }
    Ok(String::from_utf8(out).expect("csv output is utf-8"))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_csv<T: Serialize>(path: &Path, table: &str, rows: &[T]) -> Result<()> {
    write_text(path, &csv_string(table, rows)?)
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in rows {
        let line = serde_json::to_string(&r).map_err(|e| Error::Domain(format!("json encoding: {e}")))?;
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Aggregate tables of a campaign, keyed by file name.
pub fn campaign_tables(scenario: &Scenario, out: &CampaignOutput) -> Result<Vec<(String, String)>> {
    let tti = scenario.tracker.tti;
    let r0_max = scenario.trajectory.r0_max;
    let mut files = Vec::new();
    let mut summaries = vec![summarize(TrackerKind::Proposed, &out.proposed, tti)];
    let mut runs: Vec<(&str, &[TrialResult])> = vec![("proposed", &out.proposed)];
    if let Some((_, b)) = &out.benchmark {
        summaries.push(summarize(TrackerKind::Benchmark, b, tti));
        runs.push(("benchmark", b));
    }
    files.push(("summary.csv".to_string(), csv_string("summary", &summaries)?));
    for (name, trials) in runs {
        files.push((
            format!("gain_over_time_{name}.csv"),
            csv_string("gain_over_time", &gain_over_time(trials, tti))?,
        ));
        files.push((
            format!("range_bins_{name}.csv"),
            csv_string("range_bins", &range_bins(trials, tti, 2.0, r0_max, 3))?,
        ));
    }
    if let Some((fixed, _)) = &out.benchmark {
        files.push(("benchmark_params.csv".to_string(), csv_string("benchmark_params", &[*fixed])?));
    }
    Ok(files)
}

/// Writes aggregates and, optionally, per-slot and per-trial records.
pub fn write_campaign(dir: &Path, scenario: &Scenario, out: &CampaignOutput, records: bool) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (name, text) in campaign_tables(scenario, out)? {
        let p = dir.join(name);
        write_text(&p, &text)?;
        written.push(p);
    }
    if records {
        let all: Vec<&TrialResult> = out
            .proposed
            .iter()
            .chain(out.benchmark.iter().flat_map(|(_, b)| b.iter()))
            .collect();
        let p = dir.join("slots.jsonl");
        write_jsonl(&p, all.iter().flat_map(|t| t.slots.iter()))?;
        written.push(p);
        let p = dir.join("trials.jsonl");
        write_jsonl(&p, all.iter())?;
        written.push(p);
    }
    Ok(written)
}
