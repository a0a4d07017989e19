//! Simulating a list of configs on a thread pool.
//!
//! The list is a JSON array whose entries are config documents or paths to
//! config files, both resolved against the directory of the list.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{self, env_tolerance};
use crate::error::CliError;
use crate::simulate_scenario;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryResult {
    pub index: usize,
    pub source: String,
    pub exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub entries: Vec<EntryResult>,
}

impl SweepReport {
    /// The most severe exit code among the entries.
    pub fn code(&self) -> u8 {
        self.entries.iter().map(|e| e.exit_code).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

enum Entry {
    File(PathBuf),
    Inline(serde_json::Value),
}

fn run_entry(index: usize, entry: &Entry, base: &Path, env_tol: Option<f64>) -> EntryResult {
    let (source, loaded) = match entry {
        Entry::File(p) => (p.display().to_string(), config::load(p)),
        Entry::Inline(v) => {
            let source = format!("entry {index}");
            let loaded = config::parse(&v.to_string(), &source)
                .and_then(|cfg| config::validate(&cfg, env_tol))
                .map_err(|e| match e {
                    CliError::Config(m) => CliError::Config(format!("{source}: {m}")),
                    other => other,
                })
                .map(|mut sc| {
                    sc.outputs = config::resolve_outputs(&sc.outputs, base);
                    sc
                });
            (source, loaded)
        }
    };
    let sc = match loaded {
        Ok(sc) => sc,
        Err(e) => {
            return EntryResult { index, source, exit_code: e.exit_code(), summary: None, error: Some(e.to_string()) }
        }
    };
    let (summary, result) = simulate_scenario(&sc);
    let summary = serde_json::from_str(&summary).ok();
    match result {
        Ok(()) => EntryResult { index, source, exit_code: 0, summary, error: None },
        Err(e) => EntryResult { index, source, exit_code: e.exit_code(), summary, error: Some(e.to_string()) },
    }
}

/// Run every entry of the list with `jobs` worker threads. Results keep the
/// order of the list.
pub fn sweep(list: &Path, jobs: usize) -> Result<SweepReport, CliError> {
    let text = std::fs::read_to_string(list).map_err(|e| CliError::Config(format!("{}: {e}", list.display())))?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", list.display())))?;
    let items = doc
        .as_array()
        .ok_or_else(|| CliError::Config(format!("{}: expected an array of configs or paths", list.display())))?;
    let base = list.parent().unwrap_or(Path::new("")).to_path_buf();
    let entries: Vec<Entry> = items
        .iter()
        .enumerate()
        .map(|(i, v)| match v {
            serde_json::Value::String(p) => Ok(Entry::File(base.join(p))),
            serde_json::Value::Object(_) => Ok(Entry::Inline(v.clone())),
            _ => Err(CliError::Config(format!("{}: [{i}]: expected a config object or a path", list.display()))),
        })
        .collect::<Result<_, _>>()?;
    if jobs == 0 {
        return Err(CliError::Config("--jobs: must be at least 1".into()));
    }
    let env_tol = env_tolerance()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    let results = pool.install(|| {
        entries
            .par_iter()
            .enumerate()
            .map(|(i, e)| run_entry(i, e, &base, env_tol))
            .collect()
    });
    Ok(SweepReport { entries: results })
}
