use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::compare::Verdict;

pub const MANIFEST: &str = "manifest.txt";

/// The outcome of one query on one target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub id: String,
    pub query: String,
    pub fixture: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subclass: Option<String>,
    pub target: String,
    /// Fixture-format `ROW` lines.
    pub ref_rows: Vec<String>,
    pub tgt_rows: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ref_residual: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tgt_residual: Vec<String>,
    /// Error text from whichever side failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub float_tagged: bool,
    pub seed: u64,
    /// Filled in by hand: bug, inconsistency, ...
    pub classification: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    /// Matched a target's suppression list; never persisted.
    #[serde(skip)]
    pub suppressed: bool,
}

impl Finding {
    pub fn id_for(seq: usize, target: usize) -> String {
        format!("f{seq:06}t{target}")
    }

    pub fn reportable(&self) -> bool {
        self.verdict != Verdict::Match && !self.suppressed
    }

    pub fn manifest_line(&self) -> String {
        format!("FINDING {} {} {}", self.id, self.verdict, self.target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Persisted {
    pub manifest: PathBuf,
    pub records: Vec<PathBuf>,
}

/// Writes one JSON document per reportable finding plus the manifest.
/// File names derive from finding ids, so re-running on the same findings
/// rewrites identical files.
pub fn persist(findings: &[Finding], out_dir: &Path) -> io::Result<Persisted> {
    fs::create_dir_all(out_dir)?;
    let mut keep: Vec<&Finding> = findings.iter().filter(|f| f.reportable()).collect();
    keep.sort_by(|a, b| a.id.cmp(&b.id));
    let mut records = Vec::new();
    let mut manifest = String::new();
    for f in keep {
        let path = out_dir.join(format!("{}.json", f.id));
        let mut text = serde_json::to_string_pretty(f).map_err(io::Error::other)?;
        text.push('\n');
        fs::write(&path, text)?;
        records.push(path);
        manifest.push_str(&f.manifest_line());
        manifest.push('\n');
    }
    let path = out_dir.join(MANIFEST);
    fs::write(&path, manifest)?;
    Ok(Persisted { manifest: path, records })
}

pub fn load_finding(path: &Path) -> io::Result<Finding> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

pub fn tally(findings: &[Finding]) -> BTreeMap<Verdict, usize> {
    let mut m = BTreeMap::new();
    for f in findings {
        *m.entry(f.verdict).or_default() += 1;
    }
    m
}
