//! Running one query everywhere, and spreading queries over worker lanes.

use std::sync::mpsc::{channel, Sender};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::{SystemTime, UNIX_EPOCH};

use sqlsem_core::fixture::row_line;
use sqlsem_core::table::{resolve_in, BagTable, Catalog, Row};
use sqlsem_core::{execute_with, parse, ExecOptions};

use crate::adapter::{AdapterError, TargetAdapter, TargetSpec};
use crate::compare::{compare, Verdict};
use crate::finding::Finding;
use crate::normalize::{normalize, normalize_table};

/// One query to run.
#[derive(Debug, Clone)]
pub struct Case {
    /// Sequence number; findings are named after it.
    pub seq: usize,
    pub sql: String,
    pub float_tagged: bool,
}

/// Campaign facts copied into every finding.
#[derive(Debug, Clone, Default)]
pub struct CaseMeta {
    pub fixture: String,
    pub seed: u64,
}

pub struct Target {
    pub spec: TargetSpec,
    pub adapter: Box<dyn TargetAdapter>,
}

impl Target {
    /// Opens the adapter and loads the fixture into it.
    pub fn open(spec: &TargetSpec, catalog: &Catalog) -> Result<Self, AdapterError> {
        let mut adapter = spec.open()?;
        adapter.replay_fixture(catalog)?;
        Ok(Target {
            spec: spec.clone(),
            adapter,
        })
    }
}

fn rows(rows: &[Row]) -> Vec<String> {
    rows.iter().map(|r| row_line(r)).collect()
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Executes `case` on the reference engine and on every target; one
/// finding per target. Failures on either side become verdicts.
pub fn run_case(case: &Case, catalog: &Catalog, opts: &ExecOptions, targets: &mut [Target], meta: &CaseMeta) -> Vec<Finding> {
    let parsed = parse(&case.sql);
    let reference: Result<BagTable, String> = parsed
        .as_ref()
        .map_err(|e| e.to_string())
        .and_then(|q| execute_with(q, catalog, opts).map_err(|e| e.to_string()))
        .map(|t| normalize_table(&t, case.float_tagged));
    let order_key = match (&parsed, &reference) {
        (Ok(q), Ok(t)) => q
            .order_by
            .as_ref()
            .and_then(|o| resolve_in(&t.attributes, &o.column).ok().flatten()),
        _ => None,
    };
    let stamp = now();
    targets
        .iter_mut()
        .enumerate()
        .map(|(ti, target)| {
            let mut f = Finding {
                id: Finding::id_for(case.seq, ti),
                query: case.sql.clone(),
                fixture: meta.fixture.clone(),
                verdict: Verdict::Match,
                subclass: None,
                target: target.spec.to_string(),
                ref_rows: reference.as_ref().map(|t| rows(&t.rows)).unwrap_or_default(),
                tgt_rows: Vec::new(),
                ref_residual: Vec::new(),
                tgt_residual: Vec::new(),
                detail: None,
                float_tagged: case.float_tagged,
                seed: meta.seed,
                classification: "unclassified".into(),
                timestamp: stamp,
                suppressed: false,
            };
            let got = target
                .adapter
                .execute(&case.sql)
                .map_err(|e| e.to_string())
                .and_then(|g| normalize(&g, case.float_tagged).map_err(|e| e.to_string()));
            match (&reference, got) {
                (Ok(r), Ok(t)) => {
                    f.tgt_rows = rows(&t.rows);
                    let c = compare(r, &t, order_key);
                    f.verdict = c.verdict;
                    f.subclass = c.subclass.map(str::to_string);
                    f.ref_residual = rows(&c.ref_residual);
                    f.tgt_residual = rows(&c.tgt_residual);
                }
                (Ok(_), Err(e)) => {
                    f.verdict = Verdict::TargetError;
                    f.suppressed = target.spec.suppressed(&e);
                    f.detail = Some(e);
                }
                (Err(e), Ok(t)) => {
                    f.verdict = Verdict::ReferenceError;
                    f.tgt_rows = rows(&t.rows);
                    f.detail = Some(e.clone());
                }
                // Both sides reject the query: agreement.
                (Err(e), Err(te)) => f.detail = Some(format!("reference: {e}; target: {te}")),
            }
            f
        })
        .collect()
}

/// Worker lanes, each owning its own connections to every target. Query
/// `seq` goes to lane `seq % n`, so the assignment is deterministic.
pub struct Lanes {
    senders: Vec<Sender<Case>>,
    handles: Vec<JoinHandle<Vec<Finding>>>,
}

impl Lanes {
    pub fn start(
        workers: usize,
        catalog: Arc<Catalog>,
        opts: ExecOptions,
        specs: &[TargetSpec],
        meta: CaseMeta,
    ) -> Result<Self, AdapterError> {
        let workers = workers.max(1);
        let mut lanes = Vec::with_capacity(workers);
        for _ in 0..workers {
            let targets = specs
                .iter()
                .map(|s| Target::open(s, &catalog))
                .collect::<Result<Vec<_>, _>>()?;
            lanes.push(targets);
        }
        let mut senders = Vec::new();
        let mut handles = Vec::new();
        for mut targets in lanes {
            let (tx, rx) = channel::<Case>();
            let catalog = Arc::clone(&catalog);
            let opts = opts.clone();
            let meta = meta.clone();
            senders.push(tx);
            handles.push(std::thread::spawn(move || {
                let mut out = Vec::new();
                for case in rx {
                    out.extend(run_case(&case, &catalog, &opts, &mut targets, &meta));
                }
                out
            }));
        }
        Ok(Lanes { senders, handles })
    }

    pub fn submit(&self, case: Case) {
        let lane = case.seq % self.senders.len();
        // A lane only stops receiving if its thread panicked; finish()
        // reports that.
        let _ = self.senders[lane].send(case);
    }

    /// Waits for every lane; findings sorted by id.
    pub fn finish(self) -> Vec<Finding> {
        drop(self.senders);
        let mut all: Vec<Finding> = self
            .handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker lane panicked"))
            .collect();
        all.sort_by(|a, b| a.id.cmp(&b.id));
        all
    }
}
