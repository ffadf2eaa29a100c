use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use sqlsem_core::coverage::CoverageLedger;
use sqlsem_core::fixture::load_fixture_file;
use sqlsem_core::ExecOptions;
use sqlsem_gen::corpus::{render, CorpusEntry};
use sqlsem_gen::{fuzz_loop, generate_initial, Accepted, FuzzOptions, Provenance, QuerySink, SinkError};
use sqlsem_harness::{persist, tally, Case, CaseMeta, Lanes, Verdict};

use crate::config::{CampaignConfig, CONFIG_FILE};
use crate::CliError;

pub const CORPUS_FILE: &str = "corpus.sql";
pub const COVERAGE_FILE: &str = "coverage.txt";

pub fn findings_dir(out: &Path) -> PathBuf {
    out.join("findings")
}

/// Forwards accepted queries to the worker lanes and keeps the corpus.
struct LaneSink {
    lanes: Lanes,
    corpus: Vec<CorpusEntry>,
    seed: u64,
    round_floats: bool,
}

impl QuerySink for LaneSink {
    fn accept(&mut self, q: &Accepted) -> Result<(), SinkError> {
        self.lanes.submit(Case {
            seq: q.seq,
            sql: q.sql.clone(),
            float_tagged: self.round_floats && q.float_tagged,
        });
        let (rule, parent) = match q.provenance {
            Provenance::Initial => (None, None),
            Provenance::Mutated { parent, rule } => (Some(rule), Some(parent)),
        };
        self.corpus.push(CorpusEntry {
            seed: Some(self.seed),
            rule,
            parent,
            sql: q.sql.clone(),
        });
        Ok(())
    }
}

pub fn cmd_fuzz(config: &CampaignConfig) -> Result<String, CliError> {
    let catalog = load_fixture_file(&config.fixtures)
        .map_err(|e| CliError::Input(format!("{}: {e}", config.fixtures.display())))?;
    let criterion = config.criterion()?;
    let join_mode = config.join_mode()?;
    let gen_cfg = config.gen_config()?;
    let specs = config.target_specs()?;
    let catalog = Arc::new(catalog);
    let meta = CaseMeta {
        fixture: config.fixtures.display().to_string(),
        seed: config.seed,
    };
    let lanes = Lanes::start(
        config.workers,
        Arc::clone(&catalog),
        ExecOptions::with_join_mode(join_mode),
        &specs,
        meta,
    )
    .map_err(|e| CliError::Adapter(e.to_string()))?;

    let io = |e: std::io::Error| CliError::Input(format!("{}: {e}", config.out.display()));
    fs::create_dir_all(&config.out).map_err(io)?;
    fs::write(config.out.join(CONFIG_FILE), config.to_json()).map_err(io)?;

    let mut pool = generate_initial(&catalog, &gen_cfg, config.initial, config.seed);
    let mut ledger = CoverageLedger::new();
    let mut opts = FuzzOptions::new(criterion, config.budget.budget());
    opts.guided = config.guided;
    // A guided campaign on a finite criterion may stop at saturation; the
    // query budget is otherwise honoured exactly.
    let mut sink = LaneSink {
        lanes,
        corpus: Vec::new(),
        seed: config.seed,
        round_floats: config.round_floats,
    };
    let stats = fuzz_loop(&mut pool, &catalog, &gen_cfg, &mut ledger, &opts, &mut [&mut sink])
        .map_err(|e| CliError::Adapter(e.to_string()))?;
    let LaneSink { lanes, corpus, .. } = sink;
    let findings = lanes.finish();

    fs::write(config.out.join(CORPUS_FILE), render(&corpus)).map_err(io)?;
    let report = ledger.report();
    fs::write(config.out.join(COVERAGE_FILE), report.to_string()).map_err(io)?;
    persist(&findings, &findings_dir(&config.out)).map_err(io)?;

    let counts = tally(&findings);
    let mut s = String::new();
    let _ = writeln!(s, "QUERIES {}", stats.forwarded);
    let _ = writeln!(
        s,
        "MUTATIONS not-increasing={} invalid={} fallbacks={} stop={:?}",
        stats.not_increasing, stats.invalid, stats.fallbacks, stats.stop
    );
    for l in &report.lines {
        let _ = writeln!(s, "{}", l.machine());
    }
    let verdicts: Vec<String> = Verdict::ALL
        .iter()
        .map(|v| format!("{}={}", v, counts.get(v).copied().unwrap_or(0)))
        .collect();
    let _ = writeln!(s, "FINDINGS {}", verdicts.join(" "));
    let _ = writeln!(s, "OUT {}", config.out.display());
    Ok(s)
}
