//! `sqlsem`: evaluate queries on the reference engine, run coverage-guided
//! differential campaigns, report coverage and replay findings.

pub mod config;
pub mod fuzz;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use sqlsem_core::coverage::CoverageLedger;
use sqlsem_core::fixture::{load_fixture_file, row_line};
use sqlsem_core::table::Catalog;
use sqlsem_core::{execute_with, parse, ExecOptions, JoinMode};
use sqlsem_gen::corpus::parse_corpus;
use sqlsem_harness::{load_finding, run_case, Case, CaseMeta, Target, TargetSpec};

use crate::config::{BudgetSpec, CampaignConfig, Profile, CONFIG_FILE};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Query(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Adapter(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Query(_) => 2,
            CliError::Input(_) => 3,
            CliError::Adapter(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sqlsem", version, about = "Semantics-based differential testing of SQL engines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one query on the reference engine and print its rows.
    Eval {
        sql: String,
        #[arg(long)]
        fixtures: PathBuf,
        #[arg(long, default_value = "standard")]
        join_mode: JoinMode,
    },
    /// Coverage-guided generation with differential execution.
    Fuzz(FuzzArgs),
    /// Replay a corpus through the coverage ledger.
    Coverage { corpus: PathBuf },
    /// Re-run a persisted finding.
    Replay {
        id: String,
        /// Campaign output directory holding the finding.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long = "target")]
        targets: Vec<String>,
    },
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    /// Re-run a campaign from its copied config (other flags override).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    /// KIND:CONN, repeatable; defaults to the reference engine itself.
    #[arg(long = "target")]
    pub targets: Vec<String>,
    #[arg(long)]
    pub criterion: Option<String>,
    #[arg(long, conflicts_with = "queries")]
    pub seconds: Option<u64>,
    #[arg(long)]
    pub queries: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub join_mode: Option<JoinMode>,
    #[arg(long)]
    pub round_floats: bool,
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    /// Forward every valid mutant instead of only coverage-increasing ones.
    #[arg(long)]
    pub unguided: bool,
}

impl FuzzArgs {
    fn into_config(self) -> Result<CampaignConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => CampaignConfig::load(p)?,
            None => CampaignConfig {
                fixtures: PathBuf::new(),
                targets: Vec::new(),
                criterion: "composite".into(),
                budget: BudgetSpec::Queries(1000),
                seed: 0,
                out: PathBuf::from("out"),
                workers: 1,
                join_mode: JoinMode::Standard.to_string(),
                round_floats: false,
                profile: Profile::Full,
                guided: true,
                initial: 10,
            },
        };
        if let Some(f) = self.fixtures {
            c.fixtures = f;
        }
        if c.fixtures.as_os_str().is_empty() {
            return Err(CliError::Usage("--fixtures is required".into()));
        }
        if !self.targets.is_empty() {
            c.targets = self.targets;
        }
        if let Some(k) = self.criterion {
            c.criterion = k;
        }
        if let Some(n) = self.queries {
            c.budget = BudgetSpec::Queries(n);
        }
        if let Some(s) = self.seconds {
            c.budget = BudgetSpec::Seconds(s);
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(o) = self.out {
            c.out = o;
        }
        if let Some(w) = self.workers {
            c.workers = w.max(1);
        }
        if let Some(m) = self.join_mode {
            c.join_mode = m.to_string();
        }
        c.round_floats |= self.round_floats;
        if let Some(p) = self.profile {
            c.profile = p;
        }
        if self.unguided {
            c.guided = false;
        }
        c.criterion()?;
        c.target_specs()?;
        Ok(c)
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    match run(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn load_catalog(path: &Path) -> Result<Catalog, CliError> {
    load_fixture_file(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn io(e: std::io::Error) -> CliError {
    CliError::Input(e.to_string())
}

pub fn run(cmd: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Eval { sql, fixtures, join_mode } => cmd_eval(&sql, &fixtures, join_mode, out),
        Command::Fuzz(args) => {
            let config = args.into_config()?;
            let summary = fuzz::cmd_fuzz(&config)?;
            write!(out, "{summary}").map_err(io)
        }
        Command::Coverage { corpus } => cmd_coverage(&corpus, out),
        Command::Replay {
            id,
            out: dir,
            fixtures,
            targets,
        } => cmd_replay(&id, &dir, fixtures, targets, out),
    }
}

pub fn cmd_eval(sql: &str, fixtures: &Path, join_mode: JoinMode, out: &mut dyn Write) -> Result<(), CliError> {
    let catalog = load_catalog(fixtures)?;
    let q = parse(sql).map_err(|e| CliError::Query(format!("SyntaxError: {e}")))?;
    let t = execute_with(&q, &catalog, &ExecOptions::with_join_mode(join_mode))
        .map_err(|e| CliError::Query(format!("{}: {e}", e.class())))?;
    for r in &t.rows {
        writeln!(out, "{}", row_line(r)).map_err(io)?;
    }
    Ok(())
}

pub fn cmd_coverage(corpus: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let text = std::fs::read_to_string(corpus).map_err(|e| CliError::Input(format!("{}: {e}", corpus.display())))?;
    let entries = parse_corpus(&text).map_err(|e| CliError::Input(format!("{}: {e}", corpus.display())))?;
    let mut ledger = CoverageLedger::new();
    for e in &entries {
        let q = parse(&e.sql).map_err(|err| CliError::Input(format!("{}: {err} in `{}`", corpus.display(), e.sql)))?;
        ledger.record(&q);
    }
    write!(out, "{}", ledger.report()).map_err(io)
}

pub fn cmd_replay(
    id: &str,
    dir: &Path,
    fixtures: Option<PathBuf>,
    targets: Vec<String>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let path = fuzz::findings_dir(dir).join(format!("{id}.json"));
    let f = load_finding(&path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let config = CampaignConfig::load(&dir.join(CONFIG_FILE)).ok();
    let fixture = fixtures.unwrap_or_else(|| PathBuf::from(&f.fixture));
    let catalog = load_catalog(&fixture)?;
    let join_mode = match &config {
        Some(c) => c.join_mode()?,
        None => JoinMode::Standard,
    };
    let specs: Vec<TargetSpec> = if targets.is_empty() { vec![f.target.clone()] } else { targets }
        .iter()
        .map(|t| t.parse().map_err(CliError::Usage))
        .collect::<Result<_, _>>()?;
    let mut opened = specs
        .iter()
        .map(|s| Target::open(s, &catalog))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Adapter(e.to_string()))?;
    let case = Case {
        seq: 0,
        sql: f.query.clone(),
        float_tagged: f.float_tagged,
    };
    let meta = CaseMeta {
        fixture: fixture.display().to_string(),
        seed: f.seed,
    };
    let now = run_case(&case, &catalog, &ExecOptions::with_join_mode(join_mode), &mut opened, &meta);
    writeln!(out, "QUERY {}", f.query).map_err(io)?;
    writeln!(out, "RECORDED {} {}", f.verdict, f.target).map_err(io)?;
    for n in &now {
        writeln!(out, "NOW {} {}", n.verdict, n.target).map_err(io)?;
        for r in &n.ref_rows {
            writeln!(out, "  reference {r}").map_err(io)?;
        }
        for r in &n.tgt_rows {
            writeln!(out, "  target    {r}").map_err(io)?;
        }
        if let Some(d) = &n.detail {
            writeln!(out, "  detail    {d}").map_err(io)?;
        }
    }
    let reproduced = now.iter().any(|n| n.verdict == f.verdict);
    writeln!(out, "REPRODUCED {}", if reproduced { "yes" } else { "no" }).map_err(io)
}
