//! Execution targets. Each adapter loads a fixture into its database and
//! runs query text, returning a grid of driver values.

mod cmd;
mod postgres;
mod reference;
mod sqlite;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use sqlsem_core::table::Catalog;
use sqlsem_core::Value;

use crate::normalize::Grid;

pub use self::cmd::CmdAdapter;
pub use self::postgres::PostgresAdapter;
pub use self::reference::ReferenceAdapter;
pub use self::sqlite::SqliteAdapter;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdapterError {
    #[error("cannot connect to {target}: {message}")]
    Connect { target: String, message: String },
    #[error("fixture replay into {target} failed: {message}")]
    Replay { target: String, message: String },
    #[error("{0}")]
    Query(String),
    #[error("protocol error: {0}")]
    Protocol(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdapterKind {
    /// The reference engine itself, optionally with injected faults.
    Reference,
    EmbeddedFileDb,
    ServerSocketDb,
    SubprocessShellDb,
}

pub trait TargetAdapter: Send {
    fn name(&self) -> &str;
    fn kind(&self) -> AdapterKind;
    /// Replaces the target's tables with exactly the catalog's.
    fn replay_fixture(&mut self, catalog: &Catalog) -> Result<(), AdapterError>;
    fn execute(&mut self, sql: &str) -> Result<Grid, AdapterError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetKind {
    Reference,
    Sqlite,
    Cmd,
    Postgres,
}

impl TargetKind {
    fn name(self) -> &'static str {
        match self {
            TargetKind::Reference => "reference",
            TargetKind::Sqlite => "sqlite",
            TargetKind::Cmd => "cmd",
            TargetKind::Postgres => "postgres",
        }
    }
}

/// `KIND:CONN` as given on the command line.
///
/// * `reference:` or `reference:padded,null-is-false` — join mode and faults
/// * `sqlite::memory:` or `sqlite:/path/to/file.db`
/// * `cmd:python3 scripts/pysqlite_shell.py` — JSON-lines subprocess
/// * `postgres:host=localhost user=postgres`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSpec {
    pub kind: TargetKind,
    pub conn: String,
    /// Error-message fragments whose target errors are not reported.
    pub suppress: Vec<String>,
}

impl TargetSpec {
    pub fn reference() -> Self {
        TargetSpec {
            kind: TargetKind::Reference,
            conn: String::new(),
            suppress: Vec::new(),
        }
    }

    pub fn open(&self) -> Result<Box<dyn TargetAdapter>, AdapterError> {
        Ok(match self.kind {
            TargetKind::Reference => Box::new(ReferenceAdapter::from_conn(&self.conn)?),
            TargetKind::Sqlite => Box::new(SqliteAdapter::open(&self.conn)?),
            TargetKind::Cmd => Box::new(CmdAdapter::spawn(&self.conn)?),
            TargetKind::Postgres => Box::new(PostgresAdapter::connect(&self.conn)?),
        })
    }

    pub fn suppressed(&self, message: &str) -> bool {
        self.suppress.iter().any(|s| message.contains(s.as_str()))
    }
}

impl FromStr for TargetSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, conn) = s.split_once(':').unwrap_or((s, ""));
        let kind = match kind {
            "reference" | "ref" => TargetKind::Reference,
            "sqlite" => TargetKind::Sqlite,
            "cmd" => TargetKind::Cmd,
            "postgres" | "pg" => TargetKind::Postgres,
            other => return Err(format!("unknown target kind `{other}` (expected reference|sqlite|cmd|postgres)")),
        };
        Ok(TargetSpec {
            kind,
            conn: conn.to_string(),
            suppress: Vec::new(),
        })
    }
}

impl fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.name(), self.conn)
    }
}

/// SQL text for a fixture cell.
pub(crate) fn literal(v: &Value) -> String {
    v.to_string()
}

/// A column type that holds every cell of the column, for targets that
/// need declared types. `None` when the column mixes domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ColumnType {
    Bool,
    Int,
    Float,
    Text,
    Untyped,
}

pub(crate) fn column_type<'a>(cells: impl Iterator<Item = &'a Value>) -> ColumnType {
    let mut ty: Option<ColumnType> = None;
    for v in cells {
        let t = match v {
            Value::Null => continue,
            Value::Bool(_) => ColumnType::Bool,
            Value::Int(_) => ColumnType::Int,
            Value::Float(_) => ColumnType::Float,
            Value::Str(_) => ColumnType::Text,
        };
        ty = Some(match (ty, t) {
            (None, t) => t,
            (Some(a), b) if a == b => a,
            (Some(ColumnType::Int), ColumnType::Float) | (Some(ColumnType::Float), ColumnType::Int) => ColumnType::Float,
            _ => ColumnType::Untyped,
        });
    }
    ty.unwrap_or(ColumnType::Int)
}

pub(crate) fn quote_ident(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// CREATE and INSERT statements for a catalog; `type_name` spells column
/// types in the target's dialect.
pub(crate) fn fixture_statements(catalog: &Catalog, type_name: &dyn Fn(ColumnType) -> &'static str) -> Vec<String> {
    let mut out = Vec::new();
    for (name, t) in &catalog.tables {
        let cols: Vec<String> = t
            .attributes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let ty = type_name(column_type(t.rows.iter().map(|r| &r[i])));
                format!("{} {ty}", quote_ident(&a.name)).trim_end().to_string()
            })
            .collect();
        out.push(format!("CREATE TABLE {} ({})", quote_ident(name), cols.join(", ")));
        for r in &t.rows {
            let cells: Vec<String> = r.iter().map(literal).collect();
            out.push(format!("INSERT INTO {} VALUES ({})", quote_ident(name), cells.join(", ")));
        }
    }
    out
}
