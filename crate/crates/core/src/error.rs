use thiserror::Error;

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
pub struct SyntaxError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("fixture line {line}: {kind}")]
pub struct FixtureError {
    pub line: usize,
    pub kind: FixtureErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureErrorKind {
    #[error("row has {found} cells but table `{table}` has {expected} attributes")]
    Arity {
        table: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate table `{0}`")]
    DuplicateTable(String),
    #[error("duplicate attribute `{attribute}` in table `{table}`")]
    DuplicateAttribute { table: String, attribute: String },
    #[error("bad cell value `{0}`")]
    BadCell(String),
    #[error("ROW before any TABLE")]
    RowWithoutTable,
    #[error("bad identifier `{0}`")]
    BadIdentifier(String),
    #[error("unrecognized line `{0}`")]
    Unrecognized(String),
    #[error("cannot read fixture: {0}")]
    Io(String),
}

/// Any failure while resolving or evaluating a query against a catalog.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("ambiguous column `{0}`")]
    AmbiguousColumn(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numeric overflow: {0}")]
    Overflow(String),
    #[error("set operation over tables of arity {left} and {right}")]
    Arity { left: usize, right: usize },
    #[error("{func} takes {expected} argument(s), got {got}")]
    FuncArity {
        func: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("subquery error: {0}")]
    Subquery(String),
    #[error("invalid query: {0}")]
    Semantic(String),
}

impl QueryError {
    /// Short stable class name, used when classifying findings.
    pub fn class(&self) -> &'static str {
        match self {
            QueryError::UnknownTable(_) => "unknown-table",
            QueryError::UnknownColumn(_) => "unknown-column",
            QueryError::AmbiguousColumn(_) => "ambiguous-column",
            QueryError::Domain(_) => "domain",
            QueryError::Overflow(_) => "overflow",
            QueryError::Arity { .. } | QueryError::FuncArity { .. } => "arity",
            QueryError::Schema(_) => "schema",
            QueryError::Subquery(_) => "subquery",
            QueryError::Semantic(_) => "semantic",
        }
    }
}
