use rusqlite::types::ValueRef;
use rusqlite::Connection;

use sqlsem_core::table::Catalog;

use super::{fixture_statements, quote_ident, AdapterError, AdapterKind, TargetAdapter};
use crate::normalize::{Grid, RawValue};

/// An embedded SQLite database, in memory or in a file.
pub struct SqliteAdapter {
    name: String,
    conn: Connection,
}

impl SqliteAdapter {
    /// `conn` is a file path, or empty / `:memory:` for an in-memory db.
    pub fn open(conn: &str) -> Result<Self, AdapterError> {
        let name = format!("sqlite:{conn}");
        let c = if conn.is_empty() || conn == ":memory:" {
            Connection::open_in_memory()
        } else {
            Connection::open(conn)
        }
        .map_err(|e| AdapterError::Connect {
            target: name.clone(),
            message: e.to_string(),
        })?;
        Ok(SqliteAdapter { name, conn: c })
    }

    pub fn version() -> &'static str {
        rusqlite::version()
    }

    fn replay_err(&self, e: rusqlite::Error) -> AdapterError {
        AdapterError::Replay {
            target: self.name.clone(),
            message: e.to_string(),
        }
    }
}

impl TargetAdapter for SqliteAdapter {
    fn name(&self) -> &str {
        &self.name
    }

    fn kind(&self) -> AdapterKind {
        AdapterKind::EmbeddedFileDb
    }

    fn replay_fixture(&mut self, catalog: &Catalog) -> Result<(), AdapterError> {
        let existing: Vec<String> = {
            let mut st = self
                .conn
                .prepare("SELECT name FROM sqlite_master WHERE type = 'table' AND name NOT LIKE 'sqlite_%'")
                .map_err(|e| self.replay_err(e))?;
            let names = st
                .query_map([], |r| r.get::<_, String>(0))
                .and_then(|rows| rows.collect::<Result<Vec<_>, _>>());
            names.map_err(|e| self.replay_err(e))?
        };
        let mut script = String::from("BEGIN;\n");
        for t in existing {
            script.push_str(&format!("DROP TABLE {};\n", quote_ident(&t)));
        }
        // No declared types: cells keep their own storage class.
        for s in fixture_statements(catalog, &|_| "") {
            script.push_str(&s);
            script.push_str(";\n");
        }
        script.push_str("COMMIT;\n");
        self.conn.execute_batch(&script).map_err(|e| self.replay_err(e))
    }

    fn execute(&mut self, sql: &str) -> Result<Grid, AdapterError> {
        let q = |e: rusqlite::Error| AdapterError::Query(e.to_string());
        let mut st = self.conn.prepare(sql).map_err(q)?;
        let width = st.column_count();
        let mut rows = st.query([]).map_err(q)?;
        let mut grid = Vec::new();
        while let Some(r) = rows.next().map_err(q)? {
            let mut row = Vec::with_capacity(width);
            for i in 0..width {
                row.push(match r.get_ref(i).map_err(q)? {
                    ValueRef::Null => RawValue::Null,
                    ValueRef::Integer(i) => RawValue::Int(i),
                    ValueRef::Real(f) => RawValue::Float(f),
                    ValueRef::Text(t) => match std::str::from_utf8(t) {
                        Ok(s) => RawValue::Text(s.to_string()),
                        Err(_) => RawValue::Blob(t.to_vec()),
                    },
                    ValueRef::Blob(b) => RawValue::Blob(b.to_vec()),
                });
            }
            grid.push(row);
        }
        Ok(grid)
    }
}
