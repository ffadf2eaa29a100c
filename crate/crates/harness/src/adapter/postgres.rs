use postgres::types::Type;
use postgres::{Client, NoTls};

use sqlsem_core::table::Catalog;

use super::{fixture_statements, quote_ident, AdapterError, AdapterKind, ColumnType, TargetAdapter};
use crate::normalize::{Grid, RawValue};

/// A PostgreSQL server over a client socket.
pub struct PostgresAdapter {
    name: String,
    client: Client,
}

fn type_name(t: ColumnType) -> &'static str {
    match t {
        ColumnType::Bool => "BOOLEAN",
        ColumnType::Int => "BIGINT",
        ColumnType::Float => "DOUBLE PRECISION",
        ColumnType::Text | ColumnType::Untyped => "TEXT",
    }
}

impl PostgresAdapter {
    pub fn connect(conn: &str) -> Result<Self, AdapterError> {
        let name = format!("postgres:{conn}");
        let client = Client::connect(conn, NoTls).map_err(|e| AdapterError::Connect {
            target: name.clone(),
            message: e.to_string(),
        })?;
        Ok(PostgresAdapter { name, client })
    }
}

impl TargetAdapter for PostgresAdapter {
    fn name(&self) -> &str {
        &self.name
    }

    fn kind(&self) -> AdapterKind {
        AdapterKind::ServerSocketDb
    }

    fn replay_fixture(&mut self, catalog: &Catalog) -> Result<(), AdapterError> {
        let err = |e: postgres::Error, name: &str| AdapterError::Replay {
            target: name.to_string(),
            message: e.to_string(),
        };
        let mut tx = self.client.transaction().map_err(|e| err(e, &self.name))?;
        let existing: Vec<String> = tx
            .query("SELECT tablename FROM pg_tables WHERE schemaname = current_schema()", &[])
            .map_err(|e| err(e, &self.name))?
            .iter()
            .map(|r| r.get(0))
            .collect();
        for t in existing {
            tx.batch_execute(&format!("DROP TABLE {}", quote_ident(&t)))
                .map_err(|e| err(e, &self.name))?;
        }
        for s in fixture_statements(catalog, &type_name) {
            tx.batch_execute(&s).map_err(|e| err(e, &self.name))?;
        }
        tx.commit().map_err(|e| err(e, &self.name))
    }

    fn execute(&mut self, sql: &str) -> Result<Grid, AdapterError> {
        let q = |e: postgres::Error| AdapterError::Query(e.to_string());
        let rows = self.client.query(sql, &[]).map_err(q)?;
        let mut grid = Vec::with_capacity(rows.len());
        for r in &rows {
            let mut row = Vec::with_capacity(r.len());
            for (i, col) in r.columns().iter().enumerate() {
                let ty = col.type_();
                let v = if *ty == Type::BOOL {
                    r.try_get::<_, Option<bool>>(i).map_err(q)?.map(RawValue::Bool)
                } else if *ty == Type::INT2 {
                    r.try_get::<_, Option<i16>>(i).map_err(q)?.map(|v| RawValue::Int(v.into()))
                } else if *ty == Type::INT4 {
                    r.try_get::<_, Option<i32>>(i).map_err(q)?.map(|v| RawValue::Int(v.into()))
                } else if *ty == Type::INT8 {
                    r.try_get::<_, Option<i64>>(i).map_err(q)?.map(RawValue::Int)
                } else if *ty == Type::FLOAT4 {
                    r.try_get::<_, Option<f32>>(i).map_err(q)?.map(|v| RawValue::Float(v.into()))
                } else if *ty == Type::FLOAT8 {
                    r.try_get::<_, Option<f64>>(i).map_err(q)?.map(RawValue::Float)
                } else if [Type::TEXT, Type::VARCHAR, Type::BPCHAR, Type::NAME, Type::UNKNOWN].contains(ty) {
                    r.try_get::<_, Option<String>>(i).map_err(q)?.map(RawValue::Text)
                } else {
                    return Err(AdapterError::Query(format!("unmappable column type {ty}")));
                };
                row.push(v.unwrap_or(RawValue::Null));
            }
            grid.push(row);
        }
        Ok(grid)
    }
}
