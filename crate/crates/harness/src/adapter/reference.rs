use sqlsem_core::table::Catalog;
use sqlsem_core::{execute_with, parse, ExecOptions, Value};

use super::{AdapterError, AdapterKind, TargetAdapter};
use crate::normalize::{Grid, RawValue};

/// The reference engine behind the adapter interface.
pub struct ReferenceAdapter {
    name: String,
    opts: ExecOptions,
    catalog: Catalog,
}

impl ReferenceAdapter {
    pub fn new(opts: ExecOptions) -> Self {
        let mut name = format!("reference:{}", opts.join_mode);
        for f in &opts.faults {
            name.push(',');
            name.push_str(f.name());
        }
        ReferenceAdapter {
            name,
            opts,
            catalog: Catalog::new(),
        }
    }

    /// `padded`/`standard` pick the join mode; other items name faults.
    pub fn from_conn(conn: &str) -> Result<Self, AdapterError> {
        let mut opts = ExecOptions::default();
        for item in conn.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if let Ok(m) = item.parse() {
                opts.join_mode = m;
            } else {
                let f = item.parse().map_err(|message| AdapterError::Connect {
                    target: format!("reference:{conn}"),
                    message,
                })?;
                opts.faults.insert(f);
            }
        }
        Ok(ReferenceAdapter::new(opts))
    }
}

impl TargetAdapter for ReferenceAdapter {
    fn name(&self) -> &str {
        &self.name
    }

    fn kind(&self) -> AdapterKind {
        AdapterKind::Reference
    }

    fn replay_fixture(&mut self, catalog: &Catalog) -> Result<(), AdapterError> {
        self.catalog = catalog.clone();
        Ok(())
    }

    fn execute(&mut self, sql: &str) -> Result<Grid, AdapterError> {
        let q = parse(sql).map_err(|e| AdapterError::Query(e.to_string()))?;
        let t = execute_with(&q, &self.catalog, &self.opts).map_err(|e| AdapterError::Query(e.to_string()))?;
        Ok(t.rows.iter().map(|r| r.iter().map(raw).collect()).collect())
    }
}

fn raw(v: &Value) -> RawValue {
    match v {
        Value::Null => RawValue::Null,
        Value::Bool(b) => RawValue::Bool(*b),
        Value::Int(i) => RawValue::Int(*i),
        Value::Float(f) => RawValue::Float(*f),
        Value::Str(s) => RawValue::Text(s.clone()),
    }
}
