use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use serde_json::{json, Value as Json};

use sqlsem_core::table::Catalog;

use super::{fixture_statements, AdapterError, AdapterKind, TargetAdapter};
use crate::normalize::{Grid, RawValue};

/// A database shell run as a subprocess speaking JSON lines.
///
/// Requests: `{"op":"reset"}` and `{"op":"exec","sql":...}`. Responses:
/// `{"ok":true,"rows":[[...],...]}` or `{"ok":false,"error":"..."}`. Cells
/// are JSON null, booleans, integers, floats (always with a fraction or
/// exponent), strings, or `{"blob":"<hex>"}`.
pub struct CmdAdapter {
    name: String,
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl CmdAdapter {
    pub fn spawn(command: &str) -> Result<Self, AdapterError> {
        let name = format!("cmd:{command}");
        let connect = |message: String| AdapterError::Connect {
            target: name.clone(),
            message,
        };
        let mut parts = command.split_whitespace();
        let program = parts.next().ok_or_else(|| connect("empty command".into()))?;
        let mut child = Command::new(program)
            .args(parts)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| connect(e.to_string()))?;
        let stdin = child.stdin.take().expect("piped");
        let stdout = BufReader::new(child.stdout.take().expect("piped"));
        let mut a = CmdAdapter {
            name: name.clone(),
            child,
            stdin,
            stdout,
        };
        a.request(&json!({"op": "reset"})).map_err(|e| connect(e.to_string()))?;
        Ok(a)
    }

    fn request(&mut self, req: &Json) -> Result<Json, AdapterError> {
        let proto = |m: String| AdapterError::Protocol(m);
        writeln!(self.stdin, "{req}").map_err(|e| proto(e.to_string()))?;
        self.stdin.flush().map_err(|e| proto(e.to_string()))?;
        let mut line = String::new();
        let n = self.stdout.read_line(&mut line).map_err(|e| proto(e.to_string()))?;
        if n == 0 {
            return Err(proto("subprocess closed its output".into()));
        }
        let resp: Json = serde_json::from_str(&line).map_err(|e| proto(format!("{e}: {line}")))?;
        match resp.get("ok").and_then(Json::as_bool) {
            Some(true) => Ok(resp),
            Some(false) => Err(AdapterError::Query(
                resp.get("error").and_then(Json::as_str).unwrap_or("unknown error").to_string(),
            )),
            None => Err(proto(format!("missing `ok` in {line}"))),
        }
    }
}

fn cell(v: &Json) -> Result<RawValue, AdapterError> {
    Ok(match v {
        Json::Null => RawValue::Null,
        Json::Bool(b) => RawValue::Bool(*b),
        Json::Number(n) => match n.as_i64() {
            Some(i) => RawValue::Int(i),
            None => RawValue::Float(n.as_f64().ok_or_else(|| AdapterError::Protocol(format!("number {n}")))?),
        },
        Json::String(s) => RawValue::Text(s.clone()),
        Json::Object(o) if o.contains_key("blob") => RawValue::Blob(
            o["blob"].as_str().unwrap_or_default().as_bytes().to_vec(),
        ),
        other => return Err(AdapterError::Protocol(format!("unexpected cell {other}"))),
    })
}

impl TargetAdapter for CmdAdapter {
    fn name(&self) -> &str {
        &self.name
    }

    fn kind(&self) -> AdapterKind {
        AdapterKind::SubprocessShellDb
    }

    fn replay_fixture(&mut self, catalog: &Catalog) -> Result<(), AdapterError> {
        let replay = |message: String, name: &str| AdapterError::Replay {
            target: name.to_string(),
            message,
        };
        self.request(&json!({"op": "reset"}))
            .map_err(|e| replay(e.to_string(), &self.name))?;
        for s in fixture_statements(catalog, &|_| "") {
            self.request(&json!({"op": "exec", "sql": s}))
                .map_err(|e| replay(e.to_string(), &self.name))?;
        }
        Ok(())
    }

    fn execute(&mut self, sql: &str) -> Result<Grid, AdapterError> {
        let resp = self.request(&json!({"op": "exec", "sql": sql}))?;
        let rows = resp
            .get("rows")
            .and_then(Json::as_array)
            .ok_or_else(|| AdapterError::Protocol("missing rows".into()))?;
        rows.iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| AdapterError::Protocol("row is not an array".into()))?
                    .iter()
                    .map(cell)
                    .collect()
            })
            .collect()
    }
}

impl Drop for CmdAdapter {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
