//! Line-oriented fixture documents.
//!
//! ```text
//! # demo
//! TABLE t (a, b)
//! ROW 1, 4
//! ROW 2, 'it''s'
//! ```
//!
//! Cells are `NULL`, `TRUE`, `FALSE`, integers, decimals or single-quoted
//! strings with doubled-quote escaping. Blank lines and `#` comments are
//! ignored.

use std::collections::HashSet;
use std::path::Path;

use crate::error::{FixtureError, FixtureErrorKind};
use crate::table::{BagTable, Catalog, Row};
use crate::value::Value;

pub fn load_fixture(text: &str) -> Result<Catalog, FixtureError> {
    let mut catalog = Catalog::new();
    let mut current: Option<BagTable> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |kind| FixtureError {
            line: line_no,
            kind,
        };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = strip_keyword(line, "TABLE") {
            if let Some(done) = current.take() {
                catalog.insert(done);
            }
            let (name, attrs) = parse_table_header(rest).map_err(err)?;
            if catalog.tables.contains_key(&name) {
                return Err(err(FixtureErrorKind::DuplicateTable(name)));
            }
            let mut seen = HashSet::new();
            for a in &attrs {
                if !seen.insert(a.as_str()) {
                    return Err(err(FixtureErrorKind::DuplicateAttribute {
                        table: name.clone(),
                        attribute: a.clone(),
                    }));
                }
            }
            let cols: Vec<&str> = attrs.iter().map(String::as_str).collect();
            current = Some(BagTable::base(&name, &cols, Vec::new()));
        } else if let Some(rest) = strip_keyword(line, "ROW") {
            let table = current
                .as_mut()
                .ok_or_else(|| err(FixtureErrorKind::RowWithoutTable))?;
            let cells = parse_cells(rest).map_err(err)?;
            if cells.len() != table.arity() {
                return Err(err(FixtureErrorKind::Arity {
                    table: table.name.clone().unwrap_or_default(),
                    expected: table.arity(),
                    found: cells.len(),
                }));
            }
            table.rows.push(cells);
        } else {
            return Err(err(FixtureErrorKind::Unrecognized(line.to_string())));
        }
    }
    if let Some(done) = current.take() {
        catalog.insert(done);
    }
    Ok(catalog)
}

pub fn load_fixture_file(path: &Path) -> Result<Catalog, FixtureError> {
    let text = std::fs::read_to_string(path).map_err(|e| FixtureError {
        line: 0,
        kind: FixtureErrorKind::Io(format!("{}: {e}", path.display())),
    })?;
    load_fixture(&text)
}

/// Renders a catalog back into fixture syntax. Tables appear in name order.
pub fn render_fixture(catalog: &Catalog) -> String {
    let mut out = String::new();
    for (name, t) in &catalog.tables {
        let cols: Vec<&str> = t.attributes.iter().map(|a| a.name.as_str()).collect();
        out.push_str(&format!("TABLE {name} ({})\n", cols.join(", ")));
        for r in &t.rows {
            out.push_str(&row_line(r));
            out.push('\n');
        }
    }
    out
}

/// `ROW <cell>, <cell>, ...`; a zero-width row renders as a bare `ROW`.
pub fn row_line(row: &[Value]) -> String {
    if row.is_empty() {
        return "ROW".to_string();
    }
    let cells: Vec<String> = row.iter().map(Value::to_string).collect();
    format!("ROW {}", cells.join(", "))
}

/// Parses one `ROW ...` line back into cells.
pub fn parse_row_line(line: &str) -> Result<Row, FixtureErrorKind> {
    let rest = strip_keyword(line.trim(), "ROW")
        .ok_or_else(|| FixtureErrorKind::Unrecognized(line.to_string()))?;
    parse_cells(rest)
}

fn strip_keyword<'a>(line: &'a str, kw: &str) -> Option<&'a str> {
    let head = line.get(..kw.len())?;
    if !head.eq_ignore_ascii_case(kw) {
        return None;
    }
    let rest = &line[kw.len()..];
    if rest.is_empty() || rest.starts_with(char::is_whitespace) {
        Some(rest.trim())
    } else {
        None
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !crate::lexer::is_reserved(s)
}

fn parse_table_header(rest: &str) -> Result<(String, Vec<String>), FixtureErrorKind> {
    let open = rest
        .find('(')
        .ok_or_else(|| FixtureErrorKind::Unrecognized(rest.to_string()))?;
    let close = rest
        .rfind(')')
        .filter(|&c| c > open && rest[c + 1..].trim().is_empty())
        .ok_or_else(|| FixtureErrorKind::Unrecognized(rest.to_string()))?;
    let name = rest[..open].trim().to_string();
    if !is_identifier(&name) {
        return Err(FixtureErrorKind::BadIdentifier(name));
    }
    let mut attrs = Vec::new();
    for a in rest[open + 1..close].split(',') {
        let a = a.trim();
        if !is_identifier(a) {
            return Err(FixtureErrorKind::BadIdentifier(a.to_string()));
        }
        attrs.push(a.to_string());
    }
    Ok((name, attrs))
}

fn parse_cells(rest: &str) -> Result<Row, FixtureErrorKind> {
    let mut cells = Vec::new();
    let chars: Vec<char> = rest.chars().collect();
    let mut i = 0;
    if rest.trim().is_empty() {
        return Ok(cells);
    }
    loop {
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
        let start = i;
        if i < chars.len() && chars[i] == '\'' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err(FixtureErrorKind::BadCell(chars[start..].iter().collect())),
                    Some('\'') if chars.get(i + 1) == Some(&'\'') => {
                        s.push('\'');
                        i += 2;
                    }
                    Some('\'') => {
                        i += 1;
                        break;
                    }
                    Some(&c) => {
                        s.push(c);
                        i += 1;
                    }
                }
            }
            cells.push(Value::Str(s));
        } else {
            while i < chars.len() && chars[i] != ',' {
                i += 1;
            }
            let tok: String = chars[start..i].iter().collect();
            cells.push(parse_cell(tok.trim())?);
        }
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
        match chars.get(i) {
            None => break,
            Some(',') => i += 1,
            Some(_) => return Err(FixtureErrorKind::BadCell(chars[start..].iter().collect())),
        }
    }
    Ok(cells)
}

/// Parses a single unquoted cell token.
pub fn parse_cell(tok: &str) -> Result<Value, FixtureErrorKind> {
    if tok.eq_ignore_ascii_case("NULL") {
        return Ok(Value::Null);
    }
    if tok.eq_ignore_ascii_case("TRUE") {
        return Ok(Value::Bool(true));
    }
    if tok.eq_ignore_ascii_case("FALSE") {
        return Ok(Value::Bool(false));
    }
    if tok.len() >= 2 && tok.starts_with('\'') && tok.ends_with('\'') {
        return Ok(Value::Str(tok[1..tok.len() - 1].replace("''", "'")));
    }
    let bad = || FixtureErrorKind::BadCell(tok.to_string());
    let body = tok.strip_prefix(['-', '+']).unwrap_or(tok);
    if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit() || c == '.') {
        return Err(bad());
    }
    if body.contains('.') {
        let f: f64 = tok.parse().map_err(|_| bad())?;
        Value::float(f).map_err(|_| bad())
    } else {
        tok.parse::<i64>().map(Value::Int).map_err(|_| bad())
    }
}
