//! Accepted-query corpus: each query on one line, preceded by
//! `# meta seed=<n> rule=<id|initial> parent=<index|none>`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::mutate::MutationRule;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: malformed meta comment `{text}`")]
    Meta { line: usize, text: String },
    #[error("line {line}: meta comment without a query")]
    Dangling { line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub seed: Option<u64>,
    pub rule: Option<MutationRule>,
    pub parent: Option<usize>,
    pub sql: String,
}

impl CorpusEntry {
    pub fn render(&self) -> String {
        let mut s = String::from("# meta");
        if let Some(seed) = self.seed {
            let _ = write!(s, " seed={seed}");
        }
        match self.rule {
            Some(r) => {
                let _ = write!(s, " rule={r}");
            }
            None => s.push_str(" rule=initial"),
        }
        match self.parent {
            Some(p) => {
                let _ = write!(s, " parent={p}");
            }
            None => s.push_str(" parent=none"),
        }
        s.push('\n');
        s.push_str(&self.sql);
        s.push('\n');
        s
    }
}

pub fn render(entries: &[CorpusEntry]) -> String {
    entries.iter().map(CorpusEntry::render).collect()
}

/// Parses a corpus. Blank lines and other comments are skipped; a query
/// line without a meta comment is accepted with empty metadata.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut out = Vec::new();
    let mut pending: Option<(usize, CorpusEntry)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let n = i + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# meta") {
            if let Some((l, _)) = pending {
                return Err(CorpusError::Dangling { line: l });
            }
            pending = Some((n, parse_meta(rest, n, line)?));
            continue;
        }
        if line.starts_with('#') || line.starts_with("--") {
            continue;
        }
        let mut entry = pending.take().map(|(_, e)| e).unwrap_or(CorpusEntry {
            seed: None,
            rule: None,
            parent: None,
            sql: String::new(),
        });
        entry.sql = line.to_string();
        out.push(entry);
    }
    if let Some((l, _)) = pending {
        return Err(CorpusError::Dangling { line: l });
    }
    Ok(out)
}

fn parse_meta(rest: &str, line: usize, text: &str) -> Result<CorpusEntry, CorpusError> {
    let bad = || CorpusError::Meta {
        line,
        text: text.to_string(),
    };
    let mut e = CorpusEntry {
        seed: None,
        rule: None,
        parent: None,
        sql: String::new(),
    };
    for field in rest.split_whitespace() {
        let (k, v) = field.split_once('=').ok_or_else(bad)?;
        match k {
            "seed" => e.seed = Some(v.parse().map_err(|_| bad())?),
            "rule" if v == "initial" => e.rule = None,
            "rule" => e.rule = Some(v.parse().map_err(|_| bad())?),
            "parent" if v == "none" => e.parent = None,
            "parent" => e.parent = Some(v.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let entries = vec![
            CorpusEntry {
                seed: Some(7),
                rule: None,
                parent: None,
                sql: "SELECT t.b FROM t".into(),
            },
            CorpusEntry {
                seed: Some(7),
                rule: Some(MutationRule::AddKeywords),
                parent: Some(0),
                sql: "SELECT t.b FROM t ORDER BY t.b ASC".into(),
            },
        ];
        let text = render(&entries);
        assert!(text.contains("# meta seed=7 rule=04 parent=0\n"));
        assert_eq!(parse_corpus(&text).unwrap(), entries);
    }

    #[test]
    fn bare_lines_and_errors() {
        let e = parse_corpus("SELECT 1\n\nSELECT 2\n").unwrap();
        assert_eq!(e.len(), 2);
        assert!(e[0].seed.is_none());
        assert!(matches!(parse_corpus("# meta seed=x\nSELECT 1"), Err(CorpusError::Meta { .. })));
        assert!(matches!(parse_corpus("# meta seed=1\n"), Err(CorpusError::Dangling { .. })));
    }
}
