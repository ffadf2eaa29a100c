//! Result comparison: row counts first, then multiset difference, then
//! (for ordered queries) the sequence of sort keys.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use sqlsem_core::table::{BagTable, Row};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Match,
    CountMismatch,
    ContentMismatch,
    TargetError,
    ReferenceError,
}

impl Verdict {
    pub const ALL: [Verdict; 5] = [
        Verdict::Match,
        Verdict::CountMismatch,
        Verdict::ContentMismatch,
        Verdict::TargetError,
        Verdict::ReferenceError,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Match => "match",
            Verdict::CountMismatch => "count-mismatch",
            Verdict::ContentMismatch => "content-mismatch",
            Verdict::TargetError => "target-error",
            Verdict::ReferenceError => "reference-error",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub verdict: Verdict,
    /// `Some("order")` when the rows agree as multisets but not in order.
    pub subclass: Option<&'static str>,
    /// Reference rows without a partner on the target side.
    pub ref_residual: Vec<Row>,
    pub tgt_residual: Vec<Row>,
}

impl Comparison {
    fn plain(verdict: Verdict) -> Self {
        Comparison {
            verdict,
            subclass: None,
            ref_residual: Vec::new(),
            tgt_residual: Vec::new(),
        }
    }
}

/// Compares normalized results. `order_key` is the output position of the
/// ORDER BY column, when the query has one.
pub fn compare(reference: &BagTable, target: &BagTable, order_key: Option<usize>) -> Comparison {
    if reference.rows.len() != target.rows.len() {
        return Comparison::plain(Verdict::CountMismatch);
    }
    let (ref_residual, tgt_residual) = residuals(&reference.rows, &target.rows);
    if !ref_residual.is_empty() || !tgt_residual.is_empty() {
        return Comparison {
            verdict: Verdict::ContentMismatch,
            subclass: None,
            ref_residual,
            tgt_residual,
        };
    }
    if let Some(k) = order_key {
        let keys = |t: &BagTable| t.rows.iter().map(|r| r.get(k).cloned()).collect::<Vec<_>>();
        if keys(reference) != keys(target) {
            return Comparison {
                subclass: Some("order"),
                ..Comparison::plain(Verdict::ContentMismatch)
            };
        }
    }
    Comparison::plain(Verdict::Match)
}

/// Removes identical row pairs; what is left on each side.
pub fn residuals(a: &[Row], b: &[Row]) -> (Vec<Row>, Vec<Row>) {
    let mut counts: HashMap<&Row, isize> = HashMap::new();
    for r in a {
        *counts.entry(r).or_default() += 1;
    }
    for r in b {
        *counts.entry(r).or_default() -= 1;
    }
    let mut left = Vec::new();
    let mut right = Vec::new();
    // Keep first-seen order for readable residuals.
    for r in a {
        if let Some(c) = counts.get_mut(r) {
            if *c > 0 {
                left.push(r.clone());
                *c -= 1;
            }
        }
    }
    for r in b {
        if let Some(c) = counts.get_mut(r) {
            if *c < 0 {
                right.push(r.clone());
                *c += 1;
            }
        }
    }
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sqlsem_core::table::Attribute;
    use sqlsem_core::Value;

    fn t(rows: Vec<Row>) -> BagTable {
        let w = rows.first().map_or(1, Vec::len);
        BagTable::new((0..w).map(|i| Attribute::computed(format!("c{i}"))).collect(), rows)
    }

    #[test]
    fn verdicts() {
        let a = t(vec![vec![Value::Int(1)], vec![Value::Int(2)]]);
        assert_eq!(compare(&a, &a, None).verdict, Verdict::Match);
        let hhhh = t(vec![vec![Value::str("hhhh"), Value::Null, Value::Null]]);
        assert_eq!(compare(&hhhh, &t(vec![]), None).verdict, Verdict::CountMismatch);
        let b = t(vec![vec![Value::Int(1)], vec![Value::Int(3)]]);
        let c = compare(&a, &b, None);
        assert_eq!(c.verdict, Verdict::ContentMismatch);
        assert_eq!(c.ref_residual, vec![vec![Value::Int(2)]]);
        assert_eq!(c.tgt_residual, vec![vec![Value::Int(3)]]);
        let rev = t(vec![vec![Value::Int(2)], vec![Value::Int(1)]]);
        assert_eq!(compare(&a, &rev, None).verdict, Verdict::Match);
        let o = compare(&a, &rev, Some(0));
        assert_eq!((o.verdict, o.subclass), (Verdict::ContentMismatch, Some("order")));
    }

    #[test]
    fn duplicates_count() {
        let a = t(vec![vec![Value::Int(1)], vec![Value::Int(1)], vec![Value::Int(2)]]);
        let b = t(vec![vec![Value::Int(1)], vec![Value::Int(2)], vec![Value::Int(2)]]);
        let c = compare(&a, &b, None);
        assert_eq!(c.verdict, Verdict::ContentMismatch);
        assert_eq!(c.ref_residual, vec![vec![Value::Int(1)]]);
        assert_eq!(c.tgt_residual, vec![vec![Value::Int(2)]]);
    }
}
