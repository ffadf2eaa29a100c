//! Bag tables and the catalog.

use std::collections::{BTreeMap, HashMap};

use crate::ast::ColumnRef;
use crate::error::QueryError;
use crate::value::Value;

/// A column of a (possibly derived) table.
///
/// `qualifiers` lists the table names through which the column may be
/// addressed as `t.name`. Base-table columns carry one qualifier; a column
/// merged by a natural join carries both sides' names; computed columns
/// carry none.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Attribute {
    pub qualifiers: Vec<String>,
    pub name: String,
}

impl Attribute {
    pub fn qualified(table: &str, name: &str) -> Self {
        Attribute {
            qualifiers: vec![table.to_string()],
            name: name.to_string(),
        }
    }

    pub fn computed(name: impl Into<String>) -> Self {
        Attribute {
            qualifiers: Vec::new(),
            name: name.into(),
        }
    }

    pub fn matches(&self, col: &ColumnRef) -> bool {
        self.name == col.column
            && match &col.table {
                Some(t) => self.qualifiers.iter().any(|q| q == t),
                None => true,
            }
    }

    /// `t.name` using the first qualifier, or the bare name.
    pub fn display_name(&self) -> String {
        match self.qualifiers.first() {
            Some(q) => format!("{q}.{}", self.name),
            None => self.name.clone(),
        }
    }
}

pub type Row = Vec<Value>;

/// A named multiset of rows. Duplicates are significant; row order is not,
/// except after ORDER BY.
#[derive(Debug, Clone, PartialEq)]
pub struct BagTable {
    pub name: Option<String>,
    pub attributes: Vec<Attribute>,
    pub rows: Vec<Row>,
}

impl BagTable {
    pub fn new(attributes: Vec<Attribute>, rows: Vec<Row>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == attributes.len()));
        BagTable {
            name: None,
            attributes,
            rows,
        }
    }

    /// A base table whose columns are qualified by `name`.
    pub fn base(name: &str, columns: &[&str], rows: Vec<Row>) -> Self {
        let attributes = columns.iter().map(|c| Attribute::qualified(name, c)).collect();
        BagTable {
            name: Some(name.to_string()),
            ..BagTable::new(attributes, rows)
        }
    }

    pub fn empty(attributes: Vec<Attribute>) -> Self {
        BagTable::new(attributes, Vec::new())
    }

    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Index of the attribute `col` names. Errors on no match or on more
    /// than one.
    pub fn resolve(&self, col: &ColumnRef) -> Result<usize, QueryError> {
        resolve_in(&self.attributes, col)?.ok_or_else(|| QueryError::UnknownColumn(col.to_string()))
    }

    /// Row counts keyed by row, under multiset identity.
    pub fn counts(&self) -> HashMap<&Row, usize> {
        let mut m = HashMap::new();
        for r in &self.rows {
            *m.entry(r).or_insert(0) += 1;
        }
        m
    }

    /// True when both tables hold the same rows with the same multiplicities.
    pub fn multiset_eq(&self, other: &BagTable) -> bool {
        self.rows.len() == other.rows.len() && self.counts() == other.counts()
    }

    /// Rows in a canonical order, for order-insensitive display.
    pub fn sorted_rows(&self) -> Vec<Row> {
        let mut rows = self.rows.clone();
        rows.sort();
        rows
    }
}

/// Resolves `col` against an attribute list: `Ok(None)` when nothing
/// matches, an error when the reference is ambiguous.
pub fn resolve_in(attrs: &[Attribute], col: &ColumnRef) -> Result<Option<usize>, QueryError> {
    let mut found = None;
    for (i, a) in attrs.iter().enumerate() {
        if a.matches(col) {
            if found.is_some() {
                return Err(QueryError::AmbiguousColumn(col.to_string()));
            }
            found = Some(i);
        }
    }
    Ok(found)
}

/// Number of rows of `t` identical to `row` (NULL identical to NULL).
pub fn multiplicity(t: &BagTable, row: &[Value]) -> usize {
    t.rows.iter().filter(|r| r.as_slice() == row).count()
}

/// The set of all tables, by name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Catalog {
    pub tables: BTreeMap<String, BagTable>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, table: BagTable) {
        let name = table.name.clone().expect("catalog tables are named");
        self.tables.insert(name, table);
    }

    pub fn get(&self, name: &str) -> Result<&BagTable, QueryError> {
        self.tables
            .get(name)
            .ok_or_else(|| QueryError::UnknownTable(name.to_string()))
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo() -> BagTable {
        BagTable::base(
            "t",
            &["a", "b"],
            vec![
                vec![Value::Int(1), Value::Int(4)],
                vec![Value::Int(2), Value::Int(5)],
                vec![Value::Int(3), Value::Int(8)],
            ],
        )
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(multiplicity(&demo(), &[Value::Int(2), Value::Int(5)]), 1);
        let dup = BagTable::base("u", &["x"], vec![vec![Value::Int(1)], vec![Value::Int(1)]]);
        assert_eq!(multiplicity(&dup, &[Value::Int(1)]), 2);
        let n = BagTable::base("n", &["x"], vec![vec![Value::Null]]);
        assert_eq!(multiplicity(&n, &[Value::Null]), 1);
    }

    #[test]
    fn multiplicities_sum_to_row_count() {
        let t = BagTable::base(
            "u",
            &["x"],
            vec![
                vec![Value::Int(1)],
                vec![Value::Null],
                vec![Value::Int(1)],
                vec![Value::Null],
                vec![Value::str("a")],
            ],
        );
        let total: usize = t.counts().keys().map(|r| multiplicity(&t, r)).sum();
        assert_eq!(total, t.len());
    }

    #[test]
    fn resolution() {
        let t = demo();
        assert_eq!(t.resolve(&ColumnRef::new("t", "b")).unwrap(), 1);
        assert_eq!(t.resolve(&ColumnRef::bare("a")).unwrap(), 0);
        assert!(matches!(
            t.resolve(&ColumnRef::new("u", "b")),
            Err(QueryError::UnknownColumn(_))
        ));
        let twice = BagTable::new(
            vec![Attribute::qualified("t", "a"), Attribute::qualified("u", "a")],
            vec![],
        );
        assert!(matches!(
            twice.resolve(&ColumnRef::bare("a")),
            Err(QueryError::AmbiguousColumn(_))
        ));
    }
}
