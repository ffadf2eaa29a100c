//! Static checks: every table and column resolves, function arities match,
//! clause combinations are supported and set-operation operands agree in
//! width. Runtime failures (division by zero, overflow, scalar subqueries
//! returning several rows) are not detected here.

use crate::ast::*;
use crate::error::QueryError;
use crate::exec::{aggregate_attribute, check_grouped};
use crate::options::JoinMode;
use crate::relops::{join_attributes, select_attributes};
use crate::table::{resolve_in, Attribute, Catalog};

pub fn validate(q: &Query, catalog: &Catalog, mode: JoinMode) -> Result<(), QueryError> {
    let cx = Checker { catalog, mode };
    cx.query(q, &[]).map(|_| ())
}

/// Output columns of a valid query, computed without executing it.
pub fn output_attributes(q: &Query, catalog: &Catalog, mode: JoinMode) -> Result<Vec<Attribute>, QueryError> {
    Checker { catalog, mode }.query(q, &[])
}

struct Checker<'a> {
    catalog: &'a Catalog,
    mode: JoinMode,
}

type Scopes<'s> = [&'s [Attribute]];

impl Checker<'_> {
    fn table(&self, name: &str) -> Result<Vec<Attribute>, QueryError> {
        Ok(self.catalog.get(name)?.attributes.clone())
    }

    /// Output attributes of `q`.
    fn query(&self, q: &Query, outer: &Scopes) -> Result<Vec<Attribute>, QueryError> {
        let out = match &q.body {
            QueryBody::Select(s) => self.select(s, outer)?,
            QueryBody::SetOp { left, right, .. } => {
                let l = self.query(left, outer)?;
                let r = self.query(right, outer)?;
                if l.len() != r.len() {
                    return Err(QueryError::Arity {
                        left: l.len(),
                        right: r.len(),
                    });
                }
                l
            }
        };
        if let Some(o) = &q.order_by {
            if resolve_in(&out, &o.column)?.is_none() {
                return Err(QueryError::UnknownColumn(o.column.to_string()));
            }
        }
        Ok(out)
    }

    fn select(&self, s: &Select, outer: &Scopes) -> Result<Vec<Attribute>, QueryError> {
        let mut attrs: Vec<Attribute> = Vec::new();
        if let Some(refs) = &s.from {
            if refs.is_empty() {
                return Err(QueryError::Semantic("empty FROM".into()));
            }
            for r in refs {
                match r {
                    TableRef::Table(t) => attrs.extend(self.table(t)?),
                    TableRef::Join(j) => {
                        let a1 = self.table(&j.left)?;
                        let a2 = self.table(&j.right)?;
                        let joined = join_attributes(j.kind, &a1, &a2, self.mode);
                        match (&j.on, j.kind.is_qualified()) {
                            (Some(on), true) => self.expr(on, &with(outer, &joined))?,
                            (None, false) => {}
                            _ => {
                                return Err(QueryError::Semantic(format!(
                                    "ON clause does not fit {}",
                                    j.kind.sql()
                                )))
                            }
                        }
                        attrs.extend(joined);
                    }
                }
            }
        }
        let scopes = with(outer, &attrs);
        if let SelectList::Items(items) = &s.items {
            for e in items {
                self.expr(e, &scopes)?;
            }
        }
        if let Some(w) = &s.where_clause {
            self.expr(w, &scopes)?;
        }
        if let Some(h) = &s.having {
            self.expr(h, &scopes)?;
        }
        let agg = s.aggregate();
        if let Some(f) = agg {
            match &s.items {
                SelectList::Star if f != AggFunc::Count => {
                    return Err(QueryError::Semantic(format!("{}(*) is not supported", f.sql())))
                }
                SelectList::Items(items) if items.len() != 1 => {
                    return Err(QueryError::Semantic("aggregate over several expressions".into()))
                }
                _ => {}
            }
        }
        match &s.group_by {
            None => {
                if s.having.is_some() {
                    return Err(QueryError::Semantic("HAVING without GROUP BY".into()));
                }
            }
            Some(key) => {
                let k = resolve_in(&attrs, key)?.ok_or_else(|| QueryError::UnknownColumn(key.to_string()))?;
                if let Some(h) = &s.having {
                    check_grouped(h, &attrs, k)?;
                }
                if agg.is_none() {
                    match &s.items {
                        SelectList::Star => return Err(QueryError::Semantic("SELECT * with GROUP BY".into())),
                        SelectList::Items(items) => {
                            for e in items {
                                check_grouped(e, &attrs, k)?;
                            }
                        }
                    }
                }
            }
        }
        Ok(match agg {
            Some(f) => vec![aggregate_attribute(f, &s.items)],
            None => select_attributes(&s.items, &attrs),
        })
    }

    fn expr(&self, e: &ValueExpr, scopes: &Scopes) -> Result<(), QueryError> {
        match e {
            ValueExpr::Column(c) => {
                for s in scopes.iter().rev() {
                    if resolve_in(s, c)?.is_some() {
                        return Ok(());
                    }
                }
                return Err(QueryError::UnknownColumn(c.to_string()));
            }
            ValueExpr::Func { func, args } if args.len() != func.arity() => {
                return Err(QueryError::FuncArity {
                    func: func.name(),
                    expected: func.arity(),
                    got: args.len(),
                });
            }
            ValueExpr::InSubquery { query, .. } | ValueExpr::Subquery(query) => {
                let out = self.query(query, scopes)?;
                if out.len() != 1 {
                    return Err(QueryError::Subquery(format!("subquery returns {} columns", out.len())));
                }
            }
            ValueExpr::Exists(query) => {
                self.query(query, scopes)?;
            }
            _ => {}
        }
        for c in e.children() {
            self.expr(c, scopes)?;
        }
        Ok(())
    }
}

fn with<'s>(outer: &Scopes<'s>, inner: &'s [Attribute]) -> Vec<&'s [Attribute]> {
    let mut v = outer.to_vec();
    v.push(inner);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::load_fixture;
    use crate::parser::parse;

    fn check(sql: &str) -> Result<(), QueryError> {
        let cat = load_fixture("TABLE t (a, b)\nROW 1, 4\nTABLE u (a)\nROW 2\n").unwrap();
        validate(&parse(sql).unwrap(), &cat, JoinMode::Standard)
    }

    #[test]
    fn accepts_valid_queries() {
        check("SELECT t.b FROM t").unwrap();
        check("SELECT t.b FROM t WHERE EXISTS (SELECT * FROM u WHERE u.a = t.a)").unwrap();
        check("SELECT COUNT(*) FROM t GROUP BY t.a HAVING t.a > 1").unwrap();
        check("SELECT t.a FROM t UNION SELECT u.a FROM u ORDER BY t.a DESC").unwrap();
        check("SELECT * FROM t LEFT JOIN u ON t.a = u.a").unwrap();
    }

    #[test]
    fn rejects_invalid_queries() {
        assert!(matches!(check("SELECT * FROM zz"), Err(QueryError::UnknownTable(_))));
        assert!(matches!(check("SELECT t.c FROM t"), Err(QueryError::UnknownColumn(_))));
        assert!(matches!(check("SELECT a FROM t, u"), Err(QueryError::AmbiguousColumn(_))));
        assert!(matches!(check("SELECT POWER(t.a) FROM t"), Err(QueryError::FuncArity { .. })));
        assert!(matches!(check("SELECT * FROM t UNION SELECT * FROM u"), Err(QueryError::Arity { .. })));
        assert!(matches!(check("SELECT t.a FROM t HAVING t.a"), Err(QueryError::Semantic(_))));
        assert!(matches!(check("SELECT t.b FROM t GROUP BY t.a"), Err(QueryError::Semantic(_))));
        assert!(matches!(check("SELECT * FROM t WHERE t.a IN (SELECT * FROM t)"), Err(QueryError::Subquery(_))));
        assert!(matches!(check("SELECT * FROM t LEFT JOIN u ON t.b = t.zz"), Err(QueryError::UnknownColumn(_))));
    }
}
