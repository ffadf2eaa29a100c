//! Query execution in keyword order:
//! JOIN, FROM, WHERE, GROUP BY, aggregates, HAVING, SELECT, DISTINCT/ALL,
//! ORDER BY. Set operations run both operands and combine them.

use crate::ast::*;
use crate::error::QueryError;
use crate::eval::{holds, EvalEnv};
use crate::options::ExecOptions;
use crate::printer::print_expr;
use crate::relops::*;
use crate::table::{resolve_in, Attribute, BagTable, Catalog};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    From,
    Where,
    GroupBy,
    Having,
    Select,
    Filter,
    SetOp,
    OrderBy,
}

/// Intermediate tables of one execution, in pipeline order.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub stages: Vec<(Stage, BagTable)>,
}

impl Trace {
    pub fn stage(&self, s: Stage) -> Option<&BagTable> {
        self.stages.iter().find(|(k, _)| *k == s).map(|(_, t)| t)
    }
}

pub fn execute(q: &Query, catalog: &Catalog) -> Result<BagTable, QueryError> {
    execute_with(q, catalog, &ExecOptions::default())
}

pub fn execute_with(q: &Query, catalog: &Catalog, opts: &ExecOptions) -> Result<BagTable, QueryError> {
    run_query(q, &EvalEnv::new(catalog, opts), None)
}

/// Executes and records the table after every stage of the outermost query
/// level (subqueries are not traced).
pub fn execute_traced(q: &Query, catalog: &Catalog, opts: &ExecOptions) -> Result<(BagTable, Trace), QueryError> {
    let mut trace = Trace::default();
    let t = run_query(q, &EvalEnv::new(catalog, opts), Some(&mut trace))?;
    Ok((t, trace))
}

/// Executes a subquery; `env` supplies the enclosing rows for correlated
/// references.
pub fn execute_in(q: &Query, env: &EvalEnv) -> Result<BagTable, QueryError> {
    run_query(q, env, None)
}

fn record(trace: &mut Option<&mut Trace>, s: Stage, t: &BagTable) {
    if let Some(tr) = trace {
        tr.stages.push((s, t.clone()));
    }
}

fn run_query(q: &Query, env: &EvalEnv, mut trace: Option<&mut Trace>) -> Result<BagTable, QueryError> {
    let t = match &q.body {
        QueryBody::Select(s) => run_select(s, env, &mut trace)?,
        QueryBody::SetOp { op, left, right } => {
            let l = run_query(left, env, None)?;
            let r = run_query(right, env, None)?;
            let t = op_collection(*op, &l, &r, env.opts)?;
            record(&mut trace, Stage::SetOp, &t);
            t
        }
    };
    match &q.order_by {
        Some(o) => {
            let t = op_order_by(&o.column, o.direction, t, env.opts)?;
            record(&mut trace, Stage::OrderBy, &t);
            Ok(t)
        }
        None => Ok(t),
    }
}

fn table_ref(r: &TableRef, env: &EvalEnv) -> Result<BagTable, QueryError> {
    match r {
        TableRef::Table(name) => Ok(env.catalog.get(name)?.clone()),
        TableRef::Join(j) => {
            let t1 = env.catalog.get(&j.left)?;
            let t2 = env.catalog.get(&j.right)?;
            op_join(j.kind, t1, t2, j.on.as_ref(), env)
        }
    }
}

/// FROM: each reference, combined left to right by cross product. A query
/// without FROM runs over one empty row.
pub fn from_table(s: &Select, env: &EvalEnv) -> Result<BagTable, QueryError> {
    let Some(refs) = &s.from else {
        return Ok(BagTable::new(Vec::new(), vec![Vec::new()]));
    };
    let mut it = refs.iter();
    let mut t = table_ref(it.next().ok_or_else(|| QueryError::Semantic("empty FROM".into()))?, env)?;
    for r in it {
        t = cross(&t, &table_ref(r, env)?);
    }
    t.name = None;
    Ok(t)
}

/// Rejects column references (outside subqueries) that resolve to a
/// column of `attrs` other than the grouping key.
pub fn check_grouped(e: &ValueExpr, attrs: &[Attribute], key: usize) -> Result<(), QueryError> {
    if let ValueExpr::Column(c) = e {
        if let Some(i) = resolve_in(attrs, c)? {
            if i != key {
                return Err(QueryError::Semantic(format!("`{c}` is not the GROUP BY column")));
            }
        }
    }
    for ch in e.children() {
        check_grouped(ch, attrs, key)?;
    }
    Ok(())
}

fn aggregate_input(s: &Select, t: &BagTable, env: &EvalEnv) -> Result<(BagTable, bool), QueryError> {
    match &s.items {
        SelectList::Star => Ok((t.clone(), true)),
        SelectList::Items(items) if items.len() == 1 => Ok((op_select(&s.items, t, env)?, false)),
        SelectList::Items(items) => Err(QueryError::Semantic(format!(
            "aggregate over {} expressions",
            items.len()
        ))),
    }
}

pub fn aggregate_attribute(f: AggFunc, items: &SelectList) -> Attribute {
    let inner = match items {
        SelectList::Star => "*".to_string(),
        SelectList::Items(items) => items.iter().map(print_expr).collect::<Vec<_>>().join(", "),
    };
    Attribute::computed(format!("{}({inner})", f.sql()))
}

fn run_select(s: &Select, env: &EvalEnv, trace: &mut Option<&mut Trace>) -> Result<BagTable, QueryError> {
    let mut t = from_table(s, env)?;
    record(trace, Stage::From, &t);
    if let Some(w) = &s.where_clause {
        t = op_where_having(w, t, env)?;
        record(trace, Stage::Where, &t);
    }
    let out = match (&s.group_by, s.aggregate()) {
        (None, agg) => {
            if s.having.is_some() {
                return Err(QueryError::Semantic("HAVING without GROUP BY".into()));
            }
            match agg {
                None => op_select(&s.items, &t, env)?,
                Some(f) => {
                    let (input, star) = aggregate_input(s, &t, env)?;
                    let v = op_aggregate(f, &input, star, env.opts)?;
                    BagTable::new(vec![aggregate_attribute(f, &s.items)], vec![vec![v]])
                }
            }
        }
        (Some(key), agg) => {
            let grouped = op_group_by(key, &t)?;
            record(trace, Stage::GroupBy, &t);
            let k = grouped.key_index;
            if let Some(h) = &s.having {
                check_grouped(h, &t.attributes, k)?;
            }
            if agg.is_none() {
                match &s.items {
                    SelectList::Star => {
                        return Err(QueryError::Semantic("SELECT * with GROUP BY".into()));
                    }
                    SelectList::Items(items) => {
                        for e in items {
                            check_grouped(e, &t.attributes, k)?;
                        }
                    }
                }
            }
            let mut kept = Vec::new();
            for (_, g) in grouped.groups {
                let keep = match &s.having {
                    Some(h) => holds(h, &env.push(&g.attributes, &g.rows[0]))?,
                    None => true,
                };
                if keep {
                    kept.push(g);
                }
            }
            if let Some(tr) = trace {
                let rows = kept.iter().flat_map(|g| g.rows.iter().cloned()).collect();
                tr.stages.push((Stage::Having, BagTable::new(t.attributes.clone(), rows)));
            }
            match agg {
                Some(f) => {
                    let mut rows = Vec::new();
                    for g in &kept {
                        let (input, star) = aggregate_input(s, g, env)?;
                        rows.push(vec![op_aggregate(f, &input, star, env.opts)?]);
                    }
                    BagTable::new(vec![aggregate_attribute(f, &s.items)], rows)
                }
                None => {
                    let firsts = BagTable::new(
                        t.attributes.clone(),
                        kept.iter().map(|g| g.rows[0].clone()).collect(),
                    );
                    op_select(&s.items, &firsts, env)?
                }
            }
        }
    };
    record(trace, Stage::Select, &out);
    let out = op_filter(s.modifier == Some(SelectModifier::Distinct), out);
    if s.modifier.is_some() && s.aggregate().is_none() {
        record(trace, Stage::Filter, &out);
    }
    Ok(out)
}
