//! Random grammar-directed construction of queries, expressions and
//! constants.

use rand::seq::IndexedRandom;
use rand::RngExt;
use rand_chacha::ChaCha8Rng;

use sqlsem_core::ast::*;
use sqlsem_core::table::Catalog;
use sqlsem_core::validate::output_attributes;
use sqlsem_core::JoinMode;

use crate::config::GenConfig;

pub type GenRng = ChaCha8Rng;

/// Columns visible at some point of a query. Every reference is qualified,
/// and one `SELECT` block never names the same table twice, so qualified
/// references cannot be ambiguous.
pub type Scope = Vec<ColumnRef>;

pub struct QueryGen<'a> {
    pub catalog: &'a Catalog,
    pub cfg: &'a GenConfig,
    pub rng: &'a mut GenRng,
    tables: Vec<(String, Vec<String>)>,
}

/// A generated `SELECT` block plus the local columns its output exposes
/// by name (for ORDER BY).
pub struct Block {
    pub select: Select,
    pub orderable: Vec<ColumnRef>,
}

impl<'a> QueryGen<'a> {
    pub fn new(catalog: &'a Catalog, cfg: &'a GenConfig, rng: &'a mut GenRng) -> Self {
        let tables = catalog
            .tables
            .iter()
            .filter(|(_, t)| t.arity() > 0)
            .map(|(n, t)| (n.clone(), t.attributes.iter().map(|a| a.name.clone()).collect()))
            .collect();
        QueryGen {
            catalog,
            cfg,
            rng,
            tables,
        }
    }

    pub fn has_tables(&self) -> bool {
        !self.tables.is_empty()
    }

    pub fn table_names(&self) -> Vec<String> {
        self.tables.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn columns_of(&self, table: &str) -> Vec<ColumnRef> {
        self.tables
            .iter()
            .find(|(n, _)| n == table)
            .map(|(n, cols)| cols.iter().map(|c| ColumnRef::new(n.as_str(), c.as_str())).collect())
            .unwrap_or_default()
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn pick<T: Clone>(&mut self, xs: &[T]) -> Option<T> {
        xs.choose(self.rng).cloned()
    }

    // ---- constants -------------------------------------------------------

    pub fn literal(&mut self) -> ValueExpr {
        let strings = !self.cfg.strings.is_empty();
        match self.below(10) {
            0 => ValueExpr::Null,
            1 => ValueExpr::Bool(self.chance(0.5)),
            2 | 3 if strings => {
                let s = self.pick(&self.cfg.strings.clone()).unwrap_or("");
                ValueExpr::Str(s.to_string())
            }
            4 if self.cfg.floats => self.float_literal(),
            _ => ValueExpr::Int(self.rng.random_range(-5..=10)),
        }
    }

    pub fn float_literal(&mut self) -> ValueExpr {
        let cents: i64 = self.rng.random_range(-500..=1000);
        ValueExpr::Float(cents as f64 / 100.0)
    }

    pub fn int_literal(&mut self) -> ValueExpr {
        ValueExpr::Int(self.rng.random_range(-5..=10))
    }

    pub fn leaf(&mut self, scope: &[ColumnRef]) -> ValueExpr {
        if !scope.is_empty() && self.chance(0.55) {
            ValueExpr::Column(self.pick(scope).expect("non-empty scope"))
        } else {
            self.literal()
        }
    }

    // ---- expressions -----------------------------------------------------

    /// Any value expression.
    pub fn expr(&mut self, scope: &[ColumnRef], depth: usize, sq: usize) -> ValueExpr {
        if depth == 0 || self.chance(0.3) {
            return self.leaf(scope);
        }
        let d = depth - 1;
        match self.below(8) {
            0 if !self.cfg.arith.is_empty() => {
                let op = self.pick(&self.cfg.arith.clone()).expect("non-empty");
                ValueExpr::arith(op, self.expr(scope, d, sq), self.expr(scope, d, sq))
            }
            1 if self.cfg.concat => {
                ValueExpr::Concat(Box::new(self.expr(scope, d, sq)), Box::new(self.expr(scope, d, sq)))
            }
            2 | 3 if !self.cfg.funcs.is_empty() => {
                let f = self.pick(&self.cfg.funcs.clone()).expect("non-empty");
                self.call(f, scope, d, sq)
            }
            4 if self.cfg.case => ValueExpr::Case {
                when: Box::new(self.cond(scope, d, sq)),
                then: Box::new(self.expr(scope, d, sq)),
                otherwise: Box::new(self.expr(scope, d, sq)),
            },
            5 if !self.cfg.casts.is_empty() => ValueExpr::Cast {
                expr: Box::new(self.expr(scope, d, sq)),
                to: self.pick(&self.cfg.casts.clone()).expect("non-empty"),
            },
            6 if self.subqueries_allowed(sq) && self.chance(0.3) => {
                ValueExpr::Subquery(Box::new(self.scalar_subquery(scope, sq + 1)))
            }
            7 => self.cond(scope, depth, sq),
            _ => self.leaf(scope),
        }
    }

    pub fn call(&mut self, f: Func, scope: &[ColumnRef], depth: usize, sq: usize) -> ValueExpr {
        let args = (0..f.arity()).map(|_| self.expr(scope, depth, sq)).collect();
        ValueExpr::func(f, args)
    }

    /// A boolean-valued expression, for WHERE, ON, HAVING and CASE WHEN.
    pub fn cond(&mut self, scope: &[ColumnRef], depth: usize, sq: usize) -> ValueExpr {
        if depth == 0 || self.chance(0.15) {
            return self.leaf(scope);
        }
        let d = depth - 1;
        match self.below(12) {
            0..=3 => {
                let op = self.pick(&CompareOp::ALL).expect("non-empty");
                ValueExpr::compare(op, self.expr(scope, d, sq), self.expr(scope, d, sq))
            }
            4 | 5 => {
                let mut ops = vec![LogicalOp::And, LogicalOp::Or];
                if self.cfg.xor {
                    ops.push(LogicalOp::Xor);
                }
                let op = self.pick(&ops).expect("non-empty");
                ValueExpr::logical(op, self.cond(scope, d, sq), self.cond(scope, d, sq))
            }
            6 => ValueExpr::Not(Box::new(self.cond(scope, d, sq))),
            7 => {
                let e = self.expr(scope, d, sq);
                self.is_test(e)
            }
            8 => ValueExpr::Between {
                expr: Box::new(self.expr(scope, d, sq)),
                negated: self.chance(0.3),
                low: Box::new(self.expr(scope, d, sq)),
                high: Box::new(self.expr(scope, d, sq)),
            },
            9 => {
                let n = self.rng.random_range(1..=3);
                ValueExpr::InList {
                    expr: Box::new(self.expr(scope, d, sq)),
                    negated: self.chance(0.3),
                    list: (0..n).map(|_| self.leaf(scope)).collect(),
                }
            }
            10 if self.subqueries_allowed(sq) => ValueExpr::InSubquery {
                expr: Box::new(self.expr(scope, d, sq)),
                negated: self.chance(0.3),
                query: Box::new(self.subquery(scope, sq + 1, Some(1))),
            },
            11 if self.subqueries_allowed(sq) => ValueExpr::Exists(Box::new(self.subquery(scope, sq + 1, None))),
            _ => ValueExpr::compare(CompareOp::Eq, self.leaf(scope), self.leaf(scope)),
        }
    }

    pub fn is_test(&mut self, e: ValueExpr) -> ValueExpr {
        let Some(test) = self.pick(&self.cfg.is_tests.clone()) else {
            return ValueExpr::Not(Box::new(e));
        };
        ValueExpr::Is {
            expr: Box::new(e),
            negated: self.chance(0.5),
            test,
        }
    }

    fn subqueries_allowed(&self, sq: usize) -> bool {
        self.cfg.subqueries && sq < self.cfg.max_subquery_depth && self.has_tables()
    }

    // ---- queries ---------------------------------------------------------

    /// A complete top-level query.
    pub fn query(&mut self) -> Query {
        self.query_in(&[], 0, None)
    }

    /// A query nested in an expression at subquery depth `sq`.
    pub fn subquery(&mut self, outer: &[ColumnRef], sq: usize, arity: Option<usize>) -> Query {
        self.query_in(outer, sq, arity)
    }

    /// A single-row, single-column subquery: an ungrouped aggregate.
    pub fn scalar_subquery(&mut self, outer: &[ColumnRef], sq: usize) -> Query {
        let mut b = self.block(outer, sq, Some(1), false);
        if b.select.aggregate().is_none() {
            let f = self.pick(&self.cfg.aggregates.clone()).unwrap_or(AggFunc::Count);
            b.select.group_by = None;
            b.select.having = None;
            if b.select.items == SelectList::Star && f != AggFunc::Count {
                b.select.items = SelectList::Items(vec![self.int_literal()]);
            }
            b.select.modifier = Some(SelectModifier::Aggregate(f));
        }
        Query::select(b.select)
    }

    fn query_in(&mut self, outer: &[ColumnRef], sq: usize, arity: Option<usize>) -> Query {
        let first = self.block(outer, sq, arity, true);
        let orderable = first.orderable.clone();
        let mut q = Query::select(first.select);
        if !self.cfg.set_ops.is_empty() && self.chance(if sq == 0 { 0.2 } else { 0.08 }) {
            let width = output_width(&q, self.catalog, self.cfg.join_mode);
            let rounds = if self.chance(0.2) { 2 } else { 1 };
            for _ in 0..rounds {
                let right = self.block(outer, sq, Some(width), true);
                let op = self.pick(&self.cfg.set_ops.clone()).expect("non-empty");
                q = Query::set_op(op, q, Query::select(right.select));
            }
        }
        if self.cfg.order_by && !orderable.is_empty() && self.chance(if sq == 0 { 0.25 } else { 0.05 }) {
            q.order_by = Some(OrderBy {
                column: self.pick(&orderable).expect("non-empty"),
                direction: if self.chance(0.5) { Direction::Asc } else { Direction::Desc },
            });
        }
        q
    }

    /// FROM clause over distinct tables; returns the references and the
    /// columns they bring into scope.
    pub fn from_clause(&mut self, outer: &[ColumnRef], sq: usize) -> (Vec<TableRef>, Scope) {
        let mut names = self.table_names();
        let mut refs = Vec::new();
        let mut local = Vec::new();
        let want = match self.below(10) {
            0..=5 => 1,
            6..=8 => 2,
            _ => 3,
        };
        let mut count = 0;
        while count < want && !names.is_empty() {
            let i = self.below(names.len());
            let left = names.swap_remove(i);
            count += 1;
            if !names.is_empty() && count < want && !self.cfg.joins.is_empty() && self.chance(0.6) {
                let j = self.below(names.len());
                let right = names.swap_remove(j);
                count += 1;
                let kind = self.pick(&self.cfg.joins.clone()).expect("non-empty");
                let mut cols = self.columns_of(&left);
                cols.extend(self.columns_of(&right));
                let on = if kind.is_qualified() {
                    let mut scope = outer.to_vec();
                    scope.extend(cols.iter().cloned());
                    Some(self.join_condition(&left, &right, &scope, sq))
                } else {
                    None
                };
                local.extend(cols);
                refs.push(TableRef::Join(JoinedTable { kind, left, right, on }));
            } else {
                local.extend(self.columns_of(&left));
                refs.push(TableRef::Table(left));
            }
        }
        (refs, local)
    }

    fn join_condition(&mut self, left: &str, right: &str, scope: &[ColumnRef], sq: usize) -> ValueExpr {
        let l = self.columns_of(left);
        let r = self.columns_of(right);
        if self.chance(0.6) {
            let a = self.pick(&l).expect("tables have columns");
            let b = self.pick(&r).expect("tables have columns");
            ValueExpr::compare(CompareOp::Eq, ValueExpr::Column(a), ValueExpr::Column(b))
        } else {
            let d = self.cfg.max_expr_depth.min(2);
            self.cond(scope, d, sq)
        }
    }

    /// One `SELECT` block producing exactly `arity` columns when given.
    pub fn block(&mut self, outer: &[ColumnRef], sq: usize, arity: Option<usize>, allow_group: bool) -> Block {
        let depth = self.cfg.max_expr_depth;
        let from_less = !self.has_tables() || (self.cfg.from_less && self.chance(0.08));
        let (from, local) = if from_less {
            (None, Vec::new())
        } else {
            let (refs, local) = self.from_clause(outer, sq);
            (Some(refs), local)
        };
        let mut scope = outer.to_vec();
        scope.extend(local.iter().cloned());

        let where_clause = if self.chance(0.5) {
            Some(self.cond(&scope, depth, sq))
        } else {
            None
        };

        let aggregate = if arity.is_none_or(|n| n == 1) && !self.cfg.aggregates.is_empty() && self.chance(0.15) {
            self.pick(&self.cfg.aggregates.clone())
        } else {
            None
        };
        let grouped = allow_group && self.cfg.group_by && !local.is_empty() && self.chance(0.15);

        let mut s = Select {
            modifier: None,
            items: SelectList::Star,
            from,
            where_clause,
            group_by: None,
            having: None,
        };
        let mut orderable = Vec::new();
        let item_count = arity.unwrap_or_else(|| self.rng.random_range(1..=3));

        if let Some(f) = aggregate {
            s.modifier = Some(SelectModifier::Aggregate(f));
            s.items = if f == AggFunc::Count && self.chance(0.4) {
                SelectList::Star
            } else {
                SelectList::Items(vec![self.expr(&scope, depth.min(2), sq)])
            };
            if grouped {
                s.group_by = Some(self.pick(&local).expect("non-empty"));
            }
        } else if grouped {
            let key = self.pick(&local).expect("non-empty");
            let mut gscope = outer.to_vec();
            gscope.push(key.clone());
            let items = (0..item_count)
                .map(|_| {
                    if self.chance(0.5) {
                        ValueExpr::Column(key.clone())
                    } else {
                        self.expr(&gscope, depth.min(2), sq)
                    }
                })
                .collect::<Vec<_>>();
            orderable.extend(local_columns(&items, &local));
            s.items = SelectList::Items(items);
            if self.chance(0.5) {
                s.having = Some(self.cond(&gscope, depth.min(2), sq));
            }
            s.group_by = Some(key);
        } else {
            let star_width = local.len();
            if !local.is_empty() && arity.is_none_or(|n| n == star_width) && self.chance(0.15) {
                orderable.extend(local.iter().cloned());
            } else {
                let items = (0..item_count)
                    .map(|_| {
                        if !local.is_empty() && self.chance(0.4) {
                            ValueExpr::Column(self.pick(&local).expect("non-empty"))
                        } else {
                            self.expr(&scope, depth, sq)
                        }
                    })
                    .collect::<Vec<_>>();
                orderable.extend(local_columns(&items, &local));
                s.items = SelectList::Items(items);
            }
        }
        if s.aggregate().is_none() {
            s.modifier = match self.below(10) {
                0 | 1 => Some(SelectModifier::Distinct),
                2 => Some(SelectModifier::All),
                _ => None,
            };
        }
        Block { select: s, orderable }
    }
}

fn local_columns(items: &[ValueExpr], local: &[ColumnRef]) -> Vec<ColumnRef> {
    items
        .iter()
        .filter_map(|e| match e {
            ValueExpr::Column(c) if local.contains(c) => Some(c.clone()),
            _ => None,
        })
        .collect()
}

/// Number of output columns of `q`, or 0 when it does not resolve.
pub fn output_width(q: &Query, catalog: &Catalog, mode: JoinMode) -> usize {
    output_attributes(q, catalog, mode).map(|a| a.len()).unwrap_or(0)
}
