//! The thirteen mutation rules. Keyword-level rules (01–06) replace, add
//! or delete operators and clause keywords within one family; rule-level
//! rules (07–10) change constants and parameters; subquery-level rules
//! (11–13) replace, add or delete subqueries and whole clauses.

use std::fmt;
use std::str::FromStr;

use sqlsem_core::ast::*;

use crate::build::QueryGen;
use crate::check::validate;
use crate::sites::{self, from_columns, Ctx, Site, Slot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Keyword,
    Rule,
    Subquery,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MutationRule {
    ReplaceOperators,
    ReplaceKeywords,
    AddOperators,
    AddKeywords,
    DeleteOperators,
    DeleteKeywords,
    ConstantsToColumns,
    ChangeDataTypes,
    AddParameters,
    DeleteParameters,
    ReplaceSubqueries,
    AddSubqueries,
    DeleteSubqueries,
}

impl MutationRule {
    pub const ALL: [MutationRule; 13] = [
        MutationRule::ReplaceOperators,
        MutationRule::ReplaceKeywords,
        MutationRule::AddOperators,
        MutationRule::AddKeywords,
        MutationRule::DeleteOperators,
        MutationRule::DeleteKeywords,
        MutationRule::ConstantsToColumns,
        MutationRule::ChangeDataTypes,
        MutationRule::AddParameters,
        MutationRule::DeleteParameters,
        MutationRule::ReplaceSubqueries,
        MutationRule::AddSubqueries,
        MutationRule::DeleteSubqueries,
    ];

    /// 1-based table identifier.
    pub fn id(self) -> u8 {
        Self::ALL.iter().position(|r| *r == self).expect("listed") as u8 + 1
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.get((id as usize).checked_sub(1)?).copied()
    }

    pub fn level(self) -> Level {
        match self.id() {
            1..=6 => Level::Keyword,
            7..=10 => Level::Rule,
            _ => Level::Subquery,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            MutationRule::ReplaceOperators => "replace operators",
            MutationRule::ReplaceKeywords => "replace keywords",
            MutationRule::AddOperators => "add operators",
            MutationRule::AddKeywords => "add keywords",
            MutationRule::DeleteOperators => "delete operators",
            MutationRule::DeleteKeywords => "delete keywords",
            MutationRule::ConstantsToColumns => "convert constants to column references",
            MutationRule::ChangeDataTypes => "change parameter data types",
            MutationRule::AddParameters => "add parameters",
            MutationRule::DeleteParameters => "delete parameters",
            MutationRule::ReplaceSubqueries => "replace subqueries",
            MutationRule::AddSubqueries => "add subqueries",
            MutationRule::DeleteSubqueries => "delete subqueries",
        }
    }

    fn kinds(self) -> &'static [Kind] {
        match self {
            MutationRule::ReplaceOperators => &R01,
            MutationRule::ReplaceKeywords => &R02,
            MutationRule::AddOperators => &R03,
            MutationRule::AddKeywords => &R04,
            MutationRule::DeleteOperators => &R05,
            MutationRule::DeleteKeywords => &R06,
            MutationRule::ConstantsToColumns => &R07,
            MutationRule::ChangeDataTypes => &R08,
            MutationRule::AddParameters => &R09,
            MutationRule::DeleteParameters => &R10,
            MutationRule::ReplaceSubqueries => &R11,
            MutationRule::AddSubqueries => &R12,
            MutationRule::DeleteSubqueries => &R13,
        }
    }
}

impl fmt::Display for MutationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}", self.id())
    }
}

impl FromStr for MutationRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.parse::<u8>()
            .ok()
            .and_then(MutationRule::from_id)
            .ok_or_else(|| format!("unknown mutation rule `{s}`"))
    }
}

type Pred = fn(&Site<'_>, &Ctx, &QueryGen) -> bool;
type Apply = fn(Site<'_>, &Ctx, &mut QueryGen) -> bool;
type Kind = (Pred, Apply);

/// Number of sites where `rule` applies.
pub fn applicable_sites(q: &Query, rule: MutationRule, g: &QueryGen) -> usize {
    rule.kinds()
        .iter()
        .map(|(p, _)| sites::count(q, g.catalog, &mut |s, c| p(s, c, g)))
        .sum()
}

/// Applies `rule` at a uniformly chosen applicable site. Absent when the
/// rule has no site, leaves the query unchanged, or produces an invalid
/// query.
pub fn mutate(q: &Query, rule: MutationRule, g: &mut QueryGen) -> Option<Query> {
    let found: Vec<(usize, usize)> = rule
        .kinds()
        .iter()
        .enumerate()
        .flat_map(|(k, (p, _))| {
            sites::positions(q, g.catalog, &mut |s, c| p(s, c, g))
                .into_iter()
                .map(move |i| (k, i))
        })
        .collect();
    if found.is_empty() {
        return None;
    }
    let (kind, index) = found[g.below(found.len())];
    let apply = rule.kinds()[kind].1;
    let mut out = q.clone();
    let catalog = g.catalog;
    let changed = sites::apply_at(&mut out, catalog, index, &mut |s, c| apply(s, c, g));
    if !changed || out == *q || !validate(&out, catalog, g.cfg.join_mode).is_valid() {
        return None;
    }
    if !g.cfg.parenthesized_operands && has_parenthesized_operand(&out) {
        return None;
    }
    Some(out)
}

fn has_parenthesized_operand(q: &Query) -> bool {
    q.all_queries().into_iter().any(|q| match &q.body {
        QueryBody::SetOp { left, right, .. } => {
            left.order_by.is_some() || right.order_by.is_some() || right.as_select().is_none()
        }
        QueryBody::Select(_) => false,
    })
}

// ---- helpers --------------------------------------------------------------

fn expr<'s>(s: &'s Site<'_>) -> Option<&'s ValueExpr> {
    match s {
        Site::Expr(e) => Some(e),
        _ => None,
    }
}

fn select<'s>(s: &'s Site<'_>) -> Option<&'s Select> {
    match s {
        Site::Select(x) => Some(x),
        _ => None,
    }
}

fn query<'s>(s: &'s Site<'_>) -> Option<&'s Query> {
    match s {
        Site::Query(x) => Some(x),
        _ => None,
    }
}

fn other<T: PartialEq + Clone>(g: &mut QueryGen, xs: &[T], cur: &T) -> Option<T> {
    let alts: Vec<T> = xs.iter().filter(|x| *x != cur).cloned().collect();
    g.pick(&alts)
}

fn has_other<T: PartialEq>(xs: &[T], cur: &T) -> bool {
    xs.iter().any(|x| x != cur)
}

fn logical_ops(g: &QueryGen) -> Vec<LogicalOp> {
    let mut v = vec![LogicalOp::And, LogicalOp::Or];
    if g.cfg.xor {
        v.push(LogicalOp::Xor);
    }
    v
}

fn take(e: &mut ValueExpr) -> ValueExpr {
    std::mem::replace(e, ValueExpr::Null)
}

fn first_join(s: &Select) -> Option<&JoinedTable> {
    s.from.iter().flatten().find_map(|r| match r {
        TableRef::Join(j) => Some(j),
        TableRef::Table(_) => None,
    })
}

fn first_join_mut(s: &mut Select) -> Option<&mut JoinedTable> {
    s.from.iter_mut().flatten().find_map(|r| match r {
        TableRef::Join(j) => Some(j),
        TableRef::Table(_) => None,
    })
}

fn unused_tables(s: &Select, g: &QueryGen) -> Vec<String> {
    let used = s.table_names();
    g.table_names().into_iter().filter(|t| !used.contains(&t.as_str())).collect()
}

/// Columns of the first block's FROM that the output exposes by name.
fn orderable(q: &Query, g: &QueryGen) -> Vec<ColumnRef> {
    let s = q.selects()[0];
    if s.aggregate().is_some() {
        return Vec::new();
    }
    let local = from_columns(g.catalog, s);
    match &s.items {
        SelectList::Star => local,
        SelectList::Items(items) => items
            .iter()
            .filter_map(|e| match e {
                ValueExpr::Column(c) if local.contains(c) => Some(c.clone()),
                _ => None,
            })
            .collect(),
    }
}

fn can_nest(c: &Ctx, g: &QueryGen) -> bool {
    g.cfg.subqueries && c.depth < g.cfg.max_subquery_depth && g.has_tables()
}

fn small_depth(g: &QueryGen) -> usize {
    g.cfg.max_expr_depth.min(2)
}

// ---- 01 replace operators -------------------------------------------------

static R01: [Kind; 8] = [
    (
        |s, _, _| matches!(expr(s), Some(ValueExpr::Logical { .. })),
        |s, _, g| {
            let Site::Expr(ValueExpr::Logical { op, .. }) = s else { return false };
            match other(g, &logical_ops(g), op) {
                Some(n) => {
                    *op = n;
                    true
                }
                None => false,
            }
        },
    ),
    (
        |s, _, _| matches!(expr(s), Some(ValueExpr::Compare { .. })),
        |s, _, g| {
            let Site::Expr(ValueExpr::Compare { op, .. }) = s else { return false };
            *op = other(g, &CompareOp::ALL, op).expect("six operators");
            true
        },
    ),
    (
        |s, _, g| matches!(expr(s), Some(ValueExpr::Arith { op, .. }) if has_other(&g.cfg.arith, op)),
        |s, _, g| {
            let Site::Expr(ValueExpr::Arith { op, .. }) = s else { return false };
            *op = other(g, &g.cfg.arith.clone(), op).expect("checked");
            true
        },
    ),
    (
        |s, _, g| matches!(expr(s), Some(ValueExpr::Is { test, .. }) if has_other(&g.cfg.is_tests, test)),
        |s, _, g| {
            let Site::Expr(ValueExpr::Is { test, .. }) = s else { return false };
            *test = other(g, &g.cfg.is_tests.clone(), test).expect("checked");
            true
        },
    ),
    (
        |s, _, g| {
            matches!(expr(s), Some(ValueExpr::Func { func, .. })
                if g.cfg.funcs.iter().any(|f| f != func && f.arity() == func.arity()))
        },
        |s, _, g| {
            let Site::Expr(ValueExpr::Func { func, .. }) = s else { return false };
            let same: Vec<Func> = g.cfg.funcs.iter().copied().filter(|f| f.arity() == func.arity()).collect();
            *func = other(g, &same, func).expect("checked");
            true
        },
    ),
    (
        |s, _, g| matches!(select(s).and_then(|x| x.aggregate()), Some(f) if has_other(&g.cfg.aggregates, &f)),
        |s, _, g| {
            let Site::Select(sel) = s else { return false };
            let f = sel.aggregate().expect("checked");
            let n = other(g, &g.cfg.aggregates.clone(), &f).expect("checked");
            sel.modifier = Some(SelectModifier::Aggregate(n));
            true
        },
    ),
    (
        |s, _, g| matches!(query(s).map(|q| &q.body), Some(QueryBody::SetOp { op, .. }) if has_other(&g.cfg.set_ops, op)),
        |s, _, g| {
            let Site::Query(Query {
                body: QueryBody::SetOp { op, .. },
                ..
            }) = s
            else {
                return false;
            };
            *op = other(g, &g.cfg.set_ops.clone(), op).expect("checked");
            true
        },
    ),
    (
        |s, _, g| {
            select(s).and_then(first_join).is_some_and(|j| {
                g.cfg.joins.iter().any(|k| *k != j.kind && k.is_qualified() == j.kind.is_qualified())
            })
        },
        |s, _, g| {
            let Site::Select(sel) = s else { return false };
            let j = first_join_mut(sel).expect("checked");
            let same: Vec<JoinKind> =
                g.cfg.joins.iter().copied().filter(|k| k.is_qualified() == j.kind.is_qualified()).collect();
            j.kind = other(g, &same, &j.kind).expect("checked");
            true
        },
    ),
];

// ---- 02 replace keywords --------------------------------------------------

static R02: [Kind; 6] = [
    // ORDER BY c -> GROUP BY c
    (
        |s, _, g| {
            g.cfg.group_by
                && matches!(query(s), Some(q) if q.order_by.is_some()
                    && matches!(&q.body, QueryBody::Select(sel) if sel.group_by.is_none()))
        },
        |s, _, _| {
            let Site::Query(q) = s else { return false };
            let col = q.order_by.take().expect("checked").column;
            let QueryBody::Select(sel) = &mut q.body else { return false };
            sel.group_by = Some(col);
            true
        },
    ),
    // GROUP BY c -> ORDER BY c
    (
        |s, _, g| {
            g.cfg.order_by
                && matches!(query(s), Some(q) if q.order_by.is_none()
                    && matches!(&q.body, QueryBody::Select(sel) if sel.group_by.is_some() && sel.having.is_none()))
        },
        |s, _, g| {
            let Site::Query(q) = s else { return false };
            let QueryBody::Select(sel) = &mut q.body else { return false };
            let col = sel.group_by.take().expect("checked");
            let direction = if g.chance(0.5) { Direction::Asc } else { Direction::Desc };
            q.order_by = Some(OrderBy { column: col, direction });
            true
        },
    ),
    (
        |s, _, _| matches!(query(s), Some(q) if q.order_by.is_some()),
        |s, _, _| {
            let Site::Query(q) = s else { return false };
            let o = q.order_by.as_mut().expect("checked");
            o.direction = match o.direction {
                Direction::Asc => Direction::Desc,
                Direction::Desc => Direction::Asc,
            };
            true
        },
    ),
    (
        |s, _, _| {
            matches!(
                select(s).and_then(|x| x.modifier),
                Some(SelectModifier::Distinct | SelectModifier::All)
            )
        },
        |s, _, _| {
            let Site::Select(sel) = s else { return false };
            sel.modifier = match sel.modifier {
                Some(SelectModifier::Distinct) => Some(SelectModifier::All),
                _ => Some(SelectModifier::Distinct),
            };
            true
        },
    ),
    (
        |s, _, _| {
            matches!(
                expr(s),
                Some(
                    ValueExpr::Between { .. }
                        | ValueExpr::InList { .. }
                        | ValueExpr::InSubquery { .. }
                        | ValueExpr::Is { .. }
                )
            )
        },
        |s, _, _| {
            let Site::Expr(e) = s else { return false };
            match e {
                ValueExpr::Between { negated, .. }
                | ValueExpr::InList { negated, .. }
                | ValueExpr::InSubquery { negated, .. }
                | ValueExpr::Is { negated, .. } => {
                    *negated = !*negated;
                    true
                }
                _ => false,
            }
        },
    ),
    // WHERE <-> HAVING in grouped blocks
    (
        |s, _, _| select(s).is_some_and(|x| x.group_by.is_some() && (x.where_clause.is_some() != x.having.is_some())),
        |s, _, _| {
            let Site::Select(sel) = s else { return false };
            std::mem::swap(&mut sel.where_clause, &mut sel.having);
            true
        },
    ),
];

// ---- 03 add operators -----------------------------------------------------

static R03: [Kind; 1] = [(|s, _, _| expr(s).is_some(), |s, c, g| {
    let Site::Expr(e) = s else { return false };
    let inner = take(e);
    *e = wrap(inner, c, g);
    true
})];

fn wrap(inner: ValueExpr, c: &Ctx, g: &mut QueryGen) -> ValueExpr {
    let b = Box::new(inner.clone());
    loop {
        let choice = g.below(12);
        let out = match choice {
            0 => ValueExpr::Not(b.clone()),
            1 => {
                let Some(test) = g.pick(&g.cfg.is_tests.clone()) else { continue };
                ValueExpr::Is {
                    expr: b.clone(),
                    negated: g.chance(0.5),
                    test,
                }
            }
            2 | 3 => {
                let Some(f) = g.pick(&g.cfg.funcs.clone()) else { continue };
                let mut args = vec![inner.clone()];
                if f.arity() == 2 {
                    let lit = g.int_literal();
                    if g.chance(0.5) || f == Func::Substring {
                        args.push(lit);
                    } else {
                        args.insert(0, lit);
                    }
                }
                ValueExpr::func(f, args)
            }
            4 => {
                let Some(op) = g.pick(&g.cfg.arith.clone()) else { continue };
                ValueExpr::Arith {
                    op,
                    left: b.clone(),
                    right: Box::new(g.leaf(&c.scope)),
                }
            }
            5 if g.cfg.concat => ValueExpr::Concat(b.clone(), Box::new(g.leaf(&c.scope))),
            6 => {
                let Some(to) = g.pick(&g.cfg.casts.clone()) else { continue };
                ValueExpr::Cast { expr: b.clone(), to }
            }
            7 if g.cfg.case => ValueExpr::Case {
                when: b.clone(),
                then: Box::new(g.leaf(&c.scope)),
                otherwise: Box::new(g.leaf(&c.scope)),
            },
            8 => ValueExpr::Compare {
                op: g.pick(&CompareOp::ALL).expect("non-empty"),
                left: b.clone(),
                right: Box::new(g.leaf(&c.scope)),
            },
            9 => ValueExpr::Between {
                expr: b.clone(),
                negated: g.chance(0.3),
                low: Box::new(g.leaf(&c.scope)),
                high: Box::new(g.leaf(&c.scope)),
            },
            10 => ValueExpr::InList {
                expr: b.clone(),
                negated: g.chance(0.3),
                list: (0..g.below(3) + 1).map(|_| g.leaf(&c.scope)).collect(),
            },
            11 => ValueExpr::Logical {
                op: g.pick(&logical_ops(g)).expect("non-empty"),
                left: b.clone(),
                right: Box::new(g.cond(&c.scope, 1, c.depth)),
            },
            _ => continue,
        };
        return out;
    }
}

// ---- 04 add keywords ------------------------------------------------------

static R04: [Kind; 7] = [
    (
        |s, _, g| g.cfg.order_by && matches!(query(s), Some(q) if q.order_by.is_none() && !orderable(q, g).is_empty()),
        |s, _, g| {
            let Site::Query(q) = s else { return false };
            let cols = orderable(q, g);
            let column = g.pick(&cols).expect("checked");
            let direction = if g.chance(0.5) { Direction::Asc } else { Direction::Desc };
            q.order_by = Some(OrderBy { column, direction });
            true
        },
    ),
    (
        |s, _, _| select(s).is_some_and(|x| x.modifier.is_none()),
        |s, _, g| {
            let Site::Select(sel) = s else { return false };
            let aggs = g.cfg.aggregates.clone();
            sel.modifier = match g.below(3) {
                0 => Some(SelectModifier::Distinct),
                1 => Some(SelectModifier::All),
                _ => match g.pick(&aggs) {
                    Some(f) => {
                        if sel.items == SelectList::Star && f != AggFunc::Count {
                            let cols = from_columns(g.catalog, sel);
                            sel.items = SelectList::Items(vec![match g.pick(&cols) {
                                Some(c) => ValueExpr::Column(c),
                                None => g.int_literal(),
                            }]);
                        }
                        Some(SelectModifier::Aggregate(f))
                    }
                    None => Some(SelectModifier::Distinct),
                },
            };
            true
        },
    ),
    (
        |s, c, g| g.cfg.group_by && select(s).is_some_and(|x| x.group_by.is_none()) && !c.local.is_empty(),
        |s, c, g| {
            let Site::Select(sel) = s else { return false };
            let key = g.pick(&c.local).expect("checked");
            if sel.aggregate().is_none() {
                sel.items = SelectList::Items(vec![ValueExpr::Column(key.clone())]);
            }
            sel.group_by = Some(key);
            true
        },
    ),
    (
        |s, _, _| select(s).is_some_and(|x| x.group_by.is_some() && x.having.is_none()),
        |s, c, g| {
            let Site::Select(sel) = s else { return false };
            let mut scope = c.outer.clone();
            scope.push(sel.group_by.clone().expect("checked"));
            sel.having = Some(g.cond(&scope, small_depth(g), c.depth));
            true
        },
    ),
    (
        |s, _, _| select(s).is_some_and(|x| x.where_clause.is_none()),
        |s, c, g| {
            let Site::Select(sel) = s else { return false };
            sel.where_clause = Some(g.cond(&c.scope, small_depth(g), c.depth));
            true
        },
    ),
    // FROM t -> FROM t <join> u
    (
        |s, _, g| {
            !g.cfg.joins.is_empty()
                && select(s).is_some_and(|x| {
                    x.from.iter().flatten().any(|r| matches!(r, TableRef::Table(_))) && !unused_tables(x, g).is_empty()
                })
        },
        |s, c, g| {
            let Site::Select(sel) = s else { return false };
            let right = g.pick(&unused_tables(sel, g)).expect("checked");
            let kind = g.pick(&g.cfg.joins.clone()).expect("checked");
            let refs = sel.from.as_mut().expect("checked");
            let plain: Vec<usize> = (0..refs.len()).filter(|i| matches!(refs[*i], TableRef::Table(_))).collect();
            let i = plain[g.below(plain.len())];
            let TableRef::Table(left) = refs[i].clone() else { return false };
            let on = if kind.is_qualified() {
                let mut scope = c.outer.clone();
                scope.extend(g.columns_of(&left));
                scope.extend(g.columns_of(&right));
                Some(g.cond(&scope, small_depth(g), c.depth))
            } else {
                None
            };
            refs[i] = TableRef::Join(JoinedTable { kind, left, right, on });
            true
        },
    ),
    // Q -> Q <set op> S
    (
        |s, _, g| !g.cfg.set_ops.is_empty() && query(s).is_some(),
        |s, c, g| {
            let Site::Query(q) = s else { return false };
            let width = crate::build::output_width(q, g.catalog, g.cfg.join_mode);
            if width == 0 {
                return false;
            }
            let right = g.block(&c.outer, c.depth, Some(width), true).select;
            let op = g.pick(&g.cfg.set_ops.clone()).expect("checked");
            let order = q.order_by.take();
            let left = std::mem::replace(q, Query::select(Select::simple(SelectList::Star, Vec::new())));
            *q = Query::set_op(op, left, Query::select(right));
            q.order_by = order;
            true
        },
    ),
];

// ---- 05 delete operators --------------------------------------------------

static R05: [Kind; 1] = [(
    |s, _, _| expr(s).is_some_and(|e| !e.children().is_empty()),
    |s, _, g| {
        let Site::Expr(e) = s else { return false };
        let kids: Vec<ValueExpr> = e.children().into_iter().cloned().collect();
        *e = kids[g.below(kids.len())].clone();
        true
    },
)];

// ---- 06 delete keywords ---------------------------------------------------

static R06: [Kind; 6] = [
    (
        |s, _, _| query(s).is_some_and(|q| q.order_by.is_some()),
        |s, _, _| {
            let Site::Query(q) = s else { return false };
            q.order_by = None;
            true
        },
    ),
    (
        |s, _, _| matches!(query(s).map(|q| &q.body), Some(QueryBody::SetOp { .. })),
        |s, _, g| {
            let Site::Query(q) = s else { return false };
            let QueryBody::SetOp { left, right, .. } = &mut q.body else { return false };
            let keep = if g.chance(0.5) { take_query(left) } else { take_query(right) };
            let order = q.order_by.take();
            *q = keep;
            if q.order_by.is_none() {
                q.order_by = order;
            }
            true
        },
    ),
    (
        |s, _, _| select(s).is_some_and(|x| x.where_clause.is_some()),
        |s, _, _| {
            let Site::Select(sel) = s else { return false };
            sel.where_clause = None;
            true
        },
    ),
    (
        |s, _, _| select(s).is_some_and(|x| x.modifier.is_some()),
        |s, _, _| {
            let Site::Select(sel) = s else { return false };
            sel.modifier = None;
            true
        },
    ),
    (
        |s, _, _| select(s).is_some_and(|x| x.having.is_some()),
        |s, _, _| {
            let Site::Select(sel) = s else { return false };
            sel.having = None;
            true
        },
    ),
    (
        |s, _, _| select(s).and_then(first_join).is_some(),
        |s, _, g| {
            let Site::Select(sel) = s else { return false };
            let j = first_join(sel).expect("checked").clone();
            let keep = if g.chance(0.5) { j.left } else { j.right };
            for r in sel.from.iter_mut().flatten() {
                if matches!(r, TableRef::Join(_)) {
                    *r = TableRef::Table(keep);
                    break;
                }
            }
            true
        },
    ),
];

fn take_query(q: &mut Query) -> Query {
    std::mem::replace(q, Query::select(Select::simple(SelectList::Star, Vec::new())))
}

// ---- 07 constants to column references ------------------------------------

static R07: [Kind; 1] = [(
    |s, c, _| expr(s).is_some_and(|e| e.is_literal()) && !c.scope.is_empty(),
    |s, c, g| {
        let Site::Expr(e) = s else { return false };
        *e = ValueExpr::Column(g.pick(&c.scope).expect("checked"));
        true
    },
)];

// ---- 08 change parameter data types ---------------------------------------

static R08: [Kind; 2] = [
    (
        |s, _, _| expr(s).is_some_and(|e| e.is_literal()),
        |s, _, g| {
            let Site::Expr(e) = s else { return false };
            let strings = !g.cfg.strings.is_empty();
            *e = match e.clone() {
                ValueExpr::Int(i) if strings && g.chance(0.5) => ValueExpr::Str(i.to_string()),
                ValueExpr::Int(i) if g.cfg.floats => ValueExpr::Float(i as f64 + 0.5),
                ValueExpr::Int(i) => ValueExpr::Bool(i != 0),
                ValueExpr::Float(f) if strings && g.chance(0.5) => ValueExpr::Str(format!("{f}")),
                ValueExpr::Float(f) => ValueExpr::Int(f.trunc() as i64),
                ValueExpr::Str(s) => match sqlsem_core::value::str2num(&s) {
                    sqlsem_core::Value::Int(i) => ValueExpr::Int(i),
                    sqlsem_core::Value::Float(f) if g.cfg.floats => ValueExpr::Float(f),
                    _ => ValueExpr::Bool(!s.is_empty()),
                },
                ValueExpr::Bool(b) if strings && g.chance(0.5) => ValueExpr::Str(if b { "true" } else { "false" }.into()),
                ValueExpr::Bool(b) => ValueExpr::Int(b as i64),
                _ => g.int_literal(),
            };
            true
        },
    ),
    (
        |s, _, g| matches!(expr(s), Some(ValueExpr::Cast { to, .. }) if has_other(&g.cfg.casts, to)),
        |s, _, g| {
            let Site::Expr(ValueExpr::Cast { to, .. }) = s else { return false };
            *to = other(g, &g.cfg.casts.clone(), to).expect("checked");
            true
        },
    ),
];

// ---- 09 add parameters ----------------------------------------------------

static R09: [Kind; 3] = [
    // cond -> cond AND ABS(1)
    (
        |s, c, _| expr(s).is_some() && matches!(c.slot, Slot::Where | Slot::On | Slot::Having),
        |s, c, g| {
            let Site::Expr(e) = s else { return false };
            let extra = if g.chance(0.5) && !g.cfg.funcs.is_empty() {
                let f = g.pick(&g.cfg.funcs.clone()).expect("checked");
                let args = (0..f.arity()).map(|_| g.leaf(&c.scope)).collect();
                ValueExpr::func(f, args)
            } else {
                g.cond(&c.scope, 1, c.depth)
            };
            let op = g.pick(&logical_ops(g)).expect("non-empty");
            *e = ValueExpr::logical(op, take(e), extra);
            true
        },
    ),
    (
        |s, _, _| select(s).is_some_and(|x| x.aggregate().is_none() && matches!(x.items, SelectList::Items(_))),
        |s, c, g| {
            let Site::Select(sel) = s else { return false };
            let scope = match &sel.group_by {
                Some(k) => {
                    let mut v = c.outer.clone();
                    v.push(k.clone());
                    v
                }
                None => c.scope.clone(),
            };
            let e = g.expr(&scope, small_depth(g), c.depth);
            let SelectList::Items(items) = &mut sel.items else { return false };
            items.push(e);
            true
        },
    ),
    (
        |s, _, _| matches!(expr(s), Some(ValueExpr::InList { .. })),
        |s, c, g| {
            let Site::Expr(ValueExpr::InList { list, .. }) = s else { return false };
            list.push(g.leaf(&c.scope));
            true
        },
    ),
];

// ---- 10 delete parameters -------------------------------------------------

static R10: [Kind; 5] = [
    (
        |s, _, _| matches!(expr(s), Some(ValueExpr::Logical { .. })),
        |s, _, g| {
            let Site::Expr(e) = s else { return false };
            let ValueExpr::Logical { left, right, .. } = take(e) else { return false };
            *e = if g.chance(0.5) { *left } else { *right };
            true
        },
    ),
    (
        |s, _, _| matches!(select(s).map(|x| &x.items), Some(SelectList::Items(v)) if v.len() > 1),
        |s, _, g| {
            let Site::Select(Select {
                items: SelectList::Items(items),
                ..
            }) = s
            else {
                return false;
            };
            items.remove(g.below(items.len()));
            true
        },
    ),
    (
        |s, _, _| matches!(expr(s), Some(ValueExpr::InList { list, .. }) if list.len() > 1),
        |s, _, g| {
            let Site::Expr(ValueExpr::InList { list, .. }) = s else { return false };
            list.remove(g.below(list.len()));
            true
        },
    ),
    (
        |s, _, _| matches!(expr(s), Some(ValueExpr::Func { args, .. }) if !args.is_empty()),
        |s, _, g| {
            let Site::Expr(ValueExpr::Func { args, .. }) = s else { return false };
            args.remove(g.below(args.len()));
            true
        },
    ),
    (
        |s, _, _| select(s).is_some_and(|x| x.from.as_ref().is_some_and(|f| f.len() > 1)),
        |s, _, g| {
            let Site::Select(sel) = s else { return false };
            let refs = sel.from.as_mut().expect("checked");
            refs.remove(g.below(refs.len()));
            true
        },
    ),
];

// ---- 11 replace subqueries ------------------------------------------------

static R11: [Kind; 2] = [
    // WHERE c -> WHERE EXISTS (...)
    (
        |s, c, g| select(s).is_some_and(|x| x.where_clause.is_some()) && can_nest(c, g),
        |s, c, g| {
            let Site::Select(sel) = s else { return false };
            let sub = g.subquery(&c.scope, c.depth + 1, None);
            sel.where_clause = Some(ValueExpr::Exists(Box::new(sub)));
            true
        },
    ),
    (
        |s, _, _| {
            matches!(
                expr(s),
                Some(ValueExpr::Exists(_) | ValueExpr::InSubquery { .. } | ValueExpr::Subquery(_))
            )
        },
        |s, c, g| {
            let Site::Expr(e) = s else { return false };
            let d = c.depth + 1;
            match e {
                ValueExpr::Exists(q) => {
                    if g.chance(0.5) {
                        **q = g.subquery(&c.scope, d, None);
                    } else {
                        *e = ValueExpr::InSubquery {
                            expr: Box::new(g.leaf(&c.scope)),
                            negated: g.chance(0.3),
                            query: Box::new(g.subquery(&c.scope, d, Some(1))),
                        };
                    }
                }
                ValueExpr::InSubquery { query, .. } => **query = g.subquery(&c.scope, d, Some(1)),
                ValueExpr::Subquery(q) => **q = g.scalar_subquery(&c.scope, d),
                _ => return false,
            }
            true
        },
    ),
];

// ---- 12 add subqueries / IN lists -----------------------------------------

static R12: [Kind; 2] = [
    (
        |s, _, _| expr(s).is_some(),
        |s, c, g| {
            let Site::Expr(e) = s else { return false };
            let nest = can_nest(c, g);
            let d = c.depth + 1;
            let inner = take(e);
            *e = match g.below(4) {
                0 if nest => ValueExpr::InSubquery {
                    expr: Box::new(inner),
                    negated: g.chance(0.3),
                    query: Box::new(g.subquery(&c.scope, d, Some(1))),
                },
                1 if nest => ValueExpr::logical(
                    LogicalOp::And,
                    inner,
                    ValueExpr::Exists(Box::new(g.subquery(&c.scope, d, None))),
                ),
                2 if nest && !inner.children().is_empty() => ValueExpr::compare(
                    g.pick(&CompareOp::ALL).expect("non-empty"),
                    inner,
                    ValueExpr::Subquery(Box::new(g.scalar_subquery(&c.scope, d))),
                ),
                2 if nest => ValueExpr::Subquery(Box::new(g.scalar_subquery(&c.scope, d))),
                _ => ValueExpr::InList {
                    expr: Box::new(inner),
                    negated: g.chance(0.3),
                    list: (0..g.below(3) + 1).map(|_| g.leaf(&c.scope)).collect(),
                },
            };
            true
        },
    ),
    // FROM t -> FROM t, u
    (
        |s, _, g| select(s).is_some_and(|x| x.from.is_some() && !unused_tables(x, g).is_empty()),
        |s, _, g| {
            let Site::Select(sel) = s else { return false };
            let t = g.pick(&unused_tables(sel, g)).expect("checked");
            sel.from.as_mut().expect("checked").push(TableRef::Table(t));
            true
        },
    ),
];

// ---- 13 delete subqueries / clauses ---------------------------------------

static R13: [Kind; 2] = [
    // drop GROUP BY ... HAVING
    (
        |s, _, _| select(s).is_some_and(|x| x.group_by.is_some()),
        |s, _, _| {
            let Site::Select(sel) = s else { return false };
            sel.group_by = None;
            sel.having = None;
            true
        },
    ),
    (
        |s, _, _| {
            matches!(
                expr(s),
                Some(ValueExpr::Exists(_) | ValueExpr::InSubquery { .. } | ValueExpr::Subquery(_))
            )
        },
        |s, c, g| {
            let Site::Expr(e) = s else { return false };
            *e = match take(e) {
                ValueExpr::InSubquery { expr, .. } => *expr,
                ValueExpr::Exists(_) => ValueExpr::Bool(g.chance(0.5)),
                _ => g.leaf(&c.scope),
            };
            true
        },
    ),
];
