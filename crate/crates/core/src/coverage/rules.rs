//! Rule attribution from query shape.
//!
//! Each keyword dispatches on the shape of its inputs (all NULL literals, all
//! constants, all plain column references, a mix, or at least one compound
//! expression). A `(keyword, variant)` pair is one rule.

use std::collections::BTreeSet;
use std::fmt;

use crate::ast::*;
use crate::keyword::{expr_keyword, Keyword};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Null,
    Constant,
    Column,
    ColumnList,
    Mixed,
    Expression,
    Star,
    Subquery,
    SingleTable,
    MultiTable,
    Joined,
    Asc,
    Desc,
    Simple,
    Nested,
    Default,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Null => "null",
            Variant::Constant => "constant",
            Variant::Column => "column",
            Variant::ColumnList => "column-list",
            Variant::Mixed => "mixed",
            Variant::Expression => "expression",
            Variant::Star => "star",
            Variant::Subquery => "subquery",
            Variant::SingleTable => "single-table",
            Variant::MultiTable => "multi-table",
            Variant::Joined => "joined",
            Variant::Asc => "asc",
            Variant::Desc => "desc",
            Variant::Simple => "simple",
            Variant::Nested => "nested",
            Variant::Default => "default",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId {
    pub keyword: Keyword,
    pub variant: Variant,
}

impl RuleId {
    pub fn new(keyword: Keyword, variant: Variant) -> Self {
        RuleId { keyword, variant }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.keyword.ident(), self.variant.name())
    }
}

const OPERAND: [Variant; 4] = [Variant::Null, Variant::Constant, Variant::Column, Variant::Expression];
const OPERANDS: [Variant; 5] = [
    Variant::Null,
    Variant::Constant,
    Variant::Column,
    Variant::Mixed,
    Variant::Expression,
];

fn is_unary(kw: Keyword) -> bool {
    match kw {
        Keyword::Not | Keyword::Is { .. } | Keyword::Cast => true,
        Keyword::Func(f) => f.arity() == 1,
        _ => false,
    }
}

/// The rules a keyword can trigger.
pub fn variants(kw: Keyword) -> Vec<Variant> {
    use Variant::*;
    match kw {
        Keyword::Select => vec![Null, Constant, ColumnList, Star, Mixed, Expression],
        Keyword::From => vec![SingleTable, MultiTable, Joined],
        Keyword::Where | Keyword::Having | Keyword::On => OPERAND.to_vec(),
        Keyword::GroupBy => vec![Column],
        Keyword::OrderBy => vec![Asc, Desc],
        Keyword::Distinct | Keyword::All | Keyword::Join(_) => vec![Default],
        Keyword::Agg(AggFunc::Count) => vec![Star, Null, Constant, Column, Expression],
        Keyword::Agg(_) => OPERAND.to_vec(),
        Keyword::SetOp(_) => vec![Simple, Nested],
        Keyword::Exists => vec![Subquery],
        Keyword::In | Keyword::NotIn => {
            let mut v = OPERANDS.to_vec();
            v.push(Subquery);
            v
        }
        k if is_unary(k) => OPERAND.to_vec(),
        _ => OPERANDS.to_vec(),
    }
}

/// Every rule of the language, keyword by keyword.
pub fn rule_universe() -> Vec<RuleId> {
    Keyword::universe()
        .into_iter()
        .flat_map(|k| variants(k).into_iter().map(move |v| RuleId::new(k, v)))
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Shape {
    Null,
    Constant,
    Column,
    Compound,
}

fn shape(e: &ValueExpr) -> Shape {
    match e {
        ValueExpr::Null => Shape::Null,
        e if e.is_literal() => Shape::Constant,
        ValueExpr::Column(_) => Shape::Column,
        _ => Shape::Compound,
    }
}

fn one(e: &ValueExpr) -> Variant {
    match shape(e) {
        Shape::Null => Variant::Null,
        Shape::Constant => Variant::Constant,
        Shape::Column => Variant::Column,
        Shape::Compound => Variant::Expression,
    }
}

fn many<'a>(es: impl IntoIterator<Item = &'a ValueExpr>, columns: Variant) -> Variant {
    let shapes: Vec<Shape> = es.into_iter().map(shape).collect();
    if shapes.contains(&Shape::Compound) {
        Variant::Expression
    } else if shapes.iter().all(|s| *s == Shape::Null) {
        Variant::Null
    } else if shapes.iter().all(|s| matches!(s, Shape::Null | Shape::Constant)) {
        Variant::Constant
    } else if shapes.iter().all(|s| *s == Shape::Column) {
        columns
    } else {
        Variant::Mixed
    }
}

/// The rule an expression node triggers, if it carries a keyword.
pub fn expr_rule(e: &ValueExpr) -> Option<RuleId> {
    let kw = expr_keyword(e)?;
    let variant = match e {
        ValueExpr::InSubquery { .. } | ValueExpr::Exists(_) => Variant::Subquery,
        _ => {
            let ops = e.children();
            if is_unary(kw) {
                if ops.len() == 1 {
                    one(ops[0])
                } else {
                    Variant::Expression
                }
            } else {
                many(ops, Variant::Column)
            }
        }
    };
    Some(RuleId::new(kw, variant))
}

/// The rule of a condition-bearing clause (WHERE, HAVING, ON).
pub fn clause_condition_rule(clause: Keyword, cond: &ValueExpr) -> RuleId {
    RuleId::new(clause, one(cond))
}

pub fn select_rule(items: &SelectList) -> RuleId {
    let v = match items {
        SelectList::Star => Variant::Star,
        SelectList::Items(items) => many(items, Variant::ColumnList),
    };
    RuleId::new(Keyword::Select, v)
}

pub fn from_rule(refs: &[TableRef]) -> RuleId {
    let v = if refs.iter().any(|r| matches!(r, TableRef::Join(_))) {
        Variant::Joined
    } else if refs.len() == 1 {
        Variant::SingleTable
    } else {
        Variant::MultiTable
    };
    RuleId::new(Keyword::From, v)
}

pub fn aggregate_rule(f: AggFunc, items: &SelectList) -> RuleId {
    let v = match items {
        SelectList::Star => Variant::Star,
        SelectList::Items(items) if items.len() == 1 => one(&items[0]),
        SelectList::Items(_) => Variant::Expression,
    };
    RuleId::new(Keyword::Agg(f), v)
}

pub fn filter_rule(m: SelectModifier) -> Option<RuleId> {
    match m {
        SelectModifier::Distinct => Some(RuleId::new(Keyword::Distinct, Variant::Default)),
        SelectModifier::All => Some(RuleId::new(Keyword::All, Variant::Default)),
        SelectModifier::Aggregate(_) => None,
    }
}

pub fn set_op_rule(op: SetOp, left: &Query, right: &Query) -> RuleId {
    let simple = left.as_select().is_some() && right.as_select().is_some();
    RuleId::new(
        Keyword::SetOp(op),
        if simple { Variant::Simple } else { Variant::Nested },
    )
}

pub fn order_rule(o: &OrderBy) -> RuleId {
    RuleId::new(
        Keyword::OrderBy,
        match o.direction {
            Direction::Asc => Variant::Asc,
            Direction::Desc => Variant::Desc,
        },
    )
}

fn clause_rules(s: &Select, out: &mut BTreeSet<RuleId>) {
    if let Some(refs) = &s.from {
        out.insert(from_rule(refs));
        for r in refs {
            if let TableRef::Join(j) = r {
                out.insert(RuleId::new(Keyword::Join(j.kind), Variant::Default));
                if let Some(on) = &j.on {
                    out.insert(clause_condition_rule(Keyword::On, on));
                }
            }
        }
    }
    if let Some(w) = &s.where_clause {
        out.insert(clause_condition_rule(Keyword::Where, w));
    }
    if s.group_by.is_some() {
        out.insert(RuleId::new(Keyword::GroupBy, Variant::Column));
    }
    if let Some(h) = &s.having {
        out.insert(clause_condition_rule(Keyword::Having, h));
    }
    if let Some(f) = s.aggregate() {
        out.insert(aggregate_rule(f, &s.items));
    }
    out.insert(select_rule(&s.items));
    if let Some(r) = s.modifier.and_then(filter_rule) {
        out.insert(r);
    }
}

/// Every rule the query triggers, subqueries included.
pub fn rules_of(q: &Query) -> BTreeSet<RuleId> {
    let mut out = BTreeSet::new();
    for sub in q.all_queries() {
        if let Some(o) = &sub.order_by {
            out.insert(order_rule(o));
        }
        match &sub.body {
            QueryBody::SetOp { op, left, right } => {
                out.insert(set_op_rule(*op, left, right));
            }
            QueryBody::Select(s) => {
                clause_rules(s, &mut out);
                for e in s.exprs() {
                    collect_expr_rules(e, &mut out);
                }
            }
        }
    }
    out
}

// Subqueries are reached through `all_queries`, so only this level is walked.
fn collect_expr_rules(e: &ValueExpr, out: &mut BTreeSet<RuleId>) {
    if let Some(r) = expr_rule(e) {
        out.insert(r);
    }
    for c in e.children() {
        collect_expr_rules(c, out);
    }
}
