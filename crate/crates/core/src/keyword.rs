//! Semantics-bearing keywords and operators.
//!
//! This is the keyword universe used by keyword coverage. Literals and
//! identifiers are not keywords.

use std::collections::BTreeSet;
use std::fmt;

use crate::ast::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Keyword {
    Select,
    From,
    Where,
    GroupBy,
    Having,
    OrderBy,
    Distinct,
    All,
    Agg(AggFunc),
    SetOp(SetOp),
    Join(JoinKind),
    On,
    And,
    Or,
    Xor,
    Not,
    Is { negated: bool, test: IsTest },
    Compare(CompareOp),
    Between,
    NotBetween,
    In,
    NotIn,
    Exists,
    Arith(ArithOp),
    Concat,
    Func(Func),
    Case,
    Cast,
}

impl Keyword {
    /// Every keyword of the supported language, in a fixed order.
    pub fn universe() -> Vec<Keyword> {
        let mut v = vec![
            Keyword::Select,
            Keyword::From,
            Keyword::Where,
            Keyword::GroupBy,
            Keyword::Having,
            Keyword::OrderBy,
            Keyword::Distinct,
            Keyword::All,
        ];
        v.extend(AggFunc::ALL.into_iter().map(Keyword::Agg));
        v.extend(SetOp::ALL.into_iter().map(Keyword::SetOp));
        v.extend(JoinKind::ALL.into_iter().map(Keyword::Join));
        v.extend([
            Keyword::On,
            Keyword::And,
            Keyword::Or,
            Keyword::Xor,
            Keyword::Not,
        ]);
        for negated in [false, true] {
            for test in [IsTest::True, IsTest::False, IsTest::Unknown, IsTest::Null] {
                v.push(Keyword::Is { negated, test });
            }
        }
        v.extend(CompareOp::ALL.into_iter().map(Keyword::Compare));
        v.extend([
            Keyword::Between,
            Keyword::NotBetween,
            Keyword::In,
            Keyword::NotIn,
            Keyword::Exists,
        ]);
        v.extend(ArithOp::ALL.into_iter().map(Keyword::Arith));
        v.push(Keyword::Concat);
        v.extend(Func::ALL.into_iter().map(Keyword::Func));
        v.extend([Keyword::Case, Keyword::Cast]);
        v
    }

    pub fn name(&self) -> String {
        match self {
            Keyword::Select => "SELECT".into(),
            Keyword::From => "FROM".into(),
            Keyword::Where => "WHERE".into(),
            Keyword::GroupBy => "GROUP BY".into(),
            Keyword::Having => "HAVING".into(),
            Keyword::OrderBy => "ORDER BY".into(),
            Keyword::Distinct => "DISTINCT".into(),
            Keyword::All => "ALL".into(),
            Keyword::Agg(f) => f.sql().into(),
            Keyword::SetOp(op) => op.sql().into(),
            Keyword::Join(k) => k.sql().into(),
            Keyword::On => "ON".into(),
            Keyword::And => "AND".into(),
            Keyword::Or => "OR".into(),
            Keyword::Xor => "XOR".into(),
            Keyword::Not => "NOT".into(),
            Keyword::Is { negated, test } => {
                let t = match test {
                    IsTest::True => "TRUE",
                    IsTest::False => "FALSE",
                    IsTest::Unknown => "UNKNOWN",
                    IsTest::Null => "NULL",
                };
                if *negated {
                    format!("IS NOT {t}")
                } else {
                    format!("IS {t}")
                }
            }
            Keyword::Compare(op) => op.sql().into(),
            Keyword::Between => "BETWEEN".into(),
            Keyword::NotBetween => "NOT BETWEEN".into(),
            Keyword::In => "IN".into(),
            Keyword::NotIn => "NOT IN".into(),
            Keyword::Exists => "EXISTS".into(),
            Keyword::Arith(op) => op.sql().into(),
            Keyword::Concat => "||".into(),
            Keyword::Func(f) => f.name().into(),
            Keyword::Case => "CASE".into(),
            Keyword::Cast => "CAST".into(),
        }
    }

    /// Identifier form without spaces, used in machine-readable reports.
    pub fn ident(&self) -> String {
        self.name().replace(' ', "_")
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// The keyword of a single expression node, if it carries one.
pub fn expr_keyword(e: &ValueExpr) -> Option<Keyword> {
    Some(match e {
        ValueExpr::Null
        | ValueExpr::Bool(_)
        | ValueExpr::Int(_)
        | ValueExpr::Float(_)
        | ValueExpr::Str(_)
        | ValueExpr::Column(_)
        | ValueExpr::Subquery(_) => return None,
        ValueExpr::Logical { op, .. } => match op {
            LogicalOp::And => Keyword::And,
            LogicalOp::Or => Keyword::Or,
            LogicalOp::Xor => Keyword::Xor,
        },
        ValueExpr::Not(_) => Keyword::Not,
        ValueExpr::Is { negated, test, .. } => Keyword::Is {
            negated: *negated,
            test: *test,
        },
        ValueExpr::Compare { op, .. } => Keyword::Compare(*op),
        ValueExpr::Between { negated, .. } => {
            if *negated {
                Keyword::NotBetween
            } else {
                Keyword::Between
            }
        }
        ValueExpr::InList { negated, .. } | ValueExpr::InSubquery { negated, .. } => {
            if *negated {
                Keyword::NotIn
            } else {
                Keyword::In
            }
        }
        ValueExpr::Exists(_) => Keyword::Exists,
        ValueExpr::Arith { op, .. } => Keyword::Arith(*op),
        ValueExpr::Concat(..) => Keyword::Concat,
        ValueExpr::Func { func, .. } => Keyword::Func(*func),
        ValueExpr::Case { .. } => Keyword::Case,
        ValueExpr::Cast { .. } => Keyword::Cast,
    })
}

/// The distinct keywords appearing anywhere in the query, subqueries included.
pub fn keywords_of(q: &Query) -> BTreeSet<Keyword> {
    let mut out = BTreeSet::new();
    collect_query(q, &mut out);
    out
}

fn collect_query(q: &Query, out: &mut BTreeSet<Keyword>) {
    match &q.body {
        QueryBody::Select(s) => collect_select(s, out),
        QueryBody::SetOp { op, left, right } => {
            out.insert(Keyword::SetOp(*op));
            collect_query(left, out);
            collect_query(right, out);
        }
    }
    if q.order_by.is_some() {
        out.insert(Keyword::OrderBy);
    }
}

fn collect_select(s: &Select, out: &mut BTreeSet<Keyword>) {
    out.insert(Keyword::Select);
    match s.modifier {
        Some(SelectModifier::Distinct) => {
            out.insert(Keyword::Distinct);
        }
        Some(SelectModifier::All) => {
            out.insert(Keyword::All);
        }
        Some(SelectModifier::Aggregate(f)) => {
            out.insert(Keyword::Agg(f));
        }
        None => {}
    }
    if let Some(from) = &s.from {
        out.insert(Keyword::From);
        for r in from {
            if let TableRef::Join(j) = r {
                out.insert(Keyword::Join(j.kind));
                if j.on.is_some() {
                    out.insert(Keyword::On);
                }
            }
        }
    }
    if s.where_clause.is_some() {
        out.insert(Keyword::Where);
    }
    if s.group_by.is_some() {
        out.insert(Keyword::GroupBy);
    }
    if s.having.is_some() {
        out.insert(Keyword::Having);
    }
    for e in s.exprs() {
        collect_expr(e, out);
    }
}

fn collect_expr(e: &ValueExpr, out: &mut BTreeSet<Keyword>) {
    if let Some(k) = expr_keyword(e) {
        out.insert(k);
    }
    for c in e.children() {
        collect_expr(c, out);
    }
    for q in e.subqueries() {
        collect_query(q, out);
    }
}
