//! Typed syntax tree for the supported query language.
//!
//! The tree mirrors the query grammar: a query is either a single `SELECT`
//! block or a binary set operation over two queries, optionally followed by
//! an `ORDER BY`. Value expressions form one recursive sum type; function
//! calls carry their arguments as a vector so that arity faults introduced
//! by mutation remain representable (and are caught by validation).

use std::fmt;

/// A complete query: body plus an optional trailing `ORDER BY`.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub body: QueryBody,
    pub order_by: Option<OrderBy>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QueryBody {
    Select(Box<Select>),
    SetOp {
        op: SetOp,
        left: Box<Query>,
        right: Box<Query>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetOp {
    Union,
    UnionAll,
    Intersect,
    IntersectAll,
    Except,
    ExceptAll,
}

impl SetOp {
    pub const ALL: [SetOp; 6] = [
        SetOp::Union,
        SetOp::UnionAll,
        SetOp::Intersect,
        SetOp::IntersectAll,
        SetOp::Except,
        SetOp::ExceptAll,
    ];

    pub fn sql(self) -> &'static str {
        match self {
            SetOp::Union => "UNION",
            SetOp::UnionAll => "UNION ALL",
            SetOp::Intersect => "INTERSECT",
            SetOp::IntersectAll => "INTERSECT ALL",
            SetOp::Except => "EXCEPT",
            SetOp::ExceptAll => "EXCEPT ALL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderBy {
    pub column: ColumnRef,
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Asc,
    Desc,
}

/// One `SELECT` block.
#[derive(Debug, Clone, PartialEq)]
pub struct Select {
    pub modifier: Option<SelectModifier>,
    pub items: SelectList,
    /// `None` only for the constant-query form `SELECT <expr>`.
    pub from: Option<Vec<TableRef>>,
    pub where_clause: Option<ValueExpr>,
    pub group_by: Option<ColumnRef>,
    pub having: Option<ValueExpr>,
}

impl Select {
    /// A bare `SELECT <items> FROM <refs>` with no other clauses.
    pub fn simple(items: SelectList, from: Vec<TableRef>) -> Self {
        Select {
            modifier: None,
            items,
            from: Some(from),
            where_clause: None,
            group_by: None,
            having: None,
        }
    }

    pub fn aggregate(&self) -> Option<AggFunc> {
        match self.modifier {
            Some(SelectModifier::Aggregate(f)) => Some(f),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectModifier {
    Distinct,
    All,
    Aggregate(AggFunc),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AggFunc {
    Max,
    Min,
    Sum,
    Count,
    Avg,
}

impl AggFunc {
    pub const ALL: [AggFunc; 5] = [
        AggFunc::Max,
        AggFunc::Min,
        AggFunc::Sum,
        AggFunc::Count,
        AggFunc::Avg,
    ];

    pub fn sql(self) -> &'static str {
        match self {
            AggFunc::Max => "MAX",
            AggFunc::Min => "MIN",
            AggFunc::Sum => "SUM",
            AggFunc::Count => "COUNT",
            AggFunc::Avg => "AVG",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelectList {
    Star,
    Items(Vec<ValueExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TableRef {
    Table(String),
    Join(JoinedTable),
}

#[derive(Debug, Clone, PartialEq)]
pub struct JoinedTable {
    pub kind: JoinKind,
    pub left: String,
    pub right: String,
    /// Present exactly for the qualified kinds (inner/left/right/full).
    pub on: Option<ValueExpr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JoinKind {
    Cross,
    Natural,
    Inner,
    Left,
    Right,
    Full,
}

impl JoinKind {
    pub const ALL: [JoinKind; 6] = [
        JoinKind::Cross,
        JoinKind::Natural,
        JoinKind::Inner,
        JoinKind::Left,
        JoinKind::Right,
        JoinKind::Full,
    ];

    pub fn is_qualified(self) -> bool {
        matches!(
            self,
            JoinKind::Inner | JoinKind::Left | JoinKind::Right | JoinKind::Full
        )
    }

    pub fn sql(self) -> &'static str {
        match self {
            JoinKind::Cross => "CROSS JOIN",
            JoinKind::Natural => "NATURAL JOIN",
            JoinKind::Inner => "INNER JOIN",
            JoinKind::Left => "LEFT JOIN",
            JoinKind::Right => "RIGHT JOIN",
            JoinKind::Full => "FULL JOIN",
        }
    }
}

/// A possibly qualified column reference (`c` or `t.c`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnRef {
    pub table: Option<String>,
    pub column: String,
}

impl ColumnRef {
    pub fn new(table: impl Into<String>, column: impl Into<String>) -> Self {
        ColumnRef {
            table: Some(table.into()),
            column: column.into(),
        }
    }

    pub fn bare(column: impl Into<String>) -> Self {
        ColumnRef {
            table: None,
            column: column.into(),
        }
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.table {
            Some(t) => write!(f, "{t}.{}", self.column),
            None => f.write_str(&self.column),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LogicalOp {
    And,
    Or,
    Xor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IsTest {
    True,
    False,
    Unknown,
    Null,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompareOp {
    Eq,
    NotEq,
    Lt,
    Gt,
    LtEq,
    GtEq,
}

impl CompareOp {
    pub const ALL: [CompareOp; 6] = [
        CompareOp::Eq,
        CompareOp::NotEq,
        CompareOp::Lt,
        CompareOp::Gt,
        CompareOp::LtEq,
        CompareOp::GtEq,
    ];

    pub fn sql(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::NotEq => "!=",
            CompareOp::Lt => "<",
            CompareOp::Gt => ">",
            CompareOp::LtEq => "<=",
            CompareOp::GtEq => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub const ALL: [ArithOp; 4] = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div];

    pub fn sql(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

/// Scalar functions with call syntax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Mod,
    Length,
    CharLength,
    CharacterLength,
    Abs,
    Ln,
    Exp,
    Power,
    Sqrt,
    Floor,
    Ceil,
    Ceiling,
    /// `SUBSTRING(s FROM n)`
    Substring,
    Ltrim,
    Rtrim,
    Upper,
    Lower,
}

impl Func {
    pub const ALL: [Func; 17] = [
        Func::Mod,
        Func::Length,
        Func::CharLength,
        Func::CharacterLength,
        Func::Abs,
        Func::Ln,
        Func::Exp,
        Func::Power,
        Func::Sqrt,
        Func::Floor,
        Func::Ceil,
        Func::Ceiling,
        Func::Substring,
        Func::Ltrim,
        Func::Rtrim,
        Func::Upper,
        Func::Lower,
    ];

    pub fn arity(self) -> usize {
        match self {
            Func::Mod | Func::Power | Func::Substring => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Mod => "MOD",
            Func::Length => "LENGTH",
            Func::CharLength => "CHAR_LENGTH",
            Func::CharacterLength => "CHARACTER_LENGTH",
            Func::Abs => "ABS",
            Func::Ln => "LN",
            Func::Exp => "EXP",
            Func::Power => "POWER",
            Func::Sqrt => "SQRT",
            Func::Floor => "FLOOR",
            Func::Ceil => "CEIL",
            Func::Ceiling => "CEILING",
            Func::Substring => "SUBSTRING",
            Func::Ltrim => "LTRIM",
            Func::Rtrim => "RTRIM",
            Func::Upper => "UPPER",
            Func::Lower => "LOWER",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(name))
    }

    /// Result domain of the function.
    pub fn domain(self) -> Domain {
        match self {
            Func::Substring | Func::Ltrim | Func::Rtrim | Func::Upper | Func::Lower => Domain::Str,
            _ => Domain::Num,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DataType {
    String,
    Numeric,
    Boolean,
}

impl DataType {
    pub const ALL: [DataType; 3] = [DataType::String, DataType::Numeric, DataType::Boolean];

    pub fn name(self) -> &'static str {
        match self {
            DataType::String => "string",
            DataType::Numeric => "numeric",
            DataType::Boolean => "boolean",
        }
    }
}

/// The three evaluation domains of value expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Bool,
    Num,
    Str,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValueExpr {
    Null,
    Bool(bool),
    Int(i64),
    /// Always finite.
    Float(f64),
    Str(String),
    Column(ColumnRef),
    Logical {
        op: LogicalOp,
        left: Box<ValueExpr>,
        right: Box<ValueExpr>,
    },
    Not(Box<ValueExpr>),
    Is {
        expr: Box<ValueExpr>,
        negated: bool,
        test: IsTest,
    },
    Compare {
        op: CompareOp,
        left: Box<ValueExpr>,
        right: Box<ValueExpr>,
    },
    Between {
        expr: Box<ValueExpr>,
        negated: bool,
        low: Box<ValueExpr>,
        high: Box<ValueExpr>,
    },
    InList {
        expr: Box<ValueExpr>,
        negated: bool,
        list: Vec<ValueExpr>,
    },
    InSubquery {
        expr: Box<ValueExpr>,
        negated: bool,
        query: Box<Query>,
    },
    Exists(Box<Query>),
    Arith {
        op: ArithOp,
        left: Box<ValueExpr>,
        right: Box<ValueExpr>,
    },
    Concat(Box<ValueExpr>, Box<ValueExpr>),
    Func {
        func: Func,
        args: Vec<ValueExpr>,
    },
    Case {
        when: Box<ValueExpr>,
        then: Box<ValueExpr>,
        otherwise: Box<ValueExpr>,
    },
    Cast {
        expr: Box<ValueExpr>,
        to: DataType,
    },
    /// Scalar subquery.
    Subquery(Box<Query>),
}

impl ValueExpr {
    pub fn col(table: &str, column: &str) -> ValueExpr {
        ValueExpr::Column(ColumnRef::new(table, column))
    }

    pub fn logical(op: LogicalOp, left: ValueExpr, right: ValueExpr) -> ValueExpr {
        ValueExpr::Logical {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn compare(op: CompareOp, left: ValueExpr, right: ValueExpr) -> ValueExpr {
        ValueExpr::Compare {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn arith(op: ArithOp, left: ValueExpr, right: ValueExpr) -> ValueExpr {
        ValueExpr::Arith {
            op,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn func(func: Func, args: Vec<ValueExpr>) -> ValueExpr {
        ValueExpr::Func { func, args }
    }

    pub fn is_literal(&self) -> bool {
        matches!(
            self,
            ValueExpr::Null
                | ValueExpr::Bool(_)
                | ValueExpr::Int(_)
                | ValueExpr::Float(_)
                | ValueExpr::Str(_)
        )
    }

    /// Direct sub-expressions, in source order. Subqueries are not descended.
    pub fn children(&self) -> Vec<&ValueExpr> {
        match self {
            ValueExpr::Null
            | ValueExpr::Bool(_)
            | ValueExpr::Int(_)
            | ValueExpr::Float(_)
            | ValueExpr::Str(_)
            | ValueExpr::Column(_)
            | ValueExpr::Exists(_)
            | ValueExpr::Subquery(_) => vec![],
            ValueExpr::Logical { left, right, .. }
            | ValueExpr::Compare { left, right, .. }
            | ValueExpr::Arith { left, right, .. }
            | ValueExpr::Concat(left, right) => vec![left, right],
            ValueExpr::Not(e) | ValueExpr::Is { expr: e, .. } | ValueExpr::Cast { expr: e, .. } => {
                vec![e]
            }
            ValueExpr::Between {
                expr, low, high, ..
            } => vec![expr, low, high],
            ValueExpr::InList { expr, list, .. } => {
                let mut v = vec![&**expr];
                v.extend(list.iter());
                v
            }
            ValueExpr::InSubquery { expr, .. } => vec![expr],
            ValueExpr::Func { args, .. } => args.iter().collect(),
            ValueExpr::Case {
                when,
                then,
                otherwise,
            } => vec![when, then, otherwise],
        }
    }

    /// Mutable counterpart of [`ValueExpr::children`].
    pub fn children_mut(&mut self) -> Vec<&mut ValueExpr> {
        match self {
            ValueExpr::Null
            | ValueExpr::Bool(_)
            | ValueExpr::Int(_)
            | ValueExpr::Float(_)
            | ValueExpr::Str(_)
            | ValueExpr::Column(_)
            | ValueExpr::Exists(_)
            | ValueExpr::Subquery(_) => vec![],
            ValueExpr::Logical { left, right, .. }
            | ValueExpr::Compare { left, right, .. }
            | ValueExpr::Arith { left, right, .. }
            | ValueExpr::Concat(left, right) => vec![left, right],
            ValueExpr::Not(e) | ValueExpr::Is { expr: e, .. } | ValueExpr::Cast { expr: e, .. } => {
                vec![e]
            }
            ValueExpr::Between {
                expr, low, high, ..
            } => vec![expr, low, high],
            ValueExpr::InList { expr, list, .. } => {
                let mut v = vec![&mut **expr];
                v.extend(list.iter_mut());
                v
            }
            ValueExpr::InSubquery { expr, .. } => vec![expr],
            ValueExpr::Func { args, .. } => args.iter_mut().collect(),
            ValueExpr::Case {
                when,
                then,
                otherwise,
            } => vec![when, then, otherwise],
        }
    }

    /// Subqueries directly embedded in this node.
    pub fn subqueries(&self) -> Vec<&Query> {
        match self {
            ValueExpr::Exists(q) | ValueExpr::Subquery(q) | ValueExpr::InSubquery { query: q, .. } => {
                vec![q]
            }
            _ => vec![],
        }
    }

    pub fn subqueries_mut(&mut self) -> Vec<&mut Query> {
        match self {
            ValueExpr::Exists(q) | ValueExpr::Subquery(q) | ValueExpr::InSubquery { query: q, .. } => {
                vec![q]
            }
            _ => vec![],
        }
    }

    /// Pre-order walk over this expression and all nested expressions,
    /// including those inside subqueries.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a ValueExpr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
        for q in self.subqueries() {
            q.walk_exprs(f);
        }
    }

    /// The domain this expression naturally evaluates in.
    pub fn natural_domain(&self) -> Option<Domain> {
        match self {
            ValueExpr::Null | ValueExpr::Column(_) | ValueExpr::Subquery(_) => None,
            ValueExpr::Bool(_)
            | ValueExpr::Logical { .. }
            | ValueExpr::Not(_)
            | ValueExpr::Is { .. }
            | ValueExpr::Compare { .. }
            | ValueExpr::Between { .. }
            | ValueExpr::InList { .. }
            | ValueExpr::InSubquery { .. }
            | ValueExpr::Exists(_) => Some(Domain::Bool),
            ValueExpr::Int(_) | ValueExpr::Float(_) | ValueExpr::Arith { .. } => Some(Domain::Num),
            ValueExpr::Str(_) | ValueExpr::Concat(..) => Some(Domain::Str),
            ValueExpr::Func { func, .. } => Some(func.domain()),
            ValueExpr::Case { then, .. } => then.natural_domain(),
            ValueExpr::Cast { to, .. } => Some(match to {
                DataType::String => Domain::Str,
                DataType::Numeric => Domain::Num,
                DataType::Boolean => Domain::Bool,
            }),
        }
    }
}

impl Query {
    pub fn select(select: Select) -> Query {
        Query {
            body: QueryBody::Select(Box::new(select)),
            order_by: None,
        }
    }

    pub fn set_op(op: SetOp, left: Query, right: Query) -> Query {
        Query {
            body: QueryBody::SetOp {
                op,
                left: Box::new(left),
                right: Box::new(right),
            },
            order_by: None,
        }
    }

    pub fn as_select(&self) -> Option<&Select> {
        match &self.body {
            QueryBody::Select(s) => Some(s),
            QueryBody::SetOp { .. } => None,
        }
    }

    /// All `SELECT` blocks of this query level (both sides of set operations),
    /// left to right. Subqueries are not included.
    pub fn selects(&self) -> Vec<&Select> {
        match &self.body {
            QueryBody::Select(s) => vec![s],
            QueryBody::SetOp { left, right, .. } => {
                let mut v = left.selects();
                v.extend(right.selects());
                v
            }
        }
    }

    pub fn selects_mut(&mut self) -> Vec<&mut Select> {
        match &mut self.body {
            QueryBody::Select(s) => vec![s],
            QueryBody::SetOp { left, right, .. } => {
                let mut v = left.selects_mut();
                v.extend(right.selects_mut());
                v
            }
        }
    }

    /// Pre-order walk over every value expression in the query, descending
    /// into subqueries.
    pub fn walk_exprs<'a>(&'a self, f: &mut dyn FnMut(&'a ValueExpr)) {
        for s in self.selects() {
            for e in s.exprs() {
                e.walk(f);
            }
        }
    }

    /// Every query nested in this one (including itself), pre-order.
    pub fn all_queries(&self) -> Vec<&Query> {
        let mut out = vec![self];
        match &self.body {
            QueryBody::SetOp { left, right, .. } => {
                out.extend(left.all_queries());
                out.extend(right.all_queries());
            }
            QueryBody::Select(s) => {
                let mut subs = Vec::new();
                for e in s.exprs() {
                    collect_direct_subqueries(e, &mut subs);
                }
                for q in subs {
                    out.extend(q.all_queries());
                }
            }
        }
        out
    }

    /// Nesting depth of subqueries (0 for a query without any).
    pub fn subquery_depth(&self) -> usize {
        match &self.body {
            QueryBody::SetOp { left, right, .. } => {
                left.subquery_depth().max(right.subquery_depth())
            }
            QueryBody::Select(s) => {
                let mut subs = Vec::new();
                for e in s.exprs() {
                    collect_direct_subqueries(e, &mut subs);
                }
                subs.iter()
                    .map(|q| 1 + q.subquery_depth())
                    .max()
                    .unwrap_or(0)
            }
        }
    }
}

fn collect_direct_subqueries<'a>(e: &'a ValueExpr, out: &mut Vec<&'a Query>) {
    out.extend(e.subqueries());
    for c in e.children() {
        collect_direct_subqueries(c, out);
    }
}

impl Select {
    /// The value expressions owned directly by this block, in clause order:
    /// select items, join conditions, WHERE, HAVING.
    pub fn exprs(&self) -> Vec<&ValueExpr> {
        let mut v: Vec<&ValueExpr> = Vec::new();
        if let SelectList::Items(items) = &self.items {
            v.extend(items.iter());
        }
        if let Some(from) = &self.from {
            for r in from {
                if let TableRef::Join(j) = r {
                    if let Some(on) = &j.on {
                        v.push(on);
                    }
                }
            }
        }
        if let Some(w) = &self.where_clause {
            v.push(w);
        }
        if let Some(h) = &self.having {
            v.push(h);
        }
        v
    }

    pub fn exprs_mut(&mut self) -> Vec<&mut ValueExpr> {
        let mut v: Vec<&mut ValueExpr> = Vec::new();
        if let SelectList::Items(items) = &mut self.items {
            v.extend(items.iter_mut());
        }
        if let Some(from) = &mut self.from {
            for r in from {
                if let TableRef::Join(j) = r {
                    if let Some(on) = &mut j.on {
                        v.push(on);
                    }
                }
            }
        }
        if let Some(w) = &mut self.where_clause {
            v.push(w);
        }
        if let Some(h) = &mut self.having {
            v.push(h);
        }
        v
    }

    /// Table names referenced in FROM, in order.
    pub fn table_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for r in self.from.iter().flatten() {
            match r {
                TableRef::Table(t) => out.push(t.as_str()),
                TableRef::Join(j) => {
                    out.push(j.left.as_str());
                    out.push(j.right.as_str());
                }
            }
        }
        out
    }
}
