//! Canonical query text.
//!
//! Keywords are upper-case, tokens single-spaced, and parentheses appear only
//! where the parser's precedence would otherwise change the tree. Two
//! exceptions favour portability over minimality: comparison-family operands
//! that are themselves comparisons are always parenthesized, and `||` never
//! shares an unparenthesized operand with arithmetic.

use crate::ast::*;
use crate::value::float_literal;

/// Target-specific spellings used when sending text to a live engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dialect {
    pub cast_string: String,
    pub cast_numeric: String,
    pub cast_boolean: String,
}

impl Default for Dialect {
    fn default() -> Self {
        Dialect {
            cast_string: "string".into(),
            cast_numeric: "numeric".into(),
            cast_boolean: "boolean".into(),
        }
    }
}

impl Dialect {
    fn cast_name(&self, t: DataType) -> &str {
        match t {
            DataType::String => &self.cast_string,
            DataType::Numeric => &self.cast_numeric,
            DataType::Boolean => &self.cast_boolean,
        }
    }
}

pub fn print(q: &Query) -> String {
    print_with(q, &Dialect::default())
}

pub fn print_with(q: &Query, dialect: &Dialect) -> String {
    let mut p = Printer {
        out: String::new(),
        dialect,
    };
    p.query(q);
    p.out
}

pub fn print_expr(e: &ValueExpr) -> String {
    let d = Dialect::default();
    let mut p = Printer {
        out: String::new(),
        dialect: &d,
    };
    p.expr(e, 0);
    p.out
}

const OR: u8 = 1;
const XOR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;
const IS: u8 = 5;
const CMP: u8 = 6;
const CONCAT: u8 = 7;
const ADD: u8 = 8;
const MUL: u8 = 9;
const ATOM: u8 = 10;

fn level(e: &ValueExpr) -> u8 {
    match e {
        ValueExpr::Logical { op, .. } => match op {
            LogicalOp::Or => OR,
            LogicalOp::Xor => XOR,
            LogicalOp::And => AND,
        },
        ValueExpr::Not(_) => NOT,
        ValueExpr::Is { .. } => IS,
        ValueExpr::Compare { .. }
        | ValueExpr::Between { .. }
        | ValueExpr::InList { .. }
        | ValueExpr::InSubquery { .. } => CMP,
        ValueExpr::Concat(..) => CONCAT,
        ValueExpr::Arith { op, .. } => match op {
            ArithOp::Add | ArithOp::Sub => ADD,
            ArithOp::Mul | ArithOp::Div => MUL,
        },
        _ => ATOM,
    }
}

struct Printer<'d> {
    out: String,
    dialect: &'d Dialect,
}

impl Printer<'_> {
    fn w(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn query(&mut self, q: &Query) {
        match &q.body {
            QueryBody::Select(s) => self.select(s),
            QueryBody::SetOp { op, left, right } => {
                let left_bare = left.order_by.is_none();
                self.query_operand(left, left_bare);
                self.w(" ");
                self.w(op.sql());
                self.w(" ");
                let right_bare = right.order_by.is_none() && right.as_select().is_some();
                self.query_operand(right, right_bare);
            }
        }
        if let Some(o) = &q.order_by {
            self.w(" ORDER BY ");
            self.w(&o.column.to_string());
            self.w(match o.direction {
                Direction::Asc => " ASC",
                Direction::Desc => " DESC",
            });
        }
    }

    fn query_operand(&mut self, q: &Query, bare: bool) {
        if bare {
            self.query(q);
        } else {
            self.w("(");
            self.query(q);
            self.w(")");
        }
    }

    fn select(&mut self, s: &Select) {
        self.w("SELECT ");
        match s.modifier {
            Some(SelectModifier::Distinct) => self.w("DISTINCT "),
            Some(SelectModifier::All) => self.w("ALL "),
            _ => {}
        }
        if let Some(f) = s.aggregate() {
            self.w(f.sql());
            self.w("(");
            self.select_list(&s.items);
            self.w(")");
        } else {
            self.select_list(&s.items);
        }
        if let Some(from) = &s.from {
            self.w(" FROM ");
            for (i, r) in from.iter().enumerate() {
                if i > 0 {
                    self.w(", ");
                }
                self.table_ref(r);
            }
        }
        if let Some(e) = &s.where_clause {
            self.w(" WHERE ");
            self.expr(e, 0);
        }
        if let Some(c) = &s.group_by {
            self.w(" GROUP BY ");
            self.w(&c.to_string());
        }
        if let Some(e) = &s.having {
            self.w(" HAVING ");
            self.expr(e, 0);
        }
    }

    fn select_list(&mut self, items: &SelectList) {
        match items {
            SelectList::Star => self.w("*"),
            SelectList::Items(items) => self.expr_list(items),
        }
    }

    fn expr_list(&mut self, items: &[ValueExpr]) {
        for (i, e) in items.iter().enumerate() {
            if i > 0 {
                self.w(", ");
            }
            self.expr(e, 0);
        }
    }

    fn table_ref(&mut self, r: &TableRef) {
        match r {
            TableRef::Table(t) => self.w(t),
            TableRef::Join(j) => {
                self.w(&j.left);
                self.w(" ");
                self.w(j.kind.sql());
                self.w(" ");
                self.w(&j.right);
                if let Some(on) = &j.on {
                    self.w(" ON ");
                    self.expr(on, 0);
                }
            }
        }
    }

    /// Writes `e`, parenthesized when its level is below `min`.
    fn expr(&mut self, e: &ValueExpr, min: u8) {
        if level(e) < min {
            self.w("(");
            self.expr_inner(e);
            self.w(")");
        } else {
            self.expr_inner(e);
        }
    }

    fn paren(&mut self, e: &ValueExpr) {
        self.w("(");
        self.expr_inner(e);
        self.w(")");
    }

    fn cmp_operand(&mut self, e: &ValueExpr) {
        self.expr(e, CONCAT);
    }

    fn expr_inner(&mut self, e: &ValueExpr) {
        match e {
            ValueExpr::Null => self.w("NULL"),
            ValueExpr::Bool(true) => self.w("TRUE"),
            ValueExpr::Bool(false) => self.w("FALSE"),
            ValueExpr::Int(i) => self.w(&i.to_string()),
            ValueExpr::Float(f) => self.w(&float_literal(*f)),
            ValueExpr::Str(s) => {
                self.w("'");
                self.w(&s.replace('\'', "''"));
                self.w("'");
            }
            ValueExpr::Column(c) => self.w(&c.to_string()),
            ValueExpr::Logical { op, left, right } => {
                let l = level(e);
                self.expr(left, l);
                self.w(match op {
                    LogicalOp::And => " AND ",
                    LogicalOp::Or => " OR ",
                    LogicalOp::Xor => " XOR ",
                });
                self.expr(right, l + 1);
            }
            ValueExpr::Not(inner) => {
                self.w("NOT ");
                self.expr(inner, NOT);
            }
            ValueExpr::Is {
                expr,
                negated,
                test,
            } => {
                self.expr(expr, IS);
                self.w(if *negated { " IS NOT " } else { " IS " });
                self.w(match test {
                    IsTest::True => "TRUE",
                    IsTest::False => "FALSE",
                    IsTest::Unknown => "UNKNOWN",
                    IsTest::Null => "NULL",
                });
            }
            ValueExpr::Compare { op, left, right } => {
                self.cmp_operand(left);
                self.w(" ");
                self.w(op.sql());
                self.w(" ");
                self.cmp_operand(right);
            }
            ValueExpr::Between {
                expr,
                negated,
                low,
                high,
            } => {
                self.cmp_operand(expr);
                self.w(if *negated { " NOT BETWEEN " } else { " BETWEEN " });
                self.cmp_operand(low);
                self.w(" AND ");
                self.cmp_operand(high);
            }
            ValueExpr::InList {
                expr,
                negated,
                list,
            } => {
                self.cmp_operand(expr);
                self.w(if *negated { " NOT IN (" } else { " IN (" });
                self.expr_list(list);
                self.w(")");
            }
            ValueExpr::InSubquery {
                expr,
                negated,
                query,
            } => {
                self.cmp_operand(expr);
                self.w(if *negated { " NOT IN (" } else { " IN (" });
                self.query(query);
                self.w(")");
            }
            ValueExpr::Exists(q) => {
                self.w("EXISTS (");
                self.query(q);
                self.w(")");
            }
            ValueExpr::Arith { op, left, right } => {
                let l = level(e);
                self.arith_operand(left, l);
                self.w(" ");
                self.w(op.sql());
                self.w(" ");
                self.arith_operand(right, l + 1);
            }
            ValueExpr::Concat(left, right) => {
                self.concat_operand(left, CONCAT);
                self.w(" || ");
                self.concat_operand(right, CONCAT + 1);
            }
            ValueExpr::Func { func, args } => {
                self.w(func.name());
                self.w("(");
                if *func == Func::Substring && args.len() == 2 {
                    self.expr(&args[0], 0);
                    self.w(" FROM ");
                    self.expr(&args[1], 0);
                } else {
                    self.expr_list(args);
                }
                self.w(")");
            }
            ValueExpr::Case {
                when,
                then,
                otherwise,
            } => {
                self.w("CASE WHEN ");
                self.expr(when, 0);
                self.w(" THEN ");
                self.expr(then, 0);
                self.w(" ELSE ");
                self.expr(otherwise, 0);
                self.w(" END");
            }
            ValueExpr::Cast { expr, to } => {
                self.w("CAST(");
                self.expr(expr, 0);
                self.w(" AS ");
                let name = self.dialect.cast_name(*to).to_string();
                self.w(&name);
                self.w(")");
            }
            ValueExpr::Subquery(q) => {
                self.w("(");
                self.query(q);
                self.w(")");
            }
        }
    }

    fn arith_operand(&mut self, e: &ValueExpr, min: u8) {
        if matches!(e, ValueExpr::Concat(..)) {
            self.paren(e);
        } else {
            self.expr(e, min);
        }
    }

    fn concat_operand(&mut self, e: &ValueExpr, min: u8) {
        if matches!(e, ValueExpr::Arith { .. }) {
            self.paren(e);
        } else {
            self.expr(e, min);
        }
    }
}
