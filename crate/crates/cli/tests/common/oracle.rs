//! Brute-force evaluator used as an independent oracle for the engine.
//!
//! Relations are plain row lists. Joins are nested loops, every bag
//! operator is defined by counting multiplicities row by row, sorting is an
//! insertion sort, and three-valued logic is the min/max lattice over
//! F < U < T. Only the value casts and the expression printer (for output
//! column names) are shared with the engine.

use std::cmp::Ordering;

use sqlsem_core::ast::*;
use sqlsem_core::printer::print_expr;
use sqlsem_core::table::{Attribute, Catalog};
use sqlsem_core::value::{cast_to_bool, cast_to_num, cast_to_str, Value};
use sqlsem_core::JoinMode;

pub type Row = Vec<Value>;
type R<T> = Result<T, String>;

#[derive(Debug, Clone)]
pub struct Rel {
    pub attrs: Vec<Attribute>,
    pub rows: Vec<Row>,
}

#[derive(Clone, Copy)]
struct Frame<'a> {
    attrs: &'a [Attribute],
    row: &'a [Value],
}

pub struct Oracle<'c> {
    pub catalog: &'c Catalog,
    pub mode: JoinMode,
}

// F = 0, U = 1, T = 2
fn tv(v: &Value) -> u8 {
    match cast_to_bool(v) {
        Value::Bool(false) => 0,
        Value::Bool(true) => 2,
        _ => 1,
    }
}

fn from_tv(t: u8) -> Value {
    match t {
        0 => Value::Bool(false),
        2 => Value::Bool(true),
        _ => Value::Null,
    }
}

fn matches(a: &Attribute, c: &ColumnRef) -> bool {
    a.name == c.column && c.table.as_ref().is_none_or(|t| a.qualifiers.contains(t))
}

fn resolve(attrs: &[Attribute], c: &ColumnRef) -> R<Option<usize>> {
    let hits: Vec<usize> = (0..attrs.len()).filter(|&i| matches(&attrs[i], c)).collect();
    match hits.len() {
        0 => Ok(None),
        1 => Ok(Some(hits[0])),
        _ => Err(format!("ambiguous {c}")),
    }
}

fn real(v: &Value) -> f64 {
    match v {
        Value::Int(i) => *i as f64,
        Value::Float(f) => *f,
        _ => unreachable!(),
    }
}

/// Exact numeric order on non-null numbers.
pub fn ncmp(a: &Value, b: &Value) -> Ordering {
    fn int_vs_float(i: i64, f: f64) -> Ordering {
        if f >= 1e19 {
            return Ordering::Less;
        }
        if f <= -1e19 {
            return Ordering::Greater;
        }
        let fl = f.floor();
        match (i as i128).cmp(&(fl as i128)) {
            Ordering::Equal if f > fl => Ordering::Less,
            o => o,
        }
    }
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => x.cmp(y),
        (Value::Float(x), Value::Float(y)) => x.partial_cmp(y).unwrap(),
        (Value::Int(x), Value::Float(y)) => int_vs_float(*x, *y),
        (Value::Float(x), Value::Int(y)) => int_vs_float(*y, *x).reverse(),
        _ => unreachable!(),
    }
}

fn mk_float(f: f64) -> R<Value> {
    if !f.is_finite() {
        return Err("non-finite".into());
    }
    Ok(Value::Float(if f == 0.0 { 0.0 } else { f }))
}

fn cmp_values(op: CompareOp, a: &Value, b: &Value) -> Value {
    let (a, b) = (cast_to_num(a), cast_to_num(b));
    if a.is_null() || b.is_null() {
        return Value::Null;
    }
    let o = ncmp(&a, &b);
    let r = match op {
        CompareOp::Eq => o.is_eq(),
        CompareOp::NotEq => o.is_ne(),
        CompareOp::Lt => o.is_lt(),
        CompareOp::Gt => o.is_gt(),
        CompareOp::LtEq => o.is_le(),
        CompareOp::GtEq => o.is_ge(),
    };
    Value::Bool(r)
}

fn member<'v>(x: &Value, items: impl Iterator<Item = &'v Value>) -> u8 {
    items.map(|i| tv(&cmp_values(CompareOp::Eq, x, i))).max().unwrap_or(0)
}

fn negate(t: u8, negated: bool) -> u8 {
    if negated {
        2 - t
    } else {
        t
    }
}

fn arith(op: ArithOp, a: &Value, b: &Value) -> R<Value> {
    let (a, b) = (cast_to_num(a), cast_to_num(b));
    if a.is_null() || b.is_null() {
        return Ok(Value::Null);
    }
    if op == ArithOp::Div {
        if real(&b) == 0.0 {
            return Err("division by zero".into());
        }
        return mk_float(real(&a) / real(&b));
    }
    if let (Value::Int(x), Value::Int(y)) = (&a, &b) {
        let r = match op {
            ArithOp::Add => x.checked_add(*y),
            ArithOp::Sub => x.checked_sub(*y),
            _ => x.checked_mul(*y),
        };
        return r.map(Value::Int).ok_or_else(|| "overflow".to_string());
    }
    let (x, y) = (real(&a), real(&b));
    mk_float(match op {
        ArithOp::Add => x + y,
        ArithOp::Sub => x - y,
        _ => x * y,
    })
}

fn to_int_if_fits(f: f64) -> R<Value> {
    if (-9.2e18..9.2e18).contains(&f) {
        Ok(Value::Int(f as i64))
    } else {
        mk_float(f)
    }
}

fn call(func: Func, args: &[Value]) -> R<Value> {
    if args.iter().any(Value::is_null) {
        return Ok(Value::Null);
    }
    let n = |i: usize| cast_to_num(&args[i]);
    let s = || match cast_to_str(&args[0]) {
        Value::Str(s) => s,
        _ => unreachable!(),
    };
    match func {
        Func::Mod => {
            let (a, b) = (n(0), n(1));
            if real(&b) == 0.0 {
                return Err("mod by zero".into());
            }
            match (a, b) {
                (Value::Int(x), Value::Int(y)) => Ok(Value::Int(if y == -1 { 0 } else { x % y })),
                (a, b) => mk_float(real(&a) % real(&b)),
            }
        }
        Func::Length | Func::CharLength | Func::CharacterLength => Ok(Value::Int(s().chars().count() as i64)),
        Func::Abs => match n(0) {
            Value::Int(i) => i.checked_abs().map(Value::Int).ok_or_else(|| "overflow".into()),
            v => mk_float(real(&v).abs()),
        },
        Func::Ln => {
            let x = real(&n(0));
            if x <= 0.0 {
                return Err("ln domain".into());
            }
            mk_float(x.ln())
        }
        Func::Exp => mk_float(real(&n(0)).exp()),
        Func::Power => mk_float(real(&n(0)).powf(real(&n(1)))),
        Func::Sqrt => {
            let x = real(&n(0));
            if x < 0.0 {
                return Err("sqrt domain".into());
            }
            mk_float(x.sqrt())
        }
        Func::Floor => match n(0) {
            Value::Int(i) => Ok(Value::Int(i)),
            v => to_int_if_fits(real(&v).floor()),
        },
        Func::Ceil | Func::Ceiling => match n(0) {
            Value::Int(i) => Ok(Value::Int(i)),
            v => to_int_if_fits(real(&v).ceil()),
        },
        Func::Substring => {
            let start = match n(1) {
                Value::Int(i) => i as i128,
                v => real(&v).trunc() as i128,
            };
            let skip = (start - 1).max(0);
            let skip = usize::try_from(skip).unwrap_or(usize::MAX);
            Ok(Value::Str(s().chars().skip(skip).collect()))
        }
        Func::Ltrim => Ok(Value::Str(s().trim_start_matches(' ').to_string())),
        Func::Rtrim => Ok(Value::Str(s().trim_end_matches(' ').to_string())),
        Func::Upper => Ok(Value::Str(s().to_ascii_uppercase())),
        Func::Lower => Ok(Value::Str(s().to_ascii_lowercase())),
    }
}

/// Multiplicity of `row` in `rows`, by scanning.
fn count(rows: &[Row], row: &Row) -> usize {
    rows.iter().filter(|r| *r == row).count()
}

fn distinct(rows: &[Row]) -> Vec<Row> {
    let mut out: Vec<Row> = Vec::new();
    for r in rows {
        if !out.contains(r) {
            out.push(r.clone());
        }
    }
    out
}

fn with<'a>(env: &[Frame<'a>], attrs: &'a [Attribute], row: &'a [Value]) -> Vec<Frame<'a>> {
    let mut e = env.to_vec();
    e.push(Frame { attrs, row });
    e
}

fn item_attr(e: &ValueExpr, attrs: &[Attribute]) -> Attribute {
    if let ValueExpr::Column(c) = e {
        if let Ok(Some(i)) = resolve(attrs, c) {
            return attrs[i].clone();
        }
    }
    Attribute::computed(print_expr(e))
}

/// Column references outside subqueries that name a non-key column.
fn only_key(e: &ValueExpr, attrs: &[Attribute], key: usize) -> R<()> {
    if let ValueExpr::Column(c) = e {
        if let Some(i) = resolve(attrs, c)? {
            if i != key {
                return Err(format!("{c} not grouped"));
            }
        }
    }
    e.children().into_iter().try_for_each(|ch| only_key(ch, attrs, key))
}

impl<'c> Oracle<'c> {
    pub fn new(catalog: &'c Catalog, mode: JoinMode) -> Self {
        Oracle { catalog, mode }
    }

    pub fn run(&self, q: &Query) -> R<Rel> {
        self.query(q, &[])
    }

    fn query(&self, q: &Query, env: &[Frame]) -> R<Rel> {
        let rel = match &q.body {
            QueryBody::Select(s) => self.select(s, env)?,
            QueryBody::SetOp { op, left, right } => {
                let l = self.query(left, env)?;
                let r = self.query(right, env)?;
                set_op(*op, l, r)?
            }
        };
        match &q.order_by {
            Some(o) => sort(rel, o),
            None => Ok(rel),
        }
    }

    fn base(&self, name: &str) -> R<Rel> {
        let t = self.catalog.tables.get(name).ok_or_else(|| format!("no table {name}"))?;
        Ok(Rel {
            attrs: t.attributes.clone(),
            rows: t.rows.clone(),
        })
    }

    fn holds(&self, e: &ValueExpr, env: &[Frame]) -> R<bool> {
        Ok(tv(&self.eval(e, env)?) == 2)
    }

    fn filter(&self, cond: &ValueExpr, rel: Rel, env: &[Frame]) -> R<Rel> {
        let mut rows = Vec::new();
        for r in &rel.rows {
            if self.holds(cond, &with(env, &rel.attrs, r))? {
                rows.push(r.clone());
            }
        }
        Ok(Rel { attrs: rel.attrs, rows })
    }

    fn table_ref(&self, t: &TableRef, env: &[Frame]) -> R<Rel> {
        let j = match t {
            TableRef::Table(n) => return self.base(n),
            TableRef::Join(j) => j,
        };
        if j.kind.is_qualified() != j.on.is_some() {
            return Err("ON mismatch".into());
        }
        let (a, b) = (self.base(&j.left)?, self.base(&j.right)?);
        let keep_left = matches!(j.kind, JoinKind::Left | JoinKind::Full);
        let keep_right = matches!(j.kind, JoinKind::Right | JoinKind::Full);
        match j.kind {
            JoinKind::Cross => Ok(product(&a, &b)),
            JoinKind::Inner => self.filter(j.on.as_ref().unwrap(), product(&a, &b), env),
            JoinKind::Natural => Ok(shared_join(&a, &b, false, false)),
            _ if self.mode == JoinMode::Padded => {
                self.filter(j.on.as_ref().unwrap(), shared_join(&a, &b, keep_left, keep_right), env)
            }
            _ => {
                let attrs: Vec<Attribute> = a.attrs.iter().chain(&b.attrs).cloned().collect();
                let on = j.on.as_ref().unwrap();
                let mut rows = Vec::new();
                let mut hit_right = vec![false; b.rows.len()];
                for r1 in &a.rows {
                    let mut hit = false;
                    for (k, r2) in b.rows.iter().enumerate() {
                        let row: Row = r1.iter().chain(r2).cloned().collect();
                        if self.holds(on, &with(env, &attrs, &row))? {
                            hit = true;
                            hit_right[k] = true;
                            rows.push(row);
                        }
                    }
                    if !hit && keep_left {
                        rows.push(r1.iter().cloned().chain(vec![Value::Null; b.attrs.len()]).collect());
                    }
                }
                if keep_right {
                    for (k, r2) in b.rows.iter().enumerate() {
                        if !hit_right[k] {
                            rows.push(vec![Value::Null; a.attrs.len()].into_iter().chain(r2.iter().cloned()).collect());
                        }
                    }
                }
                Ok(Rel { attrs, rows })
            }
        }
    }

    fn project(&self, items: &SelectList, rel: &Rel, env: &[Frame]) -> R<Rel> {
        let list = match items {
            SelectList::Star => return Ok(rel.clone()),
            SelectList::Items(l) => l,
        };
        let attrs = list.iter().map(|e| item_attr(e, &rel.attrs)).collect();
        if list.len() == 1 && list[0] == ValueExpr::Null {
            return Ok(Rel { attrs, rows: vec![] });
        }
        let mut rows = Vec::new();
        for r in &rel.rows {
            let e = with(env, &rel.attrs, r);
            rows.push(list.iter().map(|x| self.eval(x, &e)).collect::<R<Row>>()?);
        }
        Ok(Rel { attrs, rows })
    }

    fn aggregate(&self, f: AggFunc, items: &SelectList, rel: &Rel, env: &[Frame]) -> R<Value> {
        let col: Vec<Value> = match items {
            SelectList::Star if f == AggFunc::Count => return Ok(Value::Int(rel.rows.len() as i64)),
            SelectList::Star => return Err("agg(*)".into()),
            SelectList::Items(l) if l.len() == 1 => {
                self.project(items, rel, env)?.rows.into_iter().map(|mut r| r.remove(0)).collect()
            }
            SelectList::Items(_) => return Err("agg arity".into()),
        };
        let present: Vec<&Value> = col.iter().filter(|v| !v.is_null()).collect();
        if f == AggFunc::Count {
            return Ok(Value::Int(present.len() as i64));
        }
        if present.is_empty() {
            return Ok(Value::Null);
        }
        match f {
            AggFunc::Max | AggFunc::Min => {
                let want = if f == AggFunc::Max { Ordering::Greater } else { Ordering::Less };
                let mut best = present[0];
                for v in &present {
                    if ncmp(&cast_to_num(v), &cast_to_num(best)) == want {
                        best = v;
                    }
                }
                Ok(best.clone())
            }
            _ => {
                let mut sum = Value::Int(0);
                for v in &present {
                    sum = arith(ArithOp::Add, &sum, v)?;
                }
                if f == AggFunc::Sum {
                    Ok(sum)
                } else {
                    arith(ArithOp::Div, &sum, &Value::Int(present.len() as i64))
                }
            }
        }
    }

    fn agg_attr(f: AggFunc, items: &SelectList) -> Attribute {
        let inner = match items {
            SelectList::Star => "*".to_string(),
            SelectList::Items(l) => l.iter().map(print_expr).collect::<Vec<_>>().join(", "),
        };
        Attribute::computed(format!("{}({inner})", f.sql()))
    }

    fn select(&self, s: &Select, env: &[Frame]) -> R<Rel> {
        let mut rel = match &s.from {
            None => Rel {
                attrs: vec![],
                rows: vec![vec![]],
            },
            Some(refs) => {
                let mut it = refs.iter();
                let mut acc = self.table_ref(it.next().ok_or("empty FROM")?, env)?;
                for r in it {
                    acc = product(&acc, &self.table_ref(r, env)?);
                }
                acc
            }
        };
        if let Some(w) = &s.where_clause {
            rel = self.filter(w, rel, env)?;
        }
        let agg = s.aggregate();
        let out = match &s.group_by {
            None => {
                if s.having.is_some() {
                    return Err("HAVING without GROUP BY".into());
                }
                match agg {
                    None => self.project(&s.items, &rel, env)?,
                    Some(f) => Rel {
                        attrs: vec![Self::agg_attr(f, &s.items)],
                        rows: vec![vec![self.aggregate(f, &s.items, &rel, env)?]],
                    },
                }
            }
            Some(key) => {
                let k = resolve(&rel.attrs, key)?.ok_or("unknown group key")?;
                if let Some(h) = &s.having {
                    only_key(h, &rel.attrs, k)?;
                }
                if agg.is_none() {
                    match &s.items {
                        SelectList::Star => return Err("star with group".into()),
                        SelectList::Items(l) => {
                            for e in l {
                                only_key(e, &rel.attrs, k)?;
                            }
                        }
                    }
                }
                let keys = distinct(&rel.rows.iter().map(|r| vec![r[k].clone()]).collect::<Vec<_>>());
                let mut groups = Vec::new();
                for kv in keys {
                    let rows: Vec<Row> = rel.rows.iter().filter(|r| r[k] == kv[0]).cloned().collect();
                    let keep = match &s.having {
                        Some(h) => self.holds(h, &with(env, &rel.attrs, &rows[0]))?,
                        None => true,
                    };
                    if keep {
                        groups.push(Rel {
                            attrs: rel.attrs.clone(),
                            rows,
                        });
                    }
                }
                match agg {
                    Some(f) => Rel {
                        attrs: vec![Self::agg_attr(f, &s.items)],
                        rows: groups
                            .iter()
                            .map(|g| self.aggregate(f, &s.items, g, env).map(|v| vec![v]))
                            .collect::<R<_>>()?,
                    },
                    None => {
                        let firsts = Rel {
                            attrs: rel.attrs.clone(),
                            rows: groups.iter().map(|g| g.rows[0].clone()).collect(),
                        };
                        self.project(&s.items, &firsts, env)?
                    }
                }
            }
        };
        if s.modifier == Some(SelectModifier::Distinct) {
            let rows = distinct(&out.rows);
            return Ok(Rel { attrs: out.attrs, rows });
        }
        Ok(out)
    }

    fn sub(&self, q: &Query, env: &[Frame]) -> R<Rel> {
        self.query(q, env)
    }

    fn eval(&self, e: &ValueExpr, env: &[Frame]) -> R<Value> {
        Ok(match e {
            ValueExpr::Null => Value::Null,
            ValueExpr::Bool(b) => Value::Bool(*b),
            ValueExpr::Int(i) => Value::Int(*i),
            ValueExpr::Float(f) => mk_float(*f)?,
            ValueExpr::Str(s) => Value::Str(s.clone()),
            ValueExpr::Column(c) => {
                for f in env.iter().rev() {
                    if let Some(i) = resolve(f.attrs, c)? {
                        return Ok(f.row[i].clone());
                    }
                }
                return Err(format!("unknown column {c}"));
            }
            ValueExpr::Logical { op, left, right } => {
                let (a, b) = (tv(&self.eval(left, env)?), tv(&self.eval(right, env)?));
                from_tv(match op {
                    LogicalOp::And => a.min(b),
                    LogicalOp::Or => a.max(b),
                    LogicalOp::Xor if a == 1 || b == 1 => 1,
                    LogicalOp::Xor => {
                        if a != b {
                            2
                        } else {
                            0
                        }
                    }
                })
            }
            ValueExpr::Not(x) => from_tv(2 - tv(&self.eval(x, env)?)),
            ValueExpr::Is { expr, negated, test } => {
                let v = self.eval(expr, env)?;
                let r = match test {
                    IsTest::True => tv(&v) == 2,
                    IsTest::False => tv(&v) == 0,
                    IsTest::Unknown => tv(&v) == 1,
                    IsTest::Null => v.is_null(),
                };
                Value::Bool(r ^ negated)
            }
            ValueExpr::Compare { op, left, right } => cmp_values(*op, &self.eval(left, env)?, &self.eval(right, env)?),
            ValueExpr::Between { expr, negated, low, high } => {
                let x = self.eval(expr, env)?;
                let lo = self.eval(low, env)?;
                let hi = self.eval(high, env)?;
                let t = tv(&cmp_values(CompareOp::GtEq, &x, &lo)).min(tv(&cmp_values(CompareOp::LtEq, &x, &hi)));
                from_tv(negate(t, *negated))
            }
            ValueExpr::InList { expr, negated, list } => {
                let x = self.eval(expr, env)?;
                let items = list.iter().map(|i| self.eval(i, env)).collect::<R<Vec<_>>>()?;
                from_tv(negate(member(&x, items.iter()), *negated))
            }
            ValueExpr::InSubquery { expr, negated, query } => {
                let x = self.eval(expr, env)?;
                let t = self.sub(query, env)?;
                if t.attrs.len() != 1 {
                    return Err("IN arity".into());
                }
                from_tv(negate(member(&x, t.rows.iter().map(|r| &r[0])), *negated))
            }
            ValueExpr::Exists(q) => Value::Bool(!self.sub(q, env)?.rows.is_empty()),
            ValueExpr::Arith { op, left, right } => arith(*op, &self.eval(left, env)?, &self.eval(right, env)?)?,
            ValueExpr::Concat(a, b) => match (cast_to_str(&self.eval(a, env)?), cast_to_str(&self.eval(b, env)?)) {
                (Value::Str(x), Value::Str(y)) => Value::Str(x + &y),
                _ => Value::Null,
            },
            ValueExpr::Func { func, args } => {
                if args.len() != func.arity() {
                    return Err("arity".into());
                }
                let vals = args.iter().map(|a| self.eval(a, env)).collect::<R<Vec<_>>>()?;
                call(*func, &vals)?
            }
            ValueExpr::Case { when, then, otherwise } => {
                if self.holds(when, env)? {
                    self.eval(then, env)?
                } else {
                    self.eval(otherwise, env)?
                }
            }
            ValueExpr::Cast { expr, to } => {
                let v = self.eval(expr, env)?;
                match to {
                    DataType::String => cast_to_str(&v),
                    DataType::Numeric => cast_to_num(&v),
                    DataType::Boolean => cast_to_bool(&v),
                }
            }
            ValueExpr::Subquery(q) => {
                let t = self.sub(q, env)?;
                if t.attrs.len() != 1 {
                    return Err("scalar arity".into());
                }
                match t.rows.len() {
                    0 => Value::Null,
                    1 => t.rows[0][0].clone(),
                    _ => return Err("scalar cardinality".into()),
                }
            }
        })
    }
}

fn product(a: &Rel, b: &Rel) -> Rel {
    let mut rows = Vec::new();
    for r1 in &a.rows {
        for r2 in &b.rows {
            rows.push(r1.iter().chain(r2).cloned().collect());
        }
    }
    Rel {
        attrs: a.attrs.iter().chain(&b.attrs).cloned().collect(),
        rows,
    }
}

/// Join on equal, non-NULL same-named columns, merged into one output
/// column each; optionally padding unmatched rows of either side. Inputs
/// without a shared column join to nothing.
fn shared_join(a: &Rel, b: &Rel, keep_left: bool, keep_right: bool) -> Rel {
    let pairs: Vec<(usize, usize)> = (0..a.attrs.len())
        .filter_map(|i| b.attrs.iter().position(|x| x.name == a.attrs[i].name).map(|j| (i, j)))
        .collect();
    let lonly: Vec<usize> = (0..a.attrs.len()).filter(|i| !pairs.iter().any(|p| p.0 == *i)).collect();
    let ronly: Vec<usize> = (0..b.attrs.len()).filter(|j| !pairs.iter().any(|p| p.1 == *j)).collect();
    let mut attrs: Vec<Attribute> = pairs
        .iter()
        .map(|&(i, j)| Attribute {
            qualifiers: a.attrs[i].qualifiers.iter().chain(&b.attrs[j].qualifiers).cloned().collect(),
            name: a.attrs[i].name.clone(),
        })
        .collect();
    attrs.extend(lonly.iter().map(|&i| a.attrs[i].clone()));
    attrs.extend(ronly.iter().map(|&j| b.attrs[j].clone()));
    let mut rows = Vec::new();
    if pairs.is_empty() {
        return Rel { attrs, rows };
    }
    let build = |r1: Option<&Row>, r2: Option<&Row>| -> Row {
        let mut out: Row = pairs
            .iter()
            .map(|&(i, j)| match (r1, r2) {
                (Some(x), _) => x[i].clone(),
                (None, Some(y)) => y[j].clone(),
                _ => Value::Null,
            })
            .collect();
        out.extend(lonly.iter().map(|&i| r1.map_or(Value::Null, |x| x[i].clone())));
        out.extend(ronly.iter().map(|&j| r2.map_or(Value::Null, |y| y[j].clone())));
        out
    };
    let agree = |r1: &Row, r2: &Row| pairs.iter().all(|&(i, j)| !r1[i].is_null() && r1[i] == r2[j]);
    for r1 in &a.rows {
        let mut hit = false;
        for r2 in &b.rows {
            if agree(r1, r2) {
                hit = true;
                rows.push(build(Some(r1), Some(r2)));
            }
        }
        if !hit && keep_left {
            rows.push(build(Some(r1), None));
        }
    }
    if keep_right {
        for r2 in &b.rows {
            if !a.rows.iter().any(|r1| agree(r1, r2)) {
                rows.push(build(None, Some(r2)));
            }
        }
    }
    Rel { attrs, rows }
}

/// Output multiplicity of a row present `m1` times on the left and `m2`
/// times on the right.
pub fn set_multiplicity(op: SetOp, m1: usize, m2: usize) -> usize {
    match op {
        SetOp::UnionAll => m1 + m2,
        SetOp::Union => usize::from(m1 + m2 > 0),
        SetOp::IntersectAll => m1.min(m2),
        SetOp::Intersect => usize::from(m1 > 0 && m2 > 0),
        SetOp::ExceptAll => m1.saturating_sub(m2),
        SetOp::Except => usize::from(m1 > 0 && m2 == 0),
    }
}

fn set_op(op: SetOp, l: Rel, r: Rel) -> R<Rel> {
    if l.attrs.len() != r.attrs.len() {
        return Err("set-op arity".into());
    }
    let all: Vec<Row> = l.rows.iter().chain(&r.rows).cloned().collect();
    let mut rows = Vec::new();
    for d in distinct(&all) {
        let n = set_multiplicity(op, count(&l.rows, &d), count(&r.rows, &d));
        rows.extend(std::iter::repeat_n(d, n));
    }
    Ok(Rel { attrs: l.attrs, rows })
}

/// Ascending puts NULL keys first; descending is the exact reverse order.
/// Equal keys keep their input order.
fn sort(rel: Rel, o: &OrderBy) -> R<Rel> {
    let i = resolve(&rel.attrs, &o.column)?.ok_or("unknown order column")?;
    let before = |a: &Row, b: &Row| -> bool {
        let (x, y) = (cast_to_num(&a[i]), cast_to_num(&b[i]));
        let asc = match (x.is_null(), y.is_null()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => ncmp(&x, &y),
        };
        let ord = if o.direction == Direction::Asc { asc } else { asc.reverse() };
        ord == Ordering::Less
    };
    let mut out: Vec<Row> = Vec::new();
    for r in rel.rows {
        let mut at = out.len();
        while at > 0 && before(&r, &out[at - 1]) {
            at -= 1;
        }
        out.insert(at, r);
    }
    Ok(Rel { attrs: rel.attrs, rows: out })
}

/// The sort-key sequence of an ordered result.
pub fn key_sequence(attrs: &[Attribute], rows: &[Row], o: &OrderBy) -> Option<Vec<Value>> {
    let i = resolve(attrs, &o.column).ok().flatten()?;
    Some(rows.iter().map(|r| cast_to_num(&r[i])).collect())
}

/// Key sequences that sort identically: NULL against NULL, numbers by
/// numeric equality (`1` and `1.0` tie).
pub fn same_order(a: &[Value], b: &[Value]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| match (x.is_null(), y.is_null()) {
            (true, true) => true,
            (false, false) => ncmp(x, y).is_eq(),
            _ => false,
        })
}

/// Same rows with the same multiplicities, by pairwise counting.
pub fn bag_equal(a: &[Row], b: &[Row]) -> bool {
    a.len() == b.len() && distinct(a).iter().all(|d| count(a, d) == count(b, d))
}
