//! Value-expression evaluation.
//!
//! [`eval`] computes an expression's natural value; operators cast their
//! operands into the domain they work in (logic in booleans, arithmetic and
//! comparison in numbers, `||` and string functions in strings). The three
//! domain evaluators are casts of the natural value.

use std::cmp::Ordering;

use crate::ast::*;
use crate::error::QueryError;
use crate::exec;
use crate::options::{ExecOptions, Fault};
use crate::table::{resolve_in, Attribute, Catalog};
use crate::value::{cast_to_bool, cast_to_num, cast_to_str, Value};

/// Column bindings of one query level: the attributes and the current row.
#[derive(Debug, Clone, Copy)]
pub struct Scope<'a> {
    pub attributes: &'a [Attribute],
    pub row: &'a [Value],
}

/// Evaluation context. `scopes` runs outermost first; name resolution walks
/// it from the innermost end.
#[derive(Debug, Clone)]
pub struct EvalEnv<'a> {
    pub catalog: &'a Catalog,
    pub opts: &'a ExecOptions,
    pub scopes: Vec<Scope<'a>>,
}

impl<'a> EvalEnv<'a> {
    pub fn new(catalog: &'a Catalog, opts: &'a ExecOptions) -> Self {
        EvalEnv {
            catalog,
            opts,
            scopes: Vec::new(),
        }
    }

    /// A copy of this environment with one more (innermost) scope.
    pub fn push<'b>(&self, attributes: &'b [Attribute], row: &'b [Value]) -> EvalEnv<'b>
    where
        'a: 'b,
    {
        let mut scopes: Vec<Scope<'b>> = self.scopes.clone();
        scopes.push(Scope { attributes, row });
        EvalEnv {
            catalog: self.catalog,
            opts: self.opts,
            scopes,
        }
    }

    pub fn lookup(&self, col: &ColumnRef) -> Result<Value, QueryError> {
        for s in self.scopes.iter().rev() {
            if let Some(i) = resolve_in(s.attributes, col)? {
                return Ok(s.row[i].clone());
            }
        }
        Err(QueryError::UnknownColumn(col.to_string()))
    }
}

/// Kleene truth value of a value already in the boolean domain.
fn truth(v: &Value) -> Option<bool> {
    match cast_to_bool(v) {
        Value::Bool(b) => Some(b),
        _ => None,
    }
}

fn from_truth(t: Option<bool>) -> Value {
    t.map_or(Value::Null, Value::Bool)
}

pub fn kleene_and(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

pub fn kleene_or(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    }
}

pub fn kleene_xor(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    Some(a? != b?)
}

pub fn kleene_not(a: Option<bool>) -> Option<bool> {
    a.map(|b| !b)
}

/// Numeric comparison of two non-null numbers, exact across INT/FLOAT.
pub fn num_cmp(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => x.cmp(y),
        (Value::Float(x), Value::Float(y)) => x.total_cmp(y),
        (Value::Int(x), Value::Float(y)) => int_float_cmp(*x, *y),
        (Value::Float(x), Value::Int(y)) => int_float_cmp(*y, *x).reverse(),
        _ => unreachable!("num_cmp on non-numeric values"),
    }
}

fn int_float_cmp(i: i64, f: f64) -> Ordering {
    // 2^63 is exactly representable; anything at or beyond it exceeds every i64.
    const TWO_63: f64 = 9_223_372_036_854_775_808.0;
    if f >= TWO_63 {
        return Ordering::Less;
    }
    if f < -TWO_63 {
        return Ordering::Greater;
    }
    let t = f.trunc();
    match i.cmp(&(t as i64)) {
        Ordering::Equal => 0.0f64.total_cmp(&(f - t)).then(Ordering::Equal),
        o => o,
    }
}

/// SQL comparison: both sides cast to numbers; NULL if either is NULL.
pub fn sql_compare(op: CompareOp, a: &Value, b: &Value) -> Value {
    let (a, b) = (cast_to_num(a), cast_to_num(b));
    if a.is_null() || b.is_null() {
        return Value::Null;
    }
    let o = num_cmp(&a, &b);
    Value::Bool(match op {
        CompareOp::Eq => o == Ordering::Equal,
        CompareOp::NotEq => o != Ordering::Equal,
        CompareOp::Lt => o == Ordering::Less,
        CompareOp::Gt => o == Ordering::Greater,
        CompareOp::LtEq => o != Ordering::Greater,
        CompareOp::GtEq => o != Ordering::Less,
    })
}

/// Three-valued membership of `x` among `items`.
pub fn membership<'v>(x: &Value, items: impl IntoIterator<Item = &'v Value>) -> Option<bool> {
    let mut acc = Some(false);
    for it in items {
        acc = kleene_or(acc, truth(&sql_compare(CompareOp::Eq, x, it)));
        if acc == Some(true) {
            break;
        }
    }
    acc
}

pub fn eval_bool(e: &ValueExpr, env: &EvalEnv) -> Result<Value, QueryError> {
    Ok(cast_to_bool(&eval(e, env)?))
}

pub fn eval_num(e: &ValueExpr, env: &EvalEnv) -> Result<Value, QueryError> {
    Ok(cast_to_num(&eval(e, env)?))
}

pub fn eval_str(e: &ValueExpr, env: &EvalEnv) -> Result<Value, QueryError> {
    Ok(cast_to_str(&eval(e, env)?))
}

/// CASE evaluated in a requested domain. A NULL condition takes ELSE.
pub fn eval_case(e: &ValueExpr, env: &EvalEnv, domain: Domain) -> Result<Value, QueryError> {
    let v = eval(e, env)?;
    Ok(match domain {
        Domain::Bool => cast_to_bool(&v),
        Domain::Num => cast_to_num(&v),
        Domain::Str => cast_to_str(&v),
    })
}

/// Whether `e` holds (is TRUE) in `env`; FALSE and NULL both fail.
pub fn holds(e: &ValueExpr, env: &EvalEnv) -> Result<bool, QueryError> {
    Ok(truth(&eval(e, env)?) == Some(true))
}

pub fn eval(e: &ValueExpr, env: &EvalEnv) -> Result<Value, QueryError> {
    match e {
        ValueExpr::Null => Ok(Value::Null),
        ValueExpr::Bool(b) => Ok(Value::Bool(*b)),
        ValueExpr::Int(i) => Ok(Value::Int(*i)),
        ValueExpr::Float(f) => Value::float(*f),
        ValueExpr::Str(s) => Ok(Value::Str(s.clone())),
        ValueExpr::Column(c) => env.lookup(c),
        ValueExpr::Logical { op, left, right } => {
            let a = truth(&eval(left, env)?);
            let b = truth(&eval(right, env)?);
            let r = match op {
                LogicalOp::And => {
                    if env.opts.has(Fault::AndNullFalse)
                        && matches!((a, b), (None, Some(false)) | (Some(false), None))
                    {
                        None
                    } else {
                        kleene_and(a, b)
                    }
                }
                LogicalOp::Or => kleene_or(a, b),
                LogicalOp::Xor => kleene_xor(a, b),
            };
            Ok(from_truth(r))
        }
        ValueExpr::Not(inner) => Ok(from_truth(kleene_not(truth(&eval(inner, env)?)))),
        ValueExpr::Is {
            expr,
            negated,
            test,
        } => {
            let v = eval(expr, env)?;
            let t = truth(&v);
            let r = match test {
                IsTest::True => t == Some(true),
                IsTest::False => t == Some(false) || (t.is_none() && env.opts.has(Fault::NullIsFalse)),
                IsTest::Unknown => t.is_none(),
                IsTest::Null => v.is_null(),
            };
            Ok(Value::Bool(r != *negated))
        }
        ValueExpr::Compare { op, left, right } => {
            let a = eval(left, env)?;
            let b = eval(right, env)?;
            Ok(sql_compare(*op, &a, &b))
        }
        ValueExpr::Between {
            expr,
            negated,
            low,
            high,
        } => {
            let x = eval(expr, env)?;
            let lo = eval(low, env)?;
            let hi = eval(high, env)?;
            let r = kleene_and(
                truth(&sql_compare(CompareOp::GtEq, &x, &lo)),
                truth(&sql_compare(CompareOp::LtEq, &x, &hi)),
            );
            Ok(from_truth(if *negated { kleene_not(r) } else { r }))
        }
        ValueExpr::InList {
            expr,
            negated,
            list,
        } => {
            let x = eval(expr, env)?;
            let items = list
                .iter()
                .map(|i| eval(i, env))
                .collect::<Result<Vec<_>, _>>()?;
            let r = membership(&x, &items);
            Ok(from_truth(if *negated { kleene_not(r) } else { r }))
        }
        ValueExpr::InSubquery {
            expr,
            negated,
            query,
        } => {
            let x = eval(expr, env)?;
            let t = exec::execute_in(query, env)?;
            if t.arity() != 1 {
                return Err(QueryError::Subquery(format!(
                    "IN subquery returns {} columns",
                    t.arity()
                )));
            }
            let r = membership(&x, t.rows.iter().map(|r| &r[0]));
            Ok(from_truth(if *negated { kleene_not(r) } else { r }))
        }
        ValueExpr::Exists(q) => {
            let t = exec::execute_in(q, env)?;
            Ok(Value::Bool(!t.is_empty()))
        }
        ValueExpr::Arith { op, left, right } => {
            let a = eval_num(left, env)?;
            let b = eval_num(right, env)?;
            arith(*op, &a, &b)
        }
        ValueExpr::Concat(left, right) => {
            let a = eval_str(left, env)?;
            let b = eval_str(right, env)?;
            Ok(match (a, b) {
                (Value::Str(a), Value::Str(b)) => Value::Str(a + &b),
                _ => Value::Null,
            })
        }
        ValueExpr::Func { func, args } => {
            if args.len() != func.arity() {
                return Err(QueryError::FuncArity {
                    func: func.name(),
                    expected: func.arity(),
                    got: args.len(),
                });
            }
            let vals = args
                .iter()
                .map(|a| eval(a, env))
                .collect::<Result<Vec<_>, _>>()?;
            call(*func, &vals, env.opts)
        }
        ValueExpr::Case {
            when,
            then,
            otherwise,
        } => {
            if holds(when, env)? {
                eval(then, env)
            } else {
                eval(otherwise, env)
            }
        }
        ValueExpr::Cast { expr, to } => {
            let v = eval(expr, env)?;
            Ok(match to {
                DataType::String => cast_to_str(&v),
                DataType::Numeric => cast_to_num(&v),
                DataType::Boolean => cast_to_bool(&v),
            })
        }
        ValueExpr::Subquery(q) => {
            let t = exec::execute_in(q, env)?;
            if t.arity() != 1 {
                return Err(QueryError::Subquery(format!(
                    "scalar subquery returns {} columns",
                    t.arity()
                )));
            }
            match t.rows.len() {
                0 => Ok(Value::Null),
                1 => Ok(t.rows[0][0].clone()),
                n => Err(QueryError::Subquery(format!("scalar subquery returns {n} rows"))),
            }
        }
    }
}

fn as_f64(v: &Value) -> f64 {
    match v {
        Value::Int(i) => *i as f64,
        Value::Float(f) => *f,
        _ => unreachable!("numeric operand expected"),
    }
}

fn overflow(what: &str) -> QueryError {
    QueryError::Overflow(what.to_string())
}

/// Arithmetic over values already cast to numbers.
pub fn arith(op: ArithOp, a: &Value, b: &Value) -> Result<Value, QueryError> {
    if a.is_null() || b.is_null() {
        return Ok(Value::Null);
    }
    if op == ArithOp::Div {
        if as_f64(b) == 0.0 {
            return Err(QueryError::Domain("division by zero".into()));
        }
        return Value::float(as_f64(a) / as_f64(b));
    }
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => {
            let r = match op {
                ArithOp::Add => x.checked_add(*y),
                ArithOp::Sub => x.checked_sub(*y),
                ArithOp::Mul => x.checked_mul(*y),
                ArithOp::Div => unreachable!(),
            };
            r.map(Value::Int).ok_or_else(|| overflow(op.sql()))
        }
        _ => {
            let (x, y) = (as_f64(a), as_f64(b));
            Value::float(match op {
                ArithOp::Add => x + y,
                ArithOp::Sub => x - y,
                ArithOp::Mul => x * y,
                ArithOp::Div => unreachable!(),
            })
        }
    }
}

/// Float-to-integer rounding result: INT when representable.
fn integral(f: f64) -> Result<Value, QueryError> {
    if (-9.2e18..9.2e18).contains(&f) {
        Ok(Value::Int(f as i64))
    } else {
        Value::float(f)
    }
}

pub fn call(func: Func, args: &[Value], opts: &ExecOptions) -> Result<Value, QueryError> {
    let nums: Vec<Value> = args.iter().map(cast_to_num).collect();
    let strs: Vec<Value> = args.iter().map(cast_to_str).collect();
    if args.iter().any(Value::is_null) {
        return Ok(Value::Null);
    }
    let s0 = || match &strs[0] {
        Value::Str(s) => s.as_str(),
        _ => unreachable!(),
    };
    match func {
        Func::Mod => {
            let (a, b) = (&nums[0], &nums[1]);
            if as_f64(b) == 0.0 {
                return Err(QueryError::Domain("MOD by zero".into()));
            }
            let r = match (a, b) {
                (Value::Int(x), Value::Int(y)) => Value::Int(x.checked_rem(*y).unwrap_or(0)),
                _ => Value::float(as_f64(a) % as_f64(b))?,
            };
            if opts.has(Fault::ModDivisorSign) {
                let rf = as_f64(&r);
                if rf != 0.0 && (rf < 0.0) != (as_f64(b) < 0.0) {
                    return arith(ArithOp::Add, &r, b);
                }
            }
            Ok(r)
        }
        Func::Length | Func::CharLength | Func::CharacterLength => {
            Ok(Value::Int(s0().chars().count() as i64))
        }
        Func::Abs => match &nums[0] {
            Value::Int(i) => i.checked_abs().map(Value::Int).ok_or_else(|| overflow("ABS")),
            v => Value::float(as_f64(v).abs()),
        },
        Func::Ln => {
            let x = as_f64(&nums[0]);
            if x <= 0.0 {
                return Err(QueryError::Domain(format!("LN of {x}")));
            }
            Value::float(x.ln())
        }
        Func::Exp => Value::float(as_f64(&nums[0]).exp()),
        Func::Power => Value::float(as_f64(&nums[0]).powf(as_f64(&nums[1]))),
        Func::Sqrt => {
            let x = as_f64(&nums[0]);
            if x < 0.0 {
                return Err(QueryError::Domain(format!("SQRT of {x}")));
            }
            Value::float(x.sqrt())
        }
        Func::Floor => match &nums[0] {
            Value::Int(i) => Ok(Value::Int(*i)),
            v => integral(as_f64(v).floor()),
        },
        Func::Ceil | Func::Ceiling => match &nums[0] {
            Value::Int(i) => Ok(Value::Int(*i)),
            v => integral(as_f64(v).ceil()),
        },
        Func::Substring => {
            let start = match &nums[1] {
                Value::Int(i) => *i,
                v => as_f64(v).trunc().clamp(i64::MIN as f64, i64::MAX as f64) as i64,
            };
            let skip = if opts.has(Fault::SubstringZeroBased) {
                start.max(0)
            } else {
                start.max(1) - 1
            };
            let skip = usize::try_from(skip).unwrap_or(usize::MAX);
            Ok(Value::Str(s0().chars().skip(skip).collect()))
        }
        Func::Ltrim => Ok(Value::str(s0().trim_start_matches(' '))),
        Func::Rtrim => Ok(Value::str(s0().trim_end_matches(' '))),
        Func::Upper => Ok(Value::str(s0().to_ascii_uppercase())),
        Func::Lower => Ok(Value::str(s0().to_ascii_lowercase())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expr;

    fn ev(text: &str) -> Value {
        let cat = Catalog::new();
        let opts = ExecOptions::default();
        eval(&parse_expr(text).unwrap(), &EvalEnv::new(&cat, &opts)).unwrap()
    }

    fn ev_err(text: &str) -> QueryError {
        let cat = Catalog::new();
        let opts = ExecOptions::default();
        eval(&parse_expr(text).unwrap(), &EvalEnv::new(&cat, &opts)).unwrap_err()
    }

    #[test]
    fn is_family_never_null() {
        assert_eq!(ev("NULL IS FALSE"), Value::Bool(false));
        assert_eq!(ev("NULL IS TRUE"), Value::Bool(false));
        assert_eq!(ev("NULL IS UNKNOWN"), Value::Bool(true));
        assert_eq!(ev("NULL IS NOT NULL"), Value::Bool(false));
    }

    #[test]
    fn mod_cases() {
        assert_eq!(ev("MOD('-12', -4)"), Value::Int(0));
        assert_eq!(ev("MOD(-7, 3)"), Value::Int(-1));
        assert_eq!(ev("MOD(7, -3)"), Value::Int(1));
        assert_eq!(ev("MOD(-9223372036854775808, -1)"), Value::Int(0));
        assert!(matches!(ev_err("MOD(1, 0)"), QueryError::Domain(_)));
    }

    #[test]
    fn numeric_functions() {
        assert_eq!(ev("LENGTH('abc')"), Value::Int(3));
        assert_eq!(ev("POWER(2, 10)"), Value::Float(1024.0));
        assert_eq!(ev("FLOOR(-1.5)"), Value::Int(-2));
        assert_eq!(ev("CEIL(-1.5)"), Value::Int(-1));
        assert_eq!(ev("ABS(-3)"), Value::Int(3));
        assert!(matches!(ev_err("LN(0)"), QueryError::Domain(_)));
        assert!(matches!(ev_err("SQRT(-1)"), QueryError::Domain(_)));
        assert!(matches!(ev_err("1 / 0"), QueryError::Domain(_)));
        assert!(matches!(ev_err("9223372036854775807 + 1"), QueryError::Overflow(_)));
        assert_eq!(ev("7 / 2"), Value::Float(3.5));
    }

    #[test]
    fn string_functions() {
        assert_eq!(ev("'Hello' || NULL"), Value::Null);
        assert_eq!(ev("UPPER('ab1')"), Value::str("AB1"));
        assert_eq!(ev("SUBSTRING('hello' FROM 2)"), Value::str("ello"));
        assert_eq!(ev("SUBSTRING('hello' FROM 0)"), Value::str("hello"));
        assert_eq!(ev("SUBSTRING('hello' FROM 9)"), Value::str(""));
        assert_eq!(ev("LTRIM('  a ')"), Value::str("a "));
        assert_eq!(ev("RTRIM('  a ')"), Value::str("  a"));
        assert_eq!(ev("1 || TRUE"), Value::str("11"));
    }

    #[test]
    fn case_and_cast() {
        assert_eq!(ev("CASE WHEN TRUE THEN 1 ELSE 2 END"), Value::Int(1));
        assert_eq!(ev("CASE WHEN 0 THEN 'a' ELSE 'b' END"), Value::str("b"));
        assert_eq!(ev("CASE WHEN NULL THEN 1 ELSE 2 END"), Value::Int(2));
        assert_eq!(ev("CAST('12abc' AS numeric)"), Value::Int(12));
        assert_eq!(ev("CAST(FALSE AS string)"), Value::str("0"));
    }

    #[test]
    fn comparisons_cast_numerically() {
        assert_eq!(ev("FALSE != 'hhhh'"), Value::Bool(false));
        assert_eq!(ev("NOT (NULL IS FALSE) != 'hhhh'"), Value::Bool(true));
        assert_eq!(ev("1 = 1.0"), Value::Bool(true));
        assert_eq!(ev("2 > 1.5"), Value::Bool(true));
        assert_eq!(ev("NULL = NULL"), Value::Null);
        assert_eq!(ev("2 BETWEEN 1 AND 3"), Value::Bool(true));
        assert_eq!(ev("NULL BETWEEN 1 AND 3"), Value::Null);
    }

    #[test]
    fn in_list_three_valued() {
        assert_eq!(ev("1 IN (2, 1)"), Value::Bool(true));
        assert_eq!(ev("1 IN (2, NULL)"), Value::Null);
        assert_eq!(ev("1 NOT IN (2, 3)"), Value::Bool(true));
        assert_eq!(ev("1 IN (2, 3)"), Value::Bool(false));
    }

    #[test]
    fn int_float_ordering_is_exact() {
        assert_eq!(int_float_cmp(i64::MAX, 9_223_372_036_854_775_808.0), Ordering::Less);
        assert_eq!(int_float_cmp(3, 2.5), Ordering::Greater);
        assert_eq!(int_float_cmp(-3, -2.5), Ordering::Less);
        assert_eq!(int_float_cmp(2, 2.0), Ordering::Equal);
    }
}
