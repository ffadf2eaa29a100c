//! Scalar values and the total cast rules between the three domains.
//!
//! Two equivalences live here. [`Value`]'s `Eq`/`Hash` implement *multiset
//! identity*: NULL equals NULL and values of different tags are distinct.
//! SQL comparison, where NULL is unknown and operands are compared
//! numerically, lives in the evaluator.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::QueryError;

#[derive(Debug, Clone)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    /// Finite; `-0.0` is stored as `0.0`.
    Float(f64),
    Str(String),
}

impl Value {
    /// Builds a float value, rejecting NaN and infinities.
    pub fn float(f: f64) -> Result<Value, QueryError> {
        if f.is_finite() {
            Ok(Value::Float(if f == 0.0 { 0.0 } else { f }))
        } else {
            Err(QueryError::Domain(format!("non-finite result {f}")))
        }
    }

    pub fn str(s: impl Into<String>) -> Value {
        Value::Str(s.into())
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Value::Null => "NULL",
            Value::Bool(_) => "BOOL",
            Value::Int(_) => "INT",
            Value::Float(_) => "FLOAT",
            Value::Str(_) => "STR",
        }
    }

    fn tag_rank(&self) -> u8 {
        match self {
            Value::Null => 0,
            Value::Bool(_) => 1,
            Value::Int(_) => 2,
            Value::Float(_) => 3,
            Value::Str(_) => 4,
        }
    }

    /// Total order consistent with multiset identity. Used for
    /// deterministic output, never for SQL semantics.
    pub fn identity_cmp(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Null, Value::Null) => Ordering::Equal,
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Float(a), Value::Float(b)) => a.total_cmp(b),
            (Value::Str(a), Value::Str(b)) => a.cmp(b),
            _ => self.tag_rank().cmp(&other.tag_rank()),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        self.identity_cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.tag_rank().hash(state);
        match self {
            Value::Null => {}
            Value::Bool(b) => b.hash(state),
            Value::Int(i) => i.hash(state),
            Value::Float(f) => f.to_bits().hash(state),
            Value::Str(s) => s.hash(state),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        self.identity_cmp(other)
    }
}

/// Renders a value in fixture cell syntax.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("NULL"),
            Value::Bool(true) => f.write_str("TRUE"),
            Value::Bool(false) => f.write_str("FALSE"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => f.write_str(&float_literal(*x)),
            Value::Str(s) => write!(f, "'{}'", s.replace('\'', "''")),
        }
    }
}

/// Float text that always carries a decimal point, so it reads back as a
/// float rather than an integer.
pub fn float_literal(x: f64) -> String {
    let s = num2str_float(x);
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

/// Parses the maximal leading numeric prefix of `s`.
///
/// Optional sign, digits, optional fraction. An integral prefix yields INT,
/// a fractional one FLOAT, and no prefix at all yields `INT(0)`.
pub fn str2num(s: &str) -> Value {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let int_digits = i - int_start;
    let mut frac_digits = 0;
    if i < b.len() && b[i] == b'.' {
        let mut j = i + 1;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        frac_digits = j - i - 1;
        if frac_digits > 0 {
            i = j;
        }
    }
    if int_digits == 0 && frac_digits == 0 {
        return Value::Int(0);
    }
    let prefix = &s[..i];
    if frac_digits == 0 {
        if let Ok(n) = prefix.parse::<i64>() {
            return Value::Int(n);
        }
    }
    let text = if int_digits == 0 {
        // "-.5" style: give the float parser a leading zero
        let (sign, rest) = prefix.split_at(int_start);
        format!("{sign}0{rest}")
    } else {
        prefix.to_string()
    };
    let f: f64 = text.parse().unwrap_or(0.0);
    // Saturate absurdly long digit strings rather than produce infinity.
    let f = if f.is_finite() {
        f
    } else if f > 0.0 {
        f64::MAX
    } else {
        f64::MIN
    };
    Value::Float(if f == 0.0 { 0.0 } else { f })
}

/// Canonical number rendering: integers without a decimal point, floats as
/// the shortest round-tripping decimal with a trailing `.0` suppressed.
pub fn num2str(v: &Value) -> Option<String> {
    match v {
        Value::Int(i) => Some(i.to_string()),
        Value::Float(f) => Some(num2str_float(*f)),
        _ => None,
    }
}

fn num2str_float(f: f64) -> String {
    if f == 0.0 {
        return "0".to_string();
    }
    format!("{f}")
}

pub fn cast_to_bool(v: &Value) -> Value {
    match v {
        Value::Null => Value::Null,
        Value::Bool(b) => Value::Bool(*b),
        Value::Int(i) => Value::Bool(*i != 0),
        Value::Float(f) => Value::Bool(*f != 0.0),
        Value::Str(s) => Value::Bool(!matches!(s.as_str(), "0" | "false" | "")),
    }
}

pub fn cast_to_num(v: &Value) -> Value {
    match v {
        Value::Null => Value::Null,
        Value::Bool(b) => Value::Int(*b as i64),
        Value::Int(_) | Value::Float(_) => v.clone(),
        Value::Str(s) => str2num(s),
    }
}

pub fn cast_to_str(v: &Value) -> Value {
    match v {
        Value::Null => Value::Null,
        Value::Bool(b) => Value::Str(if *b { "1" } else { "0" }.to_string()),
        Value::Int(_) | Value::Float(_) => Value::Str(num2str(v).unwrap_or_default()),
        Value::Str(_) => v.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bool_casts() {
        assert_eq!(cast_to_bool(&Value::str("0")), Value::Bool(false));
        assert_eq!(cast_to_bool(&Value::str("false")), Value::Bool(false));
        assert_eq!(cast_to_bool(&Value::str("")), Value::Bool(false));
        assert_eq!(cast_to_bool(&Value::str("hhhh")), Value::Bool(true));
        assert_eq!(cast_to_bool(&Value::Int(0)), Value::Bool(false));
        assert_eq!(cast_to_bool(&Value::Float(0.5)), Value::Bool(true));
        assert_eq!(cast_to_bool(&Value::Null), Value::Null);
    }

    #[test]
    fn num_casts() {
        assert_eq!(cast_to_num(&Value::str("hhhh")), Value::Int(0));
        assert_eq!(cast_to_num(&Value::str("-12")), Value::Int(-12));
        assert_eq!(cast_to_num(&Value::Bool(true)), Value::Int(1));
        assert_eq!(cast_to_num(&Value::Bool(false)), Value::Int(0));
        assert_eq!(cast_to_num(&Value::str("3.25xyz")), Value::Float(3.25));
        assert_eq!(cast_to_num(&Value::str("12.")), Value::Int(12));
        assert_eq!(cast_to_num(&Value::str("-.5")), Value::Float(-0.5));
        assert_eq!(cast_to_num(&Value::str("-")), Value::Int(0));
        assert_eq!(cast_to_num(&Value::str(" 7")), Value::Int(0));
        assert_eq!(cast_to_num(&Value::Null), Value::Null);
    }

    #[test]
    fn str_casts() {
        assert_eq!(cast_to_str(&Value::Bool(false)), Value::str("0"));
        assert_eq!(cast_to_str(&Value::Int(42)), Value::str("42"));
        assert_eq!(cast_to_str(&Value::Float(2.5)), Value::str("2.5"));
        assert_eq!(cast_to_str(&Value::Float(3.0)), Value::str("3"));
        assert_eq!(cast_to_str(&Value::Null), Value::Null);
    }

    #[test]
    fn float_rejects_non_finite_and_negative_zero() {
        assert!(Value::float(f64::NAN).is_err());
        assert!(Value::float(f64::INFINITY).is_err());
        assert_eq!(Value::float(-0.0).unwrap(), Value::Float(0.0));
    }

    #[test]
    fn null_is_distinct_from_false_and_zero() {
        assert_ne!(Value::Null, Value::Bool(false));
        assert_ne!(Value::Null, Value::Int(0));
        assert_eq!(Value::Null, Value::Null);
    }

    fn any_value() -> impl Strategy<Value = Value> {
        prop_oneof![
            Just(Value::Null),
            any::<bool>().prop_map(Value::Bool),
            any::<i64>().prop_map(Value::Int),
            (-1e9f64..1e9).prop_map(|f| Value::float(f).unwrap()),
            "[ -~]{0,8}".prop_map(Value::Str),
        ]
    }

    proptest! {
        #[test]
        fn int_survives_str_round_trip(n in any::<i64>()) {
            prop_assert_eq!(cast_to_num(&cast_to_str(&Value::Int(n))), Value::Int(n));
        }

        #[test]
        fn bool_cast_is_idempotent(v in any_value()) {
            let once = cast_to_bool(&v);
            prop_assert_eq!(cast_to_bool(&once), once);
        }

        #[test]
        fn float_str_round_trip(f in -1e12f64..1e12) {
            let v = Value::float(f).unwrap();
            let back = cast_to_num(&cast_to_str(&v));
            match back {
                Value::Int(i) => prop_assert_eq!(i as f64, f),
                Value::Float(g) => prop_assert_eq!(g, f),
                other => prop_assert!(false, "unexpected {:?}", other),
            }
        }
    }
}
