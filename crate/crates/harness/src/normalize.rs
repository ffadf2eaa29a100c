//! Mapping target driver values into the reference value domain, and the
//! two-decimal rounding applied to float-tagged results.

use thiserror::Error;

use sqlsem_core::table::{Attribute, BagTable, Row};
use sqlsem_core::Value;

/// A cell as a client driver hands it over.
#[derive(Debug, Clone, PartialEq)]
pub enum RawValue {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    Blob(Vec<u8>),
}

pub type Grid = Vec<Vec<RawValue>>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormalizeError {
    #[error("unmappable value {0}")]
    UnmappableValue(String),
    #[error("ragged result: row {row} has {got} cells, expected {expected}")]
    Ragged { row: usize, got: usize, expected: usize },
}

fn map(v: &RawValue) -> Result<Value, NormalizeError> {
    Ok(match v {
        RawValue::Null => Value::Null,
        RawValue::Bool(b) => Value::Bool(*b),
        RawValue::Int(i) => Value::Int(*i),
        RawValue::Float(f) => Value::float(*f).map_err(|_| NormalizeError::UnmappableValue(format!("float {f}")))?,
        RawValue::Text(s) => Value::Str(s.clone()),
        RawValue::Blob(b) => return Err(NormalizeError::UnmappableValue(format!("blob of {} bytes", b.len()))),
    })
}

/// Maps a driver grid and normalizes it like a reference result.
pub fn normalize(grid: &Grid, float_tagged: bool) -> Result<BagTable, NormalizeError> {
    let width = grid.first().map_or(0, Vec::len);
    let mut rows = Vec::with_capacity(grid.len());
    for (i, r) in grid.iter().enumerate() {
        if r.len() != width {
            return Err(NormalizeError::Ragged {
                row: i,
                got: r.len(),
                expected: width,
            });
        }
        rows.push(r.iter().map(map).collect::<Result<Row, _>>()?);
    }
    let attributes = (0..width).map(|i| Attribute::computed(format!("c{i}"))).collect();
    Ok(normalize_table(&BagTable::new(attributes, rows), float_tagged))
}

/// Booleans become 0/1 (targets without a boolean type report integers);
/// when tagged, floats round half away from zero to two decimals.
pub fn normalize_table(t: &BagTable, float_tagged: bool) -> BagTable {
    let rows = t
        .rows
        .iter()
        .map(|r| r.iter().map(|v| normalize_value(v, float_tagged)).collect())
        .collect();
    BagTable {
        rows,
        ..t.clone()
    }
}

pub fn normalize_value(v: &Value, float_tagged: bool) -> Value {
    match v {
        Value::Bool(b) => Value::Int(*b as i64),
        Value::Float(f) if float_tagged => Value::Float(round2(*f)),
        other => other.clone(),
    }
}

/// Half-away-from-zero rounding to two decimals of the shortest decimal
/// reading of `x`, so 2.345 rounds to 2.35 even though its binary value
/// lies just below. Negative zero comes back as zero.
pub fn round2(x: f64) -> f64 {
    let text = format!("{}", x.abs());
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    if frac.len() <= 2 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let mut digits: Vec<u8> = int.bytes().chain(frac.bytes().take(2)).map(|b| b - b'0').collect();
    if frac.as_bytes()[2] >= b'5' {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, 1);
                break;
            }
            i -= 1;
            if digits[i] == 9 {
                digits[i] = 0;
            } else {
                digits[i] += 1;
                break;
            }
        }
    }
    let n = digits.len();
    let s: String = digits[..n - 2]
        .iter()
        .map(|d| (d + b'0') as char)
        .chain(std::iter::once('.'))
        .chain(digits[n - 2..].iter().map(|d| (d + b'0') as char))
        .collect();
    let r: f64 = s.parse().expect("decimal digits");
    if r == 0.0 {
        0.0
    } else if x < 0.0 {
        -r
    } else {
        r
    }
}
