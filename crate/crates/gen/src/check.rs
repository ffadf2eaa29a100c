use sqlsem_core::ast::*;
use sqlsem_core::printer::print;
use sqlsem_core::table::Catalog;
use sqlsem_core::value::Value;
use sqlsem_core::{parse, validate as resolve, JoinMode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid { reason: &'static str, detail: String },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        *self == Verdict::Valid
    }
}

/// Syntax (the printed text parses back to the same tree), resolution of
/// every table and column, function arities and clause shapes. Every cast
/// is total, so there are no further type checks.
pub fn validate(q: &Query, catalog: &Catalog, mode: JoinMode) -> Verdict {
    let text = print(q);
    match parse(&text) {
        Err(e) => {
            return Verdict::Invalid {
                reason: "syntax",
                detail: format!("{e} in `{text}`"),
            }
        }
        Ok(back) if back != *q => {
            return Verdict::Invalid {
                reason: "round-trip",
                detail: text,
            }
        }
        Ok(_) => {}
    }
    match resolve(q, catalog, mode) {
        Ok(()) => Verdict::Valid,
        Err(e) => Verdict::Invalid {
            reason: e.class(),
            detail: e.to_string(),
        },
    }
}

/// Whether the result may hold floating-point values, so comparison should
/// round to two decimals. Errs on the side of tagging.
pub fn float_tagged(q: &Query, catalog: &Catalog) -> bool {
    let mut tagged = false;
    for sub in q.all_queries() {
        for s in sub.selects() {
            if matches!(s.aggregate(), Some(AggFunc::Avg | AggFunc::Sum | AggFunc::Max | AggFunc::Min)) {
                tagged = true;
            }
            for t in s.table_names() {
                if let Ok(t) = catalog.get(t) {
                    if t.rows.iter().flatten().any(|v| matches!(v, Value::Float(_))) {
                        tagged = true;
                    }
                }
            }
        }
    }
    q.walk_exprs(&mut |e| {
        tagged |= match e {
            ValueExpr::Float(_) | ValueExpr::Arith { .. } => true,
            ValueExpr::Str(s) => s.contains('.'),
            ValueExpr::Func { func, .. } => matches!(
                func,
                Func::Exp | Func::Ln | Func::Power | Func::Sqrt | Func::Abs | Func::Mod
            ),
            ValueExpr::Cast { to, .. } => *to == DataType::Numeric,
            _ => false,
        }
    });
    tagged
}

#[cfg(test)]
mod tests {
    use super::*;
    use sqlsem_core::fixture::load_fixture;

    fn cat() -> Catalog {
        load_fixture("TABLE t (a, b)\nROW 1, 4\nROW 2, 5\nROW 3, 8\n").unwrap()
    }

    #[test]
    fn verdicts() {
        let v = |sql: &str| validate(&parse(sql).unwrap(), &cat(), JoinMode::Standard);
        assert_eq!(v("SELECT t.b FROM t"), Verdict::Valid);
        assert!(matches!(v("SELECT * FROM zz"), Verdict::Invalid { reason: "unknown-table", .. }));
        assert!(matches!(v("SELECT POWER(t.a) FROM t"), Verdict::Invalid { reason: "arity", .. }));
    }

    #[test]
    fn tagging() {
        let tag = |sql: &str| float_tagged(&parse(sql).unwrap(), &cat());
        assert!(!tag("SELECT t.b FROM t"));
        assert!(tag("SELECT t.b / 3 FROM t"));
        assert!(tag("SELECT AVG(t.b) FROM t"));
        assert!(tag("SELECT t.b FROM t WHERE EXISTS (SELECT 1.5)"));
    }
}
