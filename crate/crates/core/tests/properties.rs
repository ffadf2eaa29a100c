use proptest::prelude::*;

use sqlsem_core::ast::*;
use sqlsem_core::eval::{eval, EvalEnv};
use sqlsem_core::fixture::load_fixture;
use sqlsem_core::parser::parse_expr;
use sqlsem_core::printer::print_expr;
use sqlsem_core::relops::op_collection;
use sqlsem_core::table::{BagTable, Catalog};
use sqlsem_core::{execute, parse, print, ExecOptions, Value};

fn leaf() -> impl Strategy<Value = ValueExpr> {
    prop_oneof![
        Just(ValueExpr::Null),
        any::<bool>().prop_map(ValueExpr::Bool),
        (-50i64..50).prop_map(ValueExpr::Int),
        (-400i32..400).prop_map(|x| ValueExpr::Float(x as f64 / 8.0)),
        "[a-z' ]{0,4}".prop_map(ValueExpr::Str),
        prop_oneof![Just("a"), Just("b")].prop_map(|c| ValueExpr::col("t", c)),
    ]
}

fn expr() -> impl Strategy<Value = ValueExpr> {
    leaf().prop_recursive(4, 32, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), 0..3usize).prop_map(|(a, b, k)| {
                ValueExpr::logical([LogicalOp::And, LogicalOp::Or, LogicalOp::Xor][k], a, b)
            }),
            inner.clone().prop_map(|e| ValueExpr::Not(Box::new(e))),
            (inner.clone(), 0..4usize, any::<bool>()).prop_map(|(e, k, negated)| ValueExpr::Is {
                expr: Box::new(e),
                negated,
                test: [IsTest::True, IsTest::False, IsTest::Unknown, IsTest::Null][k],
            }),
            (inner.clone(), inner.clone(), 0..6usize).prop_map(|(a, b, k)| ValueExpr::compare(CompareOp::ALL[k], a, b)),
            (inner.clone(), inner.clone(), 0..3usize)
                .prop_map(|(a, b, k)| ValueExpr::arith([ArithOp::Add, ArithOp::Sub, ArithOp::Mul][k], a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| ValueExpr::Concat(Box::new(a), Box::new(b))),
            (inner.clone(), prop::collection::vec(inner.clone(), 1..3), any::<bool>()).prop_map(
                |(e, list, negated)| ValueExpr::InList {
                    expr: Box::new(e),
                    negated,
                    list,
                }
            ),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(w, t, o)| ValueExpr::Case {
                when: Box::new(w),
                then: Box::new(t),
                otherwise: Box::new(o),
            }),
            inner.clone().prop_map(|e| ValueExpr::func(Func::Abs, vec![e])),
        ]
    })
}

/// Boolean-only trees over the three truth values.
fn logic() -> impl Strategy<Value = ValueExpr> {
    prop_oneof![Just(ValueExpr::Null), any::<bool>().prop_map(ValueExpr::Bool)].prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), 0..3usize).prop_map(|(a, b, k)| {
                ValueExpr::logical([LogicalOp::And, LogicalOp::Or, LogicalOp::Xor][k], a, b)
            }),
            inner.clone().prop_map(|e| ValueExpr::Not(Box::new(e))),
        ]
    })
}

/// Direct Kleene evaluation; `None` is unknown.
fn kleene(e: &ValueExpr) -> Option<bool> {
    match e {
        ValueExpr::Null => None,
        ValueExpr::Bool(b) => Some(*b),
        ValueExpr::Not(x) => kleene(x).map(|b| !b),
        ValueExpr::Logical { op, left, right } => {
            let (a, b) = (kleene(left), kleene(right));
            match op {
                LogicalOp::And if a == Some(false) || b == Some(false) => Some(false),
                LogicalOp::And => a.zip(b).map(|_| true),
                LogicalOp::Or if a == Some(true) || b == Some(true) => Some(true),
                LogicalOp::Or => a.zip(b).map(|_| false),
                LogicalOp::Xor => a.zip(b).map(|(x, y)| x != y),
            }
        }
        _ => unreachable!(),
    }
}

fn bag(xs: &[u8]) -> BagTable {
    let rows = xs
        .iter()
        .map(|&x| vec![if x == 0 { Value::Null } else { Value::Int(x as i64) }])
        .collect();
    BagTable::base("x", &["v"], rows)
}

fn demo() -> Catalog {
    load_fixture("TABLE t (a, b)\nROW 1, 4\nROW 2, 5\nROW 3, 8\nROW NULL, 5\n").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn printed_expressions_parse_back(e in expr()) {
        let text = print_expr(&e);
        prop_assert_eq!(parse_expr(&text).unwrap(), e, "{}", text);
    }

    #[test]
    fn printed_queries_parse_back(e in expr(), distinct in any::<bool>()) {
        let sql = format!(
            "SELECT {}t.a, {} FROM t WHERE {} ORDER BY t.b DESC",
            if distinct { "DISTINCT " } else { "" },
            print_expr(&e),
            print_expr(&e)
        );
        let q = parse(&sql).unwrap();
        prop_assert_eq!(parse(&print(&q)).unwrap(), q);
    }

    #[test]
    fn logic_is_kleene(e in logic()) {
        let cat = Catalog::new();
        let opts = ExecOptions::default();
        let got = eval(&e, &EvalEnv::new(&cat, &opts)).unwrap();
        prop_assert_eq!(got, kleene(&e).map_or(Value::Null, Value::Bool));
    }

    #[test]
    fn where_keeps_exactly_the_true_rows(e in expr()) {
        let cat = demo();
        let all = execute(&parse("SELECT * FROM t").unwrap(), &cat).unwrap();
        let sql = format!("SELECT * FROM t WHERE {}", print_expr(&e));
        let sel = execute(&parse(&sql).unwrap(), &cat);
        let t = format!("SELECT * FROM t WHERE ({}) IS TRUE", print_expr(&e));
        let f = format!("SELECT * FROM t WHERE ({}) IS NOT TRUE", print_expr(&e));
        if let (Ok(sel), Ok(t), Ok(f)) = (sel, execute(&parse(&t).unwrap(), &cat), execute(&parse(&f).unwrap(), &cat)) {
            prop_assert!(sel.multiset_eq(&t));
            prop_assert_eq!(t.len() + f.len(), all.len());
        }
    }

    #[test]
    fn bag_operators_count_multiplicities(a in prop::collection::vec(0u8..4, 0..10), b in prop::collection::vec(0u8..4, 0..10)) {
        let (ta, tb) = (bag(&a), bag(&b));
        let opts = ExecOptions::default();
        for x in 0u8..4 {
            let m = |v: &[u8]| v.iter().filter(|&&y| y == x).count();
            let row = bag(&[x]).rows.remove(0);
            let count = |op| op_collection(op, &ta, &tb, &opts).unwrap().rows.iter().filter(|r| **r == row).count();
            prop_assert_eq!(count(SetOp::UnionAll), m(&a) + m(&b));
            prop_assert_eq!(count(SetOp::IntersectAll), m(&a).min(m(&b)));
            prop_assert_eq!(count(SetOp::ExceptAll), m(&a).saturating_sub(m(&b)));
            prop_assert_eq!(count(SetOp::Union), usize::from(m(&a) + m(&b) > 0));
        }
    }

    #[test]
    fn union_all_commutes_as_a_bag(a in prop::collection::vec(0u8..4, 0..10), b in prop::collection::vec(0u8..4, 0..10)) {
        let opts = ExecOptions::default();
        let ab = op_collection(SetOp::UnionAll, &bag(&a), &bag(&b), &opts).unwrap();
        let ba = op_collection(SetOp::UnionAll, &bag(&b), &bag(&a), &opts).unwrap();
        prop_assert!(ab.multiset_eq(&ba));
    }
}
