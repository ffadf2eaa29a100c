use std::sync::Arc;

use proptest::prelude::*;

use sqlsem_core::fixture::load_fixture;
use sqlsem_core::table::{Attribute, BagTable, Catalog};
use sqlsem_core::{ExecOptions, Value};
use sqlsem_harness::adapter::ReferenceAdapter;
use sqlsem_harness::*;

fn demo() -> Catalog {
    load_fixture(include_str!("../../../fixtures/demo.fixture")).unwrap()
}

fn script() -> String {
    format!("cmd:python3 {}/../../scripts/pysqlite_shell.py", env!("CARGO_MANIFEST_DIR"))
}

/// A target that answers every query with a fixed grid.
struct Canned(Grid);

impl TargetAdapter for Canned {
    fn name(&self) -> &str {
        "canned"
    }
    fn kind(&self) -> AdapterKind {
        AdapterKind::EmbeddedFileDb
    }
    fn replay_fixture(&mut self, _: &Catalog) -> Result<(), AdapterError> {
        Ok(())
    }
    fn execute(&mut self, _: &str) -> Result<Grid, AdapterError> {
        Ok(self.0.clone())
    }
}

fn canned(grid: Grid) -> Target {
    Target {
        spec: "cmd:canned".parse().unwrap(),
        adapter: Box::new(Canned(grid)),
    }
}

fn case(sql: &str) -> Case {
    Case {
        seq: 0,
        sql: sql.into(),
        float_tagged: false,
    }
}

fn one(sql: &str, catalog: &Catalog, target: Target) -> Finding {
    let mut ts = vec![target];
    run_case(&case(sql), catalog, &ExecOptions::default(), &mut ts, &CaseMeta::default()).remove(0)
}

#[test]
fn sqlite_fixture_readback() {
    let mut a = "sqlite::memory:".parse::<TargetSpec>().unwrap().open().unwrap();
    a.replay_fixture(&demo()).unwrap();
    assert_eq!(a.execute("SELECT COUNT(*) FROM t").unwrap(), vec![vec![RawValue::Int(3)]]);
    // Replay resets: loading again does not duplicate rows.
    a.replay_fixture(&demo()).unwrap();
    assert_eq!(a.execute("SELECT COUNT(*) FROM t").unwrap(), vec![vec![RawValue::Int(3)]]);

    let nulls = load_fixture("TABLE n (x, y)\nROW NULL, 'a'\nROW 2, NULL\n").unwrap();
    a.replay_fixture(&nulls).unwrap();
    assert_eq!(
        a.execute("SELECT x, y FROM n").unwrap(),
        vec![
            vec![RawValue::Null, RawValue::Text("a".into())],
            vec![RawValue::Int(2), RawValue::Null]
        ]
    );

    a.replay_fixture(&Catalog::new()).unwrap();
    assert_eq!(
        a.execute("SELECT COUNT(*) FROM sqlite_master WHERE type = 'table'").unwrap(),
        vec![vec![RawValue::Int(0)]]
    );
}

#[test]
fn subprocess_fixture_readback() {
    let mut a = script().parse::<TargetSpec>().unwrap().open().unwrap();
    a.replay_fixture(&demo()).unwrap();
    assert_eq!(a.execute("SELECT COUNT(*) FROM t").unwrap(), vec![vec![RawValue::Int(3)]]);
    assert_eq!(a.execute("SELECT 1.5, 'x', NULL").unwrap(), vec![vec![
        RawValue::Float(1.5),
        RawValue::Text("x".into()),
        RawValue::Null
    ]]);
    assert!(matches!(a.execute("SELEC 1"), Err(AdapterError::Query(_))));
}

#[test]
fn unreachable_targets_fail_to_connect() {
    let spec: TargetSpec = "postgres:host=127.0.0.1 port=1 user=nobody connect_timeout=2".parse().unwrap();
    assert!(matches!(spec.open(), Err(AdapterError::Connect { .. })));
    let spec: TargetSpec = "cmd:/nonexistent/shell".parse().unwrap();
    assert!(matches!(spec.open(), Err(AdapterError::Connect { .. })));
    assert!("oracle:x".parse::<TargetSpec>().is_err());
}

#[test]
fn demo_query_matches_sqlite() {
    let t = Target::open(&"sqlite::memory:".parse().unwrap(), &demo()).unwrap();
    let f = one("SELECT t.b FROM t", &demo(), t);
    assert_eq!(f.verdict, Verdict::Match);
    assert_eq!(f.ref_rows, vec!["ROW 4", "ROW 5", "ROW 8"]);
}

#[test]
fn negative_zero_text_is_a_content_mismatch() {
    let f = one("SELECT MOD('-12', -4)", &demo(), canned(vec![vec![RawValue::Text("-0".into())]]));
    assert_eq!(f.verdict, Verdict::ContentMismatch);
    assert_eq!(f.ref_residual, vec!["ROW 0"]);
    assert_eq!(f.tgt_residual, vec!["ROW '-0'"]);
}

#[test]
fn concat_with_null_is_a_content_mismatch() {
    let f = one("SELECT 'Hello' || NULL", &demo(), canned(vec![vec![RawValue::Text("Hello".into())]]));
    assert_eq!(f.verdict, Verdict::ContentMismatch);
    assert_eq!(f.ref_rows, vec!["ROW NULL"]);
}

#[test]
fn errors_become_findings() {
    let t = Target::open(&"sqlite::memory:".parse().unwrap(), &demo()).unwrap();
    // Valid for the reference, rejected by SQLite.
    let f = one("SELECT t.a FROM t WHERE t.a IS UNKNOWN", &demo(), t);
    assert_eq!(f.verdict, Verdict::TargetError);
    assert!(f.detail.is_some());
    // Division by zero fails in the reference only.
    let f = one("SELECT 1 / 0", &demo(), canned(vec![vec![RawValue::Null]]));
    assert_eq!(f.verdict, Verdict::ReferenceError);
}

#[test]
fn suppressed_target_errors_are_not_persisted() {
    let mut spec: TargetSpec = "sqlite::memory:".parse().unwrap();
    spec.suppress.push("no such column: UNKNOWN".into());
    let t = Target::open(&spec, &demo()).unwrap();
    let f = one("SELECT t.a FROM t WHERE t.a IS UNKNOWN", &demo(), t);
    assert!(f.suppressed && !f.reportable());
}

#[test]
fn ordered_queries_compare_order() {
    let grid = vec![vec![RawValue::Int(8)], vec![RawValue::Int(5)], vec![RawValue::Int(4)]];
    let f = one("SELECT t.b FROM t ORDER BY t.b ASC", &demo(), canned(grid.clone()));
    assert_eq!((f.verdict, f.subclass.as_deref()), (Verdict::ContentMismatch, Some("order")));
    let f = one("SELECT t.b FROM t ORDER BY t.b DESC", &demo(), canned(grid));
    assert_eq!(f.verdict, Verdict::Match);
}

fn finding(seq: usize, verdict: Verdict) -> Finding {
    let mut f = one("SELECT t.b FROM t", &demo(), canned(vec![]));
    f.id = Finding::id_for(seq, 0);
    f.verdict = verdict;
    f
}

#[test]
fn persistence() {
    let dir = tempfile::tempdir().unwrap();
    let p = persist(&[], dir.path()).unwrap();
    assert_eq!(std::fs::read_to_string(&p.manifest).unwrap(), "");

    let fs = vec![
        finding(3, Verdict::CountMismatch),
        finding(1, Verdict::TargetError),
        finding(2, Verdict::Match),
    ];
    let p = persist(&fs, dir.path()).unwrap();
    assert_eq!(p.records.len(), 2);
    let manifest = std::fs::read_to_string(&p.manifest).unwrap();
    assert_eq!(
        manifest,
        "FINDING f000001t0 target-error cmd:canned\nFINDING f000003t0 count-mismatch cmd:canned\n"
    );
    let first: Vec<Vec<u8>> = p.records.iter().map(|r| std::fs::read(r).unwrap()).collect();
    let again = persist(&fs, dir.path()).unwrap();
    let second: Vec<Vec<u8>> = again.records.iter().map(|r| std::fs::read(r).unwrap()).collect();
    assert_eq!(first, second);
    assert_eq!(std::fs::read_to_string(&again.manifest).unwrap(), manifest);
    let back = load_finding(&p.records[1]).unwrap();
    assert_eq!(back, fs[0]);
}

#[test]
fn lanes_are_deterministic() {
    let cat = Arc::new(load_fixture(include_str!("../../../fixtures/desk.fixture")).unwrap());
    let queries = [
        "SELECT t.b FROM t",
        "SELECT u.c FROM u WHERE u.a > 0",
        "SELECT NULL FROM t",
        "SELECT t.a, v.d FROM t CROSS JOIN v ORDER BY v.d DESC",
        "SELECT COUNT(*) FROM t GROUP BY t.b",
        "SELECT t.a FROM t WHERE t.a IS UNKNOWN",
    ];
    let specs: Vec<TargetSpec> = vec!["sqlite::memory:".parse().unwrap(), "reference:null-is-false".parse().unwrap()];
    let run = |workers| {
        let lanes = Lanes::start(workers, cat.clone(), ExecOptions::default(), &specs, CaseMeta::default()).unwrap();
        for (i, q) in queries.iter().enumerate() {
            lanes.submit(Case {
                seq: i,
                sql: q.to_string(),
                float_tagged: false,
            });
        }
        lanes
            .finish()
            .into_iter()
            .map(|f| (f.id, f.verdict, f.tgt_rows))
            .collect::<Vec<_>>()
    };
    let one = run(1);
    assert_eq!(one.len(), queries.len() * specs.len());
    assert_eq!(one, run(3));
}

#[test]
fn faulty_reference_is_noticed() {
    let mut ts = vec![Target {
        spec: "reference:null-is-false".parse().unwrap(),
        adapter: Box::new(ReferenceAdapter::from_conn("null-is-false").unwrap()),
    }];
    let cat = load_fixture("TABLE t (a)\nROW NULL\n").unwrap();
    ts[0].adapter.replay_fixture(&cat).unwrap();
    let f = run_case(&case("SELECT t.a IS FALSE FROM t"), &cat, &ExecOptions::default(), &mut ts, &CaseMeta::default());
    assert_eq!(f[0].verdict, Verdict::ContentMismatch);
}

fn value() -> impl Strategy<Value = Value> {
    prop_oneof![
        Just(Value::Null),
        (-3i64..3).prop_map(Value::Int),
        (-3i64..3).prop_map(|i| Value::Float(i as f64 / 2.0 + 0.25)),
        "[ab]{0,2}".prop_map(Value::Str),
    ]
}

fn table() -> impl Strategy<Value = BagTable> {
    prop::collection::vec(prop::collection::vec(value(), 2), 0..6)
        .prop_map(|rows| BagTable::new(vec![Attribute::computed("x"), Attribute::computed("y")], rows))
}

proptest! {
    #[test]
    fn comparison_is_reflexive_and_symmetric(a in table(), b in table(), key in prop::option::of(0usize..2)) {
        prop_assert_eq!(compare(&a, &a, key).verdict, Verdict::Match);
        let ab = compare(&a, &b, key).verdict == Verdict::Match;
        let ba = compare(&b, &a, key).verdict == Verdict::Match;
        prop_assert_eq!(ab, ba);
        let mut shuffled = a.clone();
        shuffled.rows.reverse();
        prop_assert_eq!(compare(&a, &shuffled, None).verdict, Verdict::Match);
    }
}
