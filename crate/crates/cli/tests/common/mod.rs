#![allow(dead_code)]

pub mod oracle;

use rand::{Rng, RngExt};
use sqlsem_core::fixture::load_fixture;
use sqlsem_core::table::{BagTable, Catalog};
use sqlsem_core::Value;

pub fn fixture(name: &str) -> Catalog {
    load_fixture(&std::fs::read_to_string(fixture_path(name)).unwrap()).unwrap()
}

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn cell<R: Rng>(rng: &mut R) -> Value {
    match rng.random_range(0..12) {
        0 | 1 => Value::Null,
        2..=6 => Value::Int(rng.random_range(-2..4)),
        7 => Value::Float([1.5, -0.5, 2.0][rng.random_range(0..3)]),
        8 => Value::Bool(rng.random_bool(0.5)),
        _ => Value::str(["", "a", "12abc", "-3", "0"][rng.random_range(0..5)]),
    }
}

/// One to three tables `t0..`, each with one to three of the columns
/// `a, b, c` and at most four rows.
pub fn random_catalog<R: Rng>(rng: &mut R) -> Catalog {
    let mut cat = Catalog::new();
    for t in 0..rng.random_range(1..=3) {
        let cols: Vec<&str> = ["a", "b", "c"].into_iter().filter(|_| rng.random_bool(0.6)).collect();
        let cols = if cols.is_empty() { vec!["a"] } else { cols };
        let rows = (0..rng.random_range(0..=4))
            .map(|_| cols.iter().map(|_| cell(rng)).collect())
            .collect();
        cat.insert(BagTable::base(&format!("t{t}"), &cols, rows));
    }
    cat
}
