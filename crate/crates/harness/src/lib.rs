//! Differential execution: the reference engine against live targets,
//! result normalization and comparison, and persisted findings.

pub mod adapter;
pub mod compare;
pub mod finding;
pub mod normalize;
pub mod run;

pub use adapter::{AdapterError, AdapterKind, TargetAdapter, TargetKind, TargetSpec};
pub use compare::{compare, Comparison, Verdict};
pub use finding::{load_finding, persist, tally, Finding, Persisted, MANIFEST};
pub use normalize::{normalize, normalize_table, round2, Grid, NormalizeError, RawValue};
pub use run::{run_case, Case, CaseMeta, Lanes, Target};
