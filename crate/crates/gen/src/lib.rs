//! Query generation: random initial queries, thirteen mutation rules and a
//! coverage-guided loop over a seed pool.

pub mod build;
pub mod check;
pub mod config;
pub mod corpus;
pub mod fuzz;
pub mod mutate;
pub mod pool;
pub mod sites;

pub use build::{GenRng, QueryGen};
pub use check::{float_tagged, validate, Verdict};
pub use config::GenConfig;
pub use mutate::{mutate, Level, MutationRule};
pub use pool::{generate_initial, PoolEntry, Provenance, SeedPool};
pub use fuzz::{fuzz_loop, Accepted, Budget, Collect, FuzzOptions, FuzzStats, QuerySink, SinkError, StopReason};
