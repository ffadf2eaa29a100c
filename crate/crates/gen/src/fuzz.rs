//! The coverage-guided loop: draw a seed from the pool, mutate it until the
//! active criterion grows, keep the result as a future seed and forward it
//! to the execution sinks.

use std::time::{Duration, Instant};

use thiserror::Error;

use sqlsem_core::ast::Query;
use sqlsem_core::coverage::{CoverageLedger, Criterion};
use sqlsem_core::printer::print;
use sqlsem_core::table::Catalog;

use crate::build::QueryGen;
use crate::check::float_tagged;
use crate::config::GenConfig;
use crate::mutate::{applicable_sites, mutate, MutationRule};
use crate::pool::{fresh_query, Provenance, SeedPool};

/// Mutation attempts on one seed before falling back to a fresh query.
pub const STAGNATION_CAP: usize = 500;
/// Consecutive fallbacks without any acceptance before the loop gives up.
pub const MAX_FALLBACKS: usize = 20;

#[derive(Debug, Error)]
#[error("sink `{sink}` failed: {message}")]
pub struct SinkError {
    pub sink: String,
    pub message: String,
}

/// A query the loop forwarded.
#[derive(Debug, Clone)]
pub struct Accepted {
    /// Position among forwarded queries.
    pub seq: usize,
    /// Position in the seed pool.
    pub pool_index: usize,
    pub query: Query,
    pub sql: String,
    pub provenance: Provenance,
    pub float_tagged: bool,
}

pub trait QuerySink {
    fn accept(&mut self, q: &Accepted) -> Result<(), SinkError>;
}

/// Collects everything forwarded.
#[derive(Debug, Default)]
pub struct Collect(pub Vec<Accepted>);

impl QuerySink for Collect {
    fn accept(&mut self, q: &Accepted) -> Result<(), SinkError> {
        self.0.push(q.clone());
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Queries(usize),
    Time(Duration),
}

#[derive(Debug, Clone)]
pub struct FuzzOptions {
    pub criterion: Criterion,
    pub budget: Budget,
    pub stagnation_cap: usize,
    /// Unguided mode forwards every valid mutant, ignoring coverage.
    pub guided: bool,
    /// Stop once the criterion is fully covered.
    pub stop_when_saturated: bool,
}

impl FuzzOptions {
    pub fn new(criterion: Criterion, budget: Budget) -> Self {
        FuzzOptions {
            criterion,
            budget,
            stagnation_cap: STAGNATION_CAP,
            guided: true,
            stop_when_saturated: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Budget,
    Saturated,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzStats {
    pub forwarded: usize,
    /// Valid mutants that did not grow the criterion.
    pub not_increasing: usize,
    /// Mutation attempts that were inapplicable or invalid.
    pub invalid: usize,
    pub fallbacks: usize,
    pub stop: StopReason,
    /// Covered count and ratio per criterion at the end.
    pub coverage: Vec<(Criterion, usize, f64)>,
}

struct Run<'a, 's> {
    catalog: &'a Catalog,
    cfg: &'a GenConfig,
    ledger: &'a mut CoverageLedger,
    opts: &'a FuzzOptions,
    sinks: &'a mut [&'s mut dyn QuerySink],
    start: Instant,
    forwarded: usize,
    not_increasing: usize,
    invalid: usize,
    fallbacks: usize,
}

impl Run<'_, '_> {
    fn out_of_budget(&self) -> bool {
        match self.opts.budget {
            Budget::Queries(n) => self.forwarded >= n,
            Budget::Time(d) => self.start.elapsed() >= d,
        }
    }

    fn saturated(&self) -> bool {
        let c = self.opts.criterion;
        self.opts.stop_when_saturated && self.ledger.covered(c) as u128 >= self.ledger.total(c)
    }

    /// Whether `q` would be forwarded under the active policy.
    fn wanted(&self, q: &Query) -> bool {
        !self.opts.guided || self.ledger.would_increase(q).get(self.opts.criterion)
    }

    fn forward(&mut self, pool: &SeedPool, index: usize) -> Result<(), SinkError> {
        let entry = &pool.entries[index];
        self.ledger.record(&entry.query);
        let acc = Accepted {
            seq: self.forwarded,
            pool_index: index,
            sql: print(&entry.query),
            float_tagged: float_tagged(&entry.query, self.catalog),
            query: entry.query.clone(),
            provenance: entry.provenance,
        };
        self.forwarded += 1;
        for s in self.sinks.iter_mut() {
            s.accept(&acc)?;
        }
        Ok(())
    }
}

/// Runs the loop over an initialized pool. Initial seeds that grow the
/// criterion are forwarded first; the budget counts every forwarded query.
pub fn fuzz_loop(
    pool: &mut SeedPool,
    catalog: &Catalog,
    cfg: &GenConfig,
    ledger: &mut CoverageLedger,
    opts: &FuzzOptions,
    sinks: &mut [&mut dyn QuerySink],
) -> Result<FuzzStats, SinkError> {
    let mut run = Run {
        catalog,
        cfg,
        ledger,
        opts,
        sinks,
        start: Instant::now(),
        forwarded: 0,
        not_increasing: 0,
        invalid: 0,
        fallbacks: 0,
    };
    let stop = drive(&mut run, pool)?;
    let coverage = Criterion::ALL
        .iter()
        .map(|c| (*c, run.ledger.covered(*c), run.ledger.ratio(*c)))
        .collect();
    Ok(FuzzStats {
        forwarded: run.forwarded,
        not_increasing: run.not_increasing,
        invalid: run.invalid,
        fallbacks: run.fallbacks,
        stop,
        coverage,
    })
}

fn drive(run: &mut Run, pool: &mut SeedPool) -> Result<StopReason, SinkError> {
    for i in 0..pool.len() {
        if run.out_of_budget() {
            return Ok(StopReason::Budget);
        }
        if run.wanted(&pool.entries[i].query) {
            run.forward(pool, i)?;
        }
    }
    let mut idle_fallbacks = 0;
    loop {
        if run.out_of_budget() {
            return Ok(StopReason::Budget);
        }
        if run.saturated() {
            return Ok(StopReason::Saturated);
        }
        if idle_fallbacks >= MAX_FALLBACKS {
            return Ok(StopReason::Exhausted);
        }
        if pool.is_empty() && pool.extend_initial(run.catalog, run.cfg, 1).is_empty() {
            return Ok(StopReason::Exhausted);
        }
        let parent = {
            let mut g = QueryGen::new(run.catalog, run.cfg, &mut pool.rng);
            g.below(pool.entries.len())
        };
        let mut accepted = false;
        for _ in 0..run.opts.stagnation_cap {
            if run.out_of_budget() {
                return Ok(StopReason::Budget);
            }
            let seed = pool.entries[parent].query.clone();
            let mut g = QueryGen::new(run.catalog, run.cfg, &mut pool.rng);
            let rules: Vec<MutationRule> = MutationRule::ALL
                .into_iter()
                .filter(|r| applicable_sites(&seed, *r, &g) > 0)
                .collect();
            let Some(rule) = g.pick(&rules) else { break };
            let Some(m) = mutate(&seed, rule, &mut g) else {
                run.invalid += 1;
                continue;
            };
            if !run.wanted(&m) {
                run.not_increasing += 1;
                continue;
            }
            let i = pool.push(m, Provenance::Mutated { parent, rule });
            run.forward(pool, i)?;
            accepted = true;
            break;
        }
        if accepted {
            idle_fallbacks = 0;
            continue;
        }
        run.fallbacks += 1;
        idle_fallbacks += 1;
        let fresh = {
            let mut g = QueryGen::new(run.catalog, run.cfg, &mut pool.rng);
            fresh_query(&mut g)
        };
        if let Some(q) = fresh {
            let i = pool.push(q, Provenance::Initial);
            if run.wanted(&pool.entries[i].query) {
                run.forward(pool, i)?;
                idle_fallbacks = 0;
            }
        }
    }
}
