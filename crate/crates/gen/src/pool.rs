use rand::SeedableRng;

use sqlsem_core::ast::Query;
use sqlsem_core::table::Catalog;

use crate::build::{GenRng, QueryGen};
use crate::check::validate;
use crate::config::GenConfig;
use crate::mutate::MutationRule;

/// Attempts per initial query before giving up on it.
const MAX_ATTEMPTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Initial,
    Mutated { parent: usize, rule: MutationRule },
}

#[derive(Debug, Clone)]
pub struct PoolEntry {
    pub query: Query,
    pub provenance: Provenance,
}

pub struct SeedPool {
    pub entries: Vec<PoolEntry>,
    pub rng: GenRng,
    pub seed: u64,
}

impl SeedPool {
    pub fn empty(seed: u64) -> Self {
        SeedPool {
            entries: Vec::new(),
            rng: GenRng::seed_from_u64(seed),
            seed,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Query> {
        self.entries.get(i).map(|e| &e.query)
    }

    pub fn push(&mut self, query: Query, provenance: Provenance) -> usize {
        self.entries.push(PoolEntry { query, provenance });
        self.entries.len() - 1
    }

    /// Draws up to `n` fresh valid queries from the pool's own random
    /// source and appends them; returns their indices.
    pub fn extend_initial(&mut self, catalog: &Catalog, cfg: &GenConfig, n: usize) -> Vec<usize> {
        let fresh: Vec<Query> = {
            let mut g = QueryGen::new(catalog, cfg, &mut self.rng);
            (0..n).filter_map(|_| fresh_query(&mut g)).collect()
        };
        fresh.into_iter().map(|q| self.push(q, Provenance::Initial)).collect()
    }
}

/// A random valid query, or none after a bounded number of attempts.
pub fn fresh_query(g: &mut QueryGen) -> Option<Query> {
    (0..MAX_ATTEMPTS).find_map(|_| {
        let q = g.query();
        validate(&q, g.catalog, g.cfg.join_mode).is_valid().then_some(q)
    })
}

/// `n` random grammar-directed queries over `catalog`, reproducible from
/// `seed`.
pub fn generate_initial(catalog: &Catalog, cfg: &GenConfig, n: usize, seed: u64) -> SeedPool {
    let mut pool = SeedPool::empty(seed);
    pool.extend_initial(catalog, cfg, n);
    pool
}
