//! Monte Carlo failure simulation over a catalog of functional topologies.
//!
//! Each round draws an independent failure pattern over the relay nodes and
//! links that appear in the catalog; inputs and the sink never fail. All
//! strategies are scored against the same pattern in every round.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`). Rounds are split into
//! blocks of [`ROUNDS_PER_BLOCK`]; block `i` uses the generator seeded from
//! the master seed with stream id `i`, and draws one uniform `f64` per
//! element per round in canonical element order (relay nodes by label, then
//! links by label pair). The report is therefore independent of the worker
//! count.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumeration::FtCatalog;
use crate::graph::{CanonicalFtKey, FunctionalTopology, NodeId, QuerySpec};
use crate::metrics::pairwise_redundancy;
use crate::oracle::{self, DEFAULT_MAX_FTS};

pub const ROUNDS_PER_BLOCK: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("rounds must be positive")]
    ZeroRounds,
    #[error("{name} probability {value} is outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("catalog is empty")]
    EmptyCatalog,
}

/// Independent per-round failures of relay nodes and links.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureModel {
    node_fail_prob: f64,
    edge_fail_prob: f64,
    seed: u64,
}

impl FailureModel {
    pub fn new(node_fail_prob: f64, edge_fail_prob: f64, seed: u64) -> Result<Self, SimError> {
        for (name, value) in [
            ("node failure", node_fail_prob),
            ("edge failure", edge_fail_prob),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(SimError::InvalidProbability { name, value });
            }
        }
        Ok(FailureModel {
            node_fail_prob,
            edge_fail_prob,
            seed,
        })
    }

    pub fn node_fail_prob(&self) -> f64 {
        self.node_fail_prob
    }

    pub fn edge_fail_prob(&self) -> f64 {
        self.edge_fail_prob
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Dead nodes and links of one round. Links are stored `(min, max)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FailurePattern {
    dead_nodes: BTreeSet<NodeId>,
    dead_edges: BTreeSet<(NodeId, NodeId)>,
}

impl FailurePattern {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn kill_node(&mut self, node: impl Into<NodeId>) {
        self.dead_nodes.insert(node.into());
    }

    pub fn kill_edge(&mut self, a: impl Into<NodeId>, b: impl Into<NodeId>) {
        let (a, b) = (a.into(), b.into());
        self.dead_edges.insert(if a < b { (a, b) } else { (b, a) });
    }

    pub fn node_alive(&self, node: &NodeId) -> bool {
        !self.dead_nodes.contains(node)
    }

    pub fn edge_alive(&self, a: &NodeId, b: &NodeId) -> bool {
        let key = if a < b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        !self.dead_edges.contains(&key)
    }
}

/// True iff every node and link of `ft` is alive.
pub fn ft_survives(ft: &FunctionalTopology, pattern: &FailurePattern) -> bool {
    ft.nodes().iter().all(|n| pattern.node_alive(n))
        && ft.edges().iter().all(|(a, b)| pattern.edge_alive(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    /// One designated topology, fixed in advance.
    StaticSingle,
    /// Any surviving topology in the pool.
    DegenerateFallback,
    /// A pre-selected node-disjoint pair.
    RedundantPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    #[default]
    Delay,
    Energy,
}

/// Optional caps on the topologies a strategy may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Constraint {
    pub max_delay: Option<usize>,
    pub max_energy: Option<usize>,
}

impl Constraint {
    pub fn admits(&self, ft: &FunctionalTopology) -> bool {
        self.max_delay.is_none_or(|d| ft.delay() <= d)
            && self.max_energy.is_none_or(|e| ft.energy() <= e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Strategy {
    pub kind: StrategyKind,
    #[serde(default)]
    pub constraint: Constraint,
    /// Ranking used by the static strategy.
    #[serde(default)]
    pub objective: Objective,
}

impl Strategy {
    pub fn new(kind: StrategyKind) -> Self {
        Strategy {
            kind,
            constraint: Constraint::default(),
            objective: Objective::Delay,
        }
    }

    pub fn with_constraint(mut self, constraint: Constraint) -> Self {
        self.constraint = constraint;
        self
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.kind {
            StrategyKind::StaticSingle => "static",
            StrategyKind::DegenerateFallback => "fallback",
            StrategyKind::RedundantPair => "pair",
        })?;
        let mut caps = Vec::new();
        if let Some(d) = self.constraint.max_delay {
            caps.push(format!("delay<={d}"));
        }
        if let Some(e) = self.constraint.max_energy {
            caps.push(format!("energy<={e}"));
        }
        if !caps.is_empty() {
            write!(f, "[{}]", caps.join(","))?;
        }
        Ok(())
    }
}

fn objective_value(ft: &FunctionalTopology, objective: Objective) -> usize {
    match objective {
        Objective::Delay => ft.delay(),
        Objective::Energy => ft.energy(),
    }
}

/// Topology minimizing the objective; ties go to the smaller canonical key.
pub fn select_static_ft(
    catalog: &FtCatalog,
    objective: Objective,
) -> Result<&FunctionalTopology, SimError> {
    static_in_pool(catalog.as_slice().iter(), objective).ok_or(SimError::EmptyCatalog)
}

fn static_in_pool<'a>(
    pool: impl Iterator<Item = &'a FunctionalTopology>,
    objective: Objective,
) -> Option<&'a FunctionalTopology> {
    // min_by_key keeps the first minimum; pools are in key order
    pool.min_by_key(|ft| objective_value(ft, objective))
}

/// First pair in canonical order whose node sets meet only in the
/// terminals.
pub fn select_redundant_pair<'a>(
    catalog: &'a FtCatalog,
    query: &QuerySpec,
) -> Option<(&'a FunctionalTopology, &'a FunctionalTopology)> {
    let pool: Vec<&FunctionalTopology> = catalog.iter().collect();
    pair_in_pool(&pool, query)
}

fn pair_in_pool<'a>(
    pool: &[&'a FunctionalTopology],
    query: &QuerySpec,
) -> Option<(&'a FunctionalTopology, &'a FunctionalTopology)> {
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            if pairwise_redundancy(pool[i], pool[j], query) == 1 {
                return Some((pool[i], pool[j]));
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationOptions {
    /// Worker threads; `0` or `1` is the single-threaded reference mode.
    pub threads: usize,
    /// Largest pool for which the exact probability is computed.
    pub exact_cap: usize,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            threads: 1,
            exact_cap: DEFAULT_MAX_FTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyOutcome {
    pub label: String,
    pub strategy: Strategy,
    pub pool_size: usize,
    /// Designated topologies for the static and pair strategies.
    pub designated: Vec<CanonicalFtKey>,
    pub rounds: u64,
    pub successes: u64,
    pub success_rate: f64,
    /// 95% normal-approximation half-width.
    pub ci95_half_width: f64,
    pub exact: Option<f64>,
    pub warning: Option<String>,
}

/// Paired check between two strategies whose pools are nested: counts the
/// rounds where the smaller pool succeeded and the larger one failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominanceCheck {
    pub subset: String,
    pub superset: String,
    pub violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub rounds: u64,
    pub node_fail_prob: f64,
    pub edge_fail_prob: f64,
    pub generator: String,
    pub catalog_size: usize,
    pub degeneracy: BTreeMap<usize, usize>,
    pub strategies: Vec<StrategyOutcome>,
    pub dominance: Vec<DominanceCheck>,
    pub assumptions: Vec<String>,
}

impl SimulationReport {
    pub fn outcome(&self, kind: StrategyKind) -> Option<&StrategyOutcome> {
        self.strategies.iter().find(|s| s.strategy.kind == kind)
    }
}

/// Single-threaded reference run.
pub fn run_simulation(
    catalog: &FtCatalog,
    model: &FailureModel,
    strategies: &[Strategy],
    rounds: u64,
) -> Result<SimulationReport, SimError> {
    run_simulation_with(
        catalog,
        model,
        strategies,
        rounds,
        &SimulationOptions::default(),
    )
}

pub fn run_simulation_with(
    catalog: &FtCatalog,
    model: &FailureModel,
    strategies: &[Strategy],
    rounds: u64,
    options: &SimulationOptions,
) -> Result<SimulationReport, SimError> {
    if rounds == 0 {
        return Err(SimError::ZeroRounds);
    }
    FailureModel::new(model.node_fail_prob, model.edge_fail_prob, model.seed)?;
    let query = catalog.query();
    let fts = catalog.as_slice();

    // pools as sorted catalog indices
    let mut pools: Vec<Vec<usize>> = Vec::with_capacity(strategies.len());
    let mut warnings: Vec<Option<String>> = Vec::with_capacity(strategies.len());
    for s in strategies {
        let admitted: Vec<usize> = (0..fts.len())
            .filter(|&i| s.constraint.admits(&fts[i]))
            .collect();
        let pool = match s.kind {
            StrategyKind::DegenerateFallback => admitted,
            StrategyKind::StaticSingle => {
                static_in_pool(admitted.iter().map(|&i| &fts[i]), s.objective)
                    .map(|ft| vec![index_of(fts, ft)])
                    .unwrap_or_default()
            }
            StrategyKind::RedundantPair => {
                let refs: Vec<&FunctionalTopology> = admitted.iter().map(|&i| &fts[i]).collect();
                pair_in_pool(&refs, query)
                    .map(|(a, b)| vec![index_of(fts, a), index_of(fts, b)])
                    .unwrap_or_default()
            }
        };
        warnings.push(match (pool.is_empty(), s.kind) {
            (false, _) => None,
            (true, StrategyKind::RedundantPair) if !fts.is_empty() => {
                Some("no redundant pair in the admitted pool".to_owned())
            }
            (true, _) => Some("admitted pool is empty".to_owned()),
        });
        pools.push(pool);
    }

    let universe = Universe::build(fts, query);
    let masks: Vec<Vec<u64>> = fts.iter().map(|ft| universe.mask(ft)).collect();
    let used: Vec<usize> = pools
        .iter()
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let nested: Vec<(usize, usize)> = nested_pairs(&pools);

    let blocks = rounds.div_ceil(ROUNDS_PER_BLOCK);
    let run_block = |block: u64| {
        let lo = block * ROUNDS_PER_BLOCK;
        let hi = (lo + ROUNDS_PER_BLOCK).min(rounds);
        let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
        rng.set_stream(block);
        let mut tally = Tally::new(pools.len(), nested.len());
        let mut dead = vec![0u64; universe.words()];
        let mut alive = vec![false; fts.len()];
        let mut success = vec![false; pools.len()];
        for _ in lo..hi {
            universe.draw(&mut rng, model, &mut dead);
            for &i in &used {
                alive[i] = masks[i].iter().zip(&dead).all(|(m, d)| m & d == 0);
            }
            for (k, pool) in pools.iter().enumerate() {
                success[k] = pool.iter().any(|&i| alive[i]);
                tally.successes[k] += u64::from(success[k]);
            }
            for (k, &(small, large)) in nested.iter().enumerate() {
                tally.violations[k] += u64::from(success[small] && !success[large]);
            }
        }
        tally
    };

    let threads = options.threads.max(1);
    let tallies: Vec<Tally> = if threads == 1 {
        (0..blocks).map(run_block).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| (0..blocks).into_par_iter().map(run_block).collect())
    };
    let mut total = Tally::new(pools.len(), nested.len());
    for t in tallies {
        total.absorb(&t);
    }

    let labels: Vec<String> = strategies.iter().map(ToString::to_string).collect();
    let outcomes = strategies
        .iter()
        .zip(&pools)
        .zip(warnings)
        .enumerate()
        .map(|(k, ((s, pool), warning))| {
            let rate = total.successes[k] as f64 / rounds as f64;
            let exact = if pool.is_empty() {
                Some(0.0)
            } else {
                let refs: Vec<&FunctionalTopology> = pool.iter().map(|&i| &fts[i]).collect();
                oracle::exact_success_probability_of(&refs, query, model, options.exact_cap).ok()
            };
            StrategyOutcome {
                label: labels[k].clone(),
                strategy: *s,
                pool_size: pool.len(),
                designated: match s.kind {
                    StrategyKind::DegenerateFallback => Vec::new(),
                    _ => pool.iter().map(|&i| catalog.keys()[i].clone()).collect(),
                },
                rounds,
                successes: total.successes[k],
                success_rate: rate,
                ci95_half_width: 1.96 * (rate * (1.0 - rate) / rounds as f64).sqrt(),
                exact,
                warning,
            }
        })
        .collect();
    let dominance = nested
        .iter()
        .zip(&total.violations)
        .map(|(&(small, large), &violations)| DominanceCheck {
            subset: labels[small].clone(),
            superset: labels[large].clone(),
            violations,
        })
        .collect();

    Ok(SimulationReport {
        seed: model.seed,
        rounds,
        node_fail_prob: model.node_fail_prob,
        edge_fail_prob: model.edge_fail_prob,
        generator: format!("chacha8, stream per block of {ROUNDS_PER_BLOCK} rounds"),
        catalog_size: fts.len(),
        degeneracy: catalog.delay_histogram(),
        strategies: outcomes,
        dominance,
        assumptions: vec![
            "inputs and sink never fail".to_owned(),
            "failures are independent and redrawn every round".to_owned(),
            "an omniscient selector finds any surviving topology at no cost".to_owned(),
        ],
    })
}

fn index_of(fts: &[FunctionalTopology], ft: &FunctionalTopology) -> usize {
    fts.iter()
        .position(|f| std::ptr::eq(f, ft))
        .expect("topology borrowed from the catalog")
}

/// Ordered strategy pairs `(a, b)`, `a != b`, with `pool(a) ⊆ pool(b)` and
/// `pool(a)` nonempty.
fn nested_pairs(pools: &[Vec<usize>]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (a, pa) in pools.iter().enumerate() {
        for (b, pb) in pools.iter().enumerate() {
            if a != b
                && !pa.is_empty()
                && pa != pb
                && pa.iter().all(|i| pb.binary_search(i).is_ok())
            {
                out.push((a, b));
            }
        }
    }
    out
}

struct Tally {
    successes: Vec<u64>,
    violations: Vec<u64>,
}

impl Tally {
    fn new(strategies: usize, checks: usize) -> Self {
        Tally {
            successes: vec![0; strategies],
            violations: vec![0; checks],
        }
    }

    fn absorb(&mut self, other: &Tally) {
        for (a, b) in self.successes.iter_mut().zip(&other.successes) {
            *a += b;
        }
        for (a, b) in self.violations.iter_mut().zip(&other.violations) {
            *a += b;
        }
    }
}

/// Relay nodes then links appearing anywhere in the catalog, one bit each.
struct Universe {
    nodes: Vec<NodeId>,
    edges: Vec<(NodeId, NodeId)>,
}

impl Universe {
    fn build(fts: &[FunctionalTopology], query: &QuerySpec) -> Self {
        let mut nodes = BTreeSet::new();
        let mut edges = BTreeSet::new();
        for ft in fts {
            nodes.extend(ft.nodes().iter().filter(|n| !query.is_terminal(n)).cloned());
            edges.extend(ft.undirected_edges().map(|(a, b)| (a.clone(), b.clone())));
        }
        Universe {
            nodes: nodes.into_iter().collect(),
            edges: edges.into_iter().collect(),
        }
    }

    fn words(&self) -> usize {
        (self.nodes.len() + self.edges.len()).div_ceil(64).max(1)
    }

    fn mask(&self, ft: &FunctionalTopology) -> Vec<u64> {
        let mut mask = vec![0u64; self.words()];
        let mut set = |bit: usize| mask[bit / 64] |= 1 << (bit % 64);
        for n in ft.nodes() {
            if let Ok(i) = self.nodes.binary_search(n) {
                set(i);
            }
        }
        for (a, b) in ft.undirected_edges() {
            let i = self
                .edges
                .binary_search_by(|(p, q)| (p, q).cmp(&(a, b)))
                .expect("edge collected into universe");
            set(self.nodes.len() + i);
        }
        mask
    }

    fn draw(&self, rng: &mut ChaCha8Rng, model: &FailureModel, dead: &mut [u64]) {
        dead.iter_mut().for_each(|w| *w = 0);
        let total = self.nodes.len() + self.edges.len();
        for bit in 0..total {
            let p = if bit < self.nodes.len() {
                model.node_fail_prob
            } else {
                model.edge_fail_prob
            };
            if rng.random::<f64>() < p {
                dead[bit / 64] |= 1 << (bit % 64);
            }
        }
    }
}
