//! Brute-force reference implementations for small instances.
//!
//! Nothing here calls into the enumeration code; only the
//! [`FunctionalTopology`] type is shared.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::enumeration::{FtCatalog, Provenance};
use crate::graph::{FunctionalTopology, NodeId, PhysicalNetwork, QuerySpec};
use crate::sim::FailureModel;
use crate::subgraph::Subgraph;

pub const DEFAULT_MAX_NODES: usize = 10;
pub const DEFAULT_MAX_FTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("network has {nodes} nodes, oracle cap is {cap}")]
    TooManyNodes { nodes: usize, cap: usize },
    #[error("{fts} topologies exceed the inclusion-exclusion cap of {cap}")]
    TooManyTopologies { fts: usize, cap: usize },
    #[error("graph is empty")]
    EmptyGraph,
}

/// Every functional topology, by exhaustive search with the default cap.
pub fn oracle_enumerate_fts(
    net: &PhysicalNetwork,
    query: &QuerySpec,
) -> Result<FtCatalog, OracleError> {
    oracle_enumerate_fts_capped(net, query, DEFAULT_MAX_NODES)
}

/// For every node subset containing the terminals, every spanning tree of
/// the induced subgraph is oriented toward the sink and kept when its leaves
/// are inputs and its depth fits the budget.
pub fn oracle_enumerate_fts_capped(
    net: &PhysicalNetwork,
    query: &QuerySpec,
    max_nodes: usize,
) -> Result<FtCatalog, OracleError> {
    let n = net.node_count();
    if n > max_nodes {
        return Err(OracleError::TooManyNodes {
            nodes: n,
            cap: max_nodes,
        });
    }
    let is_input: Vec<bool> = net
        .nodes()
        .iter()
        .map(|v| query.inputs().contains(v))
        .collect();
    let sink = net
        .nodes()
        .iter()
        .position(|v| v == query.sink())
        .expect("query validated against network");
    let optional: Vec<usize> = (0..n).filter(|&v| v != sink && !is_input[v]).collect();

    let mut found = Vec::new();
    for mask in 0u64..(1u64 << optional.len()) {
        let mut member = vec![false; n];
        member[sink] = true;
        for v in 0..n {
            member[v] |= is_input[v];
        }
        for (bit, &v) in optional.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                member[v] = true;
            }
        }
        let size = member.iter().filter(|&&m| m).count();
        let induced: Vec<(usize, usize)> = net
            .edge_indices()
            .iter()
            .copied()
            .filter(|&(a, b)| member[a] && member[b])
            .collect();
        if induced.len() + 1 < size {
            continue;
        }
        let mut chosen = Vec::with_capacity(size - 1);
        let forest: Vec<usize> = (0..n).collect();
        choose_forests(&induced, 0, size - 1, &mut chosen, forest, &mut |tree| {
            if let Some(ft) = orient_and_filter(net, tree, &member, &is_input, sink, query.d_max())
            {
                found.push(ft);
            }
        });
    }
    Ok(FtCatalog::from_topologies(
        query.clone(),
        Provenance::Oracle,
        found,
    ))
}

/// Picks `need` more edges from `edges[start..]` that keep the chosen set
/// acyclic; `forest` is a plain parent array owned per branch.
type EdgeSink<'a> = dyn FnMut(&[(usize, usize)]) + 'a;

fn choose_forests(
    edges: &[(usize, usize)],
    start: usize,
    need: usize,
    chosen: &mut Vec<(usize, usize)>,
    forest: Vec<usize>,
    emit: &mut EdgeSink<'_>,
) {
    if need == 0 {
        emit(chosen);
        return;
    }
    if edges.len() - start < need {
        return;
    }
    fn root(f: &[usize], mut v: usize) -> usize {
        while f[v] != v {
            v = f[v];
        }
        v
    }
    for i in start..edges.len() {
        if edges.len() - i < need {
            break;
        }
        let (a, b) = edges[i];
        let (ra, rb) = (root(&forest, a), root(&forest, b));
        if ra == rb {
            continue;
        }
        let mut next = forest.clone();
        next[ra] = rb;
        chosen.push(edges[i]);
        choose_forests(edges, i + 1, need - 1, chosen, next, emit);
        chosen.pop();
    }
}

fn orient_and_filter(
    net: &PhysicalNetwork,
    tree: &[(usize, usize)],
    member: &[bool],
    is_input: &[bool],
    sink: usize,
    d_max: usize,
) -> Option<FunctionalTopology> {
    let n = member.len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in tree {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut depth = vec![None; n];
    depth[sink] = Some(0usize);
    let mut queue = VecDeque::from([sink]);
    let mut directed = Vec::new();
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if depth[v].is_none() {
                depth[v] = Some(depth[u]? + 1);
                directed.push((net.label(v).clone(), net.label(u).clone()));
                queue.push_back(v);
            }
        }
    }
    for v in 0..n {
        if !member[v] {
            continue;
        }
        let d = depth[v]?;
        if d > d_max {
            return None;
        }
        if v != sink && adj[v].len() == 1 && !is_input[v] {
            return None;
        }
    }
    FunctionalTopology::from_edges(net.label(sink).clone(), directed).ok()
}

/// Spanning tree count from the Kirchhoff determinant, computed exactly
/// with fraction-free (Bareiss) elimination on a reduced Laplacian.
pub fn matrix_tree_count(sub: &Subgraph) -> Result<BigInt, OracleError> {
    let n = sub.node_count();
    if n == 0 {
        return Err(OracleError::EmptyGraph);
    }
    let m = n - 1;
    let mut lap = vec![vec![BigInt::zero(); m]; m];
    for &(a, b) in sub.edges() {
        for (u, v) in [(a, b), (b, a)] {
            if u < m {
                lap[u][u] += 1;
                if v < m {
                    lap[u][v] -= 1;
                }
            }
        }
    }
    Ok(bareiss_determinant(lap))
}

fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let m = a.len();
    if m == 0 {
        return BigInt::one();
    }
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..m - 1 {
        if a[k][k].is_zero() {
            match (k + 1..m).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..m {
            for j in k + 1..m {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[m - 1][m - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Failable relays and undirected links of one topology.
type Footprint = (BTreeSet<NodeId>, BTreeSet<(NodeId, NodeId)>);

/// Probability that at least one catalog entry has every node and link
/// alive, by inclusion-exclusion with the default cap. Inputs and sink never
/// fail.
pub fn exact_success_probability(
    catalog: &FtCatalog,
    failure: &FailureModel,
) -> Result<f64, OracleError> {
    let pool: Vec<&FunctionalTopology> = catalog.iter().collect();
    exact_success_probability_of(&pool, catalog.query(), failure, DEFAULT_MAX_FTS)
}

/// Inclusion-exclusion over subsets of `pool`.
pub fn exact_success_probability_of(
    pool: &[&FunctionalTopology],
    query: &QuerySpec,
    failure: &FailureModel,
    cap: usize,
) -> Result<f64, OracleError> {
    if pool.len() > cap {
        return Err(OracleError::TooManyTopologies {
            fts: pool.len(),
            cap,
        });
    }
    let parts: Vec<Footprint> = pool
        .iter()
        .map(|ft| {
            let nodes = ft
                .nodes()
                .iter()
                .filter(|v| !query.is_terminal(v))
                .cloned()
                .collect();
            let edges = ft
                .edges()
                .iter()
                .map(|(a, b)| {
                    if a < b {
                        (a.clone(), b.clone())
                    } else {
                        (b.clone(), a.clone())
                    }
                })
                .collect();
            (nodes, edges)
        })
        .collect();
    let node_alive = 1.0 - failure.node_fail_prob();
    let edge_alive = 1.0 - failure.edge_fail_prob();

    fn rec(
        parts: &[Footprint],
        start: usize,
        sign: f64,
        nodes: &BTreeSet<NodeId>,
        edges: &BTreeSet<(NodeId, NodeId)>,
        node_alive: f64,
        edge_alive: f64,
    ) -> f64 {
        let mut total = 0.0;
        for i in start..parts.len() {
            let un: BTreeSet<NodeId> = nodes.union(&parts[i].0).cloned().collect();
            let ue: BTreeSet<(NodeId, NodeId)> = edges.union(&parts[i].1).cloned().collect();
            total += sign * node_alive.powi(un.len() as i32) * edge_alive.powi(ue.len() as i32);
            total += rec(parts, i + 1, -sign, &un, &ue, node_alive, edge_alive);
        }
        total
    }

    let p = rec(
        &parts,
        0,
        1.0,
        &BTreeSet::new(),
        &BTreeSet::new(),
        node_alive,
        edge_alive,
    );
    Ok(p.clamp(0.0, 1.0))
}
