//! Enumeration of every functional topology for a query.
//!
//! For each input the simple paths to the sink within the budget are listed.
//! Every combination of one path per input is unioned; a union that is a
//! tree is kept as is, otherwise each of its spanning trees is taken. Leaves
//! that are not inputs are pruned, the result is oriented toward the sink,
//! checked against the budget again and deduplicated by canonical key.

mod catalog;
mod paths;
mod spanning;

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{
    CanonicalFtKey, FunctionalTopology, GraphError, NodeId, PhysicalNetwork, QuerySpec,
};
use crate::subgraph::Subgraph;

pub use catalog::{FtCatalog, Provenance};
pub use paths::{enumerate_simple_paths, SimplePath};
pub use spanning::{all_spanning_trees, count_spanning_trees, for_each_spanning_tree, is_tree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no path within {d_max} hops from input(s) {}", join(.inputs))]
    NoPathWithinBudget { inputs: Vec<NodeId>, d_max: usize },
    #[error("combination space exceeds 2^64")]
    TooManyCombinations,
    #[error("path combination has {found} paths for {expected} inputs")]
    BadCombination { expected: usize, found: usize },
}

fn join(nodes: &[NodeId]) -> String {
    nodes
        .iter()
        .map(NodeId::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

/// One simple path per input, in input label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCombination(Vec<SimplePath>);

impl PathCombination {
    pub fn new(query: &QuerySpec, paths: Vec<SimplePath>) -> Result<Self, EnumerationError> {
        let ok = paths.len() == query.inputs().len()
            && paths
                .iter()
                .zip(query.inputs())
                .all(|(p, x)| !p.is_empty() && p.source() == x && p.target() == query.sink());
        if !ok {
            return Err(EnumerationError::BadCombination {
                expected: query.inputs().len(),
                found: paths.len(),
            });
        }
        Ok(PathCombination(paths))
    }

    pub fn paths(&self) -> &[SimplePath] {
        &self.0
    }
}

/// Union of the nodes and edges of every path in the combination.
pub fn union_combination(combo: &PathCombination) -> Subgraph {
    Subgraph::from_labeled(
        combo.0.iter().flat_map(|p| p.nodes().iter().cloned()),
        combo
            .0
            .iter()
            .flat_map(|p| p.nodes().windows(2).map(|w| (w[0].clone(), w[1].clone()))),
    )
}

/// Why a tree did not yield a functional topology.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PruneReject {
    #[error("delay {delay} exceeds budget {d_max}")]
    OverBudget { delay: usize, d_max: usize },
    #[error("input is not a connected tree")]
    NotATree,
    #[error("tree does not contain terminal `{0}`")]
    MissingTerminal(NodeId),
}

/// Strips non-input leaves until every leaf is an input (the sink is never
/// removed), orients edges toward the sink and checks the budget.
pub fn prune_non_input_leaves(
    tree: &Subgraph,
    query: &QuerySpec,
) -> Result<FunctionalTopology, PruneReject> {
    let mut terminal = vec![false; tree.node_count()];
    for t in query.inputs().iter().chain(std::iter::once(query.sink())) {
        match tree.index_of(t) {
            Some(i) => terminal[i] = true,
            None => return Err(PruneReject::MissingTerminal(t.clone())),
        }
    }
    let sink = tree.index_of(query.sink()).expect("checked above");
    if !is_tree(tree) || !tree.is_connected() {
        return Err(PruneReject::NotATree);
    }
    prune_and_orient(tree, tree.edges(), &terminal, sink, query.d_max())
}

/// `edges` must form a spanning tree of `sub`'s node set.
fn prune_and_orient(
    sub: &Subgraph,
    edges: &[(usize, usize)],
    terminal: &[bool],
    sink: usize,
    d_max: usize,
) -> Result<FunctionalTopology, PruneReject> {
    let n = sub.node_count();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut alive = vec![true; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| degree[v] <= 1 && !terminal[v]).collect();
    while let Some(v) = queue.pop_front() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &u in &adj[v] {
            if alive[u] {
                degree[u] -= 1;
                if degree[u] <= 1 && !terminal[u] {
                    queue.push_back(u);
                }
            }
        }
    }

    let mut depth = vec![usize::MAX; n];
    depth[sink] = 0;
    let mut directed = Vec::with_capacity(n);
    let mut bfs = VecDeque::from([sink]);
    while let Some(u) = bfs.pop_front() {
        for &v in &adj[u] {
            if alive[v] && depth[v] == usize::MAX {
                depth[v] = depth[u] + 1;
                directed.push((sub.nodes()[v].clone(), sub.nodes()[u].clone()));
                bfs.push_back(v);
            }
        }
    }
    if let Some(missing) = (0..n).find(|&v| terminal[v] && depth[v] == usize::MAX) {
        return Err(PruneReject::MissingTerminal(sub.nodes()[missing].clone()));
    }
    let delay = (0..n)
        .filter(|&v| alive[v])
        .map(|v| depth[v])
        .max()
        .unwrap_or(0);
    if delay > d_max {
        return Err(PruneReject::OverBudget { delay, d_max });
    }
    FunctionalTopology::from_edges(sub.nodes()[sink].clone(), directed)
        .map_err(|_| PruneReject::NotATree)
}

/// Progress callback: `(combinations processed, total combinations)`.
pub type Progress<'a> = &'a (dyn Fn(u64, u64) + Sync);

#[derive(Clone, Copy, Default)]
pub struct EnumerationOptions<'a> {
    /// Worker threads; `0` or `1` runs the single-threaded reference path.
    pub threads: usize,
    pub progress: Option<Progress<'a>>,
}

impl std::fmt::Debug for EnumerationOptions<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EnumerationOptions")
            .field("threads", &self.threads)
            .field("progress", &self.progress.is_some())
            .finish()
    }
}

/// Single-threaded reference enumeration.
pub fn find_fts(net: &PhysicalNetwork, query: &QuerySpec) -> Result<FtCatalog, EnumerationError> {
    find_fts_with(net, query, &EnumerationOptions::default())
}

pub fn find_fts_with(
    net: &PhysicalNetwork,
    query: &QuerySpec,
    options: &EnumerationOptions<'_>,
) -> Result<FtCatalog, EnumerationError> {
    let space = PathSpace::build(net, query)?;
    let total = space.total;
    let processed = AtomicU64::new(0);
    let threads = options.threads.max(1);

    let found: BTreeMap<CanonicalFtKey, FunctionalTopology> = if threads == 1 {
        space.run_range(net, query, 0, total, &processed, options.progress)
    } else {
        let slices = (threads as u64 * 8).min(total.max(1));
        let bounds: Vec<(u64, u64)> = (0..slices)
            .map(|i| {
                let cut = |k: u64| (total as u128 * k as u128 / slices as u128) as u64;
                (cut(i), cut(i + 1))
            })
            .collect();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        let parts: Vec<BTreeMap<CanonicalFtKey, FunctionalTopology>> = pool.install(|| {
            bounds
                .par_iter()
                .map(|&(lo, hi)| space.run_range(net, query, lo, hi, &processed, options.progress))
                .collect()
        });
        let mut merged = BTreeMap::new();
        for part in parts {
            merged.extend(part);
        }
        merged
    };
    if let Some(cb) = options.progress {
        cb(total, total);
    }
    Ok(FtCatalog::from_sorted(
        query.clone(),
        Provenance::Enumeration,
        found,
    ))
}

/// Lazily yields every path combination in mixed-radix order (last input
/// varies fastest).
pub fn path_combinations(
    net: &PhysicalNetwork,
    query: &QuerySpec,
) -> Result<impl Iterator<Item = PathCombination>, EnumerationError> {
    let space = PathSpace::build(net, query)?;
    let labeled: Vec<Vec<SimplePath>> = query
        .inputs()
        .iter()
        .map(|x| enumerate_simple_paths(net, x, query.sink(), query.d_max()))
        .collect();
    Ok(Odometer::new(space.radices.clone(), 0)
        .take(space.total as usize)
        .map(move |digits| {
            PathCombination(
                digits
                    .iter()
                    .enumerate()
                    .map(|(i, &d)| labeled[i][d].clone())
                    .collect(),
            )
        }))
}

/// Every distinct path-combination union, in canonical order.
pub fn distinct_unions(
    net: &PhysicalNetwork,
    query: &QuerySpec,
) -> Result<Vec<Subgraph>, EnumerationError> {
    let space = PathSpace::build(net, query)?;
    let mut seen = BTreeSet::new();
    for digits in Odometer::new(space.radices.clone(), 0).take(space.total as usize) {
        seen.insert(space.union_edges(&digits));
    }
    Ok(seen
        .into_iter()
        .map(|edges| space.subgraph(net, &edges))
        .collect())
}

/// Index-level path lists for all inputs.
struct PathSpace {
    /// Per input: per path, sorted network edge positions.
    path_edges: Vec<Vec<Vec<usize>>>,
    radices: Vec<usize>,
    total: u64,
    sink: usize,
    inputs: Vec<usize>,
}

impl PathSpace {
    fn build(net: &PhysicalNetwork, query: &QuerySpec) -> Result<Self, EnumerationError> {
        let locate = |n: &NodeId| {
            net.index_of(n)
                .ok_or_else(|| GraphError::UnknownNode(n.clone()))
        };
        let sink = locate(query.sink())?;
        let inputs = query
            .inputs()
            .iter()
            .map(locate)
            .collect::<Result<Vec<_>, _>>()?;
        if !net.is_connected() {
            return Err(GraphError::Disconnected.into());
        }
        let mut path_edges = Vec::with_capacity(inputs.len());
        let mut unreachable = Vec::new();
        for &x in &inputs {
            let paths = paths::simple_paths_by_index(net, x, sink, query.d_max());
            if paths.is_empty() {
                unreachable.push(net.label(x).clone());
            }
            path_edges.push(
                paths
                    .iter()
                    .map(|p| {
                        let mut e: Vec<usize> = p
                            .windows(2)
                            .map(|w| net.edge_position(w[0], w[1]).expect("path uses edges"))
                            .collect();
                        e.sort_unstable();
                        e
                    })
                    .collect::<Vec<_>>(),
            );
        }
        if !unreachable.is_empty() {
            return Err(EnumerationError::NoPathWithinBudget {
                inputs: unreachable,
                d_max: query.d_max(),
            });
        }
        let radices: Vec<usize> = path_edges.iter().map(Vec::len).collect();
        let total = radices
            .iter()
            .try_fold(1u64, |acc, &r| acc.checked_mul(r as u64))
            .ok_or(EnumerationError::TooManyCombinations)?;
        Ok(PathSpace {
            path_edges,
            radices,
            total,
            sink,
            inputs,
        })
    }

    fn union_edges(&self, digits: &[usize]) -> Vec<usize> {
        let mut edges: Vec<usize> = digits
            .iter()
            .enumerate()
            .flat_map(|(i, &d)| self.path_edges[i][d].iter().copied())
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    fn subgraph(&self, net: &PhysicalNetwork, edges: &[usize]) -> Subgraph {
        let mut nodes: Vec<usize> = edges
            .iter()
            .flat_map(|&e| {
                let (a, b) = net.edge_indices()[e];
                [a, b]
            })
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        Subgraph::from_network(net, &nodes, edges.iter().copied())
    }

    fn run_range(
        &self,
        net: &PhysicalNetwork,
        query: &QuerySpec,
        lo: u64,
        hi: u64,
        processed: &AtomicU64,
        progress: Option<Progress<'_>>,
    ) -> BTreeMap<CanonicalFtKey, FunctionalTopology> {
        const REPORT_EVERY: u64 = 4096;
        let mut found = BTreeMap::new();
        let mut seen_unions: HashSet<Vec<usize>> = HashSet::new();
        let mut pending = 0u64;
        for digits in Odometer::new(self.radices.clone(), lo).take((hi - lo) as usize) {
            pending += 1;
            if pending == REPORT_EVERY {
                let done = processed.fetch_add(pending, Ordering::Relaxed) + pending;
                pending = 0;
                if let Some(cb) = progress {
                    cb(done, self.total);
                }
            }
            let edges = self.union_edges(&digits);
            if !seen_unions.insert(edges.clone()) {
                continue;
            }
            let sub = self.subgraph(net, &edges);
            let mut terminal = vec![false; sub.node_count()];
            for &g in self.inputs.iter().chain(std::iter::once(&self.sink)) {
                terminal[sub.index_of(net.label(g)).expect("paths cover terminals")] = true;
            }
            let sink = sub
                .index_of(net.label(self.sink))
                .expect("paths end at sink");
            let mut keep = |tree: &[(usize, usize)]| {
                if let Ok(ft) = prune_and_orient(&sub, tree, &terminal, sink, query.d_max()) {
                    debug_assert_eq!(ft.check_against(net, query), Ok(()));
                    found.insert(ft.canonical_key(), ft);
                }
            };
            if is_tree(&sub) {
                keep(sub.edges());
            } else {
                for_each_spanning_tree(&sub, &mut keep);
            }
        }
        processed.fetch_add(pending, Ordering::Relaxed);
        found
    }
}

/// Mixed-radix counter starting at a linear offset.
struct Odometer {
    radices: Vec<usize>,
    digits: Vec<usize>,
    exhausted: bool,
}

impl Odometer {
    fn new(radices: Vec<usize>, start: u64) -> Self {
        let mut digits = vec![0; radices.len()];
        let mut rest = start;
        for (d, &r) in digits.iter_mut().zip(&radices).rev() {
            *d = (rest % r as u64) as usize;
            rest /= r as u64;
        }
        let exhausted = rest > 0 || radices.contains(&0);
        Odometer {
            radices,
            digits,
            exhausted,
        }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.exhausted {
            return None;
        }
        let current = self.digits.clone();
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.exhausted = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.radices[i] {
                break;
            }
            self.digits[i] = 0;
        }
        Some(current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(nodes: &[&str], edges: &[(&str, &str)]) -> PhysicalNetwork {
        PhysicalNetwork::validate(nodes.iter().copied(), edges.iter().copied()).unwrap()
    }

    fn keys(cat: &FtCatalog) -> Vec<String> {
        cat.iter()
            .map(|ft| ft.canonical_key().to_string())
            .collect()
    }

    fn path(nodes: &[&str]) -> SimplePath {
        let edges: Vec<(&str, &str)> = nodes.windows(2).map(|w| (w[0], w[1])).collect();
        let g = net(nodes, &edges);
        enumerate_simple_paths(
            &g,
            &nodes[0].into(),
            &nodes[nodes.len() - 1].into(),
            nodes.len(),
        )
        .pop()
        .unwrap()
    }

    #[test]
    fn odometer_covers_space_from_offset() {
        let all: Vec<_> = Odometer::new(vec![2, 3], 0).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[4], vec![1, 1]);
        let tail: Vec<_> = Odometer::new(vec![2, 3], 4).collect();
        assert_eq!(tail, all[4..].to_vec());
    }

    #[test]
    fn union_of_single_path() {
        let g = net(&["x", "y"], &[("x", "y")]);
        let q = QuerySpec::new(&g, ["x"], "y", Some(1)).unwrap();
        let combo = PathCombination::new(&q, vec![path(&["x", "y"])]).unwrap();
        let u = union_combination(&combo);
        assert_eq!(u.node_count(), 2);
        assert_eq!(u.edge_count(), 1);
        assert!(is_tree(&u));
    }

    #[test]
    fn union_of_star_paths_is_tree() {
        let g = net(
            &["x1", "x2", "m", "y"],
            &[("x1", "m"), ("x2", "m"), ("m", "y")],
        );
        let q = QuerySpec::new(&g, ["x1", "x2"], "y", Some(2)).unwrap();
        let combo =
            PathCombination::new(&q, vec![path(&["x1", "m", "y"]), path(&["x2", "m", "y"])])
                .unwrap();
        let u = union_combination(&combo);
        assert_eq!((u.node_count(), u.edge_count()), (4, 3));
        assert!(is_tree(&u));
    }

    #[test]
    fn union_with_cycle() {
        let g = net(
            &["x1", "x2", "a", "y"],
            &[("x1", "a"), ("a", "x2"), ("x2", "y"), ("a", "y")],
        );
        let q = QuerySpec::new(&g, ["x1", "x2"], "y", Some(3)).unwrap();
        let combo = PathCombination::new(
            &q,
            vec![path(&["x1", "a", "x2", "y"]), path(&["x2", "a", "y"])],
        )
        .unwrap();
        let u = union_combination(&combo);
        assert!(!is_tree(&u));
        let has = |a: &str, b: &str| {
            u.labeled_edges().any(|(p, q)| {
                (p.as_str(), q.as_str()) == (a, b) || (p.as_str(), q.as_str()) == (b, a)
            })
        };
        assert!(has("a", "x2") && has("x2", "y") && has("a", "y"));
        assert_eq!(count_spanning_trees(&u), 3);
    }

    #[test]
    fn bad_combination_rejected() {
        let g = net(&["x", "y"], &[("x", "y")]);
        let q = QuerySpec::new(&g, ["x"], "y", Some(1)).unwrap();
        assert!(PathCombination::new(&q, vec![]).is_err());
    }

    #[test]
    fn prune_keeps_chain_through_input() {
        let g = net(
            &["x1", "x2", "a", "y"],
            &[("x1", "a"), ("a", "x2"), ("x2", "y"), ("a", "y")],
        );
        let q = QuerySpec::new(&g, ["x1", "x2"], "y", Some(3)).unwrap();
        let tree =
            Subgraph::from_labeled(Vec::<&str>::new(), [("x1", "a"), ("a", "x2"), ("x2", "y")]);
        let ft = prune_non_input_leaves(&tree, &q).unwrap();
        assert_eq!(ft.canonical_key().to_string(), "{a->x2, x1->a, x2->y}");
        assert_eq!(ft.delay(), 3);
    }

    #[test]
    fn prune_removes_dangling_leaf() {
        let g = net(&["x", "y", "b"], &[("x", "y"), ("b", "y")]);
        let q = QuerySpec::new(&g, ["x"], "y", Some(1)).unwrap();
        let tree = Subgraph::from_labeled(Vec::<&str>::new(), [("x", "y"), ("b", "y")]);
        let ft = prune_non_input_leaves(&tree, &q).unwrap();
        assert_eq!(ft.canonical_key().to_string(), "{x->y}");
    }

    #[test]
    fn prune_removes_hanging_chain_iteratively() {
        let g = net(
            &["x", "y", "p", "q", "r"],
            &[("x", "y"), ("y", "p"), ("p", "q"), ("q", "r")],
        );
        let q = QuerySpec::new(&g, ["x"], "y", Some(1)).unwrap();
        let tree = Subgraph::from_labeled(
            Vec::<&str>::new(),
            [("x", "y"), ("y", "p"), ("p", "q"), ("q", "r")],
        );
        // fixpoint oracle: repeatedly drop non-terminal degree-1 nodes
        let mut edges: Vec<(&str, &str)> = vec![("x", "y"), ("y", "p"), ("p", "q"), ("q", "r")];
        loop {
            let deg = |n: &str| edges.iter().filter(|(a, b)| *a == n || *b == n).count();
            let before = edges.len();
            let leaf = ["p", "q", "r"].into_iter().find(|n| deg(n) == 1);
            if let Some(l) = leaf {
                edges.retain(|(a, b)| *a != l && *b != l);
            }
            if edges.len() == before {
                break;
            }
        }
        assert_eq!(edges, vec![("x", "y")]);
        let ft = prune_non_input_leaves(&tree, &q).unwrap();
        assert_eq!(ft.canonical_key().to_string(), "{x->y}");
    }

    #[test]
    fn prune_rejects_over_budget() {
        let g = net(&["x", "a", "y"], &[("x", "a"), ("a", "y")]);
        let q = QuerySpec::new(&g, ["x"], "y", Some(1)).unwrap();
        let tree = Subgraph::from_labeled(Vec::<&str>::new(), [("x", "a"), ("a", "y")]);
        assert_eq!(
            prune_non_input_leaves(&tree, &q),
            Err(PruneReject::OverBudget { delay: 2, d_max: 1 })
        );
    }

    #[test]
    fn triangle_catalog() {
        let g = net(&["x", "a", "y"], &[("x", "a"), ("a", "y"), ("x", "y")]);
        let q = QuerySpec::new(&g, ["x"], "y", Some(2)).unwrap();
        let cat = find_fts(&g, &q).unwrap();
        assert_eq!(keys(&cat), ["{a->y, x->a}", "{x->y}"]);
        let delays: Vec<usize> = cat.iter().map(|f| f.delay()).collect();
        assert_eq!(delays, [2, 1]);
    }

    #[test]
    fn star_catalog() {
        let g = net(
            &["x1", "x2", "m", "y"],
            &[("x1", "m"), ("x2", "m"), ("m", "y")],
        );
        let q = QuerySpec::new(&g, ["x1", "x2"], "y", Some(2)).unwrap();
        let cat = find_fts(&g, &q).unwrap();
        assert_eq!(keys(&cat), ["{m->y, x1->m, x2->m}"]);
    }

    #[test]
    fn diamond_catalog() {
        let g = net(
            &["x", "a", "b", "y"],
            &[("x", "a"), ("x", "b"), ("a", "y"), ("b", "y")],
        );
        let q = QuerySpec::new(&g, ["x"], "y", Some(2)).unwrap();
        let cat = find_fts(&g, &q).unwrap();
        assert_eq!(keys(&cat), ["{a->y, x->a}", "{b->y, x->b}"]);
        assert_eq!(cat.by_delay(2).count(), 2);
    }

    #[test]
    fn errors_are_reported() {
        let g = net(&["x", "a", "y", "z"], &[("x", "a"), ("a", "y")]);
        let q = QuerySpec::new(&g, ["x"], "y", Some(2)).unwrap();
        assert_eq!(
            find_fts(&g, &q).unwrap_err(),
            EnumerationError::Graph(GraphError::Disconnected)
        );
        let g = net(&["x", "a", "y", "w"], &[("x", "a"), ("a", "y"), ("w", "y")]);
        let q = QuerySpec::new(&g, ["x", "w"], "y", Some(1)).unwrap();
        assert_eq!(
            find_fts(&g, &q).unwrap_err(),
            EnumerationError::NoPathWithinBudget {
                inputs: vec!["x".into()],
                d_max: 1
            }
        );
    }

    #[test]
    fn threaded_matches_reference() {
        let labels: Vec<String> = (0..7).map(|i| format!("n{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..7 {
            for j in i + 1..7 {
                if (i * 3 + j) % 4 != 0 {
                    edges.push((labels[i].clone(), labels[j].clone()));
                }
            }
        }
        let g = PhysicalNetwork::validate(labels, edges).unwrap();
        let q = QuerySpec::new(&g, ["n1", "n4", "n5"], "n0", None).unwrap();
        let reference = find_fts(&g, &q).unwrap();
        for threads in [2, 3, 8] {
            let opts = EnumerationOptions {
                threads,
                progress: None,
            };
            assert_eq!(find_fts_with(&g, &q, &opts).unwrap(), reference);
        }
    }

    #[test]
    fn progress_reaches_total() {
        use std::sync::Mutex;
        let g = net(&["x", "a", "y"], &[("x", "a"), ("a", "y"), ("x", "y")]);
        let q = QuerySpec::new(&g, ["x"], "y", Some(2)).unwrap();
        let last = Mutex::new((0, 0));
        let cb = |done: u64, total: u64| *last.lock().unwrap() = (done, total);
        let opts = EnumerationOptions {
            threads: 1,
            progress: Some(&cb),
        };
        find_fts_with(&g, &q, &opts).unwrap();
        assert_eq!(*last.lock().unwrap(), (2, 2));
    }

    #[test]
    fn combinations_stream_lazily() {
        let g = net(
            &["x1", "x2", "a", "b", "y"],
            &[
                ("x1", "a"),
                ("x1", "b"),
                ("x2", "a"),
                ("x2", "b"),
                ("a", "y"),
                ("b", "y"),
            ],
        );
        let q = QuerySpec::new(&g, ["x1", "x2"], "y", None).unwrap();
        let mut it = path_combinations(&g, &q).unwrap();
        let first = it.next().unwrap();
        assert_eq!(first.paths().len(), 2);
        assert_eq!(1 + it.count() as u64, {
            let a = enumerate_simple_paths(&g, &"x1".into(), &"y".into(), q.d_max()).len();
            let b = enumerate_simple_paths(&g, &"x2".into(), &"y".into(), q.d_max()).len();
            (a * b) as u64
        });
    }
}
