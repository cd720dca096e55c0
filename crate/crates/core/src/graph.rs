//! Physical network, query and functional topology data model.
//!
//! Node labels are opaque strings. Every canonical form in the crate orders
//! nodes by label, never by insertion order, so results reproduce across runs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque, totally ordered node label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(label: impl Into<String>) -> Self {
        NodeId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl From<&NodeId> for NodeId {
    fn from(n: &NodeId) -> Self {
        n.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("network has no nodes")]
    EmptyNetwork,
    #[error("self-edge on node `{0}`")]
    SelfEdge(NodeId),
    #[error("edge ({0}, {1}) references unknown node `{2}`")]
    UnknownEdgeEndpoint(NodeId, NodeId, NodeId),
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("network is disconnected")]
    Disconnected,
    #[error("input set is empty")]
    NoInputs,
    #[error("sink `{0}` is also listed as an input")]
    SinkIsInput(NodeId),
    #[error("delay budget must be at least 1 hop")]
    ZeroBudget,
}

/// Simple undirected graph `G = (V, E)` of physical nodes and links.
///
/// Nodes are stored sorted by label; node indices therefore follow label
/// order, which the enumeration code relies on for deterministic output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhysicalNetwork {
    nodes: Vec<NodeId>,
    /// Sorted, each pair `(a, b)` with `a < b`.
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl PhysicalNetwork {
    /// Builds a network from raw labels and edges.
    ///
    /// Repeated nodes and repeated edges (in either orientation) collapse to
    /// one. Self-edges, edges to unknown nodes and an empty node set are
    /// rejected.
    pub fn validate<N, E, A, B>(raw_nodes: N, raw_edges: E) -> Result<Self, GraphError>
    where
        N: IntoIterator,
        N::Item: Into<NodeId>,
        E: IntoIterator<Item = (A, B)>,
        A: Into<NodeId>,
        B: Into<NodeId>,
    {
        let nodes: Vec<NodeId> = raw_nodes
            .into_iter()
            .map(Into::into)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if nodes.is_empty() {
            return Err(GraphError::EmptyNetwork);
        }
        let index = |n: &NodeId| nodes.binary_search(n).ok();

        let mut edges = BTreeSet::new();
        for (a, b) in raw_edges {
            let (a, b): (NodeId, NodeId) = (a.into(), b.into());
            if a == b {
                return Err(GraphError::SelfEdge(a));
            }
            let ia = index(&a)
                .ok_or_else(|| GraphError::UnknownEdgeEndpoint(a.clone(), b.clone(), a.clone()))?;
            let ib = index(&b)
                .ok_or_else(|| GraphError::UnknownEdgeEndpoint(a.clone(), b.clone(), b.clone()))?;
            edges.insert((ia.min(ib), ia.max(ib)));
        }

        let mut adjacency = vec![Vec::new(); nodes.len()];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(PhysicalNetwork {
            nodes,
            edges: edges.into_iter().collect(),
            adjacency,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Node labels in sorted order; position is the node index.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// Undirected edges as sorted index pairs.
    pub fn edge_indices(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId)> + '_ {
        self.edges
            .iter()
            .map(move |&(a, b)| (&self.nodes[a], &self.nodes[b]))
    }

    pub fn index_of(&self, node: &NodeId) -> Option<usize> {
        self.nodes.binary_search(node).ok()
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.index_of(node).is_some()
    }

    pub fn label(&self, index: usize) -> &NodeId {
        &self.nodes[index]
    }

    /// Neighbor indices, ascending.
    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.adjacency[index]
    }

    /// Position of edge `{a, b}` in [`edge_indices`](Self::edge_indices).
    pub fn edge_position(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    pub fn has_edge(&self, a: &NodeId, b: &NodeId) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(a), Some(b)) => self.edge_position(a, b).is_some(),
            _ => false,
        }
    }

    /// Hop distances from `source`; `None` marks unreachable nodes.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.nodes.len()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.distances_from(0).iter().all(Option::is_some)
    }

    /// Largest hop distance from `node` to any other node.
    pub fn eccentricity(&self, node: &NodeId) -> Result<usize, GraphError> {
        let idx = self
            .index_of(node)
            .ok_or_else(|| GraphError::UnknownNode(node.clone()))?;
        self.distances_from(idx)
            .into_iter()
            .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
            .ok_or(GraphError::Disconnected)
    }
}

/// The query tuple: inputs `X`, sink `Y` and hop budget `d_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySpec {
    inputs: BTreeSet<NodeId>,
    sink: NodeId,
    d_max: usize,
}

impl QuerySpec {
    /// Validates a query against `net`. When `d_max` is `None` the budget
    /// defaults to the eccentricity of the sink, which requires a connected
    /// network.
    pub fn new<I>(
        net: &PhysicalNetwork,
        inputs: I,
        sink: impl Into<NodeId>,
        d_max: Option<usize>,
    ) -> Result<Self, GraphError>
    where
        I: IntoIterator,
        I::Item: Into<NodeId>,
    {
        let inputs: BTreeSet<NodeId> = inputs.into_iter().map(Into::into).collect();
        let sink = sink.into();
        if inputs.is_empty() {
            return Err(GraphError::NoInputs);
        }
        if inputs.contains(&sink) {
            return Err(GraphError::SinkIsInput(sink));
        }
        if let Some(unknown) = inputs
            .iter()
            .chain(std::iter::once(&sink))
            .find(|n| !net.contains(n))
        {
            return Err(GraphError::UnknownNode(unknown.clone()));
        }
        let d_max = match d_max {
            Some(0) => return Err(GraphError::ZeroBudget),
            Some(d) => d,
            None => net.eccentricity(&sink)?.max(1),
        };
        Ok(QuerySpec {
            inputs,
            sink,
            d_max,
        })
    }

    pub fn inputs(&self) -> &BTreeSet<NodeId> {
        &self.inputs
    }

    pub fn sink(&self) -> &NodeId {
        &self.sink
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn is_terminal(&self, node: &NodeId) -> bool {
        node == &self.sink || self.inputs.contains(node)
    }

    /// Same inputs and sink with a different budget.
    pub fn with_budget(&self, d_max: usize) -> Result<Self, GraphError> {
        if d_max == 0 {
            return Err(GraphError::ZeroBudget);
        }
        Ok(QuerySpec {
            d_max,
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FtError {
    #[error("topology has no edges")]
    Empty,
    #[error("self-loop on `{0}`")]
    SelfLoop(NodeId),
    #[error("node `{0}` has more than one outgoing edge")]
    MultipleParents(NodeId),
    #[error("root `{0}` has an outgoing edge")]
    RootHasParent(NodeId),
    #[error("root `{0}` is not part of the topology")]
    RootMissing(NodeId),
    #[error("node `{0}` has no directed path to the root")]
    NoPathToRoot(NodeId),
    #[error("root `{found}` differs from sink `{expected}`")]
    WrongRoot { expected: NodeId, found: NodeId },
    #[error("edge ({0}, {1}) is not a physical link")]
    NotPhysical(NodeId, NodeId),
    #[error("leaf `{0}` is not an input")]
    NonInputLeaf(NodeId),
    #[error("input `{0}` is not covered")]
    MissingInput(NodeId),
    #[error("delay {delay} exceeds budget {d_max}")]
    OverBudget { delay: usize, d_max: usize },
}

/// Directed in-tree `H = (U, D)` rooted at the sink.
///
/// Edges are `(child, parent)` pairs pointing toward the root, kept sorted.
/// Delay is computed once at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionalTopology {
    root: NodeId,
    edges: Vec<(NodeId, NodeId)>,
    nodes: BTreeSet<NodeId>,
    delay: usize,
}

impl FunctionalTopology {
    /// Builds and checks an in-tree: every non-root node has exactly one
    /// parent, the root has none, and every node reaches the root.
    pub fn from_edges<I, A, B>(root: impl Into<NodeId>, edges: I) -> Result<Self, FtError>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<NodeId>,
        B: Into<NodeId>,
    {
        let root = root.into();
        let mut parent: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        for (child, par) in edges {
            let (child, par): (NodeId, NodeId) = (child.into(), par.into());
            if child == par {
                return Err(FtError::SelfLoop(child));
            }
            if child == root {
                return Err(FtError::RootHasParent(root));
            }
            if parent.insert(child.clone(), par).is_some() {
                return Err(FtError::MultipleParents(child));
            }
        }
        if parent.is_empty() {
            return Err(FtError::Empty);
        }
        let mut nodes: BTreeSet<NodeId> = parent.keys().cloned().collect();
        nodes.extend(parent.values().cloned());
        if !nodes.contains(&root) {
            return Err(FtError::RootMissing(root));
        }

        // Depth of each node; a walk longer than |U| means a cycle.
        let mut depth: BTreeMap<&NodeId, usize> = BTreeMap::new();
        depth.insert(&root, 0);
        for start in parent.keys() {
            let mut trail = Vec::new();
            let mut cur = start;
            let base = loop {
                if let Some(&d) = depth.get(cur) {
                    break d;
                }
                if trail.len() > nodes.len() {
                    return Err(FtError::NoPathToRoot(start.clone()));
                }
                trail.push(cur);
                match parent.get(cur) {
                    Some(p) => cur = p,
                    None => return Err(FtError::NoPathToRoot(cur.clone())),
                }
            };
            for (i, n) in trail.iter().rev().enumerate() {
                depth.insert(n, base + i + 1);
            }
        }
        let delay = depth.values().copied().max().unwrap_or(0);
        let mut edges: Vec<(NodeId, NodeId)> = parent.into_iter().collect();
        edges.sort();
        debug_assert_eq!(edges.len() + 1, nodes.len());
        Ok(FunctionalTopology {
            root,
            edges,
            nodes,
            delay,
        })
    }

    pub fn root(&self) -> &NodeId {
        &self.root
    }

    /// `(child, parent)` edges in canonical order.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn parent_of(&self, node: &NodeId) -> Option<&NodeId> {
        // edges are sorted by child
        self.edges
            .binary_search_by(|(c, _)| c.cmp(node))
            .ok()
            .map(|i| &self.edges[i].1)
    }

    /// Nodes with in-degree zero.
    pub fn leaves(&self) -> BTreeSet<&NodeId> {
        let parents: BTreeSet<&NodeId> = self.edges.iter().map(|(_, p)| p).collect();
        self.nodes.iter().filter(|n| !parents.contains(n)).collect()
    }

    /// Children of every node, each list in label order.
    pub fn children(&self) -> BTreeMap<&NodeId, Vec<&NodeId>> {
        let mut out: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
        for (c, p) in &self.edges {
            out.entry(p).or_default().push(c);
        }
        out
    }

    /// Longest directed path (in hops) from any node to the root.
    pub fn delay(&self) -> usize {
        self.delay
    }

    /// Energy macrostate: number of edges.
    pub fn energy(&self) -> usize {
        self.edges.len()
    }

    /// Function evaluations per unit delay, taken as `1 / delay`.
    pub fn throughput(&self) -> Ratio<u64> {
        Ratio::new(1, self.delay as u64)
    }

    pub fn canonical_key(&self) -> CanonicalFtKey {
        CanonicalFtKey(self.edges.clone())
    }

    /// Undirected projection, each pair ordered `(min, max)`.
    pub fn undirected_edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId)> + '_ {
        self.edges
            .iter()
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
    }

    /// Checks the topology against a network and query: root is the sink,
    /// edges are physical, all inputs are covered, leaves are inputs and the
    /// delay fits the budget.
    pub fn check_against(&self, net: &PhysicalNetwork, query: &QuerySpec) -> Result<(), FtError> {
        if &self.root != query.sink() {
            return Err(FtError::WrongRoot {
                expected: query.sink().clone(),
                found: self.root.clone(),
            });
        }
        if let Some((a, b)) = self.edges.iter().find(|(a, b)| !net.has_edge(a, b)) {
            return Err(FtError::NotPhysical(a.clone(), b.clone()));
        }
        if let Some(x) = query.inputs().iter().find(|x| !self.nodes.contains(*x)) {
            return Err(FtError::MissingInput(x.clone()));
        }
        if let Some(l) = self
            .leaves()
            .into_iter()
            .find(|l| !query.inputs().contains(*l))
        {
            return Err(FtError::NonInputLeaf(l.clone()));
        }
        if self.delay > query.d_max() {
            return Err(FtError::OverBudget {
                delay: self.delay,
                d_max: query.d_max(),
            });
        }
        Ok(())
    }
}

/// Sorted directed edge list identifying a topology up to labeled equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalFtKey(Vec<(NodeId, NodeId)>);

impl CanonicalFtKey {
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.0
    }
}

impl fmt::Display for CanonicalFtKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, b)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}->{b}")?;
        }
        f.write_str("}")
    }
}
