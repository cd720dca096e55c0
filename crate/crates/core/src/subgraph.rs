use std::collections::{BTreeSet, VecDeque};

use crate::graph::{NodeId, PhysicalNetwork};

/// Undirected labeled subgraph. Edges are local index pairs `(a, b)` with
/// `a < b` into the sorted node list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subgraph {
    nodes: Vec<NodeId>,
    edges: Vec<(usize, usize)>,
}

impl Subgraph {
    /// Builds a subgraph from labeled edges plus any extra isolated nodes.
    pub fn from_labeled<N, E, A, B>(nodes: N, edges: E) -> Self
    where
        N: IntoIterator,
        N::Item: Into<NodeId>,
        E: IntoIterator<Item = (A, B)>,
        A: Into<NodeId>,
        B: Into<NodeId>,
    {
        let pairs: Vec<(NodeId, NodeId)> = edges
            .into_iter()
            .map(|(a, b)| (a.into(), b.into()))
            .collect();
        let mut set: BTreeSet<NodeId> = nodes.into_iter().map(Into::into).collect();
        for (a, b) in &pairs {
            set.insert(a.clone());
            set.insert(b.clone());
        }
        let nodes: Vec<NodeId> = set.into_iter().collect();
        let idx = |n: &NodeId| nodes.binary_search(n).expect("node collected above");
        let edges: BTreeSet<(usize, usize)> = pairs
            .iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| {
                let (i, j) = (idx(a), idx(b));
                (i.min(j), i.max(j))
            })
            .collect();
        Subgraph {
            nodes,
            edges: edges.into_iter().collect(),
        }
    }

    /// Subgraph of `net` spanned by network node indices and network edge
    /// positions. Node indices must cover every edge endpoint.
    pub(crate) fn from_network(
        net: &PhysicalNetwork,
        node_indices: &[usize],
        edge_positions: impl IntoIterator<Item = usize>,
    ) -> Self {
        debug_assert!(node_indices.windows(2).all(|w| w[0] < w[1]));
        let local = |g: usize| {
            node_indices
                .binary_search(&g)
                .expect("edge endpoint inside node set")
        };
        let mut edges: Vec<(usize, usize)> = edge_positions
            .into_iter()
            .map(|e| {
                let (a, b) = net.edge_indices()[e];
                (local(a), local(b))
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Subgraph {
            nodes: node_indices.iter().map(|&i| net.label(i).clone()).collect(),
            edges,
        }
    }

    /// Same node set, different edge list (local indices).
    pub(crate) fn with_edges(&self, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        Subgraph {
            nodes: self.nodes.clone(),
            edges,
        }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn index_of(&self, node: &NodeId) -> Option<usize> {
        self.nodes.binary_search(node).ok()
    }

    pub fn labeled_edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId)> + '_ {
        self.edges
            .iter()
            .map(move |&(a, b)| (&self.nodes[a], &self.nodes[b]))
    }

    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.nodes.len()
    }
}
