//! Spanning tree enumeration by include/exclude backtracking.
//!
//! Edges are decided in order. An edge may be included when it joins two
//! components of the partial forest, and excluded when it is not a bridge of
//! the graph formed by the edges not yet excluded. Every leaf of the search
//! is a distinct spanning tree and every spanning tree is reached.

use std::collections::VecDeque;

use crate::subgraph::Subgraph;

/// True iff a connected subgraph has exactly `|V| - 1` edges.
pub fn is_tree(sub: &Subgraph) -> bool {
    sub.node_count() > 0 && sub.edge_count() + 1 == sub.node_count()
}

/// Every spanning tree of `sub`, each returned over the same node set.
/// A disconnected or empty subgraph has none.
pub fn all_spanning_trees(sub: &Subgraph) -> Vec<Subgraph> {
    let mut out = Vec::new();
    for_each_spanning_tree(sub, |edges| out.push(sub.with_edges(edges.to_vec())));
    out
}

/// Number of spanning trees found by the backtracking search.
pub fn count_spanning_trees(sub: &Subgraph) -> u64 {
    let mut n = 0u64;
    for_each_spanning_tree(sub, |_| n += 1);
    n
}

/// Calls `visit` with the local edge list of every spanning tree.
pub fn for_each_spanning_tree<F>(sub: &Subgraph, mut visit: F)
where
    F: FnMut(&[(usize, usize)]),
{
    let n = sub.node_count();
    if n == 0 || !sub.is_connected() {
        return;
    }
    if n == 1 {
        visit(&[]);
        return;
    }
    let edges = sub.edges();
    let mut incident = vec![Vec::new(); n];
    for (i, &(a, b)) in edges.iter().enumerate() {
        incident[a].push(i);
        incident[b].push(i);
    }
    let mut search = Search {
        n,
        edges,
        incident,
        excluded: vec![false; edges.len()],
        chosen: Vec::with_capacity(n - 1),
        forest: RollbackDsu::new(n),
        scratch: vec![false; n],
    };
    search.run(0, &mut visit);
}

struct Search<'a> {
    n: usize,
    edges: &'a [(usize, usize)],
    incident: Vec<Vec<usize>>,
    excluded: Vec<bool>,
    chosen: Vec<(usize, usize)>,
    forest: RollbackDsu,
    scratch: Vec<bool>,
}

impl Search<'_> {
    fn run<F: FnMut(&[(usize, usize)])>(&mut self, next: usize, visit: &mut F) {
        if self.chosen.len() == self.n - 1 {
            visit(&self.chosen);
            return;
        }
        if next == self.edges.len() {
            return;
        }
        let (a, b) = self.edges[next];
        if self.forest.union(a, b) {
            self.chosen.push((a, b));
            self.run(next + 1, visit);
            self.chosen.pop();
            self.forest.rollback();
        }
        if !self.is_bridge(next) {
            self.excluded[next] = true;
            self.run(next + 1, visit);
            self.excluded[next] = false;
        }
    }

    /// Whether removing `edge` disconnects its endpoints in the graph of
    /// non-excluded edges.
    fn is_bridge(&mut self, edge: usize) -> bool {
        let (a, b) = self.edges[edge];
        self.scratch.iter_mut().for_each(|s| *s = false);
        self.scratch[a] = true;
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.incident[u] {
                if e == edge || self.excluded[e] {
                    continue;
                }
                let (p, q) = self.edges[e];
                let v = if p == u { q } else { p };
                if v == b {
                    return false;
                }
                if !self.scratch[v] {
                    self.scratch[v] = true;
                    queue.push_back(v);
                }
            }
        }
        true
    }
}

/// Union-find with union by size and an undo log (no path compression).
struct RollbackDsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    log: Vec<usize>,
}

impl RollbackDsu {
    fn new(n: usize) -> Self {
        RollbackDsu {
            parent: (0..n).collect(),
            size: vec![1; n],
            log: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Returns false (and logs nothing) when already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.log.push(rb);
        true
    }

    fn rollback(&mut self) {
        if let Some(rb) = self.log.pop() {
            let ra = self.parent[rb];
            self.size[ra] -= self.size[rb];
            self.parent[rb] = rb;
        }
    }
}
