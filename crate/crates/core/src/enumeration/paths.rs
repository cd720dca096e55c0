use std::fmt;

use crate::graph::{NodeId, PhysicalNetwork};

/// Simple path from an input to the sink, as a node sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimplePath(Vec<NodeId>);

impl SimplePath {
    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    /// Length in edges.
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() < 2
    }

    pub fn source(&self) -> &NodeId {
        &self.0[0]
    }

    pub fn target(&self) -> &NodeId {
        &self.0[self.0.len() - 1]
    }
}

impl fmt::Display for SimplePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// All simple paths from `x` to `y` with at most `d_max` edges, in
/// lexicographic label order. Unknown endpoints or `x == y` give no paths.
pub fn enumerate_simple_paths(
    net: &PhysicalNetwork,
    x: &NodeId,
    y: &NodeId,
    d_max: usize,
) -> Vec<SimplePath> {
    match (net.index_of(x), net.index_of(y)) {
        (Some(xi), Some(yi)) => simple_paths_by_index(net, xi, yi, d_max)
            .into_iter()
            .map(|p| SimplePath(p.into_iter().map(|i| net.label(i).clone()).collect()))
            .collect(),
        _ => Vec::new(),
    }
}

/// Index-level DFS with an on-path set and depth cutoff. Neighbors are
/// visited in ascending index (= label) order, so the output is sorted.
pub(crate) fn simple_paths_by_index(
    net: &PhysicalNetwork,
    from: usize,
    to: usize,
    d_max: usize,
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if from == to || d_max == 0 {
        return out;
    }
    // Prune branches that cannot reach `to` within the remaining budget.
    let dist_to: Vec<usize> = net
        .distances_from(to)
        .into_iter()
        .map(|d| d.unwrap_or(usize::MAX))
        .collect();
    if dist_to[from] > d_max {
        return out;
    }
    let mut on_path = vec![false; net.node_count()];
    let mut path = vec![from];
    on_path[from] = true;
    // Stack of neighbor cursors, one per node on the path.
    let mut cursors = vec![0usize];
    while let Some(cursor) = cursors.last_mut() {
        let u = *path.last().expect("path tracks cursors");
        let neighbors = net.neighbors(u);
        if *cursor >= neighbors.len() {
            cursors.pop();
            let done = path.pop().expect("path tracks cursors");
            on_path[done] = false;
            continue;
        }
        let v = neighbors[*cursor];
        *cursor += 1;
        let used = path.len() - 1;
        if on_path[v] || used + 1 + dist_to[v].min(d_max + 1) > d_max {
            continue;
        }
        if v == to {
            let mut found = path.clone();
            found.push(v);
            out.push(found);
            continue;
        }
        on_path[v] = true;
        path.push(v);
        cursors.push(0);
    }
    out
}
