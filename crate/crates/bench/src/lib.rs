//! Network fixtures shared by the benchmarks.

use ftenum::{PhysicalNetwork, Subgraph};

/// `rows x cols` grid with nodes labelled `r{row}c{col}`.
pub fn grid(rows: usize, cols: usize) -> PhysicalNetwork {
    let label = |r: usize, c: usize| format!("r{r}c{c}");
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            nodes.push(label(r, c));
            if c + 1 < cols {
                edges.push((label(r, c), label(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((label(r, c), label(r + 1, c)));
            }
        }
    }
    PhysicalNetwork::validate(nodes, edges).expect("grid is valid")
}

/// Complete graph on `n` nodes.
pub fn clique(n: usize) -> Subgraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((format!("v{i}"), format!("v{j}")));
        }
    }
    Subgraph::from_labeled((0..n).map(|i| format!("v{i}")), edges)
}

pub fn diamond() -> PhysicalNetwork {
    PhysicalNetwork::validate(
        ["x", "a", "b", "y"],
        [("x", "a"), ("x", "b"), ("a", "y"), ("b", "y")],
    )
    .expect("diamond is valid")
}
