//! Network ingestion and topology export.
//!
//! Networks are read either as JSON, `{"nodes": [...], "edges": [[a, b], ...]}`
//! with string or integer labels, or as a plain edge list with one `a b`
//! pair per line (`#` starts a comment, a single label declares an isolated
//! node). Topologies export as DOT digraphs or as
//! `{"root": y, "edges": [[u, v], ...]}`.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumeration::{FtCatalog, Provenance};
use crate::graph::{FtError, FunctionalTopology, GraphError, NodeId, PhysicalNetwork, QuerySpec};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid topology: {0}")]
    Topology(#[from] FtError),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Label {
    Text(String),
    Int(i64),
}

impl From<Label> for NodeId {
    fn from(l: Label) -> Self {
        match l {
            Label::Text(s) => NodeId::new(s),
            Label::Int(i) => NodeId::new(i.to_string()),
        }
    }
}

#[derive(Deserialize)]
struct NetworkFile {
    nodes: Vec<Label>,
    edges: Vec<(Label, Label)>,
}

pub fn parse_network_json(text: &str) -> Result<PhysicalNetwork, IoError> {
    let file: NetworkFile = serde_json::from_str(text)?;
    Ok(PhysicalNetwork::validate(
        file.nodes.into_iter().map(NodeId::from),
        file.edges
            .into_iter()
            .map(|(a, b)| (NodeId::from(a), NodeId::from(b))),
    )?)
}

pub fn parse_edge_list(text: &str) -> Result<PhysicalNetwork, IoError> {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [] => {}
            [a] => nodes.push(NodeId::from(*a)),
            [a, b] => {
                nodes.push(NodeId::from(*a));
                nodes.push(NodeId::from(*b));
                edges.push((NodeId::from(*a), NodeId::from(*b)));
            }
            _ => {
                return Err(IoError::Parse {
                    line: i + 1,
                    message: format!("expected `a b`, found {} fields", tokens.len()),
                })
            }
        }
    }
    Ok(PhysicalNetwork::validate(nodes, edges)?)
}

/// Parses JSON when the first non-blank character is `{`, else an edge list.
pub fn parse_network(text: &str) -> Result<PhysicalNetwork, IoError> {
    if text.trim_start().starts_with('{') {
        parse_network_json(text)
    } else {
        parse_edge_list(text)
    }
}

pub fn load_network(path: impl AsRef<Path>) -> Result<PhysicalNetwork, IoError> {
    parse_network(&std::fs::read_to_string(path)?)
}

/// Serialized form of one topology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FtRecord {
    pub root: NodeId,
    pub edges: Vec<(NodeId, NodeId)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delay: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<usize>,
}

impl FtRecord {
    pub fn bare(ft: &FunctionalTopology) -> Self {
        FtRecord {
            root: ft.root().clone(),
            edges: ft.edges().to_vec(),
            delay: None,
            energy: None,
        }
    }

    pub fn with_macrostates(ft: &FunctionalTopology) -> Self {
        FtRecord {
            delay: Some(ft.delay()),
            energy: Some(ft.energy()),
            ..Self::bare(ft)
        }
    }

    pub fn into_topology(self) -> Result<FunctionalTopology, FtError> {
        FunctionalTopology::from_edges(self.root, self.edges)
    }
}

pub fn ft_to_json(ft: &FunctionalTopology) -> String {
    serde_json::to_string(&FtRecord::bare(ft)).expect("labels serialize")
}

fn dot_id(n: &NodeId) -> String {
    format!(
        "\"{}\"",
        n.as_str().replace('\\', "\\\\").replace('"', "\\\"")
    )
}

/// DOT digraph with edges pointing toward the root.
pub fn ft_to_dot(ft: &FunctionalTopology, name: &str) -> String {
    let mut out = format!("digraph {} {{\n", dot_id(&NodeId::from(name)));
    let _ = writeln!(out, "  // delay={} energy={}", ft.delay(), ft.energy());
    let _ = writeln!(out, "  {} [shape=doublecircle];", dot_id(ft.root()));
    for (a, b) in ft.edges() {
        let _ = writeln!(out, "  {} -> {};", dot_id(a), dot_id(b));
    }
    out.push_str("}\n");
    out
}

/// All catalog entries as consecutive DOT digraphs `ft0`, `ft1`, ...
pub fn catalog_to_dot(catalog: &FtCatalog) -> String {
    catalog
        .iter()
        .enumerate()
        .map(|(i, ft)| ft_to_dot(ft, &format!("ft{i}")))
        .collect()
}

#[derive(Serialize)]
struct CatalogHeader<'a> {
    query: &'a QuerySpec,
    provenance: Provenance,
    count: usize,
}

#[derive(Deserialize)]
struct CatalogFile {
    query: QuerySpec,
    provenance: Provenance,
    fts: Vec<FtRecord>,
}

/// Writes `{"query": .., "provenance": .., "count": n, "fts": [..]}` one
/// topology per line, without building the whole document in memory.
pub fn write_catalog_json<W: Write>(mut out: W, catalog: &FtCatalog) -> Result<(), IoError> {
    let header = serde_json::to_string(&CatalogHeader {
        query: catalog.query(),
        provenance: catalog.provenance(),
        count: catalog.len(),
    })?;
    // reopen the header object to append the list
    out.write_all(&header.as_bytes()[..header.len() - 1])?;
    out.write_all(b",\"fts\":[")?;
    for (i, ft) in catalog.iter().enumerate() {
        out.write_all(if i == 0 { b"\n" } else { b",\n" })?;
        serde_json::to_writer(&mut out, &FtRecord::with_macrostates(ft))?;
    }
    out.write_all(b"\n]}\n")?;
    Ok(())
}

/// Reads a catalog written by [`write_catalog_json`]. Entries are validated
/// as in-trees but not against any network.
pub fn read_catalog_json(text: &str) -> Result<FtCatalog, IoError> {
    let file: CatalogFile = serde_json::from_str(text)?;
    let fts = file
        .fts
        .into_iter()
        .map(FtRecord::into_topology)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FtCatalog::from_topologies(file.query, file.provenance, fts))
}
