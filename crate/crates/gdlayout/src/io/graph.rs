use std::collections::HashMap;

use gdlayout_core::Graph;
use serde::{Deserialize, Serialize};

use super::IoError;

/// The JSON shape of a graph file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal_lengths: Option<Vec<(String, String, f64)>>,
}

/// A graph together with the string ids of its nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedGraph {
    pub ids: Vec<String>,
    pub graph: Graph,
}

impl From<Graph> for NamedGraph {
    /// Names nodes by their index.
    fn from(graph: Graph) -> Self {
        NamedGraph { ids: (0..graph.node_count()).map(|i| i.to_string()).collect(), graph }
    }
}

impl TryFrom<GraphFile> for NamedGraph {
    type Error = IoError;

    fn try_from(file: GraphFile) -> Result<Self, IoError> {
        let mut index = HashMap::with_capacity(file.nodes.len());
        for (i, id) in file.nodes.iter().enumerate() {
            if index.insert(id.as_str(), i).is_some() {
                return Err(IoError::field(format!("nodes[{i}]"), format!("duplicate id {id:?}")));
            }
        }
        let lookup = |field: String, id: &str| {
            index.get(id).copied().ok_or_else(|| IoError::field(field, format!("unknown id {id:?}")))
        };
        let mut edges = Vec::with_capacity(file.edges.len());
        for (e, (a, b)) in file.edges.iter().enumerate() {
            edges.push((lookup(format!("edges[{e}]"), a)?, lookup(format!("edges[{e}]"), b)?));
        }
        let mut graph = Graph::new(file.nodes.len(), edges).map_err(|err| IoError::field("edges", err.to_string()))?;
        if let Some(lengths) = &file.ideal_lengths {
            let mut per_edge: Vec<Option<f64>> = vec![None; graph.edge_count()];
            let slot: HashMap<(usize, usize), usize> =
                graph.edges().iter().enumerate().map(|(e, &pair)| (pair, e)).collect();
            for (k, (a, b, l)) in lengths.iter().enumerate() {
                let field = format!("ideal_lengths[{k}]");
                let (i, j) = (lookup(field.clone(), a)?, lookup(field.clone(), b)?);
                let e = *slot
                    .get(&(i.min(j), i.max(j)))
                    .ok_or_else(|| IoError::field(field.clone(), format!("no edge between {a:?} and {b:?}")))?;
                if !(l.is_finite() && *l > 0.0) {
                    return Err(IoError::field(field, format!("length {l} is not a positive number")));
                }
                if per_edge[e].replace(*l).is_some() {
                    return Err(IoError::field(field, "edge listed twice"));
                }
            }
            let missing = per_edge.iter().position(Option::is_none);
            if let Some(e) = missing {
                let (i, j) = graph.edges()[e];
                return Err(IoError::field(
                    "ideal_lengths",
                    format!("no length for edge ({:?}, {:?})", file.nodes[i], file.nodes[j]),
                ));
            }
            graph = graph.with_ideal_lengths(per_edge.into_iter().flatten().collect())?;
        }
        Ok(NamedGraph { ids: file.nodes, graph })
    }
}

impl From<&NamedGraph> for GraphFile {
    fn from(g: &NamedGraph) -> Self {
        let name = |i: usize| g.ids[i].clone();
        GraphFile {
            nodes: g.ids.clone(),
            edges: g.graph.edges().iter().map(|&(i, j)| (name(i), name(j))).collect(),
            ideal_lengths: g
                .graph
                .ideal_lengths()
                .map(|l| g.graph.edges().iter().zip(l).map(|(&(i, j), &len)| (name(i), name(j), len)).collect()),
        }
    }
}

pub fn read_graph(bytes: &[u8]) -> Result<NamedGraph, IoError> {
    let file: GraphFile = serde_json::from_slice(bytes)?;
    file.try_into()
}

pub fn write_graph(g: &NamedGraph) -> Vec<u8> {
    let mut out = serde_json::to_vec(&GraphFile::from(g)).expect("graph files always serialize");
    out.push(b'\n');
    out
}
