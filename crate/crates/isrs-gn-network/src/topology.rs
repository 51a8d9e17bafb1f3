//! Nodes, span-annotated edges, and path validation.

use isrs_gn_core::FiberSpec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("edge {edge} endpoint {node:?} is not a declared node")]
    UnknownNode { edge: usize, node: String },
    #[error("edge {0} has no spans")]
    EmptyEdge(usize),
    #[error("edge {edge} span {span}: {source}")]
    BadSpan { edge: usize, span: usize, source: isrs_gn_core::units::UnitsError },
    #[error("path references edge {0} which does not exist")]
    BadEdgeIndex(usize),
    #[error("path is empty")]
    EmptyPath,
    #[error("path breaks between edge {prev} and edge {next}: no shared node")]
    DisconnectedPath { prev: usize, next: usize },
}

/// One link: an ordered chain of amplified spans between two nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub spans: Vec<FiberSpec>,
}

impl Edge {
    /// Total length (m).
    pub fn length_m(&self) -> f64 {
        self.spans.iter().map(|s| s.length_m).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Topology {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    /// When true, edges carry traffic only from `from` to `to`.
    pub directed: bool,
}

impl Topology {
    pub fn validate(&self) -> Result<(), TopologyError> {
        for (i, e) in self.edges.iter().enumerate() {
            for node in [&e.from, &e.to] {
                if !self.nodes.contains(node) {
                    return Err(TopologyError::UnknownNode { edge: i, node: node.clone() });
                }
            }
            if e.spans.is_empty() {
                return Err(TopologyError::EmptyEdge(i));
            }
            for (j, s) in e.spans.iter().enumerate() {
                s.validate().map_err(|source| TopologyError::BadSpan {
                    edge: i,
                    span: j,
                    source,
                })?;
            }
        }
        Ok(())
    }

    /// Check that `path` is a connected chain of edge indices and return the
    /// visited node sequence. Undirected edges may be traversed either way.
    pub fn trace_path(&self, path: &[usize]) -> Result<Vec<String>, TopologyError> {
        self.validate()?;
        if path.is_empty() {
            return Err(TopologyError::EmptyPath);
        }
        for &e in path {
            if e >= self.edges.len() {
                return Err(TopologyError::BadEdgeIndex(e));
            }
        }
        let first = &self.edges[path[0]];
        // Orient the first edge so its exit meets the second edge if any.
        let mut nodes = if self.directed {
            vec![first.from.clone(), first.to.clone()]
        } else if path.len() > 1 {
            let second = &self.edges[path[1]];
            let touches = |n: &String| *n == second.from || *n == second.to;
            if touches(&first.to) {
                vec![first.from.clone(), first.to.clone()]
            } else {
                vec![first.to.clone(), first.from.clone()]
            }
        } else {
            vec![first.from.clone(), first.to.clone()]
        };
        for w in path.windows(2) {
            let here = nodes.last().expect("nonempty").clone();
            let next = &self.edges[w[1]];
            let exit = if next.from == here {
                next.to.clone()
            } else if !self.directed && next.to == here {
                next.from.clone()
            } else {
                return Err(TopologyError::DisconnectedPath { prev: w[0], next: w[1] });
            };
            nodes.push(exit);
        }
        Ok(nodes)
    }
}
