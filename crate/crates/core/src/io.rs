//! Graph file formats: JSON documents, plain edge lists and Graphviz DOT.
//!
//! Edge list:
//!
//! ```text
//! # nodes 4
//! 0 1
//! 1 2
//! 2 3
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::MultiGroupGraph;
use crate::graph::Graph;

/// JSON graph document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub groups: Vec<Vec<usize>>,
    pub liaisons: Vec<usize>,
    pub modality: String,
    pub seed: u64,
}

impl GraphDocument {
    pub fn from_network(net: &MultiGroupGraph) -> Self {
        Self {
            n: net.graph.node_count(),
            edges: net.graph.edges().map(|(u, v)| [u, v]).collect(),
            groups: net.groups.clone(),
            liaisons: net.liaison_nodes.clone(),
            modality: net.modality.to_string(),
            seed: net.seed,
        }
    }

    pub fn to_graph(&self) -> Result<Graph> {
        Graph::from_edges(self.n, self.edges.iter().map(|&[u, v]| (u, v)))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("# nodes {}\n", g.node_count());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn read_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate();
    let n = loop {
        let (_, line) = lines
            .next()
            .ok_or_else(|| Error::Parse("missing `# nodes <n>` header".into()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let count = line
            .strip_prefix('#')
            .map(str::trim)
            .and_then(|rest| rest.strip_prefix("nodes"))
            .ok_or_else(|| Error::Parse(format!("expected `# nodes <n>`, found `{line}`")))?;
        break count
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad node count: {e}")))?;
    };
    let mut edges = Vec::new();
    for (lineno, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace().map(str::parse::<usize>);
        match (parts.next(), parts.next(), parts.next()) {
            (Some(Ok(u)), Some(Ok(v)), None) => edges.push((u, v)),
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: expected `<u> <v>`, found `{line}`",
                    lineno + 1
                )))
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// DOT rendering with one cluster per group; liaisons are drawn as boxes.
///
/// A co-member is placed in the cluster of its home block only.
pub fn write_dot(net: &MultiGroupGraph) -> String {
    let mut out = String::from("graph multigroup {\n  node [shape=circle, width=0.2, label=\"\"];\n");
    for (g, members) in net.groups.iter().enumerate() {
        writeln!(out, "  subgraph cluster_{g} {{\n    label=\"group {g}\";").unwrap();
        for &v in members.iter().filter(|&&v| net.home[v] == Some(g)) {
            writeln!(out, "    {v};").unwrap();
        }
        out.push_str("  }\n");
    }
    for &l in &net.liaison_nodes {
        writeln!(out, "  {l} [shape=box];").unwrap();
    }
    for (u, v) in net.graph.edges() {
        writeln!(out, "  {u} -- {v};").unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate, Modality, ModalityParams};

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::star(4);
        let text = write_edge_list(&g);
        assert_eq!(text, "# nodes 5\n0 1\n0 2\n0 3\n0 4\n");
        assert_eq!(read_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn edge_list_errors() {
        assert!(read_edge_list("").is_err());
        assert!(read_edge_list("0 1\n").is_err());
        assert!(read_edge_list("# nodes 2\n0 1 2\n").is_err());
        assert!(read_edge_list("# nodes 2\n0 5\n").is_err());
    }

    #[test]
    fn document_round_trip() {
        let net = generate(Modality::Liaison, 40, &ModalityParams::default(), 3).unwrap();
        let doc = GraphDocument::from_network(&net);
        let back = GraphDocument::from_json(&doc.to_json().unwrap()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_graph().unwrap(), net.graph);
        assert_eq!(back.liaisons, net.liaison_nodes);
        assert_eq!(back.modality, "liaison");
    }

    #[test]
    fn dot_has_clusters() {
        let net = generate(Modality::Bridge, 30, &ModalityParams::default(), 1).unwrap();
        let dot = write_dot(&net);
        assert!(dot.starts_with("graph multigroup {"));
        assert_eq!(dot.matches("subgraph cluster_").count(), net.group_count());
        assert_eq!(dot.matches(" -- ").count(), net.graph.edge_count());
    }
}
