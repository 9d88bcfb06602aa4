//! Simple undirected graphs and their structural metrics.

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph on nodes `0..n`.
///
/// Neighbour lists are kept sorted, so two graphs with the same edge set
/// have identical adjacency and every metric is reproducible bit for bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list, dropping duplicates.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut builder = GraphBuilder::new(n);
        for (u, v) in edges {
            builder.try_add_edge(u, v)?;
        }
        Ok(builder.build())
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::from_edges(n, edges).expect("complete graph edges are valid")
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("path edges are valid")
    }

    /// Star with node 0 at the centre and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("star edges are valid")
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn density(&self) -> f64 {
        let n = self.node_count() as f64;
        if n < 2.0 {
            return 0.0;
        }
        2.0 * self.edge_count as f64 / (n * (n - 1.0))
    }

    pub fn average_degree(&self) -> f64 {
        if self.adj.is_empty() {
            return 0.0;
        }
        2.0 * self.edge_count as f64 / self.node_count() as f64
    }

    /// Hop distances from `source`; `None` marks unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        if self.adj.is_empty() {
            return false;
        }
        self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// Mean hop distance over all ordered pairs of distinct nodes.
    pub fn average_shortest_path(&self) -> Result<f64> {
        let n = self.node_count();
        if n < 2 {
            return Err(Error::InvalidGraph(
                "average shortest path needs at least two nodes".into(),
            ));
        }
        let mut total: u64 = 0;
        for s in 0..n {
            for (t, d) in self.bfs_distances(s).into_iter().enumerate() {
                match d {
                    Some(d) => total += d as u64,
                    None => return Err(Error::Unreachable { from: s, to: t }),
                }
            }
        }
        Ok(total as f64 / (n as f64 * (n as f64 - 1.0)))
    }

    /// Local clustering coefficient; zero for nodes of degree below two.
    pub fn local_clustering(&self, u: usize, marks: &mut [bool]) -> f64 {
        let ns = &self.adj[u];
        let k = ns.len();
        if k < 2 {
            return 0.0;
        }
        for &v in ns {
            marks[v] = true;
        }
        // every closed pair is seen once from each end
        let twice_links: usize = ns
            .iter()
            .map(|&v| self.adj[v].iter().filter(|&&w| marks[w]).count())
            .sum();
        for &v in ns {
            marks[v] = false;
        }
        twice_links as f64 / (k * (k - 1)) as f64
    }

    pub fn average_clustering(&self) -> f64 {
        let n = self.node_count();
        if n == 0 {
            return 0.0;
        }
        let mut marks = vec![false; n];
        let total: f64 = (0..n).map(|u| self.local_clustering(u, &mut marks)).sum();
        total / n as f64
    }

    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for ns in &self.adj {
            *hist.entry(ns.len()).or_insert(0) += 1;
        }
        hist
    }

    pub fn structural_summary(&self) -> Result<StructuralSummary> {
        Ok(StructuralSummary {
            average_shortest_path: self.average_shortest_path()?,
            average_degree: self.average_degree(),
            density: self.density(),
            average_clustering: self.average_clustering(),
            degree_histogram: self.degree_histogram(),
        })
    }
}

/// Incremental graph construction with O(1) amortised edge insertion.
#[derive(Debug, Clone, Default)]
pub struct GraphBuilder {
    n: usize,
    edges: HashSet<(usize, usize)>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            edges: HashSet::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Appends an isolated node and returns its index.
    pub fn add_node(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Inserts `{u, v}`; returns `false` if it was already present.
    pub fn try_add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop on node {u}")));
        }
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidGraph(format!(
                "edge ({u}, {v}) out of range for {} nodes",
                self.n
            )));
        }
        Ok(self.edges.insert((u.min(v), u.max(v))))
    }

    /// Panicking variant of [`try_add_edge`](Self::try_add_edge) for generator code.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        self.try_add_edge(u, v).expect("generator produced an invalid edge")
    }

    pub fn build(self) -> Graph {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for ns in &mut adj {
            ns.sort_unstable();
        }
        Graph {
            adj,
            edge_count: self.edges.len(),
        }
    }
}

/// Structural metrics of a connected graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralSummary {
    pub average_shortest_path: f64,
    pub average_degree: f64,
    pub density: f64,
    pub average_clustering: f64,
    pub degree_histogram: BTreeMap<usize, usize>,
}
