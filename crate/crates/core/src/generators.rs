//! Generators for the four multi-group connectivity modalities.
//!
//! Every modality starts from the same scaffold: heavy-tailed group sizes,
//! one connected `G(s, 1 - ε)` block per group laid out on contiguous node
//! ranges, and (for bridge, edge bundle and co-membership) a uniform random
//! spanning tree over the groups. Each tree edge then receives its
//! inter-group wiring:
//!
//! | modality      | cross edges per tree edge `{i, j}`                          |
//! |---------------|-------------------------------------------------------------|
//! | bridge        | exactly one, endpoints uniform in `Ω_i × Ω_j`               |
//! | edge bundle   | `min(s_i s_j, max(2, round(ρ s_i s_j)))` distinct slots      |
//! | co-membership | one initiator joined to ≥ 3 members of the other group      |
//!
//! Cross edges of a tree edge are drawn from a dedicated sub-stream, so the
//! bridge and edge-bundle wirings of a shared scaffold are nested: the bridge
//! edge is always the first slot of the bundle.
//!
//! The liaison modality ignores the tree and instead stacks a hierarchy of
//! extra nodes, each adopting two or three units of the layer below.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};
use crate::partition::{
    fixed_sum_realizations, power_law_pmf, sample_group_sizes, DiscretePmf, PowerLawSpec,
    SizeSequence,
};
use crate::rng::{derive_seed, stream, Stream};

const ER_MAX_ATTEMPTS: usize = 1000;
const LIAISON_MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Bridge,
    EdgeBundle,
    Comembership,
    Liaison,
}

impl Modality {
    pub const ALL: [Modality; 4] = [
        Modality::Bridge,
        Modality::EdgeBundle,
        Modality::Comembership,
        Modality::Liaison,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Bridge => "bridge",
            Modality::EdgeBundle => "edge_bundle",
            Modality::Comembership => "comembership",
            Modality::Liaison => "liaison",
        }
    }

    /// Stable label used when deriving random streams.
    pub fn index(self) -> u64 {
        match self {
            Modality::Bridge => 0,
            Modality::EdgeBundle => 1,
            Modality::Comembership => 2,
            Modality::Liaison => 3,
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "bridge" => Ok(Modality::Bridge),
            "edge_bundle" | "bundle" => Ok(Modality::EdgeBundle),
            "comembership" | "co_membership" => Ok(Modality::Comembership),
            "liaison" => Ok(Modality::Liaison),
            _ => Err(Error::UnknownModality(s.to_string())),
        }
    }
}

/// Parameters shared by all modality generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalityParams {
    /// Within-group non-edge probability; blocks are `G(s, 1 - epsilon)`.
    pub epsilon: f64,
    /// Edge-bundle scale ρ: a tree edge gets about `ρ s_i s_j` cross edges.
    pub bundle_scale: f64,
    /// Probability that a co-member links to each member of the target group.
    pub comember_inclusion: f64,
    /// Liaison branching-factor law.
    pub branching_pmf: DiscretePmf,
}

impl Default for ModalityParams {
    fn default() -> Self {
        Self::with_epsilon(0.1)
    }
}

impl ModalityParams {
    /// Defaults with the given ε; co-member inclusion follows as `1 - ε`.
    pub fn with_epsilon(epsilon: f64) -> Self {
        let branching = PowerLawSpec {
            exponent: 3.0,
            support_min: 2,
            support_max: 3,
        };
        Self {
            epsilon,
            bundle_scale: 0.05,
            comember_inclusion: 1.0 - epsilon,
            branching_pmf: power_law_pmf(&branching).expect("static branching law is valid"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |x: f64| x > 0.0 && x < 1.0;
        if !open_unit(self.epsilon) {
            return Err(Error::InvalidParameter(format!(
                "epsilon {} must lie in (0, 1)",
                self.epsilon
            )));
        }
        if !open_unit(self.comember_inclusion) {
            return Err(Error::InvalidParameter(format!(
                "comember_inclusion {} must lie in (0, 1)",
                self.comember_inclusion
            )));
        }
        if !(self.bundle_scale.is_finite() && self.bundle_scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bundle_scale {} must be positive",
                self.bundle_scale
            )));
        }
        self.branching_pmf.validate()?;
        if self.branching_pmf.support_min < 2 {
            return Err(Error::InvalidParameter(
                "liaison branching factors must be at least 2".into(),
            ));
        }
        Ok(())
    }

    /// Number of cross edges bundled onto a tree edge between groups of the given sizes.
    pub fn bundle_size(&self, s_i: usize, s_j: usize) -> usize {
        let slots = s_i * s_j;
        let scaled = (self.bundle_scale * slots as f64).round() as usize;
        slots.min(scaled.max(2))
    }
}

/// Spanning tree over group indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTree {
    pub group_count: usize,
    /// Edges `(i, j)` with `i < j`.
    pub edges: Vec<(usize, usize)>,
}

/// A generated network together with its group structure.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiGroupGraph {
    pub graph: Graph,
    /// Members of each group. Co-members are appended after the block members.
    pub groups: Vec<Vec<usize>>,
    /// Sorted group indices per node; empty for liaisons.
    pub membership: Vec<Vec<usize>>,
    /// Block each node was generated in; `None` for liaisons.
    pub home: Vec<Option<usize>>,
    pub group_sizes: SizeSequence,
    /// Group tree; `None` for the liaison modality.
    pub tree: Option<GroupTree>,
    pub liaison_nodes: Vec<usize>,
    pub modality: Modality,
    pub seed: u64,
}

impl MultiGroupGraph {
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Edges whose endpoints were generated in different blocks (liaison edges excluded).
    pub fn cross_edges(&self) -> Vec<(usize, usize)> {
        self.graph
            .edges()
            .filter(|&(u, v)| match (self.home[u], self.home[v]) {
                (Some(a), Some(b)) => a != b,
                _ => false,
            })
            .collect()
    }
}

/// Connected `G(size, 1 - epsilon)` by rejection sampling.
pub fn er_block<R: Rng + ?Sized>(size: usize, epsilon: f64, rng: &mut R) -> Result<Graph> {
    let p = 1.0 - epsilon;
    for _ in 0..ER_MAX_ATTEMPTS {
        let mut edges = Vec::with_capacity(size * size.saturating_sub(1) / 2);
        for u in 0..size {
            for v in u + 1..size {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(size, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Generation(format!(
        "no connected G({size}, {p}) block after {ER_MAX_ATTEMPTS} attempts"
    )))
}

/// Uniform labelled spanning tree on `k` vertices via a random Prüfer word.
pub fn uniform_spanning_tree<R: Rng + ?Sized>(k: usize, rng: &mut R) -> GroupTree {
    if k < 2 {
        return GroupTree {
            group_count: k,
            edges: Vec::new(),
        };
    }
    let word: Vec<usize> = (0..k - 2).map(|_| rng.random_range(0..k)).collect();
    GroupTree {
        group_count: k,
        edges: prufer_to_edges(&word, k),
    }
}

/// Decodes a Prüfer word in linear time.
pub fn prufer_to_edges(word: &[usize], k: usize) -> Vec<(usize, usize)> {
    debug_assert_eq!(word.len() + 2, k);
    let mut degree = vec![1usize; k];
    for &x in word {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(k - 1);
    let mut ptr = (0..k).find(|&i| degree[i] == 1).unwrap();
    let mut leaf = ptr;
    for &x in word {
        edges.push((leaf.min(x), leaf.max(x)));
        degree[x] -= 1;
        if x < ptr && degree[x] == 1 {
            leaf = x;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    edges.push((leaf, k - 1));
    edges
}

/// Groups, blocks and group tree shared by the tree-based modalities.
#[derive(Debug, Clone)]
pub struct Scaffold {
    pub sizes: SizeSequence,
    pub groups: Vec<Vec<usize>>,
    pub builder: GraphBuilder,
    pub tree: GroupTree,
    /// One sub-stream seed per tree edge, aligned with `tree.edges`.
    pub link_seeds: Vec<u64>,
}

impl Scaffold {
    pub fn sample<R: Rng + ?Sized>(n: usize, params: &ModalityParams, rng: &mut R) -> Result<Self> {
        params.validate()?;
        let sizes = sample_group_sizes(n, &PowerLawSpec::group_sizes(n), rng)?;
        let mut builder = GraphBuilder::new(n);
        let mut groups = Vec::with_capacity(sizes.len());
        let mut offset = 0;
        for &s in &sizes.sizes {
            let block = er_block(s, params.epsilon, rng)?;
            for (u, v) in block.edges() {
                builder.add_edge(offset + u, offset + v);
            }
            groups.push((offset..offset + s).collect());
            offset += s;
        }
        let tree = uniform_spanning_tree(sizes.len(), rng);
        let link_seeds = tree.edges.iter().map(|_| rng.random()).collect();
        Ok(Self {
            sizes,
            groups,
            builder,
            tree,
            link_seeds,
        })
    }

    fn links(&self) -> impl Iterator<Item = ((usize, usize), Stream)> + '_ {
        self.tree
            .edges
            .iter()
            .zip(&self.link_seeds)
            .map(|(&e, &seed)| (e, stream(seed)))
    }

    /// Bridge wiring: one uniformly placed edge per tree edge.
    pub fn wire_bridge(mut self, seed: u64) -> MultiGroupGraph {
        let links: Vec<_> = self.links().collect();
        for ((i, j), mut rng) in links {
            let (u, v) = draw_slot(&self.groups[i], &self.groups[j], &mut rng);
            self.builder.add_edge(u, v);
        }
        self.finish(Modality::Bridge, seed, Vec::new())
    }

    /// Edge-bundle wiring: distinct uniformly drawn slots per tree edge.
    pub fn wire_edge_bundle(mut self, params: &ModalityParams, seed: u64) -> MultiGroupGraph {
        let links: Vec<_> = self.links().collect();
        for ((i, j), mut rng) in links {
            let (gi, gj) = (&self.groups[i], &self.groups[j]);
            let alpha = params.bundle_size(gi.len(), gj.len());
            let mut chosen = HashSet::with_capacity(alpha);
            while chosen.len() < alpha {
                let (u, v) = draw_slot(gi, gj, &mut rng);
                if chosen.insert((u, v)) {
                    self.builder.add_edge(u, v);
                }
            }
        }
        self.finish(Modality::EdgeBundle, seed, Vec::new())
    }

    /// Co-membership wiring: per tree edge one initiator joins the other group.
    pub fn wire_comembership(mut self, params: &ModalityParams, seed: u64) -> MultiGroupGraph {
        let links: Vec<_> = self.links().collect();
        let mut extra: Vec<(usize, usize)> = Vec::new();
        for ((i, j), mut rng) in links {
            let (source, target) = if rng.random_bool(0.5) { (i, j) } else { (j, i) };
            let s_source = self.sizes.sizes[source];
            let s_target = self.sizes.sizes[target];
            let member = self.groups[source][rng.random_range(0..s_source)];
            let block = &self.groups[target][..s_target];
            let required = s_target.min(3);
            let picks = loop {
                let picks: Vec<usize> = block
                    .iter()
                    .copied()
                    .filter(|_| rng.random::<f64>() < params.comember_inclusion)
                    .collect();
                if picks.len() >= required {
                    break picks;
                }
            };
            for v in picks {
                self.builder.add_edge(member, v);
            }
            extra.push((member, target));
        }
        for (member, target) in extra {
            self.groups[target].push(member);
        }
        self.finish(Modality::Comembership, seed, Vec::new())
    }

    fn finish(self, modality: Modality, seed: u64, liaison_nodes: Vec<usize>) -> MultiGroupGraph {
        let graph = self.builder.build();
        let n = graph.node_count();
        let mut membership = vec![Vec::new(); n];
        let mut home = vec![None; n];
        for (g, members) in self.groups.iter().enumerate() {
            for (pos, &v) in members.iter().enumerate() {
                membership[v].push(g);
                if pos < self.sizes.sizes[g] {
                    home[v] = Some(g);
                }
            }
        }
        for m in &mut membership {
            m.sort_unstable();
        }
        let tree = (modality != Modality::Liaison).then_some(self.tree);
        MultiGroupGraph {
            graph,
            groups: self.groups,
            membership,
            home,
            group_sizes: self.sizes,
            tree,
            liaison_nodes,
            modality,
            seed,
        }
    }
}

fn draw_slot<R: Rng + ?Sized>(gi: &[usize], gj: &[usize], rng: &mut R) -> (usize, usize) {
    let u = gi[rng.random_range(0..gi.len())];
    let v = gj[rng.random_range(0..gj.len())];
    (u, v)
}

pub fn gen_bridge<R: Rng + ?Sized>(
    n: usize,
    params: &ModalityParams,
    rng: &mut R,
) -> Result<MultiGroupGraph> {
    Ok(Scaffold::sample(n, params, rng)?.wire_bridge(0))
}

pub fn gen_edge_bundle<R: Rng + ?Sized>(
    n: usize,
    params: &ModalityParams,
    rng: &mut R,
) -> Result<MultiGroupGraph> {
    Ok(Scaffold::sample(n, params, rng)?.wire_edge_bundle(params, 0))
}

pub fn gen_comembership<R: Rng + ?Sized>(
    n: usize,
    params: &ModalityParams,
    rng: &mut R,
) -> Result<MultiGroupGraph> {
    Ok(Scaffold::sample(n, params, rng)?.wire_comembership(params, 0))
}

#[derive(Debug, Clone, Copy)]
enum Unit {
    Group(usize),
    Liaison(usize),
}

/// Liaison hierarchy: groups are the leaves, each liaison adopts 2 or 3 units
/// of the layer below, until a single root remains.
///
/// A leaf-level liaison links to one uniformly chosen member of each of its
/// groups; upper liaisons link directly to their child liaisons.
pub fn gen_liaison<R: Rng + ?Sized>(
    n: usize,
    params: &ModalityParams,
    rng: &mut R,
) -> Result<MultiGroupGraph> {
    let mut scaffold = Scaffold::sample(n, params, rng)?;
    let mut liaisons = Vec::new();
    let mut layer: Vec<Unit> = (0..scaffold.groups.len()).map(Unit::Group).collect();
    while layer.len() > 1 {
        let cells = branching_cells(&params.branching_pmf, layer.len(), rng)?;
        let mut next = Vec::with_capacity(cells.len());
        let mut cursor = 0;
        for cell in cells {
            let liaison = scaffold.builder.add_node();
            liaisons.push(liaison);
            for unit in &layer[cursor..cursor + cell] {
                let contact = match *unit {
                    Unit::Group(g) => {
                        let members = &scaffold.groups[g];
                        members[rng.random_range(0..members.len())]
                    }
                    Unit::Liaison(l) => l,
                };
                scaffold.builder.add_edge(liaison, contact);
            }
            cursor += cell;
            next.push(Unit::Liaison(liaison));
        }
        layer = next;
    }
    Ok(scaffold.finish(Modality::Liaison, 0, liaisons))
}

/// Partitions `units` into cells drawn from the branching law, retrying when
/// the greedy remainder cannot be absorbed (e.g. 4 = 3 + 1).
fn branching_cells<R: Rng + ?Sized>(
    pmf: &DiscretePmf,
    units: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    for _ in 0..LIAISON_MAX_ATTEMPTS {
        match fixed_sum_realizations(pmf, units, rng) {
            Ok(seq) => return Ok(seq.sizes),
            Err(Error::Saturated { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Generation(format!(
        "could not split {units} liaison children after {LIAISON_MAX_ATTEMPTS} attempts"
    )))
}

/// Stream seed of one `(seed, n)` generation request.
///
/// The modality is deliberately not mixed in: all four modalities drawn with
/// the same `(seed, n)` share group sizes, blocks, group tree and per-link
/// streams, so a bridge graph is a subgraph of the edge-bundle graph with the
/// same seed and modality contrasts are not buried under partition noise.
pub fn generation_seed(n: usize, seed: u64) -> u64 {
    derive_seed(seed, &[n as u64])
}

/// Deterministic generation of one network.
pub fn generate(
    modality: Modality,
    n: usize,
    params: &ModalityParams,
    seed: u64,
) -> Result<MultiGroupGraph> {
    if n < 3 {
        return Err(Error::TooSmall { total: n, min: 3 });
    }
    let mut rng = stream(generation_seed(n, seed));
    let mut out = match modality {
        Modality::Bridge => gen_bridge(n, params, &mut rng),
        Modality::EdgeBundle => gen_edge_bundle(n, params, &mut rng),
        Modality::Comembership => gen_comembership(n, params, &mut rng),
        Modality::Liaison => gen_liaison(n, params, &mut rng),
    }?;
    out.seed = seed;
    Ok(out)
}
