//! Invariant checkers and dense oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use multigroup::dynamics::ConsensusSystem;
use multigroup::{Graph, Modality, MultiGroupGraph};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

/// Checks the structural contract of a generated network; returns a
/// description of the first violation.
pub fn check_network(net: &MultiGroupGraph, n: usize) -> Result<(), String> {
    let g = &net.graph;
    let k = net.group_sizes.sizes.len();
    if !g.is_connected() {
        return Err("not connected".into());
    }
    if net.group_sizes.sizes.iter().sum::<usize>() != n {
        return Err(format!("group sizes do not sum to {n}"));
    }
    if net.group_sizes.sizes.iter().any(|&s| s < 3) {
        return Err("group smaller than 3".into());
    }
    let expected_nodes = n + net.liaison_nodes.len();
    if g.node_count() != expected_nodes {
        return Err(format!("{} nodes, expected {expected_nodes}", g.node_count()));
    }
    for (v, home) in net.home.iter().enumerate().take(n) {
        match home {
            Some(h) if net.groups[*h].contains(&v) => {}
            _ => return Err(format!("node {v} has no home group")),
        }
    }

    // cross edges between home groups, keyed by unordered group pair
    let mut cross: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for (u, v) in g.edges() {
        if let (Some(a), Some(b)) = (net.home[u], net.home[v]) {
            if a != b {
                cross.entry((a.min(b), a.max(b))).or_default().push((u, v));
            }
        }
    }
    let cross_total: usize = cross.values().map(Vec::len).sum();

    match net.modality {
        Modality::Liaison => {
            if !net.liaison_nodes.is_empty() && net.tree.is_some() {
                return Err("liaison network carries a group tree".into());
            }
            if cross_total != 0 {
                return Err("groups are wired directly".into());
            }
            check_liaisons(net, n, k)?;
        }
        modality => {
            if !net.liaison_nodes.is_empty() {
                return Err("liaison nodes outside the liaison modality".into());
            }
            let tree = net.tree.as_ref().ok_or("missing group tree")?;
            if tree.edges.len() + 1 != k {
                return Err("group tree does not span the groups".into());
            }
            let tree_pairs: BTreeSet<(usize, usize)> =
                tree.edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
            if cross.keys().any(|p| !tree_pairs.contains(p)) {
                return Err("cross edge between groups not joined in the tree".into());
            }
            for pair in &tree_pairs {
                let edges = cross.get(pair).map(Vec::as_slice).unwrap_or(&[]);
                match modality {
                    Modality::Bridge if edges.len() != 1 => {
                        return Err(format!("{} bridge edges on {pair:?}", edges.len()))
                    }
                    Modality::EdgeBundle if edges.len() < 2 => {
                        return Err(format!("bundle of {} on {pair:?}", edges.len()))
                    }
                    Modality::Comembership => {
                        if edges.len() < 3 {
                            return Err(format!("{} co-member ties on {pair:?}", edges.len()));
                        }
                        if common_endpoint(edges).is_none() {
                            return Err(format!("co-member ties on {pair:?} lack a common node"));
                        }
                    }
                    _ => {}
                }
            }
            if modality == Modality::Bridge && cross_total != k - 1 {
                return Err(format!("{cross_total} bridge edges for {k} groups"));
            }
        }
    }
    Ok(())
}

fn common_endpoint(edges: &[(usize, usize)]) -> Option<usize> {
    let (a, b) = edges[0];
    [a, b]
        .into_iter()
        .find(|&c| edges.iter().all(|&(u, v)| u == c || v == c))
}

/// Liaisons are appended layer by layer, so a liaison's children are its
/// lower-indexed neighbours and its parent the single higher-indexed one.
fn check_liaisons(net: &MultiGroupGraph, n: usize, k: usize) -> Result<(), String> {
    let g = &net.graph;
    let liaisons = &net.liaison_nodes;
    if k == 1 {
        return if liaisons.is_empty() {
            Ok(())
        } else {
            Err("liaisons added for a single group".into())
        };
    }
    let mut roots = 0;
    let mut hierarchy_edges = 0;
    for &l in liaisons {
        let children = g.neighbors(l).iter().filter(|&&v| v < l).count();
        let parents = g.neighbors(l).iter().filter(|&&v| v > l).count();
        if !(2..=3).contains(&children) {
            return Err(format!("liaison {l} has {children} children"));
        }
        match parents {
            0 => roots += 1,
            1 => {}
            p => return Err(format!("liaison {l} has {p} parents")),
        }
        hierarchy_edges += children;
    }
    if roots != 1 {
        return Err(format!("{roots} root liaisons"));
    }
    // groups + liaisons joined by hierarchy edges form a tree
    if hierarchy_edges != k + liaisons.len() - 1 {
        return Err("liaison hierarchy is not a tree".into());
    }
    for &l in liaisons {
        for &v in g.neighbors(l) {
            if v < n && net.home[v].is_none() {
                return Err("liaison contact outside the groups".into());
            }
        }
    }
    Ok(())
}

/// Dense adjacency matrix.
pub fn adjacency(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut a = DMatrix::zeros(n, n);
    for (u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    a
}

/// `W = (D + I)^-1 (A + I)` assembled from the adjacency matrix.
pub fn consensus_dense(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut w = adjacency(g) + DMatrix::identity(n, n);
    for i in 0..n {
        let s: f64 = w.row(i).sum();
        w.row_mut(i).unscale_mut(s);
    }
    w
}

/// Stationary distribution by LU solve of `πᵀ(W - I) = 0`, `Σπ = 1`.
pub fn stationary_by_solve(w: &DMatrix<f64>) -> DVector<f64> {
    let n = w.nrows();
    let mut m = w.transpose() - DMatrix::identity(n, n);
    for j in 0..n {
        m[(n - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    m.lu().solve(&rhs).expect("irreducible chain has a unique stationary law")
}

/// Largest eigenvalue modulus of the adjacency matrix by full decomposition.
pub fn dense_spectral_radius(g: &Graph) -> f64 {
    SymmetricEigen::new(adjacency(g))
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Second largest eigenvalue modulus of `W`, from the symmetric matrix
/// `D_π^{1/2} W D_π^{-1/2}` built independently of the library.
pub fn dense_rho2(g: &Graph) -> f64 {
    let w = consensus_dense(g);
    let n = w.nrows();
    let pi = stationary_by_solve(&w);
    let s = DMatrix::from_fn(n, n, |i, j| (pi[i] / pi[j]).sqrt() * w[(i, j)]);
    let s = (&s + s.transpose()) * 0.5;
    let mut eig: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    // drop the unit eigenvalue
    let top = eig
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - 1.0).abs().total_cmp(&(b.1 - 1.0).abs()))
        .map(|(i, _)| i)
        .unwrap();
    eig.remove(top);
    eig.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Connected `G(n, p)` by rejection.
pub fn random_connected_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    loop {
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|_| rng.random::<f64>() < p)
            .collect();
        let g = Graph::from_edges(n, edges).unwrap();
        if g.is_connected() {
            return g;
        }
    }
}

pub fn system(g: &Graph) -> ConsensusSystem {
    ConsensusSystem::from_graph(g).expect("connected graph")
}
