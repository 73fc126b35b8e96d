//! Simple undirected edge-weighted graphs and the named families used throughout
//! the crate.
//!
//! Vertices are `0..n`. Weights are stored sparsely keyed by `(min, max)` so the
//! symmetric pair `(j, k)` / `(k, j)` always reads the same value. A weight of zero
//! means "no edge" and is never stored.
//!
//! Family labelings:
//!
//! | family | labeling |
//! |--------|----------|
//! | path `P_n` | `0 - 1 - ... - n-1` |
//! | cycle `C_n` | path plus `n-1 - 0` |
//! | claw `K_{1,n}` | center `0`, leaves `1..=n` |
//! | complete multipartite | cells laid out consecutively in the given order |
//! | hypercube `Q_d` | bit strings, edges between Hamming neighbours |
//! | circulant | `j ~ k` iff `(k - j) mod n` is in the connection set |

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest hypercube dimension accepted by [`Family::Hypercube`]; graphs are
/// materialized densely for spectral work.
pub const MAX_HYPERCUBE_DIM: u32 = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    weights: BTreeMap<(usize, usize), f64>,
}

fn key(j: usize, k: usize) -> (usize, usize) {
    if j < k {
        (j, k)
    } else {
        (k, j)
    }
}

impl WeightedGraph {
    /// Edgeless graph on `n` vertices.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok(Self {
            n,
            weights: BTreeMap::new(),
        })
    }

    /// Builds a graph from an edge list where each undirected edge appears once.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut g = Self::new(n)?;
        let mut seen = BTreeSet::new();
        for &(j, k, w) in edges {
            if !seen.insert(key(j, k)) {
                return Err(Error::DuplicateEdge(j, k));
            }
            g.insert_weight(j, k, w)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, j: usize, k: usize) -> f64 {
        self.weights.get(&key(j, k)).copied().unwrap_or(0.0)
    }

    pub fn has_edge(&self, j: usize, k: usize) -> bool {
        self.weights.contains_key(&key(j, k))
    }

    /// Edges with positive weight as `(j, k, w)` with `j < k`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.weights.iter().map(|(&(j, k), &w)| (j, k, w))
    }

    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    fn check_pair(&self, j: usize, k: usize, w: f64) -> Result<()> {
        for v in [j, k] {
            if v >= self.n {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        if j == k {
            return Err(Error::SelfLoop(j));
        }
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::InvalidWeight { j, k, weight: w });
        }
        Ok(())
    }

    /// Sets `weight(j, k) = weight(k, j) = w` in place; `w == 0` removes the edge.
    pub fn insert_weight(&mut self, j: usize, k: usize, w: f64) -> Result<()> {
        self.check_pair(j, k, w)?;
        if w == 0.0 {
            self.weights.remove(&key(j, k));
        } else {
            self.weights.insert(key(j, k), w);
        }
        Ok(())
    }

    /// Returns a copy with `weight(j, k)` replaced.
    pub fn set_weight(&self, j: usize, k: usize, w: f64) -> Result<Self> {
        let mut g = self.clone();
        g.insert_weight(j, k, w)?;
        Ok(g)
    }

    /// Copy with every weight multiplied by `factor` (must be positive and finite).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {factor}"
            )));
        }
        Ok(Self {
            n: self.n,
            weights: self.weights.iter().map(|(&e, &w)| (e, w * factor)).collect(),
        })
    }

    /// Dense symmetric adjacency matrix; each stored weight is copied into both
    /// `[j, k]` and `[k, j]`.
    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for (&(j, k), &w) in &self.weights {
            a[(j, k)] = w;
            a[(k, j)] = w;
        }
        a
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n).filter(|&u| u != v && self.has_edge(u, v)).collect()
    }

    pub fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.n];
        for &(j, k) in self.weights.keys() {
            adj[j].push(k);
            adj[k].push(j);
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Cartesian product `self ⊕ h`; vertex `(g, h)` has index `g * |H| + h`.
    pub fn cartesian_product(&self, h: &WeightedGraph) -> WeightedGraph {
        let (ng, nh) = (self.n, h.n);
        let mut weights = BTreeMap::new();
        for gi in 0..ng {
            for (a, b, w) in h.edges() {
                weights.insert(key(gi * nh + a, gi * nh + b), w);
            }
        }
        for (a, b, w) in self.edges() {
            for hj in 0..nh {
                weights.insert(key(a * nh + hj, b * nh + hj), w);
            }
        }
        WeightedGraph {
            n: ng * nh,
            weights,
        }
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            n: self.n,
            edges: self.edges().collect(),
            cells: None,
        }
    }
}

/// Free-function form of [`WeightedGraph::cartesian_product`].
pub fn cartesian_product(g: &WeightedGraph, h: &WeightedGraph) -> WeightedGraph {
    g.cartesian_product(h)
}

/// A graph together with a partition of its vertices into cells.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedGraph {
    graph: WeightedGraph,
    cells: Vec<Vec<usize>>,
}

impl PartitionedGraph {
    pub fn new(graph: WeightedGraph, cells: Vec<Vec<usize>>) -> Result<Self> {
        validate_cells(graph.n(), &cells)?;
        Ok(Self { graph, cells })
    }

    /// Unweighted complete multipartite graph with cells laid out consecutively.
    pub fn complete_multipartite(parts: &[usize]) -> Result<Self> {
        let graph = Family::CompleteMultipartite(parts.to_vec()).build()?;
        Ok(Self {
            graph,
            cells: multipartite_cells(parts),
        })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    /// Index of the cell containing `v`.
    pub fn cell_of(&self, v: usize) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(&v))
    }

    /// True when no edge joins two vertices of the same cell.
    pub fn cells_independent(&self) -> bool {
        self.cells.iter().all(|c| {
            c.iter()
                .enumerate()
                .all(|(i, &a)| c[i + 1..].iter().all(|&b| !self.graph.has_edge(a, b)))
        })
    }

    pub fn into_parts(self) -> (WeightedGraph, Vec<Vec<usize>>) {
        (self.graph, self.cells)
    }
}

pub(crate) fn multipartite_cells(parts: &[usize]) -> Vec<Vec<usize>> {
    let mut offset = 0;
    parts
        .iter()
        .map(|&size| {
            let cell = (offset..offset + size).collect();
            offset += size;
            cell
        })
        .collect()
}

fn validate_cells(n: usize, cells: &[Vec<usize>]) -> Result<()> {
    let mut seen = vec![false; n];
    for cell in cells {
        if cell.is_empty() {
            return Err(Error::InvalidPartition("empty cell".into()));
        }
        for &v in cell {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            if seen[v] {
                return Err(Error::InvalidPartition(format!(
                    "vertex {v} appears in more than one cell"
                )));
            }
            seen[v] = true;
        }
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidPartition(format!("vertex {v} is not covered")));
    }
    Ok(())
}

/// Named graph families; [`Family::build`] returns the unweighted member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Family {
    Path(usize),
    Cycle(usize),
    Complete(usize),
    /// `K_{1,n}` with `n` leaves.
    Claw(usize),
    CompleteMultipartite(Vec<usize>),
    /// `Q_d` on `2^d` vertices.
    Hypercube(u32),
    Circulant { n: usize, connections: Vec<i64> },
}

fn family_err(family: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidFamily {
        family,
        reason: reason.into(),
    }
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Path(_) => "path",
            Family::Cycle(_) => "cycle",
            Family::Complete(_) => "complete",
            Family::Claw(_) => "claw",
            Family::CompleteMultipartite(_) => "complete-multipartite",
            Family::Hypercube(_) => "hypercube",
            Family::Circulant { .. } => "circulant",
        }
    }

    pub fn build(&self) -> Result<WeightedGraph> {
        let name = self.name();
        match self {
            Family::Path(n) => {
                let mut g = WeightedGraph::new(*n).map_err(|_| family_err(name, "n must be >= 1"))?;
                for v in 1..*n {
                    g.insert_weight(v - 1, v, 1.0)?;
                }
                Ok(g)
            }
            Family::Cycle(n) => {
                if *n < 3 {
                    return Err(family_err(name, format!("n must be >= 3, got {n}")));
                }
                let mut g = Family::Path(*n).build()?;
                g.insert_weight(n - 1, 0, 1.0)?;
                Ok(g)
            }
            Family::Complete(n) => {
                let mut g = WeightedGraph::new(*n).map_err(|_| family_err(name, "n must be >= 1"))?;
                for j in 0..*n {
                    for k in j + 1..*n {
                        g.insert_weight(j, k, 1.0)?;
                    }
                }
                Ok(g)
            }
            Family::Claw(leaves) => {
                if *leaves == 0 {
                    return Err(family_err(name, "a claw needs at least one leaf"));
                }
                let mut g = WeightedGraph::new(leaves + 1)?;
                for leaf in 1..=*leaves {
                    g.insert_weight(0, leaf, 1.0)?;
                }
                Ok(g)
            }
            Family::CompleteMultipartite(parts) => {
                if parts.is_empty() {
                    return Err(family_err(name, "at least one part is required"));
                }
                if let Some(p) = parts.iter().position(|&s| s == 0) {
                    return Err(family_err(name, format!("part {p} has size 0")));
                }
                let cells = multipartite_cells(parts);
                let n = parts.iter().sum();
                let mut g = WeightedGraph::new(n)?;
                for (ci, a) in cells.iter().enumerate() {
                    for b in &cells[ci + 1..] {
                        for &j in a {
                            for &k in b {
                                g.insert_weight(j, k, 1.0)?;
                            }
                        }
                    }
                }
                Ok(g)
            }
            Family::Hypercube(dim) => {
                if *dim > MAX_HYPERCUBE_DIM {
                    return Err(family_err(
                        name,
                        format!("dimension {dim} exceeds {MAX_HYPERCUBE_DIM}"),
                    ));
                }
                let n = 1usize << dim;
                let mut g = WeightedGraph::new(n)?;
                for v in 0..n {
                    for bit in 0..*dim {
                        let u = v ^ (1 << bit);
                        if v < u {
                            g.insert_weight(v, u, 1.0)?;
                        }
                    }
                }
                Ok(g)
            }
            Family::Circulant { n, connections } => {
                if *n == 0 {
                    return Err(family_err(name, "n must be >= 1"));
                }
                let modulus = *n as i64;
                let set: BTreeSet<usize> = connections
                    .iter()
                    .map(|d| d.rem_euclid(modulus) as usize)
                    .collect();
                if set.contains(&0) {
                    return Err(family_err(
                        name,
                        "connection set contains 0 (mod n), which would be a self-loop",
                    ));
                }
                for &d in &set {
                    if !set.contains(&(n - d)) {
                        return Err(family_err(
                            name,
                            format!("connection set is not closed under negation: has {d} but not {}", n - d),
                        ));
                    }
                }
                let mut g = WeightedGraph::new(*n)?;
                for j in 0..*n {
                    for &d in &set {
                        let k = (j + d) % n;
                        g.insert_weight(j, k, 1.0)?;
                    }
                }
                Ok(g)
            }
        }
    }

    /// Natural partition of the family, when it has one (multipartite cells, or the
    /// claw's center/leaves bipartition).
    pub fn cells(&self) -> Option<Vec<Vec<usize>>> {
        match self {
            Family::CompleteMultipartite(parts) => Some(multipartite_cells(parts)),
            Family::Claw(leaves) => Some(vec![vec![0], (1..=*leaves).collect()]),
            Family::Complete(n) => Some(multipartite_cells(&vec![1; *n])),
            _ => None,
        }
    }
}

/// Free-function form of [`Family::build`].
pub fn build_family(family: &Family) -> Result<WeightedGraph> {
    family.build()
}

/// On-disk graph representation: `{"n": int, "edges": [[j,k,w],...], "cells": [[...],...]?}`.
///
/// Each undirected edge is listed once. Zero weights are accepted and mean "no
/// edge", so solver outputs can list a family's full edge set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<Vec<usize>>>,
}

impl GraphFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn to_graph(&self) -> Result<WeightedGraph> {
        WeightedGraph::from_edges(self.n, &self.edges)
    }

    /// Graph plus validated cells (every vertex its own cell when none are given).
    pub fn to_partitioned(&self) -> Result<PartitionedGraph> {
        let graph = self.to_graph()?;
        let cells = match &self.cells {
            Some(c) => c.clone(),
            None => (0..self.n).map(|v| vec![v]).collect(),
        };
        PartitionedGraph::new(graph, cells)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claw_labeling() {
        let g = Family::Claw(3).build().unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edge_count(), 3);
        for leaf in 1..=3 {
            assert_eq!(g.weight(0, leaf), 1.0);
        }
        assert!(!g.has_edge(1, 2));
    }

    #[test]
    fn q2_is_c4() {
        let q2 = Family::Hypercube(2).build().unwrap();
        assert_eq!(q2.edge_count(), 4);
        assert!((0..4).all(|v| q2.neighbors(v).len() == 2));
        // relabel 0,1,3,2 around the cycle
        let c4 = Family::Cycle(4).build().unwrap();
        let perm = [0, 1, 3, 2];
        for (j, k, w) in c4.edges() {
            assert_eq!(q2.weight(perm[j], perm[k]), w);
        }
    }

    #[test]
    fn k22_has_no_inner_edges() {
        let pg = PartitionedGraph::complete_multipartite(&[2, 2]).unwrap();
        assert_eq!(pg.graph().edge_count(), 4);
        assert!(pg.cells_independent());
        assert!(!pg.graph().has_edge(0, 1));
        assert!(!pg.graph().has_edge(2, 3));
    }

    #[test]
    fn circulant_rejects_bad_sets() {
        let zero = Family::Circulant { n: 5, connections: vec![0, 1, 4] }.build();
        assert!(matches!(zero, Err(Error::InvalidFamily { .. })));
        let open = Family::Circulant { n: 5, connections: vec![1] }.build();
        assert!(matches!(open, Err(Error::InvalidFamily { .. })));
        let c5 = Family::Circulant { n: 5, connections: vec![1, -1] }.build().unwrap();
        assert_eq!(c5, Family::Cycle(5).build().unwrap());
    }

    #[test]
    fn set_weight_is_symmetric_and_zero_removes() {
        let g = Family::Path(3).build().unwrap();
        let g2 = g.set_weight(2, 1, 0.25).unwrap();
        let a = g2.adjacency_matrix();
        assert_eq!(a[(1, 2)], 0.25);
        assert_eq!(a[(2, 1)], 0.25);
        let g3 = g2.set_weight(1, 2, 0.0).unwrap();
        assert!(!g3.has_edge(1, 2));
        assert_eq!(g3.adjacency_matrix()[(1, 2)], 0.0);
        // original untouched
        assert_eq!(g.weight(1, 2), 1.0);
    }

    #[test]
    fn rejects_self_loops_and_negative_weights() {
        let g = WeightedGraph::new(3).unwrap();
        assert!(matches!(g.set_weight(1, 1, 1.0), Err(Error::SelfLoop(1))));
        assert!(matches!(g.set_weight(0, 1, -0.5), Err(Error::InvalidWeight { .. })));
        assert!(matches!(g.set_weight(0, 1, f64::NAN), Err(Error::InvalidWeight { .. })));
        assert!(matches!(g.set_weight(0, 3, 1.0), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn weighted_p3_adjacency() {
        let alpha = 0.7;
        let g = Family::Path(3).build().unwrap().set_weight(1, 2, alpha).unwrap();
        let a = g.adjacency_matrix();
        let expected = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, alpha, 0.0, alpha, 0.0]);
        assert_eq!(a, expected);
    }

    #[test]
    fn product_of_k2s_is_c4() {
        let k2 = Family::Complete(2).build().unwrap();
        let p = k2.cartesian_product(&k2);
        assert_eq!(p.n(), 4);
        assert_eq!(p.edge_count(), 4);
        assert!((0..4).all(|v| p.neighbors(v).len() == 2));
        assert_eq!(p, Family::Hypercube(2).build().unwrap());
    }

    #[test]
    fn p3_grid() {
        let p3 = Family::Path(3).build().unwrap();
        let grid = p3.cartesian_product(&p3);
        assert_eq!(grid.n(), 9);
        assert_eq!(grid.edge_count(), 12);
        let degrees: Vec<usize> = (0..9).map(|v| grid.neighbors(v).len()).collect();
        assert_eq!(degrees, vec![2, 3, 2, 3, 4, 3, 2, 3, 2]);
        assert!(grid.has_edge(4, 1) && grid.has_edge(4, 3) && grid.has_edge(4, 5) && grid.has_edge(4, 7));
    }

    #[test]
    fn graph_file_validation() {
        let ok = GraphFile::from_json(r#"{"n":3,"edges":[[0,1,1.0],[1,2,0.5]]}"#).unwrap();
        let g = ok.to_graph().unwrap();
        assert_eq!(g.weight(2, 1), 0.5);
        let dup = GraphFile::from_json(r#"{"n":3,"edges":[[0,1,1.0],[1,0,0.5]]}"#).unwrap();
        assert!(matches!(dup.to_graph(), Err(Error::DuplicateEdge(1, 0))));
        let neg = GraphFile::from_json(r#"{"n":2,"edges":[[0,1,-1.0]]}"#).unwrap();
        assert!(neg.to_graph().is_err());
        let cells = GraphFile::from_json(r#"{"n":3,"edges":[],"cells":[[0,1],[1,2]]}"#).unwrap();
        assert!(matches!(cells.to_partitioned(), Err(Error::InvalidPartition(_))));
        assert!(GraphFile::from_json(r#"{"n":"x"}"#).is_err());
    }

    #[test]
    fn connectivity_is_a_query() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(!g.is_connected());
        assert!(g.set_weight(1, 2, 0.1).unwrap().is_connected());
    }

    #[test]
    fn family_errors() {
        assert!(Family::Cycle(2).build().is_err());
        assert!(Family::Claw(0).build().is_err());
        assert!(Family::CompleteMultipartite(vec![2, 0]).build().is_err());
        assert!(Family::Hypercube(MAX_HYPERCUBE_DIM + 1).build().is_err());
        assert!(Family::Path(0).build().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
            (1..=max_n)
                .prop_flat_map(|n| {
                    let pairs = n * (n - 1) / 2;
                    (Just(n), proptest::collection::vec(prop_oneof![Just(0.0), 0.0..3.0f64], pairs))
                })
                .prop_map(|(n, ws)| {
                    let mut g = WeightedGraph::new(n).unwrap();
                    let mut it = ws.into_iter();
                    for j in 0..n {
                        for k in j + 1..n {
                            g.insert_weight(j, k, it.next().unwrap()).unwrap();
                        }
                    }
                    g
                })
        }

        proptest! {
            #[test]
            fn adjacency_is_exactly_symmetric(g in arb_graph(9)) {
                let a = g.adjacency_matrix();
                prop_assert_eq!(&a, &a.transpose());
                for v in 0..g.n() {
                    prop_assert_eq!(a[(v, v)], 0.0);
                }
            }

            #[test]
            fn product_counts(g in arb_graph(5), h in arb_graph(5)) {
                let p = g.cartesian_product(&h);
                prop_assert_eq!(p.n(), g.n() * h.n());
                prop_assert_eq!(p.edge_count(), g.n() * h.edge_count() + h.n() * g.edge_count());
            }

            #[test]
            fn multipartite_pattern(parts in proptest::collection::vec(1usize..4, 1..5)) {
                let pg = PartitionedGraph::complete_multipartite(&parts).unwrap();
                let g = pg.graph();
                for (ci, a) in pg.cells().iter().enumerate() {
                    for (cj, b) in pg.cells().iter().enumerate() {
                        for &j in a {
                            for &k in b {
                                if j == k { continue; }
                                if ci == cj {
                                    prop_assert_eq!(g.weight(j, k), 0.0);
                                } else {
                                    prop_assert!(g.weight(j, k) > 0.0);
                                }
                            }
                        }
                    }
                }
            }

            #[test]
            fn graph_file_round_trip(g in arb_graph(7)) {
                let text = g.to_file().to_json().unwrap();
                let back = GraphFile::from_json(&text).unwrap().to_graph().unwrap();
                prop_assert_eq!(back, g);
            }
        }
    }
}
