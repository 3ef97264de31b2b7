//! Decomposable (chordal) undirected graphs with a maintained perfect clique
//! sequence, single-edge moves that stay inside the decomposable space, and
//! the edge-wise graph prior.

mod decompose;
pub mod io;
mod moves;
mod prior;

pub use decompose::{clique_decomposition, is_decomposable, maximum_cardinality_search, CliqueSequence};
pub use moves::{
    can_add_edge, can_delete_edge, legal_additions, legal_deletions, propose_edge_move,
    propose_from, EdgeMove, LegalMoves, MoveKind, Proposal,
};
pub use prior::{graph_log_prior, EdgePriorWeights};

use crate::bitset::VertexSet;
use crate::{Error, Result};

/// Adjacency rows for a simple undirected graph on `0..q`.
pub type Adjacency = Vec<VertexSet>;

/// Builds adjacency rows from an edge list, rejecting loops and out-of-range vertices.
pub fn adjacency_from_edges(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Adjacency> {
    let mut adj = vec![VertexSet::empty(num_vertices); num_vertices];
    for &(u, v) in edges {
        if u >= num_vertices || v >= num_vertices {
            return Err(Error::InvalidParams(format!(
                "edge ({u}, {v}) out of range for {num_vertices} vertices"
            )));
        }
        if u == v {
            return Err(Error::InvalidParams(format!("self-loop at vertex {u}")));
        }
        adj[u].insert(v);
        adj[v].insert(u);
    }
    Ok(adj)
}

/// An undirected decomposable graph together with a perfect sequence of its
/// maximal cliques.
///
/// `separators()[j]` is the separator of `cliques()[j + 1]`, i.e. the
/// intersection of that clique with the union of all earlier cliques. The
/// sequence is produced by maximum cardinality search with lowest-index tie
/// breaking, so it is a deterministic function of the edge set.
#[derive(Clone, Debug)]
pub struct DecomposableGraph {
    adj: Adjacency,
    num_edges: usize,
    cliques: Vec<Vec<usize>>,
    separators: Vec<Vec<usize>>,
}

impl PartialEq for DecomposableGraph {
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj
    }
}

impl Eq for DecomposableGraph {}

impl DecomposableGraph {
    pub fn empty(num_vertices: usize) -> Self {
        Self::from_adjacency(vec![VertexSet::empty(num_vertices); num_vertices])
            .expect("empty graph is decomposable")
    }

    pub fn complete(num_vertices: usize) -> Self {
        let adj = (0..num_vertices)
            .map(|v| {
                let mut row = VertexSet::full(num_vertices);
                row.remove(v);
                row
            })
            .collect();
        Self::from_adjacency(adj).expect("complete graph is decomposable")
    }

    pub fn from_edges(num_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::from_adjacency(adjacency_from_edges(num_vertices, edges)?)
    }

    pub fn from_adjacency(adj: Adjacency) -> Result<Self> {
        let (cliques, separators) = clique_decomposition(&adj)?;
        let num_edges = adj.iter().map(VertexSet::len).sum::<usize>() / 2;
        Ok(DecomposableGraph {
            adj,
            num_edges,
            cliques,
            separators,
        })
    }

    /// Returns the graph with edge `{u, v}` added or removed.
    pub fn with_edge_toggled(&self, u: usize, v: usize) -> Result<Self> {
        let mut adj = self.adj.clone();
        if adj[u].contains(v) {
            adj[u].remove(v);
            adj[v].remove(u);
        } else {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        Self::from_adjacency(adj)
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adj
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    pub fn separators(&self) -> &[Vec<usize>] {
        &self.separators
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges);
        for u in 0..self.num_vertices() {
            out.extend(self.adj[u].iter().filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    /// Symmetric 0/1 inclusion matrix (diagonal 0).
    pub fn inclusion_matrix(&self) -> nalgebra::DMatrix<f64> {
        let q = self.num_vertices();
        nalgebra::DMatrix::from_fn(q, q, |i, j| if self.has_edge(i, j) { 1.0 } else { 0.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_and_four_cycle() {
        let tri = adjacency_from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(is_decomposable(&tri));
        let c4 = adjacency_from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(!is_decomposable(&c4));
        assert_eq!(
            DecomposableGraph::from_adjacency(c4).unwrap_err(),
            Error::NotDecomposable
        );
    }

    #[test]
    fn empty_and_complete_decompositions() {
        let g = DecomposableGraph::empty(4);
        assert_eq!(g.cliques(), &[vec![0], vec![1], vec![2], vec![3]]);
        assert!(g.separators().iter().all(Vec::is_empty));

        let k = DecomposableGraph::complete(5);
        assert_eq!(k.cliques(), &[vec![0, 1, 2, 3, 4]]);
        assert!(k.separators().is_empty());
        assert_eq!(k.num_edges(), 10);
    }

    #[test]
    fn path_has_two_cliques_and_shared_separator() {
        let g = DecomposableGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.cliques(), &[vec![0, 1], vec![1, 2]]);
        assert_eq!(g.separators(), &[vec![1]]);
    }

    #[test]
    fn rejects_loops_and_out_of_range() {
        assert!(adjacency_from_edges(3, &[(1, 1)]).is_err());
        assert!(adjacency_from_edges(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn toggle_round_trip() {
        let g = DecomposableGraph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        let h = g.with_edge_toggled(2, 3).unwrap();
        assert!(h.has_edge(3, 2));
        assert_eq!(h.with_edge_toggled(3, 2).unwrap(), g);
    }
}
