use rand::Rng;

use super::DecomposableGraph;
use crate::bitset::VertexSet;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MoveKind {
    Add,
    Delete,
}

/// A proposed single-edge perturbation with the log proposal probabilities of
/// the forward move and of its reverse (evaluated from the proposed graph).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeMove {
    pub u: usize,
    pub v: usize,
    pub kind: MoveKind,
    pub log_forward: f64,
    pub log_reverse: f64,
}

impl EdgeMove {
    /// `log q(g | g') − log q(g' | g)`, the Hastings correction.
    pub fn log_proposal_ratio(&self) -> f64 {
        self.log_reverse - self.log_forward
    }
}

/// True iff adding the absent edge `{u, v}` keeps the graph decomposable.
///
/// Equivalent to the common neighbourhood separating `u` from `v`: the
/// component of `v` in `G − N[u]` may only attach to neighbours of `v`.
pub fn can_add_edge(graph: &DecomposableGraph, u: usize, v: usize) -> bool {
    if u == v || graph.has_edge(u, v) {
        return false;
    }
    let adj = graph.adjacency();
    let mut blocked = adj[u].clone();
    blocked.insert(u);
    let (component, boundary) = component_and_boundary(adj, &blocked, v);
    debug_assert!(component.contains(v));
    boundary.is_subset(&adj[v])
}

/// True iff deleting the present edge `{u, v}` keeps the graph decomposable,
/// i.e. the edge lies in exactly one maximal clique.
pub fn can_delete_edge(graph: &DecomposableGraph, u: usize, v: usize) -> bool {
    if u == v || !graph.has_edge(u, v) {
        return false;
    }
    let adj = graph.adjacency();
    is_complete(adj, &adj[u].intersection(&adj[v]))
}

fn is_complete(adj: &[VertexSet], set: &VertexSet) -> bool {
    set.iter().all(|x| {
        let mut rest = set.clone();
        rest.remove(x);
        rest.is_subset(&adj[x])
    })
}

/// Connected component of `start` in the graph minus `blocked`, together with
/// its neighbourhood (vertices of `blocked` adjacent to the component).
fn component_and_boundary(
    adj: &[VertexSet],
    blocked: &VertexSet,
    start: usize,
) -> (VertexSet, VertexSet) {
    let q = adj.len();
    let mut component = VertexSet::empty(q);
    component.insert(start);
    let mut frontier = component.clone();
    let mut reach = VertexSet::empty(q);
    while let Some(x) = frontier.first() {
        frontier.remove(x);
        reach.union_with(&adj[x]);
        let mut fresh = adj[x].difference(blocked);
        fresh.difference_with(&component);
        component.union_with(&fresh);
        frontier.union_with(&fresh);
    }
    reach.difference_with(&component);
    (component, reach)
}

/// All legal additions `(u, v)` with `u < v`, in lexicographic order.
pub fn legal_additions(graph: &DecomposableGraph) -> Vec<(usize, usize)> {
    let adj = graph.adjacency();
    let q = adj.len();
    let mut out = Vec::new();
    for u in 0..q {
        let mut blocked = adj[u].clone();
        blocked.insert(u);
        let mut legal_v = VertexSet::empty(q);
        let mut unseen = VertexSet::full(q);
        unseen.difference_with(&blocked);
        while let Some(start) = unseen.first() {
            let (component, boundary) = component_and_boundary(adj, &blocked, start);
            unseen.difference_with(&component);
            for v in component.iter() {
                if boundary.is_subset(&adj[v]) {
                    legal_v.insert(v);
                }
            }
        }
        out.extend(legal_v.iter().filter(|&v| v > u).map(|v| (u, v)));
    }
    out
}

/// All legal deletions `(u, v)` with `u < v`, in lexicographic order.
pub fn legal_deletions(graph: &DecomposableGraph) -> Vec<(usize, usize)> {
    graph
        .edges()
        .into_iter()
        .filter(|&(u, v)| can_delete_edge(graph, u, v))
        .collect()
}

/// Legal single-edge moves out of one graph.
///
/// The proposal picks the add side or the delete side with probability ½
/// each (all mass on the nonempty side when one is empty), then a move
/// uniformly within that side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegalMoves {
    pub adds: Vec<(usize, usize)>,
    pub deletes: Vec<(usize, usize)>,
}

impl LegalMoves {
    pub fn of(graph: &DecomposableGraph) -> Self {
        LegalMoves {
            adds: legal_additions(graph),
            deletes: legal_deletions(graph),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.adds.is_empty() && self.deletes.is_empty()
    }

    fn side_log_prob(&self) -> f64 {
        if self.adds.is_empty() || self.deletes.is_empty() {
            0.0
        } else {
            -std::f64::consts::LN_2
        }
    }

    /// Log probability that the proposal draws a particular move of `kind`,
    /// or `None` when no move of that kind is available.
    pub fn log_prob(&self, kind: MoveKind) -> Option<f64> {
        let n = match kind {
            MoveKind::Add => self.adds.len(),
            MoveKind::Delete => self.deletes.len(),
        };
        (n > 0).then(|| self.side_log_prob() - (n as f64).ln())
    }

    /// Draws a move `(u, v, kind)` according to the proposal.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(usize, usize, MoveKind)> {
        let kind = match (self.adds.is_empty(), self.deletes.is_empty()) {
            (true, true) => return Err(Error::NoLegalMove),
            (false, true) => MoveKind::Add,
            (true, false) => MoveKind::Delete,
            (false, false) => {
                if rng.random::<f64>() < 0.5 {
                    MoveKind::Add
                } else {
                    MoveKind::Delete
                }
            }
        };
        let list = match kind {
            MoveKind::Add => &self.adds,
            MoveKind::Delete => &self.deletes,
        };
        let (u, v) = list[rng.random_range(0..list.len())];
        Ok((u, v, kind))
    }
}

/// A proposed graph together with the move and the proposed graph's own
/// legal-move set (reusable as the current set if the move is accepted).
#[derive(Clone, Debug)]
pub struct Proposal {
    pub graph: DecomposableGraph,
    pub legal: LegalMoves,
    pub edge_move: EdgeMove,
}

/// Proposes a move from `graph` given its precomputed legal-move set.
pub fn propose_from<R: Rng + ?Sized>(
    graph: &DecomposableGraph,
    legal: &LegalMoves,
    rng: &mut R,
) -> Result<Proposal> {
    let (u, v, kind) = legal.draw(rng)?;
    let next = graph.with_edge_toggled(u, v)?;
    let next_legal = LegalMoves::of(&next);
    let reverse_kind = match kind {
        MoveKind::Add => MoveKind::Delete,
        MoveKind::Delete => MoveKind::Add,
    };
    let log_forward = legal.log_prob(kind).expect("drawn side is nonempty");
    let log_reverse = next_legal
        .log_prob(reverse_kind)
        .expect("reverse of a legal move is legal");
    Ok(Proposal {
        graph: next,
        legal: next_legal,
        edge_move: EdgeMove {
            u,
            v,
            kind,
            log_forward,
            log_reverse,
        },
    })
}

/// Proposes a random legal single-edge addition or deletion.
pub fn propose_edge_move<R: Rng + ?Sized>(
    graph: &DecomposableGraph,
    rng: &mut R,
) -> Result<(DecomposableGraph, EdgeMove)> {
    let legal = LegalMoves::of(graph);
    let p = propose_from(graph, &legal, rng)?;
    Ok((p.graph, p.edge_move))
}
