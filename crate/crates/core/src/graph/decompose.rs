use crate::bitset::VertexSet;
use crate::{Error, Result};

/// Maximum cardinality search visiting order; ties go to the lowest index.
pub fn maximum_cardinality_search(adj: &[VertexSet]) -> Vec<usize> {
    let q = adj.len();
    let mut weight = vec![0usize; q];
    let mut numbered = vec![false; q];
    let mut order = Vec::with_capacity(q);
    for _ in 0..q {
        let mut best = usize::MAX;
        for v in 0..q {
            if !numbered[v] && (best == usize::MAX || weight[v] > weight[best]) {
                best = v;
            }
        }
        numbered[best] = true;
        order.push(best);
        for w in adj[best].iter() {
            if !numbered[w] {
                weight[w] += 1;
            }
        }
    }
    order
}

/// Perfect clique sequence and separators of a chordal graph.
///
/// Cliques in perfect order and the separator of each clique after the first.
pub type CliqueSequence = (Vec<Vec<usize>>, Vec<Vec<usize>>);

/// Walks the MCS order; each vertex's already-numbered neighbourhood must be
/// complete (otherwise the graph is not chordal). A vertex whose numbered
/// neighbourhood equals the clique under construction extends it; any other
/// vertex opens a new clique whose separator is that neighbourhood.
pub fn clique_decomposition(adj: &[VertexSet]) -> Result<CliqueSequence> {
    let q = adj.len();
    let order = maximum_cardinality_search(adj);
    let mut numbered = VertexSet::empty(q);
    let mut cliques: Vec<VertexSet> = Vec::new();
    let mut separators: Vec<VertexSet> = Vec::new();

    for &v in &order {
        let earlier = adj[v].intersection(&numbered);
        for x in earlier.iter() {
            let mut rest = earlier.clone();
            rest.remove(x);
            if !rest.is_subset(&adj[x]) {
                return Err(Error::NotDecomposable);
            }
        }
        match cliques.last_mut() {
            Some(last) if *last == earlier => last.insert(v),
            _ => {
                if !cliques.is_empty() {
                    separators.push(earlier.clone());
                }
                let mut c = earlier;
                c.insert(v);
                cliques.push(c);
            }
        }
        numbered.insert(v);
    }

    Ok((
        cliques.iter().map(VertexSet::to_vec).collect(),
        separators.iter().map(VertexSet::to_vec).collect(),
    ))
}

/// True iff the graph admits a perfect elimination ordering.
pub fn is_decomposable(adj: &[VertexSet]) -> bool {
    clique_decomposition(adj).is_ok()
}
