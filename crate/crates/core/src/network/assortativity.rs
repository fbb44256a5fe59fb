use std::collections::BTreeMap;

use super::{NetworkError, WeightedProjection};

/// Discrete-attribute assortativity of an undirected, unweighted edge list.
///
/// With `e` the symmetric class mixing matrix (each edge counted in both
/// directions, normalized to sum 1) and `a` its row sums,
/// `r = (Σ e_ii − Σ a_i²) / (1 − Σ a_i²)`.
pub fn assortativity(edges: &[(usize, usize)], classes: &[usize]) -> Result<f64, NetworkError> {
    if edges.is_empty() {
        return Err(NetworkError::NoEdges);
    }
    let n_classes = classes.iter().max().map_or(0, |m| m + 1);
    let mut same = 0usize;
    let mut ends = vec![0usize; n_classes];
    for &(u, v) in edges {
        let (cu, cv) = (classes[u], classes[v]);
        if cu == cv {
            same += 1;
        }
        ends[cu] += 1;
        ends[cv] += 1;
    }
    if ends.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(NetworkError::DegenerateMixing);
    }
    let half_ends = 2.0 * edges.len() as f64;
    let trace = same as f64 / edges.len() as f64;
    let expected: f64 = ends.iter().map(|&c| (c as f64 / half_ends).powi(2)).sum();
    Ok(((trace - expected) / (1.0 - expected)).clamp(-1.0, 1.0))
}

/// Maps each node's party to a dense class id (parties in sorted order).
pub fn party_classes(p: &WeightedProjection) -> Vec<usize> {
    let ids: BTreeMap<&str, usize> = {
        let mut parties: Vec<&str> = p.nodes().iter().map(|n| n.party.as_str()).collect();
        parties.sort_unstable();
        parties.dedup();
        parties
            .into_iter()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect()
    };
    p.nodes().iter().map(|n| ids[n.party.as_str()]).collect()
}

/// Party assortativity of the projection's unweighted edge set.
pub fn attribute_assortativity(p: &WeightedProjection) -> Result<f64, NetworkError> {
    assortativity(&p.unweighted_edges(), &party_classes(p))
}
