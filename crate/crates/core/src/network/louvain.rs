//! Louvain modularity optimization on weighted undirected graphs.
//!
//! Nodes are visited in ascending id order and a node joins the candidate
//! community with the largest modularity gain, the lowest community id winning
//! ties, so the result is fully deterministic. After the multilevel phase a
//! node-level pass on the original graph picks up moves that aggregation hid;
//! the two alternate until neither improves modularity.

use serde::{Deserialize, Serialize};

use super::WeightedProjection;

/// Smallest modularity gain treated as an improvement.
const MIN_GAIN: f64 = 1e-9;

/// Undirected weighted graph. `loops[i]` is the weight of a self-loop on `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    adj: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph {
            adj: vec![Vec::new(); n],
            loops: vec![0.0; n],
        }
    }

    /// Builds from an edge list; repeated pairs are summed, `a == b` adds a self-loop.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut g = Self::new(n);
        for (a, b, w) in edges {
            g.add_edge(a, b, w);
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize, w: f64) {
        if a == b {
            self.loops[a] += w;
            return;
        }
        for (x, y) in [(a, b), (b, a)] {
            match self.adj[x].iter_mut().find(|(n, _)| *n == y) {
                Some(e) => e.1 += w,
                None => self.adj[x].push((y, w)),
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Weighted degree; a self-loop contributes twice.
    pub fn strength(&self, u: usize) -> f64 {
        self.adj[u].iter().map(|e| e.1).sum::<f64>() + 2.0 * self.loops[u]
    }

    /// Sum of edge weights, each edge once.
    pub fn total_weight(&self) -> f64 {
        (0..self.node_count())
            .map(|u| self.strength(u))
            .sum::<f64>()
            / 2.0
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adj[u]
    }

    fn aggregate(&self, community: &[usize], count: usize) -> WeightedGraph {
        let mut g = WeightedGraph::new(count);
        for (u, list) in self.adj.iter().enumerate() {
            let cu = community[u];
            g.loops[cu] += self.loops[u];
            for &(v, w) in list {
                if u < v {
                    g.add_edge(cu, community[v], w);
                }
            }
        }
        for list in &mut g.adj {
            list.sort_by_key(|e| e.0);
        }
        g
    }
}

impl From<&WeightedProjection> for WeightedGraph {
    fn from(p: &WeightedProjection) -> Self {
        WeightedGraph::from_edges(
            p.node_count(),
            p.edges().iter().map(|&(a, b, w)| (a, b, w as f64)),
        )
    }
}

/// Community per node, ids dense and numbered by first appearance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub communities: Vec<usize>,
    pub modularity: f64,
}

impl Partition {
    pub fn community_count(&self) -> usize {
        self.communities.iter().max().map_or(0, |m| m + 1)
    }

    pub fn members(&self, community: usize) -> Vec<usize> {
        (0..self.communities.len())
            .filter(|&u| self.communities[u] == community)
            .collect()
    }
}

/// Weighted modularity `Σ_c [ W_c / m − (S_c / 2m)² ]`, with `W_c` the weight
/// inside community `c` and `S_c` its total strength. Zero for edgeless graphs.
pub fn modularity(g: &WeightedGraph, communities: &[usize]) -> f64 {
    let m = g.total_weight();
    if m <= 0.0 {
        return 0.0;
    }
    let count = communities.iter().max().map_or(0, |x| x + 1);
    let mut inside = vec![0.0; count];
    let mut strength = vec![0.0; count];
    for u in 0..g.node_count() {
        let cu = communities[u];
        strength[cu] += g.strength(u);
        inside[cu] += g.loops[u];
        for &(v, w) in g.neighbors(u) {
            if u < v && communities[v] == cu {
                inside[cu] += w;
            }
        }
    }
    inside
        .iter()
        .zip(&strength)
        .map(|(w, s)| w / m - (s / (2.0 * m)).powi(2))
        .sum()
}

/// Renumbers labels by first appearance in node order. Returns the count.
fn renumber(labels: &mut [usize]) -> usize {
    let mut map = vec![usize::MAX; labels.len().max(labels.iter().max().map_or(0, |m| m + 1))];
    let mut next = 0;
    for l in labels.iter_mut() {
        if map[*l] == usize::MAX {
            map[*l] = next;
            next += 1;
        }
        *l = map[*l];
    }
    next
}

/// Repeated passes of single-node moves. Returns true if any node moved.
fn local_moves(g: &WeightedGraph, community: &mut [usize]) -> bool {
    let n = g.node_count();
    let m2 = 2.0 * g.total_weight();
    let strength: Vec<f64> = (0..n).map(|u| g.strength(u)).collect();
    let slots = community.iter().max().map_or(0, |x| x + 1).max(n);
    let mut total = vec![0.0; slots];
    for u in 0..n {
        total[community[u]] += strength[u];
    }
    let mut link = vec![0.0; slots];
    let mut seen = vec![false; slots];
    let mut touched: Vec<usize> = Vec::new();
    let mut moved_any = false;

    loop {
        let mut moved = false;
        for u in 0..n {
            let own = community[u];
            let ku = strength[u];
            touched.clear();
            for &(v, w) in g.neighbors(u) {
                let c = community[v];
                if !seen[c] {
                    seen[c] = true;
                    touched.push(c);
                }
                link[c] += w;
            }
            total[own] -= ku;

            // gain of joining c, up to the constant factor 1/m
            let gain = |c: usize| link[c] - total[c] * ku / m2;
            let own_gain = gain(own);
            let max_gain = touched.iter().map(|&c| gain(c)).fold(own_gain, f64::max);
            let best = if max_gain - own_gain <= MIN_GAIN {
                own
            } else {
                touched.sort_unstable();
                touched
                    .iter()
                    .copied()
                    .find(|&c| gain(c) >= max_gain - MIN_GAIN)
                    .unwrap_or(own)
            };
            total[best] += ku;
            if best != own {
                community[u] = best;
                moved = true;
            }
            for &c in &touched {
                link[c] = 0.0;
                seen[c] = false;
            }
        }
        if !moved {
            break;
        }
        moved_any = true;
    }
    moved_any
}

/// Multilevel phase starting from `membership` on `g`.
fn multilevel(g: &WeightedGraph, membership: &mut [usize]) {
    let count = renumber(membership);
    let mut level = g.aggregate(membership, count);
    loop {
        let mut comm: Vec<usize> = (0..level.node_count()).collect();
        if !local_moves(&level, &mut comm) {
            break;
        }
        let count = renumber(&mut comm);
        for c in membership.iter_mut() {
            *c = comm[*c];
        }
        level = level.aggregate(&comm, count);
    }
}

/// Louvain on an arbitrary weighted graph.
pub fn louvain_weighted(g: &WeightedGraph) -> Partition {
    let n = g.node_count();
    let mut membership: Vec<usize> = (0..n).collect();
    if g.total_weight() <= 0.0 {
        return Partition {
            communities: membership,
            modularity: 0.0,
        };
    }
    let mut best_q = f64::NEG_INFINITY;
    loop {
        multilevel(g, &mut membership);
        let refined = local_moves(g, &mut membership);
        renumber(&mut membership);
        let q = modularity(g, &membership);
        if !refined || q <= best_q + MIN_GAIN {
            break;
        }
        best_q = q;
    }
    renumber(&mut membership);
    Partition {
        modularity: modularity(g, &membership),
        communities: membership,
    }
}

/// Louvain on the weighted projection.
pub fn louvain(p: &WeightedProjection) -> Partition {
    louvain_weighted(&WeightedGraph::from(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clique_edges(nodes: &[usize]) -> Vec<(usize, usize, f64)> {
        let mut e = Vec::new();
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                e.push((a, b, 1.0));
            }
        }
        e
    }

    #[test]
    fn two_cliques_with_bridge() {
        let mut e = clique_edges(&[0, 1, 2, 3]);
        e.extend(clique_edges(&[4, 5, 6, 7]));
        e.push((3, 4, 1.0));
        let p = louvain_weighted(&WeightedGraph::from_edges(8, e));
        assert_eq!(p.communities, [0, 0, 0, 0, 1, 1, 1, 1]);
        // W_c = 6.5 edges? no: each clique has 6 internal edges, m = 13
        // Q = 2 * (6/13 - (13/26)^2) = 12/13 - 1/2
        assert!((p.modularity - (12.0 / 13.0 - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn single_clique_is_one_community() {
        let p = louvain_weighted(&WeightedGraph::from_edges(
            5,
            clique_edges(&[0, 1, 2, 3, 4]),
        ));
        assert_eq!(p.communities, [0; 5]);
        assert!(p.modularity.abs() < 1e-12);
    }

    #[test]
    fn edgeless_graph_is_singletons() {
        let p = louvain_weighted(&WeightedGraph::new(3));
        assert_eq!(p.communities, [0, 1, 2]);
        assert_eq!(p.modularity, 0.0);
    }

    #[test]
    fn isolated_nodes_stay_alone() {
        let mut e = clique_edges(&[0, 1, 2]);
        e.extend(clique_edges(&[4, 5, 6]));
        let p = louvain_weighted(&WeightedGraph::from_edges(7, e));
        assert_eq!(p.communities, [0, 0, 0, 1, 2, 2, 2]);
        assert!((p.modularity - 0.5).abs() < 1e-12);
    }

    #[test]
    fn aggregation_preserves_modularity() {
        let mut e = clique_edges(&[0, 1, 2]);
        e.extend([(2, 3, 2.0), (3, 4, 1.0), (4, 5, 3.0), (5, 3, 1.0)]);
        let g = WeightedGraph::from_edges(6, e);
        let comm = [0, 0, 0, 1, 1, 1];
        let agg = g.aggregate(&comm, 2);
        assert!((modularity(&g, &comm) - modularity(&agg, &[0, 1])).abs() < 1e-12);
        assert!((g.total_weight() - agg.total_weight()).abs() < 1e-12);
    }
}
