use std::collections::HashSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{assortativity, party_classes, NetworkError, WeightedProjection};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullModelParams {
    pub runs: usize,
    pub seed: u64,
    /// Accepted swaps per run, as a multiple of the edge count.
    pub swaps_per_edge: usize,
    /// Run the independent rewirings on the rayon pool. Output does not depend on it.
    pub parallel: bool,
}

impl Default for NullModelParams {
    fn default() -> Self {
        NullModelParams {
            runs: 1000,
            seed: 42,
            swaps_per_edge: 10,
            parallel: true,
        }
    }
}

/// Empirical assortativity against its degree-preserving null distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomophilyReport {
    pub empirical_r: f64,
    pub null_mean: f64,
    /// Sample standard deviation over runs (0 for a single run).
    pub null_std: f64,
    pub runs: usize,
    /// Set when no legal swap exists, in which case the null equals the empirical value.
    pub rigid: bool,
}

impl HomophilyReport {
    /// How many null standard deviations the empirical value sits above the null mean.
    pub fn z_score(&self) -> Option<f64> {
        (self.null_std > 0.0).then(|| (self.empirical_r - self.null_mean) / self.null_std)
    }
}

/// Applies `target` accepted double-edge swaps to a simple undirected edge list.
///
/// A swap picks edges (a,b), (c,d) and replaces them by (a,d), (c,b) or, with
/// equal probability, (a,c), (b,d); swaps creating a self-loop or a repeated
/// edge are rejected. Gives up after `100 * target + 1000` attempts. Returns
/// the number of accepted swaps.
pub fn double_edge_swaps<R: Rng>(
    edges: &mut [(usize, usize)],
    target: usize,
    rng: &mut R,
) -> usize {
    let m = edges.len();
    if m < 2 || target == 0 {
        return 0;
    }
    let norm = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut present: HashSet<(usize, usize)> = edges.iter().map(|&(a, b)| norm(a, b)).collect();
    let max_attempts = target.saturating_mul(100).saturating_add(1000);
    let mut accepted = 0;
    for _ in 0..max_attempts {
        if accepted == target {
            break;
        }
        let i = rng.random_range(0..m);
        let j = rng.random_range(0..m);
        let flip = rng.random::<bool>();
        if i == j {
            continue;
        }
        let (a, b) = edges[i];
        let (mut c, mut d) = edges[j];
        if flip {
            std::mem::swap(&mut c, &mut d);
        }
        // (a,b),(c,d) -> (a,d),(c,b)
        if a == d || c == b {
            continue;
        }
        let (e1, e2) = (norm(a, d), norm(c, b));
        if e1 == e2 || present.contains(&e1) || present.contains(&e2) {
            continue;
        }
        present.remove(&norm(a, b));
        present.remove(&norm(c, d));
        present.insert(e1);
        present.insert(e2);
        edges[i] = e1;
        edges[j] = e2;
        accepted += 1;
    }
    accepted
}

/// Run `run` draws from stream `run` of the ChaCha generator keyed by `seed`.
fn run_rng(seed: u64, run: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run as u64);
    rng
}

/// Null-model homophily for an arbitrary edge list and node classes.
pub fn configuration_null_edges(
    edges: &[(usize, usize)],
    classes: &[usize],
    params: &NullModelParams,
) -> Result<HomophilyReport, NetworkError> {
    if params.runs == 0 {
        return Err(NetworkError::NoRuns);
    }
    if let Some(&(u, v)) = edges
        .iter()
        .find(|(u, v)| *u >= classes.len() || *v >= classes.len())
    {
        return Err(NetworkError::LabelCount {
            labels: classes.len(),
            nodes: u.max(v) + 1,
        });
    }
    let empirical_r = assortativity(edges, classes)?;
    let target = params.swaps_per_edge * edges.len();

    let one_run = |run: usize| -> (f64, usize) {
        let mut rng = run_rng(params.seed, run);
        let mut rewired = edges.to_vec();
        let accepted = double_edge_swaps(&mut rewired, target, &mut rng);
        // degree sequence and class endpoint totals are preserved, so this cannot be degenerate
        let r = assortativity(&rewired, classes).expect("rewiring preserves mixing support");
        (r, accepted)
    };
    let samples: Vec<(f64, usize)> = if params.parallel {
        (0..params.runs).into_par_iter().map(one_run).collect()
    } else {
        (0..params.runs).map(one_run).collect()
    };

    if samples.iter().all(|&(_, acc)| acc == 0) {
        return Ok(HomophilyReport {
            empirical_r,
            null_mean: empirical_r,
            null_std: 0.0,
            runs: params.runs,
            rigid: true,
        });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let std = if samples.len() > 1 {
        (samples.iter().map(|s| (s.0 - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(HomophilyReport {
        empirical_r,
        null_mean: mean,
        null_std: std,
        runs: params.runs,
        rigid: false,
    })
}

/// Party homophily of the projection against degree-preserving rewirings.
pub fn configuration_null(
    p: &WeightedProjection,
    params: &NullModelParams,
) -> Result<HomophilyReport, NetworkError> {
    configuration_null_edges(&p.unweighted_edges(), &party_classes(p), params)
}

/// Writes `term,empirical_r,null_mean,null_std,runs` rows.
pub fn write_homophily_csv<W: Write>(out: W, rows: &[(u32, HomophilyReport)]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["term", "empirical_r", "null_mean", "null_std", "runs"])?;
    for (term, r) in rows {
        w.write_record([
            term.to_string(),
            r.empirical_r.to_string(),
            r.null_mean.to_string(),
            r.null_std.to_string(),
            r.runs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_degrees(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
        let mut d = vec![0; n];
        for &(a, b) in edges {
            d[a] += 1;
            d[b] += 1;
        }
        d.sort_unstable();
        d
    }

    #[test]
    fn swaps_keep_graph_simple_and_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let orig: Vec<(usize, usize)> = (0..12)
            .flat_map(|i| [(i, (i + 1) % 12), (i, (i + 5) % 12)])
            .collect();
        let mut e = orig.clone();
        let acc = double_edge_swaps(&mut e, 200, &mut rng);
        assert_eq!(acc, 200);
        assert_eq!(sorted_degrees(12, &e), sorted_degrees(12, &orig));
        let set: HashSet<_> = e.iter().collect();
        assert_eq!(set.len(), e.len());
        assert!(e.iter().all(|(a, b)| a != b));
    }

    #[test]
    fn four_cycle_with_one_outsider_is_constant() {
        // every rewiring of a 4-cycle is a 4-cycle; with one node in its own
        // party the mixing matrix never changes
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0)];
        let classes = [0, 0, 0, 1];
        let params = NullModelParams {
            runs: 50,
            ..NullModelParams::default()
        };
        let rep = configuration_null_edges(&edges, &classes, &params).unwrap();
        assert!(!rep.rigid);
        assert!((rep.null_mean - rep.empirical_r).abs() < 1e-12);
        assert!(rep.null_std < 1e-12);
    }

    #[test]
    fn single_edge_is_rigid() {
        let rep =
            configuration_null_edges(&[(0, 1)], &[0, 1], &NullModelParams::default()).unwrap();
        assert!(rep.rigid);
        assert_eq!(rep.null_mean, rep.empirical_r);
        assert_eq!(rep.null_std, 0.0);
        // a triangle admits no legal swap either
        let rep = configuration_null_edges(
            &[(0, 1), (1, 2), (0, 2)],
            &[0, 1, 1],
            &NullModelParams {
                runs: 3,
                ..NullModelParams::default()
            },
        )
        .unwrap();
        assert!(rep.rigid);
    }

    #[test]
    fn parallel_and_serial_agree() {
        let edges: Vec<(usize, usize)> = (0..10)
            .flat_map(|i| [(i, (i + 1) % 10), (i, (i + 3) % 10)])
            .collect();
        let classes: Vec<usize> = (0..10).map(|i| i % 2).collect();
        let mut params = NullModelParams {
            runs: 20,
            ..NullModelParams::default()
        };
        let a = configuration_null_edges(&edges, &classes, &params).unwrap();
        params.parallel = false;
        let b = configuration_null_edges(&edges, &classes, &params).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.runs, 20);
    }

    #[test]
    fn rejects_zero_runs_and_bad_labels() {
        let p = NullModelParams {
            runs: 0,
            ..NullModelParams::default()
        };
        assert_eq!(
            configuration_null_edges(&[(0, 1)], &[0, 1], &p).unwrap_err(),
            NetworkError::NoRuns
        );
        assert!(matches!(
            configuration_null_edges(&[(0, 3)], &[0, 1], &NullModelParams::default()),
            Err(NetworkError::LabelCount { .. })
        ));
    }
}
