//! Starting classifications for the VEM runs.
//!
//! Each aggregation depth `d ∈ 0..=l_part` gives one k-means classification of
//! the nodes' per-cell interaction counts; every base classification is then
//! copied `n_perturb` times with a fraction of labels redrawn at random.

use rand::seq::index::sample;
use rand::Rng as _;

use crate::error::{PpsbmError, Result};
use crate::events::EventStream;
use crate::rng::Rng;
use crate::variational::VariationalState;

/// Per-node feature rows at aggregation `depth`.
///
/// Directed streams concatenate the outgoing and incoming count rows; undirected
/// streams use the symmetric count row.
pub fn node_features(stream: &EventStream, depth: u32) -> Vec<Vec<f64>> {
    let n = stream.n();
    let cells = 1usize << depth;
    let width = if stream.directed() { 2 * n * cells } else { n * cells };
    let mut rows = vec![vec![0.0; width]; n];
    for ev in stream.events() {
        let c = stream.cell_of(ev.time, depth);
        let (i, j) = (ev.sender, ev.receiver);
        rows[i][j * cells + c] += 1.0;
        if stream.directed() {
            rows[j][n * cells + i * cells + c] += 1.0;
        } else {
            rows[j][i * cells + c] += 1.0;
        }
    }
    rows
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, c) in centers.iter().enumerate() {
        let d = sq_dist(point, c);
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

/// Within-cluster sum of squared distances of a labeling.
pub fn within_cluster_ss(points: &[Vec<f64>], labels: &[usize], k: usize) -> f64 {
    let dim = points.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &z) in points.iter().zip(labels) {
        counts[z] += 1;
        for (s, x) in sums[z].iter_mut().zip(p) {
            *s += x;
        }
    }
    points
        .iter()
        .zip(labels)
        .map(|(p, &z)| {
            let c = counts[z] as f64;
            p.iter().zip(&sums[z]).map(|(x, s)| (x - s / c).powi(2)).sum::<f64>()
        })
        .sum()
}

/// Best of `restarts` k-means runs by within-cluster sum of squares; ties keep the earliest.
pub fn kmeans_restarts(points: &[Vec<f64>], k: usize, max_iter: usize, restarts: usize, rng: &mut Rng) -> Vec<usize> {
    let mut best = kmeans(points, k, max_iter, rng);
    let mut best_ss = within_cluster_ss(points, &best, k);
    for _ in 1..restarts {
        let labels = kmeans(points, k, max_iter, rng);
        let ss = within_cluster_ss(points, &labels, k);
        if ss < best_ss {
            best = labels;
            best_ss = ss;
        }
    }
    best
}

/// Lloyd's k-means with k-means++ seeding. Returns 0-based labels.
///
/// Clusters that empty out keep their previous center.
pub fn kmeans(points: &[Vec<f64>], k: usize, max_iter: usize, rng: &mut Rng) -> Vec<usize> {
    let n = points.len();
    assert!(k >= 1 && k <= n, "k = {k} must lie in 1..={n}");
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(points[rng.gen_range(0..n)].clone());
    let mut dist: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let u = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (idx, d) in dist.iter().enumerate() {
                acc += d;
                if u < acc {
                    chosen = idx;
                    break;
                }
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centers.push(points[pick].clone());
        for (idx, p) in points.iter().enumerate() {
            dist[idx] = dist[idx].min(sq_dist(p, &centers[centers.len() - 1]));
        }
    }

    let mut labels: Vec<usize> = points.iter().map(|p| nearest(p, &centers).0).collect();
    for _ in 0..max_iter {
        let dim = points[0].len();
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &z) in points.iter().zip(&labels) {
            counts[z] += 1;
            for (s, x) in sums[z].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centers).0).collect();
        if next == labels {
            break;
        }
        labels = next;
    }
    labels
}

/// Redraws the labels of `round(fraction · n)` randomly chosen nodes uniformly.
pub fn perturb_labels(labels: &[usize], groups: usize, fraction: f64, rng: &mut Rng) -> Vec<usize> {
    let n = labels.len();
    let count = ((fraction * n as f64).round() as usize).min(n);
    let mut out = labels.to_vec();
    for idx in sample(rng, n, count).into_iter() {
        out[idx] = rng.gen_range(0..groups);
    }
    out
}

/// Controls of the starting classifications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitOptions {
    /// Aggregation depths `0..=l_part`.
    pub l_part: u32,
    pub n_perturb: usize,
    pub perc_perturb: f64,
    pub kmeans_iter: usize,
    pub kmeans_restarts: usize,
}

/// Candidate initializations: `(l_part + 1) · (1 + n_perturb)` one-hot states.
pub fn init_classifications(
    stream: &EventStream,
    groups: usize,
    opts: &InitOptions,
    rng: &mut Rng,
) -> Result<Vec<VariationalState>> {
    let InitOptions { l_part, n_perturb, perc_perturb, kmeans_iter, kmeans_restarts: restarts } = *opts;
    if groups > stream.n() {
        return Err(PpsbmError::TooManyGroups { groups, nodes: stream.n() });
    }
    if groups == 0 {
        return Err(PpsbmError::InvalidConfig("need at least one group".into()));
    }
    let mut out = Vec::with_capacity((l_part as usize + 1) * (1 + n_perturb));
    for depth in 0..=l_part {
        let features = node_features(stream, depth);
        let base = kmeans_restarts(&features, groups, kmeans_iter, restarts.max(1), rng);
        out.push(VariationalState::one_hot(&base, groups));
        for _ in 0..n_perturb {
            let perturbed = perturb_labels(&base, groups, perc_perturb, rng);
            out.push(VariationalState::one_hot(&perturbed, groups));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::Event;
    use crate::rng;

    fn two_cliques() -> EventStream {
        let mut events = Vec::new();
        let mut t = 0.0;
        for block in [0usize, 5] {
            for i in block..block + 5 {
                for j in block..block + 5 {
                    if i < j {
                        for _ in 0..3 {
                            t += 0.001;
                            events.push(Event { time: t, sender: i, receiver: j });
                        }
                    }
                }
            }
        }
        EventStream::new(10, 1.0, false, events).unwrap()
    }

    #[test]
    fn separates_disconnected_cliques() {
        let stream = two_cliques();
        let labels = kmeans(&node_features(&stream, 0), 2, 50, &mut rng::from_seed(5));
        assert!(labels[..5].iter().all(|&z| z == labels[0]));
        assert!(labels[5..].iter().all(|&z| z == labels[5]));
        assert_ne!(labels[0], labels[5]);
    }

    #[test]
    fn zero_perturbation_is_identity() {
        let base = vec![0, 1, 1, 0, 2];
        assert_eq!(perturb_labels(&base, 3, 0.0, &mut rng::from_seed(1)), base);
    }

    fn opts(l_part: u32, n_perturb: usize, perc_perturb: f64) -> InitOptions {
        InitOptions { l_part, n_perturb, perc_perturb, kmeans_iter: 50, kmeans_restarts: 3 }
    }

    #[test]
    fn restarts_never_worse() {
        let stream = two_cliques();
        let f = node_features(&stream, 0);
        let single = kmeans(&f, 3, 50, &mut rng::from_seed(4));
        let best = kmeans_restarts(&f, 3, 50, 5, &mut rng::from_seed(4));
        assert!(within_cluster_ss(&f, &best, 3) <= within_cluster_ss(&f, &single, 3));
    }

    #[test]
    fn candidate_count() {
        let stream = two_cliques();
        let inits = init_classifications(&stream, 2, &opts(2, 2, 0.2), &mut rng::from_seed(1)).unwrap();
        assert_eq!(inits.len(), 9);
    }

    #[test]
    fn too_many_groups() {
        let stream = two_cliques();
        let err = init_classifications(&stream, 11, &opts(0, 0, 0.0), &mut rng::from_seed(1)).unwrap_err();
        assert!(matches!(err, PpsbmError::TooManyGroups { groups: 11, nodes: 10 }));
    }

    #[test]
    fn directed_features_concatenate() {
        let stream = EventStream::new(3, 1.0, true, vec![Event { time: 0.6, sender: 0, receiver: 2 }]).unwrap();
        let f = node_features(&stream, 1);
        assert_eq!(f[0].len(), 12);
        assert_eq!(f[0][2 * 2 + 1], 1.0);
        assert_eq!(f[2][3 * 2 + 1], 1.0);
    }
}
