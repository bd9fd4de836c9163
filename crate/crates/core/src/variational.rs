//! Soft memberships `τ` and the sufficient statistics they induce.

use serde::{Deserialize, Serialize};

use crate::error::{PpsbmError, Result};
use crate::events::EventStream;
use crate::intensity::PairLayout;

/// Row-stochastic `n × Q` matrix of membership weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalState {
    n: usize,
    groups: usize,
    /// Row-major weights.
    weights: Vec<f64>,
}

impl VariationalState {
    pub fn new(n: usize, groups: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != n * groups || groups == 0 {
            return Err(PpsbmError::InvalidConfig(format!(
                "membership matrix needs {n}×{groups} entries, got {}",
                weights.len()
            )));
        }
        let state = Self { n, groups, weights };
        for i in 0..n {
            let row = state.row(i);
            if row.iter().any(|w| !(*w >= 0.0)) {
                return Err(PpsbmError::InvalidConfig(format!("row {i} has a negative weight")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(PpsbmError::InvalidConfig(format!("row {i} sums to {s}")));
            }
        }
        Ok(state)
    }

    /// Indicator matrix of 0-based `labels`.
    pub fn one_hot(labels: &[usize], groups: usize) -> Self {
        let n = labels.len();
        let mut weights = vec![0.0; n * groups];
        for (i, &z) in labels.iter().enumerate() {
            assert!(z < groups, "label {z} out of range for {groups} groups");
            weights[i * groups + z] = 1.0;
        }
        Self { n, groups, weights }
    }

    pub fn uniform(n: usize, groups: usize) -> Self {
        Self { n, groups, weights: vec![1.0 / groups as f64; n * groups] }
    }

    pub(crate) fn from_raw(n: usize, groups: usize, weights: Vec<f64>) -> Self {
        debug_assert_eq!(weights.len(), n * groups);
        Self { n, groups, weights }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    #[inline]
    pub fn get(&self, i: usize, q: usize) -> f64 {
        self.weights[i * self.groups + q]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.groups..(i + 1) * self.groups]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    /// Column sums `Σ_i τ^{i,q}`.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.groups];
        for i in 0..self.n {
            for (q, w) in self.row(i).iter().enumerate() {
                sums[q] += w;
            }
        }
        sums
    }

    /// Maximum a posteriori labels; ties resolve to the lowest group index.
    pub fn map_labels(&self) -> Vec<usize> {
        (0..self.n)
            .map(|i| {
                let row = self.row(i);
                let mut best = 0;
                for q in 1..self.groups {
                    if row[q] > row[best] {
                        best = q;
                    }
                }
                best
            })
            .collect()
    }

    /// Column `q` of the result is column `perm[q]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        let mut weights = vec![0.0; self.weights.len()];
        for i in 0..self.n {
            for q in 0..self.groups {
                weights[i * self.groups + q] = self.get(i, perm[q]);
            }
        }
        Self { n: self.n, groups: self.groups, weights }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.weights.iter().zip(&other.weights).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// `π̂_q = (1/n) Σ_i τ^{i,q}`.
pub fn update_pi(tau: &VariationalState) -> Vec<f64> {
    let n = tau.n() as f64;
    tau.column_sums().into_iter().map(|s| s / n).collect()
}

/// Pair weight `τ_m^(q,l)` of an event between `i` and `j` for one layout slot.
#[inline]
pub fn pair_weight(tau: &VariationalState, directed: bool, i: usize, j: usize, q: usize, l: usize) -> f64 {
    if directed || q == l {
        tau.get(i, q) * tau.get(j, l)
    } else {
        tau.get(i, q) * tau.get(j, l) + tau.get(i, l) * tau.get(j, q)
    }
}

/// Variational dyad masses and weighted event counts per group pair.
///
/// Undirected pairs `q < l` pool both orientations, so every quantity summed
/// over slots reproduces the totals (`r` dyads, `M` events).
#[derive(Debug, Clone, PartialEq)]
pub struct SufficientStats {
    pub layout: PairLayout,
    pub d_max: u32,
    /// `Y^(q,l)` per slot.
    pub dyad_mass: Vec<f64>,
    /// `N^(q,l)(E)` on the `2^d_max` finest cells, per slot.
    pub cell_counts: Vec<Vec<f64>>,
    /// `τ_m^(q,l)` per slot, in event order.
    pub event_weights: Vec<Vec<f64>>,
}

impl SufficientStats {
    pub fn total_weight(&self, slot: usize) -> f64 {
        self.event_weights[slot].iter().sum()
    }
}

pub fn compute_stats(stream: &EventStream, tau: &VariationalState, d_max: u32) -> SufficientStats {
    assert_eq!(stream.n(), tau.n(), "membership matrix does not match node count");
    let groups = tau.groups();
    let directed = stream.directed();
    let layout = PairLayout::new(groups, directed);
    let pairs = layout.pairs();

    let sums = tau.column_sums();
    let mut cross = vec![0.0; groups * groups];
    for i in 0..tau.n() {
        let row = tau.row(i);
        for q in 0..groups {
            for l in 0..groups {
                cross[q * groups + l] += row[q] * row[l];
            }
        }
    }
    let dyad_mass = pairs
        .iter()
        .map(|&(q, l)| {
            let ordered = sums[q] * sums[l] - cross[q * groups + l];
            if !directed && q == l {
                0.5 * ordered
            } else {
                ordered
            }
        })
        .map(|y| y.max(0.0))
        .collect();

    let cells = 1usize << d_max;
    let mut cell_counts = vec![vec![0.0; cells]; pairs.len()];
    let mut event_weights = vec![Vec::with_capacity(stream.len()); pairs.len()];
    for ev in stream.events() {
        let cell = stream.cell_of(ev.time, d_max);
        for (slot, &(q, l)) in pairs.iter().enumerate() {
            let w = pair_weight(tau, directed, ev.sender, ev.receiver, q, l);
            cell_counts[slot][cell] += w;
            event_weights[slot].push(w);
        }
    }
    SufficientStats { layout, d_max, dyad_mass, cell_counts, event_weights }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::{dyads, Event};

    fn toy_stream(directed: bool) -> EventStream {
        let events = vec![
            Event { time: 0.1, sender: 0, receiver: 1 },
            Event { time: 0.3, sender: 2, receiver: 1 },
            Event { time: 0.55, sender: 1, receiver: 3 },
            Event { time: 0.7, sender: 3, receiver: 0 },
            Event { time: 0.9, sender: 0, receiver: 2 },
        ];
        EventStream::new(4, 1.0, directed, events).unwrap()
    }

    fn toy_tau() -> VariationalState {
        VariationalState::new(
            4,
            2,
            vec![0.9, 0.1, 0.3, 0.7, 0.5, 0.5, 0.2, 0.8],
        )
        .unwrap()
    }

    /// Triple loop over dyads and group pairs, full Q×Q then folded to slots.
    fn brute_force(stream: &EventStream, tau: &VariationalState, d_max: u32) -> (Vec<f64>, Vec<Vec<f64>>) {
        let g = tau.groups();
        let layout = PairLayout::new(g, stream.directed());
        let mut y = vec![0.0; layout.len()];
        let mut cells = vec![vec![0.0; 1 << d_max]; layout.len()];
        for (i, j) in dyads(stream.n(), stream.directed()) {
            for q in 0..g {
                for l in 0..g {
                    y[layout.index(q, l)] += tau.get(i, q) * tau.get(j, l);
                }
            }
        }
        for ev in stream.events() {
            let c = stream.cell_of(ev.time, d_max);
            for q in 0..g {
                for l in 0..g {
                    cells[layout.index(q, l)][c] += tau.get(ev.sender, q) * tau.get(ev.receiver, l);
                }
            }
        }
        (y, cells)
    }

    #[test]
    fn matches_brute_force() {
        for &directed in &[true, false] {
            let stream = toy_stream(directed);
            let tau = toy_tau();
            let stats = compute_stats(&stream, &tau, 2);
            let (y, cells) = brute_force(&stream, &tau, 2);
            for slot in 0..y.len() {
                assert!((stats.dyad_mass[slot] - y[slot]).abs() < 1e-12);
                for c in 0..4 {
                    assert!((stats.cell_counts[slot][c] - cells[slot][c]).abs() < 1e-12);
                }
            }
            let total_y: f64 = stats.dyad_mass.iter().sum();
            assert!((total_y - stream.num_dyads() as f64).abs() < 1e-9);
            let total_w: f64 = (0..y.len()).map(|s| stats.total_weight(s)).sum();
            assert!((total_w - stream.len() as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn single_group_counts() {
        let stream = toy_stream(true);
        let tau = VariationalState::uniform(4, 1);
        let stats = compute_stats(&stream, &tau, 1);
        assert_eq!(stats.dyad_mass, vec![12.0]);
        assert_eq!(stats.cell_counts[0], vec![2.0, 3.0]);
    }

    #[test]
    fn one_hot_reproduces_true_counts() {
        let stream = toy_stream(false);
        let labels = [0, 1, 0, 1];
        let stats = compute_stats(&stream, &VariationalState::one_hot(&labels, 2), 0);
        // pairs (0,0), (0,1), (1,1): one dyad within each group, four across
        assert_eq!(stats.dyad_mass, vec![1.0, 4.0, 1.0]);
        assert_eq!(stats.cell_counts, vec![vec![1.0], vec![3.0], vec![1.0]]);
    }

    #[test]
    fn pi_update() {
        let tau = VariationalState::one_hot(&[0, 0, 1], 2);
        let pi = update_pi(&tau);
        assert!((pi[0] - 2.0 / 3.0).abs() < 1e-15 && (pi[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(update_pi(&VariationalState::uniform(5, 4)), vec![0.25; 4]);
    }

    #[test]
    fn map_labels_tie_lowest() {
        let tau = VariationalState::new(2, 2, vec![0.5, 0.5, 0.2, 0.8]).unwrap();
        assert_eq!(tau.map_labels(), vec![0, 1]);
    }

    #[test]
    fn rejects_invalid_rows() {
        assert!(VariationalState::new(1, 2, vec![0.5, 0.6]).is_err());
        assert!(VariationalState::new(1, 2, vec![-0.5, 1.5]).is_err());
    }
}
