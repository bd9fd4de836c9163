//! Clustering agreement and intensity-recovery metrics.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{PpsbmError, Result};
use crate::intensity::{Intensity, PairLayout};
use crate::kernel::regular_grid;

/// Largest `Q` for which alignment searches every permutation.
pub const EXHAUSTIVE_ALIGNMENT_MAX: usize = 8;

pub const DEFAULT_RISK_GRID: usize = 1024;

fn choose2(x: u64) -> f64 {
    (x as f64) * (x as f64 - 1.0) / 2.0
}

/// Hubert–Arabie adjusted Rand index between two labelings.
///
/// Two single-cluster partitions (or any pair with no chance variation) score 1.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(PpsbmError::LengthMismatch { left: a.len(), right: b.len() });
    }
    let n = a.len() as u64;
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![0u64; ka * kb];
    for (&x, &y) in a.iter().zip(b) {
        table[x * kb + y] += 1;
    }
    let index: f64 = table.iter().map(|&c| choose2(c)).sum();
    let rows: f64 = (0..ka).map(|x| choose2(table[x * kb..(x + 1) * kb].iter().sum())).sum();
    let cols: f64 = (0..kb).map(|y| choose2((0..ka).map(|x| table[x * kb + y]).sum())).sum();
    let total = choose2(n);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = rows * cols / total;
    let max_index = 0.5 * (rows + cols);
    if max_index == expected {
        return Ok(1.0);
    }
    Ok((index - expected) / (max_index - expected))
}

/// `‖f - g‖₂` on `[0, T]` by the trapezoid rule on `grid_points` points.
pub fn l2_risk<F, G>(estimate: &F, truth: &G, horizon: f64, grid_points: usize) -> f64
where
    F: Intensity + ?Sized,
    G: Intensity + ?Sized,
{
    let grid = regular_grid(horizon, grid_points.max(2));
    let sq: Vec<f64> = grid.iter().map(|&t| (estimate.value(t) - truth.value(t)).powi(2)).collect();
    let h = horizon / (sq.len() - 1) as f64;
    let inner: f64 = sq[1..sq.len() - 1].iter().sum();
    (h * (inner + 0.5 * (sq[0] + sq[sq.len() - 1]))).sqrt()
}

/// Per-pair risks after label alignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    /// `permutation[q]` is the estimated group matched to true group `q`.
    pub permutation: Vec<usize>,
    /// `risks[q][l]` compares the true `α^(q,l)` with the aligned estimate.
    pub risks: Vec<Vec<f64>>,
    pub total: f64,
}

/// Pairwise risk table `cost[s_est][s_true]` over layout slots.
fn risk_table<F: Intensity, G: Intensity>(
    estimate: &[F],
    truth: &[G],
    horizon: f64,
    grid_points: usize,
) -> Vec<Vec<f64>> {
    estimate.iter().map(|e| truth.iter().map(|t| l2_risk(e, t, horizon, grid_points)).collect()).collect()
}

fn permutation_cost(perm: &[usize], layout: PairLayout, table: &[Vec<f64>]) -> f64 {
    layout.pairs().iter().map(|&(q, l)| table[layout.index(perm[q], perm[l])][layout.index(q, l)]).sum()
}

/// Permutation minimizing the summed risk; exhaustive up to
/// [`EXHAUSTIVE_ALIGNMENT_MAX`] groups, greedy on the diagonal pairs beyond.
fn best_permutation(layout: PairLayout, table: &[Vec<f64>]) -> Vec<usize> {
    let groups = layout.groups;
    if groups <= EXHAUSTIVE_ALIGNMENT_MAX {
        let mut best: Vec<usize> = (0..groups).collect();
        let mut best_cost = permutation_cost(&best, layout, table);
        for perm in (0..groups).permutations(groups) {
            let cost = permutation_cost(&perm, layout, table);
            if cost < best_cost {
                best_cost = cost;
                best = perm;
            }
        }
        return best;
    }
    let mut perm = vec![usize::MAX; groups];
    let mut used = vec![false; groups];
    let mut candidates: Vec<(f64, usize, usize)> = (0..groups)
        .flat_map(|q| (0..groups).map(move |a| (q, a)))
        .map(|(q, a)| (table[layout.index(a, a)][layout.index(q, q)], q, a))
        .collect();
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0));
    for (_, q, a) in candidates {
        if perm[q] == usize::MAX && !used[a] {
            perm[q] = a;
            used[a] = true;
        }
    }
    perm
}

/// Aligns estimated groups to true groups and reports the per-pair risks.
///
/// Both slices are in [`PairLayout`] slot order for the same `Q` and directedness.
pub fn risk_report<F: Intensity, G: Intensity>(
    estimate: &[F],
    truth: &[G],
    layout: PairLayout,
    horizon: f64,
    grid_points: usize,
) -> Result<RiskReport> {
    if estimate.len() != layout.len() || truth.len() != layout.len() {
        return Err(PpsbmError::LengthMismatch { left: estimate.len(), right: truth.len() });
    }
    let table = risk_table(estimate, truth, horizon, grid_points);
    let permutation = best_permutation(layout, &table);
    let groups = layout.groups;
    let mut risks = vec![vec![0.0; groups]; groups];
    for q in 0..groups {
        for l in 0..groups {
            risks[q][l] = table[layout.index(permutation[q], permutation[l])][layout.index(q, l)];
        }
    }
    let total = permutation_cost(&permutation, layout, &table);
    Ok(RiskReport { permutation, risks, total })
}

/// Relabels 0-based `labels` through `permutation` (estimated → true group).
pub fn relabel(labels: &[usize], permutation: &[usize]) -> Vec<usize> {
    let mut inverse = vec![0; permutation.len()];
    for (q, &a) in permutation.iter().enumerate() {
        inverse[a] = q;
    }
    labels.iter().map(|&z| inverse[z]).collect()
}
