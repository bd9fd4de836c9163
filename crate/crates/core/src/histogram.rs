//! Adaptive histogram intensity estimation on regular dyadic partitions.
//!
//! Weighted event counts are accumulated on the finest grid of `2^d_max`
//! cells. For each group pair the resolution `d̂` minimizes
//!
//! ```text
//! 2^d { -Σ_{E ∈ 𝓔_d} N(E)² + 2^(d_max+1) · max_{E' ∈ 𝓔_dmax} N(E') }
//! ```
//!
//! and the estimate is `N(E) / (Y |E|)` on the selected cells.

use serde::{Deserialize, Serialize};

use crate::intensity::Intensity;

/// Piecewise-constant estimate on `2^depth` equal cells of `[0, T)`.
///
/// The JSON form also lists the cell boundaries; they are ignored on input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "HistogramRecord", from = "HistogramRecord")]
pub struct HistogramEstimate {
    pub depth: u32,
    pub heights: Vec<f64>,
    pub horizon: f64,
}

#[derive(Serialize, Deserialize)]
struct HistogramRecord {
    depth: u32,
    heights: Vec<f64>,
    #[serde(default)]
    boundaries: Vec<f64>,
    #[serde(rename = "T")]
    horizon: f64,
}

impl From<HistogramEstimate> for HistogramRecord {
    fn from(h: HistogramEstimate) -> Self {
        let boundaries = h.boundaries();
        Self { depth: h.depth, heights: h.heights, boundaries, horizon: h.horizon }
    }
}

impl From<HistogramRecord> for HistogramEstimate {
    fn from(r: HistogramRecord) -> Self {
        Self { depth: r.depth, heights: r.heights, horizon: r.horizon }
    }
}

impl HistogramEstimate {
    pub fn zero(horizon: f64) -> Self {
        Self { depth: 0, heights: vec![0.0], horizon }
    }

    pub fn cell_width(&self) -> f64 {
        self.horizon / self.heights.len() as f64
    }

    /// Cell boundaries `0 = b_0 < b_1 < ... < b_K = T`.
    pub fn boundaries(&self) -> Vec<f64> {
        let w = self.cell_width();
        (0..=self.heights.len()).map(|k| k as f64 * w).collect()
    }

    pub fn integral(&self) -> f64 {
        self.heights.iter().sum::<f64>() * self.cell_width()
    }
}

impl Intensity for HistogramEstimate {
    fn value(&self, t: f64) -> f64 {
        let k = self.heights.len();
        let idx = (t / self.horizon * k as f64).floor();
        let idx = if idx <= 0.0 { 0 } else { (idx as usize).min(k - 1) };
        self.heights[idx]
    }

    fn cumulative(&self, t: f64) -> f64 {
        let w = self.cell_width();
        let mut acc = 0.0;
        for (k, h) in self.heights.iter().enumerate() {
            let lo = k as f64 * w;
            if t <= lo {
                break;
            }
            acc += h * (t.min(lo + w) - lo);
        }
        acc
    }

    fn upper_bound(&self) -> f64 {
        self.heights.iter().copied().fold(0.0, f64::max)
    }
}

/// Depth of the finest grid; `finest.len()` must be a power of two.
pub fn finest_depth(finest: &[f64]) -> u32 {
    assert!(finest.len().is_power_of_two(), "finest grid length {} is not a power of two", finest.len());
    finest.len().trailing_zeros()
}

/// Sums adjacent blocks of `2^(d_max - depth)` finest cells.
pub fn cell_counts_at_depth(finest: &[f64], depth: u32) -> Vec<f64> {
    let d_max = finest_depth(finest);
    assert!(depth <= d_max, "depth {depth} exceeds finest depth {d_max}");
    let block = 1usize << (d_max - depth);
    finest.chunks(block).map(|c| c.iter().sum()).collect()
}

/// Value of the penalized least-squares criterion at `depth`.
pub fn depth_criterion(finest: &[f64], depth: u32) -> f64 {
    let d_max = finest_depth(finest);
    let sup = finest.iter().copied().fold(0.0, f64::max);
    let contrast: f64 = cell_counts_at_depth(finest, depth).iter().map(|n| n * n).sum();
    let scale = (1u64 << depth) as f64;
    scale * (-contrast + (1u64 << (d_max + 1)) as f64 * sup)
}

/// Minimizer of [`depth_criterion`] over `0..=d_max`; ties go to the coarser partition.
pub fn select_depth(finest: &[f64]) -> u32 {
    let d_max = finest_depth(finest);
    let mut best = 0;
    let mut best_value = depth_criterion(finest, 0);
    for d in 1..=d_max {
        let v = depth_criterion(finest, d);
        if v < best_value {
            best = d;
            best_value = v;
        }
    }
    best
}

/// Histogram at a fixed depth: height `N(E) / (Y |E|)`, identically 0 when `Y = 0`.
pub fn histogram_estimate(finest: &[f64], dyad_mass: f64, depth: u32, horizon: f64) -> HistogramEstimate {
    let cells = 1usize << depth;
    if dyad_mass <= 0.0 {
        return HistogramEstimate { depth, heights: vec![0.0; cells], horizon };
    }
    let width = horizon / cells as f64;
    let heights = cell_counts_at_depth(finest, depth)
        .into_iter()
        .map(|n| (n / (dyad_mass * width)).max(0.0))
        .collect();
    HistogramEstimate { depth, heights, horizon }
}

/// Depth selection followed by estimation. An empty pair (`Y = 0`) yields
/// the zero function at depth 0.
pub fn fit_histogram(finest: &[f64], dyad_mass: f64, horizon: f64) -> HistogramEstimate {
    if dyad_mass <= 0.0 {
        return HistogramEstimate::zero(horizon);
    }
    let depth = select_depth(finest);
    histogram_estimate(finest, dyad_mass, depth, horizon)
}
