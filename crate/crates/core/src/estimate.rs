//! Nonparametric M-step: one intensity estimate per group pair.

use serde::{Deserialize, Serialize};

use crate::histogram::{fit_histogram, HistogramEstimate};
use crate::intensity::Intensity;
use crate::kernel::{default_bandwidth, kernel_estimate, KernelEstimate, DEFAULT_GRID_POINTS};
use crate::variational::SufficientStats;

/// Which intensity estimator the M-step uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimator {
    /// Adaptive histogram over dyadic partitions up to depth `d_max`.
    Histogram { d_max: u32 },
    /// Epanechnikov smoothing; `bandwidth: None` selects `T · M_eff^(-1/5)` per pair.
    Kernel { bandwidth: Option<f64>, grid_points: usize },
}

impl Default for Estimator {
    fn default() -> Self {
        Estimator::Histogram { d_max: 3 }
    }
}

impl Estimator {
    pub fn kernel(bandwidth: Option<f64>) -> Self {
        Estimator::Kernel { bandwidth, grid_points: DEFAULT_GRID_POINTS }
    }

    /// Depth of the grid on which event weights are accumulated.
    pub fn stats_depth(&self) -> u32 {
        match self {
            Estimator::Histogram { d_max } => *d_max,
            Estimator::Kernel { .. } => 0,
        }
    }

    pub fn is_histogram(&self) -> bool {
        matches!(self, Estimator::Histogram { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntensityEstimate {
    Histogram(HistogramEstimate),
    Kernel(KernelEstimate),
}

impl IntensityEstimate {
    pub fn depth(&self) -> Option<u32> {
        match self {
            IntensityEstimate::Histogram(h) => Some(h.depth),
            IntensityEstimate::Kernel(_) => None,
        }
    }

    pub fn as_histogram(&self) -> Option<&HistogramEstimate> {
        match self {
            IntensityEstimate::Histogram(h) => Some(h),
            IntensityEstimate::Kernel(_) => None,
        }
    }
}

impl Intensity for IntensityEstimate {
    fn value(&self, t: f64) -> f64 {
        match self {
            IntensityEstimate::Histogram(h) => h.value(t),
            IntensityEstimate::Kernel(k) => k.value(t),
        }
    }

    fn cumulative(&self, t: f64) -> f64 {
        match self {
            IntensityEstimate::Histogram(h) => h.cumulative(t),
            IntensityEstimate::Kernel(k) => k.cumulative(t),
        }
    }

    fn upper_bound(&self) -> f64 {
        match self {
            IntensityEstimate::Histogram(h) => h.upper_bound(),
            IntensityEstimate::Kernel(k) => k.upper_bound(),
        }
    }
}

/// Estimates every pair's intensity from the weighted counts in `stats`,
/// normalized by `dyad_mass` (the plain `Y^(q,l)` in the dense model).
pub fn m_step(
    stats: &SufficientStats,
    dyad_mass: &[f64],
    event_times: &[f64],
    estimator: &Estimator,
    horizon: f64,
) -> Vec<IntensityEstimate> {
    (0..stats.layout.len())
        .map(|slot| match estimator {
            Estimator::Histogram { d_max } => {
                debug_assert_eq!(stats.d_max, *d_max);
                IntensityEstimate::Histogram(fit_histogram(&stats.cell_counts[slot], dyad_mass[slot], horizon))
            }
            Estimator::Kernel { bandwidth, grid_points } => {
                let weights = &stats.event_weights[slot];
                let b = bandwidth.unwrap_or_else(|| default_bandwidth(horizon, weights.iter().sum()));
                IntensityEstimate::Kernel(kernel_estimate(
                    event_times,
                    weights,
                    dyad_mass[slot],
                    b,
                    horizon,
                    *grid_points,
                ))
            }
        })
        .collect()
}

/// Largest relative violation of `Y ∫α̂ = Σ_E N(E)` over histogram slots.
pub fn mass_conservation_error(stats: &SufficientStats, dyad_mass: &[f64], alpha: &[IntensityEstimate]) -> f64 {
    alpha
        .iter()
        .enumerate()
        .filter_map(|(slot, est)| {
            let h = est.as_histogram()?;
            if dyad_mass[slot] <= 0.0 {
                return None;
            }
            let counted: f64 = stats.cell_counts[slot].iter().sum();
            let err = (dyad_mass[slot] * h.integral() - counted).abs() / counted.abs().max(1.0);
            Some(err)
        })
        .fold(0.0, f64::max)
}
