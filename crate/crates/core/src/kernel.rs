//! Kernel-smoothed intensity estimation with the Epanechnikov kernel.
//!
//! `α̂(t) = (1 / (b Y)) Σ_m w_m K((t - t_m) / b)`, with no boundary correction.

use serde::{Deserialize, Serialize};

use crate::intensity::Intensity;

pub const DEFAULT_GRID_POINTS: usize = 512;

pub fn epanechnikov(u: f64) -> f64 {
    if u.abs() <= 1.0 {
        0.75 * (1.0 - u * u)
    } else {
        0.0
    }
}

/// `∫_{-1}^{u} K`.
pub fn epanechnikov_cdf(u: f64) -> f64 {
    if u <= -1.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        0.5 + 0.75 * u - 0.25 * u * u * u
    }
}

/// Rate-rule bandwidth `T · M_eff^(-1/5)`, capped at `T`.
pub fn default_bandwidth(horizon: f64, effective_events: f64) -> f64 {
    if effective_events <= 1.0 {
        horizon
    } else {
        horizon * effective_events.powf(-0.2)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct WeightedEvents {
    times: Vec<f64>,
    weights: Vec<f64>,
}

/// Kernel estimate for one group pair.
///
/// Estimates built by [`kernel_estimate`] evaluate the kernel sum exactly at
/// any `t`. Estimates read back from JSON only carry the grid and fall back to
/// linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelEstimate {
    pub bandwidth: f64,
    pub grid_values: Vec<f64>,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(skip)]
    dyad_mass: f64,
    #[serde(skip)]
    events: Option<WeightedEvents>,
}

impl KernelEstimate {
    pub fn grid(&self) -> Vec<f64> {
        regular_grid(self.horizon, self.grid_values.len())
    }

    /// Total weight `Σ w_m` of the underlying events.
    pub fn total_weight(&self) -> f64 {
        self.events.as_ref().map_or(0.0, |e| e.weights.iter().sum())
    }

    fn exact_value(&self, ev: &WeightedEvents, t: f64) -> f64 {
        if self.dyad_mass <= 0.0 {
            return 0.0;
        }
        let b = self.bandwidth;
        let lo = ev.times.partition_point(|&s| s < t - b);
        let hi = ev.times.partition_point(|&s| s <= t + b);
        let sum: f64 = (lo..hi).map(|m| ev.weights[m] * epanechnikov((t - ev.times[m]) / b)).sum();
        (sum / (b * self.dyad_mass)).max(0.0)
    }

    fn interpolated(&self, t: f64) -> f64 {
        let g = self.grid_values.len();
        if g == 1 {
            return self.grid_values[0];
        }
        let x = (t / self.horizon * (g - 1) as f64).clamp(0.0, (g - 1) as f64);
        let k = (x.floor() as usize).min(g - 2);
        let frac = x - k as f64;
        self.grid_values[k] * (1.0 - frac) + self.grid_values[k + 1] * frac
    }
}

impl Intensity for KernelEstimate {
    fn value(&self, t: f64) -> f64 {
        match &self.events {
            Some(ev) => self.exact_value(ev, t),
            None => self.interpolated(t),
        }
    }

    fn cumulative(&self, t: f64) -> f64 {
        match &self.events {
            Some(ev) => {
                if self.dyad_mass <= 0.0 {
                    return 0.0;
                }
                let b = self.bandwidth;
                let mass: f64 = ev
                    .times
                    .iter()
                    .zip(&ev.weights)
                    .map(|(&tm, &w)| w * (epanechnikov_cdf((t - tm) / b) - epanechnikov_cdf(-tm / b)))
                    .sum();
                mass / self.dyad_mass
            }
            None => {
                // trapezoid over the stored grid
                let grid = self.grid();
                let mut acc = 0.0;
                for k in 1..grid.len() {
                    let (a, c) = (grid[k - 1], grid[k]);
                    if t <= a {
                        break;
                    }
                    let hi = t.min(c);
                    acc += 0.5 * (self.interpolated(a) + self.interpolated(hi)) * (hi - a);
                }
                acc
            }
        }
    }

    fn upper_bound(&self) -> f64 {
        match &self.events {
            Some(ev) if self.dyad_mass > 0.0 => {
                // any evaluation point sees only events inside one window of width 2b
                let b = self.bandwidth;
                let mut best = 0.0f64;
                let mut window = 0.0;
                let mut hi = 0;
                for lo in 0..ev.times.len() {
                    while hi < ev.times.len() && ev.times[hi] <= ev.times[lo] + 2.0 * b {
                        window += ev.weights[hi];
                        hi += 1;
                    }
                    best = best.max(window);
                    window -= ev.weights[lo];
                }
                0.75 * best / (b * self.dyad_mass)
            }
            Some(_) => 0.0,
            None => self.grid_values.iter().copied().fold(0.0, f64::max),
        }
    }
}

/// `points` equally spaced values covering `[0, T]` inclusive.
pub fn regular_grid(horizon: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![0.0];
    }
    (0..points).map(|k| k as f64 * horizon / (points - 1) as f64).collect()
}

/// Builds the estimate from sorted event times and their pair weights.
pub fn kernel_estimate(
    times: &[f64],
    weights: &[f64],
    dyad_mass: f64,
    bandwidth: f64,
    horizon: f64,
    grid_points: usize,
) -> KernelEstimate {
    assert!(bandwidth > 0.0, "bandwidth must be positive");
    assert!(grid_points >= 2, "grid needs at least two points");
    assert_eq!(times.len(), weights.len());
    debug_assert!(times.windows(2).all(|w| w[0] <= w[1]));
    let mut est = KernelEstimate {
        bandwidth,
        grid_values: Vec::new(),
        horizon,
        dyad_mass: dyad_mass.max(0.0),
        events: Some(WeightedEvents { times: times.to_vec(), weights: weights.to_vec() }),
    };
    est.grid_values = regular_grid(horizon, grid_points).into_iter().map(|t| est.value(t)).collect();
    est
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        assert_eq!(epanechnikov(0.0), 0.75);
        assert_eq!(epanechnikov(1.0), 0.0);
        assert_eq!(epanechnikov(-1.0), 0.0);
        assert_eq!(epanechnikov(1.5), 0.0);
    }

    #[test]
    fn kernel_integrates_to_one() {
        let steps = 100_000;
        let h = 2.0 / steps as f64;
        let mut acc = 0.0;
        for k in 0..steps {
            let u = -1.0 + (k as f64 + 0.5) * h;
            acc += epanechnikov(u) * h;
        }
        assert!((acc - 1.0).abs() < 1e-8);
        assert!((epanechnikov_cdf(1.0) - 1.0).abs() < 1e-15);
        assert!((epanechnikov_cdf(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_event() {
        let (t0, b) = (0.4, 0.1);
        let est = kernel_estimate(&[t0], &[1.0], 1.0, b, 1.0, 64);
        for &t in &[0.3, 0.35, 0.4, 0.45, 0.5, 0.6] {
            let u: f64 = (t - t0) / b;
            let expected = if u.abs() <= 1.0 { 0.75 / b * (1.0 - u * u) } else { 0.0 };
            assert!((est.value(t) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_pair_is_zero() {
        let est = kernel_estimate(&[0.2, 0.5], &[0.3, 0.1], 0.0, 0.1, 1.0, 16);
        assert!(est.grid_values.iter().all(|&v| v == 0.0));
        assert_eq!(est.cumulative(1.0), 0.0);
    }

    #[test]
    fn matches_double_loop() {
        let times = [0.05, 0.21, 0.22, 0.6, 0.93];
        let weights = [0.3, 1.0, 0.7, 0.2, 0.9];
        let (y, b) = (2.5, 0.15);
        let est = kernel_estimate(&times, &weights, y, b, 1.0, 101);
        for (k, &t) in est.grid().iter().enumerate() {
            let mut s = 0.0;
            for m in 0..times.len() {
                s += weights[m] * epanechnikov((t - times[m]) / b);
            }
            assert!((est.grid_values[k] - s / (b * y)).abs() < 1e-12);
        }
    }

    #[test]
    fn cumulative_and_bound() {
        let times = [0.1, 0.15, 0.5, 0.95];
        let weights = [1.0, 0.5, 0.25, 1.0];
        let est = kernel_estimate(&times, &weights, 1.5, 0.2, 1.0, 4001);
        let grid = est.grid();
        let mut trap = 0.0;
        for k in 1..grid.len() {
            trap += 0.5 * (est.grid_values[k] + est.grid_values[k - 1]) * (grid[k] - grid[k - 1]);
        }
        assert!((trap - est.cumulative(1.0)).abs() < 1e-5);
        let max_grid = est.grid_values.iter().cloned().fold(0.0, f64::max);
        assert!(est.upper_bound() >= max_grid);
    }

    #[test]
    fn deserialized_interpolates() {
        let est = kernel_estimate(&[0.5], &[1.0], 1.0, 0.25, 1.0, 5);
        let json = serde_json::to_string(&est).unwrap();
        let back: KernelEstimate = serde_json::from_str(&json).unwrap();
        assert_eq!(back.grid_values, est.grid_values);
        assert!((back.value(0.5) - est.value(0.5)).abs() < 1e-12);
        assert!((back.value(0.625) - 0.5 * (est.value(0.5) + est.value(0.75))).abs() < 1e-12);
    }
}
