//! Parametric bootstrap bands for fitted intensities.
//!
//! Each replicate draws fresh labels from `π̂`, simulates events from the
//! fitted intensities, refits with the same configuration, aligns the refit to
//! the original by minimal risk and evaluates it on a regular grid. Bands are
//! percentile envelopes across replicates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PpsbmError, Result};
use crate::estimate::IntensityEstimate;
use crate::intensity::Intensity;
use crate::kernel::regular_grid;
use crate::metrics::{risk_report, DEFAULT_RISK_GRID};
use crate::rng;
use crate::simulator::simulate_with;
use crate::vem::{run_vem, FitConfig, FitResult};

/// Empirical quantile with linear interpolation between order statistics
/// (`h = (n - 1) p`). `sorted` must be ascending and nonempty.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOptions {
    pub replicates: usize,
    pub level: f64,
    pub grid_points: usize,
    /// Nodes per simulated replicate.
    pub n: usize,
}

/// Pointwise band for one group pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairBand {
    pub pair: (usize, usize),
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub median: Vec<f64>,
    pub estimate: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapBands {
    pub level: f64,
    pub grid: Vec<f64>,
    pub bands: Vec<PairBand>,
    /// Replicates that were refitted successfully.
    pub replicates: usize,
    /// Successful replicates whose simulated labels left some group empty.
    pub empty_group_replicates: usize,
    pub failed_replicates: usize,
}

impl BootstrapBands {
    pub fn band(&self, q: usize, l: usize) -> Option<&PairBand> {
        self.bands.iter().find(|b| b.pair == (q, l) || b.pair == (l, q))
    }

    /// Long-format CSV `q,l,t,lower,upper,median,estimate` with 1-based groups.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,l,t,lower,upper,median,estimate\n");
        for band in &self.bands {
            for (k, t) in self.grid.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    band.pair.0 + 1,
                    band.pair.1 + 1,
                    t,
                    band.lower[k],
                    band.upper[k],
                    band.median[k],
                    band.estimate[k]
                ));
            }
        }
        out
    }
}

struct Replicate {
    values: Vec<Vec<f64>>,
    empty_group: bool,
}

fn run_replicate(fit: &FitResult, opts: &BootstrapOptions, cfg: &FitConfig, seed: u64, index: u64, grid: &[f64]) -> Result<Replicate> {
    let mut rng = rng::for_stream(seed, index + 1);
    let sim = simulate_with(&fit.pi, &fit.alpha, fit.horizon, fit.directed, opts.n, None, &mut rng)?;
    let mut seen = vec![false; fit.groups];
    for &z in &sim.labels {
        seen[z] = true;
    }
    let empty_group = seen.iter().any(|s| !s);
    let refit = run_vem(&sim.stream, fit.groups, cfg, rng::child_seed(&mut rng))?;
    let layout = fit.layout();
    let report = risk_report(&refit.alpha, &fit.alpha, layout, fit.horizon, DEFAULT_RISK_GRID)?;
    let perm = &report.permutation;
    let values = layout
        .pairs()
        .into_iter()
        .map(|(q, l)| {
            let est: &IntensityEstimate = &refit.alpha[layout.index(perm[q], perm[l])];
            grid.iter().map(|&t| est.value(t)).collect()
        })
        .collect();
    Ok(Replicate { values, empty_group })
}

/// Percentile bootstrap bands around the intensities of `fit`.
pub fn bootstrap_ci(fit: &FitResult, opts: &BootstrapOptions, cfg: &FitConfig, seed: u64) -> Result<BootstrapBands> {
    if opts.replicates < 10 {
        return Err(PpsbmError::InvalidConfig(format!("need at least 10 replicates, got {}", opts.replicates)));
    }
    if !(opts.level > 0.0 && opts.level < 1.0) {
        return Err(PpsbmError::InvalidConfig(format!("level {} must lie in (0, 1)", opts.level)));
    }
    if opts.n < fit.groups.max(2) {
        return Err(PpsbmError::TooManyGroups { groups: fit.groups, nodes: opts.n });
    }
    let cfg = FitConfig { estimator: fit.estimator, ..cfg.clone() };
    let grid = regular_grid(fit.horizon, opts.grid_points.max(2));
    let outcomes: Vec<Result<Replicate>> = (0..opts.replicates as u64)
        .into_par_iter()
        .map(|b| run_replicate(fit, opts, &cfg, seed, b, &grid))
        .collect();
    let failed = outcomes.iter().filter(|r| r.is_err()).count();
    let done: Vec<Replicate> = outcomes.into_iter().filter_map(|r| r.ok()).collect();
    if done.is_empty() {
        return Err(PpsbmError::AllRunsFailed(opts.replicates));
    }

    let alpha_lo = (1.0 - opts.level) / 2.0;
    let layout = fit.layout();
    let bands = layout
        .pairs()
        .into_iter()
        .enumerate()
        .map(|(slot, pair)| {
            let mut band = PairBand {
                pair,
                lower: Vec::with_capacity(grid.len()),
                upper: Vec::with_capacity(grid.len()),
                median: Vec::with_capacity(grid.len()),
                estimate: grid.iter().map(|&t| fit.alpha[slot].value(t)).collect(),
            };
            let mut column = Vec::with_capacity(done.len());
            for k in 0..grid.len() {
                column.clear();
                column.extend(done.iter().map(|r| r.values[slot][k]));
                column.sort_by(f64::total_cmp);
                band.lower.push(quantile_sorted(&column, alpha_lo));
                band.upper.push(quantile_sorted(&column, 1.0 - alpha_lo));
                band.median.push(quantile_sorted(&column, 0.5));
            }
            band
        })
        .collect();

    Ok(BootstrapBands {
        level: opts.level,
        grid,
        bands,
        replicates: done.len(),
        empty_group_replicates: done.iter().filter(|r| r.empty_group).count(),
        failed_replicates: failed,
    })
}
