//! Replicated synthetic experiments: clustering accuracy on the two-group
//! sinusoid benchmark and model selection on the three-group benchmark.
//!
//! Replicate `k` of a run with seed `s` simulates from stream `k` of `s` and
//! fits with a seed drawn from that same stream, so tables do not depend on
//! the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metrics::adjusted_rand_index;
use crate::rng;
use crate::selection::select_q;
use crate::simulator::{scenario1, scenario2};
use crate::vem::{run_vem, FitConfig};

pub const DEFAULT_PHIS: [f64; 5] = [0.01, 0.05, 0.1, 0.2, 0.5];

/// Median with the usual midpoint rule for even lengths.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.is_empty() {
        f64::NAN
    } else if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// ARI of one fitted replicate of the two-group benchmark.
pub fn scenario1_replicate(phi: f64, n: usize, cfg: &FitConfig, seed: u64, replicate: u64) -> Result<f64> {
    let mut stream_rng = rng::for_stream(seed, replicate);
    let (sim, _) = scenario1(phi, n, &mut stream_rng)?;
    let fit = run_vem(&sim.stream, 2, cfg, rng::child_seed(&mut stream_rng))?;
    adjusted_rand_index(&fit.map_labels(), &sim.labels)
}

/// One row of the ARI summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AriRow {
    pub phi: f64,
    pub n: usize,
    pub aris: Vec<f64>,
    pub median: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl AriRow {
    fn new(phi: f64, n: usize, aris: Vec<f64>) -> Self {
        let mean = aris.iter().sum::<f64>() / aris.len() as f64;
        Self {
            phi,
            n,
            median: median(&aris),
            mean,
            min: aris.iter().copied().fold(f64::INFINITY, f64::min),
            max: aris.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            aris,
        }
    }
}

pub fn scenario1_ari_table(phis: &[f64], n: usize, replicates: usize, cfg: &FitConfig, seed: u64) -> Result<Vec<AriRow>> {
    phis.iter()
        .enumerate()
        .map(|(k, &phi)| {
            let base = seed.wrapping_add(k as u64 * 1_000_003);
            let aris = (0..replicates as u64)
                .into_par_iter()
                .map(|r| scenario1_replicate(phi, n, cfg, base, r))
                .collect::<Result<Vec<f64>>>()?;
            Ok(AriRow::new(phi, n, aris))
        })
        .collect()
}

pub fn ari_table_csv(rows: &[AriRow]) -> String {
    let mut out = String::from("phi,n,replicates,median_ari,mean_ari,min_ari,max_ari\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{},{},{}\n", r.phi, r.n, r.aris.len(), r.median, r.mean, r.min, r.max));
    }
    out
}

pub fn ari_replicates_csv(rows: &[AriRow]) -> String {
    let mut out = String::from("phi,replicate,ari\n");
    for r in rows {
        for (k, a) in r.aris.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", r.phi, k, a));
        }
    }
    out
}

/// Selected number of groups for one replicate of the three-group benchmark.
pub fn scenario2_replicate(n: usize, q_max: usize, cfg: &FitConfig, seed: u64, replicate: u64) -> Result<usize> {
    let mut stream_rng = rng::for_stream(seed, replicate);
    let (sim, _) = scenario2(n, &mut stream_rng)?;
    Ok(select_q(&sim.stream, q_max, cfg, rng::child_seed(&mut stream_rng), false)?.chosen)
}

pub fn scenario2_selection(n: usize, q_max: usize, replicates: usize, cfg: &FitConfig, seed: u64) -> Result<Vec<usize>> {
    (0..replicates as u64).into_par_iter().map(|r| scenario2_replicate(n, q_max, cfg, seed, r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_rule() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn table_is_deterministic() {
        let cfg = FitConfig::default();
        let a = scenario1_ari_table(&[0.5], 12, 2, &cfg, 9).unwrap();
        let b = scenario1_ari_table(&[0.5], 12, 2, &cfg, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(ari_table_csv(&a).lines().count(), 2);
    }
}
