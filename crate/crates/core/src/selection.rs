//! Integrated classification likelihood and the choice of the number of groups.
//!
//! ```text
//! ICL(Q) = log P(O, τ̂) - ½ (Q - 1) log n - ½ log r · Σ_{q,l} 2^{d̂(q,l)}
//! ```
//!
//! where `log P` is the expected complete-data log-likelihood under `τ̂`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PpsbmError, Result};
use crate::estimate::Estimator;
use crate::events::EventStream;
use crate::sparse::{icl_sparse, run_vem_sparse};
use crate::variational::compute_stats;
use crate::vem::{intensity_term, proportion_term, run_vem, FitConfig, FitResult, IntensityTerms};

/// Expected complete-data log-likelihood of a dense histogram fit.
pub fn complete_log_likelihood(fit: &FitResult, stream: &EventStream, floor: f64) -> Result<f64> {
    let Estimator::Histogram { d_max } = fit.estimator else {
        return Err(PpsbmError::UnsupportedEstimator);
    };
    if stream.n() != fit.n || stream.directed() != fit.directed {
        return Err(PpsbmError::InvalidConfig("fit does not match the event stream".into()));
    }
    let stats = compute_stats(stream, &fit.tau, d_max);
    let terms = IntensityTerms::new(stream, fit.layout(), &fit.alpha, floor);
    Ok(intensity_term(&stats, &stats.dyad_mass, &terms) + proportion_term(&fit.pi, &fit.tau))
}

/// `½ (Q - 1) log n + ½ log r · Σ 2^{d̂}` over the fitted pair slots.
pub fn icl_penalty(groups: usize, n: usize, dyads: usize, depths: &[u32]) -> f64 {
    let cells: f64 = depths.iter().map(|&d| (1u64 << d) as f64).sum();
    0.5 * (groups as f64 - 1.0) * (n as f64).ln() + 0.5 * (dyads as f64).ln() * cells
}

/// ICL of a histogram fit. Sparse fits use the sparse criterion.
pub fn icl(fit: &FitResult, stream: &EventStream) -> Result<f64> {
    const FLOOR: f64 = 1e-10;
    if fit.sparse.is_some() {
        return icl_sparse(stream, fit, FLOOR);
    }
    let log_p = complete_log_likelihood(fit, stream, FLOOR)?;
    let depths: Vec<u32> = fit.alpha.iter().filter_map(|a| a.depth()).collect();
    Ok(log_p - icl_penalty(fit.groups, fit.n, fit.num_dyads(), &depths))
}

/// One row of the selection table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionEntry {
    pub groups: usize,
    pub icl: f64,
    pub j: f64,
    /// Selected depth per pair slot.
    pub depths: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub entries: Vec<SelectionEntry>,
    pub chosen: usize,
    #[serde(skip)]
    pub fits: Vec<FitResult>,
}

impl SelectionReport {
    /// The fit with the chosen number of groups.
    pub fn chosen_fit(&self) -> Option<&FitResult> {
        self.fits.iter().find(|f| f.groups == self.chosen)
    }
}

/// Index of the largest value; ties resolve to the first.
pub fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = k;
        }
    }
    best
}

/// Fits `Q = 1..=q_max` and keeps the ICL maximizer (smallest `Q` on ties).
pub fn select_q(stream: &EventStream, q_max: usize, cfg: &FitConfig, seed: u64, sparse: bool) -> Result<SelectionReport> {
    if q_max == 0 {
        return Err(PpsbmError::InvalidConfig("q_max must be at least 1".into()));
    }
    if !cfg.estimator.is_histogram() {
        return Err(PpsbmError::UnsupportedEstimator);
    }
    let fits: Vec<FitResult> = (1..=q_max)
        .into_par_iter()
        .map(|q| if sparse { run_vem_sparse(stream, q, cfg, seed) } else { run_vem(stream, q, cfg, seed) })
        .collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(fits.len());
    for fit in &fits {
        entries.push(SelectionEntry {
            groups: fit.groups,
            icl: icl(fit, stream)?,
            j: fit.j,
            depths: fit.alpha.iter().filter_map(|a| a.depth()).collect(),
        });
    }
    let icls: Vec<f64> = entries.iter().map(|e| e.icl).collect();
    let chosen = entries[argmax_first(&icls)].groups;
    Ok(SelectionReport { entries, chosen, fits })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::Event;
    use crate::intensity::Intensity;
    use crate::variational::VariationalState;
    use crate::vem::{oracle_fit, tau_entropy};

    #[test]
    fn penalty_counts() {
        // Q = 1, one cell
        let p = icl_penalty(1, 10, 90, &[0]);
        assert!((p - 0.5 * 90f64.ln()).abs() < 1e-12);
        // Q = 2 directed, four pairs at depth 1
        let p = icl_penalty(2, 10, 90, &[1, 1, 1, 1]);
        assert!((p - (0.5 * 10f64.ln() + 0.5 * 90f64.ln() * 8.0)).abs() < 1e-12);
    }

    fn toy() -> EventStream {
        EventStream::new(
            4,
            1.0,
            true,
            vec![
                Event { time: 0.1, sender: 0, receiver: 1 },
                Event { time: 0.3, sender: 1, receiver: 0 },
                Event { time: 0.6, sender: 2, receiver: 3 },
                Event { time: 0.8, sender: 0, receiver: 3 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn icl_matches_hand_sum() {
        let stream = toy();
        let cfg = FitConfig { estimator: Estimator::Histogram { d_max: 1 }, ..FitConfig::default() };
        let fit = oracle_fit(&stream, &[0, 0, 1, 1], 2, &cfg).unwrap();
        // hand sum: Σ_events log α̂ - Σ_slots Y A(T) + Σ τ log π, with one-hot τ
        let labels = [0usize, 0, 1, 1];
        let mut log_p = 0.0;
        for ev in stream.events() {
            log_p += fit.alpha(labels[ev.sender], labels[ev.receiver]).value(ev.time).max(1e-10).ln();
        }
        for i in 0..4 {
            for j in (0..4).filter(|&j| j != i) {
                log_p -= fit.alpha(labels[i], labels[j]).cumulative(1.0);
            }
            log_p += fit.pi[labels[i]].ln();
        }
        let depths: Vec<u32> = fit.alpha.iter().map(|a| a.depth().unwrap()).collect();
        let expected = log_p - icl_penalty(2, 4, 12, &depths);
        let got = icl(&fit, &stream).unwrap();
        assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
        assert!((complete_log_likelihood(&fit, &stream, 1e-10).unwrap() - (fit.j - tau_entropy(&fit.tau))).abs() < 1e-9);
    }

    #[test]
    fn kernel_fit_rejected() {
        let stream = toy();
        let cfg = FitConfig { estimator: Estimator::kernel(Some(0.3)), ..FitConfig::default() };
        let fit = crate::vem::fit_from_init(&stream, &VariationalState::uniform(4, 1), &cfg).unwrap();
        assert!(matches!(icl(&fit, &stream), Err(PpsbmError::UnsupportedEstimator)));
    }

    #[test]
    fn single_candidate() {
        let report = select_q(&toy(), 1, &FitConfig::default(), 3, false).unwrap();
        assert_eq!(report.chosen, 1);
        assert_eq!(report.entries.len(), 1);
    }

    #[test]
    fn ties_prefer_first() {
        assert_eq!(argmax_first(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax_first(&[2.0]), 0);
    }
}
