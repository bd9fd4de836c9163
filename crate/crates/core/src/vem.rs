//! Semiparametric variational EM.
//!
//! Each iteration updates the proportions `π`, re-estimates every pair
//! intensity nonparametrically from the current weighted counts, then solves
//! the mean-field fixed point
//!
//! ```text
//! τ^{i,q} ∝ π_q exp{D_iq(τ, α)}
//! D_iq = -Σ_l Σ_{j≠i} τ^{j,l} {A^(q,l)(T) + A^(l,q)(T)}
//!        + Σ_l Σ_m [1{i_m = i} τ^{j_m,l} log α^(q,l)(t_m) + 1{j_m = i} τ^{i_m,l} log α^(l,q)(t_m)]
//! ```
//!
//! (undirected streams carry a single cumulative term per dyad). Runs stop on
//! a small relative change of the lower bound `J`, on the iteration cap, or
//! after three consecutive decreases of `J`. Converged runs return their final
//! iterate, runs cut short return their best-`J` iterate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PpsbmError, Result};
use crate::estimate::{m_step, mass_conservation_error, Estimator, IntensityEstimate};
use crate::events::EventStream;
use crate::init::{init_classifications, InitOptions};
use crate::intensity::{Intensity, PairLayout};
use crate::rng;
use crate::sparse::SparseState;
use crate::variational::{compute_stats, update_pi, SufficientStats, VariationalState};

/// Tuning of the VEM algorithm and its initialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub estimator: Estimator,
    /// Relative change of `J` below which a run is declared converged.
    pub epsilon: f64,
    pub nb_iter: usize,
    pub fix_iter: usize,
    pub fix_eps: f64,
    /// Perturbed copies per base k-means classification.
    pub n_perturb: usize,
    /// Fraction of nodes whose labels are redrawn in a perturbed copy.
    pub perc_perturb: f64,
    /// Aggregation depths `0..=l_part` used for the base classifications.
    pub l_part: u32,
    /// Floor applied to intensities inside logarithms.
    pub intensity_floor: f64,
    pub kmeans_iter: usize,
    /// k-means restarts per aggregation depth; the lowest within-cluster sum of squares wins.
    pub kmeans_restarts: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            estimator: Estimator::default(),
            epsilon: 1e-6,
            nb_iter: 50,
            fix_iter: 10,
            fix_eps: 1e-6,
            n_perturb: 2,
            perc_perturb: 0.2,
            l_part: 2,
            intensity_floor: 1e-10,
            kmeans_iter: 50,
            kmeans_restarts: 10,
        }
    }
}

impl FitConfig {
    pub fn init_options(&self) -> InitOptions {
        InitOptions {
            l_part: self.l_part,
            n_perturb: self.n_perturb,
            perc_perturb: self.perc_perturb,
            kmeans_iter: self.kmeans_iter,
            kmeans_restarts: self.kmeans_restarts,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(PpsbmError::InvalidConfig(m.to_string()));
        if !(self.epsilon > 0.0) || !(self.fix_eps > 0.0) || !(self.intensity_floor > 0.0) {
            return bad("tolerances and the intensity floor must be positive");
        }
        if !(0.0..=1.0).contains(&self.perc_perturb) {
            return bad("perc_perturb must lie in [0, 1]");
        }
        if self.nb_iter == 0 || self.fix_iter == 0 {
            return bad("iteration caps must be at least 1");
        }
        match self.estimator {
            Estimator::Histogram { d_max } if d_max > 20 => bad("d_max above 20 is not supported"),
            Estimator::Kernel { bandwidth: Some(b), .. } if !(b > 0.0) => bad("bandwidth must be positive"),
            Estimator::Kernel { grid_points, .. } if grid_points < 2 => bad("kernel grid needs at least 2 points"),
            _ => Ok(()),
        }
    }
}

/// Per-slot quantities of the current intensities needed by the E-step and `J`:
/// `A(T)` and the floored `log α(t_m)` at every event.
#[derive(Debug, Clone)]
pub struct IntensityTerms {
    pub layout: PairLayout,
    pub cumulative: Vec<f64>,
    log_values: Vec<f64>,
}

impl IntensityTerms {
    pub fn new<I: Intensity>(stream: &EventStream, layout: PairLayout, alpha: &[I], floor: f64) -> Self {
        assert_eq!(alpha.len(), layout.len());
        let slots = layout.len();
        let cumulative = alpha.iter().map(|a| a.cumulative(stream.horizon())).collect();
        let mut log_values = Vec::with_capacity(stream.len() * slots);
        for ev in stream.events() {
            for a in alpha {
                log_values.push(a.value(ev.time).max(floor).ln());
            }
        }
        Self { layout, cumulative, log_values }
    }

    #[inline]
    pub fn log_value(&self, event: usize, slot: usize) -> f64 {
        self.log_values[event * self.layout.len() + slot]
    }
}

/// `D_iq(τ, α)` evaluated term by term for one node and group.
pub fn compute_d(stream: &EventStream, tau: &VariationalState, terms: &IntensityTerms, i: usize, q: usize) -> f64 {
    let layout = terms.layout;
    let groups = tau.groups();
    let mut d = 0.0;
    for l in 0..groups {
        let masses = if stream.directed() {
            terms.cumulative[layout.index(q, l)] + terms.cumulative[layout.index(l, q)]
        } else {
            terms.cumulative[layout.index(q, l)]
        };
        for j in (0..stream.n()).filter(|&j| j != i) {
            d -= tau.get(j, l) * masses;
        }
    }
    for (m, ev) in stream.events().iter().enumerate() {
        for l in 0..groups {
            if ev.sender == i {
                d += tau.get(ev.receiver, l) * terms.log_value(m, layout.index(q, l));
            }
            if ev.receiver == i {
                d += tau.get(ev.sender, l) * terms.log_value(m, layout.index(l, q));
            }
        }
    }
    d
}

/// Adds the event terms of `D_iq` for every `(i, q)` into `out` (row-major `n × Q`).
pub(crate) fn add_event_terms(stream: &EventStream, tau: &VariationalState, terms: &IntensityTerms, out: &mut [f64]) {
    let layout = terms.layout;
    let groups = tau.groups();
    for (m, ev) in stream.events().iter().enumerate() {
        let (s, r) = (ev.sender, ev.receiver);
        for q in 0..groups {
            let mut to_sender = 0.0;
            let mut to_receiver = 0.0;
            for l in 0..groups {
                to_sender += tau.get(r, l) * terms.log_value(m, layout.index(q, l));
                to_receiver += tau.get(s, l) * terms.log_value(m, layout.index(l, q));
            }
            out[s * groups + q] += to_sender;
            out[r * groups + q] += to_receiver;
        }
    }
}

/// `D_iq` for all nodes and groups.
pub fn d_matrix(stream: &EventStream, tau: &VariationalState, terms: &IntensityTerms) -> Vec<f64> {
    let layout = terms.layout;
    let groups = tau.groups();
    let sums = tau.column_sums();
    let mut mass = vec![0.0; groups * groups];
    for q in 0..groups {
        for l in 0..groups {
            mass[q * groups + l] = if stream.directed() {
                terms.cumulative[layout.index(q, l)] + terms.cumulative[layout.index(l, q)]
            } else {
                terms.cumulative[layout.index(q, l)]
            };
        }
    }
    let mut out = vec![0.0; stream.n() * groups];
    for i in 0..stream.n() {
        for q in 0..groups {
            let mut acc = 0.0;
            for l in 0..groups {
                acc -= (sums[l] - tau.get(i, l)) * mass[q * groups + l];
            }
            out[i * groups + q] = acc;
        }
    }
    add_event_terms(stream, tau, terms, &mut out);
    out
}

/// Row-wise `τ^{i,q} ∝ π_q exp(D_iq)`, normalized in the log domain.
pub(crate) fn softmax_rows(n: usize, pi: &[f64], d: &[f64]) -> VariationalState {
    let groups = pi.len();
    let log_pi: Vec<f64> = pi.iter().map(|p| if *p > 0.0 { p.ln() } else { f64::NEG_INFINITY }).collect();
    let mut weights = vec![0.0; n * groups];
    for i in 0..n {
        let row = &mut weights[i * groups..(i + 1) * groups];
        for q in 0..groups {
            row[q] = log_pi[q] + d[i * groups + q];
        }
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for w in row.iter_mut() {
            *w = if *w == f64::NEG_INFINITY { 0.0 } else { (*w - max).exp() };
            total += *w;
        }
        for w in row.iter_mut() {
            *w /= total;
        }
    }
    VariationalState::from_raw(n, groups, weights)
}

/// One application of the fixed-point map.
pub fn fixed_point_map(
    stream: &EventStream,
    tau: &VariationalState,
    pi: &[f64],
    terms: &IntensityTerms,
) -> VariationalState {
    softmax_rows(stream.n(), pi, &d_matrix(stream, tau, terms))
}

#[derive(Debug, Clone)]
pub struct EStepOutcome {
    pub tau: VariationalState,
    pub iterations: usize,
    pub converged: bool,
}

/// Iterates the fixed point from `tau0` until `max |Δτ| < fix_eps` or `fix_iter` sweeps.
pub fn e_step(
    stream: &EventStream,
    tau0: &VariationalState,
    pi: &[f64],
    terms: &IntensityTerms,
    cfg: &FitConfig,
) -> EStepOutcome {
    iterate_fixed_point(tau0, cfg, |tau| fixed_point_map(stream, tau, pi, terms))
}

pub(crate) fn iterate_fixed_point(
    tau0: &VariationalState,
    cfg: &FitConfig,
    map: impl Fn(&VariationalState) -> VariationalState,
) -> EStepOutcome {
    let mut tau = tau0.clone();
    for it in 1..=cfg.fix_iter {
        let next = map(&tau);
        let delta = next.max_abs_diff(&tau);
        tau = next;
        if delta < cfg.fix_eps {
            return EStepOutcome { tau, iterations: it, converged: true };
        }
    }
    EStepOutcome { tau, iterations: cfg.fix_iter, converged: false }
}

/// `-Σ Y^(q,l) A^(q,l)(T) + Σ_m Σ τ_m^(q,l) log α^(q,l)(t_m)`.
pub fn intensity_term(stats: &SufficientStats, dyad_mass: &[f64], terms: &IntensityTerms) -> f64 {
    let mut total = 0.0;
    for slot in 0..terms.layout.len() {
        total -= dyad_mass[slot] * terms.cumulative[slot];
        for (m, w) in stats.event_weights[slot].iter().enumerate() {
            if *w != 0.0 {
                total += w * terms.log_value(m, slot);
            }
        }
    }
    total
}

/// `Σ τ^{i,q} log π_q` with `0 · log 0 = 0`.
pub fn proportion_term(pi: &[f64], tau: &VariationalState) -> f64 {
    let mut total = 0.0;
    for i in 0..tau.n() {
        for (q, &t) in tau.row(i).iter().enumerate() {
            if t > 0.0 {
                total += t * pi[q].ln();
            }
        }
    }
    total
}

/// Entropy `-Σ τ log τ` of the factorized membership law.
pub fn tau_entropy(tau: &VariationalState) -> f64 {
    -tau.as_slice().iter().filter(|&&t| t > 0.0).map(|t| t * t.ln()).sum::<f64>()
}

/// Variational lower bound `J(θ, τ)`.
pub fn evaluate_j(pi: &[f64], terms: &IntensityTerms, stats: &SufficientStats, tau: &VariationalState) -> f64 {
    intensity_term(stats, &stats.dyad_mass, terms) + proportion_term(pi, tau) + tau_entropy(tau)
}

/// Converged parameters and diagnostics of one fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub groups: usize,
    pub n: usize,
    pub directed: bool,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub estimator: Estimator,
    pub pi: Vec<f64>,
    pub tau: VariationalState,
    /// Intensity estimates in [`PairLayout`] slot order (see `pairs`).
    pub alpha: Vec<IntensityEstimate>,
    /// 0-based `(q, l)` of each slot.
    pub pairs: Vec<(usize, usize)>,
    /// Lower bound after each iteration of the selected run.
    pub j_trace: Vec<f64>,
    /// Lower bound of the returned iterate.
    pub j: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Index of the initialization that produced this run.
    pub init_index: usize,
    pub n_inits: usize,
    pub seed: Option<u64>,
    /// Fixed-point solves that hit `fix_iter` without converging.
    pub estep_unconverged: usize,
    /// Largest relative mass-conservation error over all histogram M-steps.
    pub max_mass_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparse: Option<SparseState>,
}

impl FitResult {
    pub fn layout(&self) -> PairLayout {
        PairLayout::new(self.groups, self.directed)
    }

    pub fn alpha(&self, q: usize, l: usize) -> &IntensityEstimate {
        &self.alpha[self.layout().index(q, l)]
    }

    /// `Q × Q` grid of selected histogram depths, `None` for kernel fits.
    pub fn depths(&self) -> Option<Vec<Vec<u32>>> {
        let q = self.groups;
        (0..q)
            .map(|a| (0..q).map(|b| self.alpha(a, b).depth()).collect::<Option<Vec<_>>>())
            .collect()
    }

    pub fn map_labels(&self) -> Vec<usize> {
        self.tau.map_labels()
    }

    pub fn num_dyads(&self) -> usize {
        crate::events::num_dyads(self.n, self.directed)
    }
}

#[derive(Clone)]
struct Snapshot {
    tau: VariationalState,
    pi: Vec<f64>,
    alpha: Vec<IntensityEstimate>,
    j: f64,
}

pub(crate) fn event_times(stream: &EventStream) -> Vec<f64> {
    stream.events().iter().map(|e| e.time).collect()
}

/// Relative-change test on consecutive `J` values.
pub(crate) fn relative_change(prev: f64, cur: f64) -> f64 {
    if prev == 0.0 {
        (cur - prev).abs()
    } else {
        ((cur - prev) / prev).abs()
    }
}

/// Runs the VEM iterations from a single starting point.
pub fn fit_from_init(stream: &EventStream, tau0: &VariationalState, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    if tau0.n() != stream.n() {
        return Err(PpsbmError::InvalidConfig("initialization does not match node count".into()));
    }
    let groups = tau0.groups();
    let layout = PairLayout::new(groups, stream.directed());
    let depth = cfg.estimator.stats_depth();
    let times = event_times(stream);

    let mut tau = tau0.clone();
    let mut stats = compute_stats(stream, &tau, depth);
    let mut trace = Vec::new();
    let mut best: Option<Snapshot> = None;
    let mut last: Option<Snapshot> = None;
    let mut converged = false;
    let mut decreases = 0;
    let mut estep_unconverged = 0;
    let mut max_mass_error: f64 = 0.0;

    for _ in 0..cfg.nb_iter {
        let pi = update_pi(&tau);
        let alpha = m_step(&stats, &stats.dyad_mass, &times, &cfg.estimator, stream.horizon());
        max_mass_error = max_mass_error.max(mass_conservation_error(&stats, &stats.dyad_mass, &alpha));
        let terms = IntensityTerms::new(stream, layout, &alpha, cfg.intensity_floor);
        let outcome = e_step(stream, &tau, &pi, &terms, cfg);
        if !outcome.converged {
            estep_unconverged += 1;
        }
        tau = outcome.tau;
        stats = compute_stats(stream, &tau, depth);
        let j = evaluate_j(&pi, &terms, &stats, &tau);
        let prev = trace.last().copied();
        trace.push(j);
        let snapshot = Snapshot { tau: tau.clone(), pi, alpha, j };
        if best.as_ref().is_none_or(|b| j > b.j) {
            best = Some(snapshot.clone());
        }
        last = Some(snapshot);
        if groups == 1 {
            converged = true;
            break;
        }
        if let Some(p) = prev {
            if relative_change(p, j) < cfg.epsilon {
                converged = true;
                break;
            }
            if j < p {
                decreases += 1;
                if decreases >= 3 {
                    break;
                }
            } else {
                decreases = 0;
            }
        }
    }

    let best = if converged { last } else { best }.expect("at least one iteration");
    Ok(FitResult {
        groups,
        n: stream.n(),
        directed: stream.directed(),
        horizon: stream.horizon(),
        estimator: cfg.estimator,
        pi: best.pi,
        tau: best.tau,
        alpha: best.alpha,
        pairs: layout.pairs(),
        iterations: trace.len(),
        j: best.j,
        j_trace: trace,
        converged,
        init_index: 0,
        n_inits: 1,
        seed: None,
        estep_unconverged,
        max_mass_error,
        sparse: None,
    })
}

/// Picks the highest-`J` result; ties go to the earliest initialization.
pub(crate) fn best_of(results: Vec<Result<FitResult>>) -> Result<FitResult> {
    let total = results.len();
    let mut best: Option<FitResult> = None;
    let mut last_err = None;
    for (idx, r) in results.into_iter().enumerate() {
        match r {
            Ok(mut fit) => {
                fit.init_index = idx;
                fit.n_inits = total;
                if best.as_ref().is_none_or(|b| fit.j > b.j) {
                    best = Some(fit);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    match (best, last_err) {
        (Some(fit), _) => Ok(fit),
        (None, Some(e)) if total == 1 => Err(e),
        (None, _) => Err(PpsbmError::AllRunsFailed(total)),
    }
}

/// Full multi-start fit with `groups` latent groups.
pub fn run_vem(stream: &EventStream, groups: usize, cfg: &FitConfig, seed: u64) -> Result<FitResult> {
    cfg.validate()?;
    let mut init_rng = rng::for_stream(seed, 0);
    let inits = init_classifications(stream, groups, &cfg.init_options(), &mut init_rng)?;
    let results: Vec<Result<FitResult>> = inits.par_iter().map(|tau0| fit_from_init(stream, tau0, cfg)).collect();
    let mut fit = best_of(results)?;
    fit.seed = Some(seed);
    Ok(fit)
}

/// Estimates intensities with the memberships fixed at known labels.
pub fn oracle_fit(stream: &EventStream, labels: &[usize], groups: usize, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    if labels.len() != stream.n() {
        return Err(PpsbmError::LengthMismatch { left: labels.len(), right: stream.n() });
    }
    let tau = VariationalState::one_hot(labels, groups);
    let layout = PairLayout::new(groups, stream.directed());
    let stats = compute_stats(stream, &tau, cfg.estimator.stats_depth());
    let pi = update_pi(&tau);
    let alpha = m_step(&stats, &stats.dyad_mass, &event_times(stream), &cfg.estimator, stream.horizon());
    let max_mass_error = mass_conservation_error(&stats, &stats.dyad_mass, &alpha);
    let terms = IntensityTerms::new(stream, layout, &alpha, cfg.intensity_floor);
    let j = evaluate_j(&pi, &terms, &stats, &tau);
    Ok(FitResult {
        groups,
        n: stream.n(),
        directed: stream.directed(),
        horizon: stream.horizon(),
        estimator: cfg.estimator,
        pi,
        tau,
        alpha,
        pairs: layout.pairs(),
        j_trace: vec![j],
        j,
        converged: true,
        iterations: 1,
        init_index: 0,
        n_inits: 1,
        seed: None,
        estep_unconverged: 0,
        max_mass_error,
        sparse: None,
    })
}
