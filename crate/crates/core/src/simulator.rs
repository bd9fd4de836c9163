//! Sampling from the Poisson process stochastic block model.
//!
//! Event times on each dyad are drawn by Lewis–Shedler thinning against the
//! analytic bound reported by [`Intensity::upper_bound`].

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{PpsbmError, Result};
use crate::events::{dyads, Event, EventStream};
use crate::intensity::{Intensity, IntensityFn, IntensityModel, PairLayout};
use crate::rng::Rng;

/// Draws `n` i.i.d. group labels (0-based) from the proportions `pi`.
pub fn sample_memberships(pi: &[f64], n: usize, rng: &mut Rng) -> Vec<usize> {
    let total: f64 = pi.iter().sum();
    (0..n)
        .map(|_| {
            let u = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            for (q, p) in pi.iter().enumerate() {
                acc += p;
                if u < acc {
                    return q;
                }
            }
            // u landed on the rounding slack; take the last group with mass
            pi.iter().rposition(|&p| p > 0.0).unwrap_or(0)
        })
        .collect()
}

/// Sorted event times of a Poisson process with the given intensity on `[0, T)`.
pub fn sample_inhomogeneous_poisson(
    intensity: &dyn Intensity,
    horizon: f64,
    rng: &mut Rng,
) -> Result<Vec<f64>> {
    let bound = intensity.upper_bound();
    if !(bound >= 0.0 && bound.is_finite()) {
        return Err(PpsbmError::InvalidModel(format!("intensity bound {bound} is not a finite nonnegative value")));
    }
    let mut times = Vec::new();
    if bound == 0.0 {
        return Ok(times);
    }
    let mut t = 0.0;
    loop {
        // 1 - U lies in (0, 1], so the log is finite
        t += -(1.0 - rng.gen::<f64>()).ln() / bound;
        if t >= horizon {
            break;
        }
        let v = intensity.value(t);
        if v < 0.0 {
            return Err(PpsbmError::InvalidModel(format!("negative intensity {v} at t = {t}")));
        }
        if rng.gen::<f64>() * bound < v {
            times.push(t);
        }
    }
    Ok(times)
}

/// A simulated dataset with its latent structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub stream: EventStream,
    /// 0-based group labels.
    pub labels: Vec<usize>,
    /// Per-dyad activation flags; all `true` for the dense model.
    pub active: Vec<bool>,
}

/// Simulates a dataset from proportions and per-slot intensities.
///
/// `beta`, when given, holds per-slot activation probabilities; inactive
/// dyads emit no events.
pub fn simulate_with<I: Intensity>(
    pi: &[f64],
    alpha: &[I],
    horizon: f64,
    directed: bool,
    n: usize,
    beta: Option<&[f64]>,
    rng: &mut Rng,
) -> Result<Simulated> {
    if n < 2 {
        return Err(PpsbmError::InvalidConfig(format!("need at least 2 nodes, got {n}")));
    }
    let layout = PairLayout::new(pi.len(), directed);
    if alpha.len() != layout.len() {
        return Err(PpsbmError::InvalidModel(format!(
            "expected {} intensities, got {}",
            layout.len(),
            alpha.len()
        )));
    }
    if let Some(beta) = beta {
        if beta.len() != layout.len() || beta.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return Err(PpsbmError::InvalidModel("activation probabilities must lie in [0, 1]".into()));
        }
    }
    let labels = sample_memberships(pi, n, rng);
    let mut events = Vec::new();
    let mut active = Vec::new();
    for (i, j) in dyads(n, directed) {
        let slot = layout.index(labels[i], labels[j]);
        let on = match beta {
            Some(beta) => rng.gen::<f64>() < beta[slot],
            None => true,
        };
        active.push(on);
        if !on {
            continue;
        }
        for time in sample_inhomogeneous_poisson(&alpha[slot], horizon, rng)? {
            events.push(Event { time, sender: i, receiver: j });
        }
    }
    let stream = EventStream::new(n, horizon, directed, events)?;
    Ok(Simulated { stream, labels, active })
}

pub fn simulate_ppsbm(model: &IntensityModel, n: usize, rng: &mut Rng) -> Result<Simulated> {
    model.validate()?;
    simulate_with(&model.pi, &model.alpha, model.horizon, model.directed, n, None, rng)
}

/// Sparse variant: dyad `(i, j)` is active with probability `β_{Z_i, Z_j}`.
pub fn simulate_sparse(model: &IntensityModel, beta: &[f64], n: usize, rng: &mut Rng) -> Result<Simulated> {
    model.validate()?;
    simulate_with(&model.pi, &model.alpha, model.horizon, model.directed, n, Some(beta), rng)
}

/// A synthetic benchmark instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub model: IntensityModel,
}

/// Two-group undirected affiliation model with sinusoidal intensities
/// `α_in(t) = 10(1 + sin 2πt)` and `α_out(t) = 10(1 + sin 2π(t + φ))` on `[0, 1)`.
pub fn scenario1_model(phi: f64) -> Result<IntensityModel> {
    if !phi.is_finite() {
        return Err(PpsbmError::InvalidConfig(format!("shift must be finite, got {phi}")));
    }
    let within = IntensityFn::Sinusoid { amplitude: 10.0, shift: 0.0, period: 1.0 };
    let between = IntensityFn::Sinusoid { amplitude: 10.0, shift: phi, period: 1.0 };
    IntensityModel::new(vec![0.5, 0.5], vec![within.clone(), between, within], 1.0, false)
}

/// Three-group undirected model mixing piecewise-constant and smooth shapes.
///
/// | pair  | intensity on `[0, 1)`                     |
/// |-------|-------------------------------------------|
/// | (1,1) | 4 on `[0, ½)`, 1 on `[½, 1)`              |
/// | (1,2) | `8(1 + sin 2πt)`                          |
/// | (1,3) | 3                                         |
/// | (2,2) | `12 max(0, 1 − 2|t − ½|)`                 |
/// | (2,3) | 2, 14, 6, 10 on the four quarter cells    |
/// | (3,3) | `5(1 + cos 2πt)`                          |
pub fn scenario2_model() -> IntensityModel {
    let alpha = vec![
        IntensityFn::PiecewiseConstant { horizon: 1.0, heights: vec![4.0, 1.0] },
        IntensityFn::Sinusoid { amplitude: 8.0, shift: 0.0, period: 1.0 },
        IntensityFn::Constant { value: 3.0 },
        IntensityFn::Tent { peak: 12.0, center: 0.5, half_width: 0.5 },
        IntensityFn::PiecewiseConstant { horizon: 1.0, heights: vec![2.0, 14.0, 6.0, 10.0] },
        IntensityFn::Sinusoid { amplitude: 5.0, shift: 0.25, period: 1.0 },
    ];
    IntensityModel::new(vec![1.0 / 3.0; 3], alpha, 1.0, false).expect("static scenario is valid")
}

pub fn scenario1(phi: f64, n: usize, rng: &mut Rng) -> Result<(Simulated, IntensityModel)> {
    let model = scenario1_model(phi)?;
    let data = simulate_ppsbm(&model, n, rng)?;
    Ok((data, model))
}

pub fn scenario2(n: usize, rng: &mut Rng) -> Result<(Simulated, IntensityModel)> {
    if n < 3 {
        return Err(PpsbmError::InvalidConfig(format!("scenario 2 needs n >= 3, got {n}")));
    }
    let model = scenario2_model();
    let data = simulate_ppsbm(&model, n, rng)?;
    Ok((data, model))
}
