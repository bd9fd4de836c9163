//! Intensity functions and the block-model parameter `(pi, alpha)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{PpsbmError, Result};

/// Anything that can be evaluated as a nonnegative rate on `[0, T]`.
pub trait Intensity {
    fn value(&self, t: f64) -> f64;

    /// `A(t) = ∫₀ᵗ α(s) ds`.
    fn cumulative(&self, t: f64) -> f64;

    /// A finite bound `sup_{[0,T]} α`, used for thinning.
    fn upper_bound(&self) -> f64;
}

/// Analytic intensity descriptors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntensityFn {
    Constant { value: f64 },
    /// `amplitude * (1 + sin(2π (t + shift) / period))`.
    Sinusoid { amplitude: f64, shift: f64, period: f64 },
    /// Heights on a regular partition of `[0, horizon)` into `heights.len()` cells.
    PiecewiseConstant { horizon: f64, heights: Vec<f64> },
    /// `peak * max(0, 1 - |t - center| / half_width)`.
    Tent { peak: f64, center: f64, half_width: f64 },
}

impl IntensityFn {
    pub fn zero() -> Self {
        IntensityFn::Constant { value: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(PpsbmError::InvalidModel(msg));
        match self {
            IntensityFn::Constant { value } if !(*value >= 0.0 && value.is_finite()) => {
                bad(format!("constant intensity must be nonnegative, got {value}"))
            }
            IntensityFn::Sinusoid { amplitude, period, .. }
                if !(*amplitude >= 0.0 && amplitude.is_finite()) || !(*period > 0.0) =>
            {
                bad(format!("sinusoid needs amplitude >= 0 and period > 0, got {amplitude}, {period}"))
            }
            IntensityFn::PiecewiseConstant { horizon, heights }
                if heights.is_empty()
                    || !(*horizon > 0.0)
                    || heights.iter().any(|h| !(*h >= 0.0 && h.is_finite())) =>
            {
                bad("piecewise-constant intensity needs a positive horizon and nonnegative heights".into())
            }
            IntensityFn::Tent { peak, half_width, .. } if !(*peak >= 0.0) || !(*half_width > 0.0) => {
                bad(format!("tent needs peak >= 0 and half_width > 0, got {peak}, {half_width}"))
            }
            _ => Ok(()),
        }
    }
}

impl Intensity for IntensityFn {
    fn value(&self, t: f64) -> f64 {
        match self {
            IntensityFn::Constant { value } => *value,
            IntensityFn::Sinusoid { amplitude, shift, period } => {
                amplitude * (1.0 + (2.0 * PI * (t + shift) / period).sin())
            }
            IntensityFn::PiecewiseConstant { horizon, heights } => {
                let k = heights.len();
                let idx = ((t / horizon) * k as f64).floor();
                let idx = if idx <= 0.0 { 0 } else { (idx as usize).min(k - 1) };
                heights[idx]
            }
            IntensityFn::Tent { peak, center, half_width } => {
                peak * (1.0 - (t - center).abs() / half_width).max(0.0)
            }
        }
    }

    fn cumulative(&self, t: f64) -> f64 {
        match self {
            IntensityFn::Constant { value } => value * t,
            IntensityFn::Sinusoid { amplitude, shift, period } => {
                let w = 2.0 * PI / period;
                amplitude * t + amplitude / w * ((w * shift).cos() - (w * (t + shift)).cos())
            }
            IntensityFn::PiecewiseConstant { horizon, heights } => {
                let width = horizon / heights.len() as f64;
                let mut acc = 0.0;
                for (k, h) in heights.iter().enumerate() {
                    let lo = k as f64 * width;
                    if t <= lo {
                        break;
                    }
                    acc += h * (t.min(lo + width) - lo);
                }
                acc
            }
            IntensityFn::Tent { peak, center, half_width } => {
                let antiderivative = |x: f64| {
                    let u = (x - center) / half_width;
                    let mass = peak * half_width;
                    if u <= -1.0 {
                        0.0
                    } else if u <= 0.0 {
                        mass * (u + 1.0).powi(2) / 2.0
                    } else if u < 1.0 {
                        mass * (1.0 - (1.0 - u).powi(2) / 2.0)
                    } else {
                        mass
                    }
                };
                antiderivative(t) - antiderivative(0.0)
            }
        }
    }

    fn upper_bound(&self) -> f64 {
        match self {
            IntensityFn::Constant { value } => *value,
            IntensityFn::Sinusoid { amplitude, .. } => 2.0 * amplitude,
            IntensityFn::PiecewiseConstant { heights, .. } => heights.iter().copied().fold(0.0, f64::max),
            IntensityFn::Tent { peak, .. } => *peak,
        }
    }
}

/// Ordering of group pairs `(q, l)`.
///
/// Directed models carry all `Q²` ordered pairs; undirected models carry the
/// `Q(Q+1)/2` pairs with `q ≤ l`, and `(l, q)` maps to the same slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairLayout {
    pub groups: usize,
    pub directed: bool,
}

impl PairLayout {
    pub fn new(groups: usize, directed: bool) -> Self {
        Self { groups, directed }
    }

    pub fn len(&self) -> usize {
        let q = self.groups;
        if self.directed {
            q * q
        } else {
            q * (q + 1) / 2
        }
    }

    pub fn is_empty(&self) -> bool {
        self.groups == 0
    }

    pub fn index(&self, q: usize, l: usize) -> usize {
        let big_q = self.groups;
        if self.directed {
            q * big_q + l
        } else {
            let (a, b) = if q <= l { (q, l) } else { (l, q) };
            a * (2 * big_q - a + 1) / 2 + (b - a)
        }
    }

    /// Pairs in slot order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let q = self.groups;
        let directed = self.directed;
        (0..q)
            .flat_map(move |a| {
                let start = if directed { 0 } else { a };
                (start..q).map(move |b| (a, b))
            })
            .collect()
    }
}

/// Ground-truth or fitted parameters of the block model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityModel {
    pub pi: Vec<f64>,
    /// One intensity per slot of [`PairLayout`].
    pub alpha: Vec<IntensityFn>,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub directed: bool,
}

impl IntensityModel {
    pub fn new(pi: Vec<f64>, alpha: Vec<IntensityFn>, horizon: f64, directed: bool) -> Result<Self> {
        let model = Self { pi, alpha, horizon, directed };
        model.validate()?;
        Ok(model)
    }

    pub fn groups(&self) -> usize {
        self.pi.len()
    }

    pub fn layout(&self) -> PairLayout {
        PairLayout::new(self.groups(), self.directed)
    }

    pub fn alpha(&self, q: usize, l: usize) -> &IntensityFn {
        &self.alpha[self.layout().index(q, l)]
    }

    pub fn validate(&self) -> Result<()> {
        if self.pi.is_empty() {
            return Err(PpsbmError::InvalidModel("no groups".into()));
        }
        if self.pi.iter().any(|p| !(*p >= 0.0)) {
            return Err(PpsbmError::InvalidModel("negative group proportion".into()));
        }
        let sum: f64 = self.pi.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(PpsbmError::InvalidModel(format!("proportions sum to {sum}, not 1")));
        }
        if self.alpha.len() != self.layout().len() {
            return Err(PpsbmError::InvalidModel(format!(
                "expected {} intensities, got {}",
                self.layout().len(),
                self.alpha.len()
            )));
        }
        if !(self.horizon > 0.0) {
            return Err(PpsbmError::InvalidModel("horizon must be positive".into()));
        }
        self.alpha.iter().try_for_each(IntensityFn::validate)
    }

    /// Expected number of events per dyad, `Σ_{q,l} π_q π_l A^(q,l)(T)`.
    pub fn mean_events_per_dyad(&self) -> f64 {
        let q = self.groups();
        let mut acc = 0.0;
        for a in 0..q {
            for b in 0..q {
                acc += self.pi[a] * self.pi[b] * self.alpha(a, b).cumulative(self.horizon);
            }
        }
        acc
    }
}
