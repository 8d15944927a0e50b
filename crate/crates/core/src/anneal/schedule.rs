//! Adaptive schedules: the 3D timing scale ζ(w), the timing weight θ(w),
//! temperature cooling and the per-step move budget.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Schedule bounds and exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub zeta_min: f64,
    pub zeta_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub w_min: f64,
    pub w_max: f64,
    /// 1 or 2.
    pub p_zeta: u32,
    pub p_theta: u32,
}

/// Tuned schedule presets, one per base architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Cb,
    CbO,
    CbI,
    Sb,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Cb, Preset::CbO, Preset::CbI, Preset::Sb];

    pub fn hyperparams(self) -> Hyperparams {
        let (p_zeta, p_theta, theta_min, theta_max, zeta_max, zeta_min, w_max, w_min) = match self {
            Preset::Cb => (1, 1, 0.03, 0.51, 1.6, 1.0, 0.41, 0.32),
            Preset::CbO => (1, 1, 0.09, 0.80, 1.4, 1.0, 0.31, 0.16),
            Preset::CbI => (1, 1, 0.03, 0.51, 2.8, 1.0, 0.79, 0.61),
            Preset::Sb => (2, 1, 0.35, 0.79, 2.0, 1.0, 0.26, 0.15),
        };
        Hyperparams {
            zeta_min,
            zeta_max,
            theta_min,
            theta_max,
            w_min,
            w_max,
            p_zeta,
            p_theta,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Cb => "cb",
            Preset::CbO => "cb-o",
            Preset::CbI => "cb-i",
            Preset::Sb => "sb",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace('_', "-");
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str() == norm)
            .ok_or_else(|| Error::Config(format!("unknown preset `{s}`")))
    }
}

impl Default for Hyperparams {
    fn default() -> Self {
        Preset::Cb.hyperparams()
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.zeta_min <= self.zeta_max
            && self.theta_min <= self.theta_max
            && self.w_min < self.w_max
            && matches!(self.p_zeta, 1 | 2)
            && self.p_theta >= 1
            && [self.zeta_min, self.zeta_max, self.theta_min, self.theta_max, self.w_min, self.w_max]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("inconsistent hyperparameters {self:?}")))
        }
    }
}

/// ζ(w): nonincreasing from ζ_max at w ≥ w_max to ζ_min at w ≤ w_min.
pub fn zeta(w: f64, hp: &Hyperparams) -> f64 {
    let w = w.clamp(hp.w_min, hp.w_max);
    let f = ((hp.w_max - w) / (hp.w_max - hp.w_min)).powi(hp.p_zeta as i32);
    // convex form: both end points come out exactly
    hp.zeta_min * f + hp.zeta_max * (1.0 - f)
}

/// θ(w) before the monotone floor is applied.
pub fn theta_raw(w: f64, hp: &Hyperparams) -> f64 {
    if w > 0.15 {
        let f = w.powi(hp.p_theta as i32);
        hp.theta_min * f + hp.theta_max * (1.0 - f)
    } else {
        hp.theta_max
    }
}

/// θ(w) kept nondecreasing over a run: the result is at least `floor`,
/// and `floor` is raised to it.
pub fn theta(w: f64, hp: &Hyperparams, floor: &mut f64) -> f64 {
    let t = theta_raw(w, hp).max(*floor);
    *floor = t;
    t
}

/// Temperature multiplier for the step's acceptance rate.
pub fn cooling_factor(alpha: f64) -> f64 {
    if alpha > 0.96 {
        0.5
    } else if alpha > 0.8 {
        0.9
    } else if alpha > 0.15 {
        0.95
    } else {
        0.8
    }
}

/// `round(inner_num * n_blk^(4/3))`, at least one move.
pub fn moves_per_step(n_blk: usize, inner_num: f64) -> usize {
    ((inner_num * (n_blk as f64).powf(4.0 / 3.0)).round() as usize).max(1)
}

/// Range-limit update: `rlim * (1 - 0.44 + alpha)` clamped to `[1, max]`.
pub fn update_rlim(rlim: f64, alpha: f64, max: f64) -> f64 {
    (rlim * (1.0 - 0.44 + alpha)).clamp(1.0, max)
}

/// Rolling mean of the last five acceptance rates.
#[derive(Debug, Clone, Default)]
pub struct AcceptanceWindow {
    rates: VecDeque<f64>,
}

impl AcceptanceWindow {
    pub const LEN: usize = 5;

    pub fn push(&mut self, alpha: f64) {
        if self.rates.len() == Self::LEN {
            self.rates.pop_front();
        }
        self.rates.push_back(alpha);
    }

    /// Mean of the stored rates; 1.0 before the first step.
    pub fn mean(&self) -> f64 {
        if self.rates.is_empty() {
            1.0
        } else {
            self.rates.iter().sum::<f64>() / self.rates.len() as f64
        }
    }
}
