//! Inertia-weight and acceleration-coefficient schedules, and the 39 named
//! swarm variants composed from them.
//!
//! Thirteen inertia strategies (labels W0 to W12) pair with three
//! acceleration strategies (A1 to A3). Variant names follow the family
//! prefix (PSO for A1, MPSO for A2, IPSO for A3) plus the inertia label's
//! number as a suffix; no suffix means W0.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inertia strategy labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InertiaLabel {
    W0,
    W1,
    W2,
    W3,
    W4,
    W5,
    W6,
    W7,
    W8,
    W9,
    W10,
    W11,
    W12,
}

pub const INERTIA_LABELS: [InertiaLabel; 13] = [
    InertiaLabel::W0,
    InertiaLabel::W1,
    InertiaLabel::W2,
    InertiaLabel::W3,
    InertiaLabel::W4,
    InertiaLabel::W5,
    InertiaLabel::W6,
    InertiaLabel::W7,
    InertiaLabel::W8,
    InertiaLabel::W9,
    InertiaLabel::W10,
    InertiaLabel::W11,
    InertiaLabel::W12,
];

impl fmt::Display for InertiaLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}", *self as usize)
    }
}

/// Acceleration strategy labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AccelLabel {
    A1,
    A2,
    A3,
}

impl fmt::Display for AccelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AccelLabel::A1 => write!(f, "A1"),
            AccelLabel::A2 => write!(f, "A2"),
            AccelLabel::A3 => write!(f, "A3"),
        }
    }
}

/// Per-label constants for the inertia formulas. The defaults are the values
/// the strategies were published with; only tests have a reason to change
/// them.
#[derive(Debug, Clone)]
pub struct InertiaParams {
    pub w_max: f64,
    pub w_min: f64,
    /// Seed of the logistic chaos trajectory used by W7 and W12.
    pub chaos_init: f64,
    /// Offset inside the W4 logarithm; 1 makes w(0) equal w_max exactly.
    pub log_alpha: f64,
    /// W8 exponent.
    pub nonlinear_n: f64,
    /// W9 curvature constant.
    pub sugeno_s: f64,
    /// W10 starting weight and per-iteration growth factor.
    pub growth_initial: f64,
    pub growth_rate: f64,
    /// W11 starting weight and decay shape.
    pub exp_initial: f64,
    pub exp_a: f64,
    pub exp_b: f64,
}

impl Default for InertiaParams {
    fn default() -> Self {
        InertiaParams {
            w_max: 0.9,
            w_min: 0.4,
            chaos_init: 0.3,
            log_alpha: 1.0,
            nonlinear_n: 0.7,
            sugeno_s: -0.7,
            growth_initial: 0.1,
            growth_rate: 1.00002,
            exp_initial: 0.4,
            exp_a: 2.0,
            exp_b: 1.5,
        }
    }
}

/// Mutable per-run state carried between weight evaluations. Only the
/// chaotic labels touch it.
#[derive(Debug, Clone)]
pub struct ScheduleState {
    chaos: f64,
}

impl ScheduleState {
    /// One logistic-map step; returns the new chaos value.
    fn advance_chaos(&mut self) -> f64 {
        self.chaos = 4.0 * self.chaos * (1.0 - self.chaos);
        self.chaos
    }

    pub fn chaos(&self) -> f64 {
        self.chaos
    }
}

/// One inertia strategy with its constants.
#[derive(Debug, Clone)]
pub struct InertiaSchedule {
    pub label: InertiaLabel,
    pub params: InertiaParams,
}

impl InertiaSchedule {
    pub fn new(label: InertiaLabel) -> Self {
        InertiaSchedule {
            label,
            params: InertiaParams::default(),
        }
    }

    pub fn new_state(&self) -> ScheduleState {
        ScheduleState {
            chaos: self.params.chaos_init,
        }
    }

    /// Inertia weight for 0-based iteration `t` of `t_max` total.
    ///
    /// W2 and W12 draw exactly one uniform sample from `rng`; W7 and W12
    /// advance the chaos state exactly once. All other labels are pure.
    pub fn weight<R: Rng>(
        &self,
        t: usize,
        t_max: usize,
        state: &mut ScheduleState,
        rng: &mut R,
    ) -> f64 {
        debug_assert!(t_max >= 1 && t <= t_max);
        let p = &self.params;
        let tau = t as f64 / t_max as f64;
        let span = p.w_max - p.w_min;
        match self.label {
            InertiaLabel::W0 => 0.9,
            InertiaLabel::W1 => p.w_max - span * tau,
            InertiaLabel::W2 => 0.5 + rng.gen::<f64>() / 2.0,
            // The exponent is clamped at zero so the first iteration does not
            // overshoot w_max.
            InertiaLabel::W3 => p.w_min + span * 0.95f64.powi(t.saturating_sub(1) as i32),
            InertiaLabel::W4 => p.w_max - span * (p.log_alpha + 10.0 * tau).log10(),
            InertiaLabel::W5 => {
                (p.w_min + p.w_max) / 2.0
                    + (p.w_min - p.w_max) / 2.0 * (2.0 * std::f64::consts::PI * tau).cos()
            }
            InertiaLabel::W6 => p.w_min + span * (-10.0 * tau).exp(),
            InertiaLabel::W7 => span * ((t_max - t) as f64 / t_max as f64) + p.w_min * state.advance_chaos(),
            InertiaLabel::W8 => {
                ((t_max - t) as f64).powf(p.nonlinear_n) / (t_max as f64).powf(p.nonlinear_n) * span
                    + p.w_min
            }
            InertiaLabel::W9 => (1.0 - tau) / (1.0 - p.sugeno_s * tau),
            InertiaLabel::W10 => p.growth_initial * p.growth_rate.powi(t as i32),
            InertiaLabel::W11 => p.exp_initial * (-p.exp_a * tau.powf(p.exp_b)).exp(),
            InertiaLabel::W12 => rng.gen::<f64>() / 2.0 + state.advance_chaos() / 2.0,
        }
    }
}

/// One acceleration strategy.
#[derive(Debug, Clone, Copy)]
pub struct AccelSchedule {
    pub label: AccelLabel,
}

impl AccelSchedule {
    pub fn new(label: AccelLabel) -> Self {
        AccelSchedule { label }
    }

    /// `(c1, c2)` for 0-based iteration `t` of `t_max` total.
    pub fn coeffs(&self, t: usize, t_max: usize) -> (f64, f64) {
        debug_assert!(t_max >= 1 && t <= t_max);
        let tau = t as f64 / t_max as f64;
        match self.label {
            AccelLabel::A1 => (2.0, 2.0),
            AccelLabel::A2 => (-2.05 * tau + 2.55, tau + 1.25),
            AccelLabel::A3 => (
                2.5 + 2.0 * tau * tau - 4.0 * tau,
                0.5 - 2.0 * tau * tau + 4.0 * tau,
            ),
        }
    }
}

/// One named variant: an inertia label paired with an acceleration label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariantSpec {
    pub name: &'static str,
    pub inertia: InertiaLabel,
    pub accel: AccelLabel,
}

impl VariantSpec {
    /// Exact-spelling lookup in the variant table.
    pub fn by_name(name: &str) -> Result<&'static VariantSpec> {
        variant_table()
            .iter()
            .find(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariant(name.to_string()))
    }

    pub fn inertia_schedule(&self) -> InertiaSchedule {
        InertiaSchedule::new(self.inertia)
    }

    pub fn accel_schedule(&self) -> AccelSchedule {
        AccelSchedule::new(self.accel)
    }
}

macro_rules! variants {
    ($($name:literal: $w:ident, $a:ident;)*) => {
        [$(VariantSpec {
            name: $name,
            inertia: InertiaLabel::$w,
            accel: AccelLabel::$a,
        },)*]
    };
}

static VARIANTS: [VariantSpec; 39] = variants![
    "PSO": W0, A1;
    "PSO1": W1, A1;
    "PSO2": W2, A1;
    "PSO3": W3, A1;
    "PSO4": W4, A1;
    "PSO5": W5, A1;
    "PSO6": W6, A1;
    "PSO7": W7, A1;
    "PSO8": W8, A1;
    "PSO9": W9, A1;
    "PSO10": W10, A1;
    "PSO11": W11, A1;
    "PSO12": W12, A1;
    "MPSO": W0, A2;
    "MPSO1": W1, A2;
    "MPSO2": W2, A2;
    "MPSO3": W3, A2;
    "MPSO4": W4, A2;
    "MPSO5": W5, A2;
    "MPSO6": W6, A2;
    "MPSO7": W7, A2;
    "MPSO8": W8, A2;
    "MPSO9": W9, A2;
    "MPSO10": W10, A2;
    "MPSO11": W11, A2;
    "MPSO12": W12, A2;
    "IPSO": W0, A3;
    "IPSO1": W1, A3;
    "IPSO2": W2, A3;
    "IPSO3": W3, A3;
    "IPSO4": W4, A3;
    "IPSO5": W5, A3;
    "IPSO6": W6, A3;
    "IPSO7": W7, A3;
    "IPSO8": W8, A3;
    "IPSO9": W9, A3;
    "IPSO10": W10, A3;
    "IPSO11": W11, A3;
    "IPSO12": W12, A3;
];

/// All 39 variants, A1 family first, then A2, then A3, W0 through W12 within
/// each family.
pub fn variant_table() -> &'static [VariantSpec; 39] {
    &VARIANTS
}
