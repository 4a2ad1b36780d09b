//! Linearized least-squares baseline.
//!
//! Classical Taylor-series position estimation: linearize the range-difference
//! model around the current iterate and solve the weighted normal equations
//! for a correction, repeating until the step is small. Deliberately plain
//! Gauss-Newton with no damping or line search, so the method's documented
//! sensitivity to its starting point is preserved rather than hidden.

use crate::error::{Error, Result};
use crate::objective::LocalizationObjective;
use crate::scenario::{distance, Point};

/// Iterates this close to an anchor make the unit-vector Jacobian undefined.
const MIN_ANCHOR_DISTANCE_M: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct TseConfig {
    /// Starting point; `None` means the centroid of the SU positions.
    pub initial_guess: Option<Point>,
    pub max_iterations: usize,
    /// Stop once the correction norm falls below this, in meters.
    pub step_tolerance_m: f64,
    /// Weight residuals by inverse measurement variance. Falls back to
    /// uniform weights when any variance is zero (noise-free data).
    pub weighting: bool,
}

impl Default for TseConfig {
    fn default() -> Self {
        TseConfig {
            initial_guess: None,
            max_iterations: 20,
            step_tolerance_m: 0.01,
            weighting: true,
        }
    }
}

impl TseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::Config {
                field: "max_iterations",
                message: "need at least 1 iteration".into(),
            });
        }
        if !self.step_tolerance_m.is_finite() || self.step_tolerance_m <= 0.0 {
            return Err(Error::Config {
                field: "step_tolerance_m",
                message: format!("must be positive and finite, got {}", self.step_tolerance_m),
            });
        }
        if let Some(p) = self.initial_guess {
            if !p.is_finite() {
                return Err(Error::Config {
                    field: "initial_guess",
                    message: "must be finite".into(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TseResult {
    pub estimate: Point,
    pub converged: bool,
    pub iterations_used: usize,
}

/// Jacobian of the modelled range differences at `p`: row i is the unit
/// vector from SU i toward `p` minus the unit vector from the reference
/// toward `p`, so each row's magnitude is at most 2.
pub fn jacobian(obj: &LocalizationObjective, p: Point) -> Result<Vec<[f64; 2]>> {
    let d_ref = distance(p, obj.reference());
    if d_ref < MIN_ANCHOR_DISTANCE_M {
        return Err(Error::Domain(
            "Jacobian undefined: point coincides with the reference receiver".into(),
        ));
    }
    let u_ref = [
        (p.x - obj.reference().x) / d_ref,
        (p.y - obj.reference().y) / d_ref,
    ];
    obj.anchors()
        .iter()
        .enumerate()
        .map(|(i, anchor)| {
            let d = distance(p, *anchor);
            if d < MIN_ANCHOR_DISTANCE_M {
                return Err(Error::Domain(format!(
                    "Jacobian undefined: point coincides with SU {i}"
                )));
            }
            Ok([
                (p.x - anchor.x) / d - u_ref[0],
                (p.y - anchor.y) / d - u_ref[1],
            ])
        })
        .collect()
}

fn residual_weights(obj: &LocalizationObjective, weighting: bool) -> Vec<f64> {
    let variances = &obj.measurements().variances_m2;
    if weighting && variances.iter().all(|v| *v > 0.0) {
        variances.iter().map(|v| 1.0 / v).collect()
    } else {
        vec![1.0; variances.len()]
    }
}

/// One Gauss-Newton correction: solve `(J^T W J) delta = J^T W r` and return
/// the updated point together with the step norm in meters.
fn gauss_newton_step(
    obj: &LocalizationObjective,
    p: Point,
    weights: &[f64],
) -> Result<(Point, f64)> {
    let residuals = obj.residuals(p);
    let jac = jacobian(obj, p)?;

    let (mut a11, mut a12, mut a22) = (0.0f64, 0.0f64, 0.0f64);
    let (mut b1, mut b2) = (0.0f64, 0.0f64);
    for ((row, r), w) in jac.iter().zip(&residuals).zip(weights) {
        a11 += w * row[0] * row[0];
        a12 += w * row[0] * row[1];
        a22 += w * row[1] * row[1];
        b1 += w * row[0] * r;
        b2 += w * row[1] * r;
    }

    let det = a11 * a22 - a12 * a12;
    let scale = a11.abs().max(a22.abs()).max(a12.abs());
    if !det.is_finite() || det.abs() <= 1e-12 * scale * scale || scale == 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "normal matrix is singular at ({}, {})",
            p.x, p.y
        )));
    }

    let dx = (a22 * b1 - a12 * b2) / det;
    let dy = (a11 * b2 - a12 * b1) / det;
    Ok((Point::new(p.x + dx, p.y + dy), (dx * dx + dy * dy).sqrt()))
}

/// Iterate Gauss-Newton from the configured starting point.
///
/// Divergence to a non-finite iterate and singular geometry are reported as
/// errors; running out of iterations is not an error, just `converged=false`.
pub fn tse_solve(obj: &LocalizationObjective, cfg: &TseConfig) -> Result<TseResult> {
    cfg.validate()?;
    if obj.len() < 2 {
        return Err(Error::Usage(format!(
            "need at least 2 range differences for a 2-D solve, got {}",
            obj.len()
        )));
    }
    let mut p = cfg.initial_guess.unwrap_or_else(|| {
        let n = obj.anchors().len() as f64;
        let (sx, sy) = obj
            .anchors()
            .iter()
            .fold((0.0, 0.0), |(sx, sy), a| (sx + a.x, sy + a.y));
        Point::new(sx / n, sy / n)
    });
    let weights = residual_weights(obj, cfg.weighting);

    for iteration in 1..=cfg.max_iterations {
        let (next, step) = gauss_newton_step(obj, p, &weights)?;
        if !next.is_finite() {
            return Err(Error::Divergence(format!(
                "non-finite iterate after {iteration} steps from ({}, {})",
                p.x, p.y
            )));
        }
        p = next;
        if step < cfg.step_tolerance_m {
            return Ok(TseResult {
                estimate: p,
                converged: true,
                iterations_used: iteration,
            });
        }
    }
    Ok(TseResult {
        estimate: p,
        converged: false,
        iterations_used: cfg.max_iterations,
    })
}
