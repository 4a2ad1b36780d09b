//! Accuracy statistics over repeated localizations of one true position.

use crate::error::{Error, Result};
use crate::scenario::Point;

/// Estimates from repeated trials of the same scenario, plus the truth they
/// are measured against.
#[derive(Debug, Clone)]
pub struct TrialErrorSet {
    pub estimates: Vec<Point>,
    pub truth: Point,
}

/// Mean squared error statistics for one estimate population.
///
/// `mse_m2` averages the squared distance per trial; `bias2_m2` is the
/// squared distance of the population mean from the truth. The two coincide
/// only when the estimator has no spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseReport {
    pub mse_m2: f64,
    pub rms_m: f64,
    pub bias2_m2: f64,
}

impl TrialErrorSet {
    pub fn new(estimates: Vec<Point>, truth: Point) -> Self {
        TrialErrorSet { estimates, truth }
    }

    fn require_non_empty(&self) -> Result<()> {
        if self.estimates.is_empty() {
            return Err(Error::Usage(
                "statistics need at least one estimate".into(),
            ));
        }
        Ok(())
    }

    /// Componentwise arithmetic mean of the estimates.
    pub fn mean_position(&self) -> Result<Point> {
        self.require_non_empty()?;
        let n = self.estimates.len() as f64;
        let (sx, sy) = self
            .estimates
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Ok(Point::new(sx / n, sy / n))
    }

    pub fn mse(&self) -> Result<MseReport> {
        self.require_non_empty()?;
        let n = self.estimates.len() as f64;
        let mse_m2 = self
            .estimates
            .iter()
            .map(|p| {
                let dx = p.x - self.truth.x;
                let dy = p.y - self.truth.y;
                dx * dx + dy * dy
            })
            .sum::<f64>()
            / n;
        let mean = self.mean_position()?;
        let bx = mean.x - self.truth.x;
        let by = mean.y - self.truth.y;
        Ok(MseReport {
            mse_m2,
            rms_m: mse_m2.sqrt(),
            bias2_m2: bx * bx + by * by,
        })
    }

    /// Distance of each estimate from the truth, in trial order.
    pub fn errors_m(&self) -> Vec<f64> {
        self.estimates
            .iter()
            .map(|p| p.distance(self.truth))
            .collect()
    }
}

/// Empirical CDF evaluated at the sorted sample values: one `(z, F)` pair per
/// sample, `F(z) = count(errors <= z) / n`, no interpolation.
pub fn cdf_curve(errors: &[f64]) -> Result<Vec<(f64, f64)>> {
    if errors.is_empty() {
        return Err(Error::Usage("CDF needs at least one error sample".into()));
    }
    let n = errors.len();
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let z = sorted[i];
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == z {
            j += 1;
        }
        let f = (j + 1) as f64 / n as f64;
        for _ in i..=j {
            out.push((z, f));
        }
        i = j + 1;
    }
    Ok(out)
}

/// Smallest sample value whose empirical CDF reaches one half.
pub fn median_error(errors: &[f64]) -> Result<f64> {
    let curve = cdf_curve(errors)?;
    Ok(curve
        .iter()
        .find(|(_, f)| *f >= 0.5)
        .map(|(z, _)| *z)
        .expect("CDF always reaches 1"))
}
