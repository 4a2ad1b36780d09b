//! Fitness surface for candidate emitter positions.
//!
//! A candidate is scored by how well it reproduces the measured range
//! differences: for each SU the residual is the measured value minus the
//! candidate's own range difference to that SU, and the fitness is the sum of
//! squared residuals. Lower is better and the noise-free truth scores zero.

use crate::error::{Error, Result};
use crate::measurement::RangeDifferenceSet;
use crate::scenario::{distance, Point, Scenario};

/// Anything a swarm can minimise over the plane.
pub trait Objective {
    fn evaluate(&self, candidate: Point) -> f64;
}

/// Sum-of-squared-residuals objective for one measurement set.
#[derive(Debug, Clone)]
pub struct LocalizationObjective {
    anchors: Vec<Point>,
    reference: Point,
    measurements: RangeDifferenceSet,
}

impl LocalizationObjective {
    pub fn new(
        anchors: Vec<Point>,
        reference: Point,
        measurements: RangeDifferenceSet,
    ) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::Usage("objective needs at least one SU".into()));
        }
        if anchors.len() != measurements.len() {
            return Err(Error::Usage(format!(
                "anchor/measurement length mismatch: {} SUs but {} values",
                anchors.len(),
                measurements.len()
            )));
        }
        Ok(LocalizationObjective {
            anchors,
            reference,
            measurements,
        })
    }

    /// Build from a deployed scenario, pairing measurement i with SU i.
    pub fn from_scenario(scenario: &Scenario, measurements: RangeDifferenceSet) -> Result<Self> {
        Self::new(scenario.sus.clone(), scenario.bs, measurements)
    }

    pub fn anchors(&self) -> &[Point] {
        &self.anchors
    }

    pub fn reference(&self) -> Point {
        self.reference
    }

    pub fn measurements(&self) -> &RangeDifferenceSet {
        &self.measurements
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    /// Residual vector at `candidate`: measured minus modelled range
    /// difference, one entry per SU.
    pub fn residuals(&self, candidate: Point) -> Vec<f64> {
        let d_ref = distance(candidate, self.reference);
        self.anchors
            .iter()
            .zip(&self.measurements.values_m)
            .map(|(anchor, value)| value - distance(candidate, *anchor) + d_ref)
            .collect()
    }

    /// Sum of squared residuals at `candidate`.
    pub fn fitness(&self, candidate: Point) -> f64 {
        let d_ref = distance(candidate, self.reference);
        self.anchors
            .iter()
            .zip(&self.measurements.values_m)
            .map(|(anchor, value)| {
                let r = value - distance(candidate, *anchor) + d_ref;
                r * r
            })
            .sum()
    }
}

impl Objective for LocalizationObjective {
    fn evaluate(&self, candidate: Point) -> f64 {
        self.fitness(candidate)
    }
}
