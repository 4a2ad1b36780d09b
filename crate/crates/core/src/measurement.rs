//! Range-difference synthesis.
//!
//! Each SU reports the difference between its distance to the emitter and the
//! base station's distance to the emitter, corrupted by zero-mean Gaussian
//! noise whose variance follows from the time-of-arrival estimation bound at
//! that SU's SNR. SNR decays with distance according to a suburban Hata
//! path-loss term, referenced to the emitter-to-BS distance.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{distance, Point, Scenario};

/// Propagation speed used to convert arrival-time spreads to meters.
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Distances below this make the path-loss term meaningless and are rejected.
pub const GUARD_DISTANCE_M: f64 = 1.0;

/// Noise model parameters shared by all SUs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    /// Receiver bandwidth in hertz.
    pub bandwidth_hz: f64,
    /// SNR in dB that a receiver would see at the emitter-to-BS distance.
    pub snr0_db: f64,
    /// Emitter antenna height in meters, used by the path-loss exponent.
    pub antenna_height_m: f64,
    /// When false the synthesized values are exact and variances are zero.
    pub enabled: bool,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            bandwidth_hz: 6.0e6,
            snr0_db: -10.0,
            antenna_height_m: 1.5,
            enabled: true,
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        if !self.bandwidth_hz.is_finite() || self.bandwidth_hz <= 0.0 {
            return Err(Error::Config {
                field: "bandwidth_hz",
                message: format!("must be positive and finite, got {}", self.bandwidth_hz),
            });
        }
        if !self.snr0_db.is_finite() {
            return Err(Error::Config {
                field: "snr0_db",
                message: "must be finite".into(),
            });
        }
        if !self.antenna_height_m.is_finite() || self.antenna_height_m <= 0.0 {
            return Err(Error::Config {
                field: "antenna_height_m",
                message: format!("must be positive and finite, got {}", self.antenna_height_m),
            });
        }
        Ok(())
    }
}

/// Identifier of the common reference receiver for range differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReferenceNode {
    BaseStation,
}

/// One range difference per SU, relative to the reference receiver, plus the
/// noise variance each value was drawn with (zero when noise is disabled).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeDifferenceSet {
    pub reference: ReferenceNode,
    pub values_m: Vec<f64>,
    pub variances_m2: Vec<f64>,
}

impl RangeDifferenceSet {
    pub fn len(&self) -> usize {
        self.values_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values_m.is_empty()
    }

    /// Rows of `su_index,value_m,variance_m2`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("su_index,value_m,variance_m2\n");
        for (i, (v, var)) in self.values_m.iter().zip(&self.variances_m2).enumerate() {
            let _ = writeln!(out, "{},{},{}", i, v, var);
        }
        out
    }
}

/// Noise-free range difference for one SU: distance from the emitter to the
/// SU minus distance from the emitter to the reference.
pub fn true_range_difference(emitter: Point, su: Point, reference: Point) -> f64 {
    distance(emitter, su) - distance(emitter, reference)
}

/// Extra path loss in dB at distance `d_m` relative to the reference distance
/// `d0_m`, for a transmit antenna `antenna_height_m` tall. Suburban Hata
/// distance term; equal distances give exactly zero.
pub fn path_loss_delta_db(d_m: f64, d0_m: f64, antenna_height_m: f64) -> Result<f64> {
    if !antenna_height_m.is_finite() || antenna_height_m <= 0.0 {
        return Err(Error::Domain(format!(
            "antenna height must be positive, got {antenna_height_m}"
        )));
    }
    if !d_m.is_finite() || d_m < GUARD_DISTANCE_M {
        return Err(Error::Domain(format!(
            "path-loss distance {d_m} m is below the {GUARD_DISTANCE_M} m guard"
        )));
    }
    if !d0_m.is_finite() || d0_m < GUARD_DISTANCE_M {
        return Err(Error::Domain(format!(
            "path-loss reference distance {d0_m} m is below the {GUARD_DISTANCE_M} m guard"
        )));
    }
    Ok((44.9 - 6.55 * antenna_height_m.log10()) * (d_m / d0_m).log10())
}

/// SNR at an SU given the reference SNR and the extra path loss on that link.
pub fn snr_at_su_db(snr0_db: f64, delta_path_loss_db: f64) -> f64 {
    snr0_db - delta_path_loss_db
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Variance bound for a time-of-arrival estimate, in seconds squared, taken
/// with equality: `1 / (8 pi^2 B^2 SNR)` with SNR linear.
pub fn toa_variance_s2(bandwidth_hz: f64, snr_linear: f64) -> Result<f64> {
    if !bandwidth_hz.is_finite() || bandwidth_hz <= 0.0 {
        return Err(Error::Domain(format!(
            "bandwidth must be positive, got {bandwidth_hz}"
        )));
    }
    if !snr_linear.is_finite() || snr_linear <= 0.0 {
        return Err(Error::Domain(format!(
            "linear SNR must be positive, got {snr_linear}"
        )));
    }
    Ok(1.0 / (8.0 * PI * PI * bandwidth_hz * bandwidth_hz * snr_linear))
}

/// Synthesize one range-difference set for the scenario's emitter.
///
/// The range-difference variance for SU i combines the TOA variances at the
/// SU and at the reference, scaled by the propagation speed squared. One
/// Gaussian sample is drawn per SU in index order, so results are fully
/// determined by the RNG state. With noise disabled no samples are drawn,
/// values are exact, and all variances are zero.
pub fn synthesize<R: Rng>(
    scenario: &Scenario,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<RangeDifferenceSet> {
    noise.validate()?;
    let emitter = scenario.emitter.ok_or_else(|| {
        Error::Usage("cannot synthesize measurements: scenario has no emitter".into())
    })?;

    let n = scenario.sus.len();
    let mut values = Vec::with_capacity(n);
    let mut variances = Vec::with_capacity(n);

    if !noise.enabled {
        for su in &scenario.sus {
            values.push(true_range_difference(emitter, *su, scenario.bs));
            variances.push(0.0);
        }
        return Ok(RangeDifferenceSet {
            reference: ReferenceNode::BaseStation,
            values_m: values,
            variances_m2: variances,
        });
    }

    let d0 = distance(emitter, scenario.bs);
    if d0 < GUARD_DISTANCE_M {
        return Err(Error::Domain(format!(
            "emitter is {d0} m from the base station, below the {GUARD_DISTANCE_M} m guard"
        )));
    }
    let snr0_linear = db_to_linear(noise.snr0_db);
    let sigma0_s2 = toa_variance_s2(noise.bandwidth_hz, snr0_linear)?;
    let c2 = SPEED_OF_LIGHT_M_S * SPEED_OF_LIGHT_M_S;

    for (i, su) in scenario.sus.iter().enumerate() {
        let d_i = distance(emitter, *su);
        if d_i < GUARD_DISTANCE_M {
            return Err(Error::Domain(format!(
                "SU {i} is {d_i} m from the emitter, below the {GUARD_DISTANCE_M} m guard"
            )));
        }
        let delta_lp = path_loss_delta_db(d_i, d0, noise.antenna_height_m)?;
        let snr_i_linear = db_to_linear(snr_at_su_db(noise.snr0_db, delta_lp));
        let sigma_i_s2 = toa_variance_s2(noise.bandwidth_hz, snr_i_linear)?;
        let variance_m2 = c2 * (sigma_i_s2 + sigma0_s2);
        let normal = Normal::new(0.0, variance_m2.sqrt())
            .map_err(|e| Error::Domain(format!("bad noise std for SU {i}: {e}")))?;
        values.push(true_range_difference(emitter, *su, scenario.bs) + normal.sample(rng));
        variances.push(variance_m2);
    }

    Ok(RangeDifferenceSet {
        reference: ReferenceNode::BaseStation,
        values_m: values,
        variances_m2: variances,
    })
}
