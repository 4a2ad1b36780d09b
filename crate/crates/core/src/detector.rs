//! Verdict on a localized transmitter: the licensed PU, or an attacker, and
//! in the latter case which SU (if any) is close enough to be the suspect.

use serde::{Deserialize, Serialize};

use crate::scenario::{distance, Point, Scenario};

/// Both thresholds default to 1 km: two orders of magnitude above the
/// converged localization error, two below the PU's distance.
pub const DEFAULT_PU_THRESHOLD_M: f64 = 1000.0;
pub const DEFAULT_SU_THRESHOLD_M: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PU")]
    Pu,
    #[serde(rename = "PUEA")]
    Puea,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pu => "PU",
            Verdict::Puea => "PUEA",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionDecision {
    pub verdict: Verdict,
    pub estimate: Point,
    pub distance_to_pu_m: f64,
    /// Index of the nearest SU, present only for PUEA verdicts with an SU
    /// within the suspect threshold.
    pub suspect_su: Option<usize>,
    pub distance_to_suspect_m: Option<f64>,
}

/// Compare the estimate against the PU position first; anything beyond
/// `pu_threshold_m` is an attack, attributed to the nearest SU within
/// `su_threshold_m` (ties go to the lowest index).
///
/// Both thresholds must be positive. The PU boundary is inclusive: an
/// estimate exactly `pu_threshold_m` away still counts as the PU.
pub fn classify(
    estimate: Point,
    scenario: &Scenario,
    pu_threshold_m: f64,
    su_threshold_m: f64,
) -> DetectionDecision {
    debug_assert!(pu_threshold_m > 0.0 && su_threshold_m > 0.0);
    let distance_to_pu_m = distance(estimate, scenario.pu);
    if distance_to_pu_m <= pu_threshold_m {
        return DetectionDecision {
            verdict: Verdict::Pu,
            estimate,
            distance_to_pu_m,
            suspect_su: None,
            distance_to_suspect_m: None,
        };
    }

    let mut nearest: Option<(usize, f64)> = None;
    for (i, su) in scenario.sus.iter().enumerate() {
        let d = distance(estimate, *su);
        if nearest.map_or(true, |(_, best)| d < best) {
            nearest = Some((i, d));
        }
    }
    let (suspect_su, distance_to_suspect_m) = match nearest {
        Some((i, d)) if d <= su_threshold_m => (Some(i), Some(d)),
        _ => (None, None),
    };
    DetectionDecision {
        verdict: Verdict::Puea,
        estimate,
        distance_to_pu_m,
        suspect_su,
        distance_to_suspect_m,
    }
}
