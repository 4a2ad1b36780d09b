//! Network geometry: a base station at the origin, secondary users scattered
//! over a square region, the licensed primary transmitter far outside it, and
//! the emitter whose position is under test.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A position in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Euclidean distance to `other` in meters.
    pub fn distance(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Euclidean distance between two points in meters.
pub fn distance(a: Point, b: Point) -> f64 {
    a.distance(b)
}

/// Parameters for a random network deployment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeployConfig {
    /// Number of secondary users to scatter.
    pub n_sus: usize,
    /// SUs land uniformly in the square `[-half_width_m, half_width_m]^2`.
    pub half_width_m: f64,
    /// Distance from the base station to the licensed primary transmitter.
    pub pu_distance_m: f64,
    /// Bearing of the primary transmitter, radians counterclockwise from east.
    pub pu_bearing_rad: f64,
    /// Seed for the deployment stream.
    pub seed: u64,
}

impl Default for DeployConfig {
    fn default() -> Self {
        DeployConfig {
            n_sus: 100,
            half_width_m: 15_000.0,
            pu_distance_m: 60_000.0,
            pu_bearing_rad: 0.0,
            seed: 1,
        }
    }
}

impl DeployConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.half_width_m.is_finite() || self.half_width_m <= 0.0 {
            return Err(Error::Config {
                field: "half_width_m",
                message: format!("must be positive and finite, got {}", self.half_width_m),
            });
        }
        if !self.pu_distance_m.is_finite() || self.pu_distance_m <= 0.0 {
            return Err(Error::Config {
                field: "pu_distance_m",
                message: format!("must be positive and finite, got {}", self.pu_distance_m),
            });
        }
        if !self.pu_bearing_rad.is_finite() {
            return Err(Error::Config {
                field: "pu_bearing_rad",
                message: "must be finite".into(),
            });
        }
        Ok(())
    }
}

/// A deployed network plus, optionally, the emitter whose position the
/// localization pipeline is asked to recover.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Reference receiver, always at the origin.
    pub bs: Point,
    /// Secondary users, indexed 0.. as deployed.
    pub sus: Vec<Point>,
    /// The licensed primary transmitter.
    pub pu: Point,
    /// Transmitter under test; `None` until placed.
    pub emitter: Option<Point>,
    /// Half-width of the deployment square, kept for reporting.
    pub half_width_m: f64,
}

impl Scenario {
    pub fn with_emitter(mut self, emitter: Point) -> Self {
        self.emitter = Some(emitter);
        self
    }

    /// Rows of `role,index,x,y` covering the BS, every SU, the PU, and the
    /// emitter when present.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("role,index,x,y\n");
        let _ = writeln!(out, "bs,0,{},{}", self.bs.x, self.bs.y);
        for (i, su) in self.sus.iter().enumerate() {
            let _ = writeln!(out, "su,{},{},{}", i, su.x, su.y);
        }
        let _ = writeln!(out, "pu,0,{},{}", self.pu.x, self.pu.y);
        if let Some(e) = self.emitter {
            let _ = writeln!(out, "emitter,0,{},{}", e.x, e.y);
        }
        out
    }
}

/// Scatter SUs uniformly over the square and place the PU on its bearing.
///
/// The same config always yields the same scenario; per-SU coordinates are
/// drawn x before y in index order.
pub fn deploy_network(cfg: &DeployConfig) -> Result<Scenario> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let hw = cfg.half_width_m;
    let sus = (0..cfg.n_sus)
        .map(|_| {
            let x = rng.gen_range(-hw..=hw);
            let y = rng.gen_range(-hw..=hw);
            Point::new(x, y)
        })
        .collect();
    let pu = Point::new(
        cfg.pu_distance_m * cfg.pu_bearing_rad.cos(),
        cfg.pu_distance_m * cfg.pu_bearing_rad.sin(),
    );
    Ok(Scenario {
        bs: Point::new(0.0, 0.0),
        sus,
        pu,
        emitter: None,
        half_width_m: hw,
    })
}
