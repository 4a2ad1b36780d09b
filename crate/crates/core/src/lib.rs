//! Locating a rogue transmitter from time-difference-of-arrival data, and a
//! benchmark of particle swarm variants against a linearized least-squares
//! baseline under one roof.
//!
//! The pipeline: [`scenario`] deploys a base station, sensing nodes, and a
//! transmitter; [`measurement`] turns true geometry into noisy range
//! differences with an SNR-dependent variance model; [`objective`] scores a
//! candidate position against those measurements; [`pso`] minimizes that
//! score with any of 39 swarm variants built from the [`schedules`] table;
//! [`tse`] does the same with undamped Gauss-Newton; [`detector`] turns
//! an estimate into a verdict about who is transmitting; [`metrics`] and
//! [`harness`] run the Monte Carlo studies and [`report`] writes them out.
//!
//! Determinism is load-bearing throughout: a master seed fans out through
//! [`seeding::derive_seed`] so that every trial, particle, and schedule draw
//! has its own stream, and repeated runs (parallel or not) produce identical
//! outputs.

pub mod detector;
pub mod error;
pub mod harness;
pub mod measurement;
pub mod metrics;
pub mod objective;
pub mod pso;
pub mod report;
pub mod scenario;
pub mod schedules;
pub mod seeding;
pub mod tse;

pub use error::{Error, Result};
pub use scenario::Point;
