//! Particle swarm engine over 2-D candidate positions.
//!
//! Per iteration each particle updates velocity from its own best and the
//! swarm best, with the inertia weight and acceleration coefficients supplied
//! by the variant's schedules, then moves and re-evaluates. The swarm best is
//! refreshed after all particles have moved, so results do not depend on
//! particle iteration order. Every particle owns an RNG stream indexed by its
//! initial position in the swarm; the schedules draw from a separate stream.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::scenario::Point;
use crate::schedules::{AccelSchedule, InertiaSchedule, ScheduleState, VariantSpec};

pub const DEFAULT_SWARM_SIZE: usize = 40;
pub const DEFAULT_MAX_ITERATIONS: usize = 150;
pub const DEFAULT_BOUND_M: f64 = 110_000.0;

/// Fitness floor used by [`RunTrace::convergence_iteration`] when a run
/// bottoms out at exactly zero.
pub const CONVERGENCE_ABS_FLOOR: f64 = 1e-6;

/// Velocity cap as a fraction of the search range, i.e. `0.2 * (2 * bound)`.
pub fn default_v_max(bound_m: f64) -> f64 {
    0.2 * (2.0 * bound_m)
}

/// Engine parameters for one run.
#[derive(Debug, Clone)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub max_iterations: usize,
    /// Positions are clamped into the square `[-bound_m, bound_m]^2`.
    pub bound_m: f64,
    /// Per-component velocity cap in meters per iteration.
    pub v_max_m: f64,
    pub variant: VariantSpec,
    pub seed: u64,
}

impl PsoConfig {
    pub fn new(variant: VariantSpec) -> Self {
        PsoConfig {
            swarm_size: DEFAULT_SWARM_SIZE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            bound_m: DEFAULT_BOUND_M,
            v_max_m: default_v_max(DEFAULT_BOUND_M),
            variant,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(Error::Config {
                field: "swarm_size",
                message: format!("need at least 2 particles, got {}", self.swarm_size),
            });
        }
        if self.max_iterations < 1 {
            return Err(Error::Config {
                field: "max_iterations",
                message: "need at least 1 iteration".into(),
            });
        }
        if !self.bound_m.is_finite() || self.bound_m <= 0.0 {
            return Err(Error::Config {
                field: "bound_m",
                message: format!("must be positive and finite, got {}", self.bound_m),
            });
        }
        if !self.v_max_m.is_finite() || self.v_max_m <= 0.0 {
            return Err(Error::Config {
                field: "v_max_m",
                message: format!("must be positive and finite, got {}", self.v_max_m),
            });
        }
        Ok(())
    }
}

/// One particle: current state, personal best, and a private RNG stream.
#[derive(Debug, Clone)]
pub struct Particle {
    pub position: Point,
    pub velocity: [f64; 2],
    pub pbest: Point,
    pub pbest_fitness: f64,
    rng: ChaCha8Rng,
}

/// Swarm state between iterations.
#[derive(Debug, Clone)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    pub gbest: Point,
    pub gbest_fitness: f64,
    inertia: InertiaSchedule,
    accel: AccelSchedule,
    schedule_state: ScheduleState,
    schedule_rng: ChaCha8Rng,
}

/// One dimension of the velocity rule, before clamping.
pub fn velocity_update(
    v: f64,
    x: f64,
    pbest: f64,
    gbest: f64,
    w: f64,
    c1: f64,
    r1: f64,
    c2: f64,
    r2: f64,
) -> f64 {
    w * v + c1 * r1 * (pbest - x) + c2 * r2 * (gbest - x)
}

impl Swarm {
    /// Scatter `swarm_size` particles uniformly over the search square with
    /// zero velocity. Particle i draws from RNG stream i+1 of the run seed;
    /// stream 0 is reserved for the schedules.
    pub fn init<O: Objective>(cfg: &PsoConfig, obj: &O) -> Result<Swarm> {
        cfg.validate()?;
        let b = cfg.bound_m;
        let mut particles = Vec::with_capacity(cfg.swarm_size);
        let mut gbest = Point::new(0.0, 0.0);
        let mut gbest_fitness = f64::INFINITY;
        for i in 0..cfg.swarm_size {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64 + 1);
            let position = Point::new(rng.gen_range(-b..=b), rng.gen_range(-b..=b));
            let fitness = obj.evaluate(position);
            if fitness < gbest_fitness {
                gbest = position;
                gbest_fitness = fitness;
            }
            particles.push(Particle {
                position,
                velocity: [0.0, 0.0],
                pbest: position,
                pbest_fitness: fitness,
                rng,
            });
        }
        let inertia = cfg.variant.inertia_schedule();
        let schedule_state = inertia.new_state();
        let mut schedule_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        schedule_rng.set_stream(0);
        Ok(Swarm {
            particles,
            gbest,
            gbest_fitness,
            inertia,
            accel: cfg.variant.accel_schedule(),
            schedule_state,
            schedule_rng,
        })
    }

    /// Advance the swarm through 0-based iteration `t`.
    ///
    /// The schedules are evaluated once per iteration; every particle then
    /// moves against the same weight, coefficients, and the swarm best from
    /// the end of the previous iteration. Personal bests update immediately,
    /// the swarm best only after all particles have moved.
    pub fn step<O: Objective>(&mut self, t: usize, cfg: &PsoConfig, obj: &O) {
        debug_assert!(t < cfg.max_iterations);
        let w = self.inertia.weight(
            t,
            cfg.max_iterations,
            &mut self.schedule_state,
            &mut self.schedule_rng,
        );
        let (c1, c2) = self.accel.coeffs(t, cfg.max_iterations);
        let g = [self.gbest.x, self.gbest.y];
        for particle in &mut self.particles {
            let x = [particle.position.x, particle.position.y];
            let pb = [particle.pbest.x, particle.pbest.y];
            let mut moved = [0.0; 2];
            for d in 0..2 {
                let r1: f64 = particle.rng.gen();
                let r2: f64 = particle.rng.gen();
                let v = velocity_update(particle.velocity[d], x[d], pb[d], g[d], w, c1, r1, c2, r2)
                    .clamp(-cfg.v_max_m, cfg.v_max_m);
                particle.velocity[d] = v;
                moved[d] = (x[d] + v).clamp(-cfg.bound_m, cfg.bound_m);
            }
            particle.position = Point::new(moved[0], moved[1]);
            let fitness = obj.evaluate(particle.position);
            if fitness < particle.pbest_fitness {
                particle.pbest = particle.position;
                particle.pbest_fitness = fitness;
            }
        }
        for particle in &self.particles {
            if particle.pbest_fitness < self.gbest_fitness {
                self.gbest = particle.pbest;
                self.gbest_fitness = particle.pbest_fitness;
            }
        }
    }
}

/// Swarm-best record after iteration `t`; `t = 0` is the state right after
/// initialisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub t: usize,
    pub gbest_fitness: f64,
    pub gbest: Point,
}

/// Full history of one run.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub entries: Vec<TraceEntry>,
    pub estimate: Point,
    pub wall: Duration,
}

impl RunTrace {
    pub fn final_fitness(&self) -> f64 {
        self.entries
            .last()
            .map(|e| e.gbest_fitness)
            .unwrap_or(f64::INFINITY)
    }

    /// Smallest t whose fitness is within `rel_tol` (relative) of the final
    /// fitness, or within [`CONVERGENCE_ABS_FLOOR`] when the run bottomed out
    /// at exactly zero.
    pub fn convergence_iteration(&self, rel_tol: f64) -> usize {
        debug_assert!(rel_tol > 0.0 && !self.entries.is_empty());
        let last = self.final_fitness();
        let threshold = if last > 0.0 {
            (1.0 + rel_tol) * last
        } else {
            CONVERGENCE_ABS_FLOOR
        };
        self.entries
            .iter()
            .find(|e| e.gbest_fitness <= threshold)
            .map(|e| e.t)
            .unwrap_or_else(|| self.entries.len() - 1)
    }

    /// Rows of `t,gbest_fitness,x,y`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,gbest_fitness,x,y\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{},{}", e.t, e.gbest_fitness, e.gbest.x, e.gbest.y);
        }
        out
    }
}

/// Initialise and run the swarm for the full iteration budget.
pub fn run<O: Objective>(cfg: &PsoConfig, obj: &O) -> Result<RunTrace> {
    let start = Instant::now();
    let mut swarm = Swarm::init(cfg, obj)?;
    let mut entries = Vec::with_capacity(cfg.max_iterations + 1);
    entries.push(TraceEntry {
        t: 0,
        gbest_fitness: swarm.gbest_fitness,
        gbest: swarm.gbest,
    });
    for t in 0..cfg.max_iterations {
        swarm.step(t, cfg, obj);
        entries.push(TraceEntry {
            t: t + 1,
            gbest_fitness: swarm.gbest_fitness,
            gbest: swarm.gbest,
        });
    }
    Ok(RunTrace {
        entries,
        estimate: swarm.gbest,
        wall: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{synthesize, NoiseModel};
    use crate::objective::LocalizationObjective;
    use crate::scenario::{deploy_network, distance, DeployConfig};
    use crate::schedules::variant_table;

    struct Sphere {
        center: Point,
    }

    impl Objective for Sphere {
        fn evaluate(&self, p: Point) -> f64 {
            let dx = p.x - self.center.x;
            let dy = p.y - self.center.y;
            dx * dx + dy * dy
        }
    }

    fn localization_obj(n_sus: usize, noisy: bool, seed: u64) -> LocalizationObjective {
        let sc = deploy_network(&DeployConfig {
            n_sus,
            seed,
            ..DeployConfig::default()
        })
        .unwrap()
        .with_emitter(Point::new(8000.0, 1000.0));
        let noise = NoiseModel {
            enabled: noisy,
            ..NoiseModel::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let m = synthesize(&sc, &noise, &mut rng).unwrap();
        LocalizationObjective::from_scenario(&sc, m).unwrap()
    }

    fn cfg(variant: &str) -> PsoConfig {
        PsoConfig::new(*VariantSpec::by_name(variant).unwrap())
    }

    #[test]
    fn init_scatters_inside_bounds_with_zero_velocity() {
        let obj = Sphere {
            center: Point::new(0.0, 0.0),
        };
        let c = cfg("PSO");
        let swarm = Swarm::init(&c, &obj).unwrap();
        assert_eq!(swarm.particles.len(), 40);
        let mut best = f64::INFINITY;
        for p in &swarm.particles {
            assert!(p.position.x.abs() <= c.bound_m && p.position.y.abs() <= c.bound_m);
            assert_eq!(p.velocity, [0.0, 0.0]);
            assert_eq!(p.pbest, p.position);
            assert_eq!(p.pbest_fitness, obj.evaluate(p.position));
            best = best.min(p.pbest_fitness);
        }
        assert_eq!(swarm.gbest_fitness, best);
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let obj = Sphere {
            center: Point::new(500.0, -200.0),
        };
        let c = cfg("MPSO3");
        let a = Swarm::init(&c, &obj).unwrap();
        let b = Swarm::init(&c, &obj).unwrap();
        for (pa, pb) in a.particles.iter().zip(&b.particles) {
            assert_eq!(pa.position, pb.position);
            assert_eq!(pa.pbest_fitness, pb.pbest_fitness);
        }
        assert_eq!(a.gbest, b.gbest);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = cfg("PSO");
        c.swarm_size = 1;
        assert!(c.validate().is_err());
        let mut c = cfg("PSO");
        c.max_iterations = 0;
        assert!(c.validate().is_err());
        let mut c = cfg("PSO");
        c.v_max_m = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn velocity_update_algebra() {
        // With w=0, c1=0 and c2*r2=1 the particle lands exactly on gbest.
        let v = velocity_update(123.0, 10.0, -4.0, 42.0, 0.0, 0.0, 0.77, 1.0, 1.0);
        assert_eq!(10.0 + v, 42.0);
        // Pure inertia.
        assert_eq!(velocity_update(3.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0), 1.5);
    }

    #[test]
    fn swarm_at_gbest_with_zero_velocity_is_a_fixed_point() {
        let obj = Sphere {
            center: Point::new(1000.0, 2000.0),
        };
        let c = cfg("PSO");
        let mut swarm = Swarm::init(&c, &obj).unwrap();
        let g = swarm.gbest;
        let gf = swarm.gbest_fitness;
        for p in &mut swarm.particles {
            p.position = g;
            p.velocity = [0.0, 0.0];
            p.pbest = g;
            p.pbest_fitness = gf;
        }
        swarm.step(0, &c, &obj);
        for p in &swarm.particles {
            assert_eq!(p.position, g);
            assert_eq!(p.velocity, [0.0, 0.0]);
        }
        assert_eq!(swarm.gbest, g);
        assert_eq!(swarm.gbest_fitness, gf);
    }

    #[test]
    fn steps_keep_state_inside_limits_and_gbest_monotone() {
        let obj = localization_obj(20, true, 5);
        for name in ["PSO", "MPSO11", "IPSO7", "PSO10"] {
            let c = cfg(name);
            let mut swarm = Swarm::init(&c, &obj).unwrap();
            let mut prev = swarm.gbest_fitness;
            for t in 0..60 {
                swarm.step(t, &c, &obj);
                assert!(swarm.gbest_fitness <= prev, "{name} rose at t={t}");
                prev = swarm.gbest_fitness;
                for p in &swarm.particles {
                    assert!(p.position.x.abs() <= c.bound_m && p.position.y.abs() <= c.bound_m);
                    assert!(p.velocity[0].abs() <= c.v_max_m && p.velocity[1].abs() <= c.v_max_m);
                }
            }
        }
    }

    #[test]
    fn run_is_deterministic_and_traces_fully() {
        let obj = localization_obj(15, true, 9);
        let mut c = cfg("IPSO11");
        c.max_iterations = 40;
        c.seed = 31;
        let a = run(&c, &obj).unwrap();
        let b = run(&c, &obj).unwrap();
        assert_eq!(a.entries, b.entries);
        assert_eq!(a.entries.len(), 41);
        assert_eq!(a.entries[0].t, 0);
        assert_eq!(a.entries[40].t, 40);
        assert_eq!(a.estimate, a.entries[40].gbest);
    }

    #[test]
    fn particle_order_does_not_change_the_outcome() {
        let obj = localization_obj(15, true, 13);
        let mut c = cfg("MPSO12");
        c.max_iterations = 50;
        c.seed = 4;
        let mut forward = Swarm::init(&c, &obj).unwrap();
        let mut reversed = Swarm::init(&c, &obj).unwrap();
        reversed.particles.reverse();
        for t in 0..c.max_iterations {
            forward.step(t, &c, &obj);
            reversed.step(t, &c, &obj);
            assert_eq!(forward.gbest_fitness, reversed.gbest_fitness, "t={t}");
        }
        assert_eq!(forward.gbest, reversed.gbest);
    }

    #[test]
    fn gbest_fitness_never_rises_for_any_variant() {
        let obj = localization_obj(10, true, 21);
        for v in variant_table() {
            for seed in 0..5 {
                let mut c = PsoConfig::new(*v);
                c.max_iterations = 30;
                c.seed = seed;
                let trace = run(&c, &obj).unwrap();
                for w in trace.entries.windows(2) {
                    assert!(
                        w[1].gbest_fitness <= w[0].gbest_fitness,
                        "{} seed {seed} rose at t={}",
                        v.name,
                        w[1].t
                    );
                }
            }
        }
    }

    #[test]
    fn sphere_minimum_located_at_two_accuracy_scales() {
        // Constant inertia (0.9) keeps the swarm hot: from a 110 km box it
        // settles near the optimum but stalls at the tens-of-meters scale.
        // A decaying schedule over the same budget fine-tunes below 1 m.
        let obj = Sphere {
            center: Point::new(3000.0, 4000.0),
        };
        let mut c = cfg("PSO");
        c.max_iterations = 200;
        c.seed = 1;
        let coarse = distance(run(&c, &obj).unwrap().estimate, Point::new(3000.0, 4000.0));
        assert!(coarse < 150.0, "constant-inertia estimate off by {coarse} m");

        let mut c = cfg("PSO1");
        c.max_iterations = 200;
        c.seed = 1;
        let fine = distance(run(&c, &obj).unwrap().estimate, Point::new(3000.0, 4000.0));
        assert!(fine < 1.0, "decaying-inertia estimate off by {fine} m");
        assert!(fine < coarse);
    }

    #[test]
    fn zero_noise_localization_recovers_truth() {
        let obj = localization_obj(100, false, 3);
        let mut c = cfg("MPSO11");
        c.max_iterations = 50;
        c.seed = 7;
        let trace = run(&c, &obj).unwrap();
        let err = distance(trace.estimate, Point::new(8000.0, 1000.0));
        assert!(err < 1.0, "estimate off by {err} m");
    }

    #[test]
    fn more_iterations_reduce_zero_noise_error_for_every_variant() {
        let obj = localization_obj(12, false, 17);
        let truth = Point::new(8000.0, 1000.0);
        for v in variant_table() {
            let mut short_sum = 0.0;
            let mut long_sum = 0.0;
            for seed in 0..20 {
                let mut c = PsoConfig::new(*v);
                c.seed = seed;
                c.max_iterations = 10;
                short_sum += distance(run(&c, &obj).unwrap().estimate, truth);
                c.max_iterations = 200;
                long_sum += distance(run(&c, &obj).unwrap().estimate, truth);
            }
            assert!(
                long_sum < short_sum,
                "{}: mean error did not shrink ({} vs {})",
                v.name,
                long_sum / 20.0,
                short_sum / 20.0
            );
        }
    }

    #[test]
    fn convergence_iteration_cases() {
        let flat = RunTrace {
            entries: (0..=5)
                .map(|t| TraceEntry {
                    t,
                    gbest_fitness: 5.0,
                    gbest: Point::new(0.0, 0.0),
                })
                .collect(),
            estimate: Point::new(0.0, 0.0),
            wall: Duration::ZERO,
        };
        assert_eq!(flat.convergence_iteration(0.05), 0);

        let fitness = [100.0, 50.0, 20.0, 11.0, 10.4, 10.2, 10.0];
        let decreasing = RunTrace {
            entries: fitness
                .iter()
                .enumerate()
                .map(|(t, f)| TraceEntry {
                    t,
                    gbest_fitness: *f,
                    gbest: Point::new(0.0, 0.0),
                })
                .collect(),
            estimate: Point::new(0.0, 0.0),
            wall: Duration::ZERO,
        };
        // (1 + 0.05) * 10 = 10.5, first reached at t=4.
        assert_eq!(decreasing.convergence_iteration(0.05), 4);

        let to_zero = RunTrace {
            entries: [1.0, 1e-7, 0.0]
                .iter()
                .enumerate()
                .map(|(t, f)| TraceEntry {
                    t,
                    gbest_fitness: *f,
                    gbest: Point::new(0.0, 0.0),
                })
                .collect(),
            estimate: Point::new(0.0, 0.0),
            wall: Duration::ZERO,
        };
        assert_eq!(to_zero.convergence_iteration(0.05), 1);
    }

    #[test]
    fn fast_variant_converges_in_about_ten_iterations() {
        let mut sum = 0.0;
        let trials = 5;
        for seed in 0..trials {
            let obj = localization_obj(100, true, 100 + seed);
            let mut c = cfg("MPSO10");
            c.seed = seed;
            sum += run(&c, &obj).unwrap().convergence_iteration(0.05) as f64;
        }
        let mean = sum / trials as f64;
        assert!((4.0..=15.0).contains(&mean), "mean convergence {mean}");
    }

    #[test]
    fn trace_csv_layout() {
        let obj = Sphere {
            center: Point::new(0.0, 0.0),
        };
        let mut c = cfg("PSO");
        c.max_iterations = 3;
        let trace = run(&c, &obj).unwrap();
        let csv = trace.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,gbest_fitness,x,y");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,"));
        assert!(lines[4].starts_with("3,"));
    }
}
