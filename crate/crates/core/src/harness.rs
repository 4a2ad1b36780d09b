//! Monte Carlo experiment runner.
//!
//! An experiment fixes a scenario (or redeploys per trial), synthesizes one
//! measurement set per trial, and hands that identical set to every method
//! under comparison, so per-trial differences between methods are paired.
//! Everything is seeded from one master seed through tagged derivation:
//! deployment, each trial's noise, and each swarm run get independent
//! streams, and trial order or thread scheduling cannot perturb any of them.

use std::path::PathBuf;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{classify, DetectionDecision, DEFAULT_PU_THRESHOLD_M, DEFAULT_SU_THRESHOLD_M};
use crate::error::{Error, Result};
use crate::measurement::{synthesize, NoiseModel, RangeDifferenceSet};
use crate::metrics::{cdf_curve, median_error, TrialErrorSet};
use crate::objective::LocalizationObjective;
use crate::pso::{self, PsoConfig};
use crate::scenario::{deploy_network, DeployConfig, Point, Scenario};
use crate::schedules::{variant_table, VariantSpec};
use crate::seeding::derive_seed;
use crate::tse::{tse_solve, TseConfig};

/// Relative tolerance used when reducing a trace to a convergence iteration.
pub const CONVERGENCE_REL_TOL: f64 = 0.05;

/// Iteration budget for the fast method in [`compare_cdf`]; the slow method
/// keeps the configured budget.
pub const CDF_FAST_ITERATIONS: usize = 10;

/// Error-vs-iteration checkpoints used by default reports.
pub const DEFAULT_CHECKPOINTS: [usize; 22] = [
    1, 2, 3, 4, 5, 10, 15, 20, 25, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120, 130, 140, 150,
];

const CHANNEL_DEPLOY: u64 = 1;
const CHANNEL_MEASURE: u64 = 2;
const CHANNEL_SWARM: u64 = 3;

/// Deployment geometry independent of any seed; the experiment derives the
/// deployment seed from the master seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSettings {
    pub n_sus: usize,
    pub half_width_m: f64,
    pub pu_distance_m: f64,
    pub pu_bearing_rad: f64,
}

impl Default for ScenarioSettings {
    fn default() -> Self {
        let d = DeployConfig::default();
        ScenarioSettings {
            n_sus: d.n_sus,
            half_width_m: d.half_width_m,
            pu_distance_m: d.pu_distance_m,
            pu_bearing_rad: d.pu_bearing_rad,
        }
    }
}

impl ScenarioSettings {
    pub fn to_deploy_config(&self, seed: u64) -> DeployConfig {
        DeployConfig {
            n_sus: self.n_sus,
            half_width_m: self.half_width_m,
            pu_distance_m: self.pu_distance_m,
            pu_bearing_rad: self.pu_bearing_rad,
            seed,
        }
    }
}

/// Swarm engine settings shared by all variants in an experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwarmSettings {
    pub swarm_size: usize,
    pub max_iterations: usize,
    pub bound_m: f64,
    /// Defaults to 20% of the search range when absent.
    pub v_max_m: Option<f64>,
}

impl Default for SwarmSettings {
    fn default() -> Self {
        SwarmSettings {
            swarm_size: pso::DEFAULT_SWARM_SIZE,
            max_iterations: pso::DEFAULT_MAX_ITERATIONS,
            bound_m: pso::DEFAULT_BOUND_M,
            v_max_m: None,
        }
    }
}

impl SwarmSettings {
    pub fn to_pso_config(&self, variant: VariantSpec, seed: u64) -> PsoConfig {
        PsoConfig {
            swarm_size: self.swarm_size,
            max_iterations: self.max_iterations,
            bound_m: self.bound_m,
            v_max_m: self.v_max_m.unwrap_or_else(|| pso::default_v_max(self.bound_m)),
            variant,
            seed,
        }
    }
}

/// Baseline solver settings; the initial guess stays at its default (the SU
/// centroid) and is not configurable from experiment files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaylorSettings {
    pub max_iterations: usize,
    pub step_tolerance_m: f64,
    pub weighting: bool,
}

impl Default for TaylorSettings {
    fn default() -> Self {
        let d = TseConfig::default();
        TaylorSettings {
            max_iterations: d.max_iterations,
            step_tolerance_m: d.step_tolerance_m,
            weighting: d.weighting,
        }
    }
}

impl TaylorSettings {
    pub fn to_tse_config(&self) -> TseConfig {
        TseConfig {
            initial_guess: None,
            max_iterations: self.max_iterations,
            step_tolerance_m: self.step_tolerance_m,
            weighting: self.weighting,
        }
    }
}

/// Full experiment description: loadable from TOML, overridable from the
/// command line, echoed into report metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; every stream in the experiment derives from it.
    pub seed: u64,
    pub trials: usize,
    /// Variant names, or the single entry "all" for the whole table.
    pub variants: Vec<String>,
    /// Redraw the SU layout every trial instead of fixing it per experiment.
    pub redeploy_per_trial: bool,
    /// Run trials across threads; results are identical either way.
    pub parallel: bool,
    pub emitter: Point,
    pub pu_threshold_m: f64,
    pub su_threshold_m: f64,
    /// Report directory; in-memory only when absent.
    pub out_dir: Option<PathBuf>,
    pub scenario: ScenarioSettings,
    pub noise: NoiseModel,
    pub pso: SwarmSettings,
    pub tse: TaylorSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            trials: 1000,
            variants: vec!["all".into()],
            redeploy_per_trial: false,
            parallel: true,
            emitter: Point::new(8000.0, 1000.0),
            pu_threshold_m: DEFAULT_PU_THRESHOLD_M,
            su_threshold_m: DEFAULT_SU_THRESHOLD_M,
            out_dir: None,
            scenario: ScenarioSettings::default(),
            noise: NoiseModel::default(),
            pso: SwarmSettings::default(),
            tse: TaylorSettings::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.into(),
            message: e.to_string(),
        })
    }

    /// Expand the configured variant names against the variant table.
    /// "all" must stand alone; explicit lists must not repeat a name.
    pub fn resolve_variants(&self) -> Result<Vec<&'static VariantSpec>> {
        if self.variants.iter().any(|v| v == "all") {
            if self.variants.len() != 1 {
                return Err(Error::Usage(
                    "variant list mixes \"all\" with explicit names".into(),
                ));
            }
            return Ok(variant_table().iter().collect());
        }
        if self.variants.is_empty() {
            return Err(Error::Usage("variant list is empty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        self.variants
            .iter()
            .map(|name| {
                let v = VariantSpec::by_name(name)?;
                if !seen.insert(v.name) {
                    return Err(Error::Usage(format!("variant {name} listed twice")));
                }
                Ok(v)
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config {
                field: "trials",
                message: "need at least 1 trial".into(),
            });
        }
        self.resolve_variants()?;
        self.scenario.to_deploy_config(0).validate()?;
        self.noise.validate()?;
        self.pso
            .to_pso_config(variant_table()[0], 0)
            .validate()?;
        self.tse.to_tse_config().validate()?;
        if !self.emitter.is_finite() {
            return Err(Error::Config {
                field: "emitter",
                message: "must be finite".into(),
            });
        }
        if !(self.pu_threshold_m > 0.0) || !(self.su_threshold_m > 0.0) {
            return Err(Error::Config {
                field: "pu_threshold_m",
                message: "detection thresholds must be positive".into(),
            });
        }
        Ok(())
    }
}

/// One estimator in an experiment: a named swarm variant with an iteration
/// budget, or the linearized baseline.
#[derive(Debug, Clone, Copy)]
pub enum Method {
    Swarm {
        variant: &'static VariantSpec,
        max_iterations: usize,
    },
    Taylor,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Swarm { variant, .. } => variant.name,
            Method::Taylor => "TSE",
        }
    }

    fn seed_tag(&self) -> u64 {
        match self {
            // Seed by position in the variant table so the same variant gets
            // the same stream regardless of which experiment runs it.
            Method::Swarm { variant, .. } => variant_table()
                .iter()
                .position(|v| v.name == variant.name)
                .expect("variant comes from the table") as u64,
            Method::Taylor => u64::MAX,
        }
    }
}

/// Everything recorded about one method in one trial.
#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub estimate: Point,
    pub final_fitness: f64,
    pub convergence_iteration: Option<usize>,
    /// Swarm-best position at each requested checkpoint, in checkpoint order.
    pub checkpoint_positions: Vec<Point>,
    pub decision: Option<DetectionDecision>,
    pub wall_s: f64,
    /// True when the solver errored out (baseline divergence/degeneracy);
    /// such trials carry no estimate and are excluded from aggregates.
    pub failed: bool,
}

#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub measurement_hash: u64,
    pub outcomes: Vec<MethodOutcome>,
}

fn fnv1a64(words: impl IntoIterator<Item = u64>) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for w in words {
        for byte in w.to_le_bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    hash
}

fn hash_measurements(m: &RangeDifferenceSet) -> u64 {
    fnv1a64(
        m.values_m
            .iter()
            .chain(&m.variances_m2)
            .map(|v| v.to_bits()),
    )
}

fn run_one_trial(
    cfg: &ExperimentConfig,
    methods: &[Method],
    checkpoints: &[usize],
    base: Option<&Scenario>,
    trial: usize,
) -> Result<TrialRecord> {
    let scenario = match base {
        Some(sc) => sc.clone(),
        None => deploy_network(
            &cfg.scenario
                .to_deploy_config(derive_seed(cfg.seed, &[CHANNEL_DEPLOY, trial as u64])),
        )?,
    }
    .with_emitter(cfg.emitter);

    let mut noise_rng = ChaCha8Rng::seed_from_u64(derive_seed(
        cfg.seed,
        &[CHANNEL_MEASURE, trial as u64],
    ));
    let measurements = synthesize(&scenario, &cfg.noise, &mut noise_rng)?;
    let measurement_hash = hash_measurements(&measurements);
    let objective = LocalizationObjective::from_scenario(&scenario, measurements)?;

    let mut outcomes = Vec::with_capacity(methods.len());
    for method in methods {
        let started = Instant::now();
        let outcome = match method {
            Method::Swarm {
                variant,
                max_iterations,
            } => {
                let seed = derive_seed(
                    cfg.seed,
                    &[CHANNEL_SWARM, trial as u64, method.seed_tag()],
                );
                let mut pso_cfg = cfg.pso.to_pso_config(**variant, seed);
                pso_cfg.max_iterations = *max_iterations;
                let trace = pso::run(&pso_cfg, &objective)?;
                let estimate = trace.estimate;
                MethodOutcome {
                    estimate,
                    final_fitness: trace.final_fitness(),
                    convergence_iteration: Some(
                        trace.convergence_iteration(CONVERGENCE_REL_TOL),
                    ),
                    checkpoint_positions: checkpoints
                        .iter()
                        .map(|t| trace.entries[*t].gbest)
                        .collect(),
                    decision: Some(classify(
                        estimate,
                        &scenario,
                        cfg.pu_threshold_m,
                        cfg.su_threshold_m,
                    )),
                    wall_s: started.elapsed().as_secs_f64(),
                    failed: false,
                }
            }
            Method::Taylor => match tse_solve(&objective, &cfg.tse.to_tse_config()) {
                Ok(res) => MethodOutcome {
                    estimate: res.estimate,
                    final_fitness: objective.fitness(res.estimate),
                    convergence_iteration: None,
                    checkpoint_positions: Vec::new(),
                    decision: Some(classify(
                        res.estimate,
                        &scenario,
                        cfg.pu_threshold_m,
                        cfg.su_threshold_m,
                    )),
                    wall_s: started.elapsed().as_secs_f64(),
                    failed: false,
                },
                // The baseline is allowed to blow up on a bad draw; the
                // trial is kept and the failure is counted in the report.
                Err(Error::Divergence(_)) | Err(Error::DegenerateGeometry(_)) => MethodOutcome {
                    estimate: Point::new(f64::NAN, f64::NAN),
                    final_fitness: f64::NAN,
                    convergence_iteration: None,
                    checkpoint_positions: Vec::new(),
                    decision: None,
                    wall_s: started.elapsed().as_secs_f64(),
                    failed: true,
                },
                Err(e) => return Err(e),
            },
        };
        outcomes.push(outcome);
    }
    Ok(TrialRecord {
        measurement_hash,
        outcomes,
    })
}

/// Run every trial against every method. Trials execute concurrently when
/// configured; records come back in trial order either way.
pub fn execute(
    cfg: &ExperimentConfig,
    methods: &[Method],
    checkpoints: &[usize],
) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    for method in methods {
        if let Method::Swarm { max_iterations, .. } = method {
            if let Some(bad) = checkpoints
                .iter()
                .find(|t| **t < 1 || **t > *max_iterations)
            {
                return Err(Error::Usage(format!(
                    "checkpoint {bad} outside [1, {max_iterations}] for {}",
                    method.label()
                )));
            }
        }
    }
    let base = if cfg.redeploy_per_trial {
        None
    } else {
        Some(deploy_network(
            &cfg.scenario
                .to_deploy_config(derive_seed(cfg.seed, &[CHANNEL_DEPLOY, 0])),
        )?)
    };
    let run = |trial: usize| run_one_trial(cfg, methods, checkpoints, base.as_ref(), trial);
    if cfg.parallel {
        (0..cfg.trials).into_par_iter().map(run).collect()
    } else {
        (0..cfg.trials).map(run).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub variant: String,
    pub mean_convergence_iteration: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MseIterationRow {
    pub variant: String,
    pub t: usize,
    pub mse_m2: f64,
    pub rms_m: f64,
    pub bias2_m2: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfRow {
    pub variant: String,
    pub z_m: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionRow {
    pub trial: usize,
    pub variant: String,
    #[serde(flatten)]
    pub decision: DetectionDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodTiming {
    pub variant: String,
    pub mean_wall_s: f64,
}

/// Aggregated results of one experiment. Timings live here but are reported
/// separately from the deterministic tables; see the report writer.
#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub convergence: Vec<ConvergenceRow>,
    pub mse_vs_iteration: Vec<MseIterationRow>,
    pub cdf: Vec<CdfRow>,
    pub decisions: Vec<DecisionRow>,
    pub medians_m: Vec<(String, f64)>,
    pub timings: Vec<MethodTiming>,
    pub measurement_hashes: Vec<u64>,
    /// The fixed scenario, absent when redeploying per trial.
    pub scenario: Option<Scenario>,
    pub solver_failures: usize,
}

fn aggregate(
    cfg: &ExperimentConfig,
    methods: &[Method],
    checkpoints: &[usize],
    records: &[TrialRecord],
    scenario: Option<Scenario>,
) -> ReportBundle {
    let truth = cfg.emitter;
    let mut convergence = Vec::new();
    let mut mse_vs_iteration = Vec::new();
    let mut cdf = Vec::new();
    let mut decisions = Vec::new();
    let mut medians_m = Vec::new();
    let mut timings = Vec::new();
    let mut solver_failures = 0usize;

    for (m_idx, method) in methods.iter().enumerate() {
        let label = method.label();
        let ok: Vec<&MethodOutcome> = records
            .iter()
            .map(|r| &r.outcomes[m_idx])
            .filter(|o| !o.failed)
            .collect();
        solver_failures += records.len() - ok.len();

        if matches!(method, Method::Swarm { .. }) && !ok.is_empty() {
            let mean = ok
                .iter()
                .filter_map(|o| o.convergence_iteration)
                .sum::<usize>() as f64
                / ok.len() as f64;
            convergence.push(ConvergenceRow {
                variant: label.into(),
                mean_convergence_iteration: mean,
                n: ok.len(),
            });
        }

        for (c_idx, t) in checkpoints.iter().enumerate() {
            if matches!(method, Method::Taylor) {
                continue;
            }
            let set = TrialErrorSet::new(
                ok.iter().map(|o| o.checkpoint_positions[c_idx]).collect(),
                truth,
            );
            if let Ok(report) = set.mse() {
                mse_vs_iteration.push(MseIterationRow {
                    variant: label.into(),
                    t: *t,
                    mse_m2: report.mse_m2,
                    rms_m: report.rms_m,
                    bias2_m2: report.bias2_m2,
                    n: set.estimates.len(),
                });
            }
        }

        if !ok.is_empty() {
            let errors: Vec<f64> = ok.iter().map(|o| o.estimate.distance(truth)).collect();
            if let Ok(curve) = cdf_curve(&errors) {
                cdf.extend(curve.into_iter().map(|(z_m, f)| CdfRow {
                    variant: label.into(),
                    z_m,
                    f,
                }));
            }
            if let Ok(median) = median_error(&errors) {
                medians_m.push((label.to_string(), median));
            }
            timings.push(MethodTiming {
                variant: label.into(),
                mean_wall_s: ok.iter().map(|o| o.wall_s).sum::<f64>() / ok.len() as f64,
            });
        }

        for (trial, record) in records.iter().enumerate() {
            if let Some(decision) = &record.outcomes[m_idx].decision {
                decisions.push(DecisionRow {
                    trial,
                    variant: label.into(),
                    decision: decision.clone(),
                });
            }
        }
    }

    ReportBundle {
        convergence,
        mse_vs_iteration,
        cdf,
        decisions,
        medians_m,
        timings,
        measurement_hashes: records.iter().map(|r| r.measurement_hash).collect(),
        scenario,
        solver_failures,
    }
}

/// The layout an experiment with this config deploys: the fixed scenario, or
/// the first trial's layout when redeploying per trial.
pub fn experiment_scenario(cfg: &ExperimentConfig) -> Result<Scenario> {
    Ok(deploy_network(
        &cfg.scenario
            .to_deploy_config(derive_seed(cfg.seed, &[CHANNEL_DEPLOY, 0])),
    )?
    .with_emitter(cfg.emitter))
}

fn fixed_scenario(cfg: &ExperimentConfig) -> Result<Option<Scenario>> {
    if cfg.redeploy_per_trial {
        return Ok(None);
    }
    experiment_scenario(cfg).map(Some)
}

fn finish(
    cfg: &ExperimentConfig,
    methods: &[Method],
    checkpoints: &[usize],
) -> Result<ReportBundle> {
    let records = execute(cfg, methods, checkpoints)?;
    let bundle = aggregate(cfg, methods, checkpoints, &records, fixed_scenario(cfg)?);
    if let Some(dir) = &cfg.out_dir {
        crate::report::write_bundle(dir, cfg, &bundle)?;
    }
    Ok(bundle)
}

/// Checkpoints from the default grid that fit inside the iteration budget.
pub fn default_checkpoints(max_iterations: usize) -> Vec<usize> {
    DEFAULT_CHECKPOINTS
        .iter()
        .copied()
        .filter(|t| *t <= max_iterations)
        .collect()
}

/// Full Monte Carlo over the configured variants: convergence table,
/// error-vs-iteration table at the default checkpoints, CDFs, and per-trial
/// decisions. Writes report files when an output directory is configured.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ReportBundle> {
    let methods: Vec<Method> = cfg
        .resolve_variants()?
        .into_iter()
        .map(|variant| Method::Swarm {
            variant,
            max_iterations: cfg.pso.max_iterations,
        })
        .collect();
    let checkpoints = default_checkpoints(cfg.pso.max_iterations);
    finish(cfg, &methods, &checkpoints)
}

/// Error-vs-iteration sweep for the given variants at explicit checkpoints.
pub fn sweep_iterations(
    cfg: &ExperimentConfig,
    variant_names: &[String],
    checkpoints: &[usize],
) -> Result<ReportBundle> {
    if checkpoints.is_empty() {
        return Err(Error::Usage("no checkpoints given".into()));
    }
    let mut sorted = checkpoints.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let sweep_cfg = ExperimentConfig {
        variants: variant_names.to_vec(),
        ..cfg.clone()
    };
    let methods: Vec<Method> = sweep_cfg
        .resolve_variants()?
        .into_iter()
        .map(|variant| Method::Swarm {
            variant,
            max_iterations: sweep_cfg.pso.max_iterations,
        })
        .collect();
    finish(&sweep_cfg, &methods, &sorted)
}

/// Three-way comparison on identical per-trial measurements: the standard
/// swarm at the configured budget, the fast variant at ten iterations, and
/// the linearized baseline.
pub fn compare_cdf(cfg: &ExperimentConfig) -> Result<ReportBundle> {
    let methods = [
        Method::Swarm {
            variant: VariantSpec::by_name("PSO")?,
            max_iterations: cfg.pso.max_iterations,
        },
        Method::Swarm {
            variant: VariantSpec::by_name("MPSO11")?,
            max_iterations: CDF_FAST_ITERATIONS,
        },
        Method::Taylor,
    ];
    finish(cfg, &methods, &[])
}

/// One verbose trial of one variant: the deployed scenario, the measurement
/// set, the full trace, and the resulting decision.
#[derive(Debug, Clone)]
pub struct SingleRun {
    pub scenario: Scenario,
    pub measurements: RangeDifferenceSet,
    pub trace: pso::RunTrace,
    pub decision: DetectionDecision,
    pub error_m: f64,
    pub convergence_iteration: usize,
}

pub fn run_single(cfg: &ExperimentConfig, variant_name: &str) -> Result<SingleRun> {
    cfg.validate()?;
    let variant = VariantSpec::by_name(variant_name)?;
    let scenario = deploy_network(
        &cfg.scenario
            .to_deploy_config(derive_seed(cfg.seed, &[CHANNEL_DEPLOY, 0])),
    )?
    .with_emitter(cfg.emitter);
    let mut noise_rng =
        ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[CHANNEL_MEASURE, 0]));
    let measurements = synthesize(&scenario, &cfg.noise, &mut noise_rng)?;
    let objective = LocalizationObjective::from_scenario(&scenario, measurements.clone())?;
    let method = Method::Swarm {
        variant,
        max_iterations: cfg.pso.max_iterations,
    };
    let seed = derive_seed(cfg.seed, &[CHANNEL_SWARM, 0, method.seed_tag()]);
    let trace = pso::run(&cfg.pso.to_pso_config(*variant, seed), &objective)?;
    let decision = classify(
        trace.estimate,
        &scenario,
        cfg.pu_threshold_m,
        cfg.su_threshold_m,
    );
    Ok(SingleRun {
        error_m: trace.estimate.distance(cfg.emitter),
        convergence_iteration: trace.convergence_iteration(CONVERGENCE_REL_TOL),
        scenario,
        measurements,
        trace,
        decision,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::Verdict;

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig {
            trials: 3,
            variants: vec!["MPSO11".into()],
            scenario: ScenarioSettings {
                n_sus: 8,
                ..ScenarioSettings::default()
            },
            pso: SwarmSettings {
                max_iterations: 15,
                ..SwarmSettings::default()
            },
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn all_expands_to_the_full_table() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.resolve_variants().unwrap().len(), 39);
    }

    #[test]
    fn variant_resolution_rejects_bad_lists() {
        let mut cfg = small_cfg();
        cfg.variants = vec!["MPSO11".into(), "NOPE".into()];
        assert!(matches!(
            cfg.resolve_variants(),
            Err(Error::UnknownVariant(_))
        ));
        cfg.variants = vec!["MPSO11".into(), "MPSO11".into()];
        assert!(matches!(cfg.resolve_variants(), Err(Error::Usage(_))));
        cfg.variants = vec!["all".into(), "PSO".into()];
        assert!(matches!(cfg.resolve_variants(), Err(Error::Usage(_))));
        cfg.variants = vec![];
        assert!(matches!(cfg.resolve_variants(), Err(Error::Usage(_))));
    }

    #[test]
    fn unknown_variant_fails_before_any_trial() {
        let mut cfg = small_cfg();
        cfg.variants = vec!["PSO99".into()];
        assert!(matches!(
            run_experiment(&cfg),
            Err(Error::UnknownVariant(_))
        ));
    }

    #[test]
    fn config_roundtrips_through_toml() {
        let cfg = small_cfg();
        let text = toml::to_string(&cfg).unwrap();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.trials, cfg.trials);
        assert_eq!(back.variants, cfg.variants);
        assert_eq!(back.scenario.n_sus, 8);
        assert_eq!(back.pso.max_iterations, 15);

        // Partial files pick up defaults for everything else.
        let partial: ExperimentConfig =
            toml::from_str("trials = 7\n[noise]\nsnr0_db = -5.0\n").unwrap();
        assert_eq!(partial.trials, 7);
        assert_eq!(partial.noise.snr0_db, -5.0);
        assert_eq!(partial.pso.swarm_size, 40);

        assert!(toml::from_str::<ExperimentConfig>("bogus_key = 1\n").is_err());
    }

    #[test]
    fn zero_noise_trial_detects_the_attacker_in_place() {
        let mut cfg = small_cfg();
        cfg.trials = 1;
        cfg.scenario.n_sus = 100;
        cfg.noise.enabled = false;
        cfg.pso.max_iterations = 60;
        let bundle = run_experiment(&cfg).unwrap();
        assert_eq!(bundle.decisions.len(), 1);
        let d = &bundle.decisions[0].decision;
        assert_eq!(d.verdict, Verdict::Puea);
        assert!(d.estimate.distance(Point::new(8000.0, 1000.0)) < 1.0);
    }

    #[test]
    fn every_variant_lands_in_each_table_exactly_once() {
        let mut cfg = small_cfg();
        cfg.variants = vec!["all".into()];
        cfg.trials = 2;
        cfg.pso.max_iterations = 3;
        cfg.scenario.n_sus = 5;
        let bundle = run_experiment(&cfg).unwrap();
        assert_eq!(bundle.convergence.len(), 39);
        let names: Vec<&str> = bundle.convergence.iter().map(|r| r.variant.as_str()).collect();
        assert_eq!(names[0], "PSO");
        assert!(names.contains(&"IPSO12"));
        // 39 variants x 3 checkpoints (1, 2, 3).
        assert_eq!(bundle.mse_vs_iteration.len(), 39 * 3);
        // One decision per variant per trial.
        assert_eq!(bundle.decisions.len(), 39 * 2);
        // One CDF sample per variant per trial.
        assert_eq!(bundle.cdf.len(), 39 * 2);
    }

    #[test]
    fn trials_share_measurements_across_experiments() {
        let mut a = small_cfg();
        a.trials = 4;
        let mut b = a.clone();
        b.variants = vec!["PSO3".into(), "IPSO7".into()];
        let ra = run_experiment(&a).unwrap();
        let rb = run_experiment(&b).unwrap();
        assert_eq!(ra.measurement_hashes, rb.measurement_hashes);
        assert_eq!(ra.measurement_hashes.len(), 4);
    }

    #[test]
    fn parallel_and_sequential_runs_agree_exactly() {
        let mut cfg = small_cfg();
        cfg.trials = 6;
        cfg.parallel = true;
        let par = run_experiment(&cfg).unwrap();
        cfg.parallel = false;
        let seq = run_experiment(&cfg).unwrap();
        assert_eq!(par.convergence, seq.convergence);
        assert_eq!(par.mse_vs_iteration, seq.mse_vs_iteration);
        assert_eq!(par.cdf, seq.cdf);
        assert_eq!(par.decisions, seq.decisions);
        assert_eq!(par.measurement_hashes, seq.measurement_hashes);
    }

    #[test]
    fn redeploy_changes_layout_between_trials() {
        let mut cfg = small_cfg();
        cfg.trials = 2;
        cfg.redeploy_per_trial = true;
        let bundle = run_experiment(&cfg).unwrap();
        assert!(bundle.scenario.is_none());
        // Different layouts give different measurement sets.
        assert_ne!(
            bundle.measurement_hashes[0],
            bundle.measurement_hashes[1]
        );
    }

    #[test]
    fn sweep_rejects_out_of_range_checkpoints() {
        let cfg = small_cfg();
        let names = vec!["MPSO11".to_string()];
        assert!(matches!(
            sweep_iterations(&cfg, &names, &[1, 99]),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            sweep_iterations(&cfg, &names, &[0, 5]),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            sweep_iterations(&cfg, &names, &[]),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn sweep_emits_requested_rows() {
        let cfg = small_cfg();
        let bundle =
            sweep_iterations(&cfg, &["MPSO11".to_string(), "PSO10".to_string()], &[5, 10, 15])
                .unwrap();
        assert_eq!(bundle.mse_vs_iteration.len(), 6);
        let first = &bundle.mse_vs_iteration[0];
        assert_eq!((first.variant.as_str(), first.t), ("MPSO11", 5));
        assert!(first.rms_m > 0.0);
        assert!((first.rms_m * first.rms_m - first.mse_m2).abs() <= 1e-9 * first.mse_m2);
    }

    #[test]
    fn cdf_comparison_produces_three_full_curves() {
        let mut cfg = small_cfg();
        cfg.trials = 12;
        cfg.scenario.n_sus = 10;
        let bundle = compare_cdf(&cfg).unwrap();
        for label in ["PSO", "MPSO11", "TSE"] {
            let curve: Vec<&CdfRow> =
                bundle.cdf.iter().filter(|r| r.variant == label).collect();
            assert!(!curve.is_empty(), "{label} curve missing");
            assert_eq!(curve.last().unwrap().f, 1.0, "{label}");
            for w in curve.windows(2) {
                assert!(w[1].z_m >= w[0].z_m && w[1].f >= w[0].f);
            }
        }
        assert_eq!(bundle.medians_m.len(), 3);
    }

    #[test]
    fn single_run_reports_a_full_trace() {
        let mut cfg = small_cfg();
        cfg.noise.enabled = false;
        cfg.scenario.n_sus = 50;
        cfg.pso.max_iterations = 40;
        let run = run_single(&cfg, "MPSO11").unwrap();
        assert_eq!(run.trace.entries.len(), 41);
        assert_eq!(run.measurements.len(), 50);
        assert_eq!(run.decision.verdict, Verdict::Puea);
        assert!(run.error_m < 1.0);
        assert!(run.convergence_iteration <= 40);
        assert!(run.scenario.emitter.is_some());
    }
}
