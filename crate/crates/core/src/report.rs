//! Report files for an experiment bundle.
//!
//! Every table lands in its own CSV with a fixed header, decisions go to a
//! JSON-lines file, and run metadata to JSON. All of these are deterministic
//! for a given config and seed. Wall-clock means go to `timings.json`, which
//! is the one file expected to differ between repeated runs.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::{ExperimentConfig, ReportBundle};

fn write_file(dir: &Path, name: &str, content: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|e| Error::io(&path, e))
}

fn convergence_csv(bundle: &ReportBundle) -> String {
    let mut out = String::from("variant,mean_convergence_iteration,n\n");
    for row in &bundle.convergence {
        writeln!(
            out,
            "{},{},{}",
            row.variant, row.mean_convergence_iteration, row.n
        )
        .unwrap();
    }
    out
}

fn mse_csv(bundle: &ReportBundle) -> String {
    let mut out = String::from("variant,t,mse,rms,bias2,n\n");
    for row in &bundle.mse_vs_iteration {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.variant, row.t, row.mse_m2, row.rms_m, row.bias2_m2, row.n
        )
        .unwrap();
    }
    out
}

fn cdf_csv(bundle: &ReportBundle) -> String {
    let mut out = String::from("variant,z_m,F\n");
    for row in &bundle.cdf {
        writeln!(out, "{},{},{}", row.variant, row.z_m, row.f).unwrap();
    }
    out
}

fn decisions_jsonl(bundle: &ReportBundle) -> Result<String> {
    let mut out = String::new();
    for row in &bundle.decisions {
        out.push_str(&serde_json::to_string(row).map_err(|e| Error::Parse {
            path: "decisions.jsonl".into(),
            message: e.to_string(),
        })?);
        out.push('\n');
    }
    Ok(out)
}

#[derive(Serialize)]
struct Metadata<'a> {
    crate_version: &'static str,
    config: &'a ExperimentConfig,
    resolved_variants: Vec<&'static str>,
    trials: usize,
    solver_failures: usize,
    /// Digest over every trial's measurement set, for cross-run pairing checks.
    measurements_digest: String,
    medians_m: &'a [(String, f64)],
}

fn metadata_json(cfg: &ExperimentConfig, bundle: &ReportBundle) -> Result<String> {
    let mut digest = 0xcbf2_9ce4_8422_2325u64;
    for h in &bundle.measurement_hashes {
        for byte in h.to_le_bytes() {
            digest ^= byte as u64;
            digest = digest.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    let doc = Metadata {
        crate_version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        resolved_variants: cfg.resolve_variants()?.iter().map(|v| v.name).collect(),
        trials: bundle.measurement_hashes.len(),
        solver_failures: bundle.solver_failures,
        measurements_digest: format!("{digest:016x}"),
        medians_m: &bundle.medians_m,
    };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse {
        path: "metadata.json".into(),
        message: e.to_string(),
    })
}

fn timings_json(bundle: &ReportBundle) -> Result<String> {
    serde_json::to_string_pretty(&bundle.timings).map_err(|e| Error::Parse {
        path: "timings.json".into(),
        message: e.to_string(),
    })
}

/// Write the full report tree under `dir`, creating it if needed.
pub fn write_bundle(dir: &Path, cfg: &ExperimentConfig, bundle: &ReportBundle) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(dir, "convergence.csv", &convergence_csv(bundle))?;
    write_file(dir, "mse_vs_iteration.csv", &mse_csv(bundle))?;
    write_file(dir, "cdf.csv", &cdf_csv(bundle))?;
    write_file(dir, "decisions.jsonl", &decisions_jsonl(bundle)?)?;
    write_file(dir, "metadata.json", &metadata_json(cfg, bundle)?)?;
    write_file(dir, "timings.json", &timings_json(bundle)?)?;
    if let Some(scenario) = &bundle.scenario {
        write_file(dir, "scenario.csv", &scenario.to_csv())?;
    }
    Ok(())
}
