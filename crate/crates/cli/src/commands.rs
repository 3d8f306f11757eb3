use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ringburst_core::analytics;
use ringburst_core::montecarlo::{self, ExperimentConfig, InitialSpec};
use ringburst_core::phases::PhaseTraceJson;
use serde::Serialize;

use crate::config::{load_config, resolve_workers, RunManifest};

pub fn probability(n: usize, p: Option<f64>, gamma: Option<f64>) -> Result<f64> {
    match (p, gamma) {
        (Some(p), None) => Ok(p),
        (None, Some(g)) => Ok((n as f64).powf(-g)),
        _ => bail!("give exactly one of --p or --gamma"),
    }
}

fn parse_range(spec: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("--table expects t0,t1,dt; got {spec:?}"))?;
    match parts[..] {
        [a, b, c] => Ok((a, b, c)),
        _ => bail!("--table expects three numbers t0,t1,dt; got {spec:?}"),
    }
}

/// Prints the threshold profile as JSON, or with `table` a CSV of the
/// activation probabilities and the objective.
pub fn analytics_cmd(n: usize, p: Option<f64>, gamma: Option<f64>, table: Option<&str>, out: &mut dyn Write) -> Result<()> {
    let p = probability(n, p, gamma)?;
    match table {
        None => {
            let prof = analytics::thresholds(n, p)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&prof)?)?;
        }
        Some(spec) => {
            let (t0, t1, dt) = parse_range(spec)?;
            let rows = analytics::table(n, p, t0, t1, dt)?;
            writeln!(out, "t,pi_tilde,pi1,objective")?;
            for r in rows {
                writeln!(out, "{},{},{},{}", r.t, r.pi_tilde, r.pi1, r.objective)?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub master_seed: Option<u64>,
    pub replicates: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, mut cfg: ExperimentConfig) -> ExperimentConfig {
        if let Some(s) = self.master_seed {
            cfg.master_seed = s;
        }
        if let Some(r) = self.replicates {
            cfg.replicates = r;
        }
        cfg
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    resolved: &'a montecarlo::ResolvedConfig,
    summary: &'a montecarlo::Summary,
}

/// Runs an experiment and writes `report.csv`, `summary.json` and
/// `manifest.json` into `out_dir`.
pub fn simulate_cmd(config: &Path, out_dir: &Path, workers: Option<usize>, overrides: &Overrides) -> Result<()> {
    let cfg = overrides.apply(load_config(config)?);
    let workers = resolve_workers(workers)?;
    let report = montecarlo::run_experiment(&cfg, workers)?;
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    std::fs::write(out_dir.join("report.csv"), report.to_csv())?;
    write_json(
        &out_dir.join("summary.json"),
        &SummaryFile {
            resolved: &report.resolved,
            summary: &report.summary,
        },
    )?;
    let manifest = RunManifest::new("simulate", Some(config), Some(out_dir), workers, &report.resolved);
    write_json(&out_dir.join("manifest.json"), &manifest)?;
    eprintln!(
        "simulate: {} replicates, A0 = {}, almost {:.3}, fully {:.3} -> {}",
        report.rows.len(),
        report.resolved.a0,
        report.summary.almost.frequency,
        report.summary.fully.frequency,
        out_dir.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct TraceOutput {
    replicate: u64,
    #[serde(rename = "A0")]
    a0: usize,
    #[serde(flatten)]
    trace: PhaseTraceJson,
}

/// Replays one replicate and prints its phase trace.
pub fn phases_trace_cmd(config: &Path, replicate: u64, full_trajectory: bool, overrides: &Overrides, out: &mut dyn Write) -> Result<()> {
    let cfg = overrides.apply(load_config(config)?);
    let rc = cfg.resolve()?;
    if replicate >= cfg.replicates as u64 {
        bail!("replicate {replicate} is out of range (config has {})", cfg.replicates);
    }
    let trace = montecarlo::replicate_trace(&rc, replicate, full_trajectory, true)?;
    let json = TraceOutput {
        replicate,
        a0: rc.a0,
        trace: trace.to_json(),
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&json)?)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Gamma,
    P,
    N,
    Alpha,
    Y,
    Count,
}

impl std::str::FromStr for SweepParam {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gamma" => SweepParam::Gamma,
            "p" => SweepParam::P,
            "n" => SweepParam::N,
            "alpha" => SweepParam::Alpha,
            "y" | "window_offset" => SweepParam::Y,
            "count" => SweepParam::Count,
            _ => bail!("unknown sweep parameter {s:?} (gamma, p, n, alpha, y, count)"),
        })
    }
}

fn with_value(base: &ExperimentConfig, param: SweepParam, v: f64) -> ExperimentConfig {
    let cfg = base.clone();
    match param {
        SweepParam::Gamma => cfg.with_gamma(v),
        SweepParam::P => cfg.with_p(v),
        SweepParam::N => ExperimentConfig { n: v as usize, ..cfg },
        SweepParam::Alpha => ExperimentConfig {
            initial: InitialSpec::Alpha(v),
            ..cfg
        },
        SweepParam::Y => ExperimentConfig {
            initial: InitialSpec::WindowOffset(v),
            ..cfg
        },
        SweepParam::Count => ExperimentConfig {
            initial: InitialSpec::Count(v as usize),
            ..cfg
        },
    }
}

pub const SWEEP_HEADER: &str = "value,n,p,A0,replicates,mean_A_star,almost_freq,almost_lo,almost_hi,fully_freq,fully_lo,fully_hi";

/// Runs the base config once per value of one parameter and writes
/// `sweep.csv` and `manifest.json`.
pub fn sweep_cmd(config: &Path, param: SweepParam, values: &[f64], out_dir: &Path, workers: Option<usize>, overrides: &Overrides) -> Result<()> {
    let base = overrides.apply(load_config(config)?);
    let workers = resolve_workers(workers)?;
    std::fs::create_dir_all(out_dir)?;
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for &v in values {
        let report = montecarlo::run_experiment(&with_value(&base, param, v), workers)?;
        let s = &report.summary;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            v,
            report.resolved.n(),
            report.resolved.p,
            report.resolved.a0,
            s.replicates,
            s.mean_a_star,
            s.almost.frequency,
            s.almost.ci95.lo,
            s.almost.ci95.hi,
            s.fully.frequency,
            s.fully.ci95.lo,
            s.fully.ci95.hi
        ));
        eprintln!("sweep: {param:?} = {v}: A0 = {}, almost {:.3}", report.resolved.a0, s.almost.frequency);
    }
    std::fs::write(out_dir.join("sweep.csv"), csv)?;
    let mut manifest = RunManifest::new("sweep", Some(config), Some(out_dir), workers, &base.resolve()?);
    manifest.extra = Some(serde_json::json!({ "param": format!("{param:?}").to_lowercase(), "values": values }));
    write_json(&out_dir.join("manifest.json"), &manifest)
}

pub fn parse_values(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad value {s:?}")))
        .collect()
}

pub fn default_out_dir() -> PathBuf {
    PathBuf::from(".")
}
