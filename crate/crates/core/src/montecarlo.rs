//! Reproducible replicate runner and the statistical checks built on it.
//!
//! Replicate `i` of an experiment draws its graph, its seed set and its
//! exploration order from the streams `(master_seed, i, purpose)`, so a
//! report does not depend on how many worker threads produced it.

use std::collections::BTreeMap;

use rand::seq::index;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::analytics::{self, AnalyticProfile};
use crate::cascade::{run_bootstrap, run_bootstrap_lazy_with, CascadeConfig};
use crate::error::{Error, Result};
use crate::graph::{HybridGraph, Lattice, VertexId};
use crate::phases::{run_phases_lazy_with, run_phases_with, PhaseOptions, PhaseTrace};
use crate::reveal::LazyHybrid;
use crate::rng::{stream, Purpose};
use crate::stats::{self, Interval, Z95};

/// Above this many expected random edges, `auto` sampling reveals edges
/// lazily instead of storing the graph.
pub const AUTO_EXPLICIT_EDGE_LIMIT: f64 = 2e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialSpec {
    /// A fixed number of seeds.
    Count(usize),
    /// `A0 = round(alpha * a_c)`.
    Alpha(f64),
    /// `A0 = round(a_c* + y * sqrt(a_c))`.
    WindowOffset(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    #[default]
    Uniform,
    /// Vertices 1, 3, 5, ...
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeSampling {
    #[default]
    Auto,
    Explicit,
    Lazy,
}

fn default_dim() -> u8 {
    1
}

fn default_true() -> bool {
    true
}

fn default_r() -> u32 {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Alternative to `p`: `p = n^-gamma`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default = "default_dim")]
    pub dim: u8,
    pub initial: InitialSpec,
    #[serde(default)]
    pub placement: Placement,
    pub replicates: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_true")]
    pub use_lattice: bool,
    /// `b*`: a run almost percolates when `A* >= n - b*`. Defaults to `n^0.9`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub almost_threshold: Option<f64>,
    #[serde(default = "default_r")]
    pub r: u32,
    #[serde(default)]
    pub edge_sampling: EdgeSampling,
}

impl ExperimentConfig {
    pub fn new(n: usize, initial: InitialSpec, replicates: usize) -> Self {
        ExperimentConfig {
            n,
            p: None,
            gamma: None,
            dim: 1,
            initial,
            placement: Placement::Uniform,
            replicates,
            master_seed: 0,
            use_lattice: true,
            almost_threshold: None,
            r: 2,
            edge_sampling: EdgeSampling::Auto,
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self.gamma = None;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self.p = None;
        self
    }

    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn with_lattice(mut self, on: bool) -> Self {
        self.use_lattice = on;
        self
    }

    pub fn resolve(&self) -> Result<ResolvedConfig> {
        if self.r != 2 {
            return Err(Error::config("r", "only threshold r = 2 is supported"));
        }
        if self.replicates == 0 {
            return Err(Error::EmptyExperiment);
        }
        let n = self.n;
        Lattice::for_dim(n, self.dim)?;
        let p = match (self.p, self.gamma) {
            (Some(p), None) => p,
            (None, Some(g)) if g > 0.0 => (n as f64).powf(-g),
            (None, Some(g)) => return Err(Error::config("gamma", format!("must be positive, got {g}"))),
            (None, None) => return Err(Error::config("p", "one of `p` or `gamma` is required")),
            (Some(_), Some(_)) => return Err(Error::config("p", "give `p` or `gamma`, not both")),
        };
        if !(0.0..1.0).contains(&p) {
            return Err(Error::config("p", format!("must lie in [0, 1), got {p}")));
        }
        let profile = if p > 0.0 { Some(analytics::thresholds(n, p)?) } else { None };
        let a0_target = match self.initial {
            InitialSpec::Count(c) => c as f64,
            InitialSpec::Alpha(alpha) => {
                let prof = profile.as_ref().ok_or_else(|| Error::config("initial", "alpha needs p > 0"))?;
                alpha * prof.a_c
            }
            InitialSpec::WindowOffset(y) => {
                let prof = profile.as_ref().ok_or_else(|| Error::config("initial", "window_offset needs p > 0"))?;
                prof.a_c_star + y * prof.a_c.sqrt()
            }
        };
        let rounded = a0_target.round();
        let (a0, a0_clamped) = match self.initial {
            InitialSpec::Count(c) if c < 2 || c > n => {
                return Err(Error::config("initial", format!("count must lie in [2, n], got {c}")));
            }
            InitialSpec::Count(c) => (c, false),
            _ if rounded < 2.0 => (2, true),
            _ if rounded > n as f64 => (n, true),
            _ => (rounded as usize, false),
        };
        if self.placement == Placement::Alternating && 2 * a0 > n {
            return Err(Error::config("placement", format!("{a0} alternating seeds do not fit in n = {n}")));
        }
        let b_star = match self.almost_threshold {
            Some(b) if b >= 0.0 => b,
            Some(b) => return Err(Error::config("almost_threshold", format!("must be nonnegative, got {b}"))),
            None => (n as f64).powf(0.9),
        };
        let expected_edges = n as f64 * (n as f64 - 1.0) / 2.0 * p;
        let lazy = match self.edge_sampling {
            EdgeSampling::Explicit => false,
            EdgeSampling::Lazy => true,
            EdgeSampling::Auto => expected_edges > AUTO_EXPLICIT_EDGE_LIMIT,
        };
        Ok(ResolvedConfig {
            config: self.clone(),
            p,
            a0,
            a0_target,
            a0_clamped,
            b_star,
            lazy,
            profile,
        })
    }
}

/// A validated config with every derived quantity filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub config: ExperimentConfig,
    pub p: f64,
    pub a0: usize,
    /// The unrounded seed count the initial spec asked for.
    pub a0_target: f64,
    /// Set when the target was pulled into `[2, n]`.
    pub a0_clamped: bool,
    pub b_star: f64,
    pub lazy: bool,
    pub profile: Option<AnalyticProfile>,
}

impl ResolvedConfig {
    pub fn n(&self) -> usize {
        self.config.n
    }

    fn seeds(&self, replicate: u64) -> Vec<VertexId> {
        let (n, a0) = (self.n(), self.a0);
        let mut zero: Vec<usize> = match self.config.placement {
            Placement::Alternating => (0..a0).map(|j| 2 * j).collect(),
            Placement::Uniform => {
                let mut rng = stream(self.config.master_seed, replicate, Purpose::Seeds);
                index::sample(&mut rng, n, a0).into_vec()
            }
        };
        zero.sort_unstable();
        zero.into_iter().map(VertexId::from_zero).collect()
    }

    fn graph(&self, replicate: u64) -> Result<HybridGraph> {
        let lattice = Lattice::for_dim(self.n(), self.config.dim)?;
        let mut rng = stream(self.config.master_seed, replicate, Purpose::Graph);
        Ok(HybridGraph::generate_with(lattice, self.p, self.config.master_seed, &mut rng))
    }

    fn almost(&self, a_star: usize) -> bool {
        a_star as f64 >= self.n() as f64 - self.b_star
    }
}

/// One line of `report.csv`, plus per-phase detail kept for the checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub replicate: u64,
    pub a0: usize,
    pub a_star: usize,
    /// Number of phases; 0 when the cascade ran without the decomposition
    /// (torus with lattice on).
    pub k: usize,
    pub t_total: usize,
    pub t_k: Vec<usize>,
    pub d1: usize,
    pub percolated_almost: bool,
    pub percolated_fully: bool,
}

/// Replays the phase decomposition of one replicate. `record_trajectory`
/// and `record_intervals` only add detail; the sampled run is the same.
pub fn replicate_trace(
    rc: &ResolvedConfig,
    replicate: u64,
    record_trajectory: bool,
    record_intervals: bool,
) -> Result<PhaseTrace> {
    let cfg = &rc.config;
    if cfg.dim != 1 && cfg.use_lattice {
        return Err(Error::InvalidShape("the phase decomposition runs on the ring (dim = 1)".into()));
    }
    let seeds = rc.seeds(replicate);
    let order_rng = stream(cfg.master_seed, replicate, Purpose::PhaseOrder);
    let opts = PhaseOptions {
        use_lattice: cfg.use_lattice,
        record_trajectory,
        record_intervals,
        ..Default::default()
    };
    if rc.lazy {
        let g = LazyHybrid::new(rc.n(), rc.p, cfg.dim)?;
        let edge_rng = stream(cfg.master_seed, replicate, Purpose::Graph);
        run_phases_lazy_with(&g, &seeds, edge_rng, order_rng, &opts)
    } else {
        run_phases_with(&rc.graph(replicate)?, &seeds, order_rng, &opts)
    }
}

/// Runs replicate `replicate` of `rc` on its own.
pub fn run_replicate(rc: &ResolvedConfig, replicate: u64) -> Result<ReplicateRow> {
    let cfg = &rc.config;
    let n = rc.n();
    let (a_star, k, t_k, d1) = if cfg.dim == 1 || !cfg.use_lattice {
        let trace = replicate_trace(rc, replicate, false, false)?;
        let t_k: Vec<usize> = trace.phases.iter().map(|ph| ph.t_k).collect();
        (trace.a_star(), trace.k(), t_k, trace.phases[0].d_k.len())
    } else {
        let cc = CascadeConfig::new(rc.seeds(replicate));
        let res = if rc.lazy {
            let edge_rng = stream(cfg.master_seed, replicate, Purpose::Graph);
            run_bootstrap_lazy_with(&LazyHybrid::new(n, rc.p, cfg.dim)?, &cc, edge_rng)?
        } else {
            run_bootstrap(&rc.graph(replicate)?, &cc)?
        };
        (res.final_size(), 0, Vec::new(), 0)
    };
    Ok(ReplicateRow {
        replicate,
        a0: rc.a0,
        a_star,
        k,
        t_total: t_k.iter().sum(),
        t_k,
        d1,
        percolated_almost: rc.almost(a_star),
        percolated_fully: a_star == n,
    })
}

fn par_map<T: Send>(workers: usize, count: usize, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| (0..count as u64).into_par_iter().map(f).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub count: usize,
    pub frequency: f64,
    pub ci95: Interval,
}

impl Frequency {
    pub fn of(count: usize, trials: usize) -> Self {
        Frequency {
            count,
            frequency: count as f64 / trials as f64,
            ci95: stats::wilson(count, trials, Z95),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub replicates: usize,
    pub a0: usize,
    pub a0_clamped: bool,
    pub mean_a_star: f64,
    pub var_a_star: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_a_star_over_tc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub var_a_star_over_tc: Option<f64>,
    pub mean_k: f64,
    pub almost: Frequency,
    pub fully: Frequency,
}

impl Summary {
    pub fn from_rows(rc: &ResolvedConfig, rows: &[ReplicateRow]) -> Self {
        let a: Vec<f64> = rows.iter().map(|r| r.a_star as f64).collect();
        let ks: Vec<f64> = rows.iter().map(|r| r.k as f64).collect();
        let scaled: Option<Vec<f64>> = rc.profile.as_ref().map(|prof| a.iter().map(|x| x / prof.t_c).collect());
        let count = |pred: fn(&ReplicateRow) -> bool| rows.iter().filter(|r| pred(r)).count();
        Summary {
            replicates: rows.len(),
            a0: rc.a0,
            a0_clamped: rc.a0_clamped,
            mean_a_star: stats::mean(&a),
            var_a_star: stats::variance(&a),
            mean_a_star_over_tc: scaled.as_deref().map(stats::mean),
            var_a_star_over_tc: scaled.as_deref().map(stats::variance),
            mean_k: stats::mean(&ks),
            almost: Frequency::of(count(|r| r.percolated_almost), rows.len()),
            fully: Frequency::of(count(|r| r.percolated_fully), rows.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub resolved: ResolvedConfig,
    pub rows: Vec<ReplicateRow>,
    pub summary: Summary,
}

pub const CSV_HEADER: &str = "replicate,n,p,A0,A_star,K,T_total,percolated_almost,percolated_fully";

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.replicate,
                self.resolved.n(),
                self.resolved.p,
                r.a0,
                r.a_star,
                r.k,
                r.t_total,
                r.percolated_almost as u8,
                r.percolated_fully as u8
            ));
        }
        out
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentReport> {
    let rc = cfg.resolve()?;
    let rows = par_map(workers, cfg.replicates, |i| run_replicate(&rc, i))?;
    let summary = Summary::from_rows(&rc, &rows);
    Ok(ExperimentReport {
        resolved: rc,
        rows,
        summary,
    })
}

/// Frequency of `A* >= n - b*` with its Wilson 95% interval.
pub fn estimate_percolation_prob(report: &ExperimentReport, b_star: f64) -> Result<Frequency> {
    if report.rows.is_empty() {
        return Err(Error::EmptyExperiment);
    }
    let n = report.resolved.n() as f64;
    let hits = report.rows.iter().filter(|r| r.a_star as f64 >= n - b_star).count();
    Ok(Frequency::of(hits, report.rows.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubcriticalCheck {
    pub mean: f64,
    pub variance: f64,
    pub phi: f64,
    pub gap: f64,
}

/// Compares the replicate mean of `A*/t_c` with `phi(alpha)`.
pub fn subcritical_check(report: &ExperimentReport, alpha: f64) -> Result<SubcriticalCheck> {
    if !(alpha < 1.0) {
        return Err(Error::Domain(format!("subcritical check needs alpha < 1, got {alpha}")));
    }
    let s = &report.summary;
    let (Some(mean), Some(variance)) = (s.mean_a_star_over_tc, s.var_a_star_over_tc) else {
        return Err(Error::Domain("t_c is undefined for p = 0".into()));
    };
    let phi = analytics::phi(alpha.max(0.0))?;
    Ok(SubcriticalCheck {
        mean,
        variance,
        phi,
        gap: (mean - phi).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRow {
    pub y: f64,
    pub a0: usize,
    pub a0_clamped: bool,
    pub almost: Frequency,
    pub normal_cdf: f64,
}

/// Runs `base` once per offset `y` with `A0 = a_c* + y sqrt(a_c)`.
pub fn critical_window_scan(base: &ExperimentConfig, y_grid: &[f64], workers: usize) -> Result<Vec<WindowRow>> {
    let std_normal = Normal::new(0.0, 1.0).expect("standard normal");
    y_grid
        .iter()
        .map(|&y| {
            let cfg = ExperimentConfig {
                initial: InitialSpec::WindowOffset(y),
                ..base.clone()
            };
            let report = run_experiment(&cfg, workers)?;
            Ok(WindowRow {
                y,
                a0: report.resolved.a0,
                a0_clamped: report.resolved.a0_clamped,
                almost: report.summary.almost,
                normal_cdf: std_normal.cdf(y),
            })
        })
        .collect()
}

/// Pairs `(i, j)` with `y_i < y_j` whose frequencies are inverted and whose
/// intervals do not overlap.
pub fn isotonic_violations(rows: &[WindowRow]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..rows.len() {
        for j in 0..rows.len() {
            let (a, b) = (&rows[i], &rows[j]);
            if a.y < b.y && a.almost.frequency > b.almost.frequency && !a.almost.ci95.overlaps(&b.almost.ci95) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Seed count sitting `0.3` of the way into the margin below `a_c*` within
/// which the ring still drives almost percolation:
/// `a_c* - 0.3 sqrt(a_c) / (p n^{3/4})^2`.
pub fn ring_gain_seed_count(prof: &AnalyticProfile) -> f64 {
    let envelope = (1.0 / (prof.p * (prof.n as f64).powf(0.75))).powi(2);
    prof.a_c_star - 0.3 * prof.a_c.sqrt() * envelope
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedRow {
    pub replicate: u64,
    pub a_star_ring: usize,
    pub a_star_no_ring: usize,
    pub almost_ring: bool,
    pub almost_no_ring: bool,
    /// The final set without the ring is contained in the one with it.
    pub coupled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedReport {
    pub resolved: ResolvedConfig,
    pub rows: Vec<PairedRow>,
    pub ring: Frequency,
    pub no_ring: Frequency,
    pub coupled: usize,
}

/// Runs every replicate twice on one stored graph and one seed set, with
/// and without the lattice.
pub fn ring_vs_no_ring(cfg: &ExperimentConfig, workers: usize) -> Result<PairedReport> {
    let rc = cfg.resolve()?;
    let rows = par_map(workers, cfg.replicates, |i| {
        let g = rc.graph(i)?;
        let seeds = rc.seeds(i);
        let ring = run_bootstrap(&g, &CascadeConfig::new(seeds.clone()))?;
        let bare = run_bootstrap(&g, &CascadeConfig::new(seeds).without_lattice())?;
        let coupled = bare.final_active().iter().all(|&v| ring.is_active(v));
        debug_assert!(coupled, "monotone coupling broken in replicate {i}");
        Ok(PairedRow {
            replicate: i,
            a_star_ring: ring.final_size(),
            a_star_no_ring: bare.final_size(),
            almost_ring: rc.almost(ring.final_size()),
            almost_no_ring: rc.almost(bare.final_size()),
            coupled,
        })
    })?;
    let reps = rows.len();
    Ok(PairedReport {
        ring: Frequency::of(rows.iter().filter(|r| r.almost_ring).count(), reps),
        no_ring: Frequency::of(rows.iter().filter(|r| r.almost_no_ring).count(), reps),
        coupled: rows.iter().filter(|r| r.coupled).count(),
        resolved: rc,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct D1Report {
    pub mean_d1: f64,
    pub mean_t1_sq: f64,
    /// `mean |D_1| / (2 p mean T_1^2)`.
    pub ratio: f64,
}

pub fn d1_scaling_check(cfg: &ExperimentConfig, workers: usize) -> Result<D1Report> {
    let report = run_experiment(cfg, workers)?;
    d1_from_report(&report)
}

pub fn d1_from_report(report: &ExperimentReport) -> Result<D1Report> {
    if report.rows.iter().any(|r| r.t_k.is_empty()) {
        return Err(Error::Domain("first-phase data needs the ring decomposition".into()));
    }
    let d1: Vec<f64> = report.rows.iter().map(|r| r.d1 as f64).collect();
    let t1_sq: Vec<f64> = report.rows.iter().map(|r| (r.t_k[0] as f64).powi(2)).collect();
    let (mean_d1, mean_t1_sq) = (stats::mean(&d1), stats::mean(&t1_sq));
    Ok(D1Report {
        mean_d1,
        mean_t1_sq,
        ratio: mean_d1 / (2.0 * report.resolved.p * mean_t1_sq),
    })
}

/// Largest deviation of `E[X(t+1) | indicator history up to t]` from
/// `X(t)`, where `X(t) = (S(t) - K1 pi1(t)) / (1 - pi1(t))` and `S(t)` counts
/// which of `K1` vertices have seen two successes among `t` Bernoulli(p)
/// trials. Enumerates all `2^{K1 t0}` outcomes.
pub fn martingale_check(k1: usize, p: f64, t0: usize) -> Result<f64> {
    if k1 > 3 || t0 > 4 {
        return Err(Error::OracleSize(format!("K1 = {k1}, t0 = {t0} (limits 3 and 4)")));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let bits = k1 * t0;
    // q(t) = 1 - pi1(t), evaluated directly; X(t) = K1 - (K1 - S(t)) / q(t)
    let q: Vec<f64> = (0..=t0)
        .map(|t| {
            let t = t as i32;
            (1.0 - p).powi(t) + t as f64 * p * (1.0 - p).powi(t - 1)
        })
        .collect();
    // time at which vertex v first has two successes, or t0 + 1
    let activation = |mask: u32, v: usize| {
        let mut seen = 0;
        for s in 0..t0 {
            if mask & (1 << (v * t0 + s)) != 0 {
                seen += 1;
                if seen == 2 {
                    return s + 1;
                }
            }
        }
        t0 + 1
    };
    let mut defect = 0.0f64;
    for t in 0..t0 {
        let mut groups: BTreeMap<Vec<usize>, (f64, f64)> = BTreeMap::new();
        for mask in 0u32..(1 << bits) {
            let ones = mask.count_ones() as i32;
            let w = p.powi(ones) * (1.0 - p).powi(bits as i32 - ones);
            if w == 0.0 {
                continue;
            }
            let times: Vec<usize> = (0..k1).map(|v| activation(mask, v)).collect();
            let history: Vec<usize> = times.iter().map(|&a| a.min(t + 1)).collect();
            let inactive_next = times.iter().filter(|&&a| a > t + 1).count();
            let e = groups.entry(history).or_insert((0.0, 0.0));
            e.0 += w;
            e.1 += w * inactive_next as f64;
        }
        for (history, (w, w_inactive)) in groups {
            let inactive_now = history.iter().filter(|&&a| a > t).count();
            // E[X(t+1) | history] - X(t)
            let d = inactive_now as f64 / q[t] - w_inactive / (w * q[t + 1]);
            defect = defect.max(d.abs());
        }
    }
    Ok(defect)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoobReport {
    /// Monte Carlo estimate of `E sup_{t <= t0} (S(t) - E S(t))^2`.
    pub empirical: f64,
    /// `4 K pi1(t0) / (1 - pi1(t0))`.
    pub bound: f64,
    /// `bound * (1 + 3 / sqrt(replicates))`.
    pub allowed: f64,
    pub pass: bool,
}

pub fn doob_bound(k: usize, p: f64, t0: usize) -> f64 {
    let pi = analytics::pi1(t0 as u64, p);
    4.0 * k as f64 * pi / (1.0 - pi)
}

pub fn doob_check(k: usize, p: f64, t0: usize, replicates: usize, seed: u64) -> Result<DoobReport> {
    if replicates < 1000 {
        return Err(Error::InvalidCount(format!("doob check needs at least 1000 replicates, got {replicates}")));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let bound = doob_bound(k, p, t0);
    let allowed = bound * (1.0 + 3.0 / (replicates as f64).sqrt());
    let mean_s: Vec<f64> = (0..=t0).map(|t| k as f64 * analytics::pi1(t as u64, p)).collect();
    let mut rng = stream(seed, 0, Purpose::Graph);
    let geometric = (p > 0.0).then(|| Geometric::new(p).expect("p in (0, 1)"));
    let mut hits = vec![0usize; t0 + 1];
    let mut total = 0.0;
    for _ in 0..replicates {
        hits.iter_mut().for_each(|h| *h = 0);
        if let Some(geo) = &geometric {
            for _ in 0..k {
                let tau = 2 + geo.sample(&mut rng) + geo.sample(&mut rng);
                if tau <= t0 as u64 {
                    hits[tau as usize] += 1;
                }
            }
        }
        let mut s = 0usize;
        let mut sup = 0.0f64;
        for t in 0..=t0 {
            s += hits[t];
            sup = sup.max((s as f64 - mean_s[t]).powi(2));
        }
        total += sup;
    }
    let empirical = total / replicates as f64;
    Ok(DoobReport {
        empirical,
        bound,
        allowed,
        pass: empirical <= allowed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub a0: usize,
    pub a0_clamped: bool,
    pub t_star: f64,
    pub predicted_variance: f64,
    pub sample_mean: f64,
    pub sample_variance: f64,
    pub mean_rel_err: f64,
    pub variance_ratio: f64,
    pub ks: f64,
}

/// Compares the first stopping time `T_1` without the ring to its normal
/// approximation.
pub fn normality_check(cfg: &ExperimentConfig, workers: usize) -> Result<NormalityReport> {
    if cfg.use_lattice {
        return Err(Error::config("use_lattice", "the normal approximation is for the bare random graph"));
    }
    let report = run_experiment(cfg, workers)?;
    let rc = &report.resolved;
    let prof = rc.profile.as_ref().ok_or_else(|| Error::config("p", "must be positive"))?;
    let pred = analytics::t_star_asn_from(prof, rc.a0 as f64)?;
    let t1: Vec<f64> = report.rows.iter().map(|r| r.t_k[0] as f64).collect();
    let (m, v) = (stats::mean(&t1), stats::variance(&t1));
    let normal = Normal::new(pred.mean, pred.variance.sqrt()).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(NormalityReport {
        a0: rc.a0,
        a0_clamped: rc.a0_clamped,
        t_star: pred.mean,
        predicted_variance: pred.variance,
        sample_mean: m,
        sample_variance: v,
        mean_rel_err: ((m - pred.mean) / pred.mean).abs(),
        variance_ratio: v / pred.variance,
        ks: stats::ks_one_sample(&t1, |x| normal.cdf(x)),
    })
}
