//! Named verification suites. Each preset returns one [`Check`] per
//! pass/fail condition, tagged with the acceptance criterion it serves.

use std::time::Instant;

use anyhow::{bail, Result};
use rand::seq::index;
use rand::Rng;
use ringburst_core::analytics::{self, interval_pmf, mark_run_pmf};
use ringburst_core::cascade::{run_bootstrap, run_bootstrap_naive, CascadeConfig};
use ringburst_core::graph::{vertices, HybridGraph, VertexId};
use ringburst_core::montecarlo::{
    critical_window_scan, d1_scaling_check, doob_check, isotonic_violations, martingale_check, normality_check,
    ring_gain_seed_count, ring_vs_no_ring, run_experiment, subcritical_check, EdgeSampling, ExperimentConfig, InitialSpec,
};
use ringburst_core::phases::{run_phases, PhaseOptions};
use ringburst_core::rng::{stream, Purpose, StreamRng};
use serde::Serialize;

pub const PRESETS: [&str; 12] = [
    "oracle",
    "phases-equiv",
    "subcritical",
    "supercritical",
    "window",
    "ring-gain",
    "d1-scaling",
    "pmf",
    "martingale",
    "doob",
    "normality",
    "recursion",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(criterion: u8, name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        criterion,
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{status} [{}] {}: {}", self.criterion, self.name, self.detail)
    }
}

pub fn run_preset(name: &str, workers: usize) -> Result<Vec<Check>> {
    Ok(match name {
        "oracle" => oracle()?,
        "phases-equiv" => phases_equiv()?,
        "subcritical" => subcritical(workers)?,
        "supercritical" => supercritical(workers)?,
        "window" => window(workers)?,
        "ring-gain" => ring_gain(workers)?,
        "d1-scaling" => d1_scaling(workers)?,
        "pmf" => pmf(),
        "martingale" => martingale()?,
        "doob" => doob()?,
        "normality" => normality(workers)?,
        "recursion" => recursion()?,
        _ => bail!("unknown preset {name:?}; expected one of {}", PRESETS.join(", ")),
    })
}

fn random_seeds(rng: &mut StreamRng, n: usize, k: usize) -> Vec<VertexId> {
    let labels: Vec<usize> = index::sample(rng, n, k).into_iter().map(|v| v + 1).collect();
    vertices(&labels, n).expect("labels in range")
}

pub fn oracle() -> Result<Vec<Check>> {
    let start = Instant::now();
    let mut rng = stream(0x0AC1E, 0, Purpose::Graph);
    let mut mismatches = 0;
    let instances = 1000;
    for _ in 0..instances {
        let n = rng.random_range(10..=200);
        let p = rng.random_range(0.005..0.3);
        let g = HybridGraph::generate(n, p, 1, rng.random())?;
        let k = rng.random_range(0..=n / 4);
        let seeds = random_seeds(&mut rng, n, k);
        for cfg in [CascadeConfig::new(seeds.clone()), CascadeConfig::new(seeds).without_lattice()] {
            if run_bootstrap(&g, &cfg)?.final_active() != run_bootstrap_naive(&g, &cfg)? {
                mismatches += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(vec![
        check(1, "cascade equals naive oracle", mismatches == 0, format!("{mismatches} mismatches over {instances} instances, lattice on and off")),
        check(1, "oracle runtime", secs < 30.0, format!("{secs:.2} s (limit 30 s)")),
    ])
}

pub fn phases_equiv() -> Result<Vec<Check>> {
    let start = Instant::now();
    let mut rng = stream(0x0AC1E, 1, Purpose::Graph);
    let mut mismatches = 0;
    let instances = 1000;
    for _ in 0..instances {
        let n = rng.random_range(10..=500);
        let p = rng.random_range(0.005..0.3);
        let g = HybridGraph::generate(n, p, 1, rng.random())?;
        let k = rng.random_range(2..=n / 3);
        let seeds = random_seeds(&mut rng, n, k);
        let order_seed: u64 = rng.random();
        for lattice in [true, false] {
            let opts = PhaseOptions {
                use_lattice: lattice,
                ..Default::default()
            };
            let trace = run_phases(&g, &seeds, order_seed, &opts)?;
            let mut cfg = CascadeConfig::new(seeds.clone());
            if !lattice {
                cfg = cfg.without_lattice();
            }
            if trace.final_active != run_bootstrap(&g, &cfg)?.final_active() || trace.a_star() != trace.t_total() {
                mismatches += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(vec![
        check(2, "phase decomposition equals cascade", mismatches == 0, format!("{mismatches} mismatches over {instances} instances, lattice on and off")),
        check(2, "phases runtime", secs < 120.0, format!("{secs:.2} s (limit 120 s)")),
    ])
}

fn subcritical_config(alpha: f64, replicates: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig::new(200_000, InitialSpec::Alpha(alpha), replicates)
        .with_gamma(0.7)
        .with_seed(seed)
}

pub fn subcritical(workers: usize) -> Result<Vec<Check>> {
    let report = run_experiment(&subcritical_config(0.5, 200, 301), workers)?;
    let sc = subcritical_check(&report, 0.5)?;
    let almost = report.summary.almost;
    Ok(vec![
        check(3, "plateau mean A*/t_c", sc.gap <= 0.1, format!("mean {:.4}, phi(0.5) = {:.6}, gap {:.4} (limit 0.1), A0 = {}", sc.mean, sc.phi, sc.gap, report.resolved.a0)),
        check(3, "almost-percolation share", almost.frequency <= 0.05, format!("{}/{} (limit 5%)", almost.count, report.rows.len())),
    ])
}

pub fn supercritical(workers: usize) -> Result<Vec<Check>> {
    let report = run_experiment(&subcritical_config(1.5, 100, 302), workers)?;
    let fully = report.summary.fully;
    Ok(vec![check(
        4,
        "complete percolation share",
        fully.frequency >= 0.95,
        format!("{}/{} reach A* = n (limit 95%), A0 = {}", fully.count, report.rows.len(), report.resolved.a0),
    )])
}

pub fn window(workers: usize) -> Result<Vec<Check>> {
    let base = ExperimentConfig::new(1_000_000, InitialSpec::WindowOffset(0.0), 200)
        .with_gamma(0.6)
        .with_seed(305)
        .with_lattice(false);
    let rows = critical_window_scan(&base, &[-6.0, 0.0, 6.0], workers)?;
    let mut out = Vec::new();
    for row in &rows {
        let f = row.almost.frequency;
        let (pass, band) = match row.y {
            y if y < 0.0 => (f <= 0.05, "<= 0.05"),
            y if y > 0.0 => (f >= 0.95, ">= 0.95"),
            _ => ((0.3..=0.7).contains(&f), "in [0.3, 0.7]"),
        };
        let clamp = if row.a0_clamped { " (A0 clamped to 2)" } else { "" };
        out.push(check(
            5,
            format!("window y = {}", row.y),
            pass,
            format!("frequency {f:.3} {band}, Phi(y) = {:.3e}, A0 = {}{clamp}", row.normal_cdf, row.a0),
        ));
    }
    let violations = isotonic_violations(&rows);
    out.push(check(5, "window monotone in y", violations.is_empty(), format!("{} inverted pairs", violations.len())));

    let narrow = ExperimentConfig::new(1_000_000, InitialSpec::WindowOffset(-8.0), 100)
        .with_gamma(0.55)
        .with_seed(307);
    let report = run_experiment(&narrow, workers)?;
    let t_c = report.resolved.profile.as_ref().expect("p > 0").t_c;
    let below = report.rows.iter().filter(|r| r.a_star as f64 <= 1.2 * t_c).count();
    let share = below as f64 / report.rows.len() as f64;
    let clamp = if report.resolved.a0_clamped { " (A0 clamped to 2)" } else { "" };
    out.push(check(
        7,
        "narrow window with ring",
        share >= 0.95,
        format!("{below}/{} with A* <= 1.2 t_c = {:.2} (limit 95%), A0 = {}{clamp}", report.rows.len(), 1.2 * t_c, report.resolved.a0),
    ));
    Ok(out)
}

pub fn ring_gain(workers: usize) -> Result<Vec<Check>> {
    let n = 1_000_000usize;
    let p = (n as f64).powf(-0.9);
    let prof = analytics::thresholds(n, p)?;
    let a0 = ring_gain_seed_count(&prof).round() as usize;
    let cfg = ExperimentConfig {
        edge_sampling: EdgeSampling::Explicit,
        ..ExperimentConfig::new(n, InitialSpec::Count(a0), 50).with_gamma(0.9).with_seed(306)
    };
    let paired = ring_vs_no_ring(&cfg, workers)?;
    let reps = paired.rows.len();
    Ok(vec![
        check(6, "almost percolation with ring", paired.ring.frequency >= 0.8, format!("{}/{reps} (limit 0.8), A0 = {a0}, a_c* = {:.1}", paired.ring.count, prof.a_c_star)),
        check(6, "almost percolation without ring", paired.no_ring.frequency <= 0.1, format!("{}/{reps} (limit 0.1)", paired.no_ring.count)),
        check(6, "monotone coupling", paired.coupled == reps, format!("{}/{reps}", paired.coupled)),
    ])
}

pub fn d1_scaling(workers: usize) -> Result<Vec<Check>> {
    let small = ExperimentConfig::new(1_000_000, InitialSpec::Alpha(0.5), 300).with_gamma(0.8).with_seed(308);
    let r = d1_scaling_check(&small, workers)?;
    let large = ExperimentConfig::new(1_000_000, InitialSpec::Alpha(0.5), 300).with_gamma(0.55).with_seed(309);
    let l = d1_scaling_check(&large, workers)?;
    Ok(vec![
        check(8, "first expansion ~ 2 p T_1^2", (0.7..=1.3).contains(&r.ratio), format!("ratio {:.4} (band [0.7, 1.3]), mean |D_1| {:.2}", r.ratio, r.mean_d1)),
        check(8, "first expansion negligible for large p", l.mean_d1 <= 0.5, format!("mean |D_1| {:.4} (limit 0.5)", l.mean_d1)),
    ])
}

fn interval_oracle(n: usize, k: usize) -> Vec<f64> {
    let mut counts = vec![0u64; n];
    let mut total = 0u64;
    for mask in 0u32..(1 << n) {
        if mask & 1 == 0 || mask.count_ones() as usize != k {
            continue;
        }
        counts[(1..n).take_while(|&i| mask & (1 << i) == 0).count()] += 1;
        total += 1;
    }
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

fn mark_run_oracle(l: usize, p1: f64) -> Vec<f64> {
    let mut pmf = vec![0.0; l];
    for pattern in 0u32..(1 << l) {
        let marked = |i: usize| pattern & (1 << i) != 0;
        let prefix = (0..l).take_while(|&i| marked(i)).count();
        let absorbed = if prefix == l { l } else { prefix + (0..l).rev().take_while(|&i| marked(i)).count() };
        let s = pattern.count_ones() as i32;
        pmf[absorbed.min(l - 1)] += p1.powi(s) * (1.0 - p1).powi(l as i32 - s);
    }
    pmf
}

pub fn pmf() -> Vec<Check> {
    let mut worst_interval = 0.0f64;
    for n in 3..=12 {
        for k in 2..n {
            for (l, want) in interval_oracle(n, k).into_iter().enumerate() {
                worst_interval = worst_interval.max((interval_pmf(l, n, k) - want).abs());
            }
        }
    }
    let mut worst_marks = 0.0f64;
    for l in 2..=12 {
        for i in 0..=20 {
            let p1 = i as f64 / 20.0;
            for (m, want) in mark_run_oracle(l, p1).into_iter().enumerate() {
                worst_marks = worst_marks.max((mark_run_pmf(l, m, p1).expect("l >= 2") - want).abs());
            }
        }
    }
    vec![
        check(9, "interval pmf vs cycle enumeration", worst_interval <= 1e-12, format!("max error {worst_interval:.2e}, n <= 12")),
        check(9, "mark-run pmf vs pattern enumeration", worst_marks <= 1e-12, format!("max error {worst_marks:.2e}, l <= 12")),
    ]
}

pub fn martingale() -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for k1 in 1..=3 {
        for t0 in 1..=4 {
            for p in [0.0, 0.1, 0.3, 0.5, 0.9] {
                worst = worst.max(martingale_check(k1, p, t0)?);
            }
        }
    }
    Ok(vec![check(10, "martingale defect", worst <= 1e-12, format!("max defect {worst:.2e} over K1 <= 3, t0 <= 4"))])
}

pub fn doob() -> Result<Vec<Check>> {
    let cases = [(1000usize, 0.01, 20usize), (1000, 0.01, 5), (200, 0.05, 10), (50, 0.2, 4)];
    let mut out = Vec::new();
    for (i, &(k, p, t0)) in cases.iter().enumerate() {
        let r = doob_check(k, p, t0, 10_000, 310 + i as u64)?;
        out.push(check(
            10,
            format!("Doob bound K = {k}, p = {p}, t0 = {t0}"),
            r.pass,
            format!("E sup^2 = {:.3} vs bound {:.3} (allowed {:.3})", r.empirical, r.bound, r.allowed),
        ));
    }
    Ok(out)
}

pub fn normality(workers: usize) -> Result<Vec<Check>> {
    let cfg = ExperimentConfig::new(1_000_000, InitialSpec::WindowOffset(-8.0), 500)
        .with_gamma(0.6)
        .with_seed(311)
        .with_lattice(false);
    let r = normality_check(&cfg, workers)?;
    let clamp = if r.a0_clamped { " (A0 clamped to 2)" } else { "" };
    Ok(vec![
        check(11, "mean of T_1", r.mean_rel_err <= 0.1, format!("sample {:.3} vs t_* {:.3}, rel err {:.3} (limit 0.1), A0 = {}{clamp}", r.sample_mean, r.t_star, r.mean_rel_err, r.a0)),
        check(11, "variance of T_1", (0.5..=2.0).contains(&r.variance_ratio), format!("sample {:.3} vs predicted {:.3}, ratio {:.3} (band [0.5, 2])", r.sample_variance, r.predicted_variance, r.variance_ratio)),
        check(11, "KS distance to normal", r.ks <= 0.15, format!("{:.3} (limit 0.15)", r.ks)),
    ])
}

pub fn recursion() -> Result<Vec<Check>> {
    let mut rng = stream(0x0AC1E, 2, Purpose::Graph);
    let mut bad_terms = 0;
    let mut bad_sums = 0;
    for _ in 0..100 {
        let t1: f64 = rng.random_range(0.01..100.0);
        let c = rng.random_range(0.0..0.25) / t1;
        if c * t1 >= 0.25 {
            continue;
        }
        let r = analytics::recursion_bound(c, t1, 50)?;
        let mut envelope = t1;
        for &tk in &r.sequence {
            if tk > envelope {
                bad_terms += 1;
            }
            envelope *= r.alpha;
        }
        if r.sequence.iter().sum::<f64>() > r.sum_bound {
            bad_sums += 1;
        }
    }
    Ok(vec![
        check(12, "t_k <= alpha^(k-1) t_1", bad_terms == 0, format!("{bad_terms} violations over 100 draws x 50 terms")),
        check(12, "sum t_l <= t_1/(1 - alpha)", bad_sums == 0, format!("{bad_sums} violations")),
    ])
}
