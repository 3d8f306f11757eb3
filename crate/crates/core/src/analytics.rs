//! Closed-form and numeric quantities for bootstrap percolation on the ring
//! hybrid graph.
//!
//! Everything here is a pure function. Products of many `(1 - p)` factors go
//! through `ln_1p`, and binomial coefficients through log-gamma.

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};

const GRID_POINTS: usize = 10_000;
const GOLDEN_REL_TOL: f64 = 1e-10;

fn check_open_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// Threshold quantities for `G_{n,p}` on the ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticProfile {
    pub n: usize,
    pub p: f64,
    pub t_c: f64,
    pub a_c: f64,
    pub a_c_star: f64,
    pub t_c_star: f64,
    pub b_c: f64,
    pub q_c_2d: f64,
    /// Set when the minimizer of the objective sits on an end of `[0, 3 t_c]`.
    pub out_of_regime: bool,
}

/// `(n pi~(t) - t) / (1 - pi~(t))`; `-a_c*` is its minimum over `[0, 3 t_c]`.
pub fn objective(t: f64, n: usize, p: f64) -> f64 {
    let pt = pi_tilde(t, p);
    (n as f64 * pt - t) / (1.0 - pt)
}

pub fn thresholds(n: usize, p: f64) -> Result<AnalyticProfile> {
    check_open_probability(p)?;
    if n < 2 {
        return Err(Error::InvalidSize(format!("n = {n}")));
    }
    let nf = n as f64;
    let t_c = 1.0 / (nf * p * p);
    let (t_c_star, min, out_of_regime) = minimize(|t| objective(t, n, p), 0.0, 3.0 * t_c);
    Ok(AnalyticProfile {
        n,
        p,
        t_c,
        a_c: t_c / 2.0,
        a_c_star: -min,
        t_c_star,
        b_c: p * nf * nf * (-p * nf).exp(),
        q_c_2d: std::f64::consts::PI.powi(2) / (18.0 * nf.ln()),
        out_of_regime,
    })
}

/// Grid search followed by golden-section refinement around the best grid
/// point. Returns `(argmin, min, hit_endpoint)`.
fn minimize(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64, bool) {
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let at = |i: usize| lo + step * i as f64;
    let (best, _) = (0..GRID_POINTS)
        .map(|i| (i, f(at(i))))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    if best == 0 || best == GRID_POINTS - 1 {
        let t = at(best);
        return (t, f(t), true);
    }
    let (mut a, mut b) = (at(best - 1), at(best + 1));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > GOLDEN_REL_TOL * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let t = (a + b) / 2.0;
    (t, f(t), false)
}

/// `P{Po(tp) >= 2} = 1 - e^{-tp}(1 + tp)`.
pub fn pi_tilde(t: f64, p: f64) -> f64 {
    let x = t * p;
    if x <= 0.0 {
        return 0.0;
    }
    if x < 0.1 {
        // sum_{k>=2} (-1)^k (k-1) x^k / k!
        let mut sum = 0.0;
        let mut power_over_fact = x; // x^k / k! at k = 1
        for k in 2..40 {
            power_over_fact *= x / k as f64;
            let term = (k - 1) as f64 * power_over_fact;
            sum += if k % 2 == 0 { term } else { -term };
            if term < 1e-18 * sum {
                break;
            }
        }
        return sum;
    }
    1.0 - (-x).exp() * (1.0 + x)
}

/// `P{Bin(t, p) >= 2}`.
pub fn pi1(t: u64, p: f64) -> f64 {
    if t < 2 || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let tf = t as f64;
    let ln_q = (-p).ln_1p();
    if tf * p < 0.1 {
        // Sum the upper tail directly to avoid cancellation.
        let ratio = p / (1.0 - p);
        let mut term = (ln_binomial(t, 2) + 2.0 * p.ln() + (tf - 2.0) * ln_q).exp();
        let mut sum = 0.0;
        let mut k = 2u64;
        loop {
            sum += term;
            if k == t || term < 1e-18 * sum {
                break;
            }
            term *= (t - k) as f64 / (k + 1) as f64 * ratio;
            k += 1;
        }
        return sum;
    }
    let none = (tf * ln_q).exp();
    let one = tf * p * ((tf - 1.0) * ln_q).exp();
    (1.0 - none - one).max(0.0)
}

/// Probability that an inactive vertex carries exactly one mark after `k`
/// used vertices, given that it has not been activated.
pub fn mark_prob_p1(k: u64, p: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidCount("mark_prob_p1 needs k >= 1".into()));
    }
    let kf = k as f64;
    Ok(kf * p / (1.0 + (kf - 1.0) * p))
}

/// Activation probability after `t` further steps for a vertex that may hold
/// one mark from `cum_t` earlier used vertices.
pub fn pi_next(t: u64, p: f64, cum_t: u64) -> f64 {
    let base = pi1(t, p);
    if cum_t == 0 || t == 0 {
        return base;
    }
    let p1 = mark_prob_p1(cum_t, p).expect("cum_t >= 1");
    let tf = t as f64;
    base + p1 * ((tf - 1.0) * (-p).ln_1p()).exp() * p * tf
}

/// `1 - sqrt(1 - alpha)`.
pub fn phi(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("phi needs alpha in [0, 1], got {alpha}")));
    }
    Ok(1.0 - (1.0 - alpha).sqrt())
}

/// Law of the length of the inactive run following a given active vertex
/// when `k` of `n` ring vertices are active uniformly at random.
pub fn interval_pmf(l: usize, n: usize, k: usize) -> f64 {
    if k < 2 || k > n || l > n - k {
        return 0.0;
    }
    let (n, k, l) = (n as u64, k as u64, l as u64);
    (ln_binomial(n - 2 - l, k - 2) - ln_binomial(n - 1, k - 1)).exp()
}

/// Law of the number of vertices step 2 absorbs from a run of length `l`
/// whose vertices are marked independently with probability `p1`.
/// `m = l - 1` stands for the event "at least `l - 1`".
pub fn mark_run_pmf(l: usize, m: usize, p1: f64) -> Result<f64> {
    if l < 2 {
        return Err(Error::Domain(format!("mark_run_pmf needs l >= 2, got {l}")));
    }
    if m > l - 1 {
        return Ok(0.0);
    }
    let q = 1.0 - p1;
    if m == l - 1 {
        return Ok(p1.powi(l as i32) + l as f64 * q * p1.powi(l as i32 - 1));
    }
    Ok((m + 1) as f64 * p1.powi(m as i32) * q * q)
}

/// Probability that a run of length two is entirely absorbed by the step-2
/// scan from exactly one side.
pub fn eta_prob(p1: f64) -> f64 {
    2.0 * p1 * (1.0 - p1).powi(2)
}

/// The quadratic `f_{T1}(t) = a t^2 + b t + c` controlling the second phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec {
    pub n: usize,
    pub p: f64,
    pub t1: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub t_min: f64,
    /// Minimum of `f` over `t >= 0`.
    pub min_value: f64,
}

impl DriftSpec {
    pub fn eval(&self, t: f64) -> f64 {
        (self.a * t + self.b) * t + self.c
    }
}

pub fn drift(n: usize, p: f64, t1: f64) -> DriftSpec {
    let nf = n as f64;
    let a = (nf - t1) * p * p / 2.0;
    let b = nf * p * p * t1 - 1.0 - 3.0 * (t1 * p).powi(2);
    let c = 2.0 * p * t1 * t1;
    let t_min = -b / (2.0 * a);
    let min_value = if t_min > 0.0 { c - b * b / (4.0 * a) } else { c };
    DriftSpec {
        n,
        p,
        t1,
        a,
        b,
        c,
        t_min,
        min_value,
    }
}

/// Normal approximation of the first-phase stopping time below threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TStarAsn {
    pub mean: f64,
    pub variance: f64,
}

pub fn t_star_asn(n: usize, p: f64, a0: f64) -> Result<TStarAsn> {
    let prof = thresholds(n, p)?;
    t_star_asn_from(&prof, a0)
}

pub fn t_star_asn_from(prof: &AnalyticProfile, a0: f64) -> Result<TStarAsn> {
    let acs = prof.a_c_star;
    if a0 >= acs {
        return Err(Error::Domain(format!("A0 = {a0} is not below a_c* = {acs}")));
    }
    let t_c = prof.t_c;
    Ok(TStarAsn {
        mean: t_c + prof.p * t_c * t_c - (2.0 * t_c * (acs - a0)).sqrt(),
        variance: t_c / (2.0 * (1.0 - a0 / acs)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionBound {
    pub sequence: Vec<f64>,
    pub alpha: f64,
    pub sum_bound: f64,
}

/// Iterates `t_{k+1} = c t_k (t_1 + ... + t_k)` for `k_max` terms and finds
/// the geometric envelope `t_k <= alpha^{k-1} t_1`.
pub fn recursion_bound(c: f64, t1: f64, k_max: usize) -> Result<RecursionBound> {
    let ct1 = c * t1;
    if !(ct1 < 0.25) || c < 0.0 || t1 <= 0.0 {
        return Err(Error::NoValidAlpha(ct1));
    }
    let alpha = (1..=99)
        .map(|i| i as f64 / 100.0)
        .find(|a| (1.0 - a) * a > ct1)
        .ok_or(Error::NoValidAlpha(ct1))?;
    let mut sequence = Vec::with_capacity(k_max);
    let mut sum = 0.0;
    let mut t = t1;
    for _ in 0..k_max {
        sequence.push(t);
        sum += t;
        t = c * t * sum;
    }
    let sum_bound = t1 / (1.0 - alpha);
    let mut envelope = t1;
    for &tk in &sequence {
        assert!(tk <= envelope * (1.0 + 1e-12), "recursion escaped its envelope");
        envelope *= alpha;
    }
    assert!(sequence.iter().sum::<f64>() <= sum_bound * (1.0 + 1e-12));
    Ok(RecursionBound {
        sequence,
        alpha,
        sum_bound,
    })
}

/// Expected number of vertices with no random edge into a set of `k_active`
/// vertices: `(n - K)(1 - p)^K`.
pub fn complete_percolation_bound(n: usize, p: f64, k_active: usize) -> f64 {
    let rest = n.saturating_sub(k_active) as f64;
    if rest == 0.0 {
        return 0.0;
    }
    if p <= 0.0 {
        return rest;
    }
    (rest.ln() + k_active as f64 * (-p).ln_1p()).exp()
}

/// One row of the `analytics --table` output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub t: f64,
    pub pi_tilde: f64,
    pub pi1: f64,
    pub objective: f64,
}

/// Rows for `t = t0, t0 + dt, ...` up to `t1` inclusive; `pi1` is evaluated
/// at `floor(t)`, and `objective` is the negated objective whose maximum is
/// `a_c*`.
pub fn table(n: usize, p: f64, t0: f64, t1: f64, dt: f64) -> Result<Vec<TableRow>> {
    check_open_probability(p)?;
    if !(dt > 0.0) || !(t1 >= t0) || t0 < 0.0 {
        return Err(Error::Domain(format!("bad table range {t0},{t1},{dt}")));
    }
    let steps = ((t1 - t0) / dt + 1e-9).floor() as usize;
    Ok((0..=steps)
        .map(|i| {
            let t = t0 + dt * i as f64;
            TableRow {
                t,
                pi_tilde: pi_tilde(t, p),
                pi1: pi1(t.floor() as u64, p),
                objective: -objective(t, n, p),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn threshold_formulas() {
        let prof = thresholds(10_000, 1e-2).unwrap();
        assert!(close(prof.t_c, 1.0, 1e-12));
        assert!(close(prof.a_c, 0.5, 1e-12));
        assert!(matches!(thresholds(10_000, 1.5), Err(Error::InvalidProbability(_))));
        assert!(matches!(thresholds(10_000, 0.0), Err(Error::InvalidProbability(_))));
    }

    #[test]
    fn minimizer_matches_dense_grid() {
        let (n, p) = (10_000, 5e-3);
        let prof = thresholds(n, p).unwrap();
        assert!(prof.t_c_star >= 0.0 && prof.t_c_star <= 12.0);
        assert!(prof.a_c_star > 0.0);
        let dense = (0..=12_000)
            .map(|i| objective(i as f64 * 1e-3, n, p))
            .fold(f64::INFINITY, f64::min);
        assert!(-dense <= prof.a_c_star + 1e-12);
        assert!(close(prof.a_c_star, -dense, 1e-6));
    }

    #[test]
    fn critical_ratio_tends_to_one() {
        let ratios: Vec<f64> = [1e4, 1e5, 1e6]
            .iter()
            .map(|&n: &f64| {
                let prof = thresholds(n as usize, n.powf(-0.6)).unwrap();
                assert!(!prof.out_of_regime);
                prof.a_c_star / prof.a_c
            })
            .collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
        assert!(ratios[2] > 1.0 && ratios[2] < 1.2, "{ratios:?}");
    }

    #[test]
    fn pi_tilde_values() {
        assert_eq!(pi_tilde(0.0, 0.3), 0.0);
        assert!(close(pi_tilde(1.0, 1.0), 0.264_241_117_657_115_4, 1e-14));
        // series and closed form agree where they meet
        let x = 0.1f64;
        assert!(close(pi_tilde(1.0 - 1e-12, x), 1.0 - (-x).exp() * (1.0 + x), 1e-10));
        let mut prev = 0.0;
        for i in 0..2000 {
            let v = pi_tilde(i as f64 * 0.01, 0.5);
            assert!(v >= prev && v <= 1.0);
            prev = v;
        }
    }

    #[test]
    fn pi1_values() {
        assert_eq!(pi1(0, 0.3), 0.0);
        assert_eq!(pi1(1, 0.3), 0.0);
        assert!(close(pi1(2, 0.5), 0.25, 1e-15));
        assert!(close(pi1(3, 0.5), 0.5, 1e-15));
        // branch boundary: tp = 0.1 from both sides
        let p: f64 = 1e-3;
        let direct = |t: u64| 1.0 - (1.0 - p).powi(t as i32) - t as f64 * p * (1.0 - p).powi(t as i32 - 1);
        assert!(close(pi1(99, p), direct(99), 1e-9));
        assert!(close(pi1(100, p), direct(100), 1e-9));
    }

    #[test]
    fn binomial_and_poisson_tails_agree_for_long_runs() {
        // The relative gap is about 1/t, so the 1e-3 band needs t >= 1000.
        for &(t, p) in &[(1000u64, 1e-4), (5000, 2e-5), (20_000, 5e-6), (1000, 1e-7)] {
            let (a, b) = (pi1(t, p), pi_tilde(t as f64, p));
            assert!(a <= b);
            assert!((b - a) / b < 1e-3, "t={t} p={p}");
        }
    }

    #[test]
    fn mark_probability() {
        assert!(close(mark_prob_p1(1, 0.37).unwrap(), 0.37, 1e-15));
        assert!(close(mark_prob_p1(2, 0.5).unwrap(), 2.0 / 3.0, 1e-15));
        assert!(matches!(mark_prob_p1(0, 0.5), Err(Error::InvalidCount(_))));
    }

    #[test]
    fn pi_next_values() {
        assert!(close(pi_next(1, 0.5, 1), 0.25, 1e-15));
        assert_eq!(pi_next(7, 0.2, 0), pi1(7, 0.2));
        for t in 1..30 {
            assert!(pi_next(t, 0.05, 12) >= pi1(t, 0.05));
        }
    }

    /// `P{Bin(t, p) + xi >= 2}` with `xi ~ Bernoulli(p1)` by enumeration.
    #[test]
    fn pi_next_matches_enumeration() {
        let (t, p, cum) = (6u64, 0.3, 4u64);
        let p1 = mark_prob_p1(cum, p).unwrap();
        let mut total = 0.0;
        for pattern in 0u32..(1 << t) {
            let s = pattern.count_ones() as i32;
            let w = p.powi(s) * (1.0 - p).powi(t as i32 - s);
            total += w * if s >= 2 { 1.0 } else if s == 1 { p1 } else { 0.0 };
        }
        assert!(close(pi_next(t, p, cum), total, 1e-12));
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(0.0).unwrap(), 0.0);
        assert_eq!(phi(1.0).unwrap(), 1.0);
        assert!(close(phi(0.75).unwrap(), 0.5, 1e-15));
        assert!(phi(1.1).is_err() && phi(-0.1).is_err());
    }

    /// Gap after vertex 0 over all active sets containing 0.
    fn interval_oracle(n: usize, k: usize) -> Vec<f64> {
        let mut counts = vec![0u64; n];
        let mut total = 0u64;
        for mask in 0u32..(1 << n) {
            if mask & 1 == 0 || mask.count_ones() as usize != k {
                continue;
            }
            let gap = (1..n).take_while(|&i| mask & (1 << i) == 0).count();
            counts[gap] += 1;
            total += 1;
        }
        counts.iter().map(|&c| c as f64 / total as f64).collect()
    }

    #[test]
    fn interval_pmf_matches_enumeration() {
        assert!(close(interval_pmf(1, 5, 2), 0.25, 1e-15));
        for n in 3..=12 {
            for k in 2..n {
                let oracle = interval_oracle(n, k);
                for (l, &want) in oracle.iter().enumerate() {
                    assert!((interval_pmf(l, n, k) - want).abs() < 1e-12, "n={n} k={k} l={l}");
                }
            }
        }
        assert_eq!(interval_pmf(9, 10, 3), 0.0);
    }

    #[test]
    fn interval_pmf_normalizes() {
        for n in 2..=30 {
            for k in 2..=n {
                let s: f64 = (0..=n - k).map(|l| interval_pmf(l, n, k)).sum();
                assert!((s - 1.0).abs() < 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn short_intervals_are_rare() {
        let (n, k) = (10_000, 100);
        let s: f64 = (0..=2).map(|l| interval_pmf(l, n, k)).sum();
        let pred = 3.0 * k as f64 / n as f64;
        assert!(((s - pred) / pred).abs() < 0.05);
    }

    /// Vertices absorbed by scanning a run's marked prefix and suffix.
    fn absorbed(pattern: u32, l: usize) -> usize {
        let marked = |i: usize| pattern & (1 << i) != 0;
        let prefix = (0..l).take_while(|&i| marked(i)).count();
        if prefix == l {
            return l;
        }
        let suffix = (0..l).rev().take_while(|&i| marked(i)).count();
        prefix + suffix
    }

    #[test]
    fn mark_run_pmf_matches_enumeration() {
        assert!(close(mark_run_pmf(2, 1, 0.5).unwrap(), 0.75, 1e-15));
        assert!(close(mark_run_pmf(4, 2, 0.3).unwrap(), 0.1323, 1e-12));
        assert!(mark_run_pmf(1, 0, 0.5).is_err());
        for l in 2..=12usize {
            for &p1 in &[0.0f64, 0.1, 0.3, 0.5, 0.77, 1.0] {
                let mut oracle = vec![0.0; l];
                for pattern in 0u32..(1 << l) {
                    let s = pattern.count_ones() as i32;
                    let w = p1.powi(s) * (1.0 - p1).powi(l as i32 - s);
                    oracle[absorbed(pattern, l).min(l - 1)] += w;
                }
                let mut sum = 0.0;
                for (m, &want) in oracle.iter().enumerate() {
                    let got = mark_run_pmf(l, m, p1).unwrap();
                    assert!((got - want).abs() < 1e-12, "l={l} m={m} p1={p1}");
                    sum += got;
                }
                assert!((sum - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta_prob(0.0), 0.0);
        assert!(close(eta_prob(0.5), 0.25, 1e-15));
        let best = (0..=3000).map(|i| i as f64 / 3000.0).max_by(|a, b| eta_prob(*a).total_cmp(&eta_prob(*b))).unwrap();
        assert!((best - 1.0 / 3.0).abs() < 1e-3);
        assert!(close(eta_prob(1.0 / 3.0), 8.0 / 27.0, 1e-14));
    }

    #[test]
    fn drift_examples() {
        let d = drift(1_000_000, 1e-4, 200.0);
        assert!(d.t_min < 0.0);
        assert!(close(d.min_value, 8.0, 1e-12));
        assert!(close(d.eval(0.0), 8.0, 1e-12));
    }

    #[test]
    fn drift_minimum_matches_numeric_minimizer() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(1_000..1_000_000usize);
            let p = (n as f64).powf(-rng.random_range(0.55..0.95));
            let t1 = rng.random_range(1.0..(0.5 / (n as f64 * p * p)).max(2.0));
            let d = drift(n, p, t1);
            let hi = 4.0 * d.t_min.abs().max(1.0);
            let (_, numeric, _) = minimize(|t| d.eval(t), 0.0, hi);
            assert!(close(d.min_value, numeric, 1e-9), "n={n} p={p} t1={t1}");
        }
    }

    #[test]
    fn drift_sign_rule() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10_000 {
            let n = rng.random_range(100..10_000_000usize);
            let p = rng.random_range(1e-7..0.1);
            let t1 = rng.random_range(1.0..(n as f64 / 2.0));
            let d = drift(n, p, t1);
            let cond = n as f64 * p * p * t1 > 1.0 + 3.0 * (t1 * p).powi(2);
            assert_eq!(d.t_min < 0.0, cond);
        }
    }

    #[test]
    fn asymptotic_normal_parameters() {
        let prof = thresholds(1_000_000, 1e6f64.powf(-0.6)).unwrap();
        let half = t_star_asn_from(&prof, prof.a_c_star / 2.0).unwrap();
        assert!(close(half.variance, prof.t_c, 1e-12));
        let mut prev = 0.0;
        for i in 0..100 {
            let a0 = prof.a_c_star * i as f64 / 100.0;
            let r = t_star_asn_from(&prof, a0).unwrap();
            assert!(r.variance > prev);
            assert!(r.mean < prof.t_c + prof.p * prof.t_c * prof.t_c);
            prev = r.variance;
        }
        assert!(t_star_asn_from(&prof, prof.a_c_star).is_err());
    }

    #[test]
    fn recursion_examples() {
        let r = recursion_bound(0.1, 1.0, 3).unwrap();
        assert!(close(r.sequence[1], 0.1, 1e-15));
        assert!(close(r.sequence[2], 0.011, 1e-14));
        assert!(r.alpha <= 0.2 && (1.0 - r.alpha) * r.alpha > 0.1);
        let zero = recursion_bound(0.0, 2.0, 5).unwrap();
        assert_eq!(zero.sequence, vec![2.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(recursion_bound(0.25, 1.0, 3), Err(Error::NoValidAlpha(_))));
    }

    #[test]
    fn recursion_envelope_on_random_draws() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let t1 = rng.random_range(0.01..100.0);
            let c = rng.random_range(0.0..0.2499) / t1;
            let r = recursion_bound(c, t1, 50).unwrap();
            let mut env = t1;
            for &tk in &r.sequence {
                assert!(tk <= env * (1.0 + 1e-12));
                env *= r.alpha;
            }
        }
    }

    #[test]
    fn straggler_bound() {
        assert_eq!(complete_percolation_bound(100, 0.1, 100), 0.0);
        assert_eq!(complete_percolation_bound(100, 0.0, 40), 60.0);
        let v = complete_percolation_bound(10_000, 1e-3, 9900);
        assert!(close(v, 100.0 * 0.999f64.powi(9900), 1e-12));
        // exact value; 100 e^{-9.9} = 0.00502 is its Poisson approximation
        assert!(close(v, 0.004_992_676_618_729_664, 1e-12));
        assert!(((v - 0.00502) / v).abs() < 0.01);
    }

    #[test]
    fn table_row_count() {
        let rows = table(10_000, 0.005, 0.0, 12.0, 0.01).unwrap();
        assert_eq!(rows.len(), 1201);
        assert!(close(rows[1200].t, 12.0, 1e-12));
    }
}
