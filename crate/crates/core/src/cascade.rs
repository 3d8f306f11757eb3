//! Threshold-`r` bootstrap percolation on hybrid graphs.
//!
//! The engine processes vertices in synchronous rounds. Every activated vertex
//! is processed once and bumps a per-vertex counter on each inactive
//! neighbour; a vertex whose counter reaches `r` joins the next round. Within a
//! round the frontier is processed in ascending id order, so the first `r`
//! counter bumps of a vertex (its trigger edges) are reproducible.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeKind, HybridGraph, Lattice, VertexId};
use crate::reveal::{InactivePool, LazyHybrid, RandomEdges};
use crate::rng::{self, Purpose, StreamRng};

const NAIVE_MAX_N: usize = 10_000;
const NO_ROUND: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeConfig {
    pub r: u32,
    pub initial: Vec<VertexId>,
    /// Ignore lattice edges, leaving the pure `G(n, p)` process on the same
    /// random edges.
    pub disable_lattice: bool,
}

impl CascadeConfig {
    pub fn new(initial: Vec<VertexId>) -> Self {
        CascadeConfig {
            r: 2,
            initial,
            disable_lattice: false,
        }
    }

    pub fn with_threshold(mut self, r: u32) -> Self {
        self.r = r;
        self
    }

    pub fn without_lattice(mut self) -> Self {
        self.disable_lattice = true;
        self
    }

    fn validate(&self, n: usize) -> Result<Vec<usize>> {
        if self.r < 2 {
            return Err(Error::InvalidCount(format!("threshold r must be >= 2, got {}", self.r)));
        }
        let mut seeds = self
            .initial
            .iter()
            .map(|v| v.check(n))
            .collect::<Result<Vec<_>>>()?;
        seeds.sort_unstable();
        seeds.dedup();
        Ok(seeds)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActivationCause {
    Seed,
    /// Every trigger edge is a lattice edge.
    Short,
    Mixed,
    /// Every trigger edge is a random edge.
    Long,
}

/// Classifies an activation from its trigger edges. `Merged` reads as a
/// lattice edge. An empty trigger list belongs to a seed, which has no
/// activation to classify.
pub fn classify_activation(trigger_edges: &[EdgeKind]) -> Result<ActivationCause> {
    if trigger_edges.is_empty() {
        return Err(Error::InvalidCall("seed vertices have no trigger edges".into()));
    }
    let local = trigger_edges.iter().filter(|&&k| k != EdgeKind::Random).count();
    Ok(classify_counts(local, trigger_edges.len()))
}

fn classify_counts(local: usize, total: usize) -> ActivationCause {
    if local == total {
        ActivationCause::Short
    } else if local == 0 {
        ActivationCause::Long
    } else {
        ActivationCause::Mixed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadeResult {
    rounds: Vec<u32>,
    causes: Vec<Option<ActivationCause>>,
    final_size: usize,
}

impl CascadeResult {
    pub fn n(&self) -> usize {
        self.rounds.len()
    }

    pub fn final_size(&self) -> usize {
        self.final_size
    }

    pub fn percolated_fully(&self) -> bool {
        self.final_size == self.n()
    }

    pub fn is_active(&self, v: VertexId) -> bool {
        self.rounds.get(v.zero()).is_some_and(|&r| r != NO_ROUND)
    }

    /// Sorted final active set.
    pub fn final_active(&self) -> Vec<VertexId> {
        (0..self.n())
            .filter(|&v| self.rounds[v] != NO_ROUND)
            .map(VertexId::from_zero)
            .collect()
    }

    pub fn round(&self, v: VertexId) -> Option<u32> {
        self.rounds.get(v.zero()).copied().filter(|&r| r != NO_ROUND)
    }

    pub fn cause(&self, v: VertexId) -> Option<ActivationCause> {
        self.causes.get(v.zero()).copied().flatten()
    }

    pub fn summary(&self) -> CascadeSummary {
        let mut rounds_histogram = Vec::new();
        let mut cause_counts = CauseCounts::default();
        for (&r, cause) in self.rounds.iter().zip(&self.causes) {
            if r == NO_ROUND {
                continue;
            }
            let r = r as usize;
            if rounds_histogram.len() <= r {
                rounds_histogram.resize(r + 1, 0);
            }
            rounds_histogram[r] += 1;
            match cause.expect("active vertices carry a cause") {
                ActivationCause::Seed => cause_counts.seed += 1,
                ActivationCause::Short => cause_counts.short += 1,
                ActivationCause::Mixed => cause_counts.mixed += 1,
                ActivationCause::Long => cause_counts.long += 1,
            }
        }
        CascadeSummary {
            final_size: self.final_size,
            percolated_fully: self.percolated_fully(),
            rounds_histogram,
            cause_counts,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauseCounts {
    pub seed: usize,
    pub short: usize,
    pub mixed: usize,
    pub long: usize,
}

/// JSON form of a [`CascadeResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeSummary {
    pub final_size: usize,
    pub percolated_fully: bool,
    pub rounds_histogram: Vec<usize>,
    pub cause_counts: CauseCounts,
}

/// Counter state shared by the round-based and random-order engines.
struct Counters {
    r: u32,
    counts: Vec<u32>,
    local: Vec<u32>,
}

impl Counters {
    fn new(n: usize, r: u32) -> Self {
        Counters {
            r,
            counts: vec![0; n],
            local: vec![0; n],
        }
    }

    /// Records one more active neighbour of `w`; true when `w` just reached
    /// the threshold.
    #[inline]
    fn bump(&mut self, w: usize, kind: EdgeKind) -> bool {
        self.counts[w] += 1;
        if kind != EdgeKind::Random {
            self.local[w] += 1;
        }
        self.counts[w] == self.r
    }

    fn cause(&self, w: usize) -> ActivationCause {
        classify_counts(self.local[w] as usize, self.r as usize)
    }
}

/// Bumps every inactive neighbour of the processed vertex `u`; `hits` holds
/// its inactive random neighbours in ascending order.
fn spread(
    u: usize,
    lattice: Option<&Lattice>,
    hits: &[u32],
    pool: &mut InactivePool,
    counters: &mut Counters,
    mut on_activate: impl FnMut(usize, &Counters),
) {
    if let Some(lattice) = lattice {
        for &w in lattice.neighbours(u).as_slice() {
            if !pool.contains(w) {
                continue;
            }
            let kind = if hits.binary_search(&(w as u32)).is_ok() {
                EdgeKind::Merged
            } else {
                EdgeKind::Local
            };
            if counters.bump(w, kind) {
                pool.remove(w);
                on_activate(w, counters);
            }
        }
    }
    for &h in hits {
        let h = h as usize;
        if lattice.is_some_and(|l| l.adjacent(u, h)) || !pool.contains(h) {
            continue;
        }
        if counters.bump(h, EdgeKind::Random) {
            pool.remove(h);
            on_activate(h, counters);
        }
    }
}

fn run_rounds(lattice: Lattice, edges: &mut RandomEdges<'_>, cfg: &CascadeConfig) -> Result<CascadeResult> {
    let n = lattice.n();
    let seeds = cfg.validate(n)?;
    let lattice = (!cfg.disable_lattice).then_some(lattice);
    let mut rounds = vec![NO_ROUND; n];
    let mut causes = vec![None; n];
    let mut pool = InactivePool::full(n);
    let mut counters = Counters::new(n, cfg.r);
    for &s in &seeds {
        rounds[s] = 0;
        causes[s] = Some(ActivationCause::Seed);
        pool.remove(s);
    }
    let mut final_size = seeds.len();
    let mut frontier = seeds;
    let mut next = Vec::new();
    let mut hits = Vec::new();
    let mut round = 0u32;
    while !frontier.is_empty() {
        for &u in &frontier {
            edges.reveal(u, &mut pool, &mut hits);
            spread(u, lattice.as_ref(), &hits, &mut pool, &mut counters, |w, c| {
                rounds[w] = round + 1;
                causes[w] = Some(c.cause(w));
                next.push(w);
            });
        }
        final_size += next.len();
        next.sort_unstable();
        std::mem::swap(&mut frontier, &mut next);
        next.clear();
        round += 1;
    }
    Ok(CascadeResult {
        rounds,
        causes,
        final_size,
    })
}

/// Runs the cascade to its fixed point on a stored graph.
pub fn run_bootstrap(g: &HybridGraph, cfg: &CascadeConfig) -> Result<CascadeResult> {
    run_rounds(g.lattice(), &mut RandomEdges::Stored(g), cfg)
}

/// Runs the cascade on a lazily revealed graph; `seed` drives edge sampling.
pub fn run_bootstrap_lazy(g: &LazyHybrid, cfg: &CascadeConfig, seed: u64) -> Result<CascadeResult> {
    run_bootstrap_lazy_with(g, cfg, rng::stream(seed, 0, Purpose::Graph))
}

pub(crate) fn run_bootstrap_lazy_with(g: &LazyHybrid, cfg: &CascadeConfig, rng: StreamRng) -> Result<CascadeResult> {
    run_rounds(g.lattice(), &mut RandomEdges::Sampled { p: g.p(), rng }, cfg)
}

/// Fixed point reached by popping pending vertices in a uniformly random
/// order instead of by rounds.
pub fn run_bootstrap_random_order(g: &HybridGraph, cfg: &CascadeConfig, seed: u64) -> Result<Vec<VertexId>> {
    let n = g.n();
    let seeds = cfg.validate(n)?;
    let lattice = (!cfg.disable_lattice).then_some(g.lattice());
    let mut rng = rng::stream(seed, 0, Purpose::PhaseOrder);
    let mut pool = InactivePool::full(n);
    let mut counters = Counters::new(n, cfg.r);
    let mut edges = RandomEdges::Stored(g);
    for &s in &seeds {
        pool.remove(s);
    }
    let mut active = seeds.clone();
    let mut pending = seeds;
    let mut hits = Vec::new();
    while !pending.is_empty() {
        let u = pending.swap_remove(rng.random_range(0..pending.len()));
        edges.reveal(u, &mut pool, &mut hits);
        spread(u, lattice.as_ref(), &hits, &mut pool, &mut counters, |w, _| {
            pending.push(w);
            active.push(w);
        });
    }
    active.sort_unstable();
    Ok(active.into_iter().map(VertexId::from_zero).collect())
}

/// Reference implementation: synchronous full scans until nothing changes.
/// `O(n * |E|)`, limited to `n <= 10^4`.
pub fn run_bootstrap_naive(g: &HybridGraph, cfg: &CascadeConfig) -> Result<Vec<VertexId>> {
    let n = g.n();
    if n > NAIVE_MAX_N {
        return Err(Error::OracleSize(format!("naive cascade limited to n <= {NAIVE_MAX_N}, got {n}")));
    }
    let seeds = cfg.validate(n)?;
    let mut active = vec![false; n];
    for s in seeds {
        active[s] = true;
    }
    let neighbourhoods: Vec<Vec<(VertexId, EdgeKind)>> = (0..n)
        .map(|v| g.neighbors(VertexId::from_zero(v)))
        .collect::<Result<_>>()?;
    loop {
        let newly: Vec<usize> = (0..n)
            .filter(|&v| !active[v])
            .filter(|&v| {
                let count = neighbourhoods[v]
                    .iter()
                    .filter(|(_, kind)| !(cfg.disable_lattice && *kind == EdgeKind::Local))
                    .filter(|(w, _)| active[w.zero()])
                    .count();
                count >= cfg.r as usize
            })
            .collect();
        if newly.is_empty() {
            break;
        }
        for v in newly {
            active[v] = true;
        }
    }
    Ok((0..n).filter(|&v| active[v]).map(VertexId::from_zero).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::vertices;

    fn ring(n: usize) -> HybridGraph {
        HybridGraph::generate(n, 0.0, 1, 0).unwrap()
    }

    fn labels(vs: &[VertexId]) -> Vec<usize> {
        vs.iter().map(|v| v.get()).collect()
    }

    #[test]
    fn ring_gap_of_one_fills_by_short_activation() {
        let g = ring(5);
        let cfg = CascadeConfig::new(vertices(&[1, 3], 5).unwrap());
        let res = run_bootstrap(&g, &cfg).unwrap();
        assert_eq!(labels(&res.final_active()), vec![1, 2, 3]);
        let two = VertexId::new(2, 5).unwrap();
        assert_eq!(res.cause(two), Some(ActivationCause::Short));
        assert_eq!(res.round(two), Some(1));
        assert_eq!(labels(&run_bootstrap_naive(&g, &cfg).unwrap()), vec![1, 2, 3]);
    }

    #[test]
    fn no_seeds_no_activity() {
        let g = HybridGraph::generate(30, 0.3, 1, 4).unwrap();
        let res = run_bootstrap(&g, &CascadeConfig::new(vec![])).unwrap();
        assert_eq!(res.final_size(), 0);
        assert!(!res.percolated_fully());
    }

    #[test]
    fn everything_seeded() {
        let g = HybridGraph::generate(12, 0.2, 1, 4).unwrap();
        let all = vertices(&(1..=12).collect::<Vec<_>>(), 12).unwrap();
        let res = run_bootstrap(&g, &CascadeConfig::new(all)).unwrap();
        assert!(res.percolated_fully());
        let s = res.summary();
        assert_eq!(s.cause_counts.seed, 12);
        assert_eq!(s.rounds_histogram, vec![12]);
    }

    #[test]
    fn naive_hand_fixed_points() {
        let g = ring(6);
        let stuck = CascadeConfig::new(vertices(&[1, 4], 6).unwrap());
        assert_eq!(labels(&run_bootstrap_naive(&g, &stuck).unwrap()), vec![1, 4]);
        let alternating = CascadeConfig::new(vertices(&[1, 3, 5], 6).unwrap());
        assert_eq!(labels(&run_bootstrap_naive(&g, &alternating).unwrap()), (1..=6).collect::<Vec<_>>());
    }

    #[test]
    fn naive_rejects_large_graphs() {
        let g = ring(10_001);
        assert!(matches!(
            run_bootstrap_naive(&g, &CascadeConfig::new(vec![])),
            Err(Error::OracleSize(_))
        ));
    }

    #[test]
    fn classification_table() {
        use EdgeKind::*;
        assert_eq!(classify_activation(&[Local, Local]).unwrap(), ActivationCause::Short);
        assert_eq!(classify_activation(&[Random, Random]).unwrap(), ActivationCause::Long);
        assert_eq!(classify_activation(&[Local, Random]).unwrap(), ActivationCause::Mixed);
        assert_eq!(classify_activation(&[Merged, Random]).unwrap(), ActivationCause::Mixed);
        assert_eq!(classify_activation(&[Merged, Local]).unwrap(), ActivationCause::Short);
        assert!(matches!(classify_activation(&[]), Err(Error::InvalidCall(_))));
    }

    #[test]
    fn merged_edge_counts_once() {
        // 1-2 is both a ring edge and a random edge; with seeds {1} ∪ {4}
        // vertex 2 sees one active neighbour through that merged pair.
        let g = HybridGraph::from_edges(6, 1, &[(1, 2)]).unwrap();
        let res = run_bootstrap(&g, &CascadeConfig::new(vertices(&[1, 4], 6).unwrap())).unwrap();
        assert_eq!(labels(&res.final_active()), vec![1, 4]);
    }

    #[test]
    fn mixed_and_long_causes() {
        // 3 has ring neighbour 2 active and a random edge to 6: mixed.
        // 5 has random edges to 1 and 2 only: long.
        let n = 9;
        let g = HybridGraph::from_edges(n, 1, &[(3, 6), (5, 1), (5, 2)]).unwrap();
        let cfg = CascadeConfig::new(vertices(&[1, 2, 6], n).unwrap());
        let res = run_bootstrap(&g, &cfg).unwrap();
        let v = |i| VertexId::new(i, n).unwrap();
        assert_eq!(res.cause(v(3)), Some(ActivationCause::Mixed));
        assert_eq!(res.cause(v(5)), Some(ActivationCause::Long));
        assert_eq!(res.cause(v(1)), Some(ActivationCause::Seed));
        assert_eq!(res.final_active(), run_bootstrap_naive(&g, &cfg).unwrap());
    }

    #[test]
    fn disabling_lattice_leaves_random_graph_process() {
        let g = HybridGraph::from_edges(8, 1, &[(1, 5), (3, 5), (1, 2)]).unwrap();
        let cfg = CascadeConfig::new(vertices(&[1, 3], 8).unwrap()).without_lattice();
        let res = run_bootstrap(&g, &cfg).unwrap();
        assert_eq!(labels(&res.final_active()), vec![1, 3, 5]);
        assert_eq!(res.final_active(), run_bootstrap_naive(&g, &cfg).unwrap());
    }

    #[test]
    fn random_order_matches_rounds() {
        for seed in 0..50 {
            let g = HybridGraph::generate(80, 0.03, 1, seed).unwrap();
            let cfg = CascadeConfig::new(vertices(&[1, 9, 30, 31, 60], 80).unwrap());
            let rounds = run_bootstrap(&g, &cfg).unwrap().final_active();
            assert_eq!(run_bootstrap_random_order(&g, &cfg, seed + 1000).unwrap(), rounds);
        }
    }

    #[test]
    fn threshold_below_two_rejected() {
        let g = ring(5);
        let cfg = CascadeConfig::new(vec![]).with_threshold(1);
        assert!(matches!(run_bootstrap(&g, &cfg), Err(Error::InvalidCount(_))));
    }

    #[test]
    fn summary_serializes_expected_fields() {
        let g = ring(5);
        let res = run_bootstrap(&g, &CascadeConfig::new(vertices(&[1, 3], 5).unwrap())).unwrap();
        let json = serde_json::to_value(res.summary()).unwrap();
        assert_eq!(json["final_size"], 3);
        assert_eq!(json["percolated_fully"], false);
        assert_eq!(json["rounds_histogram"], serde_json::json!([2, 1]));
        assert_eq!(json["cause_counts"]["short"], 1);
        assert_eq!(json["cause_counts"]["seed"], 2);
    }
}
