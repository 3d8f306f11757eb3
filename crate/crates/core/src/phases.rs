//! Alternating exploration/expansion decomposition of the cascade on the
//! ring hybrid graph.
//!
//! *Exploration* uses active vertices one at a time. A used vertex gives a
//! mark to each inactive random neighbour, and a vertex holding two marks
//! becomes active. The phase stops once every active vertex of the phase has
//! been used, i.e. at the first `t` with `|A_k(t)| = t`.
//!
//! *Expansion* then spreads along the ring in three steps:
//! 1. fill every inactive run of length one;
//! 2. activate every marked vertex joined to an end of its inactive run
//!    through marked vertices only;
//! 3. fill the runs of length one left by step 2.
//!
//! The vertices gained in expansion `k` seed exploration `k + 1`. The process
//! ends at the first expansion that gains nothing. Marks are persistent
//! counters, so a vertex carrying one old mark needs one new mark to
//! activate. A random edge between ring neighbours is a lattice edge here and
//! never places a mark.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{HybridGraph, Lattice, VertexId};
use crate::reveal::{InactivePool, LazyHybrid, RandomEdges};
use crate::rng::{self, Purpose, StreamRng};

/// How the next vertex to use is picked among active unused vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ExplorationOrder {
    #[default]
    Uniform,
    Fifo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOptions {
    /// With the lattice off every phase is pure exploration and the run ends
    /// after the first phase.
    pub use_lattice: bool,
    pub record_trajectory: bool,
    pub record_intervals: bool,
    pub order: ExplorationOrder,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        PhaseOptions {
            use_lattice: true,
            record_trajectory: false,
            record_intervals: false,
            order: ExplorationOrder::Uniform,
        }
    }
}

/// A maximal run of inactive vertices, read clockwise from `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InactiveInterval {
    pub start: VertexId,
    pub length: usize,
}

impl InactiveInterval {
    pub fn vertices(&self, n: usize) -> Vec<VertexId> {
        (0..self.length)
            .map(|i| VertexId::from_zero((self.start.zero() + i) % n))
            .collect()
    }
}

pub(crate) fn intervals_from_mask(active: &[bool]) -> Vec<InactiveInterval> {
    let n = active.len();
    let Some(first) = active.iter().position(|&a| a) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut run: Option<(usize, usize)> = None;
    for step in 1..=n {
        let v = (first + step) % n;
        if active[v] {
            if let Some((start, length)) = run.take() {
                out.push(InactiveInterval {
                    start: VertexId::from_zero(start),
                    length,
                });
            }
        } else {
            run = Some(match run {
                Some((start, length)) => (start, length + 1),
                None => (v, 1),
            });
        }
    }
    out
}

/// Maximal inactive runs in ring order, starting after the lowest active id.
pub fn extract_intervals(active: &[VertexId], n: usize) -> Result<Vec<InactiveInterval>> {
    if active.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut mask = vec![false; n];
    for v in active {
        mask[v.check(n)?] = true;
    }
    Ok(intervals_from_mask(&mask))
}

/// `N_l`: the number of intervals of each length.
pub fn interval_counts(intervals: &[InactiveInterval]) -> BTreeMap<usize, usize> {
    let mut counts = BTreeMap::new();
    for iv in intervals {
        *counts.entry(iv.length).or_insert(0) += 1;
    }
    counts
}

/// Marks and used vertices at the end of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkState {
    marks: Vec<u8>,
    used: Vec<VertexId>,
}

impl MarkState {
    pub fn marks(&self, v: VertexId) -> u8 {
        self.marks[v.zero()]
    }

    /// Used vertices in order of use.
    pub fn used(&self) -> &[VertexId] {
        &self.used
    }

    pub fn cumulative_used(&self) -> usize {
        self.used.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationOutcome {
    pub t_k: usize,
    /// Vertices activated by reaching two marks during this phase.
    pub activated: Vec<VertexId>,
    /// `|A_k(t)|` for `t = 0..=T_k`, when recorded.
    pub trajectory: Option<Vec<usize>>,
}

/// Step-by-step driver of the decomposition; [`run_phases`] wraps it.
pub struct PhaseEngine<'a> {
    lattice: Lattice,
    ring: bool,
    edges: RandomEdges<'a>,
    order_rng: StreamRng,
    order: ExplorationOrder,
    record_trajectory: bool,
    pool: InactivePool,
    active: Vec<bool>,
    marks: Vec<u8>,
    used: Vec<u32>,
    is_used: Vec<bool>,
    selected: Vec<bool>,
    fresh_active: Vec<u32>,
    fresh_marked: Vec<u32>,
    hits: Vec<u32>,
}

impl<'a> PhaseEngine<'a> {
    fn build(lattice: Lattice, edges: RandomEdges<'a>, order_rng: StreamRng, a0: &[VertexId], opts: &PhaseOptions) -> Result<Self> {
        let ring = opts.use_lattice;
        if ring && lattice.dim() != 1 {
            return Err(Error::InvalidShape("the phase decomposition runs on the ring (dim = 1)".into()));
        }
        let n = lattice.n();
        let mut engine = PhaseEngine {
            lattice,
            ring,
            edges,
            order_rng,
            order: opts.order,
            record_trajectory: opts.record_trajectory,
            pool: InactivePool::full(n),
            active: vec![false; n],
            marks: vec![0; n],
            used: Vec::new(),
            is_used: vec![false; n],
            selected: vec![false; n],
            fresh_active: Vec::new(),
            fresh_marked: Vec::new(),
            hits: Vec::new(),
        };
        for v in a0 {
            let v = v.check(n)?;
            if !engine.active[v] {
                engine.activate(v);
            }
        }
        Ok(engine)
    }

    /// Engine on a stored graph with `A(0) = a0`.
    pub fn new(g: &'a HybridGraph, a0: &[VertexId], order_rng: StreamRng, opts: &PhaseOptions) -> Result<Self> {
        Self::build(g.lattice(), RandomEdges::Stored(g), order_rng, a0, opts)
    }

    /// Engine on a lazily revealed graph.
    pub fn new_lazy(g: &LazyHybrid, a0: &[VertexId], edge_rng: StreamRng, order_rng: StreamRng, opts: &PhaseOptions) -> Result<Self> {
        Self::build(g.lattice(), RandomEdges::Sampled { p: g.p(), rng: edge_rng }, order_rng, a0, opts)
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    fn activate(&mut self, v: usize) {
        self.active[v] = true;
        self.pool.remove(v);
        self.fresh_active.push(v as u32);
    }

    fn left(&self, v: usize) -> usize {
        let n = self.n();
        (v + n - 1) % n
    }

    fn right(&self, v: usize) -> usize {
        (v + 1) % self.n()
    }

    pub fn is_active(&self, v: VertexId) -> bool {
        self.active[v.zero()]
    }

    pub fn active_mask(&self) -> &[bool] {
        &self.active
    }

    pub fn marks(&self, v: VertexId) -> u8 {
        self.marks[v.zero()]
    }

    pub fn cumulative_used(&self) -> usize {
        self.used.len()
    }

    /// One exploration phase seeded by the active, unused `seeds`.
    pub fn explore(&mut self, seeds: &[VertexId]) -> Result<ExplorationOutcome> {
        if seeds.is_empty() {
            return Err(Error::InvalidPhase("exploration needs at least one unused active vertex".into()));
        }
        let mut unused: VecDeque<u32> = VecDeque::with_capacity(seeds.len());
        for s in seeds {
            let v = s.check(self.n())?;
            if !self.active[v] || self.is_used[v] {
                return Err(Error::InvalidPhase(format!("vertex {s} is not an unused active vertex")));
            }
            unused.push_back(v as u32);
        }
        let base = unused.len();
        let mut activated = Vec::new();
        let mut trajectory = self.record_trajectory.then(|| vec![base]);
        let mut t = 0usize;
        let mut hits = std::mem::take(&mut self.hits);
        while !unused.is_empty() {
            let u = match self.order {
                ExplorationOrder::Uniform => {
                    let i = self.order_rng.random_range(0..unused.len());
                    unused.swap_remove_back(i).expect("index in range")
                }
                ExplorationOrder::Fifo => unused.pop_front().expect("nonempty"),
            } as usize;
            self.used.push(u as u32);
            self.is_used[u] = true;
            t += 1;
            self.edges.reveal(u, &mut self.pool, &mut hits);
            for &h in &hits {
                let h = h as usize;
                if self.ring && self.lattice.adjacent(u, h) {
                    continue;
                }
                if self.marks[h] == 0 {
                    self.fresh_marked.push(h as u32);
                }
                self.marks[h] = self.marks[h].saturating_add(1);
                if self.marks[h] >= 2 {
                    self.activate(h);
                    activated.push(VertexId::from_zero(h));
                    unused.push_back(h as u32);
                }
            }
            if let Some(tr) = trajectory.as_mut() {
                tr.push(base + activated.len());
            }
        }
        self.hits = hits;
        assert_eq!(base + activated.len(), t, "phase must stop at |A_k(T_k)| = T_k");
        Ok(ExplorationOutcome {
            t_k: t,
            activated,
            trajectory,
        })
    }

    fn fill_singletons(&mut self, around: &[u32], out: &mut Vec<u32>) {
        for &a in around {
            let a = a as usize;
            for v in [self.left(a), self.right(a)] {
                if !self.active[v] && self.active[self.left(v)] && self.active[self.right(v)] {
                    self.active[v] = true;
                    self.pool.remove(v);
                    out.push(v as u32);
                }
            }
        }
    }

    /// One expansion phase; returns `D_k`.
    pub fn expand(&mut self) -> Vec<VertexId> {
        if !self.ring {
            self.fresh_active.clear();
            self.fresh_marked.clear();
            return Vec::new();
        }
        let fresh = std::mem::take(&mut self.fresh_active);
        let mut step1 = Vec::new();
        self.fill_singletons(&fresh, &mut step1);

        let mut step2 = Vec::new();
        let mut candidates: Vec<usize> = Vec::with_capacity(2 * (fresh.len() + step1.len()) + self.fresh_marked.len());
        for &a in fresh.iter().chain(&step1) {
            candidates.push(self.left(a as usize));
            candidates.push(self.right(a as usize));
        }
        candidates.extend(self.fresh_marked.iter().map(|&v| v as usize));
        for &e in &candidates {
            if self.active[e] || self.marks[e] == 0 || self.selected[e] {
                continue;
            }
            let (l, r) = (self.left(e), self.right(e));
            let mut walks = Vec::with_capacity(2);
            if self.active[l] {
                walks.push(true);
            }
            if self.active[r] {
                walks.push(false);
            }
            for towards_right in walks {
                let mut x = e;
                while !self.active[x] && self.marks[x] > 0 && !self.selected[x] {
                    self.selected[x] = true;
                    step2.push(x as u32);
                    x = if towards_right { self.right(x) } else { self.left(x) };
                }
            }
        }
        for &v in &step2 {
            let v = v as usize;
            self.selected[v] = false;
            self.active[v] = true;
            self.pool.remove(v);
        }

        let mut step3 = Vec::new();
        self.fill_singletons(&step2, &mut step3);

        let mut d_k: Vec<u32> = step1;
        d_k.extend(step2);
        d_k.extend(step3);
        self.check_boundaries(&fresh, &d_k);
        self.fresh_marked.clear();
        d_k.sort_unstable();
        d_k.into_iter().map(|v| VertexId::from_zero(v as usize)).collect()
    }

    /// Every inactive ring neighbour of an active vertex touched by this
    /// phase is unmarked and lies on a run of length at least two.
    fn check_boundaries(&self, fresh: &[u32], d_k: &[u32]) {
        let around = fresh.iter().chain(d_k).flat_map(|&a| [self.left(a as usize), self.right(a as usize)]);
        for x in around.chain(self.fresh_marked.iter().map(|&v| v as usize)) {
            if self.active[x] {
                continue;
            }
            let (l, r) = (self.active[self.left(x)], self.active[self.right(x)]);
            if l || r {
                assert!(!(l && r), "inactive run of length one survived expansion at {}", x + 1);
                assert_eq!(self.marks[x], 0, "marked run endpoint survived expansion at {}", x + 1);
            }
        }
    }

    fn into_mark_state(self) -> MarkState {
        MarkState {
            marks: self.marks,
            used: self.used.into_iter().map(|v| VertexId::from_zero(v as usize)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRecord {
    pub k: usize,
    pub t_k: usize,
    /// Vertices that reached two marks in the exploration phase.
    pub activated_by_marks: usize,
    pub d_k: Vec<VertexId>,
    pub trajectory: Option<Vec<usize>>,
    /// `N_l` of the inactive runs between exploration and expansion.
    pub interval_counts: Option<BTreeMap<usize, usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrace {
    pub phases: Vec<PhaseRecord>,
    pub final_active: Vec<VertexId>,
    pub mark_state: MarkState,
}

impl PhaseTrace {
    /// `K`, the index of the first expansion phase that gains nothing.
    pub fn k(&self) -> usize {
        self.phases.len()
    }

    pub fn t_total(&self) -> usize {
        self.phases.iter().map(|ph| ph.t_k).sum()
    }

    pub fn a_star(&self) -> usize {
        self.final_active.len()
    }

    pub fn to_json(&self) -> PhaseTraceJson {
        PhaseTraceJson {
            phases: self
                .phases
                .iter()
                .map(|ph| PhaseJson {
                    k: ph.k,
                    t_k: ph.t_k,
                    d_k_size: ph.d_k.len(),
                    n_l: ph.interval_counts.clone(),
                    trajectory: ph.trajectory.clone(),
                })
                .collect(),
            k: self.k(),
            t_total: self.t_total(),
            a_star: self.a_star(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseJson {
    pub k: usize,
    #[serde(rename = "T_k")]
    pub t_k: usize,
    #[serde(rename = "D_k_size")]
    pub d_k_size: usize,
    #[serde(rename = "N_l", skip_serializing_if = "Option::is_none")]
    pub n_l: Option<BTreeMap<usize, usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTraceJson {
    pub phases: Vec<PhaseJson>,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "T_total")]
    pub t_total: usize,
    #[serde(rename = "A_star")]
    pub a_star: usize,
}

pub(crate) fn drive(mut engine: PhaseEngine<'_>, a0: &[VertexId], record_intervals: bool) -> Result<PhaseTrace> {
    let mut seeds: Vec<VertexId> = a0.to_vec();
    seeds.sort_unstable();
    seeds.dedup();
    if seeds.len() < 2 {
        return Err(Error::InvalidSeedCount(seeds.len()));
    }
    let mut phases = Vec::new();
    loop {
        let k = phases.len() + 1;
        let out = engine.explore(&seeds)?;
        let interval_counts = record_intervals.then(|| interval_counts(&intervals_from_mask(engine.active_mask())));
        let d_k = engine.expand();
        let done = d_k.is_empty();
        seeds.clone_from(&d_k);
        phases.push(PhaseRecord {
            k,
            t_k: out.t_k,
            activated_by_marks: out.activated.len(),
            d_k,
            trajectory: out.trajectory,
            interval_counts,
        });
        if done {
            break;
        }
    }
    let final_active: Vec<VertexId> = engine
        .active_mask()
        .iter()
        .enumerate()
        .filter(|(_, &a)| a)
        .map(|(v, _)| VertexId::from_zero(v))
        .collect();
    let trace = PhaseTrace {
        phases,
        final_active,
        mark_state: engine.into_mark_state(),
    };
    debug_assert_eq!(trace.a_star(), trace.t_total());
    Ok(trace)
}

/// Runs the decomposition on a stored graph; `seed` drives the choice of
/// used vertices.
pub fn run_phases(g: &HybridGraph, a0: &[VertexId], seed: u64, opts: &PhaseOptions) -> Result<PhaseTrace> {
    run_phases_with(g, a0, rng::stream(seed, 0, Purpose::PhaseOrder), opts)
}

pub(crate) fn run_phases_with(g: &HybridGraph, a0: &[VertexId], order_rng: StreamRng, opts: &PhaseOptions) -> Result<PhaseTrace> {
    drive(PhaseEngine::new(g, a0, order_rng, opts)?, a0, opts.record_intervals)
}

/// Runs the decomposition with random edges revealed lazily.
pub fn run_phases_lazy(g: &LazyHybrid, a0: &[VertexId], seed: u64, opts: &PhaseOptions) -> Result<PhaseTrace> {
    run_phases_lazy_with(
        g,
        a0,
        rng::stream(seed, 0, Purpose::Graph),
        rng::stream(seed, 0, Purpose::PhaseOrder),
        opts,
    )
}

pub(crate) fn run_phases_lazy_with(
    g: &LazyHybrid,
    a0: &[VertexId],
    edge_rng: StreamRng,
    order_rng: StreamRng,
    opts: &PhaseOptions,
) -> Result<PhaseTrace> {
    drive(PhaseEngine::new_lazy(g, a0, edge_rng, order_rng, opts)?, a0, opts.record_intervals)
}
