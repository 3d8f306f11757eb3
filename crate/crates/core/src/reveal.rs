//! Edge revelation shared by the cascade and phase engines.
//!
//! Both engines touch the random edges of a vertex exactly once, when that
//! vertex is processed (or "used"), and only care about edges that land on
//! inactive vertices. That makes two interchangeable sources possible:
//!
//! * [`HybridGraph`] reads a stored adjacency list;
//! * [`LazyHybrid`] draws `Bin(m, p)` hits among the `m` currently inactive
//!   vertices. A pair is examined only when its first endpoint is processed,
//!   and both endpoints are active afterwards, so every pair is sampled at most
//!   once and the revealed process has exactly the law of the process on a
//!   freshly drawn `G(n, p)`. Cost is `O(1 + m p)` per processed vertex rather
//!   than `O(n^2 p)` storage.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::Result;
use crate::graph::{check_probability, HybridGraph, Lattice};
use crate::rng::StreamRng;

/// A hybrid graph whose random edges are revealed on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LazyHybrid {
    lattice: Lattice,
    p: f64,
}

impl LazyHybrid {
    pub fn new(n: usize, p: f64, dim: u8) -> Result<Self> {
        let lattice = Lattice::for_dim(n, dim)?;
        check_probability(p)?;
        Ok(LazyHybrid { lattice, p })
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }
}

/// The set of inactive vertices with O(1) membership, removal and uniform
/// sampling.
#[derive(Debug, Clone)]
pub(crate) struct InactivePool {
    slots: Vec<u32>,
    pos: Vec<u32>,
    len: usize,
}

const ABSENT: u32 = u32::MAX;

impl InactivePool {
    pub(crate) fn full(n: usize) -> Self {
        InactivePool {
            slots: (0..n as u32).collect(),
            pos: (0..n as u32).collect(),
            len: n,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub(crate) fn contains(&self, v: usize) -> bool {
        self.pos[v] != ABSENT
    }

    fn swap_slots(&mut self, a: usize, b: usize) {
        self.slots.swap(a, b);
        self.pos[self.slots[a] as usize] = a as u32;
        self.pos[self.slots[b] as usize] = b as u32;
    }

    pub(crate) fn remove(&mut self, v: usize) {
        let at = self.pos[v];
        if at == ABSENT {
            return;
        }
        let last = self.len - 1;
        self.swap_slots(at as usize, last);
        self.pos[v] = ABSENT;
        self.len = last;
    }

    /// Appends `k` distinct inactive vertices chosen uniformly to `out`.
    fn sample_distinct(&mut self, k: usize, rng: &mut StreamRng, out: &mut Vec<u32>) {
        debug_assert!(k <= self.len);
        for i in 0..k {
            let j = rng.random_range(i..self.len);
            self.swap_slots(i, j);
            out.push(self.slots[i]);
        }
    }
}

/// A source of random neighbourhoods for processed vertices.
pub(crate) enum RandomEdges<'a> {
    Stored(&'a HybridGraph),
    Sampled { p: f64, rng: StreamRng },
}

impl RandomEdges<'_> {
    /// Writes the random neighbours of `u` that are currently inactive into
    /// `out` (cleared first). Order is ascending for stored graphs.
    pub(crate) fn reveal(&mut self, u: usize, pool: &mut InactivePool, out: &mut Vec<u32>) {
        out.clear();
        match self {
            RandomEdges::Stored(g) => {
                out.extend(g.random_adjacency(u).iter().copied().filter(|&w| pool.contains(w as usize)));
            }
            RandomEdges::Sampled { p, rng } => {
                let m = pool.len();
                if m == 0 || *p <= 0.0 {
                    return;
                }
                let k = if *p >= 1.0 {
                    m
                } else {
                    Binomial::new(m as u64, *p).expect("valid binomial").sample(rng) as usize
                };
                pool.sample_distinct(k, rng, out);
                out.sort_unstable();
            }
        }
    }
}
