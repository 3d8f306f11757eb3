//! Hybrid graphs: a ring (or 2-D torus) lattice superposed with an
//! Erdős–Rényi random graph on the same vertex set.
//!
//! Lattice adjacency is implicit. Random edges are stored once, in a CSR
//! adjacency, and a pair that is both lattice-adjacent and carries a random
//! edge is a single [`EdgeKind::Merged`] edge.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Purpose, StreamRng};

/// A vertex label in `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(u32);

impl VertexId {
    pub fn new(index: usize, n: usize) -> Result<Self> {
        if index == 0 || index > n {
            return Err(Error::InvalidVertex { index, n });
        }
        Ok(VertexId(index as u32))
    }

    /// The 1-based label.
    pub fn get(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_zero(i: usize) -> Self {
        VertexId(i as u32 + 1)
    }

    pub(crate) fn zero(self) -> usize {
        self.0 as usize - 1
    }

    pub(crate) fn check(self, n: usize) -> Result<usize> {
        if self.0 == 0 || self.get() > n {
            return Err(Error::InvalidVertex { index: self.get(), n });
        }
        Ok(self.zero())
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Builds a vertex list from 1-based labels, validating each.
pub fn vertices(labels: &[usize], n: usize) -> Result<Vec<VertexId>> {
    labels.iter().map(|&i| VertexId::new(i, n)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Local,
    Random,
    Merged,
}

/// The deterministic part of a hybrid graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lattice {
    Ring { n: usize },
    Torus { side: usize },
}

/// Up to four lattice neighbours, 0-based.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LatticeNeighbours {
    items: [usize; 4],
    len: usize,
}

impl LatticeNeighbours {
    pub(crate) fn as_slice(&self) -> &[usize] {
        &self.items[..self.len]
    }
}

impl Lattice {
    pub fn for_dim(n: usize, dim: u8) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSize(format!("need n >= 3, got {n}")));
        }
        match dim {
            1 => Ok(Lattice::Ring { n }),
            2 => {
                let side = (n as f64).sqrt().round() as usize;
                if side * side != n {
                    return Err(Error::InvalidShape(format!("{n} is not a perfect square")));
                }
                if side < 3 {
                    return Err(Error::InvalidShape(format!(
                        "torus side {side} is too small for 4 distinct neighbours"
                    )));
                }
                Ok(Lattice::Torus { side })
            }
            d => Err(Error::InvalidShape(format!("unsupported lattice dimension {d}"))),
        }
    }

    pub fn n(&self) -> usize {
        match *self {
            Lattice::Ring { n } => n,
            Lattice::Torus { side } => side * side,
        }
    }

    pub fn dim(&self) -> u8 {
        match self {
            Lattice::Ring { .. } => 1,
            Lattice::Torus { .. } => 2,
        }
    }

    pub(crate) fn neighbours(&self, v: usize) -> LatticeNeighbours {
        match *self {
            Lattice::Ring { n } => LatticeNeighbours {
                items: [(v + n - 1) % n, (v + 1) % n, 0, 0],
                len: 2,
            },
            Lattice::Torus { side } => {
                let (row, col) = (v / side, v % side);
                let at = |r: usize, c: usize| r * side + c;
                LatticeNeighbours {
                    items: [
                        at((row + side - 1) % side, col),
                        at(row, (col + side - 1) % side),
                        at(row, (col + 1) % side),
                        at((row + 1) % side, col),
                    ],
                    len: 4,
                }
            }
        }
    }

    pub(crate) fn adjacent(&self, u: usize, v: usize) -> bool {
        match *self {
            Lattice::Ring { n } => {
                let d = u.abs_diff(v);
                d == 1 || d == n - 1
            }
            Lattice::Torus { .. } => self.neighbours(u).as_slice().contains(&v),
        }
    }
}

/// An immutable hybrid graph with materialized random edges.
#[derive(Debug, Clone)]
pub struct HybridGraph {
    lattice: Lattice,
    p: f64,
    seed: u64,
    offsets: Vec<usize>,
    adjacency: Vec<u32>,
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// Samples `G(n, p)` pairs `(w, v)` with `w < v` (0-based) by geometric
/// skipping over the lexicographic pair order, in expected `O(n + n^2 p)`.
pub(crate) fn sample_pairs<R: Rng>(n: usize, p: f64, rng: &mut R, mut emit: impl FnMut(usize, usize)) {
    if p <= 0.0 || n < 2 {
        return;
    }
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                emit(w, v);
            }
        }
        return;
    }
    let log_q = (-p).ln_1p();
    let (mut v, mut w): (usize, i64) = (1, -1);
    while v < n {
        let u: f64 = rng.random();
        let skip = ((-u).ln_1p() / log_q).floor();
        if skip >= (n * n) as f64 {
            break;
        }
        w += 1 + skip as i64;
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            emit(w as usize, v);
        }
    }
}

impl HybridGraph {
    /// Draws a hybrid graph; identical arguments give identical graphs.
    pub fn generate(n: usize, p: f64, dim: u8, seed: u64) -> Result<Self> {
        let lattice = Lattice::for_dim(n, dim)?;
        check_probability(p)?;
        let mut rng = rng::stream(seed, 0, Purpose::Graph);
        Ok(Self::generate_with(lattice, p, seed, &mut rng))
    }

    pub(crate) fn generate_with(lattice: Lattice, p: f64, seed: u64, rng: &mut StreamRng) -> Self {
        let n = lattice.n();
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        sample_pairs(n, p, rng, |w, v| pairs.push((w as u32, v as u32)));
        Self::from_pairs(lattice, p, seed, &pairs)
    }

    /// Builds a graph from an explicit list of 1-based random edges.
    pub fn from_edges(n: usize, dim: u8, edges: &[(usize, usize)]) -> Result<Self> {
        let lattice = Lattice::for_dim(n, dim)?;
        let mut pairs = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            let a = VertexId::new(a, n)?.zero();
            let b = VertexId::new(b, n)?.zero();
            if a == b {
                return Err(Error::InvalidCall(format!("self-loop at vertex {}", a + 1)));
            }
            pairs.push((a.min(b) as u32, a.max(b) as u32));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self::from_pairs(lattice, f64::NAN, 0, &pairs))
    }

    fn from_pairs(lattice: Lattice, p: f64, seed: u64, pairs: &[(u32, u32)]) -> Self {
        let n = lattice.n();
        let mut degree = vec![0usize; n + 1];
        for &(a, b) in pairs {
            degree[a as usize + 1] += 1;
            degree[b as usize + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut adjacency = vec![0u32; offsets[n]];
        for &(a, b) in pairs {
            adjacency[fill[a as usize]] = b;
            fill[a as usize] += 1;
            adjacency[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        for v in 0..n {
            adjacency[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        HybridGraph {
            lattice,
            p,
            seed,
            offsets,
            adjacency,
        }
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn dim(&self) -> u8 {
        self.lattice.dim()
    }

    /// Torus side length; equals `n` for the ring.
    pub fn side(&self) -> usize {
        match self.lattice {
            Lattice::Ring { n } => n,
            Lattice::Torus { side } => side,
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn random_edge_count(&self) -> usize {
        self.adjacency.len() / 2
    }

    pub(crate) fn random_adjacency(&self, v: usize) -> &[u32] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn random_degree(&self, v: VertexId) -> Result<usize> {
        let v = v.check(self.n())?;
        Ok(self.offsets[v + 1] - self.offsets[v])
    }

    pub fn has_random_edge(&self, u: VertexId, v: VertexId) -> Result<bool> {
        let (u, v) = (u.check(self.n())?, v.check(self.n())?);
        Ok(self.random_adjacency(u).binary_search(&(v as u32)).is_ok())
    }

    /// Random edges as sorted 1-based pairs `(i, j)` with `i < j`.
    pub fn random_edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.random_edge_count());
        for v in 0..self.n() {
            for &w in self.random_adjacency(v) {
                if (w as usize) > v {
                    out.push((VertexId::from_zero(v), VertexId::from_zero(w as usize)));
                }
            }
        }
        out
    }

    /// All neighbours of `v` sorted by id; a lattice pair with a random edge
    /// is reported once as `Merged`.
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<(VertexId, EdgeKind)>> {
        let v0 = v.check(self.n())?;
        let random = self.random_adjacency(v0);
        let mut out: Vec<(VertexId, EdgeKind)> = self
            .lattice
            .neighbours(v0)
            .as_slice()
            .iter()
            .map(|&w| {
                let kind = if random.binary_search(&(w as u32)).is_ok() {
                    EdgeKind::Merged
                } else {
                    EdgeKind::Local
                };
                (VertexId::from_zero(w), kind)
            })
            .collect();
        out.extend(
            random
                .iter()
                .map(|&w| w as usize)
                .filter(|&w| !self.lattice.adjacent(v0, w))
                .map(|w| (VertexId::from_zero(w), EdgeKind::Random)),
        );
        out.sort_unstable_by_key(|&(w, _)| w);
        Ok(out)
    }

    pub fn dump(&self) -> GraphDump {
        GraphDump {
            n: self.n(),
            dim: self.dim(),
            p: self.p,
            seed: self.seed,
            random_edges: self
                .random_edges()
                .into_iter()
                .map(|(a, b)| [a.get(), b.get()])
                .collect(),
        }
    }
}

/// Debug dump of a [`HybridGraph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDump {
    pub n: usize,
    pub dim: u8,
    pub p: f64,
    pub seed: u64,
    pub random_edges: Vec<[usize; 2]>,
}

/// Ring distance `min(|j - i|, n - |j - i|)`.
pub fn ring_distance(i: VertexId, j: VertexId, n: usize) -> Result<usize> {
    let d = i.check(n)?.abs_diff(j.check(n)?);
    Ok(d.min(n - d))
}

pub fn distance_to_set(v: VertexId, set: &[VertexId], n: usize) -> Result<usize> {
    let mut best: Option<usize> = None;
    for &u in set {
        let d = ring_distance(v, u, n)?;
        best = Some(best.map_or(d, |b| b.min(d)));
    }
    best.ok_or(Error::EmptySet)
}

/// Vertices outside `set` at ring distance exactly 1 from it, sorted.
pub fn outer_boundary(set: &[VertexId], n: usize) -> Result<Vec<VertexId>> {
    let mut member = vec![false; n];
    for &v in set {
        member[v.check(n)?] = true;
    }
    let ring = Lattice::Ring { n };
    Ok((0..n)
        .filter(|&v| !member[v] && ring.neighbours(v).as_slice().iter().any(|&w| member[w]))
        .map(VertexId::from_zero)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vid(i: usize, n: usize) -> VertexId {
        VertexId::new(i, n).unwrap()
    }

    #[test]
    fn empty_random_part_at_p_zero() {
        let g = HybridGraph::generate(6, 0.0, 1, 9).unwrap();
        assert_eq!(g.random_edge_count(), 0);
        for v in 1..=6 {
            let nb = g.neighbors(vid(v, 6)).unwrap();
            assert_eq!(nb.len(), 2);
            assert!(nb.iter().all(|&(_, k)| k == EdgeKind::Local));
        }
        assert_eq!(
            g.neighbors(vid(1, 6)).unwrap(),
            vec![(vid(2, 6), EdgeKind::Local), (vid(6, 6), EdgeKind::Local)]
        );
    }

    #[test]
    fn complete_random_part_merges_ring_pairs() {
        let g = HybridGraph::generate(5, 1.0, 1, 3).unwrap();
        assert_eq!(g.random_edge_count(), 10);
        let nb = g.neighbors(vid(1, 5)).unwrap();
        assert_eq!(
            nb,
            vec![
                (vid(2, 5), EdgeKind::Merged),
                (vid(3, 5), EdgeKind::Random),
                (vid(4, 5), EdgeKind::Random),
                (vid(5, 5), EdgeKind::Merged),
            ]
        );
    }

    #[test]
    fn edge_count_within_four_sigma() {
        let (n, p) = (10_000usize, 1e-3);
        let g = HybridGraph::generate(n, p, 1, 42).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        let (mean, sigma) = (pairs * p, (pairs * p * (1.0 - p)).sqrt());
        assert!((mean - 49_995.0).abs() < 1e-6);
        let got = g.random_edge_count() as f64;
        assert!((got - mean).abs() <= 4.0 * sigma, "{got} vs {mean} +- {sigma}");
    }

    #[test]
    fn generation_is_deterministic() {
        let a = HybridGraph::generate(300, 0.05, 1, 11).unwrap();
        let b = HybridGraph::generate(300, 0.05, 1, 11).unwrap();
        let c = HybridGraph::generate(300, 0.05, 1, 12).unwrap();
        assert_eq!(a.random_edges(), b.random_edges());
        assert_ne!(a.random_edges(), c.random_edges());
    }

    #[test]
    fn no_self_loops_or_duplicates() {
        let g = HybridGraph::generate(200, 0.3, 1, 5).unwrap();
        let edges = g.random_edges();
        assert!(edges.iter().all(|(a, b)| a < b));
        assert!(edges.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn size_and_shape_errors() {
        assert!(matches!(HybridGraph::generate(2, 0.1, 1, 0), Err(Error::InvalidSize(_))));
        assert!(matches!(HybridGraph::generate(10, 0.1, 2, 0), Err(Error::InvalidShape(_))));
        assert!(matches!(HybridGraph::generate(10, 1.5, 1, 0), Err(Error::InvalidProbability(_))));
    }

    #[test]
    fn torus_has_four_local_neighbours() {
        let g = HybridGraph::generate(9, 0.0, 2, 0).unwrap();
        assert_eq!(g.side(), 3);
        let centre = g.neighbors(vid(5, 9)).unwrap();
        assert_eq!(centre.len(), 4);
        assert!(centre.iter().all(|&(_, k)| k == EdgeKind::Local));
        let ids: Vec<usize> = centre.iter().map(|(w, _)| w.get()).collect();
        assert_eq!(ids, vec![2, 4, 6, 8]);
        for v in 1..=9 {
            assert_eq!(g.neighbors(vid(v, 9)).unwrap().len(), 4);
        }
    }

    #[test]
    fn ring_distance_examples() {
        assert_eq!(ring_distance(vid(1, 6), vid(5, 6), 6).unwrap(), 2);
        assert_eq!(ring_distance(vid(3, 9), vid(3, 9), 9).unwrap(), 0);
        assert_eq!(ring_distance(vid(1, 10), vid(6, 10), 10).unwrap(), 5);
        assert!(matches!(
            ring_distance(VertexId(7), vid(1, 6), 6),
            Err(Error::InvalidVertex { index: 7, n: 6 })
        ));
    }

    #[test]
    fn distance_to_set_examples() {
        let n = 8;
        assert_eq!(distance_to_set(vid(1, n), &vertices(&[1, 4], n).unwrap(), n).unwrap(), 0);
        assert_eq!(distance_to_set(vid(2, n), &vertices(&[5, 8], n).unwrap(), n).unwrap(), 2);
        assert_eq!(distance_to_set(vid(7, 12), &vertices(&[1], 12).unwrap(), 12).unwrap(), 6);
        assert_eq!(distance_to_set(vid(1, n), &[], n), Err(Error::EmptySet));
    }

    #[test]
    fn outer_boundary_examples() {
        let ids = |s: Vec<VertexId>| s.into_iter().map(VertexId::get).collect::<Vec<_>>();
        assert_eq!(ids(outer_boundary(&vertices(&[3], 5).unwrap(), 5).unwrap()), vec![2, 4]);
        assert_eq!(ids(outer_boundary(&vertices(&[1, 3], 5).unwrap(), 5).unwrap()), vec![2, 4, 5]);
        let all = vertices(&(1..=7).collect::<Vec<_>>(), 7).unwrap();
        assert!(outer_boundary(&all, 7).unwrap().is_empty());
        assert!(outer_boundary(&[], 7).unwrap().is_empty());
    }

    #[test]
    fn boundary_matches_brute_force_for_all_subsets() {
        let n = 10;
        for mask in 0u32..(1 << n) {
            let set: Vec<VertexId> = (0..n).filter(|i| mask >> i & 1 == 1).map(VertexId::from_zero).collect();
            let fast = outer_boundary(&set, n).unwrap();
            let brute: Vec<VertexId> = if set.is_empty() {
                Vec::new()
            } else {
                (1..=n)
                    .map(|i| vid(i, n))
                    .filter(|v| distance_to_set(*v, &set, n).unwrap() == 1)
                    .collect()
            };
            assert_eq!(fast, brute, "mask {mask:b}");
        }
    }

    #[test]
    fn ring_distance_is_a_metric() {
        for n in 3..=20 {
            for i in 1..=n {
                for j in 1..=n {
                    let dij = ring_distance(vid(i, n), vid(j, n), n).unwrap();
                    assert_eq!(dij, ring_distance(vid(j, n), vid(i, n), n).unwrap());
                    assert_eq!(dij == 0, i == j);
                    for k in 1..=n {
                        let dik = ring_distance(vid(i, n), vid(k, n), n).unwrap();
                        let dkj = ring_distance(vid(k, n), vid(j, n), n).unwrap();
                        assert!(dij <= dik + dkj);
                    }
                }
            }
        }
    }

    #[test]
    fn dump_is_sorted_lexicographically() {
        let g = HybridGraph::generate(40, 0.2, 1, 8).unwrap();
        let dump = g.dump();
        assert!(dump.random_edges.windows(2).all(|w| w[0] < w[1]));
        let json = serde_json::to_value(&dump).unwrap();
        for key in ["n", "dim", "p", "seed", "random_edges"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn explicit_edges_build_the_same_neighbourhoods() {
        let g = HybridGraph::from_edges(6, 1, &[(1, 4), (4, 2), (2, 1)]).unwrap();
        assert_eq!(g.random_edge_count(), 3);
        let nb = g.neighbors(vid(1, 6)).unwrap();
        assert_eq!(
            nb,
            vec![
                (vid(2, 6), EdgeKind::Merged),
                (vid(4, 6), EdgeKind::Random),
                (vid(6, 6), EdgeKind::Local),
            ]
        );
    }
}
