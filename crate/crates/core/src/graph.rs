//! Simple undirected graphs on dense vertex labels `0..n`.

use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Largest graph the spectral code accepts (one adjacency row per `u64`).
pub const MAX_VERTICES: usize = 62;

/// Largest player set a coalition bitmask may describe.
pub const MAX_PLAYERS: usize = 24;

/// A simple undirected graph stored as one neighbourhood bitmask per vertex.
///
/// Immutable once built. Vertices are `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
}

impl Graph {
    /// The edgeless graph on `n` vertices. `n = 0` is allowed here; it is the
    /// graph induced by the empty coalition.
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::TooLarge { what: "graph", n, max: MAX_VERTICES });
        }
        Ok(Graph { n, adj: alloc::vec![0; n] })
    }

    /// Builds a graph from an edge list. Repeated edges (in either
    /// orientation) collapse to one.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n)?;
        for (i, j) in edges {
            g.insert_edge(i, j)?;
        }
        Ok(g)
    }

    fn insert_edge(&mut self, i: usize, j: usize) -> Result<()> {
        for v in [i, j] {
            if v >= self.n {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        if i == j {
            return Err(Error::SelfLoop(i));
        }
        self.adj[i] |= 1 << j;
        self.adj[j] |= 1 << i;
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.adj[i] >> j & 1 == 1
    }

    /// Open neighbourhood of `v` as a bitmask.
    #[inline]
    pub fn neighbors(&self, v: usize) -> u64 {
        self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn is_isolated(&self, v: usize) -> bool {
        self.adj[v] == 0
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            let above = self.adj[i] & !((2u64 << i) - 1);
            BitIter(above).map(move |j| (i, j))
        })
    }

    /// Number of edges with both endpoints in `mask`.
    pub fn edges_within(&self, mask: u64) -> usize {
        BitIter(mask)
            .map(|v| (self.adj[v] & mask).count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Dense row-major adjacency matrix.
    pub fn adjacency_matrix(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in BitIter(self.adj[i]) {
                a[i * n + j] = 1.0;
            }
        }
        a
    }

    /// Bitmask of all vertices.
    pub fn full_mask(&self) -> u64 {
        low_bits(self.n)
    }

    /// Subgraph induced by the vertices in `mask`, relabelled `0..k` in
    /// ascending order of original label. Bits at or above `n` are ignored.
    pub fn induced_by_mask(&self, mask: u64) -> Graph {
        let mask = mask & self.full_mask();
        let verts: Vec<usize> = BitIter(mask).collect();
        let adj = verts
            .iter()
            .map(|&v| compress(self.adj[v] & mask, mask))
            .collect();
        Graph { n: verts.len(), adj }
    }

    /// Induced subgraph together with the map back to original labels.
    pub fn induced(&self, s: VertexSet) -> Result<InducedSubgraph> {
        s.check_for(self)?;
        let mask = s.bits() as u64;
        Ok(InducedSubgraph {
            graph: self.induced_by_mask(mask),
            labels: BitIter(mask).collect(),
        })
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Result<Graph> {
        let n = self.n + other.n;
        let mut g = Graph::empty(n)?;
        for (i, j) in self.edges() {
            g.insert_edge(i, j)?;
        }
        for (i, j) in other.edges() {
            g.insert_edge(i + self.n, j + self.n)?;
        }
        Ok(g)
    }

    /// Relabels vertex `v` as `perm[v]`. `perm` must be a permutation of `0..n`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: perm.len() });
        }
        let mut seen = 0u64;
        for &p in perm {
            if p >= self.n || seen >> p & 1 == 1 {
                return Err(Error::VertexOutOfRange { vertex: p, n: self.n });
            }
            seen |= 1 << p;
        }
        Graph::from_edges(self.n, self.edges().map(|(i, j)| (perm[i], perm[j])))
    }

    /// Connected components as vertex bitmasks, ordered by smallest member.
    pub fn components(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut seen = 0u64;
        for start in 0..self.n {
            if seen >> start & 1 == 1 {
                continue;
            }
            let mut comp = 1u64 << start;
            let mut frontier = comp;
            while frontier != 0 {
                let mut next = 0;
                for v in BitIter(frontier) {
                    next |= self.adj[v];
                }
                frontier = next & !comp;
                comp |= next;
            }
            seen |= comp;
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges=[", self.n)?;
        for (k, (i, j)) in self.edges().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{i}-{j}")?;
        }
        f.write_str("])")
    }
}

/// An induced subgraph plus the original label of each of its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `labels[k]` is the original label of vertex `k`; strictly ascending.
    pub labels: Vec<usize>,
}

/// A coalition of vertices, stored as a bitmask over at most
/// [`MAX_PLAYERS`] vertices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct VertexSet(u32);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    /// Validates `mask` against a ground set of `n` vertices.
    pub fn new(mask: u32, n: usize) -> Result<Self> {
        if n > MAX_PLAYERS {
            return Err(Error::TooLarge { what: "vertex set", n, max: MAX_PLAYERS });
        }
        if mask as u64 & !low_bits(n) != 0 {
            return Err(Error::InvalidVertexSet { mask: mask as u64, n });
        }
        Ok(VertexSet(mask))
    }

    pub fn full(n: usize) -> Result<Self> {
        VertexSet::new(low_bits(n.min(MAX_PLAYERS)) as u32, n)
    }

    pub fn from_vertices<I: IntoIterator<Item = usize>>(vs: I, n: usize) -> Result<Self> {
        let mut mask = 0u32;
        for v in vs {
            if v >= n || v >= MAX_PLAYERS {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            mask |= 1 << v;
        }
        VertexSet::new(mask, n)
    }

    /// Wraps a mask that the caller already knows is in range.
    #[inline]
    pub(crate) const fn from_bits_unchecked(mask: u32) -> Self {
        VertexSet(mask)
    }

    #[inline]
    pub const fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn contains(self, v: usize) -> bool {
        v < 32 && self.0 >> v & 1 == 1
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        BitIter(self.0 as u64)
    }

    fn check_for(self, g: &Graph) -> Result<()> {
        if g.n > MAX_PLAYERS {
            return Err(Error::TooLarge { what: "vertex set", n: g.n, max: MAX_PLAYERS });
        }
        if self.0 as u64 & !g.full_mask() != 0 {
            return Err(Error::InvalidVertexSet { mask: self.0 as u64, n: g.n });
        }
        Ok(())
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, v) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Iterator over set bit positions, lowest first.
#[derive(Debug, Clone, Copy)]
pub struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

#[inline]
pub(crate) fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Packs the bits of `x` selected by `mask` into the low bits.
#[inline]
fn compress(x: u64, mask: u64) -> u64 {
    let mut out = 0;
    for (k, v) in BitIter(mask).enumerate() {
        out |= (x >> v & 1) << k;
    }
    out
}

// Generators. Vertex 0 is the star centre; path edges are {i, i+1}.

fn nonzero(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Empty)
    } else {
        Ok(())
    }
}

pub fn path(n: usize) -> Result<Graph> {
    nonzero(n)?;
    Graph::from_edges(n, (1..n).map(|i| (i - 1, i)))
}

pub fn star(n: usize) -> Result<Graph> {
    nonzero(n)?;
    Graph::from_edges(n, (1..n).map(|i| (0, i)))
}

/// The cycle `C_n`; `n < 3` is rejected since it would need a multi-edge or loop.
pub fn cycle(n: usize) -> Result<Graph> {
    nonzero(n)?;
    if n < 3 {
        return Err(Error::TooSmall { what: "cycle", n, min: 3 });
    }
    Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

pub fn complete(n: usize) -> Result<Graph> {
    nonzero(n)?;
    Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))))
}

/// `K_{a,b}` with parts `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph> {
    nonzero(a)?;
    nonzero(b)?;
    Graph::from_edges(a + b, (0..a).flat_map(|i| (a..a + b).map(move |j| (i, j))))
}
