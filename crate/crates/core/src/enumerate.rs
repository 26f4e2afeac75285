//! Exhaustive enumeration of small labeled graphs and labeled trees.
//!
//! Both enumerations are indexable, so a sweep can split `0..count` into
//! ranges and rebuild any graph from its index.

use alloc::vec::Vec;
use core::ops::Range;

use crate::graph::{BitIter, Graph};
use crate::{Error, Result};

pub const MAX_LABELED_GRAPH_N: usize = 7;
pub const MAX_LABELED_TREE_N: usize = 8;

/// Vertex pairs in graph6 bit order: (0,1), (0,2), (1,2), (0,3), ...
pub fn pair_order(n: usize) -> Vec<(usize, usize)> {
    (1..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect()
}

/// Number of labeled graphs on `n` vertices, `2^(n(n-1)/2)`.
pub fn labeled_graph_count(n: usize) -> Result<u64> {
    if n > MAX_LABELED_GRAPH_N {
        return Err(Error::TooLarge { what: "labeled graph enumeration", n, max: MAX_LABELED_GRAPH_N });
    }
    Ok(1u64 << (n * n.saturating_sub(1) / 2))
}

/// The labeled graph whose edge bitmask (bit k = k-th pair of
/// [`pair_order`]) equals `index`.
pub fn labeled_graph(n: usize, index: u64) -> Result<Graph> {
    let count = labeled_graph_count(n)?;
    debug_assert!(index < count);
    let pairs = pair_order(n);
    Graph::from_edges(n, BitIter(index).map(|k| pairs[k]))
}

/// Every labeled graph on `n` vertices, edge bitmask ascending.
pub fn labeled_graphs(n: usize) -> Result<LabeledGraphs> {
    let count = labeled_graph_count(n)?;
    Ok(LabeledGraphs { n, pairs: pair_order(n), indices: 0..count })
}

/// Labeled graphs whose index lies in `range` (clamped to the valid range).
pub fn labeled_graphs_in(n: usize, range: Range<u64>) -> Result<LabeledGraphs> {
    let count = labeled_graph_count(n)?;
    let indices = range.start.min(count)..range.end.min(count);
    Ok(LabeledGraphs { n, pairs: pair_order(n), indices })
}

#[derive(Debug, Clone)]
pub struct LabeledGraphs {
    n: usize,
    pairs: Vec<(usize, usize)>,
    indices: Range<u64>,
}

impl Iterator for LabeledGraphs {
    type Item = (u64, Graph);

    fn next(&mut self) -> Option<Self::Item> {
        let index = self.indices.next()?;
        let g = Graph::from_edges(self.n, BitIter(index).map(|k| self.pairs[k]))
            .expect("pairs are in range");
        Some((index, g))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.indices.size_hint()
    }
}

impl ExactSizeIterator for LabeledGraphs {}

/// Number of labeled trees on `n` vertices (Cayley: `n^(n-2)`, and 1 for n = 1).
pub fn labeled_tree_count(n: usize) -> Result<u64> {
    check_tree_n(n)?;
    Ok(if n <= 2 { 1 } else { (n as u64).pow(n as u32 - 2) })
}

fn check_tree_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Empty);
    }
    if n > MAX_LABELED_TREE_N {
        return Err(Error::TooLarge { what: "labeled tree enumeration", n, max: MAX_LABELED_TREE_N });
    }
    Ok(())
}

/// The tree whose Prüfer sequence is the base-`n` expansion of `index`
/// (most significant digit first).
pub fn labeled_tree(n: usize, index: u64) -> Result<Graph> {
    let count = labeled_tree_count(n)?;
    debug_assert!(index < count);
    match n {
        1 => Graph::empty(1),
        2 => Graph::from_edges(2, [(0, 1)]),
        _ => {
            let mut seq = alloc::vec![0usize; n - 2];
            let mut rest = index;
            for slot in seq.iter_mut().rev() {
                *slot = (rest % n as u64) as usize;
                rest /= n as u64;
            }
            prufer_decode(n, &seq)
        }
    }
}

/// Decodes a Prüfer sequence of length `n - 2` over labels `0..n`.
pub fn prufer_decode(n: usize, seq: &[usize]) -> Result<Graph> {
    if seq.len() + 2 != n {
        return Err(Error::LengthMismatch { expected: n.saturating_sub(2), got: seq.len() });
    }
    let mut degree = alloc::vec![1usize; n];
    for &s in seq {
        if s >= n {
            return Err(Error::VertexOutOfRange { vertex: s, n });
        }
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf always exists");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let mut last = (0..n).filter(|&v| degree[v] == 1);
    let (u, v) = (last.next().expect("two leaves remain"), last.next().expect("two leaves remain"));
    edges.push((u, v));
    Graph::from_edges(n, edges)
}

/// Every labeled tree on `n` vertices, in Prüfer-sequence lexicographic order.
pub fn labeled_trees(n: usize) -> Result<LabeledTrees> {
    let count = labeled_tree_count(n)?;
    Ok(LabeledTrees { n, indices: 0..count })
}

#[derive(Debug, Clone)]
pub struct LabeledTrees {
    n: usize,
    indices: Range<u64>,
}

impl Iterator for LabeledTrees {
    type Item = (u64, Graph);

    fn next(&mut self) -> Option<Self::Item> {
        let index = self.indices.next()?;
        Some((index, labeled_tree(self.n, index).expect("index in range")))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.indices.size_hint()
    }
}

impl ExactSizeIterator for LabeledTrees {}
