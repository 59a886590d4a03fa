//! Red/blue edge-colored regular graphs and the random ensembles built on them.
//!
//! A [`ColoredGraph`] stores every vertex's incident edge endpoints in a flat
//! array with a fixed stride of `r + b`: the first `r` slots of a vertex are
//! its red endpoints and the remaining `b` slots are blue. Walks exploit this
//! layout to pick a colored edge with a single uniform draw.

mod generate;
mod io;
mod structure;

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::{
    gen_hamilton_union, gen_regular, gen_twofactor_union, gen_union, RegularGraph,
    MAX_PAIRING_ATTEMPTS,
};
pub use io::{parse_graph, read_graph, write_graph};
pub use structure::{
    analyze_structure, blue_cycle_lengths, lambda2, locally_tree_like, sigma_for, StructureReport,
};

/// Edge color. Red edges are charged, blue edges are free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn letter(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Blue => 'B',
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// An undirected colored edge. Generated graphs always have `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub color: Color,
}

impl Edge {
    pub fn new(u: u32, v: u32, color: Color) -> Self {
        Edge { u, v, color }
    }
}

/// Immutable red/blue regular graph: every vertex has exactly `r` red and
/// `b` blue incident edges.
///
/// A red and a blue edge may join the same pair of vertices; they are kept as
/// two distinct edges (and two distinct walk transitions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    n: usize,
    r: usize,
    b: usize,
    edges: Vec<Edge>,
    nbr: Vec<u32>,
    eid: Vec<u32>,
}

impl ColoredGraph {
    /// Builds a graph from an edge list, checking every structural invariant.
    /// Edge ids are positions in `edges`.
    pub fn from_edges(n: usize, r: usize, b: usize, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("graph must have at least one vertex"));
        }
        if n > u32::MAX as usize {
            return Err(Error::param("vertex count exceeds u32 range"));
        }
        let d = r + b;
        if edges.len() != n * d / 2 || (n * d) % 2 != 0 {
            return Err(Error::param(format!(
                "expected {} edges for n={n}, r={r}, b={b}, found {}",
                n * d / 2,
                edges.len()
            )));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut red_fill = vec![0usize; n];
        let mut blue_fill = vec![0usize; n];
        let mut nbr = vec![u32::MAX; n * d];
        let mut eid = vec![u32::MAX; n * d];
        for (id, e) in edges.iter().enumerate() {
            let (u, v) = (e.u as usize, e.v as usize);
            if u >= n || v >= n {
                return Err(Error::param(format!("edge {u}-{v} has an endpoint outside [0, {n})")));
            }
            if u == v {
                return Err(Error::param(format!("self-loop at vertex {u}")));
            }
            let key = (e.u.min(e.v), e.u.max(e.v), e.color);
            if !seen.insert(key) {
                return Err(Error::param(format!(
                    "parallel {} edges between {} and {}",
                    e.color, key.0, key.1
                )));
            }
            for (x, y) in [(u, v), (v, u)] {
                let slot = match e.color {
                    Color::Red => {
                        let k = red_fill[x];
                        if k == r {
                            return Err(Error::param(format!("vertex {x} has more than {r} red edges")));
                        }
                        red_fill[x] += 1;
                        k
                    }
                    Color::Blue => {
                        let k = blue_fill[x];
                        if k == b {
                            return Err(Error::param(format!("vertex {x} has more than {b} blue edges")));
                        }
                        blue_fill[x] += 1;
                        r + k
                    }
                };
                nbr[x * d + slot] = y as u32;
                eid[x * d + slot] = id as u32;
            }
        }
        // Edge count matches n·d/2 and no vertex overflows, so every slot is filled.
        debug_assert!(nbr.iter().all(|&x| x != u32::MAX));
        Ok(ColoredGraph { n, r, b, edges, nbr, eid })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn red_degree(&self) -> usize {
        self.r
    }

    pub fn blue_degree(&self) -> usize {
        self.b
    }

    pub fn degree(&self) -> usize {
        self.r + self.b
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// All neighbor endpoints of `v`: `r` red slots followed by `b` blue slots.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        let d = self.r + self.b;
        &self.nbr[v * d..(v + 1) * d]
    }

    #[inline]
    pub fn red_neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors(v)[..self.r]
    }

    #[inline]
    pub fn blue_neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors(v)[self.r..]
    }

    /// Edge ids aligned with [`neighbors`](Self::neighbors).
    pub fn incident_edge_ids(&self, v: usize) -> &[u32] {
        let d = self.r + self.b;
        &self.eid[v * d..(v + 1) * d]
    }

    #[inline]
    pub(crate) fn slot(&self, v: usize, k: usize) -> u32 {
        self.nbr[v * (self.r + self.b) + k]
    }

    pub fn is_connected(&self) -> bool {
        self.component_labels(|_| true).1 == 1
    }

    /// Connected-component label of every vertex in the blue subgraph,
    /// together with the component count.
    pub fn blue_components(&self) -> (Vec<u32>, usize) {
        let r = self.r;
        self.component_labels(move |k| k >= r)
    }

    fn component_labels(&self, use_slot: impl Fn(usize) -> bool) -> (Vec<u32>, usize) {
        let mut label = vec![u32::MAX; self.n];
        let mut count = 0u32;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if label[s] != u32::MAX {
                continue;
            }
            label[s] = count;
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                for (k, &y) in self.neighbors(x).iter().enumerate() {
                    if use_slot(k) && label[y as usize] == u32::MAX {
                        label[y as usize] = count;
                        queue.push_back(y as usize);
                    }
                }
            }
            count += 1;
        }
        (label, count as usize)
    }
}
