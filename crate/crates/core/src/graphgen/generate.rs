use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Color, ColoredGraph, Edge};
use crate::error::{Error, Result};

/// Full-restart attempts allowed before configuration-model sampling gives up.
pub const MAX_PAIRING_ATTEMPTS: u64 = 1_000_000;

/// A simple `d`-regular graph on `[n]` with edges stored as `(u, v)`, `u < v`,
/// sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    pub n: usize,
    pub d: usize,
    pub edges: Vec<(u32, u32)>,
}

impl RegularGraph {
    /// Colors every edge with `color`, giving a monochrome [`ColoredGraph`].
    pub fn into_colored(self, color: Color) -> ColoredGraph {
        let (r, b) = match color {
            Color::Red => (self.d, 0),
            Color::Blue => (0, self.d),
        };
        let edges = self.edges.into_iter().map(|(u, v)| Edge::new(u, v, color)).collect();
        ColoredGraph::from_edges(self.n, r, b, edges).expect("regular graph is well formed")
    }
}

fn check_regular_params(n: usize, d: usize, what: &str) -> Result<()> {
    if d == 0 {
        return Err(Error::param(format!("{what} degree must be at least 1")));
    }
    if (n * d) % 2 != 0 {
        return Err(Error::param(format!("n·{what} must be even (n={n}, {what}={d})")));
    }
    if n <= d {
        return Err(Error::param(format!("n must exceed {what} (n={n}, {what}={d})")));
    }
    Ok(())
}

/// One configuration-model pairing; `None` if it produced a loop or a
/// multi-edge.
fn try_pairing(n: usize, d: usize, stubs: &mut [u32], rng: &mut ChaCha8Rng) -> Option<Vec<(u32, u32)>> {
    for (i, s) in stubs.iter_mut().enumerate() {
        *s = (i / d) as u32;
    }
    stubs.shuffle(rng);
    let mut seen = HashSet::with_capacity(stubs.len() / 2);
    let mut edges = Vec::with_capacity(stubs.len() / 2);
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        if u == v || !seen.insert((u as u64) * n as u64 + v as u64) {
            return None;
        }
        edges.push((u, v));
    }
    Some(edges)
}

fn sample_regular(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(u32, u32)>> {
    let mut stubs = vec![0u32; n * d];
    for _ in 0..MAX_PAIRING_ATTEMPTS {
        if let Some(mut edges) = try_pairing(n, d, &mut stubs, rng) {
            edges.sort_unstable();
            return Ok(edges);
        }
    }
    Err(Error::Generation(format!(
        "no simple {d}-regular pairing on {n} vertices after {MAX_PAIRING_ATTEMPTS} attempts"
    )))
}

/// Uniformly random simple `d`-regular graph on `[n]` (configuration model,
/// restarting the whole pairing on any loop or multi-edge).
pub fn gen_regular(n: usize, d: usize, seed: u64) -> Result<RegularGraph> {
    check_regular_params(n, d, "d")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = sample_regular(n, d, &mut rng)?;
    Ok(RegularGraph { n, d, edges })
}

fn merge(n: usize, r: usize, b: usize, red: Vec<(u32, u32)>, blue: Vec<(u32, u32)>) -> Result<ColoredGraph> {
    let mut edges: Vec<Edge> = red
        .into_iter()
        .map(|(u, v)| Edge::new(u, v, Color::Red))
        .chain(blue.into_iter().map(|(u, v)| Edge::new(u, v, Color::Blue)))
        .collect();
    edges.sort_unstable();
    ColoredGraph::from_edges(n, r, b, edges)
}

/// Union of an independent random red `r`-regular graph and a random blue
/// `b`-regular graph on the same vertex set.
pub fn gen_union(n: usize, r: usize, b: usize, seed: u64) -> Result<ColoredGraph> {
    if r < 1 {
        return Err(Error::param("r ≥ 1 required"));
    }
    if b < 2 {
        return Err(Error::param("b ≥ 2 required"));
    }
    check_regular_params(n, r, "r")?;
    check_regular_params(n, b, "b")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let red = sample_regular(n, r, &mut rng)?;
    let blue = sample_regular(n, b, &mut rng)?;
    merge(n, r, b, red, blue)
}

fn check_cycle_params(n: usize, r: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::param(format!("n ≥ 3 required (n={n})")));
    }
    if r < 1 {
        return Err(Error::param("r ≥ 1 required"));
    }
    check_regular_params(n, r, "r")
}

/// Blue Hamilton cycle through a random vertex ordering, plus an independent
/// random red `r`-regular graph.
pub fn gen_hamilton_union(n: usize, r: usize, seed: u64) -> Result<ColoredGraph> {
    check_cycle_params(n, r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(&mut rng);
    let blue = (0..n)
        .map(|i| {
            let (x, y) = (order[i], order[(i + 1) % n]);
            (x.min(y), x.max(y))
        })
        .collect();
    let red = sample_regular(n, r, &mut rng)?;
    merge(n, r, 2, red, blue)
}

/// Random blue 2-factor (uniform simple 2-regular graph, every cycle of
/// length at least 3) plus an independent random red `r`-regular graph.
pub fn gen_twofactor_union(n: usize, r: usize, seed: u64) -> Result<ColoredGraph> {
    check_cycle_params(n, r)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blue = sample_regular(n, 2, &mut rng)?;
    let red = sample_regular(n, r, &mut rng)?;
    merge(n, r, 2, red, blue)
}
