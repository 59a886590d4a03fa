//! Structural quantities the cover-time laws condition on: small cycles,
//! locally tree-like vertices, the spectral gap of the simple walk and the
//! blue 2-factor cycle decomposition.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ColoredGraph;
use crate::error::{Error, Result};

const LAMBDA_TOL: f64 = 1e-8;
const LAMBDA_MAX_ITERS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub n: usize,
    pub sigma: usize,
    /// Sorted vertex ids.
    pub locally_tree_like: Vec<u32>,
    pub non_tree_like_count: usize,
    /// Largest-magnitude non-trivial eigenvalue of the simple-walk operator.
    pub lambda2: f64,
    /// Blue cycle lengths in decreasing order, present only when `b = 2`.
    pub blue_cycle_lengths: Option<Vec<usize>>,
}

/// Small-cycle threshold `⌊√(ln n)⌋`.
pub fn sigma_for(n: usize) -> usize {
    if n < 2 {
        return 0;
    }
    (n as f64).ln().sqrt().floor() as usize
}

pub fn analyze_structure(g: &ColoredGraph) -> Result<StructureReport> {
    if !g.is_connected() {
        return Err(Error::Structure("graph is disconnected; cover time is undefined".into()));
    }
    let sigma = sigma_for(g.n());
    let tree_like = locally_tree_like(g, sigma);
    let locally_tree_like: Vec<u32> =
        (0..g.n()).filter(|&v| tree_like[v]).map(|v| v as u32).collect();
    Ok(StructureReport {
        n: g.n(),
        sigma,
        non_tree_like_count: g.n() - locally_tree_like.len(),
        locally_tree_like,
        lambda2: lambda2(g),
        blue_cycle_lengths: blue_cycle_lengths(g),
    })
}

/// Length of the shortest cycle through `root`, if one of length at most
/// `limit` exists. Parallel red/blue edges count as cycles of length 2.
fn short_cycle_through(g: &ColoredGraph, root: usize, limit: usize, scratch: &mut BfsScratch) -> Option<usize> {
    if limit < 2 {
        return None;
    }
    let depth_cap = limit / 2;
    scratch.reset();
    scratch.visit(root, 0, u32::MAX, u32::MAX);
    let mut queue = VecDeque::from([root]);
    let mut best: Option<usize> = None;
    while let Some(x) = queue.pop_front() {
        let dx = scratch.depth[x] as usize;
        for (&y, &e) in g.neighbors(x).iter().zip(g.incident_edge_ids(x)) {
            let y = y as usize;
            if e == scratch.tree_edge[x] {
                continue;
            }
            if scratch.depth[y] == u32::MAX {
                if dx < depth_cap {
                    let branch = if x == root { y as u32 } else { scratch.branch[x] };
                    scratch.visit(y, dx as u32 + 1, e, branch);
                    queue.push_back(y);
                }
                continue;
            }
            // Non-tree edge between two explored vertices.
            if e == scratch.tree_edge[y] {
                continue;
            }
            if x != root && y != root && scratch.branch[x] == scratch.branch[y] {
                continue;
            }
            let len = dx + scratch.depth[y] as usize + 1;
            if len <= limit {
                best = Some(best.map_or(len, |b| b.min(len)));
            }
        }
    }
    best
}

struct BfsScratch {
    depth: Vec<u32>,
    tree_edge: Vec<u32>,
    branch: Vec<u32>,
    touched: Vec<usize>,
}

impl BfsScratch {
    fn new(n: usize) -> Self {
        BfsScratch {
            depth: vec![u32::MAX; n],
            tree_edge: vec![u32::MAX; n],
            branch: vec![u32::MAX; n],
            touched: Vec::new(),
        }
    }

    fn visit(&mut self, v: usize, depth: u32, edge: u32, branch: u32) {
        self.depth[v] = depth;
        self.tree_edge[v] = edge;
        self.branch[v] = branch;
        self.touched.push(v);
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.depth[v] = u32::MAX;
            self.tree_edge[v] = u32::MAX;
            self.branch[v] = u32::MAX;
        }
        self.touched.clear();
    }
}

/// Flags each vertex at distance at least `sigma` from every cycle of length
/// at most `sigma`.
pub fn locally_tree_like(g: &ColoredGraph, sigma: usize) -> Vec<bool> {
    let n = g.n();
    let mut scratch = BfsScratch::new(n);
    let on_small_cycle: Vec<usize> =
        (0..n).filter(|&v| short_cycle_through(g, v, sigma, &mut scratch).is_some()).collect();

    // Multi-source BFS out to distance sigma - 1 from the small cycles.
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &v in &on_small_cycle {
        dist[v] = 0;
        queue.push_back(v);
    }
    while let Some(x) = queue.pop_front() {
        if dist[x] + 1 >= sigma {
            continue;
        }
        for &y in g.neighbors(x) {
            let y = y as usize;
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    dist.into_iter().map(|d| d == usize::MAX || d >= sigma).collect()
}

fn apply_walk(g: &ColoredGraph, x: &[f64], y: &mut [f64]) {
    let d = g.degree() as f64;
    for (v, out) in y.iter_mut().enumerate() {
        *out = g.neighbors(v).iter().map(|&w| x[w as usize]).sum::<f64>() / d;
    }
}

fn deflate_and_norm(x: &mut [f64]) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Second-largest eigenvalue magnitude of the simple-walk transition matrix,
/// by power iteration with the uniform vector deflated at every step.
///
/// The operator is symmetric on a regular graph, so `‖Px‖/‖x‖` increases
/// monotonically toward the answer; iteration stops once the increment drops
/// below `1e-8` or after `1e5` rounds. An eigenvalue of `-1` (bipartite
/// graph) is reported as `1`.
pub fn lambda2(g: &ColoredGraph) -> f64 {
    let n = g.n();
    if n < 2 || g.degree() == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1a4b_da00_0002);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let norm = deflate_and_norm(&mut x);
    if norm == 0.0 {
        return 0.0;
    }
    x.iter_mut().for_each(|v| *v /= norm);
    let mut y = vec![0.0; n];
    let mut estimate = 0.0;
    for _ in 0..LAMBDA_MAX_ITERS {
        apply_walk(g, &x, &mut y);
        let norm = deflate_and_norm(&mut y);
        if norm < 1e-300 {
            return 0.0;
        }
        let prev = estimate;
        estimate = norm;
        y.iter_mut().for_each(|v| *v /= norm);
        std::mem::swap(&mut x, &mut y);
        if (estimate - prev).abs() < LAMBDA_TOL {
            break;
        }
    }
    estimate.min(1.0)
}

/// Lengths of the blue cycles, largest first, when the blue subgraph is a
/// 2-factor (`b = 2`); `None` otherwise.
pub fn blue_cycle_lengths(g: &ColoredGraph) -> Option<Vec<usize>> {
    if g.blue_degree() != 2 {
        return None;
    }
    let (labels, count) = g.blue_components();
    let mut sizes = vec![0usize; count];
    for l in labels {
        sizes[l as usize] += 1;
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Some(sizes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphgen::{gen_regular, Color, Edge};

    fn cycle(n: u32) -> ColoredGraph {
        let edges = (0..n).map(|i| {
            let j = (i + 1) % n;
            Edge::new(i.min(j), i.max(j), Color::Blue)
        });
        let mut edges: Vec<Edge> = edges.collect();
        edges.sort();
        ColoredGraph::from_edges(n as usize, 0, 2, edges).unwrap()
    }

    #[test]
    fn triangle_lambda2_is_half() {
        assert!((lambda2(&cycle(3)) - 0.5).abs() < 1e-7);
    }

    #[test]
    fn k4_lambda2_is_one_third() {
        let g = gen_regular(4, 3, 0).unwrap().into_colored(Color::Red);
        assert!((lambda2(&g) - 1.0 / 3.0).abs() < 1e-7);
    }

    #[test]
    fn even_cycle_reports_bipartite_eigenvalue() {
        assert!((lambda2(&cycle(10)) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn cycle_with_sigma_one_is_all_tree_like() {
        let g = cycle(10);
        assert_eq!(sigma_for(10), 1);
        assert!(locally_tree_like(&g, 1).iter().all(|&t| t));
        let rep = analyze_structure(&g).unwrap();
        assert_eq!(rep.locally_tree_like.len(), 10);
        assert_eq!(rep.blue_cycle_lengths, Some(vec![10]));
    }

    #[test]
    fn short_cycles_are_found() {
        // Triangle: every vertex lies on a 3-cycle.
        assert!(locally_tree_like(&cycle(3), 3).iter().all(|&t| !t));
        // Triangle with sigma 2: no cycle of length ≤ 2.
        assert!(locally_tree_like(&cycle(3), 2).iter().all(|&t| t));
        // Cycle C8 with sigma 8: on the cycle.
        assert!(locally_tree_like(&cycle(8), 8).iter().all(|&t| !t));
        assert!(locally_tree_like(&cycle(8), 7).iter().all(|&t| t));
    }

    #[test]
    fn parallel_cross_color_edges_form_two_cycles() {
        // Red matching 0-1, 2-3 on top of the blue 4-cycle 0-1-2-3.
        let edges = vec![
            Edge::new(0, 1, Color::Red),
            Edge::new(0, 1, Color::Blue),
            Edge::new(0, 3, Color::Blue),
            Edge::new(1, 2, Color::Blue),
            Edge::new(2, 3, Color::Red),
            Edge::new(2, 3, Color::Blue),
        ];
        let g = ColoredGraph::from_edges(4, 1, 2, edges).unwrap();
        assert!(locally_tree_like(&g, 2).iter().all(|&t| !t));
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let mut edges = vec![];
        for base in [0u32, 3] {
            edges.push(Edge::new(base, base + 1, Color::Blue));
            edges.push(Edge::new(base, base + 2, Color::Blue));
            edges.push(Edge::new(base + 1, base + 2, Color::Blue));
        }
        let g = ColoredGraph::from_edges(6, 0, 2, edges).unwrap();
        assert!(matches!(analyze_structure(&g), Err(Error::Structure(_))));
        assert_eq!(blue_cycle_lengths(&g), Some(vec![3, 3]));
    }
}
