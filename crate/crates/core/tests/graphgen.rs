mod common;

use std::collections::{BTreeSet, HashMap, VecDeque};

use budgetwalk::graphgen::{
    analyze_structure, gen_hamilton_union, gen_regular, gen_twofactor_union, gen_union, locally_tree_like,
    parse_graph, write_graph,
};
use budgetwalk::{Color, ColoredGraph, Edge, Error};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

type EdgeSet = BTreeSet<(u8, u8)>;

/// Every simple graph produced by the pairing model on 6 vertices of degree
/// 3, with the number of pairings that produce it.
fn enumerate_pairings() -> HashMap<EdgeSet, u64> {
    fn rec(free: &mut Vec<u8>, edges: &mut Vec<(u8, u8)>, out: &mut HashMap<EdgeSet, u64>) {
        if free.is_empty() {
            let set: EdgeSet = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
            if set.len() == edges.len() && edges.iter().all(|&(a, b)| a != b) {
                *out.entry(set).or_default() += 1;
            }
            return;
        }
        let first = free.remove(0);
        for i in 0..free.len() {
            let other = free.remove(i);
            // Prune loops and repeated pairs early; they can never become simple.
            let (a, b) = (first / 3, other / 3);
            if a != b && !edges.iter().any(|&(x, y)| (x, y) == (a, b) || (y, x) == (a, b)) {
                edges.push((a, b));
                rec(free, edges, out);
                edges.pop();
            }
            free.insert(i, other);
        }
        free.insert(0, first);
    }
    let mut out = HashMap::new();
    rec(&mut (0..18).collect(), &mut Vec::new(), &mut out);
    out
}

fn has_triangle(edges: &EdgeSet) -> bool {
    let adj = |a: u8, b: u8| edges.contains(&(a.min(b), a.max(b)));
    (0..6).any(|a| (a + 1..6).any(|b| (b + 1..6).any(|c| adj(a, b) && adj(b, c) && adj(a, c))))
}

#[test]
fn pairing_model_is_uniform_on_six_vertices() {
    let census = enumerate_pairings();
    // 10 labeled K_{3,3} and 60 labeled prisms, each from 3!^6 pairings.
    assert_eq!(census.len(), 70);
    assert!(census.values().all(|&c| c == 46_656));
    assert_eq!(census.keys().filter(|e| !has_triangle(e)).count(), 10);

    let samples = 100_000u64;
    let mut counts: HashMap<EdgeSet, u64> = HashMap::new();
    for seed in 0..samples {
        let g = gen_regular(6, 3, seed).unwrap();
        let set: EdgeSet = g.edges.iter().map(|&(u, v)| (u as u8, v as u8)).collect();
        assert!(census.contains_key(&set));
        *counts.entry(set).or_default() += 1;
    }
    let k33: u64 = counts.iter().filter(|(e, _)| !has_triangle(e)).map(|(_, c)| c).sum();
    let p = 1.0 / 7.0;
    let sd = (samples as f64 * p * (1.0 - p)).sqrt();
    assert!((k33 as f64 - samples as f64 * p).abs() < 5.0 * sd, "K33 count {k33}");

    let expected = samples as f64 / 70.0;
    let stat: f64 = census.keys().map(|e| (counts.get(e).copied().unwrap_or(0) as f64 - expected).powi(2) / expected).sum();
    let pvalue = 1.0 - ChiSquared::new(69.0).unwrap().cdf(stat);
    assert!(pvalue > 1e-3, "chi-square {stat}, p = {pvalue}");
}

fn degrees_ok(g: &ColoredGraph) -> bool {
    let mut red = vec![0; g.n()];
    let mut blue = vec![0; g.n()];
    for e in g.edges() {
        let d = if e.color == Color::Red { &mut red } else { &mut blue };
        d[e.u as usize] += 1;
        d[e.v as usize] += 1;
    }
    red.iter().all(|&d| d == g.red_degree()) && blue.iter().all(|&d| d == g.blue_degree())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn union_graphs_are_regular_and_simple_per_color(half_n in 3usize..40, r in 1usize..3, b in 2usize..4, seed: u64) {
        let n = 2 * half_n;
        let g = gen_union(n, r, b, seed).unwrap();
        prop_assert_eq!(g.edges().len(), n * (r + b) / 2);
        prop_assert!(degrees_ok(&g));
        let mut seen = BTreeSet::new();
        for e in g.edges() {
            prop_assert!(e.u < e.v);
            prop_assert!(seen.insert((e.u, e.v, e.color)));
        }
        prop_assert_eq!(gen_union(n, r, b, seed).unwrap(), g);
    }

    #[test]
    fn hamilton_blue_edges_form_one_cycle(half_n in 2usize..60, seed: u64) {
        let n = 2 * half_n;
        let g = gen_hamilton_union(n, 1, seed).unwrap();
        let blue: Vec<(u32, u32)> = g.edges().iter().filter(|e| e.color == Color::Blue).map(|e| (e.u, e.v)).collect();
        prop_assert_eq!(common::cycle_lengths(n, &blue), vec![n]);
        prop_assert!(degrees_ok(&g));
    }

    #[test]
    fn twofactor_blue_edges_cover_all_vertices(half_n in 2usize..60, seed: u64) {
        let n = 2 * half_n;
        let g = gen_twofactor_union(n, 1, seed).unwrap();
        let blue: Vec<(u32, u32)> = g.edges().iter().filter(|e| e.color == Color::Blue).map(|e| (e.u, e.v)).collect();
        let lengths = common::cycle_lengths(n, &blue);
        prop_assert_eq!(lengths.iter().sum::<usize>(), n);
        prop_assert!(lengths.iter().all(|&l| l >= 3));
        let report = analyze_structure(&g);
        if let Ok(report) = report {
            prop_assert_eq!(report.blue_cycle_lengths, Some(lengths));
        }
    }

    #[test]
    fn text_format_round_trips(half_n in 2usize..30, b in 2usize..4, seed: u64) {
        let g = gen_union(2 * half_n, 1, b, seed).unwrap();
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        let back = parse_graph(std::str::from_utf8(&buf).unwrap()).unwrap();
        let mut again = Vec::new();
        write_graph(&back, &mut again).unwrap();
        prop_assert_eq!(buf, again);
        prop_assert_eq!(back, g);
    }
}

/// Vertices on a cycle of length at most `sigma`, by enumerating simple
/// cycles edge by edge.
fn brute_short_cycle_vertices(g: &ColoredGraph, sigma: usize) -> Vec<bool> {
    let n = g.n();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (id, e) in g.edges().iter().enumerate() {
        adj[e.u as usize].push((e.v as usize, id));
        adj[e.v as usize].push((e.u as usize, id));
    }
    let mut on = vec![false; n];
    fn dfs(
        adj: &[Vec<(usize, usize)>],
        start: usize,
        cur: usize,
        last_edge: usize,
        path: &mut Vec<usize>,
        sigma: usize,
        on: &mut [bool],
    ) {
        for &(next, id) in &adj[cur] {
            if id == last_edge {
                continue;
            }
            if next == start && path.len() >= 2 {
                for &v in path.iter() {
                    on[v] = true;
                }
            } else if !path.contains(&next) && path.len() < sigma {
                path.push(next);
                dfs(adj, start, next, id, path, sigma, on);
                path.pop();
            }
        }
    }
    for s in 0..n {
        dfs(&adj, s, s, usize::MAX, &mut vec![s], sigma, &mut on);
    }
    on
}

fn bfs_dist(g: &ColoredGraph, s: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; g.n()];
    d[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        for &y in g.neighbors(x) {
            if d[y as usize] == usize::MAX {
                d[y as usize] = d[x] + 1;
                q.push_back(y as usize);
            }
        }
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn tree_like_matches_brute_force(half_n in 3usize..25, b in 2usize..4, sigma in 0usize..6, seed: u64) {
        let g = gen_union(2 * half_n, 1, b, seed).unwrap();
        let on = brute_short_cycle_vertices(&g, sigma);
        let expected: Vec<bool> = (0..g.n())
            .map(|v| {
                let d = bfs_dist(&g, v);
                (0..g.n()).filter(|&u| on[u]).all(|u| d[u] >= sigma)
            })
            .collect();
        prop_assert_eq!(locally_tree_like(&g, sigma), expected);
    }
}

#[test]
fn parallel_red_blue_edge_is_a_two_cycle() {
    // A 4-cycle in blue plus a red matching that doubles edge {0,1}.
    let edges = vec![
        Edge::new(0, 1, Color::Blue),
        Edge::new(1, 2, Color::Blue),
        Edge::new(2, 3, Color::Blue),
        Edge::new(0, 3, Color::Blue),
        Edge::new(0, 1, Color::Red),
        Edge::new(2, 3, Color::Red),
    ];
    let g = ColoredGraph::from_edges(4, 1, 2, edges).unwrap();
    assert_eq!(brute_short_cycle_vertices(&g, 2), vec![true; 4]);
    assert_eq!(locally_tree_like(&g, 2), vec![false; 4]);
}

#[test]
fn large_union_is_mostly_tree_like_with_a_spectral_gap() {
    let g = gen_union(20_000, 1, 2, 1).unwrap();
    let report = analyze_structure(&g).unwrap();
    assert_eq!(report.sigma, 3);
    assert!(report.non_tree_like_count < 200, "{}", report.non_tree_like_count);
    // Alon–Boppana: a random 3-regular graph has λ2 close to 2√2/3.
    assert!(report.lambda2 > 0.9 && report.lambda2 < 0.96, "{}", report.lambda2);
}

#[test]
fn parity_and_degree_errors() {
    assert!(matches!(gen_union(5, 1, 2, 0), Err(Error::Parameter(m)) if m.contains("n·r must be even")));
    assert!(gen_regular(4, 4, 0).is_err());
    assert!(gen_twofactor_union(2, 1, 0).is_err());
    assert!(matches!(parse_graph("n 3 r 0 b 2\n0 1 B\n1 2 B\n0 2 X\n"), Err(Error::Parse { line: 4, .. })));
}

#[test]
fn spectral_gap_on_thousand_vertex_cubic_graphs() {
    for seed in 0..20 {
        let g = gen_regular(1000, 3, seed).unwrap().into_colored(Color::Red);
        let l = budgetwalk::graphgen::lambda2(&g);
        assert!(l <= 0.97, "seed {seed}: lambda2 = {l}");
    }
}
