//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use budgetwalk::{Color, ColoredGraph};

/// Dense simple-walk transition matrix, counting parallel edges twice.
pub fn transition_matrix(g: &ColoredGraph) -> Vec<Vec<f64>> {
    let n = g.n();
    let d = (g.red_degree() + g.blue_degree()) as f64;
    let mut p = vec![vec![0.0; n]; n];
    for e in g.edges() {
        let (u, v) = (e.u as usize, e.v as usize);
        p[u][v] += 1.0 / d;
        p[v][u] += 1.0 / d;
    }
    p
}

/// Dense transition matrix of a walk that picks a red edge with total
/// probability `r·rho_r` and a blue one otherwise, uniformly within a color.
pub fn flip_matrix(g: &ColoredGraph, rho_r: f64, rho_b: f64) -> Vec<Vec<f64>> {
    let n = g.n();
    let mut p = vec![vec![0.0; n]; n];
    for e in g.edges() {
        let w = if e.color == Color::Red { rho_r } else { rho_b };
        let (u, v) = (e.u as usize, e.v as usize);
        p[u][v] += w;
        p[v][u] += w;
    }
    p
}

/// Solves `a·x = b` by Gaussian elimination with partial pivoting.
pub fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        assert!(a[piv][col].abs() > 1e-14, "singular system");
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Expected cover time from each start vertex for a time-homogeneous walk
/// with transition matrix `p` (`n ≤ 12`), by dynamic programming over the
/// visited set.
pub fn exact_cover_times(p: &[Vec<f64>]) -> Vec<f64> {
    let n = p.len();
    assert!(n <= 12);
    let full = (1usize << n) - 1;
    // e[set][v]: expected remaining time at v having visited `set`.
    let mut e = vec![vec![0.0; n]; 1 << n];
    for set in (1..full).rev() {
        let members: Vec<usize> = (0..n).filter(|&v| set >> v & 1 == 1).collect();
        let index = |v: usize| members.iter().position(|&m| m == v);
        let m = members.len();
        let mut a = vec![vec![0.0; m]; m];
        let mut rhs = vec![1.0; m];
        for (i, &v) in members.iter().enumerate() {
            a[i][i] += 1.0;
            for u in 0..n {
                if p[v][u] == 0.0 {
                    continue;
                }
                match index(u) {
                    Some(j) => a[i][j] -= p[v][u],
                    None => rhs[i] += p[v][u] * e[set | 1 << u][u],
                }
            }
        }
        let x = solve(a, rhs);
        for (i, &v) in members.iter().enumerate() {
            e[set][v] = x[i];
        }
    }
    (0..n).map(|v| e[1 << v][v]).collect()
}

/// Blue-component label of every vertex, by union-find.
pub fn blue_labels(g: &ColoredGraph) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in g.edges().iter().filter(|e| e.color == Color::Blue) {
        let (a, b) = (find(&mut parent, e.u as usize), find(&mut parent, e.v as usize));
        parent[a] = b;
    }
    (0..g.n()).map(|v| find(&mut parent, v)).collect()
}

/// Probability that a simple walk started from the uniform distribution does
/// not visit `v` at any time in `[t_mix, t]`, for each `t` in `ts`, via powers
/// of the transition matrix with `v` deleted.
pub fn exact_nonvisit(g: &ColoredGraph, v: usize, t_mix: u64, ts: &[u64]) -> Vec<f64> {
    let p = transition_matrix(g);
    let n = g.n();
    // h[u] = P(no visit to v in the next k steps | at u), u ≠ v.
    let mut h: Vec<f64> = (0..n).map(|u| if u == v { 0.0 } else { 1.0 }).collect();
    let mut k = 0u64;
    let mut out = Vec::new();
    for &t in ts {
        assert!(t >= t_mix);
        while k < t - t_mix {
            let next: Vec<f64> = (0..n)
                .map(|u| if u == v { 0.0 } else { (0..n).map(|w| p[u][w] * h[w]).sum() })
                .collect();
            h = next;
            k += 1;
        }
        // The walk is stationary at every time because it starts uniform.
        out.push(h.iter().sum::<f64>() / n as f64);
    }
    out
}

/// Fundamental-matrix entry `Z_vv = [(I - P + Π)^{-1}]_vv - π_v`.
pub fn fundamental_diag(g: &ColoredGraph, v: usize) -> f64 {
    let p = transition_matrix(g);
    let n = g.n();
    let pi = 1.0 / n as f64;
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as u8 as f64 - p[i][j] + pi).collect())
        .collect();
    let mut e = vec![0.0; n];
    e[v] = 1.0;
    solve(a, e)[v] - pi
}

/// Cycle lengths of a 2-regular edge list, by direct traversal.
pub fn cycle_lengths(n: usize, edges: &[(u32, u32)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u as usize].push(v as usize);
        adj[v as usize].push(u as usize);
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let (mut len, mut prev, mut cur) = (0, usize::MAX, s);
        loop {
            seen[cur] = true;
            len += 1;
            let next = if adj[cur][0] != prev { adj[cur][0] } else { adj[cur][1] };
            prev = cur;
            cur = next;
            if cur == s {
                break;
            }
        }
        out.push(len);
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}
