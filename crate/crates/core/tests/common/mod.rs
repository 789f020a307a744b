#![allow(dead_code)]

use anonimos_core::{Directedness, Edge, LpModel, WeightedGraph};
use proptest::prelude::*;

/// Random simple graph: `n` in `1..=max_n`, each candidate pair kept with
/// probability ~`density`, weights from `weight`.
pub fn graph_strategy(
    max_n: usize,
    directed: bool,
    integer_weights: bool,
) -> impl Strategy<Value = WeightedGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| if directed { u != v } else { u < v })
            .collect();
        let k = pairs.len();
        let weight = if integer_weights {
            (1u32..=6).prop_map(f64::from).boxed()
        } else {
            (0.05f64..50.0).boxed()
        };
        proptest::collection::vec((proptest::bool::weighted(0.4), weight), k).prop_map(
            move |picks| {
                let edges = pairs
                    .iter()
                    .zip(picks)
                    .filter(|(_, (keep, _))| *keep)
                    .map(|(&(u, v), (_, w))| Edge::new(u, v, w))
                    .collect();
                let dir = if directed {
                    Directedness::Directed
                } else {
                    Directedness::Undirected
                };
                WeightedGraph::new(n, dir, edges).unwrap()
            },
        )
    })
}

/// Both orientations, integer or real weights.
pub fn any_graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    prop_oneof![
        graph_strategy(max_n, false, true),
        graph_strategy(max_n, false, false),
        graph_strategy(max_n, true, true),
        graph_strategy(max_n, true, false),
    ]
}

/// Shortest distances by exhaustive search over simple paths.
pub fn brute_force_distances(g: &WeightedGraph, s: usize) -> Vec<Option<f64>> {
    fn dfs(g: &WeightedGraph, v: usize, cost: f64, on_path: &mut [bool], best: &mut [Option<f64>]) {
        if best[v].is_none_or(|b| cost < b) {
            best[v] = Some(cost);
        }
        for &(w, e) in g.neighbors(v) {
            if !on_path[w] {
                on_path[w] = true;
                dfs(g, w, cost + g.weight(e), on_path, best);
                on_path[w] = false;
            }
        }
    }
    let mut best = vec![None; g.vertex_count()];
    let mut on_path = vec![false; g.vertex_count()];
    on_path[s] = true;
    dfs(g, s, 0.0, &mut on_path, &mut best);
    best
}

fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot = &top[col];
        for (k, row) in rest.iter_mut().enumerate() {
            let f = row[col] / pivot[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * p;
            }
            b[col + 1 + k] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Minimum over all feasible basic points (`n` independent tight
/// constraints among rows and bounds); `None` when there are none.
pub fn brute_force_lp(model: &LpModel) -> Option<f64> {
    let n = model.num_vars();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in &model.rows {
        let mut a = vec![0.0; n];
        for &(j, c) in &row.coeffs {
            a[j] += c;
        }
        planes.push((a, row.rhs));
    }
    for j in 0..n {
        for b in [model.lower[j], model.upper[j]] {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            planes.push((a, b));
        }
    }
    let tol = |b: f64| 1e-9 * (1.0 + b.abs());
    let feasible = |x: &[f64]| {
        model.rows.iter().all(|r| r.lhs(x) <= r.rhs + tol(r.rhs))
            && (0..n).all(|j| {
                x[j] >= model.lower[j] - tol(model.lower[j])
                    && x[j] <= model.upper[j] + tol(model.upper[j])
            })
    };
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    let p = planes.len();
    loop {
        let a = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = gauss(a, b) {
            if feasible(&x) {
                let v = model.objective_value(&x);
                if best.is_none_or(|b| v < b) {
                    best = Some(v);
                }
            }
        }
        // Next n-combination of 0..p in lexicographic order.
        let Some(i) = (0..n).rev().find(|&i| idx[i] < p - n + i) else {
            return best;
        };
        idx[i] += 1;
        for k in i + 1..n {
            idx[k] = idx[k - 1] + 1;
        }
    }
}

/// Tau-b straight from its definition: concordant minus discordant pairs
/// over the geometric mean of the untied pair counts.
pub fn tau_b_pairs(a: &[f64], b: &[f64]) -> f64 {
    let (mut s, mut n1, mut n2) = (0i64, 0i64, 0i64);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let da = (a[i] - a[j]).partial_cmp(&0.0).unwrap() as i64;
            let db = (b[i] - b[j]).partial_cmp(&0.0).unwrap() as i64;
            s += da * db;
            n1 += (da != 0) as i64;
            n2 += (db != 0) as i64;
        }
    }
    if n1 == 0 || n2 == 0 {
        0.0
    } else {
        s as f64 / ((n1 as f64) * (n2 as f64)).sqrt()
    }
}
