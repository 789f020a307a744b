//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use anonimos::cli;
use anonimos::edge_list::{parse_edge_list, write_edge_list};
use anonimos::lp_format::{export_lp_text, parse_lp_text, DEFAULT_PREFIX};
use anonimos_core::anonymize::{build_constraints, build_trees, export_model};
use anonimos_core::constraints::{assemble_lp, Bounds, Margin};
use anonimos_core::metrics::{kendall_tau, preservation_rate};
use anonimos_core::shortest_paths::path_cost;
use anonimos_core::{
    anonymize, check_feasible, solve, AnonymizeOptions, ConstraintMode, CostTolerance,
    Directedness, Edge, LpModel, LpRow, LpStatus, SourceSelection, WeightedGraph,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

const UND: Directedness = Directedness::Undirected;

/// Erdős–Rényi G(n, p) with integer weights in [1, 100]; redrawn until it
/// has at least one edge, so it can be written as an edge list.
fn er_graph(seed: u64, n: usize, p: f64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push(Edge::new(u, v, rng.gen_range(1..=100) as f64));
                }
            }
        }
        if !edges.is_empty() {
            return WeightedGraph::new(n, UND, edges).unwrap();
        }
    }
}

/// Criterion-1 graphs: n drawn from [5, 50].
fn sssp_graphs() -> Vec<(u64, WeightedGraph)> {
    (0..100u64)
        .map(|seed| {
            let n = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed).gen_range(5..=50);
            (seed, er_graph(seed, n, 0.3))
        })
        .collect()
}

/// Criterion-2 graphs: n in [5, 20].
fn apsp_graphs() -> Vec<(u64, WeightedGraph)> {
    (0..25u64)
        .map(|seed| {
            (
                1000 + seed,
                er_graph(1000 + seed, 5 + (seed as usize % 16), 0.3),
            )
        })
        .collect()
}

/// The graph as the CLI sees it after a write/parse round trip (isolated
/// high-numbered vertices are not representable in an edge list).
fn as_file(dir: &Path, name: &str, g: &WeightedGraph) -> (String, WeightedGraph) {
    let path = dir.join(name);
    let text = write_edge_list(g, 17);
    fs::write(&path, &text).unwrap();
    (
        path.to_str().unwrap().to_string(),
        parse_edge_list(&text, UND).unwrap(),
    )
}

fn run_cli(args: &[&str]) -> i32 {
    let mut full = vec!["anonimos"];
    full.extend_from_slice(args);
    cli::run(full)
}

fn read_graph(path: &str) -> WeightedGraph {
    parse_edge_list(&fs::read_to_string(path).unwrap(), UND).unwrap()
}

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn criterion_1(dir: &Path) -> Outcome {
    let start = Instant::now();
    let mut preserved = 0;
    let mut notes = Vec::new();
    for (seed, g) in sssp_graphs() {
        let (input, g) = as_file(dir, &format!("c1_{seed}.txt"), &g);
        let output = dir.join(format!("c1_{seed}_out.txt"));
        let out = output.to_str().unwrap();
        let seed_s = seed.to_string();
        let code = run_cli(&["anonymize", "-i", &input, "-o", out, "--seed", &seed_s]);
        if code != 0 {
            notes.push(format!("seed {seed}: exit {code}"));
            continue;
        }
        let rate = preservation_rate(&g, &read_graph(out), &[0]).unwrap().rate;
        if rate == 1.0 {
            preserved += 1;
        } else {
            notes.push(format!("seed {seed}: rate {rate}"));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        preserved == 100 && elapsed < Duration::from_secs(60),
        format!(
            "{preserved}/100 trees preserved in {} (limit 60s) {}",
            secs(elapsed),
            notes.join("; ")
        ),
    )
}

fn criterion_2(dir: &Path) -> Outcome {
    let start = Instant::now();
    let mut preserved = 0;
    let mut notes = Vec::new();
    for (seed, g) in apsp_graphs() {
        let (input, g) = as_file(dir, &format!("c2_{seed}.txt"), &g);
        let output = dir.join(format!("c2_{seed}_out.txt"));
        let out = output.to_str().unwrap();
        let code = run_cli(&["anonymize", "-i", &input, "-o", out, "--mode", "apsp"]);
        if code != 0 {
            notes.push(format!("seed {seed}: exit {code}"));
            continue;
        }
        let all: Vec<usize> = (0..g.vertex_count()).collect();
        let rate = preservation_rate(&g, &read_graph(out), &all).unwrap().rate;
        if rate == 1.0 {
            preserved += 1;
        } else {
            notes.push(format!("seed {seed}: rate {rate}"));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        preserved == 25 && elapsed < Duration::from_secs(120),
        format!(
            "{preserved}/25 graphs with every tree preserved in {} (limit 120s) {}",
            secs(elapsed),
            notes.join("; ")
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut systems = 0;
    let mut violations = 0;
    let cases = sssp_graphs()
        .into_iter()
        .map(|(_, g)| (g, SourceSelection::Single(0)))
        .chain(
            apsp_graphs()
                .into_iter()
                .map(|(_, g)| (g, SourceSelection::All)),
        );
    for (g, sel) in cases {
        let sources = sel.resolve(g.vertex_count()).unwrap();
        let bounds = Bounds::uniform(g.edge_count(), 1.0, 1000.0).unwrap();
        for mode in [ConstraintMode::Optimality, ConstraintMode::Trace] {
            let trees = build_trees(&g, &sources, mode).unwrap();
            let set =
                build_constraints(&g, &trees, mode, None, Margin::Uniform(0.0), &bounds).unwrap();
            let model = assemble_lp(&set, &bounds, &vec![0.0; g.edge_count()]).unwrap();
            systems += 1;
            if let Err(v) = check_feasible(&model, &g.weights(), 1e-9) {
                violations += v.len();
            }
        }
    }
    outcome(
        violations == 0,
        format!("{systems} delta=0 systems, {violations} violations by the original weights"),
    )
}

/// Minimizes by enumerating every point where `n` linearly independent
/// constraints (rows or bounds) are tight.
fn brute_force(model: &LpModel) -> Option<f64> {
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
    let feasible = |x: &[f64]| {
        let tol = |b: f64| 1e-9 * (1.0 + b.abs());
        model.rows.iter().all(|r| r.lhs(x) <= r.rhs + tol(r.rhs))
            && (0..n).all(|j| {
                x[j] >= model.lower[j] - tol(model.lower[j])
                    && x[j] <= model.upper[j] + tol(model.upper[j])
            })
    };
    let mut best: Option<f64> = None;
    let mut pick = Vec::with_capacity(n);
    fn rec(
        start: usize,
        pick: &mut Vec<usize>,
        n: usize,
        planes: &[(Vec<f64>, f64)],
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if pick.len() == n {
            visit(pick);
            return;
        }
        for i in start..planes.len() {
            pick.push(i);
            rec(i + 1, pick, n, planes, visit);
            pick.pop();
        }
    }
    let mut visit = |idx: &[usize]| {
        let mut a: Vec<Vec<f64>> = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let mut b: Vec<f64> = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = gauss(&mut a, &mut b) {
            if feasible(&x) {
                let v = model.objective_value(&x);
                if best.is_none_or(|b| v < b) {
                    best = Some(v);
                }
            }
        }
    };
    rec(0, &mut pick, n, &planes, &mut visit);
    best
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn gauss(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
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

/// Integer data. Row right-hand sides are offsets from an integer point of
/// the box, so most instances are feasible and some are not.
fn random_lp(seed: u64) -> LpModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(0..=8);
    let objective = (0..n).map(|_| rng.gen_range(-10..=10) as f64).collect();
    let lower: Vec<f64> = (0..n).map(|_| rng.gen_range(-5..=5) as f64).collect();
    let upper: Vec<f64> = lower
        .iter()
        .map(|l| l + rng.gen_range(0..=10) as f64)
        .collect();
    let anchor: Vec<f64> = lower
        .iter()
        .zip(&upper)
        .map(|(&l, &u)| rng.gen_range(l as i64..=u as i64) as f64)
        .collect();
    let rows = (0..m)
        .map(|_| {
            let mut coeffs = Vec::new();
            for j in 0..n {
                if rng.gen_bool(0.7) {
                    coeffs.push((j, rng.gen_range(-5..=5) as f64));
                }
            }
            let at_anchor: f64 = coeffs.iter().map(|&(j, c)| c * anchor[j]).sum();
            LpRow {
                coeffs,
                rhs: at_anchor + rng.gen_range(-4..=12) as f64,
            }
        })
        .collect();
    LpModel::new(objective, rows, lower, upper).unwrap()
}

fn criterion_4() -> Outcome {
    let mut agree = 0;
    let (mut optimal, mut infeasible) = (0, 0);
    let mut notes = Vec::new();
    for seed in 0..200u64 {
        let model = random_lp(seed);
        let oracle = brute_force(&model);
        let sol = solve(&model).unwrap();
        let ok = match (sol.status, oracle) {
            (LpStatus::Optimal, Some(v)) => {
                optimal += 1;
                let got = sol.objective_value.unwrap();
                (got - v).abs() <= 1e-6 * v.abs().max(1.0)
            }
            (LpStatus::Infeasible, None) => {
                infeasible += 1;
                true
            }
            _ => false,
        };
        if ok {
            agree += 1;
        } else {
            notes.push(format!(
                "seed {seed}: {:?} vs oracle {:?}",
                sol.objective_value, oracle
            ));
        }
    }
    outcome(
        agree == 200,
        format!(
            "{agree}/200 agree ({optimal} optimal, {infeasible} infeasible) {}",
            notes.join("; ")
        ),
    )
}

fn criterion_5(dir: &Path) -> Outcome {
    let mut reduced = 0;
    let mut preserved = [0; 2];
    let mut notes = Vec::new();
    for (seed, g) in sssp_graphs() {
        let (input, g) = as_file(dir, &format!("c5_{seed}.txt"), &g);
        let bounds = Bounds::uniform(g.edge_count(), 1.0, 1000.0).unwrap();
        let rows = |mode| {
            let trees = build_trees(&g, &[0], mode).unwrap();
            build_constraints(&g, &trees, mode, None, Margin::Uniform(1.0), &bounds)
                .unwrap()
                .len()
        };
        let (opt, trace) = (
            rows(ConstraintMode::Optimality),
            rows(ConstraintMode::Trace),
        );
        if opt <= trace {
            reduced += 1;
        } else {
            notes.push(format!("seed {seed}: {opt} > {trace}"));
        }
        for (k, mode) in ["optimality", "trace"].into_iter().enumerate() {
            let output = dir.join(format!("c5_{seed}_{mode}.txt"));
            let out = output.to_str().unwrap();
            let seed_s = seed.to_string();
            let code = run_cli(&[
                "anonymize",
                "-i",
                &input,
                "-o",
                out,
                "--seed",
                &seed_s,
                "--constraints",
                mode,
            ]);
            if code == 0 && preservation_rate(&g, &read_graph(out), &[0]).unwrap().rate == 1.0 {
                preserved[k] += 1;
            } else {
                notes.push(format!("seed {seed}: {mode} not preserved (exit {code})"));
            }
        }
    }
    outcome(
        reduced == 100 && preserved == [100, 100],
        format!(
            "|optimality| <= |trace| on {reduced}/100; preserved optimality {}/100, trace {}/100 {}",
            preserved[0],
            preserved[1],
            notes.join("; ")
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut taus = Vec::new();
    let mut notes = Vec::new();
    for seed in 0..50u64 {
        let g = er_graph(5000 + seed, 30, 0.3);
        let opts = AnonymizeOptions {
            delta: 1.0,
            lower: 1.0,
            upper: 1000.0,
            seed,
            ..Default::default()
        };
        match anonymize(&g, &opts) {
            Ok(out) => taus.push(
                kendall_tau(&g.weights(), &out.graph.weights())
                    .unwrap()
                    .abs(),
            ),
            Err(e) => notes.push(format!("seed {seed}: {e}")),
        }
    }
    taus.sort_by(f64::total_cmp);
    let median = if taus.is_empty() {
        f64::NAN
    } else if taus.len() % 2 == 1 {
        taus[taus.len() / 2]
    } else {
        (taus[taus.len() / 2 - 1] + taus[taus.len() / 2]) / 2.0
    };
    let max = taus.last().copied().unwrap_or(f64::NAN);
    outcome(
        taus.len() == 50 && median < 0.8 && max < 1.0,
        format!(
            "median |tau| {median:.4} (< 0.8), max |tau| {max:.4} (< 1.0) over {} runs {}",
            taus.len(),
            notes.join("; ")
        ),
    )
}

fn criterion_7(dir: &Path) -> Outcome {
    let mut pairs = 0usize;
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for (seed, g) in apsp_graphs() {
        let (input, g) = as_file(dir, &format!("c7_{seed}.txt"), &g);
        let output = dir.join(format!("c7_{seed}_out.txt"));
        let out = output.to_str().unwrap();
        let code = run_cli(&[
            "anonymize",
            "-i",
            &input,
            "-o",
            out,
            "--mode",
            "apsp",
            "--epsilon",
            "2.0",
            "--bounds",
            "1,10000",
        ]);
        if code != 0 {
            bad.push(format!("seed {seed}: exit {code}"));
            continue;
        }
        let anon = read_graph(out);
        for s in 0..g.vertex_count() {
            let tree = anonimos_core::sssp_canonical(&g, s, false).unwrap();
            for t in 0..g.vertex_count() {
                let Some(d) = tree.dist[t] else { continue };
                let path = tree.path_to(t).unwrap().unwrap_or_default();
                let cost = path_cost(&anon, &path);
                pairs += 1;
                worst = worst.max((cost - d).abs());
                if (cost - d).abs() > 2.0 + 1e-6 {
                    bad.push(format!("seed {seed} {s}->{t}: {cost} vs {d}"));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{pairs} (source, target) pairs checked, worst |cost - D| = {worst:.6} (<= 2 + 1e-6) {}", bad.join("; ")),
    )
}

fn criterion_8(dir: &Path) -> Outcome {
    let mut identical = 0;
    let mut notes = Vec::new();
    for (seed, g) in sssp_graphs() {
        let (input, _) = as_file(dir, &format!("c8_{seed}.txt"), &g);
        let mut runs = Vec::new();
        for rep in 0..2 {
            let out = dir.join(format!("c8_{seed}_{rep}.txt"));
            let rep_path = dir.join(format!("c8_{seed}_{rep}.json"));
            let seed_s = seed.to_string();
            let code = run_cli(&[
                "anonymize",
                "-i",
                &input,
                "-o",
                out.to_str().unwrap(),
                "--seed",
                &seed_s,
                "--report",
                rep_path.to_str().unwrap(),
            ]);
            runs.push((code, fs::read(&out).ok(), fs::read(&rep_path).ok()));
        }
        if runs[0] == runs[1] && runs[0].1.is_some() && runs[0].2.is_some() {
            identical += 1;
        } else {
            notes.push(format!("seed {seed} differs"));
        }
    }
    outcome(
        identical == 100,
        format!(
            "{identical}/100 repeated runs byte-identical (graph and report) {}",
            notes.join("; ")
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut exact = 0;
    let mut notes = Vec::new();
    for (k, (seed, g)) in sssp_graphs().into_iter().take(50).enumerate() {
        let opts = AnonymizeOptions {
            mode: if k % 2 == 0 {
                ConstraintMode::Optimality
            } else {
                ConstraintMode::Trace
            },
            sources: if k % 3 == 0 {
                SourceSelection::All
            } else {
                SourceSelection::Single(0)
            },
            cost: (k % 5 == 0).then_some(CostTolerance::Relative(0.1)),
            delta: 1.0 / (1 + k % 4) as f64,
            seed,
            ..Default::default()
        };
        let model = export_model(&g, &opts).unwrap();
        let back = match parse_lp_text(&export_lp_text(&model, DEFAULT_PREFIX)) {
            Ok(m) => m,
            Err(e) => {
                notes.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        let bits = |m: &LpModel| {
            let mut v: Vec<u64> = m.objective.iter().map(|x| x.to_bits()).collect();
            v.extend(m.lower.iter().chain(&m.upper).map(|x| x.to_bits()));
            for r in &m.rows {
                v.push(r.rhs.to_bits());
                v.push(r.coeffs.len() as u64);
                for &(j, c) in &r.coeffs {
                    v.push(j as u64);
                    v.push(c.to_bits());
                }
            }
            v
        };
        if back == model && bits(&back) == bits(&model) {
            exact += 1;
        } else {
            notes.push(format!("seed {seed}: mismatch"));
        }
    }
    outcome(
        exact == 50,
        format!(
            "{exact}/50 models reproduced coefficient-exactly {}",
            notes.join("; ")
        ),
    )
}

/// Shortest distances by exhaustive search over simple paths.
fn all_simple_paths_dist(g: &WeightedGraph, s: usize) -> Vec<Option<f64>> {
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

fn criterion_10() -> Outcome {
    let mut matched = 0;
    let mut notes = Vec::new();
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(90_000 + seed);
        let n = rng.gen_range(1..=12);
        let dir = if seed % 2 == 0 {
            Directedness::Undirected
        } else {
            Directedness::Directed
        };
        let mut edges = Vec::new();
        for u in 0..n {
            for v in 0..n {
                let candidate = if dir == Directedness::Directed {
                    u != v
                } else {
                    u < v
                };
                if candidate && rng.gen_bool(0.35) {
                    let w = if seed % 3 == 0 {
                        rng.gen_range(1..=5) as f64
                    } else {
                        rng.gen_range(0.01..100.0)
                    };
                    edges.push(Edge::new(u, v, w));
                }
            }
        }
        let g = WeightedGraph::new(n, dir, edges).unwrap();
        let s = rng.gen_range(0..n);
        let tree = anonimos_core::sssp_canonical(&g, s, false).unwrap();
        let oracle = all_simple_paths_dist(&g, s);
        let ok = tree.dist.iter().zip(&oracle).all(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => (a - b).abs() <= 1e-9 * b.abs().max(1.0),
            (None, None) => true,
            _ => false,
        });
        if ok {
            matched += 1;
        } else {
            notes.push(format!("seed {seed}"));
        }
    }
    outcome(
        matched == 200,
        format!(
            "{matched}/200 graphs match brute force {}",
            notes.join("; ")
        ),
    )
}

fn main() {
    let dir = TempDir::new().expect("temp dir");
    let criteria: Vec<(&str, Check)> = vec![
        (
            "path preservation (SSSP)",
            Box::new(|| criterion_1(dir.path())),
        ),
        ("composability (APSP)", Box::new(|| criterion_2(dir.path()))),
        ("feasibility anchor", Box::new(criterion_3)),
        ("solver oracle", Box::new(criterion_4)),
        ("model reduction", Box::new(|| criterion_5(dir.path()))),
        ("ordering scrambled", Box::new(criterion_6)),
        ("cost preservation", Box::new(|| criterion_7(dir.path()))),
        ("determinism", Box::new(|| criterion_8(dir.path()))),
        ("LP round trip", Box::new(criterion_9)),
        ("shortest-path oracle", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<26} {} [{}] {}",
            i + 1,
            name,
            if result.pass { "PASS" } else { "FAIL" },
            secs(start.elapsed()),
            result.detail.trim_end()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
