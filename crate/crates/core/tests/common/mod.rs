#![allow(dead_code)]

use ctar::baselines::{FactorModel, Interaction};
use ctar::mgraph::{MGraph, NodeRole};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Random DAG on `n` nodes: a random permutation fixes the order, each
/// forward pair becomes an edge with probability `p`.
pub fn random_dag(n: usize, p: f64, rng: &mut impl Rng) -> (MGraph, Vec<(usize, usize)>) {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut b = MGraph::builder();
    for i in 0..n {
        b.add_node(&format!("v{i}"), NodeRole::FullyObserved);
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                let (a, c) = (perm[i], perm[j]);
                b.add_edge(&format!("v{a}"), &format!("v{c}"));
                edges.push((a, c));
            }
        }
    }
    (b.build().unwrap(), edges)
}

/// Brute-force d-separation: enumerate every simple undirected path between
/// `x` and `y` and check each one for blocking.
pub fn path_oracle(n: usize, edges: &[(usize, usize)], x: usize, y: usize, z: &[usize]) -> bool {
    let mut children = vec![Vec::new(); n];
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        children[a].push(b);
        adj[a].push(b);
        adj[b].push(a);
    }
    let is_edge = |a: usize, b: usize| children[a].contains(&b);
    let in_z = |v: usize| z.contains(&v);
    let descendants_hit_z = |v: usize| {
        let mut seen = vec![false; n];
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if in_z(u) {
                return true;
            }
            for &c in &children[u] {
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        false
    };
    let blocked = |path: &[usize]| {
        path.windows(3).any(|w| {
            let (a, m, b) = (w[0], w[1], w[2]);
            let collider = is_edge(a, m) && is_edge(b, m);
            if collider {
                !descendants_hit_z(m)
            } else {
                in_z(m)
            }
        })
    };

    let mut all_blocked = true;
    let mut path = vec![x];
    let mut on_path = vec![false; n];
    on_path[x] = true;
    fn dfs(
        v: usize,
        y: usize,
        adj: &[Vec<usize>],
        path: &mut Vec<usize>,
        on_path: &mut Vec<bool>,
        check: &mut dyn FnMut(&[usize]),
    ) {
        if v == y {
            check(path);
            return;
        }
        for &w in &adj[v] {
            if !on_path[w] {
                on_path[w] = true;
                path.push(w);
                dfs(w, y, adj, path, on_path, check);
                path.pop();
                on_path[w] = false;
            }
        }
    }
    dfs(x, y, &adj, &mut path, &mut on_path, &mut |p| {
        if !blocked(p) {
            all_blocked = false;
        }
    });
    all_blocked
}

/// Runs `graphs` random DAGs (2..=8 nodes) and compares every singleton
/// query with |z| ≤ 3. Returns (queries, disagreements).
pub fn dsep_sweep(graphs: usize, seed: u64) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut queries, mut bad) = (0, 0);
    for _ in 0..graphs {
        let n = rng.random_range(2..=8);
        let p = rng.random_range(0.1..0.6);
        let (g, edges) = random_dag(n, p, &mut rng);
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        for x in 0..n {
            for y in x + 1..n {
                let rest: Vec<usize> = (0..n).filter(|&v| v != x && v != y).collect();
                for mask in 0u32..(1 << rest.len()) {
                    if mask.count_ones() > 3 {
                        continue;
                    }
                    let z: Vec<usize> = rest
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, &v)| v)
                        .collect();
                    let zn: Vec<&str> = z.iter().map(|&v| names[v].as_str()).collect();
                    let fast = g.d_separated(&[&names[x]], &[&names[y]], &zn).unwrap();
                    let slow = path_oracle(n, &edges, x, y, &z);
                    queries += 1;
                    if fast != slow {
                        bad += 1;
                    }
                }
            }
        }
    }
    (queries, bad)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// ‖analytic − numeric‖ / max(‖analytic‖, ‖numeric‖), central differences.
pub fn gradient_error(model: &FactorModel, data: &[Interaction], reg: f64) -> f64 {
    let h = 1e-6;
    let analytic = model.gradient(data, reg);
    let p = model.params();
    let mut probe = model.clone();
    let numeric: Vec<f64> = (0..p.len())
        .map(|i| {
            let mut q = p.clone();
            q[i] = p[i] + h;
            probe.set_params(&q);
            let up = probe.objective(data, reg);
            q[i] = p[i] - h;
            probe.set_params(&q);
            let down = probe.objective(data, reg);
            (up - down) / (2.0 * h)
        })
        .collect();
    let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, n)| a - n).collect();
    norm(&diff) / norm(&analytic).max(norm(&numeric))
}

/// Share of (positive, negative) pairs ranked correctly, ties counting half.
pub fn pairwise_auc(scores: &[f64], labels: &[bool]) -> Option<f64> {
    let (mut good, mut pairs) = (0.0, 0.0);
    for (i, &li) in labels.iter().enumerate() {
        for (j, &lj) in labels.iter().enumerate() {
            if li && !lj {
                pairs += 1.0;
                good += if scores[i] > scores[j] {
                    1.0
                } else if scores[i] == scores[j] {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    (pairs > 0.0).then(|| good / pairs)
}

/// Random weighted interactions over `users` x `tags` ids.
pub fn random_interactions(n: usize, users: u32, tags: u32, rng: &mut impl Rng) -> Vec<Interaction> {
    (0..n)
        .map(|_| Interaction {
            weight: rng.random_range(0.2..3.0),
            ..Interaction::new(
                rng.random_range(0..users),
                rng.random_range(0..tags),
                rng.random_range(0..2),
            )
        })
        .collect()
}

/// Worst [`gradient_error`] over `points` random models and data sets.
pub fn gradient_sweep(points: u64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for point in 0..points {
        let data = random_interactions(30, 6, 7, &mut rng);
        let hyper = ctar::baselines::Hyper {
            dim: 3,
            seed: point,
            ..Default::default()
        };
        let mut model = FactorModel::for_data(&data, &hyper);
        let p: Vec<f64> = (0..model.params().len())
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                0.7 * z
            })
            .collect();
        model.set_params(&p);
        worst = worst.max(gradient_error(&model, &data, 0.05));
    }
    worst
}
