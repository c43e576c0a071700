//! Slow, independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use safe_diffusion::Tree;

pub type Q = BigRational;

pub fn q(a: i64, b: i64) -> Q {
    Q::new(BigInt::from(a), BigInt::from(b))
}

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

/// BFS distances; `blocked` vertices are never entered.
pub fn bfs(adj: &[Vec<usize>], s: usize, blocked: Option<usize>) -> Vec<Option<usize>> {
    let mut d = vec![None; adj.len()];
    d[s] = Some(0);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if d[v].is_none() && Some(v) != blocked {
                d[v] = Some(d[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    d
}

pub fn distance_matrix(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    (0..adj.len()).map(|s| bfs(adj, s, None).into_iter().map(Option::unwrap).collect()).collect()
}

/// Edge counts of every branch at `v`: delete `v` and measure the components.
pub fn branch_sizes(adj: &[Vec<usize>], v: usize) -> Vec<usize> {
    adj[v].iter().map(|&u| bfs(adj, u, Some(v)).iter().filter(|d| d.is_some()).count()).collect()
}

pub fn brute_weights(adj: &[Vec<usize>]) -> Vec<usize> {
    (0..adj.len()).map(|v| branch_sizes(adj, v).into_iter().max().unwrap_or(0)).collect()
}

pub fn brute_centroid(adj: &[Vec<usize>]) -> Vec<usize> {
    let w = brute_weights(adj);
    let min = *w.iter().min().unwrap();
    (0..adj.len()).filter(|&v| w[v] == min).collect()
}

/// `A[i][j]` counted straight from the distance matrix.
pub fn brute_matrix(adj: &[Vec<usize>]) -> Vec<Vec<u32>> {
    let d = distance_matrix(adj);
    let n = adj.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).filter(|&v| d[i][v] < d[j][v]).count() as u32).collect()).collect()
}

pub fn prufer_tree(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    if n == 1 {
        return vec![];
    }
    if n == 2 {
        return vec![(0, 1)];
    }
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = *leaves.iter().next().unwrap();
        leaves.remove(&leaf);
        edges.push((leaf, s));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.insert(s);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Uniform labeled trees on `lo..=hi` vertices.
pub fn arb_tree(lo: usize, hi: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (lo..=hi).prop_flat_map(|n| {
        proptest::collection::vec(0..n, n.saturating_sub(2)).prop_map(move |seq| (n, prufer_tree(n, &seq)))
    })
}

pub fn build(n: usize, edges: &[(usize, usize)]) -> Tree {
    Tree::from_edges(n, edges).unwrap()
}

/// Canonical string of a tree rooted at `r` (sorted child encodings).
fn rooted_code(adj: &[Vec<usize>], r: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[r].iter().filter(|&&c| c != parent).map(|&c| rooted_code(adj, c, r)).collect();
    kids.sort();
    format!("({})", kids.concat())
}

fn canonical(adj: &[Vec<usize>]) -> String {
    brute_centroid(adj).into_iter().map(|c| rooted_code(adj, c, usize::MAX)).min().unwrap()
}

/// One representative of every unlabeled tree on `n` vertices.
pub fn all_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    let mut level: Vec<Vec<(usize, usize)>> = vec![vec![]];
    for size in 2..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for edges in &level {
            for v in 0..size - 1 {
                let mut e = edges.clone();
                e.push((v, size - 1));
                if seen.insert(canonical(&adjacency(size, &e))) {
                    next.push(e);
                }
            }
        }
        level = next;
    }
    level
}
