//! Closeness, socio-centric betweenness and egocentric betweenness.
//!
//! Betweenness sums over ordered source-target pairs and excludes endpoints;
//! values are left unnormalized since only ranks are consumed downstream.
//! The egocentric measure works on the undirected projection, following the
//! symmetric-adjacency formulation it approximates socio-centric betweenness
//! with.

use std::collections::VecDeque;
use std::io::{self, Write};

use crate::graph::MixedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentralityKind {
    Closeness,
    Sociocentric,
    Egocentric,
}

/// Per-node scores; entries outside the computed scope are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityScores {
    kind: CentralityKind,
    values: Vec<f64>,
}

impl CentralityScores {
    pub fn kind(&self) -> CentralityKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, node: usize) -> f64 {
        self.values[node]
    }

    /// Node with the maximum score, lowest id on ties.
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (v, &s) in self.values.iter().enumerate() {
            match best {
                Some(b) if self.values[b] >= s => {}
                _ => best = Some(v),
            }
        }
        best
    }

    /// CSV with header `id,value`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "id,value")?;
        for (id, v) in self.values.iter().enumerate() {
            writeln!(out, "{id},{v}")?;
        }
        Ok(())
    }
}

/// Closeness within the subgraph induced by `scope`: for each scope node,
/// the reciprocal of the sum of hop distances to all other scope nodes, or
/// zero if any of them is unreachable. Fewer than two scope nodes yield
/// all-zero scores.
pub fn closeness(g: &MixedGraph, scope: &[usize]) -> CentralityScores {
    let n = g.node_count();
    let mut member = vec![false; n];
    for &v in scope {
        assert!(v < n, "scope node {v} out of range");
        member[v] = true;
    }
    let scope_size = member.iter().filter(|&&m| m).count();
    let mut values = vec![0.0; n];
    if scope_size >= 2 {
        for v in 0..n {
            if !member[v] {
                continue;
            }
            // BFS restricted to scope members.
            let mut dist = vec![u32::MAX; n];
            dist[v] = 0;
            let mut queue = VecDeque::from([v]);
            let mut sum: u64 = 0;
            let mut reached = 1usize;
            while let Some(u) = queue.pop_front() {
                for w in g.out_neighbors(u) {
                    if member[w] && dist[w] == u32::MAX {
                        dist[w] = dist[u] + 1;
                        sum += u64::from(dist[w]);
                        reached += 1;
                        queue.push_back(w);
                    }
                }
            }
            if reached == scope_size {
                values[v] = 1.0 / sum as f64;
            }
        }
    }
    CentralityScores {
        kind: CentralityKind::Closeness,
        values,
    }
}

/// Socio-centric betweenness on the directed traversal relation (Brandes):
/// for each node, the sum over ordered pairs `(s,t)` with `s != t != v` of
/// the fraction of shortest `s -> t` paths passing through `v`.
pub fn sociocentric_betweenness(g: &MixedGraph) -> CentralityScores {
    let n = g.node_count();
    let mut values = vec![0.0; n];
    for s in 0..n {
        let mut stack: Vec<usize> = Vec::new();
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist: Vec<i64> = vec![-1; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for w in g.out_neighbors(v) {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    pred[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0f64; n];
        while let Some(w) = stack.pop() {
            for &v in &pred[w] {
                delta[v] += (sigma[v] / sigma[w]) * (1.0 + delta[w]);
            }
            if w != s {
                values[w] += delta[w];
            }
        }
    }
    CentralityScores {
        kind: CentralityKind::Sociocentric,
        values,
    }
}

/// Egocentric betweenness of `v`: in the undirected ego network of `v` (the
/// node plus its neighbors with all induced edges, adjacency matrix `A`),
/// the sum over unordered non-adjacent pairs of `1 / (A^2)[i,j]` restricted
/// to entries with a two-path. Isolated nodes score zero.
pub fn egocentric_betweenness(g: &MixedGraph, v: usize) -> f64 {
    assert!(v < g.node_count(), "node {v} out of range");
    let mut ego: Vec<usize> = g.undirected_neighbors(v);
    ego.push(v);
    ego.sort_unstable();
    let k = ego.len();
    if k < 3 {
        return 0.0;
    }
    let mut adj = vec![vec![false; k]; k];
    for (i, &a) in ego.iter().enumerate() {
        let nbrs = g.undirected_neighbors(a);
        for (j, &b) in ego.iter().enumerate().skip(i + 1) {
            if nbrs.binary_search(&b).is_ok() {
                adj[i][j] = true;
                adj[j][i] = true;
            }
        }
    }
    let mut sum = 0.0;
    for i in 0..k {
        for j in i + 1..k {
            if adj[i][j] {
                continue;
            }
            // (A^2)[i,j] counts the two-paths i - m - j inside the ego net.
            let two_paths = (0..k).filter(|&m| adj[i][m] && adj[m][j]).count();
            if two_paths > 0 {
                sum += 1.0 / two_paths as f64;
            }
        }
    }
    sum
}
