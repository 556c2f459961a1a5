//! Mixed directed/undirected graph and the global structural metrics.
//!
//! A [`MixedGraph`] holds a symmetric set of omnidirectional edges plus a set
//! of directed beam edges over the same node set. A directed traversal step
//! from `u` to `v` exists iff `(u,v)` is an omni edge (traversable both ways)
//! or `u -> v` is a beam edge. Undirected metrics (clustering coefficient,
//! weak components) use the underlying undirected graph in which any edge in
//! either direction counts as a link.
//!
//! Graphs are immutable for metric purposes: all metric methods take `&self`
//! and are safe to run concurrently on a shared graph.

use std::collections::VecDeque;
use std::io::{self, Write};

use thiserror::Error;

/// Sentinel hop count for unreachable nodes.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {0} is out of range")]
    InvalidNode(usize),
    #[error("average path length needs at least two nodes")]
    TooFewNodes,
    #[error("no ordered node pair is connected by a directed path")]
    NoReachablePairs,
}

/// Mean hop count over ordered reachable pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLength {
    pub mean_hops: f64,
    pub reachable_pairs: u64,
}

#[derive(Debug, Clone, Default)]
pub struct MixedGraph {
    omni: Vec<Vec<usize>>,
    beam_out: Vec<Vec<usize>>,
    beam_in: Vec<Vec<usize>>,
    positions: Option<Vec<(f64, f64)>>,
}

fn insert_sorted(list: &mut Vec<usize>, v: usize) {
    if let Err(pos) = list.binary_search(&v) {
        list.insert(pos, v);
    }
}

fn remove_sorted(list: &mut Vec<usize>, v: usize) {
    if let Ok(pos) = list.binary_search(&v) {
        list.remove(pos);
    }
}

impl MixedGraph {
    pub fn new(node_count: usize) -> Self {
        Self {
            omni: vec![Vec::new(); node_count],
            beam_out: vec![Vec::new(); node_count],
            beam_in: vec![Vec::new(); node_count],
            positions: None,
        }
    }

    /// Graph whose nodes carry 2-D positions (meters); needed by beamforming.
    pub fn with_positions(positions: Vec<(f64, f64)>) -> Self {
        let mut g = Self::new(positions.len());
        g.positions = Some(positions);
        g
    }

    pub fn node_count(&self) -> usize {
        self.omni.len()
    }

    pub fn positions(&self) -> Option<&[(f64, f64)]> {
        self.positions.as_deref()
    }

    fn check_node(&self, v: usize) -> Result<(), GraphError> {
        if v < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::InvalidNode(v))
        }
    }

    /// Add a symmetric omni edge. Self-loops are rejected; duplicates ignored.
    pub fn add_omni_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "omni edges are irreflexive");
        assert!(u < self.node_count() && v < self.node_count());
        insert_sorted(&mut self.omni[u], v);
        insert_sorted(&mut self.omni[v], u);
    }

    /// Add a directed beam edge `u -> v`. Self-loops rejected; duplicates ignored.
    pub fn add_beam_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "beam edges are irreflexive");
        assert!(u < self.node_count() && v < self.node_count());
        insert_sorted(&mut self.beam_out[u], v);
        insert_sorted(&mut self.beam_in[v], u);
    }

    pub fn remove_omni_edge(&mut self, u: usize, v: usize) {
        remove_sorted(&mut self.omni[u], v);
        remove_sorted(&mut self.omni[v], u);
    }

    pub fn remove_beam_edge(&mut self, u: usize, v: usize) {
        remove_sorted(&mut self.beam_out[u], v);
        remove_sorted(&mut self.beam_in[v], u);
    }

    pub fn omni_neighbors(&self, u: usize) -> &[usize] {
        &self.omni[u]
    }

    pub fn beam_out_neighbors(&self, u: usize) -> &[usize] {
        &self.beam_out[u]
    }

    pub fn beam_in_neighbors(&self, u: usize) -> &[usize] {
        &self.beam_in[u]
    }

    pub fn has_omni_edge(&self, u: usize, v: usize) -> bool {
        self.omni[u].binary_search(&v).is_ok()
    }

    pub fn has_beam_edge(&self, u: usize, v: usize) -> bool {
        self.beam_out[u].binary_search(&v).is_ok()
    }

    /// True iff a directed traversal step `u -> v` exists.
    pub fn has_step(&self, u: usize, v: usize) -> bool {
        self.has_omni_edge(u, v) || self.has_beam_edge(u, v)
    }

    /// Out-neighbors under directed traversal, deduplicated.
    ///
    /// Omni and beam lists are each sorted, so this is a sorted merge; a pair
    /// carrying both an omni edge and a beam edge yields one traversal step.
    pub fn out_neighbors(&self, u: usize) -> MergedNeighbors<'_> {
        MergedNeighbors {
            a: &self.omni[u],
            b: &self.beam_out[u],
            ia: 0,
            ib: 0,
        }
    }

    fn in_neighbors(&self, u: usize) -> MergedNeighbors<'_> {
        MergedNeighbors {
            a: &self.omni[u],
            b: &self.beam_in[u],
            ia: 0,
            ib: 0,
        }
    }

    /// Neighbors in the underlying undirected graph, sorted and deduplicated.
    pub fn undirected_neighbors(&self, u: usize) -> Vec<usize> {
        let mut nbrs: Vec<usize> = self.omni[u]
            .iter()
            .chain(self.beam_out[u].iter())
            .chain(self.beam_in[u].iter())
            .copied()
            .collect();
        nbrs.sort_unstable();
        nbrs.dedup();
        nbrs
    }

    pub fn omni_edge_count(&self) -> usize {
        self.omni.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn beam_edge_count(&self) -> usize {
        self.beam_out.iter().map(Vec::len).sum()
    }

    /// Breadth-first hop counts from `source`, respecting edge directionality.
    pub fn shortest_hops(&self, source: usize) -> Result<Vec<u32>, GraphError> {
        self.check_node(source)?;
        Ok(self.bfs_bounded(source, UNREACHABLE))
    }

    /// Hop counts from `source` truncated at `max_depth`; deeper nodes stay
    /// at the [`UNREACHABLE`] sentinel.
    pub fn bfs_bounded(&self, source: usize, max_depth: u32) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.node_count()];
        dist[source] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            if dist[v] >= max_depth {
                continue;
            }
            for w in self.out_neighbors(v) {
                if dist[w] == UNREACHABLE {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Mean hop count over all ordered pairs `u != v` joined by a directed
    /// path; unreachable pairs are excluded from numerator and denominator.
    pub fn average_path_length(&self) -> Result<PathLength, GraphError> {
        let n = self.node_count();
        if n < 2 {
            return Err(GraphError::TooFewNodes);
        }
        let mut total: u64 = 0;
        let mut pairs: u64 = 0;
        for s in 0..n {
            for (&d, t) in self.bfs_bounded(s, UNREACHABLE).iter().zip(0..n) {
                if t != s && d != UNREACHABLE {
                    total += u64::from(d);
                    pairs += 1;
                }
            }
        }
        if pairs == 0 {
            return Err(GraphError::NoReachablePairs);
        }
        Ok(PathLength {
            mean_hops: total as f64 / pairs as f64,
            reachable_pairs: pairs,
        })
    }

    /// Network clustering coefficient on the underlying undirected graph.
    ///
    /// Per-node value is (links among neighbors) / (k(k-1)/2); nodes with
    /// fewer than two neighbors contribute 0; the network value is the mean
    /// over all nodes.
    pub fn clustering_coefficient(&self) -> f64 {
        let n = self.node_count();
        if n == 0 {
            return 0.0;
        }
        let adj: Vec<Vec<usize>> = (0..n).map(|v| self.undirected_neighbors(v)).collect();
        let mut sum = 0.0;
        for nbrs in &adj {
            let k = nbrs.len();
            if k < 2 {
                continue;
            }
            let mut links = 0usize;
            for (i, &a) in nbrs.iter().enumerate() {
                for &b in &nbrs[i + 1..] {
                    if adj[a].binary_search(&b).is_ok() {
                        links += 1;
                    }
                }
            }
            sum += 2.0 * links as f64 / (k * (k - 1)) as f64;
        }
        sum / n as f64
    }

    /// Connected components of the underlying undirected graph, each sorted,
    /// ordered by smallest member id.
    pub fn weak_components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for w in self.undirected_neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut state = TarjanState {
            index: 0,
            stack: Vec::new(),
            on_stack: vec![false; n],
            idx: vec![None; n],
            low: vec![0; n],
            comps: Vec::new(),
        };
        for v in 0..n {
            if state.idx[v].is_none() {
                self.strongconnect(v, &mut state);
            }
        }
        state.comps
    }

    fn strongconnect(&self, v: usize, state: &mut TarjanState) {
        state.idx[v] = Some(state.index);
        state.low[v] = state.index;
        state.index += 1;
        state.stack.push(v);
        state.on_stack[v] = true;

        for w in self.out_neighbors(v) {
            if state.idx[w].is_none() {
                self.strongconnect(w, state);
                state.low[v] = state.low[v].min(state.low[w]);
            } else if state.on_stack[w] {
                state.low[v] = state.low[v].min(state.idx[w].unwrap());
            }
        }

        // Root of an SCC
        if state.low[v] == state.idx[v].unwrap() {
            let mut comp = Vec::new();
            loop {
                let w = state.stack.pop().expect("stack underflow");
                state.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            state.comps.push(comp);
        }
    }

    /// Largest strongly connected component under directed traversal; ties
    /// broken by smallest minimum node id. Sorted.
    pub fn gscc(&self) -> Vec<usize> {
        let mut best: Vec<usize> = Vec::new();
        for comp in self.strongly_connected_components() {
            if comp.len() > best.len() || (comp.len() == best.len() && comp[0] < best[0]) {
                best = comp;
            }
        }
        best
    }

    /// Nodes with a directed path to at least one GSCC member, including the
    /// GSCC itself. Sorted.
    pub fn gin(&self) -> Vec<usize> {
        let gscc = self.gscc();
        let mut member = vec![false; self.node_count()];
        let mut queue = VecDeque::new();
        for &v in &gscc {
            member[v] = true;
            queue.push_back(v);
        }
        // Walk reversed edges from the GSCC: in-neighbors can reach it.
        while let Some(v) = queue.pop_front() {
            for w in self.in_neighbors(v) {
                if !member[w] {
                    member[w] = true;
                    queue.push_back(w);
                }
            }
        }
        (0..self.node_count()).filter(|&v| member[v]).collect()
    }

    /// Subgraph induced by `nodes` (sorted, deduplicated internally), with
    /// ids relabeled to `0..nodes.len()` in ascending original order.
    /// Returns the subgraph and the original id of each new node.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> (MixedGraph, Vec<usize>) {
        let mut ids: Vec<usize> = nodes.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let mut local = vec![usize::MAX; self.node_count()];
        for (i, &v) in ids.iter().enumerate() {
            local[v] = i;
        }
        let mut g = match &self.positions {
            Some(pos) => MixedGraph::with_positions(ids.iter().map(|&v| pos[v]).collect()),
            None => MixedGraph::new(ids.len()),
        };
        for &v in &ids {
            for &w in &self.omni[v] {
                if v < w && local[w] != usize::MAX {
                    g.add_omni_edge(local[v], local[w]);
                }
            }
            for &w in &self.beam_out[v] {
                if local[w] != usize::MAX {
                    g.add_beam_edge(local[v], local[w]);
                }
            }
        }
        (g, ids)
    }

    /// Edge-list text: `N <node_count>` header, then `O u v` lines for omni
    /// edges (u < v) and `B u v` lines for beam edges, both sorted.
    pub fn write_edge_list<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "N {}", self.node_count())?;
        for u in 0..self.node_count() {
            for &v in &self.omni[u] {
                if u < v {
                    writeln!(out, "O {u} {v}")?;
                }
            }
        }
        for u in 0..self.node_count() {
            for &v in &self.beam_out[u] {
                writeln!(out, "B {u} {v}")?;
            }
        }
        Ok(())
    }
}

struct TarjanState {
    index: usize,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    idx: Vec<Option<usize>>,
    low: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

/// Sorted merge over omni and beam neighbor lists.
pub struct MergedNeighbors<'a> {
    a: &'a [usize],
    b: &'a [usize],
    ia: usize,
    ib: usize,
}

impl Iterator for MergedNeighbors<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        match (self.a.get(self.ia), self.b.get(self.ib)) {
            (Some(&x), Some(&y)) => {
                if x < y {
                    self.ia += 1;
                    Some(x)
                } else if y < x {
                    self.ib += 1;
                    Some(y)
                } else {
                    self.ia += 1;
                    self.ib += 1;
                    Some(x)
                }
            }
            (Some(&x), None) => {
                self.ia += 1;
                Some(x)
            }
            (None, Some(&y)) => {
                self.ib += 1;
                Some(y)
            }
            (None, None) => None,
        }
    }
}
