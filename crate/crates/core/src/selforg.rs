//! Round-synchronous self-organization: lateral-inhibition region formation,
//! virtual-coordinate centroid consensus and election, and bounded centroid
//! broadcast.
//!
//! The engine simulates the distributed protocol with synchronous rounds and
//! simultaneous update: each node's round-t state is a function only of its
//! own round-(t-1) state and its direct neighbors' round-(t-1) messages.
//! With the deterministic tie-break the whole stage is a pure function of
//! `(graph, gradient, seed)`.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::centrality::egocentric_betweenness;
use crate::graph::{MixedGraph, UNREACHABLE};
use crate::seeding::{self, DOM_TIEBREAK, DOM_VCOORD};

/// Role a node ends up with after election and peripheral identification.
///
/// An isolated node is both a centroid and a peripheral; the single `role`
/// field keeps the centroid label in that case, while membership in the
/// peripheral set is tracked separately by the beamforming stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Centroid,
    Peripheral,
    Standard,
}

impl Role {
    fn as_str(self) -> &'static str {
        match self {
            Role::Centroid => "centroid",
            Role::Peripheral => "peripheral",
            Role::Standard => "standard",
        }
    }
}

/// Per-node protocol state after region formation.
///
/// `head` starts as the inhibition winner and is rewritten to the region
/// centroid by [`broadcast_centroids`]; `hop_to_head` tracks the hop count to
/// whichever head is current. `hop_to_head == 0` iff the node is its own head.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionState {
    gradient: u32,
    head: Vec<usize>,
    hop_to_head: Vec<u32>,
    head_degree: Vec<usize>,
    role: Vec<Role>,
}

impl RegionState {
    /// Assemble a state from raw per-node columns (all roles standard).
    pub fn from_parts(gradient: u32, head: Vec<usize>, hop_to_head: Vec<u32>, head_degree: Vec<usize>) -> Self {
        assert_eq!(head.len(), hop_to_head.len());
        assert_eq!(head.len(), head_degree.len());
        let n = head.len();
        Self {
            gradient,
            head,
            hop_to_head,
            head_degree,
            role: vec![Role::Standard; n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.head.len()
    }

    pub fn gradient(&self) -> u32 {
        self.gradient
    }

    pub fn head_of(&self, v: usize) -> usize {
        self.head[v]
    }

    pub fn hop_of(&self, v: usize) -> u32 {
        self.hop_to_head[v]
    }

    pub fn head_degree_of(&self, v: usize) -> usize {
        self.head_degree[v]
    }

    pub fn role_of(&self, v: usize) -> Role {
        self.role[v]
    }

    pub fn set_role(&mut self, v: usize, role: Role) {
        self.role[v] = role;
    }

    /// Nodes that are their own head, sorted.
    pub fn heads(&self) -> Vec<usize> {
        (0..self.node_count()).filter(|&v| self.head[v] == v).collect()
    }

    /// CSV with header `id,head,hop,role`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "id,head,hop,role")?;
        for v in 0..self.node_count() {
            writeln!(
                out,
                "{v},{},{},{}",
                self.head[v],
                self.hop_to_head[v],
                self.role[v].as_str()
            )?;
        }
        Ok(())
    }
}

/// Knobs for the inhibition engine; defaults reproduce the reference rules.
#[derive(Debug, Clone, Copy, Default)]
pub struct InhibitionOptions {
    /// Adopt only records arriving with hop+1 strictly below the gradient
    /// instead of hop+1 <= gradient (sensitivity-analysis variant).
    pub strict_guard: bool,
    /// Replace the lowest-id tie-break by a seeded random permutation of the
    /// ids. Still a consistent total order, so head spacing is preserved.
    pub random_tie_break: bool,
}

/// One `round,node,head,hop,head_degree` line of the protocol trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRow {
    pub round: u32,
    pub node: usize,
    pub head: usize,
    pub hop: u32,
    pub head_degree: usize,
}

pub fn write_trace<W: Write>(rows: &[TraceRow], out: &mut W) -> io::Result<()> {
    writeln!(out, "round,node,head,hop,head_degree")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.round, r.node, r.head, r.hop, r.head_degree)?;
    }
    Ok(())
}

/// Lateral-inhibition region formation with the default options.
pub fn lateral_inhibition(g_omni: &MixedGraph, gradient: u32, seed: u64) -> RegionState {
    lateral_inhibition_with(g_omni, gradient, seed, &InhibitionOptions::default(), None)
}

/// Lateral-inhibition region formation.
///
/// Every node starts as its own head (hop 0, own degree) and broadcasts its
/// record each round. A node adopts a received record, with hop incremented
/// on arrival, when the record's head beats its stored head — higher degree
/// first, lower id (or permuted id in the random mode) on equal degree — or
/// shortens the hop to the already-stored head, and only while the arrival
/// hop respects the gradient guard. Rounds repeat to a fixed point; nodes
/// that never adopt remain heads, so an isolated node ends up a singleton
/// head. Comparing head identity independently of hop keeps surviving heads
/// more than `gradient` hops apart within a component.
pub fn lateral_inhibition_with(
    g_omni: &MixedGraph,
    gradient: u32,
    seed: u64,
    opts: &InhibitionOptions,
    mut trace: Option<&mut Vec<TraceRow>>,
) -> RegionState {
    assert!(gradient >= 1, "gradient must be at least 1");
    let n = g_omni.node_count();
    let degree: Vec<usize> = (0..n).map(|v| g_omni.omni_neighbors(v).len()).collect();

    // Tie-break rank: lower wins. The random mode draws a permutation so the
    // order stays consistent across nodes.
    let rank: Vec<u64> = if opts.random_tie_break {
        let mut ids: Vec<usize> = (0..n).collect();
        ids.shuffle(&mut seeding::domain_rng(seed, DOM_TIEBREAK));
        let mut rank = vec![0u64; n];
        for (pos, &v) in ids.iter().enumerate() {
            rank[v] = pos as u64;
        }
        rank
    } else {
        (0..n as u64).collect()
    };

    // (head, hop, head_degree) per node.
    let mut state: Vec<(usize, u32, usize)> = (0..n).map(|v| (v, 0, degree[v])).collect();
    let better = |cand: (usize, u32, usize), cur: (usize, u32, usize)| -> bool {
        cand.2 > cur.2
            || (cand.2 == cur.2 && rank[cand.0] < rank[cur.0])
            || (cand.2 == cur.2 && cand.0 == cur.0 && cand.1 < cur.1)
    };

    if let Some(t) = trace.as_deref_mut() {
        for (v, &(head, hop, head_degree)) in state.iter().enumerate() {
            t.push(TraceRow { round: 0, node: v, head, hop, head_degree });
        }
    }

    let mut round = 0u32;
    loop {
        round += 1;
        let mut next = state.clone();
        let mut changed = false;
        for v in 0..n {
            for &w in g_omni.omni_neighbors(v) {
                let (head, hop, head_degree) = state[w];
                let arrival = hop + 1;
                let within = if opts.strict_guard { arrival < gradient } else { arrival <= gradient };
                if !within {
                    continue;
                }
                let cand = (head, arrival, head_degree);
                if better(cand, next[v]) {
                    next[v] = cand;
                    changed = true;
                }
            }
        }
        state = next;
        if let Some(t) = trace.as_deref_mut() {
            for (v, &(head, hop, head_degree)) in state.iter().enumerate() {
                t.push(TraceRow { round, node: v, head, hop, head_degree });
            }
        }
        if !changed {
            break;
        }
    }

    RegionState {
        gradient,
        head: state.iter().map(|s| s.0).collect(),
        hop_to_head: state.iter().map(|s| s.1).collect(),
        head_degree: state.iter().map(|s| s.2).collect(),
        role: vec![Role::Standard; n],
    }
}

/// Partition of the node set by head id; regions ordered by head id, members
/// sorted. Every node lies in exactly one region.
pub fn regions(rs: &RegionState) -> Vec<Vec<usize>> {
    let mut by_head: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..rs.node_count() {
        by_head.entry(rs.head[v]).or_default().push(v);
    }
    by_head.into_values().collect()
}

/// Virtual-coordinate consensus state of one region.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusState {
    members: Vec<usize>,
    initial: Vec<(f64, f64)>,
    estimate: Vec<(f64, f64)>,
    converged: bool,
    rounds: u32,
}

impl ConsensusState {
    /// Assemble a state directly from per-member columns (test support and
    /// external replays).
    pub fn from_parts(
        members: Vec<usize>,
        initial: Vec<(f64, f64)>,
        estimate: Vec<(f64, f64)>,
        converged: bool,
        rounds: u32,
    ) -> Self {
        assert_eq!(members.len(), initial.len());
        assert_eq!(members.len(), estimate.len());
        assert!(members.windows(2).all(|w| w[0] < w[1]), "members must be sorted");
        Self { members, initial, estimate, converged, rounds }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    fn index_of(&self, node: usize) -> usize {
        self.members.binary_search(&node).expect("node not in region")
    }

    /// Initially drawn virtual coordinates of a member.
    pub fn initial_of(&self, node: usize) -> (f64, f64) {
        self.initial[self.index_of(node)]
    }

    /// Current averaged coordinates of a member.
    pub fn estimate_of(&self, node: usize) -> (f64, f64) {
        self.estimate[self.index_of(node)]
    }
}

/// Iterative neighborhood averaging of randomly drawn virtual coordinates.
///
/// Each member draws its initial coordinates uniformly from `[0,1)^2` (per
/// node stream, so the draw is independent of region iteration order). Every
/// round all members simultaneously replace their estimate by the arithmetic
/// mean of their own and their region-internal neighbors' estimates, until
/// the largest per-round change is at most `tol` or `max_rounds` is reached;
/// `converged` reports which. On a connected region the estimates settle on
/// the (degree+1)-weighted mean of the initial coordinates.
pub fn centroid_consensus(
    region: &[usize],
    g_omni: &MixedGraph,
    seed: u64,
    tol: f64,
    max_rounds: u32,
) -> ConsensusState {
    assert!(!region.is_empty(), "region must be non-empty");
    let mut members: Vec<usize> = region.to_vec();
    members.sort_unstable();
    members.dedup();

    let mut local = vec![usize::MAX; g_omni.node_count()];
    for (i, &v) in members.iter().enumerate() {
        local[v] = i;
    }
    // Region-internal neighbor lists, in local indices.
    let nbrs: Vec<Vec<usize>> = members
        .iter()
        .map(|&v| {
            g_omni
                .omni_neighbors(v)
                .iter()
                .filter(|&&w| local[w] != usize::MAX)
                .map(|&w| local[w])
                .collect()
        })
        .collect();

    let initial: Vec<(f64, f64)> = members
        .iter()
        .map(|&v| {
            let mut rng = seeding::node_rng(seed, DOM_VCOORD, v);
            (rng.gen::<f64>(), rng.gen::<f64>())
        })
        .collect();

    let mut estimate = initial.clone();
    let mut converged = false;
    let mut rounds = 0;
    for round in 0..max_rounds {
        let mut delta: f64 = 0.0;
        let next: Vec<(f64, f64)> = estimate
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| {
                let (mut sx, mut sy) = (x, y);
                for &j in &nbrs[i] {
                    sx += estimate[j].0;
                    sy += estimate[j].1;
                }
                let m = (nbrs[i].len() + 1) as f64;
                (sx / m, sy / m)
            })
            .collect();
        for (a, b) in next.iter().zip(estimate.iter()) {
            delta = delta.max((a.0 - b.0).abs()).max((a.1 - b.1).abs());
        }
        estimate = next;
        if delta <= tol {
            converged = true;
            rounds = round;
            break;
        }
        rounds = round + 1;
    }
    if members.len() == 1 {
        converged = true;
    }

    ConsensusState { members, initial, estimate, converged, rounds }
}

/// Pick the region's centroid from the consensus outcome.
///
/// Candidates are the members whose initial coordinates fall within `eps`
/// (per axis) of their own averaged estimate; the winner maximizes degree
/// plus egocentric betweenness within the region subgraph, lower id on ties.
/// An empty candidate box falls back to the member whose initial coordinates
/// are nearest (Euclidean) to its estimate.
pub fn elect_centroid(region: &[usize], cs: &ConsensusState, eps: f64, g_omni: &MixedGraph) -> usize {
    let mut members: Vec<usize> = region.to_vec();
    members.sort_unstable();
    members.dedup();
    assert!(!members.is_empty(), "region must be non-empty");
    if members.len() == 1 {
        return members[0];
    }

    let candidates: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&v| {
            let (x, y) = cs.initial_of(v);
            let (ex, ey) = cs.estimate_of(v);
            (x - ex).abs() <= eps && (y - ey).abs() <= eps
        })
        .collect();

    if candidates.is_empty() {
        let mut best = members[0];
        let mut best_d2 = f64::INFINITY;
        for &v in &members {
            let (x, y) = cs.initial_of(v);
            let (ex, ey) = cs.estimate_of(v);
            let d2 = (x - ex).powi(2) + (y - ey).powi(2);
            if d2 < best_d2 {
                best_d2 = d2;
                best = v;
            }
        }
        return best;
    }

    let (sub, ids) = g_omni.induced_subgraph(&members);
    let mut best = candidates[0];
    let mut best_score = f64::NEG_INFINITY;
    for &v in &candidates {
        let local = ids.binary_search(&v).unwrap();
        let score = g_omni.omni_neighbors(v).len() as f64 + egocentric_betweenness(&sub, local);
        if score > best_score {
            best_score = score;
            best = v;
        }
    }
    best
}

/// Per-node table of centroids within `g_max` hops.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidTable {
    g_max: u32,
    centroids: Vec<usize>,
    entries: Vec<Vec<(usize, u32)>>,
}

impl CentroidTable {
    /// Assemble a table from raw rows (test support). Rows must be sorted by
    /// centroid id.
    pub fn from_parts(g_max: u32, centroids: Vec<usize>, entries: Vec<Vec<(usize, u32)>>) -> Self {
        Self { g_max, centroids, entries }
    }

    pub fn g_max(&self) -> u32 {
        self.g_max
    }

    /// All centroid ids, sorted.
    pub fn centroids(&self) -> &[usize] {
        &self.centroids
    }

    /// `(centroid, hops)` rows for one node, sorted by centroid id.
    pub fn entries(&self, node: usize) -> &[(usize, u32)] {
        &self.entries[node]
    }

    pub fn hop_to(&self, node: usize, centroid: usize) -> Option<u32> {
        self.entries[node]
            .binary_search_by_key(&centroid, |e| e.0)
            .ok()
            .map(|i| self.entries[node][i].1)
    }
}

/// Bounded centroid broadcast: fills each node's centroid table with the
/// centroids at most `g_max` omni hops away, and rewrites the region state so
/// that `head` becomes the region's centroid and `hop_to_head` the omni hop
/// count to it.
pub fn broadcast_centroids(
    g_omni: &MixedGraph,
    rs: &mut RegionState,
    centroids: &[usize],
    g_max: u32,
) -> CentroidTable {
    assert!(g_max > rs.gradient(), "g_max must exceed the gradient");
    let n = g_omni.node_count();
    let mut sorted: Vec<usize> = centroids.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    // Which centroid serves which current head.
    let mut centroid_of_head: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in &sorted {
        centroid_of_head.insert(rs.head_of(c), c);
    }

    let mut entries: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
    let mut new_hop = rs.hop_to_head.clone();
    let mut new_head = rs.head.clone();
    for &c in &sorted {
        let dist = g_omni.bfs_bounded(c, UNREACHABLE);
        for v in 0..n {
            if dist[v] != UNREACHABLE && dist[v] <= g_max {
                entries[v].push((c, dist[v]));
            }
            if centroid_of_head.get(&rs.head[v]) == Some(&c) {
                new_head[v] = c;
                new_hop[v] = dist[v];
            }
        }
        rs.role[c] = Role::Centroid;
    }
    rs.head = new_head;
    rs.hop_to_head = new_hop;

    CentroidTable { g_max, centroids: sorted, entries }
}
