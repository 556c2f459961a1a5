//! Brute-force oracles and instance generators shared by the integration
//! suites. Everything here recomputes results from the raw traversal
//! relation (`has_step`), independent of the library's BFS/Brandes/Tarjan
//! code paths.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use swbeam::graph::MixedGraph;

pub const INF: u32 = u32::MAX;

/// All-pairs hop counts by Floyd-Warshall over the directed step relation.
pub fn floyd_warshall(g: &MixedGraph) -> Vec<Vec<u32>> {
    let n = g.node_count();
    let mut dist = vec![vec![INF; n]; n];
    for u in 0..n {
        dist[u][u] = 0;
        for v in 0..n {
            if u != v && g.has_step(u, v) {
                dist[u][v] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if dist[i][k] == INF {
                continue;
            }
            for j in 0..n {
                if dist[k][j] == INF {
                    continue;
                }
                let through = dist[i][k] + dist[k][j];
                if through < dist[i][j] {
                    dist[i][j] = through;
                }
            }
        }
    }
    dist
}

/// Mean hops over ordered reachable pairs plus the pair count; `None` when
/// no pair is reachable.
pub fn apl_oracle(g: &MixedGraph) -> Option<(f64, u64)> {
    let dist = floyd_warshall(g);
    let mut total = 0u64;
    let mut pairs = 0u64;
    for (i, row) in dist.iter().enumerate() {
        for (j, &d) in row.iter().enumerate() {
            if i != j && d != INF {
                total += u64::from(d);
                pairs += 1;
            }
        }
    }
    (pairs > 0).then(|| (total as f64 / pairs as f64, pairs))
}

fn undirected_adj(g: &MixedGraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut adj = vec![vec![false; n]; n];
    for u in 0..n {
        for v in 0..n {
            if u != v && (g.has_step(u, v) || g.has_step(v, u)) {
                adj[u][v] = true;
            }
        }
    }
    adj
}

/// Clustering coefficient by explicit neighbor-pair triangle counting.
pub fn cc_oracle(g: &MixedGraph) -> f64 {
    let n = g.node_count();
    if n == 0 {
        return 0.0;
    }
    let adj = undirected_adj(g);
    let mut sum = 0.0;
    for v in 0..n {
        let nbrs: Vec<usize> = (0..n).filter(|&w| adj[v][w]).collect();
        let k = nbrs.len();
        if k < 2 {
            continue;
        }
        let mut links = 0usize;
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if adj[a][b] {
                    links += 1;
                }
            }
        }
        sum += 2.0 * links as f64 / (k * (k - 1)) as f64;
    }
    sum / n as f64
}

/// Strongly connected components by pairwise mutual reachability.
pub fn scc_oracle(g: &MixedGraph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let dist = floyd_warshall(g);
    let mut assigned = vec![false; n];
    let mut comps = Vec::new();
    for v in 0..n {
        if assigned[v] {
            continue;
        }
        let comp: Vec<usize> = (0..n)
            .filter(|&w| dist[v][w] != INF && dist[w][v] != INF)
            .collect();
        for &w in &comp {
            assigned[w] = true;
        }
        comps.push(comp);
    }
    comps
}

/// Largest SCC, smallest minimum id on ties.
pub fn gscc_oracle(g: &MixedGraph) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::new();
    for comp in scc_oracle(g) {
        if comp.len() > best.len() || (comp.len() == best.len() && comp[0] < best[0]) {
            best = comp;
        }
    }
    best
}

/// Nodes with a directed path into the GSCC, including the GSCC.
pub fn gin_oracle(g: &MixedGraph) -> Vec<usize> {
    let gscc = gscc_oracle(g);
    let dist = floyd_warshall(g);
    (0..g.node_count())
        .filter(|&v| gscc.iter().any(|&s| dist[v][s] != INF))
        .collect()
}

/// Socio-centric betweenness by explicit shortest-path enumeration: for
/// every ordered pair the paths are walked along the distance DAG and the
/// through-counts accumulated per inner node.
pub fn betweenness_oracle(g: &MixedGraph) -> Vec<f64> {
    let n = g.node_count();
    let dist = floyd_warshall(g);
    let mut scores = vec![0.0; n];

    fn walk(
        g: &MixedGraph,
        dist: &[Vec<u32>],
        cur: usize,
        t: usize,
        inner: &mut Vec<usize>,
        total: &mut u64,
        through: &mut [u64],
    ) {
        if cur == t {
            *total += 1;
            for &v in inner.iter() {
                through[v] += 1;
            }
            return;
        }
        for next in 0..g.node_count() {
            if g.has_step(cur, next)
                && dist[next][t] != INF
                && dist[cur][t] == dist[next][t] + 1
            {
                if next != t {
                    inner.push(next);
                }
                walk(g, dist, next, t, inner, total, through);
                if next != t {
                    inner.pop();
                }
            }
        }
    }

    for s in 0..n {
        for t in 0..n {
            if s == t || dist[s][t] == INF {
                continue;
            }
            let mut total = 0u64;
            let mut through = vec![0u64; n];
            let mut inner = Vec::new();
            walk(g, &dist, s, t, &mut inner, &mut total, &mut through);
            for v in 0..n {
                if v != s && v != t && through[v] > 0 {
                    scores[v] += through[v] as f64 / total as f64;
                }
            }
        }
    }
    scores
}

/// Egocentric betweenness by listing the two-step walks of the ego network.
pub fn egocentric_oracle(g: &MixedGraph, v: usize) -> f64 {
    let adj = undirected_adj(g);
    let n = g.node_count();
    let mut ego: Vec<usize> = (0..n).filter(|&w| adj[v][w]).collect();
    ego.push(v);
    ego.sort_unstable();
    let mut sum = 0.0;
    for (i, &a) in ego.iter().enumerate() {
        for &b in &ego[i + 1..] {
            if adj[a][b] {
                continue;
            }
            let walks = ego
                .iter()
                .filter(|&&mid| mid != a && mid != b && adj[a][mid] && adj[mid][b])
                .count();
            if walks > 0 {
                sum += 1.0 / walks as f64;
            }
        }
    }
    sum
}

/// Closeness within a scope via Floyd-Warshall on the scope-induced relation.
pub fn closeness_oracle(g: &MixedGraph, scope: &[usize]) -> Vec<f64> {
    let n = g.node_count();
    let mut member = vec![false; n];
    for &v in scope {
        member[v] = true;
    }
    let scope_size = member.iter().filter(|&&m| m).count();
    let mut values = vec![0.0; n];
    if scope_size < 2 {
        return values;
    }
    // Distances restricted to scope members.
    let mut dist = vec![vec![INF; n]; n];
    for u in 0..n {
        if !member[u] {
            continue;
        }
        dist[u][u] = 0;
        for v in 0..n {
            if member[v] && u != v && g.has_step(u, v) {
                dist[u][v] = 1;
            }
        }
    }
    for k in 0..n {
        if !member[k] {
            continue;
        }
        for i in 0..n {
            if !member[i] || dist[i][k] == INF {
                continue;
            }
            for j in 0..n {
                if member[j] && dist[k][j] != INF && dist[i][k] + dist[k][j] < dist[i][j] {
                    dist[i][j] = dist[i][k] + dist[k][j];
                }
            }
        }
    }
    for v in 0..n {
        if !member[v] {
            continue;
        }
        let mut sum = 0u64;
        let mut reached = 0usize;
        for w in 0..n {
            if member[w] && w != v && dist[v][w] != INF {
                sum += u64::from(dist[v][w]);
                reached += 1;
            }
        }
        if reached == scope_size - 1 {
            values[v] = 1.0 / sum as f64;
        }
    }
    values
}

/// Random mixed graph: each unordered pair independently becomes an omni
/// edge, a one-way beam, a two-way beam pair, or nothing.
pub fn random_mixed(n: usize, rng: &mut ChaCha8Rng) -> MixedGraph {
    let mut g = MixedGraph::new(n);
    let p_edge: f64 = rng.gen_range(0.15..0.55);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() >= p_edge {
                continue;
            }
            match rng.gen_range(0..4) {
                0 => g.add_omni_edge(u, v),
                1 => g.add_beam_edge(u, v),
                2 => g.add_beam_edge(v, u),
                _ => {
                    g.add_beam_edge(u, v);
                    g.add_beam_edge(v, u);
                }
            }
        }
    }
    g
}

/// Every mixed graph on `n` nodes: each unordered pair cycles through
/// {none, omni, beam u->v, beam v->u, both beams}.
pub fn exhaustive_mixed(n: usize) -> Vec<MixedGraph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let total = 5usize.pow(pairs.len() as u32);
    (0..total)
        .map(|mut code| {
            let mut g = MixedGraph::new(n);
            for &(u, v) in &pairs {
                match code % 5 {
                    0 => {}
                    1 => g.add_omni_edge(u, v),
                    2 => g.add_beam_edge(u, v),
                    3 => g.add_beam_edge(v, u),
                    _ => {
                        g.add_beam_edge(u, v);
                        g.add_beam_edge(v, u);
                    }
                }
                code /= 5;
            }
            g
        })
        .collect()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
