//! Module-level invariants, protocol properties and diagnostics that are
//! reported rather than asserted.

mod common;

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use swbeam::beamform::{sweep_sectors, AntennaConfig, AntennaModel, Beam, sector_beam, coverage};
use swbeam::centrality::{closeness, egocentric_betweenness};
use swbeam::graph::{MixedGraph, UNREACHABLE};
use swbeam::selforg::{
    broadcast_centroids, centroid_consensus, lateral_inhibition, lateral_inhibition_with,
    regions, InhibitionOptions, RegionState, TraceRow,
};
use swbeam::topology::{
    build_omni_graph, expected_survivors, place_uniform, thin, Placement, ThinningParams,
};

use common::{floyd_warshall, random_mixed, seeded, INF};

// ---------------------------------------------------------------------------
// Thinning

/// Independent single-pass survivor computation.
fn thin_oracle(p: &Placement, r_b: f64, l_min: usize) -> Vec<(f64, f64)> {
    let coords = p.coords();
    coords
        .iter()
        .enumerate()
        .filter(|&(i, &(x, y))| {
            coords
                .iter()
                .enumerate()
                .filter(|&(j, &(a, b))| i != j && ((x - a).hypot(y - b) <= r_b))
                .count()
                >= l_min
        })
        .map(|(_, &c)| c)
        .collect()
}

#[test]
fn thinning_matches_single_pass_oracle_over_seeds() {
    let params = ThinningParams::new(30.0, 5).unwrap();
    let mut survivor_counts = Vec::new();
    for seed in 0..100 {
        let p = place_uniform(1e-3, 1000.0, seed).unwrap();
        assert_eq!(p.len(), 1000);
        let t = thin(&p, &params);
        assert_eq!(t.coords(), thin_oracle(&p, 30.0, 5).as_slice(), "seed {seed}");
        survivor_counts.push(t.len());
    }
    let mean = survivor_counts.iter().sum::<usize>() as f64 / survivor_counts.len() as f64;
    // Diagnostic only: the printed closed form is known to disagree with the
    // empirical survival of the rule it describes.
    let formula = expected_survivors(1e-3, 1e6, 30.0).unwrap();
    println!(
        "thinning: empirical mean survivors {mean:.1}/1000, closed-form expectation {formula:.3e}"
    );
}

#[test]
fn second_thinning_pass_can_shrink_further() {
    // Hub with five spokes: the spokes die in pass one (each has a single
    // neighbor), the hub survives pass one but would die in pass two.
    let mut coords = vec![(50.0, 50.0)];
    for k in 0..5 {
        let ang = k as f64;
        coords.push((50.0 + 8.0 * ang.cos(), 50.0 + 8.0 * ang.sin()));
    }
    let p = Placement::from_coords(coords, 100.0, 0);
    let params = ThinningParams::new(10.0, 5).unwrap();
    let once = thin(&p, &params);
    assert_eq!(once.len(), 1, "only the hub survives the single pass");
    let twice = thin(&once, &params);
    assert_eq!(twice.len(), 0, "a second pass would remove the hub too");
}

#[test]
fn survivors_shrink_as_l_min_grows() {
    let p = place_uniform(1.2e-3, 600.0, 5).unwrap();
    let mut last = usize::MAX;
    for l_min in 0..9 {
        let t = thin(&p, &ThinningParams::new(30.0, l_min).unwrap());
        assert!(t.len() <= last, "l_min {l_min}");
        last = t.len();
    }
}

// ---------------------------------------------------------------------------
// Graph metrics

#[test]
fn beam_edges_never_hurt_reachability_or_components() {
    let mut rng = seeded(71);
    for _ in 0..40 {
        let n = rng.gen_range(4..14);
        let g = random_mixed(n, &mut rng);
        let unreachable = |g: &MixedGraph| -> usize {
            let mut count = 0;
            for s in 0..n {
                let d = g.shortest_hops(s).unwrap();
                count += (0..n).filter(|&t| t != s && d[t] == UNREACHABLE).count();
            }
            count
        };
        let before_unreach = unreachable(&g);
        let before_comps = g.weak_components().len();
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u == v {
            continue;
        }
        let mut g2 = g.clone();
        g2.add_beam_edge(u, v);
        assert!(unreachable(&g2) <= before_unreach);
        assert!(g2.weak_components().len() <= before_comps);
    }
}

#[test]
fn apl_is_invariant_under_relabeling() {
    let mut rng = seeded(95);
    for _ in 0..25 {
        let n = rng.gen_range(4..12);
        let g = random_mixed(n, &mut rng);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let mut h = MixedGraph::new(n);
        for u in 0..n {
            for &v in g.omni_neighbors(u) {
                if u < v {
                    h.add_omni_edge(perm[u], perm[v]);
                }
            }
            for &v in g.beam_out_neighbors(u) {
                h.add_beam_edge(perm[u], perm[v]);
            }
        }
        match (g.average_path_length(), h.average_path_length()) {
            (Ok(a), Ok(b)) => {
                assert_eq!(a.reachable_pairs, b.reachable_pairs);
                assert!((a.mean_hops - b.mean_hops).abs() < 1e-12);
            }
            (Err(_), Err(_)) => {}
            (a, b) => panic!("relabeling changed APL outcome: {a:?} vs {b:?}"),
        }
    }
}

#[test]
fn gscc_of_omni_graph_is_largest_weak_component() {
    let mut rng = seeded(31);
    for _ in 0..25 {
        let n = rng.gen_range(3..20);
        let mut g = MixedGraph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < 0.18 {
                    g.add_omni_edge(u, v);
                }
            }
        }
        let mut largest = g
            .weak_components()
            .into_iter()
            .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
            .unwrap();
        largest.sort_unstable();
        assert_eq!(g.gscc(), largest);
    }
}

#[test]
fn shortest_hops_satisfy_triangle_inequality() {
    let mut rng = seeded(12);
    for _ in 0..20 {
        let n = rng.gen_range(4..12);
        let g = random_mixed(n, &mut rng);
        let d = floyd_warshall(&g);
        for i in 0..n {
            let row = g.shortest_hops(i).unwrap();
            for j in 0..n {
                assert_eq!(row[j] != UNREACHABLE, d[i][j] != INF);
                if d[i][j] != INF {
                    assert_eq!(row[j], d[i][j]);
                }
                for k in 0..n {
                    if d[i][k] != INF && d[k][j] != INF {
                        assert!(d[i][j] <= d[i][k] + d[k][j]);
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Centrality

#[test]
fn tree_centroid_candidates_are_at_most_two_adjacent_nodes() {
    let mut rng = seeded(44);
    for _ in 0..30 {
        let n = rng.gen_range(3..16);
        let mut g = MixedGraph::new(n);
        for v in 1..n {
            g.add_omni_edge(v, rng.gen_range(0..v));
        }
        let scope: Vec<usize> = (0..n).collect();
        let scores = closeness(&g, &scope);
        let best = scores.values().iter().cloned().fold(f64::MIN, f64::max);
        let argmax: Vec<usize> = (0..n)
            .filter(|&v| (scores.value(v) - best).abs() < 1e-12)
            .collect();
        assert!(argmax.len() <= 2, "tree has at most two centroids");
        if let [a, b] = argmax[..] {
            assert!(g.has_omni_edge(a, b), "the two tree centroids are adjacent");
        }
    }
}

#[test]
fn ego_betweenness_ignores_nodes_outside_the_closed_neighborhood() {
    let mut rng = seeded(87);
    for _ in 0..30 {
        let n = rng.gen_range(5..12);
        let g = random_mixed(n, &mut rng);
        let v = rng.gen_range(0..n);
        let before = egocentric_betweenness(&g, v);

        // Drop a node outside v's closed undirected neighborhood.
        let closed: BTreeSet<usize> = g
            .undirected_neighbors(v)
            .into_iter()
            .chain(std::iter::once(v))
            .collect();
        let Some(outsider) = (0..n).find(|w| !closed.contains(w)) else {
            continue;
        };
        let keep: Vec<usize> = (0..n).filter(|&w| w != outsider).collect();
        let (sub, ids) = g.induced_subgraph(&keep);
        let v_local = ids.binary_search(&v).unwrap();
        let after = egocentric_betweenness(&sub, v_local);
        assert!((before - after).abs() < 1e-12);
    }
}

#[test]
fn closeness_ranking_is_permutation_invariant() {
    let mut rng = seeded(53);
    let n = 9;
    let g = random_mixed(n, &mut rng);
    let scope: Vec<usize> = (0..n).collect();
    let base = closeness(&g, &scope);

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut h = MixedGraph::new(n);
    for u in 0..n {
        for &v in g.omni_neighbors(u) {
            if u < v {
                h.add_omni_edge(perm[u], perm[v]);
            }
        }
        for &v in g.beam_out_neighbors(u) {
            h.add_beam_edge(perm[u], perm[v]);
        }
    }
    let mapped = closeness(&h, &scope);
    for v in 0..n {
        assert!((base.value(v) - mapped.value(perm[v])).abs() < 1e-12);
    }
}

// ---------------------------------------------------------------------------
// Self-organization

#[test]
fn consensus_settles_on_degree_weighted_mean() {
    let mut rng = seeded(29);
    for trial in 0..15 {
        // Random connected 10-node region.
        let n = 10;
        let mut g = MixedGraph::new(n);
        for v in 1..n {
            g.add_omni_edge(v, rng.gen_range(0..v));
        }
        for _ in 0..6 {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if u != v {
                g.add_omni_edge(u.min(v), u.max(v));
            }
        }
        let region: Vec<usize> = (0..n).collect();
        let cs = centroid_consensus(&region, &g, trial, 1e-12, 200_000);
        assert!(cs.converged(), "trial {trial}");

        // Stationary distribution of the closed-neighborhood averaging
        // operator weights each node by degree + 1.
        let mut wx = 0.0;
        let mut wy = 0.0;
        let mut wsum = 0.0;
        for v in 0..n {
            let w = (g.omni_neighbors(v).len() + 1) as f64;
            let (x, y) = cs.initial_of(v);
            wx += w * x;
            wy += w * y;
            wsum += w;
        }
        let want = (wx / wsum, wy / wsum);
        for v in 0..n {
            let (ex, ey) = cs.estimate_of(v);
            assert!(
                (ex - want.0).abs() < 1e-8 && (ey - want.1).abs() < 1e-8,
                "trial {trial} node {v}: got ({ex},{ey}), want {want:?}"
            );
        }
    }
}

#[test]
fn inhibition_round_state_depends_only_on_the_neighborhood() {
    // Two deployments identical within three hops of node 0 but different
    // farther out must agree on node 0's state for the first three rounds.
    let build = |far_edge: bool| -> Vec<TraceRow> {
        let mut g = MixedGraph::new(8);
        for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6)] {
            g.add_omni_edge(u, v);
        }
        if far_edge {
            g.add_omni_edge(6, 7); // four hops away from node 0
        }
        let mut trace = Vec::new();
        lateral_inhibition_with(&g, 6, 0, &InhibitionOptions::default(), Some(&mut trace));
        trace
    };
    let a = build(false);
    let b = build(true);
    for round in 0..=3u32 {
        let row = |t: &[TraceRow]| {
            t.iter()
                .find(|r| r.round == round && r.node == 0)
                .map(|r| (r.head, r.hop, r.head_degree))
        };
        let (ra, rb) = (row(&a), row(&b));
        if let (Some(ra), Some(rb)) = (ra, rb) {
            assert_eq!(ra, rb, "round {round}");
        }
    }
}

#[test]
fn centroid_tables_match_truncated_bfs_oracle() {
    let mut rng = seeded(61);
    for trial in 0..20 {
        let p = place_uniform(9e-4, 300.0, trial).unwrap();
        let g = build_omni_graph(&p, 40.0);
        let gradient = rng.gen_range(1..4u32);
        let mut rs = lateral_inhibition(&g, gradient, trial);
        let parts = regions(&rs);
        // Heads stand in as centroids for this table check.
        let centroids: Vec<usize> = parts.iter().map(|p| p[0]).collect();
        let g_max = 3 * gradient;
        let table = broadcast_centroids(&g, &mut rs, &centroids, g_max);

        for v in 0..g.node_count() {
            for &c in &centroids {
                let d = g.shortest_hops(c).unwrap()[v];
                let want = (d != UNREACHABLE && d <= g_max).then_some(d);
                assert_eq!(table.hop_to(v, c), want, "trial {trial} node {v}");
            }
        }
    }
}

#[test]
fn region_partition_and_radius_hold_on_random_instances() {
    for trial in 0..25 {
        let p = place_uniform(1.1e-3, 320.0, 1000 + trial).unwrap();
        let g = build_omni_graph(&p, 35.0);
        let gradient = 1 + (trial % 4) as u32;
        let rs = lateral_inhibition(&g, gradient, trial);
        let parts = regions(&rs);
        let mut seen = vec![false; g.node_count()];
        for part in &parts {
            for &v in part {
                assert!(!seen[v]);
                seen[v] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
        for v in 0..g.node_count() {
            assert!(rs.hop_of(v) <= gradient);
        }
    }
}

// ---------------------------------------------------------------------------
// Beamforming

/// Brute-force sweep: recompute the per-sector coverage and run a bounded
/// BFS per sector directly.
fn sweep_oracle(
    p: usize,
    m: u32,
    g: &MixedGraph,
    centroids: &BTreeSet<usize>,
    g_max: u32,
    cfg: &AntennaConfig,
) -> std::collections::BTreeMap<usize, u32> {
    let positions = g.positions().unwrap();
    let n = g.node_count();
    let (length, width) = sector_beam(m, cfg.r).unwrap();
    let mut best = std::collections::BTreeMap::new();
    let sectors = u64::from(m) * u64::from(m);
    for k in 0..sectors {
        let boresight = (k as f64 + 0.5) * 2.0 * std::f64::consts::PI / sectors as f64;
        let beam = Beam { owner: p, elements: m, boresight, length, width, target_centroid: 0 };
        let covered = coverage(p, &beam, cfg, positions);
        // Plain BFS on the tentative adjacency.
        let mut dist = vec![u32::MAX; n];
        dist[p] = 0;
        let mut frontier: Vec<usize> = covered.iter().copied().filter(|&c| c != p).collect();
        for &c in &frontier {
            dist[c] = 1;
        }
        while let Some(v) = frontier.pop() {
            if dist[v] >= g_max {
                continue;
            }
            for w in 0..n {
                if w != p && dist[w] == u32::MAX && g.has_step(v, w) {
                    dist[w] = dist[v] + 1;
                    frontier.push(w);
                }
            }
        }
        for &c in centroids {
            if dist[c] != u32::MAX && dist[c] <= g_max {
                best.entry(c)
                    .and_modify(|d: &mut u32| *d = (*d).min(dist[c]))
                    .or_insert(dist[c]);
            }
        }
    }
    best
}

#[test]
fn sector_sweep_matches_per_sector_bfs_oracle() {
    let p = place_uniform(1.5e-4, 320.0, 2024).unwrap();
    assert_eq!(p.len(), 15);
    let g = build_omni_graph(&p, 60.0);
    let cfg = AntennaConfig::new(AntennaModel::Sector, 6, 60.0, 2.4e9);
    let centroids: BTreeSet<usize> = [0, 4, 9, 14].into();
    for m in 2..=4 {
        let got = sweep_sectors(0, m, &g, &centroids, 6, &[], &cfg);
        let want = sweep_oracle(0, m, &g, &centroids, 6, &cfg);
        let got_hops: std::collections::BTreeMap<usize, u32> =
            got.iter().map(|(&c, &(h, _))| (c, h)).collect();
        assert_eq!(got_hops, want, "m={m}");
    }
}

// ---------------------------------------------------------------------------
// Diagnostics (reported, not asserted)

#[test]
fn report_lemma_bound_diagnostics() {
    let p = place_uniform(2.5e-3, 500.0, 7).unwrap();
    let params = ThinningParams::new(30.0, 5).unwrap();
    let t = thin(&p, &params);
    let g = build_omni_graph(&t, 30.0);
    let n = g.node_count() as f64;
    let rho = n / (500.0 * 500.0);
    for gradient in [3u32, 6, 10] {
        let rs = lateral_inhibition(&g, gradient, 7);
        let parts = regions(&rs);
        let heads = rs.heads();
        let gf = f64::from(gradient);
        let r = 30.0;
        let lower = n / (rho * gf * gf * r * r * std::f64::consts::PI);
        let upper = n / (rho * gf * gf * r * r * 3f64.sqrt());
        println!(
            "g={gradient}: regions={} heads={} fully-connected |C| bounds [{lower:.1}, {upper:.1}]",
            parts.len(),
            heads.len()
        );

        // Head spacing upper bound from the derivation that assumes a fully
        // connected dense deployment; reported only.
        let mut max_pair = 0u32;
        for (i, &h1) in heads.iter().enumerate() {
            let d = g.shortest_hops(h1).unwrap();
            for &h2 in &heads[i + 1..] {
                if d[h2] != UNREACHABLE {
                    max_pair = max_pair.max(d[h2]);
                }
            }
        }
        println!(
            "g={gradient}: max head pair distance {max_pair} (2g+1 = {})",
            2 * gradient + 1
        );
    }
}

#[test]
fn report_peripheral_bound_diagnostics() {
    let p = place_uniform(2.5e-3, 500.0, 3).unwrap();
    let t = thin(&p, &ThinningParams::new(30.0, 5).unwrap());
    let g = build_omni_graph(&t, 30.0);
    let n = g.node_count() as f64;
    for gradient in [3u32, 6] {
        let mut rs = lateral_inhibition(&g, gradient, 3);
        let parts = regions(&rs);
        let centroids: Vec<usize> = parts.iter().map(|part| part[0]).collect();
        broadcast_centroids(&g, &mut rs, &centroids, 3 * gradient);
        let peripherals = swbeam::beamform::identify_peripherals(&rs, &g);
        let gf = f64::from(gradient);
        println!(
            "g={gradient}: |P|={} of {n}, fully-connected bounds [{:.1}, {:.1}]",
            peripherals.len(),
            n * (2.0 * gf + 1.0) / (gf * gf),
            n * (2.0 * gf + 1.0) * std::f64::consts::PI / (gf * gf * 3f64.sqrt()),
        );
    }
}

#[test]
fn strict_guard_mode_changes_region_granularity() {
    let p = place_uniform(1.5e-3, 400.0, 21).unwrap();
    let g = build_omni_graph(&p, 35.0);
    let default_rs = lateral_inhibition(&g, 3, 21);
    let strict_rs = lateral_inhibition_with(
        &g,
        3,
        21,
        &InhibitionOptions { strict_guard: true, ..Default::default() },
        None,
    );
    let (d, s) = (regions(&default_rs).len(), regions(&strict_rs).len());
    assert!(s >= d, "strict guard cannot form fewer regions");
    println!("regions: within-g guard {d}, strict guard {s}");
}

#[test]
fn region_state_csv_roundtrips_roles() {
    let mut rs = RegionState::from_parts(2, vec![0, 0, 0], vec![0, 1, 1], vec![2, 2, 2]);
    rs.set_role(0, swbeam::Role::Centroid);
    rs.set_role(2, swbeam::Role::Peripheral);
    let mut buf = Vec::new();
    rs.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.contains("0,0,0,centroid"));
    assert!(text.contains("1,0,1,standard"));
    assert!(text.contains("2,0,1,peripheral"));
}
