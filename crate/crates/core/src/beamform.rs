//! Antenna geometry and the flocking-rule beamforming stage.
//!
//! Peripheral nodes (Alignment) sweep the sectors their antenna supports,
//! avoiding directions already committed by peripheral neighbors
//! (Separation), and point their beam at a region centroid (Cohesion). A
//! committed beam replaces the node's omnidirectional transmissions with
//! directed edges to the nodes inside the beam; reception stays
//! omnidirectional, so all edges into the node survive.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use rand::Rng;
use thiserror::Error;

use crate::graph::{MixedGraph, UNREACHABLE};
use crate::seeding::{self, DOM_ELEMENTS, DOM_TARGET};
use crate::selforg::{CentroidTable, RegionState};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BeamError {
    #[error("antenna element count must be at least 1, got {0}")]
    InvalidElements(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AntennaModel {
    Sector,
    Ula,
}

impl AntennaModel {
    pub fn as_str(self) -> &'static str {
        match self {
            AntennaModel::Sector => "sector",
            AntennaModel::Ula => "ula",
        }
    }
}

impl FromStr for AntennaModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sector" => Ok(AntennaModel::Sector),
            "ula" => Ok(AntennaModel::Ula),
            other => Err(format!("unknown antenna model `{other}` (expected sector|ula)")),
        }
    }
}

impl std::fmt::Display for AntennaModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Antenna parameters shared by all nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaConfig {
    pub model: AntennaModel,
    /// Maximum number of antenna elements (`M`).
    pub max_elements: u32,
    /// Omnidirectional transmission range in meters.
    pub r: f64,
    pub carrier_frequency: f64,
    /// Element spacing, fixed at half the carrier wavelength.
    pub element_spacing: f64,
}

impl AntennaConfig {
    pub fn new(model: AntennaModel, max_elements: u32, r: f64, carrier_frequency: f64) -> Self {
        assert!(max_elements >= 2, "beamforming needs at least two elements");
        assert!(r > 0.0 && carrier_frequency > 0.0);
        Self {
            model,
            max_elements,
            r,
            carrier_frequency,
            element_spacing: SPEED_OF_LIGHT / (2.0 * carrier_frequency),
        }
    }
}

/// A committed directional beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beam {
    pub owner: usize,
    /// Elements in use, in `[2, M]`.
    pub elements: u32,
    /// Center of the chosen sector, in `[0, 2*pi)`.
    pub boresight: f64,
    /// Sector beam length `m * r`.
    pub length: f64,
    /// Sector beam width `2*pi / m^2`.
    pub width: f64,
    pub target_centroid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamOutcome {
    Beam(Beam),
    RemainOmni,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionReason {
    /// Target was unreachable before the beam.
    NewCentroid,
    /// Farthest already-known centroid reachable through some sector.
    FarthestKnown,
    /// Chosen target sits less than two hops away; beam dropped.
    TooClose,
    /// No centroid reachable through any allowed sector.
    NoCandidate,
}

impl DecisionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DecisionReason::NewCentroid => "new_centroid",
            DecisionReason::FarthestKnown => "farthest_known",
            DecisionReason::TooClose => "too_close",
            DecisionReason::NoCandidate => "no_candidate",
        }
    }
}

/// Outcome of one peripheral node's beam decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamDecision {
    pub node: usize,
    pub outcome: BeamOutcome,
    pub reason: DecisionReason,
    /// Elements drawn for the sweep, even when the node stays omni.
    pub elements: u32,
    pub target: Option<usize>,
    /// Pre-beam hop count to the target; `None` with a target means the
    /// target was previously unreachable.
    pub target_prior_hops: Option<u32>,
}

/// One-instant acknowledgment back-beam from a centroid; logged, never an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AckEvent {
    pub centroid: usize,
    pub peripheral: usize,
    /// Direction from the centroid back toward the peripheral.
    pub incidence_angle: f64,
}

/// Beam commitment output: the rewired graph plus the decision and ack logs.
#[derive(Debug, Clone)]
pub struct CommitResult {
    pub graph: MixedGraph,
    pub decisions: Vec<BeamDecision>,
    pub acks: Vec<AckEvent>,
}

/// Sector-model beam geometry for `m` elements at omni range `r`:
/// length `m * r` and width `2*pi / m^2` (`m = 1` degenerates to omni).
pub fn sector_beam(m: u32, r: f64) -> Result<(f64, f64), BeamError> {
    if m < 1 {
        return Err(BeamError::InvalidElements(m));
    }
    let m_f = f64::from(m);
    Ok((m_f * r, 2.0 * std::f64::consts::PI / (m_f * m_f)))
}

/// Boresights of the `m^2` equal sectors: `(k + 1/2) * 2*pi / m^2`.
pub fn sector_boresights(m: u32) -> impl Iterator<Item = f64> {
    let sectors = u64::from(m) * u64::from(m);
    let width = 2.0 * std::f64::consts::PI / sectors as f64;
    (0..sectors).map(move |k| (k as f64 + 0.5) * width)
}

/// Wrap an angle difference into `(-pi, pi]`.
fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = a % two_pi;
    if x <= -std::f64::consts::PI {
        x += two_pi;
    } else if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}

fn array_factor(m: u32, angle_from_boresight: f64) -> f64 {
    // Half-wavelength spacing; the electrical angle is measured from the
    // array axis, which lies perpendicular to the boresight.
    let psi = std::f64::consts::PI * angle_from_boresight.sin();
    let half = psi / 2.0;
    let s = half.sin();
    if s.abs() < 1e-12 {
        return 1.0;
    }
    let v = (f64::from(m) * half).sin() / (f64::from(m) * s);
    v * v
}

fn ula_mean_gain(m: u32) -> f64 {
    static CACHE: OnceLock<Mutex<BTreeMap<u32, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    let mut cache = cache.lock().unwrap();
    *cache.entry(m).or_insert_with(|| {
        let n = 1usize << 15;
        let step = 2.0 * std::f64::consts::PI / n as f64;
        let sum: f64 = (0..n).map(|k| array_factor(m, (k as f64 + 0.5) * step)).sum();
        sum / n as f64
    })
}

/// Normalized uniform-linear-array power pattern with half-wavelength
/// spacing: the array factor `|sin(m*psi/2) / (m*sin(psi/2))|^2` scaled so
/// the mean gain over the circle is 1 (total radiated power matches the
/// omnidirectional case). The pattern is symmetric front-to-back.
pub fn ula_gain(m: u32, angle_from_boresight: f64) -> f64 {
    assert!(m >= 2, "ULA pattern needs at least two elements");
    array_factor(m, angle_from_boresight) / ula_mean_gain(m)
}

/// Nodes covered by a beam: under the sector model a target is covered iff
/// its distance is at most the beam length and its angular offset from the
/// boresight at most half the beam width (closed boundaries); under the ULA
/// model iff its distance is at most the pattern-shaped reach
/// `B_l * sqrt(gain(offset) / gain(0))`, whose main lobe extends to the
/// beam length `m * r` like the idealized model. The owner is never covered.
pub fn coverage(
    owner: usize,
    beam: &Beam,
    cfg: &AntennaConfig,
    positions: &[(f64, f64)],
) -> Vec<usize> {
    let (ox, oy) = positions[owner];
    let peak = match cfg.model {
        AntennaModel::Sector => 0.0,
        AntennaModel::Ula => ula_gain(beam.elements, 0.0),
    };
    let mut covered = Vec::new();
    for (j, &(x, y)) in positions.iter().enumerate() {
        if j == owner {
            continue;
        }
        let (dx, dy) = (x - ox, y - oy);
        let dist = (dx * dx + dy * dy).sqrt();
        let offset = wrap_angle(dy.atan2(dx) - beam.boresight).abs();
        let hit = match cfg.model {
            AntennaModel::Sector => dist <= beam.length && offset <= beam.width / 2.0,
            AntennaModel::Ula => {
                dist <= beam.length * (ula_gain(beam.elements, offset) / peak).sqrt()
            }
        };
        if hit {
            covered.push(j);
        }
    }
    covered
}

/// Alignment rule: a node is peripheral iff every region-internal neighbor
/// sits at most as many hops from the region centroid as the node itself.
/// Nodes with no region-internal neighbors (isolated ones included) qualify.
/// Expects the region state after the centroid rewrite. Sorted output.
pub fn identify_peripherals(rs: &RegionState, g_omni: &MixedGraph) -> Vec<usize> {
    (0..rs.node_count())
        .filter(|&v| {
            g_omni
                .omni_neighbors(v)
                .iter()
                .filter(|&&w| rs.head_of(w) == rs.head_of(v))
                .all(|&w| rs.hop_of(w) <= rs.hop_of(v))
        })
        .collect()
}

/// Boresights of the `m^2` sectors that survive the Separation rule: a
/// candidate is excluded when it lies within half a sector width of any
/// already-committed neighbor boresight.
pub fn allowed_boresights(m: u32, forbidden: &[f64]) -> Vec<f64> {
    let half_width = std::f64::consts::PI / (f64::from(m) * f64::from(m));
    sector_boresights(m)
        .filter(|&b| forbidden.iter().all(|&f| wrap_angle(b - f).abs() > half_width))
        .collect()
}

/// Directed BFS in which the source's out-edges are replaced by `covered`.
fn tentative_hops(g: &MixedGraph, source: usize, covered: &[usize], max_depth: u32) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; g.node_count()];
    dist[source] = 0;
    let mut queue = VecDeque::new();
    for &c in covered {
        if c != source && dist[c] == UNREACHABLE {
            dist[c] = 1;
            queue.push_back(c);
        }
    }
    while let Some(v) = queue.pop_front() {
        if dist[v] >= max_depth {
            continue;
        }
        for w in g.out_neighbors(v) {
            if w != source && dist[w] == UNREACHABLE {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Sweep all allowed sectors of a tentative beam and record, per centroid
/// reached within `g_max` hops, the minimum hop count over sectors together
/// with the boresight that achieves it.
pub fn sweep_sectors(
    p: usize,
    m: u32,
    g: &MixedGraph,
    centroids: &BTreeSet<usize>,
    g_max: u32,
    forbidden: &[f64],
    cfg: &AntennaConfig,
) -> BTreeMap<usize, (u32, f64)> {
    let positions = g.positions().expect("beamforming needs node positions");
    let (length, width) = sector_beam(m, cfg.r).expect("m >= 2");
    let mut best: BTreeMap<usize, (u32, f64)> = BTreeMap::new();
    for boresight in allowed_boresights(m, forbidden) {
        let beam = Beam {
            owner: p,
            elements: m,
            boresight,
            length,
            width,
            target_centroid: usize::MAX,
        };
        let covered = coverage(p, &beam, cfg, positions);
        let dist = tentative_hops(g, p, &covered, g_max);
        for &c in centroids {
            let d = dist[c];
            if d != UNREACHABLE && d <= g_max {
                match best.get(&c) {
                    Some(&(bd, _)) if bd <= d => {}
                    _ => {
                        best.insert(c, (d, boresight));
                    }
                }
            }
        }
    }
    best
}

/// Cohesion rule: pick the beam target.
///
/// Newly reachable centroids (present in the sweep result but absent from
/// the node's table) count as previously infinitely far; one of them is
/// drawn uniformly, preferring centroids of other regions. Otherwise the
/// farthest known centroid reachable through some sector wins. A target
/// already less than two hops away cancels the beam, as does an empty
/// candidate set.
pub fn choose_target(
    p: usize,
    m: u32,
    rc: &CentroidTable,
    rc_star: &BTreeMap<usize, (u32, f64)>,
    own_centroid: usize,
    cfg: &AntennaConfig,
    seed: u64,
) -> BeamDecision {
    let make_beam = |target: usize, boresight: f64| -> Beam {
        let (length, width) = sector_beam(m, cfg.r).expect("m >= 2");
        Beam {
            owner: p,
            elements: m,
            boresight,
            length,
            width,
            target_centroid: target,
        }
    };

    let new_ones: Vec<usize> = rc_star
        .keys()
        .copied()
        .filter(|&c| rc.hop_to(p, c).is_none())
        .collect();
    if !new_ones.is_empty() {
        let other_region: Vec<usize> = new_ones.iter().copied().filter(|&c| c != own_centroid).collect();
        let pool = if other_region.is_empty() { &new_ones } else { &other_region };
        let mut rng = seeding::node_rng(seed, DOM_TARGET, p);
        let target = pool[rng.gen_range(0..pool.len())];
        let (_, boresight) = rc_star[&target];
        return BeamDecision {
            node: p,
            outcome: BeamOutcome::Beam(make_beam(target, boresight)),
            reason: DecisionReason::NewCentroid,
            elements: m,
            target: Some(target),
            target_prior_hops: None,
        };
    }

    // Known centroids still reachable through some sector; farthest first,
    // lowest id on ties.
    let mut known: Vec<(u32, usize)> = rc_star
        .keys()
        .filter_map(|&c| rc.hop_to(p, c).map(|h| (h, c)))
        .collect();
    known.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    match known.first() {
        Some(&(prior, target)) if prior >= 2 => {
            let (_, boresight) = rc_star[&target];
            BeamDecision {
                node: p,
                outcome: BeamOutcome::Beam(make_beam(target, boresight)),
                reason: DecisionReason::FarthestKnown,
                elements: m,
                target: Some(target),
                target_prior_hops: Some(prior),
            }
        }
        Some(&(prior, target)) => BeamDecision {
            node: p,
            outcome: BeamOutcome::RemainOmni,
            reason: DecisionReason::TooClose,
            elements: m,
            target: Some(target),
            target_prior_hops: Some(prior),
        },
        None => BeamDecision {
            node: p,
            outcome: BeamOutcome::RemainOmni,
            reason: DecisionReason::NoCandidate,
            elements: m,
            target: None,
            target_prior_hops: None,
        },
    }
}

/// Commit beams for all peripherals, in ascending node id.
///
/// Each peripheral draws its element count, sweeps the sectors not blocked
/// by already-committed peripheral neighbors, and applies its decision to
/// the evolving graph: its omnidirectional transmissions are withdrawn (the
/// reverse directions persist as directed edges, since reception stays
/// omnidirectional) and directed beam edges to the covered nodes appear.
/// Centroids hit from more than one hop away answer with a one-instant
/// acknowledgment back-beam, recorded as an event only.
pub fn commit_beams(
    g: &MixedGraph,
    rs: &RegionState,
    peripherals: &[usize],
    rc: &CentroidTable,
    cfg: &AntennaConfig,
    seed: u64,
) -> CommitResult {
    let positions = g.positions().expect("beamforming needs node positions").to_vec();
    let centroids: BTreeSet<usize> = rc.centroids().iter().copied().collect();
    let peripheral_set: BTreeSet<usize> = peripherals.iter().copied().collect();
    let mut cur = g.clone();
    let mut committed: BTreeMap<usize, f64> = BTreeMap::new();
    let mut decisions = Vec::with_capacity(peripherals.len());
    let mut acks = Vec::new();

    let mut order: Vec<usize> = peripherals.to_vec();
    order.sort_unstable();
    order.dedup();

    for &p in &order {
        let m = seeding::node_rng(seed, DOM_ELEMENTS, p).gen_range(2..=cfg.max_elements);
        // Separation: directions taken by peripheral neighbors of the
        // pre-beam omni graph that already committed.
        let forbidden: Vec<f64> = g
            .omni_neighbors(p)
            .iter()
            .filter(|w| peripheral_set.contains(w))
            .filter_map(|w| committed.get(w).copied())
            .collect();
        let rc_star = sweep_sectors(p, m, &cur, &centroids, rc.g_max(), &forbidden, cfg);
        let decision = choose_target(p, m, rc, &rc_star, rs.head_of(p), cfg, seed);

        if let BeamOutcome::Beam(beam) = decision.outcome {
            let covered = coverage(p, &beam, cfg, &positions);
            // Withdraw p's omnidirectional transmissions: symmetric edges
            // keep their reverse direction, stale directed leftovers from
            // earlier commits disappear.
            for w in cur.omni_neighbors(p).to_vec() {
                cur.remove_omni_edge(p, w);
                cur.add_beam_edge(w, p);
            }
            for w in cur.beam_out_neighbors(p).to_vec() {
                cur.remove_beam_edge(p, w);
            }
            for t in covered {
                cur.add_beam_edge(p, t);
            }
            committed.insert(p, beam.boresight);

            if decision.target_prior_hops.map_or(true, |h| h > 1) {
                let c = beam.target_centroid;
                let (cx, cy) = positions[c];
                let (px, py) = positions[p];
                acks.push(AckEvent {
                    centroid: c,
                    peripheral: p,
                    incidence_angle: (py - cy).atan2(px - cx),
                });
            }
        }
        decisions.push(decision);
    }

    CommitResult { graph: cur, decisions, acks }
}

/// CSV log of beam decisions with header
/// `node,outcome,reason,m,boresight_rad,target,target_prior_hops`.
/// An empty prior-hop field means no target; `inf` marks a previously
/// unreachable target.
pub fn write_decisions<W: Write>(decisions: &[BeamDecision], out: &mut W) -> io::Result<()> {
    writeln!(out, "node,outcome,reason,m,boresight_rad,target,target_prior_hops")?;
    for d in decisions {
        let (outcome, boresight) = match d.outcome {
            BeamOutcome::Beam(b) => ("beam", format!("{}", b.boresight)),
            BeamOutcome::RemainOmni => ("remain_omni", String::new()),
        };
        let target = d.target.map_or(String::new(), |t| t.to_string());
        let prior = match (d.target, d.target_prior_hops) {
            (Some(_), Some(h)) => h.to_string(),
            (Some(_), None) => "inf".to_string(),
            (None, _) => String::new(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            d.node,
            outcome,
            d.reason.as_str(),
            d.elements,
            boresight,
            target,
            prior
        )?;
    }
    Ok(())
}
