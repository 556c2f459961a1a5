//! Experiment orchestration: seeded replication over a density × gradient
//! grid, per-run metrics, CSV emission and aggregation.
//!
//! Replicate `k` of every cell uses seed `base_seed + k`, and the same
//! placement is shared by all gradients and both antenna models at matched
//! seeds, so paired comparisons are meaningful. Replicates are independent
//! and run in parallel; the emitted rows are sorted by key, which makes the
//! output independent of scheduling.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::beamform::{
    commit_beams, identify_peripherals, AckEvent, AntennaConfig, AntennaModel, BeamDecision,
};
use crate::centrality::sociocentric_betweenness;
use crate::graph::MixedGraph;
use crate::selforg::{
    broadcast_centroids, centroid_consensus, elect_centroid, lateral_inhibition_with, regions,
    InhibitionOptions, RegionState, Role, TraceRow,
};
use crate::topology::{build_omni_graph, place_uniform, thin, Placement, ThinningParams, TopologyError};

/// WiFi carrier used for the antenna element spacing.
pub const DEFAULT_CARRIER_HZ: f64 = 2.4e9;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {0}: expected `key = value`")]
    MalformedLine(usize),
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for key `{key}`")]
    InvalidValue { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("metrics invariant violated (seed {seed}): {detail}")]
    InvariantViolation { seed: u64, detail: String },
}

/// Full experiment description; the config file uses exactly these key
/// names (`M` for the element budget).
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub area_side: f64,
    pub density_list: Vec<f64>,
    pub r: f64,
    pub r_b: f64,
    pub l_min: usize,
    pub gradient_list: Vec<u32>,
    /// Centroid broadcast bound; 0 selects the default of three gradients.
    pub g_max: u32,
    /// Maximum antenna elements (config key `M`).
    pub max_elements: u32,
    pub eps: f64,
    pub model: AntennaModel,
    pub replicates: u32,
    pub base_seed: u64,
    pub tol: f64,
    /// Consensus round cap; 0 selects the default of ten times the region size.
    pub max_rounds: u32,
    /// Capture lateral-inhibition round traces (set by the CLI, not a file key).
    pub capture_trace: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            area_side: 500.0,
            density_list: vec![1e-3, 1.5e-3, 2e-3, 2.5e-3],
            r: 30.0,
            r_b: 30.0,
            l_min: 5,
            gradient_list: (3..=10).collect(),
            g_max: 0,
            max_elements: 6,
            eps: 0.05,
            model: AntennaModel::Sector,
            replicates: 50,
            base_seed: 1,
            tol: 1e-9,
            max_rounds: 0,
            capture_trace: false,
        }
    }
}

impl ExperimentConfig {
    /// Parse a line-oriented `key = value` file over the defaults. Lists are
    /// comma-separated; `#` starts a comment; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(ConfigError::MalformedLine(idx + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || ConfigError::InvalidValue {
                key: key.to_string(),
                value: value.to_string(),
            };
            match key {
                "area_side" => cfg.area_side = value.parse().map_err(|_| bad())?,
                "density_list" => cfg.density_list = parse_list(value).ok_or_else(bad)?,
                "r" => cfg.r = value.parse().map_err(|_| bad())?,
                "r_b" => cfg.r_b = value.parse().map_err(|_| bad())?,
                "l_min" => cfg.l_min = value.parse().map_err(|_| bad())?,
                "gradient_list" => cfg.gradient_list = parse_list(value).ok_or_else(bad)?,
                "g_max" => cfg.g_max = value.parse().map_err(|_| bad())?,
                "M" => cfg.max_elements = value.parse().map_err(|_| bad())?,
                "eps" => cfg.eps = value.parse().map_err(|_| bad())?,
                "model" => cfg.model = value.parse().map_err(|_| bad())?,
                "replicates" => cfg.replicates = value.parse().map_err(|_| bad())?,
                "base_seed" => cfg.base_seed = value.parse().map_err(|_| bad())?,
                "tol" => cfg.tol = value.parse().map_err(|_| bad())?,
                "max_rounds" => cfg.max_rounds = value.parse().map_err(|_| bad())?,
                other => return Err(ConfigError::UnknownKey(other.to_string())),
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: &str| Err(ConfigError::Invalid(msg.to_string()));
        if !(self.area_side > 0.0) {
            return fail("area_side must be positive");
        }
        if self.density_list.is_empty() || self.density_list.iter().any(|&d| !(d > 0.0)) {
            return fail("density_list must be non-empty and positive");
        }
        if !(self.r > 0.0) || !(self.r_b > 0.0) {
            return fail("r and r_b must be positive");
        }
        if self.gradient_list.is_empty() || self.gradient_list.contains(&0) {
            return fail("gradient_list must be non-empty with values >= 1");
        }
        if self.g_max != 0 {
            let max_g = *self.gradient_list.iter().max().unwrap();
            if self.g_max <= max_g {
                return fail("g_max must exceed every gradient (or 0 for automatic)");
            }
        }
        if self.max_elements < 2 {
            return fail("M must be at least 2");
        }
        if !(self.eps > 0.0) || !(self.tol > 0.0) {
            return fail("eps and tol must be positive");
        }
        if self.replicates < 1 {
            return fail("replicates must be at least 1");
        }
        Ok(())
    }

    fn g_max_for(&self, gradient: u32) -> u32 {
        if self.g_max > 0 {
            self.g_max
        } else {
            3 * gradient
        }
    }

    fn max_rounds_for(&self, region_size: usize) -> u32 {
        if self.max_rounds > 0 {
            self.max_rounds
        } else {
            (10 * region_size).max(1) as u32
        }
    }
}

fn parse_list<T: std::str::FromStr>(value: &str) -> Option<Vec<T>> {
    let items: Result<Vec<T>, _> = value.split(',').map(|s| s.trim().parse()).collect();
    items.ok().filter(|v: &Vec<T>| !v.is_empty())
}

/// Header of `records.csv`; the hop histogram is flattened to five buckets.
pub const RECORDS_CSV_HEADER: &str = "density,gradient,model,replicate,seed,n_nodes,\
apl_omni,apl_dir,cc_omni,cc_dir,components_omni,components_dir,\
giant_omni_frac,gscc_frac,gin_frac,n_peripheral,n_centroid,\
cbw_hop0,cbw_hop1,cbw_hop2,cbw_hop3,cbw_hop4plus";

/// One experiment row. `apl_*` and `cc_*` are `NaN` when undefined (no
/// reachable pair, empty network). `density` and `replicate` are stamped by
/// [`run_experiment`]; direct [`run_pipeline`] calls leave them zeroed.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub density: f64,
    pub gradient: u32,
    pub model: AntennaModel,
    pub replicate: u32,
    pub seed: u64,
    pub n_nodes: usize,
    pub apl_omni: f64,
    pub apl_dir: f64,
    pub cc_omni: f64,
    pub cc_dir: f64,
    pub components_omni: usize,
    pub components_dir: usize,
    pub giant_omni_frac: f64,
    pub gscc_frac: f64,
    pub gin_frac: f64,
    pub n_peripheral: usize,
    pub n_centroid: usize,
    /// Hop distance from each region's centroid to its maximum
    /// socio-centric-betweenness node; index = hops.
    pub cbw_hist: Vec<u64>,
}

impl MetricsRecord {
    fn hist_bucket(&self, hop: usize) -> u64 {
        self.cbw_hist.get(hop).copied().unwrap_or(0)
    }

    fn hist_tail(&self, from: usize) -> u64 {
        self.cbw_hist.iter().skip(from).sum()
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.density,
            self.gradient,
            self.model,
            self.replicate,
            self.seed,
            self.n_nodes,
            self.apl_omni,
            self.apl_dir,
            self.cc_omni,
            self.cc_dir,
            self.components_omni,
            self.components_dir,
            self.giant_omni_frac,
            self.gscc_frac,
            self.gin_frac,
            self.n_peripheral,
            self.n_centroid,
            self.hist_bucket(0),
            self.hist_bucket(1),
            self.hist_bucket(2),
            self.hist_bucket(3),
            self.hist_tail(4),
        )
    }

    /// Structural invariants every emitted row must satisfy.
    pub fn check_invariants(&self) -> Result<(), String> {
        let frac_ok = |v: f64| (0.0..=1.0).contains(&v);
        if self.n_nodes > 0 {
            for (name, v) in [
                ("giant_omni_frac", self.giant_omni_frac),
                ("gscc_frac", self.gscc_frac),
                ("gin_frac", self.gin_frac),
            ] {
                if !frac_ok(v) {
                    return Err(format!("{name} = {v} outside [0,1]"));
                }
            }
            if self.gscc_frac > self.gin_frac {
                return Err(format!(
                    "gscc_frac {} exceeds gin_frac {}",
                    self.gscc_frac, self.gin_frac
                ));
            }
        }
        Ok(())
    }
}

/// Everything one pipeline run produces; tests and graph dumps use the
/// intermediate artifacts, the experiment driver keeps only the record.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub record: MetricsRecord,
    pub thinned: Placement,
    pub pre_graph: MixedGraph,
    pub post_graph: MixedGraph,
    pub region_state: RegionState,
    pub centroids: Vec<usize>,
    pub peripherals: Vec<usize>,
    pub decisions: Vec<BeamDecision>,
    pub acks: Vec<AckEvent>,
    pub li_trace: Option<Vec<TraceRow>>,
}

/// Run the full pipeline on one placement: thin, build the omni graph, form
/// regions, elect centroids, broadcast tables, identify peripherals, commit
/// beams, and measure both the pre-beam and post-beam graphs.
pub fn run_pipeline(
    placement: &Placement,
    cfg: &ExperimentConfig,
    gradient: u32,
    seed: u64,
) -> PipelineRun {
    let params = ThinningParams::new(cfg.r_b, cfg.l_min).expect("validated r_b");
    let thinned = thin(placement, &params);
    let n = thinned.len();

    if n == 0 {
        let empty = MixedGraph::new(0);
        return PipelineRun {
            record: MetricsRecord {
                density: 0.0,
                gradient,
                model: cfg.model,
                replicate: 0,
                seed,
                n_nodes: 0,
                apl_omni: f64::NAN,
                apl_dir: f64::NAN,
                cc_omni: f64::NAN,
                cc_dir: f64::NAN,
                components_omni: 0,
                components_dir: 0,
                giant_omni_frac: 0.0,
                gscc_frac: 0.0,
                gin_frac: 0.0,
                n_peripheral: 0,
                n_centroid: 0,
                cbw_hist: Vec::new(),
            },
            thinned,
            pre_graph: empty.clone(),
            post_graph: empty,
            region_state: RegionState::from_parts(gradient, Vec::new(), Vec::new(), Vec::new()),
            centroids: Vec::new(),
            peripherals: Vec::new(),
            decisions: Vec::new(),
            acks: Vec::new(),
            li_trace: None,
        };
    }

    let pre_graph = build_omni_graph(&thinned, cfg.r);

    let mut trace = cfg.capture_trace.then(Vec::new);
    let mut region_state = lateral_inhibition_with(
        &pre_graph,
        gradient,
        seed,
        &InhibitionOptions::default(),
        trace.as_mut(),
    );

    let parts = regions(&region_state);
    let mut centroids = Vec::with_capacity(parts.len());
    for part in &parts {
        let consensus = centroid_consensus(
            part,
            &pre_graph,
            seed,
            cfg.tol,
            cfg.max_rounds_for(part.len()),
        );
        centroids.push(elect_centroid(part, &consensus, cfg.eps, &pre_graph));
    }

    let rc = broadcast_centroids(
        &pre_graph,
        &mut region_state,
        &centroids,
        cfg.g_max_for(gradient),
    );

    let peripherals = identify_peripherals(&region_state, &pre_graph);
    for &p in &peripherals {
        if region_state.role_of(p) == Role::Standard {
            region_state.set_role(p, Role::Peripheral);
        }
    }

    let antenna = AntennaConfig::new(cfg.model, cfg.max_elements, cfg.r, DEFAULT_CARRIER_HZ);
    let commit = commit_beams(&pre_graph, &region_state, &peripherals, &rc, &antenna, seed);
    let post_graph = commit.graph;

    // Centroid validation: distance from each region's centroid to the
    // maximum-betweenness node of the region subgraph.
    let mut cbw_hist: Vec<u64> = Vec::new();
    for (part, &centroid) in parts.iter().zip(&centroids) {
        let (sub, ids) = pre_graph.induced_subgraph(part);
        let bw = sociocentric_betweenness(&sub);
        let best_local = bw.argmax().expect("non-empty region");
        let best = ids[best_local];
        let hops = pre_graph
            .shortest_hops(centroid)
            .expect("valid centroid")[best];
        let hops = hops as usize;
        if cbw_hist.len() <= hops {
            cbw_hist.resize(hops + 1, 0);
        }
        cbw_hist[hops] += 1;
    }

    let apl = |g: &MixedGraph| g.average_path_length().map_or(f64::NAN, |p| p.mean_hops);
    let giant = |g: &MixedGraph| {
        g.weak_components()
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0) as f64
            / n as f64
    };

    let record = MetricsRecord {
        density: 0.0,
        gradient,
        model: cfg.model,
        replicate: 0,
        seed,
        n_nodes: n,
        apl_omni: apl(&pre_graph),
        apl_dir: apl(&post_graph),
        cc_omni: pre_graph.clustering_coefficient(),
        cc_dir: post_graph.clustering_coefficient(),
        components_omni: pre_graph.weak_components().len(),
        components_dir: post_graph.weak_components().len(),
        giant_omni_frac: giant(&pre_graph),
        gscc_frac: post_graph.gscc().len() as f64 / n as f64,
        gin_frac: post_graph.gin().len() as f64 / n as f64,
        n_peripheral: peripherals.len(),
        n_centroid: centroids.len(),
        cbw_hist,
    };

    PipelineRun {
        record,
        thinned,
        pre_graph,
        post_graph,
        region_state,
        centroids,
        peripherals,
        decisions: commit.decisions,
        acks: commit.acks,
        li_trace: trace,
    }
}

/// Run the full density × gradient × replicate grid, calling `observer` on
/// every finished pipeline run (graph dumps, traces). Records come back
/// sorted by (density, gradient, replicate).
pub fn run_experiment_with<F>(
    cfg: &ExperimentConfig,
    observer: F,
) -> Result<Vec<MetricsRecord>, HarnessError>
where
    F: Fn(&PipelineRun) + Sync,
{
    cfg.validate()?;
    let jobs: Vec<(f64, u32)> = cfg
        .density_list
        .iter()
        .flat_map(|&d| (0..cfg.replicates).map(move |k| (d, k)))
        .collect();

    let nested: Result<Vec<Vec<MetricsRecord>>, HarnessError> = jobs
        .par_iter()
        .map(|&(density, replicate)| {
            let seed = cfg.base_seed + u64::from(replicate);
            let placement = place_uniform(density, cfg.area_side, seed)?;
            let mut rows = Vec::with_capacity(cfg.gradient_list.len());
            for &gradient in &cfg.gradient_list {
                let mut run = run_pipeline(&placement, cfg, gradient, seed);
                run.record.density = density;
                run.record.replicate = replicate;
                observer(&run);
                rows.push(run.record);
            }
            Ok(rows)
        })
        .collect();

    let mut records: Vec<MetricsRecord> = nested?.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        a.density
            .total_cmp(&b.density)
            .then(a.gradient.cmp(&b.gradient))
            .then(a.replicate.cmp(&b.replicate))
    });
    for r in &records {
        if let Err(detail) = r.check_invariants() {
            return Err(HarnessError::InvariantViolation { seed: r.seed, detail });
        }
    }
    Ok(records)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<MetricsRecord>, HarnessError> {
    run_experiment_with(cfg, |_| {})
}

/// Records as one CSV string (header included).
pub fn records_to_csv(records: &[MetricsRecord]) -> String {
    let mut out = String::from(RECORDS_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Write `records.csv`; a row that fails to write is reported on stderr and
/// skipped, the remaining rows still go out.
pub fn write_records_csv(records: &[MetricsRecord], path: &Path) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{RECORDS_CSV_HEADER}")?;
    for (i, r) in records.iter().enumerate() {
        if let Err(e) = writeln!(out, "{}", r.csv_row()) {
            eprintln!("warning: failed to write record row {i}: {e}");
        }
    }
    out.flush()
}

/// Aggregate of one (density, gradient, model) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub density: f64,
    pub gradient: u32,
    pub model: AntennaModel,
    pub replicates: usize,
    pub apl_omni: (f64, f64),
    pub apl_dir: (f64, f64),
    /// Per-record `apl_dir / apl_omni`, averaged.
    pub apl_norm: (f64, f64),
    pub cc_omni: (f64, f64),
    pub cc_dir: (f64, f64),
    /// Per-record `cc_dir / cc_omni`, averaged.
    pub cc_norm: (f64, f64),
    pub components_omni_mean: f64,
    pub components_dir_mean: f64,
    pub giant_omni_frac: (f64, f64),
    pub gscc_frac: (f64, f64),
    pub gin_frac: (f64, f64),
    pub n_peripheral_mean: f64,
    pub n_centroid_mean: f64,
    pub n_nodes_mean: f64,
    /// Fraction of regions whose centroid sits within 1 (resp. 4) hops of
    /// the region's maximum-betweenness node, pooled over the cell.
    pub cbw_within1_frac: f64,
    pub cbw_within4_frac: f64,
}

/// Mean and 95% Student-t confidence half-width over the finite values.
pub fn mean_ci95(values: &[f64]) -> (f64, f64) {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let n = finite.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = finite.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = finite.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    if sd == 0.0 {
        return (mean, 0.0);
    }
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
        .expect("valid dof")
        .inverse_cdf(0.975);
    (mean, t * sd / (n as f64).sqrt())
}

/// Per (density, gradient, model) cell: means, 95% confidence half-widths,
/// per-record normalized ratios, and pooled centroid-validation fractions.
pub fn summarize(records: &[MetricsRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(u64, u32, &'static str), Vec<&MetricsRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.density.to_bits(), r.gradient, r.model.as_str()))
            .or_default()
            .push(r);
    }
    groups
        .into_values()
        .map(|rows| {
            let first = rows[0];
            let col = |f: &dyn Fn(&MetricsRecord) -> f64| -> Vec<f64> {
                rows.iter().map(|r| f(r)).collect()
            };
            let apl_norm: Vec<f64> = rows
                .iter()
                .filter(|r| r.apl_omni.is_finite() && r.apl_dir.is_finite())
                .map(|r| r.apl_dir / r.apl_omni)
                .collect();
            let cc_norm: Vec<f64> = rows
                .iter()
                .filter(|r| r.cc_omni.is_finite() && r.cc_omni > 0.0 && r.cc_dir.is_finite())
                .map(|r| r.cc_dir / r.cc_omni)
                .collect();
            let total: u64 = rows.iter().map(|r| r.hist_tail(0)).sum();
            let within = |k: usize| -> f64 {
                if total == 0 {
                    return f64::NAN;
                }
                let hits: u64 = rows
                    .iter()
                    .map(|r| (0..=k).map(|h| r.hist_bucket(h)).sum::<u64>())
                    .sum();
                hits as f64 / total as f64
            };
            SummaryRow {
                density: first.density,
                gradient: first.gradient,
                model: first.model,
                replicates: rows.len(),
                apl_omni: mean_ci95(&col(&|r| r.apl_omni)),
                apl_dir: mean_ci95(&col(&|r| r.apl_dir)),
                apl_norm: mean_ci95(&apl_norm),
                cc_omni: mean_ci95(&col(&|r| r.cc_omni)),
                cc_dir: mean_ci95(&col(&|r| r.cc_dir)),
                cc_norm: mean_ci95(&cc_norm),
                components_omni_mean: mean_ci95(&col(&|r| r.components_omni as f64)).0,
                components_dir_mean: mean_ci95(&col(&|r| r.components_dir as f64)).0,
                giant_omni_frac: mean_ci95(&col(&|r| r.giant_omni_frac)),
                gscc_frac: mean_ci95(&col(&|r| r.gscc_frac)),
                gin_frac: mean_ci95(&col(&|r| r.gin_frac)),
                n_peripheral_mean: mean_ci95(&col(&|r| r.n_peripheral as f64)).0,
                n_centroid_mean: mean_ci95(&col(&|r| r.n_centroid as f64)).0,
                n_nodes_mean: mean_ci95(&col(&|r| r.n_nodes as f64)).0,
                cbw_within1_frac: within(1),
                cbw_within4_frac: within(4),
            }
        })
        .collect()
}

pub const SUMMARY_CSV_HEADER: &str = "density,gradient,model,replicates,\
apl_omni_mean,apl_omni_ci95,apl_dir_mean,apl_dir_ci95,apl_norm_mean,apl_norm_ci95,\
cc_omni_mean,cc_omni_ci95,cc_dir_mean,cc_dir_ci95,cc_norm_mean,cc_norm_ci95,\
components_omni_mean,components_dir_mean,\
giant_omni_frac_mean,giant_omni_frac_ci95,gscc_frac_mean,gscc_frac_ci95,\
gin_frac_mean,gin_frac_ci95,n_peripheral_mean,n_centroid_mean,n_nodes_mean,\
cbw_within1_frac,cbw_within4_frac";

pub fn summary_to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_CSV_HEADER);
    out.push('\n');
    for s in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.density,
            s.gradient,
            s.model,
            s.replicates,
            s.apl_omni.0,
            s.apl_omni.1,
            s.apl_dir.0,
            s.apl_dir.1,
            s.apl_norm.0,
            s.apl_norm.1,
            s.cc_omni.0,
            s.cc_omni.1,
            s.cc_dir.0,
            s.cc_dir.1,
            s.cc_norm.0,
            s.cc_norm.1,
            s.components_omni_mean,
            s.components_dir_mean,
            s.giant_omni_frac.0,
            s.giant_omni_frac.1,
            s.gscc_frac.0,
            s.gscc_frac.1,
            s.gin_frac.0,
            s.gin_frac.1,
            s.n_peripheral_mean,
            s.n_centroid_mean,
            s.n_nodes_mean,
            s.cbw_within1_frac,
            s.cbw_within4_frac,
        ));
    }
    out
}

pub fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> std::io::Result<()> {
    std::fs::write(path, summary_to_csv(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_reference_setup() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.area_side, 500.0);
        assert_eq!(cfg.r, 30.0);
        assert_eq!(cfg.r_b, 30.0);
        assert_eq!(cfg.l_min, 5);
        assert_eq!(cfg.max_elements, 6);
        assert_eq!(cfg.replicates, 50);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn parse_overrides_and_lists() {
        let cfg = ExperimentConfig::parse(
            "area_side = 400\n\
             density_list = 1e-3, 2e-3\n\
             gradient_list = 3,5\n\
             M = 4\n\
             model = ula\n\
             replicates = 2\n\
             # comment line\n\
             base_seed = 9\n",
        )
        .unwrap();
        assert_eq!(cfg.area_side, 400.0);
        assert_eq!(cfg.density_list, vec![1e-3, 2e-3]);
        assert_eq!(cfg.gradient_list, vec![3, 5]);
        assert_eq!(cfg.max_elements, 4);
        assert_eq!(cfg.model, AntennaModel::Ula);
        assert_eq!(cfg.replicates, 2);
        assert_eq!(cfg.base_seed, 9);
    }

    #[test]
    fn parse_rejects_unknown_keys_and_bad_values() {
        assert_eq!(
            ExperimentConfig::parse("radius = 30"),
            Err(ConfigError::UnknownKey("radius".into()))
        );
        assert!(matches!(
            ExperimentConfig::parse("r = fast"),
            Err(ConfigError::InvalidValue { .. })
        ));
        assert_eq!(
            ExperimentConfig::parse("just a line"),
            Err(ConfigError::MalformedLine(1))
        );
    }

    #[test]
    fn validate_rejects_small_g_max() {
        let mut cfg = ExperimentConfig::default();
        cfg.gradient_list = vec![3, 10];
        cfg.g_max = 10;
        assert!(cfg.validate().is_err());
        cfg.g_max = 11;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn records_header_is_pinned() {
        assert_eq!(
            RECORDS_CSV_HEADER,
            "density,gradient,model,replicate,seed,n_nodes,apl_omni,apl_dir,cc_omni,cc_dir,\
components_omni,components_dir,giant_omni_frac,gscc_frac,gin_frac,n_peripheral,n_centroid,\
cbw_hop0,cbw_hop1,cbw_hop2,cbw_hop3,cbw_hop4plus"
        );
    }

    #[test]
    fn mean_ci_of_identical_values_has_zero_width() {
        let (mean, ci) = mean_ci95(&[2.5, 2.5, 2.5]);
        assert_eq!(mean, 2.5);
        assert_eq!(ci, 0.0);
    }

    #[test]
    fn normalized_apl_averages_per_record_ratios() {
        let mk = |apl_dir: f64| MetricsRecord {
            density: 1e-3,
            gradient: 3,
            model: AntennaModel::Sector,
            replicate: 0,
            seed: 1,
            n_nodes: 10,
            apl_omni: 4.0,
            apl_dir,
            cc_omni: 0.5,
            cc_dir: 0.25,
            components_omni: 1,
            components_dir: 1,
            giant_omni_frac: 1.0,
            gscc_frac: 1.0,
            gin_frac: 1.0,
            n_peripheral: 2,
            n_centroid: 1,
            cbw_hist: vec![1],
        };
        let rows = summarize(&[mk(2.0), mk(4.0)]);
        assert_eq!(rows.len(), 1);
        assert!((rows[0].apl_norm.0 - 0.75).abs() < 1e-12);
        assert!((rows[0].cc_norm.0 - 0.5).abs() < 1e-12);
        assert_eq!(rows[0].cbw_within1_frac, 1.0);
    }

    #[test]
    fn invariant_check_catches_bad_fractions() {
        let mut r = MetricsRecord {
            density: 1e-3,
            gradient: 3,
            model: AntennaModel::Sector,
            replicate: 0,
            seed: 1,
            n_nodes: 5,
            apl_omni: 1.0,
            apl_dir: 1.0,
            cc_omni: 0.0,
            cc_dir: 0.0,
            components_omni: 1,
            components_dir: 1,
            giant_omni_frac: 1.0,
            gscc_frac: 0.9,
            gin_frac: 0.5,
            n_peripheral: 0,
            n_centroid: 1,
            cbw_hist: vec![1],
        };
        assert!(r.check_invariants().is_err());
        r.gin_frac = 0.9;
        assert!(r.check_invariants().is_ok());
    }
}
