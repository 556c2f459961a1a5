//! Node deployment: uniform placement, Bettstetter thinning, unit-disk graph.
//!
//! All three generation operations are pure functions of their inputs and
//! seed, so independent experiment replicates can run them concurrently.

use std::io::{self, Write};

use rand::Rng;
use statrs::function::gamma::gamma_lr;
use thiserror::Error;

use crate::graph::MixedGraph;
use crate::seeding::{self, DOM_PLACEMENT};

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("density must be positive, got {0}")]
    InvalidDensity(f64),
    #[error("area side must be positive, got {0}")]
    InvalidArea(f64),
    #[error("configuration yields zero nodes")]
    ZeroNodes,
    #[error("Bettstetter radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("expected-survivor formula did not evaluate to a finite value")]
    NonFinite,
}

/// A set of nodes with 2-D positions inside `[0, area_side]^2`.
///
/// Node ids are dense and zero-based: node `i` sits at `coords()[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    coords: Vec<(f64, f64)>,
    area_side: f64,
    rng_seed: u64,
}

impl Placement {
    /// Placement from explicit coordinates; all must lie inside the square.
    pub fn from_coords(coords: Vec<(f64, f64)>, area_side: f64, rng_seed: u64) -> Self {
        assert!(area_side > 0.0);
        assert!(
            coords
                .iter()
                .all(|&(x, y)| (0.0..=area_side).contains(&x) && (0.0..=area_side).contains(&y)),
            "coordinates must lie inside the deployment square"
        );
        Self { coords, area_side, rng_seed }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }

    pub fn area_side(&self) -> f64 {
        self.area_side
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    /// CSV with header `id,x,y`; coordinates keep full precision.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "id,x,y")?;
        for (id, (x, y)) in self.coords.iter().enumerate() {
            writeln!(out, "{id},{x:.12e},{y:.12e}")?;
        }
        Ok(())
    }
}

/// Parameters of the Bettstetter thinning pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThinningParams {
    r_b: f64,
    l_min: usize,
}

impl ThinningParams {
    pub fn new(r_b: f64, l_min: usize) -> Result<Self, TopologyError> {
        if !(r_b > 0.0) {
            return Err(TopologyError::InvalidRadius(r_b));
        }
        Ok(Self { r_b, l_min })
    }

    pub fn r_b(&self) -> f64 {
        self.r_b
    }

    pub fn l_min(&self) -> usize {
        self.l_min
    }
}

/// Draw `round(density * area_side^2)` nodes independently and uniformly
/// from the square. Identical `(seed, density, area_side)` yield bit-identical
/// output.
pub fn place_uniform(
    density: f64,
    area_side: f64,
    seed: u64,
) -> Result<Placement, TopologyError> {
    if !(density > 0.0) {
        return Err(TopologyError::InvalidDensity(density));
    }
    if !(area_side > 0.0) {
        return Err(TopologyError::InvalidArea(area_side));
    }
    let n = (density * area_side * area_side).round() as usize;
    if n == 0 {
        return Err(TopologyError::ZeroNodes);
    }
    let mut rng = seeding::domain_rng(seed, DOM_PLACEMENT);
    let coords = (0..n)
        .map(|_| {
            let x: f64 = rng.gen::<f64>() * area_side;
            let y: f64 = rng.gen::<f64>() * area_side;
            (x, y)
        })
        .collect();
    Ok(Placement {
        coords,
        area_side,
        rng_seed: seed,
    })
}

/// One simultaneous thinning pass: survivors are exactly the nodes with at
/// least `l_min` other nodes at distance <= `r_b` in the original placement.
/// Surviving ids are re-indexed densely, preserving original order.
pub fn thin(p: &Placement, params: &ThinningParams) -> Placement {
    let r2 = params.r_b * params.r_b;
    let coords = p.coords();
    let survivors: Vec<(f64, f64)> = coords
        .iter()
        .enumerate()
        .filter(|(i, &(xi, yi))| {
            let mut neighbors = 0usize;
            for (j, &(xj, yj)) in coords.iter().enumerate() {
                if *i == j {
                    continue;
                }
                let (dx, dy) = (xi - xj, yi - yj);
                if dx * dx + dy * dy <= r2 {
                    neighbors += 1;
                    if neighbors >= params.l_min {
                        break;
                    }
                }
            }
            neighbors >= params.l_min
        })
        .map(|(_, &c)| c)
        .collect();
    Placement {
        coords: survivors,
        area_side: p.area_side,
        rng_seed: p.rng_seed,
    }
}

/// Expected survivor count of the thinning process, evaluated exactly as the
/// closed form is printed: `rho * A * (1 - Gamma(r_b, rho*r_b^2*pi) / (r_b-1)!)`
/// with the upper incomplete gamma function and `(r_b-1)! = Gamma(r_b)` for
/// non-integer radii. Exposed as a diagnostic; the pipeline never uses it.
pub fn expected_survivors(density: f64, area: f64, r_b: f64) -> Result<f64, TopologyError> {
    if !(density > 0.0) {
        return Err(TopologyError::InvalidDensity(density));
    }
    if !(area > 0.0) {
        return Err(TopologyError::InvalidArea(area));
    }
    if !(r_b > 0.0) {
        return Err(TopologyError::InvalidRadius(r_b));
    }
    let x = density * r_b * r_b * std::f64::consts::PI;
    // 1 - Gamma(r_b, x)/Gamma(r_b) equals the regularized lower incomplete
    // gamma; evaluating it directly sidesteps both the factorial overflow
    // and the cancellation when the upper tail is close to one.
    let value = density * area * gamma_lr(r_b, x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(TopologyError::NonFinite)
    }
}

/// Unit-disk graph: symmetric omni edge iff `0 < dist(u,v) <= r` (closed
/// disk), no beam edges, no self-loops. Positions are carried along.
pub fn build_omni_graph(p: &Placement, r: f64) -> MixedGraph {
    assert!(r > 0.0, "transmission range must be positive");
    let r2 = r * r;
    let coords = p.coords();
    let mut g = MixedGraph::with_positions(coords.to_vec());
    for (u, &(xu, yu)) in coords.iter().enumerate() {
        for (v, &(xv, yv)) in coords.iter().enumerate().skip(u + 1) {
            let (dx, dy) = (xu - xv, yu - yv);
            let d2 = dx * dx + dy * dy;
            if d2 > 0.0 && d2 <= r2 {
                g.add_omni_edge(u, v);
            }
        }
    }
    g
}
