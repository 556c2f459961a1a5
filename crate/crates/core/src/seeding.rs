//! Domain-separated seed derivation.
//!
//! Every stochastic stage of the pipeline (placement, virtual coordinates,
//! antenna-element draws, target picks) derives its generator from the run
//! seed plus a domain tag, and per-node draws additionally select a ChaCha
//! stream by node id. This keeps replicates reproducible bit for bit while
//! making the draws independent of iteration order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Uniform node placement inside the simulation square.
pub const DOM_PLACEMENT: u64 = 1;
/// Initial virtual coordinates for centroid consensus.
pub const DOM_VCOORD: u64 = 2;
/// Randomized head tie-break permutation (optional inhibition mode).
pub const DOM_TIEBREAK: u64 = 3;
/// Per-peripheral antenna-element count draw.
pub const DOM_ELEMENTS: u64 = 4;
/// Per-peripheral target pick among newly reachable centroids.
pub const DOM_TARGET: u64 = 5;

fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a run seed with a domain tag into an independent 64-bit seed.
pub fn mixed_seed(seed: u64, domain: u64) -> u64 {
    splitmix64(seed ^ splitmix64(domain))
}

/// Generator for a whole-run draw within one domain.
pub fn domain_rng(seed: u64, domain: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mixed_seed(seed, domain))
}

/// Generator for a per-node draw; distinct nodes use distinct streams.
pub fn node_rng(seed: u64, domain: u64, node: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(mixed_seed(seed, domain));
    rng.set_stream(node as u64);
    rng
}
