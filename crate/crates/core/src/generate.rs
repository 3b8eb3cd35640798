//! Seeded G(n, p) generation.

use num_traits::NumCast;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GraphError;
use crate::graph::{Edge, WeightedDigraph};
use crate::scalar::Weight;

/// Attempts drawn from the seeded stream before giving up on connectivity.
pub const GNP_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnpSpec {
    pub n: usize,
    pub p: f64,
    pub w_max: u64,
    pub seed: u64,
    pub directed: bool,
}

/// Samples G(n, p) with independent weights uniform in `[1, w_max]`.
///
/// Candidate pairs are visited in lexicographic order (`u < v` when
/// undirected, all ordered pairs when directed); each draws one Bernoulli
/// trial and, when kept, one weight. A disconnected sample is discarded and
/// the next attempt continues the same ChaCha8 stream, so the output is a
/// pure function of the spec.
pub fn generate_gnp<W: Weight>(spec: &GnpSpec) -> Result<WeightedDigraph<W>, GraphError> {
    let GnpSpec { n, p, w_max, seed, directed } = *spec;
    if n < 2 {
        return Err(GraphError::GeneratorParam(format!("n must be at least 2, got {n}")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(GraphError::GeneratorParam(format!("p must lie in (0, 1], got {p}")));
    }
    if w_max == 0 {
        return Err(GraphError::GeneratorParam("wmax must be positive".into()));
    }
    let w_max_w: W = <W as NumCast>::from(w_max).ok_or(GraphError::WeightRange)?;
    // Weights above the default bound are legal for generated graphs when asked for.
    let bound = crate::graph::default_w_max::<W>(n).map_or(w_max_w, |d| d.max(w_max_w));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GNP_ATTEMPTS {
        let edges = sample_edges::<W>(&mut rng, n, p, w_max, directed);
        match WeightedDigraph::with_w_max(n, directed, edges, bound) {
            Ok(g) => return Ok(g),
            Err(GraphError::Disconnected { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GraphError::GeneratorDisconnected { seed, attempts: GNP_ATTEMPTS })
}

fn sample_edges<W: Weight>(rng: &mut ChaCha8Rng, n: usize, p: f64, w_max: u64, directed: bool) -> Vec<Edge<W>> {
    let mut edges = Vec::new();
    for u in 1..=n {
        let first = if directed { 1 } else { u + 1 };
        for v in first..=n {
            if u == v {
                continue;
            }
            if rng.gen_bool(p) {
                let w = rng.gen_range(1..=w_max);
                let weight = <W as NumCast>::from(w).expect("weight checked against the scalar range");
                edges.push(Edge { from: u, to: v, weight });
            }
        }
    }
    edges
}
