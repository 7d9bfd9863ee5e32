//! Seeded random r-graphs.
//!
//! A union of `r` perfect matchings of `K_n` meets every odd cut at least
//! `r` times, so it is an r-graph as soon as it is connected.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::MultiGraph;

/// Attempts before giving up on a connected union.
pub const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("vertex count {0} is not a positive even number")]
    BadOrder(usize),
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("no connected graph after {0} attempts")]
    Disconnected(usize),
}

/// Union of `r` uniformly random perfect matchings of `K_n`, retried until
/// connected. Matching `k` supplies edges `k * n/2 .. (k + 1) * n/2`.
pub fn random_r_graph(n: usize, r: usize, seed: u64) -> Result<MultiGraph, GenerateError> {
    if n == 0 || n % 2 == 1 {
        return Err(GenerateError::BadOrder(n));
    }
    if r == 0 {
        return Err(GenerateError::ZeroDegree);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..MAX_ATTEMPTS {
        let mut pairs = Vec::with_capacity(n / 2 * r);
        for _ in 0..r {
            order.shuffle(&mut rng);
            pairs.extend(order.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))));
        }
        let g = MultiGraph::new(n, &pairs).expect("no loops in a matching");
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GenerateError::Disconnected(MAX_ATTEMPTS))
}
