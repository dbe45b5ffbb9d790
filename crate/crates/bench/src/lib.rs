//! Seeded fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rescon_core::{AgentId, NeighborObservation, Point, PointSet};

pub fn random_points(count: usize, dim: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Point::from((0..dim).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<_>>()))
        .collect()
}

/// Agent 1 observing `degree` random states with `σ = nκ + 2`.
pub fn observation(dim: usize, kappa: usize, degree: usize, seed: u64) -> NeighborObservation {
    let set = PointSet::from_points(random_points(degree, dim, seed)).expect("non-empty");
    NeighborObservation::with_default_sigma(AgentId(1), set, kappa).expect("degree meets the bound")
}
