//! Seeded fixtures shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use signlab_core::{DiscreteDistribution, WeightVector};

/// A unit weight vector of length 2n drawn from a fixed seed.
pub fn unit_weights(n: usize, seed: u64) -> WeightVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    WeightVector::random_unit(n, &mut rng).expect("n ≥ 1")
}

/// The distributions the equivalence checks are usually run against.
pub fn standard_distributions() -> Vec<(&'static str, DiscreteDistribution)> {
    vec![
        ("rademacher", DiscreteDistribution::rademacher()),
        ("uniform", DiscreteDistribution::uniform(&[-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap()),
        ("geometric", DiscreteDistribution::truncated_geometric(0.5, 20).unwrap()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_seeded() {
        assert_eq!(unit_weights(4, 1), unit_weights(4, 1));
        assert_ne!(unit_weights(4, 1), unit_weights(4, 2));
        assert!((unit_weights(5, 3).norm() - 1.0).abs() < 1e-12);
        assert_eq!(standard_distributions().len(), 3);
    }
}
