use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `count` phase masks of length `len`, each entry uniform in [0, 2π),
/// reproducible from `seed`.
pub fn random_phase_masks(seed: u64, len: usize, count: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..len).map(|_| rng.random_range(0.0..TAU)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks_are_reproducible_and_in_range() {
        let a = random_phase_masks(7, 100, 3);
        let b = random_phase_masks(7, 100, 3);
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
        assert!(a.iter().flatten().all(|&x| (0.0..TAU).contains(&x)));
    }
}
