//! Seeded generators of compatible models, used as controls in tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::model::{deterministic_model, mixture, EmpiricalModel, Scenario};
use crate::rational::{ratio, Rational};

/// Random weights summing to one, each a multiple of `1/denominator`.
pub fn random_weights<R: Rng>(rng: &mut R, count: usize, denominator: i64) -> Vec<Rational> {
    assert!(count > 0 && denominator > 0);
    let mut cuts: Vec<i64> = (0..count - 1)
        .map(|_| rng.gen_range(0..=denominator))
        .collect();
    cuts.push(0);
    cuts.push(denominator);
    cuts.sort_unstable();
    cuts.windows(2)
        .map(|w| ratio(w[1] - w[0], denominator))
        .collect()
}

/// A convex mixture of `count` random deterministic models.
pub fn deterministic_mixture<R: Rng>(
    rng: &mut R,
    scenario: &Scenario,
    count: usize,
) -> Result<EmpiricalModel> {
    let global = scenario.global_context();
    let n = scenario.num_sections(&global)?;
    let models = (0..count)
        .map(|_| deterministic_model(scenario, &scenario.section_at(&global, rng.gen_range(0..n))))
        .collect::<Result<Vec<_>>>()?;
    let weights = random_weights(rng, count, 60);
    mixture(&models, &weights)
}

/// A contextual model from `bases` mixed with a random deterministic
/// mixture. Mixing keeps every pair of tables compatible, and the result may
/// fall at any tier depending on the weights.
pub fn perturbed_model<R: Rng>(rng: &mut R, bases: &[EmpiricalModel]) -> Result<EmpiricalModel> {
    let base = bases.choose(rng).expect("non-empty bases").clone();
    let count = rng.gen_range(1..=3);
    let noise = deterministic_mixture(rng, base.scenario(), count)?;
    let lambda = ratio(rng.gen_range(0..=12), 12);
    mixture(
        &[base, noise],
        &[Rational::from_integer(1.into()) - &lambda, lambda],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::sum;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn weights_normalize() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for count in 1..6 {
            let w = random_weights(&mut rng, count, 7);
            assert_eq!(w.len(), count);
            assert_eq!(sum(&w), ratio(1, 1));
        }
    }
}
