//! Parental selection: roulette wheel over scaled fitness, tournament,
//! uniform choice, and the everyone-breeds rule used by EP. Selection
//! works on fitness values and returns population indices, leaving the
//! population itself untouched.

use crate::error::{EvoError, Result};
use crate::rng::{distinct_indices, Rng};

#[derive(Debug, Clone, PartialEq)]
pub enum ScalingSpec {
    /// f' = f - min(f) + epsilon. Guarantees strictly positive weights.
    ShiftToPositive { epsilon: f64 },
    /// Affine map sending the mean to itself and the max to
    /// pressure * mean, floored at 0. All-equal populations fall back to
    /// uniform weights.
    Linear { pressure: f64 },
}

impl ScalingSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ScalingSpec::ShiftToPositive { epsilon } => {
                if !(epsilon > 0.0 && epsilon.is_finite()) {
                    return Err(EvoError::InvalidConfig(format!(
                        "shift scaling needs epsilon > 0, got {epsilon}"
                    )));
                }
            }
            ScalingSpec::Linear { pressure } => {
                if !(pressure > 1.0 && pressure.is_finite()) {
                    return Err(EvoError::InvalidConfig(format!(
                        "linear scaling needs a selection pressure > 1, got {pressure}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelectionSpec {
    RouletteWheel { scaling: Option<ScalingSpec> },
    /// Without-replacement tournament of size t; winner is the highest
    /// fitness, ties to the earliest population index.
    Tournament { t: usize },
    Uniform,
    /// Every parent breeds exactly once, in population order. Requires
    /// lambda = mu.
    AllParents,
}

impl SelectionSpec {
    pub fn validate(&self, mu: usize) -> Result<()> {
        match self {
            SelectionSpec::RouletteWheel { scaling } => {
                if let Some(s) = scaling {
                    s.validate()?;
                }
            }
            SelectionSpec::Tournament { t } => {
                if *t < 1 {
                    return Err(EvoError::InvalidConfig(
                        "tournament size must be >= 1".into(),
                    ));
                }
                if *t > mu {
                    return Err(EvoError::InvalidConfig(format!(
                        "tournament size {t} exceeds population size {mu}"
                    )));
                }
            }
            SelectionSpec::Uniform | SelectionSpec::AllParents => {}
        }
        Ok(())
    }
}

/// Applies a scaling rule to raw fitness values.
pub fn scale_fitness(raw: &[f64], scaling: &ScalingSpec) -> Vec<f64> {
    match *scaling {
        ScalingSpec::ShiftToPositive { epsilon } => {
            let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
            raw.iter().map(|f| f - min + epsilon).collect()
        }
        ScalingSpec::Linear { pressure } => {
            let n = raw.len() as f64;
            let mean = raw.iter().sum::<f64>() / n;
            let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max == mean {
                // All values equal: no ordering information to amplify.
                return vec![1.0; raw.len()];
            }
            let a = (pressure - 1.0) * mean / (max - mean);
            let b = mean * (1.0 - a);
            raw.iter().map(|f| (a * f + b).max(0.0)).collect()
        }
    }
}

/// k independent roulette draws over the (optionally scaled) fitness
/// values. Fails on a negative weight or an all-zero wheel.
pub fn roulette_select<R: Rng + ?Sized>(
    fitnesses: &[f64],
    k: usize,
    scaling: Option<&ScalingSpec>,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let weights: Vec<f64> = match scaling {
        Some(s) => scale_fitness(fitnesses, s),
        None => fitnesses.to_vec(),
    };
    if let Some(w) = weights.iter().find(|w| **w < 0.0) {
        return Err(EvoError::Selection(format!(
            "negative selection weight {w}; apply fitness scaling first"
        )));
    }
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut total = 0.0;
    for w in &weights {
        total += w;
        cumulative.push(total);
    }
    if !(total > 0.0) {
        return Err(EvoError::Selection(
            "selection weights sum to zero; nothing to draw from".into(),
        ));
    }
    Ok((0..k)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            cumulative.partition_point(|&c| c <= u).min(weights.len() - 1)
        })
        .collect())
}

/// k tournament draws. Each draw samples t distinct members and keeps the
/// fittest, ties to the earliest index.
pub fn tournament_select<R: Rng + ?Sized>(
    fitnesses: &[f64],
    t: usize,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let n = fitnesses.len();
    if t < 1 || t > n {
        return Err(EvoError::Selection(format!(
            "tournament size {t} invalid for population size {n}"
        )));
    }
    Ok((0..k)
        .map(|_| {
            let entrants = distinct_indices(rng, n, t);
            entrants
                .into_iter()
                .reduce(|best, i| {
                    if fitnesses[i] > fitnesses[best]
                        || (fitnesses[i] == fitnesses[best] && i < best)
                    {
                        i
                    } else {
                        best
                    }
                })
                .expect("tournament size >= 1")
        })
        .collect())
}

/// k uniform draws with repetition.
pub fn uniform_select<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    (0..k).map(|_| rng.random_range(0..n)).collect()
}

/// Draws k genitor indices according to the selection policy.
pub fn select_genitors<R: Rng + ?Sized>(
    fitnesses: &[f64],
    spec: &SelectionSpec,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    match spec {
        SelectionSpec::RouletteWheel { scaling } => {
            roulette_select(fitnesses, k, scaling.as_ref(), rng)
        }
        SelectionSpec::Tournament { t } => tournament_select(fitnesses, *t, k, rng),
        SelectionSpec::Uniform => Ok(uniform_select(fitnesses.len(), k, rng)),
        SelectionSpec::AllParents => {
            if k != fitnesses.len() {
                return Err(EvoError::Selection(format!(
                    "every-parent selection needs lambda = mu, got lambda {k} and mu {}",
                    fitnesses.len()
                )));
            }
            Ok((0..k).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn frequencies(indices: &[usize], n: usize) -> Vec<f64> {
        let mut counts = vec![0usize; n];
        for &i in indices {
            counts[i] += 1;
        }
        counts.iter().map(|&c| c as f64 / indices.len() as f64).collect()
    }

    #[test]
    fn roulette_draws_proportionally_to_fitness() {
        let mut rng = stream(1);
        let picks = roulette_select(&[1.0, 3.0], 100_000, None, &mut rng).unwrap();
        let freq = frequencies(&picks, 2);
        assert!((0.74..=0.76).contains(&freq[1]), "frequency of b: {}", freq[1]);
    }

    #[test]
    fn equal_fitness_roulette_is_uniform() {
        let mut rng = stream(2);
        let picks = roulette_select(&[5.0; 4], 100_000, None, &mut rng).unwrap();
        for (i, f) in frequencies(&picks, 4).iter().enumerate() {
            assert!((f - 0.25).abs() <= 0.01, "member {i} frequency {f}");
        }
    }

    #[test]
    fn negative_fitness_without_scaling_is_an_error() {
        let mut rng = stream(3);
        assert!(roulette_select(&[2.0, -1.0, 3.0], 10, None, &mut rng).is_err());
    }

    #[test]
    fn all_zero_wheel_is_an_error() {
        let mut rng = stream(4);
        assert!(roulette_select(&[0.0, 0.0], 10, None, &mut rng).is_err());
    }

    #[test]
    fn zero_weight_members_are_never_drawn() {
        let mut rng = stream(5);
        let picks = roulette_select(&[0.0, 1.0, 0.0, 2.0], 50_000, None, &mut rng).unwrap();
        assert!(picks.iter().all(|&i| i == 1 || i == 3));
    }

    #[test]
    fn shift_scaling_matches_hand_values() {
        let scaled = scale_fitness(&[-2.0, 0.0, 3.0], &ScalingSpec::ShiftToPositive {
            epsilon: 1.0,
        });
        assert_eq!(scaled, vec![1.0, 3.0, 6.0]);
    }

    #[test]
    fn linear_scaling_pins_max_at_pressure_times_mean() {
        let scaled = scale_fitness(&[1.0, 2.0, 3.0], &ScalingSpec::Linear { pressure: 2.0 });
        assert_eq!(scaled, vec![0.0, 2.0, 4.0]);
        let mean = scaled.iter().sum::<f64>() / 3.0;
        let max = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(max, 2.0 * mean);
    }

    #[test]
    fn linear_scaling_on_equal_fitnesses_falls_back_to_uniform() {
        let scaled = scale_fitness(&[7.0, 7.0, 7.0], &ScalingSpec::Linear { pressure: 2.0 });
        assert_eq!(scaled, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn scaling_rescues_negative_fitnesses_for_the_wheel() {
        let mut rng = stream(6);
        let scaling = ScalingSpec::ShiftToPositive { epsilon: 1.0 };
        let picks = roulette_select(&[-2.0, 0.0, 3.0], 10_000, Some(&scaling), &mut rng);
        assert!(picks.is_ok());
    }

    #[test]
    fn full_tournament_always_returns_the_best() {
        let fit = [0.5, 2.0, 1.0, 1.5];
        let mut rng = stream(7);
        let picks = tournament_select(&fit, 4, 200, &mut rng).unwrap();
        assert!(picks.iter().all(|&i| i == 1));
    }

    #[test]
    fn tournament_ties_go_to_the_earliest_index() {
        let fit = [1.0, 3.0, 3.0, 0.5];
        let mut rng = stream(8);
        let picks = tournament_select(&fit, 4, 200, &mut rng).unwrap();
        assert!(picks.iter().all(|&i| i == 1));
    }

    #[test]
    fn pairwise_tournament_matches_enumerated_probability() {
        // With 3 distinct fitnesses and t=2, the best wins whenever it is
        // drawn: 2 of the 3 equally likely pairs.
        let fit = [1.0, 5.0, 3.0];
        let mut rng = stream(9);
        let picks = tournament_select(&fit, 2, 100_000, &mut rng).unwrap();
        let freq = frequencies(&picks, 3);
        assert!((freq[1] - 2.0 / 3.0).abs() <= 0.01, "best frequency {}", freq[1]);
        assert!((freq[2] - 1.0 / 3.0).abs() <= 0.01, "middle frequency {}", freq[2]);
        assert!(freq[0] == 0.0, "worst can never win a pairwise tournament");
    }

    #[test]
    fn oversized_tournament_is_rejected() {
        let mut rng = stream(10);
        assert!(tournament_select(&[1.0, 2.0], 3, 1, &mut rng).is_err());
        assert!(SelectionSpec::Tournament { t: 3 }.validate(2).is_err());
    }

    #[test]
    fn all_parents_selection_is_the_identity_ordering() {
        let mut rng = stream(11);
        let picks =
            select_genitors(&[1.0, 2.0, 3.0], &SelectionSpec::AllParents, 3, &mut rng).unwrap();
        assert_eq!(picks, vec![0, 1, 2]);
        assert!(
            select_genitors(&[1.0, 2.0, 3.0], &SelectionSpec::AllParents, 2, &mut rng).is_err()
        );
    }

    #[test]
    fn uniform_selection_covers_the_population() {
        let mut rng = stream(12);
        let picks = uniform_select(5, 100_000, &mut rng);
        for (i, f) in frequencies(&picks, 5).iter().enumerate() {
            assert!((f - 0.2).abs() <= 0.01, "member {i} frequency {f}");
        }
    }
}
