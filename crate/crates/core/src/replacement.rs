//! Survivor replacement engines. All functions consume evaluated
//! individuals and return the next parent population in a deterministic
//! order; fitness ties are broken offspring-first, then by lowest index,
//! so reruns are bit-identical.

use crate::engine::Individual;
use crate::error::{EvoError, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub enum ReplacementSpec {
    /// Parents and offspring compete; the mu best survive.
    Plus,
    /// The mu best offspring survive; parents are discarded. Requires
    /// lambda >= mu.
    Comma,
    /// Offspring replace parents wholesale, tempered by elitism_count.
    /// Requires lambda = mu.
    Generational,
    /// One child per generation replaces the worst parent if at least as
    /// fit. Requires lambda = 1.
    SteadyState,
    /// Tournament-scored plus replacement: everyone meets q random
    /// opponents and the mu best scores survive.
    EpStochasticPlus { q: usize },
}

impl ReplacementSpec {
    pub fn validate(&self, mu: usize, lambda: usize) -> Result<()> {
        match self {
            ReplacementSpec::Plus => {}
            ReplacementSpec::Comma => {
                if lambda < mu {
                    return Err(EvoError::InvalidConfig(format!(
                        "comma replacement needs lambda >= mu, got lambda {lambda} and mu {mu}"
                    )));
                }
            }
            ReplacementSpec::Generational => {
                if lambda != mu {
                    return Err(EvoError::InvalidConfig(format!(
                        "generational replacement needs lambda = mu, got lambda {lambda} and mu {mu}"
                    )));
                }
            }
            ReplacementSpec::SteadyState => {
                if lambda != 1 {
                    return Err(EvoError::InvalidConfig(format!(
                        "steady-state replacement needs lambda = 1, got {lambda}"
                    )));
                }
            }
            ReplacementSpec::EpStochasticPlus { q } => {
                if *q < 1 {
                    return Err(EvoError::InvalidConfig(
                        "stochastic plus replacement needs q >= 1".into(),
                    ));
                }
                if lambda != mu {
                    return Err(EvoError::InvalidConfig(format!(
                        "stochastic plus replacement needs lambda = mu, got lambda {lambda} and mu {mu}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The mu fittest of parents + offspring survive, ties to offspring.
/// Output sorted best-first.
pub fn plus_replacement(
    parents: &[Individual],
    offspring: &[Individual],
    mu: usize,
) -> Vec<Individual> {
    // Offspring listed first so the stable sort realizes the tie rule.
    let mut union: Vec<&Individual> = offspring.iter().chain(parents).collect();
    union.sort_by(|a, b| b.fitness().total_cmp(&a.fitness()));
    union.into_iter().take(mu).cloned().collect()
}

/// The mu fittest offspring survive; parents vanish. Output sorted
/// best-first.
pub fn comma_replacement(offspring: &[Individual], mu: usize) -> Result<Vec<Individual>> {
    if offspring.len() < mu {
        return Err(EvoError::InvalidConfig(format!(
            "comma replacement needs lambda >= mu, got lambda {} and mu {mu}",
            offspring.len()
        )));
    }
    let mut pool: Vec<&Individual> = offspring.iter().collect();
    pool.sort_by(|a, b| b.fitness().total_cmp(&a.fitness()));
    Ok(pool.into_iter().take(mu).cloned().collect())
}

/// Offspring replace parents in place. When elitism is on and the best
/// offspring falls short of the best parent, the e best parents overwrite
/// the e worst offspring at their positions.
pub fn generational_replacement(
    parents: &[Individual],
    offspring: &[Individual],
    elitism_count: usize,
) -> Result<Vec<Individual>> {
    if parents.len() != offspring.len() {
        return Err(EvoError::InvalidConfig(format!(
            "generational replacement needs lambda = mu, got lambda {} and mu {}",
            offspring.len(),
            parents.len()
        )));
    }
    let mut next: Vec<Individual> = offspring.to_vec();
    apply_elitism(parents, &mut next, elitism_count);
    Ok(next)
}

/// Retains the e best parents by overwriting the e worst members of the
/// incoming population, but only when the best newcomer is strictly worse
/// than the best parent. No-op for e = 0.
pub(crate) fn apply_elitism(parents: &[Individual], next: &mut [Individual], e: usize) {
    if e == 0 || parents.is_empty() || next.is_empty() {
        return;
    }
    let best_parent = parents
        .iter()
        .map(Individual::fitness)
        .fold(f64::NEG_INFINITY, f64::max);
    let best_next = next
        .iter()
        .map(Individual::fitness)
        .fold(f64::NEG_INFINITY, f64::max);
    if best_next >= best_parent {
        return;
    }
    let mut parent_rank: Vec<usize> = (0..parents.len()).collect();
    parent_rank.sort_by(|&a, &b| parents[b].fitness().total_cmp(&parents[a].fitness()));
    let mut victim_rank: Vec<usize> = (0..next.len()).collect();
    victim_rank.sort_by(|&a, &b| next[a].fitness().total_cmp(&next[b].fitness()));
    for k in 0..e.min(parents.len()).min(next.len()) {
        next[victim_rank[k]] = parents[parent_rank[k]].clone();
    }
}

/// Replaces the worst member with the child when the child is at least as
/// fit; otherwise the population is returned unchanged.
pub fn steady_state_replace(pop: &[Individual], child: &Individual) -> Vec<Individual> {
    let mut next = pop.to_vec();
    let worst = (0..next.len())
        .min_by(|&a, &b| next[a].fitness().total_cmp(&next[b].fitness()))
        .expect("population is non-empty");
    if child.fitness() >= next[worst].fitness() {
        next[worst] = child.clone();
    }
    next
}

/// Stochastic plus replacement: each of the 2*mu candidates scores one
/// point per win (fitness >= opponent) against q opponents drawn with
/// replacement from the other candidates; the mu best scores survive.
/// Output sorted by score, then fitness, then offspring before parents.
pub fn ep_stochastic_plus<R: Rng + ?Sized>(
    parents: &[Individual],
    offspring: &[Individual],
    q: usize,
    rng: &mut R,
) -> Result<Vec<Individual>> {
    let mu = parents.len();
    if mu == 0 {
        return Err(EvoError::InvalidConfig(
            "stochastic plus replacement needs at least one parent".into(),
        ));
    }
    if offspring.len() != mu {
        return Err(EvoError::InvalidConfig(format!(
            "stochastic plus replacement needs lambda = mu, got lambda {} and mu {mu}",
            offspring.len()
        )));
    }
    let candidates: Vec<&Individual> = parents.iter().chain(offspring).collect();
    let total = candidates.len();
    let scores: Vec<usize> = (0..total)
        .map(|i| {
            (0..q)
                .filter(|_| {
                    let r = rng.random_range(0..total - 1);
                    let opponent = if r >= i { r + 1 } else { r };
                    candidates[i].fitness() >= candidates[opponent].fitness()
                })
                .count()
        })
        .collect();
    let mut rank: Vec<usize> = (0..total).collect();
    rank.sort_by(|&a, &b| {
        scores[b]
            .cmp(&scores[a])
            .then_with(|| candidates[b].fitness().total_cmp(&candidates[a].fitness()))
            // Offspring occupy indices mu..2mu; they outrank parents on
            // full ties.
            .then_with(|| (a < mu).cmp(&(b < mu)))
            .then_with(|| a.cmp(&b))
    });
    Ok(rank.into_iter().take(mu).map(|i| candidates[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genotype::{BitString, Genotype};
    use crate::rng::stream;

    fn ind(fitness: f64) -> Individual {
        Individual::evaluated(Genotype::Bits(BitString::parse("0").unwrap()), fitness)
    }

    fn inds(fitnesses: &[f64]) -> Vec<Individual> {
        fitnesses.iter().map(|&f| ind(f)).collect()
    }

    fn fits(pop: &[Individual]) -> Vec<f64> {
        pop.iter().map(Individual::fitness).collect()
    }

    #[test]
    fn plus_keeps_the_best_of_the_union() {
        let survivors = plus_replacement(&inds(&[5.0, 3.0]), &inds(&[4.0, 1.0]), 2);
        assert_eq!(fits(&survivors), vec![5.0, 4.0]);
    }

    #[test]
    fn plus_ties_favor_the_offspring() {
        let parents = inds(&[3.0, 2.0]);
        let mut offspring = inds(&[2.0]);
        offspring[0].birth_generation = 9;
        let survivors = plus_replacement(&parents, &offspring, 2);
        assert_eq!(fits(&survivors), vec![3.0, 2.0]);
        assert_eq!(survivors[1].birth_generation, 9, "tie must go to the offspring");
    }

    #[test]
    fn plus_never_loses_the_union_best() {
        let mut rng = stream(1);
        for _ in 0..200 {
            let parents: Vec<Individual> =
                (0..4).map(|_| ind((rng.random::<f64>() * 10.0).round())).collect();
            let offspring: Vec<Individual> =
                (0..6).map(|_| ind((rng.random::<f64>() * 10.0).round())).collect();
            let best = parents
                .iter()
                .chain(&offspring)
                .map(Individual::fitness)
                .fold(f64::NEG_INFINITY, f64::max);
            let survivors = plus_replacement(&parents, &offspring, 4);
            assert_eq!(survivors[0].fitness(), best);
        }
    }

    #[test]
    fn comma_takes_the_best_offspring_only() {
        let survivors = comma_replacement(&inds(&[1.0, 2.0, 3.0, 4.0]), 2).unwrap();
        assert_eq!(fits(&survivors), vec![4.0, 3.0]);
    }

    #[test]
    fn comma_with_equal_sizes_keeps_every_offspring() {
        let offspring = inds(&[2.0, 1.0, 3.0]);
        let survivors = comma_replacement(&offspring, 3).unwrap();
        assert_eq!(fits(&survivors), vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn comma_rejects_too_few_offspring() {
        assert!(comma_replacement(&inds(&[1.0]), 2).is_err());
    }

    #[test]
    fn generational_without_elitism_is_wholesale() {
        let parents = inds(&[9.0, 8.0]);
        let offspring = inds(&[1.0, 2.0]);
        let next = generational_replacement(&parents, &offspring, 0).unwrap();
        assert_eq!(fits(&next), vec![1.0, 2.0]);
    }

    #[test]
    fn elitism_rescues_the_best_parent() {
        let parents = inds(&[9.0, 4.0]);
        let offspring = inds(&[7.0, 2.0]);
        let next = generational_replacement(&parents, &offspring, 1).unwrap();
        // Worst offspring (2.0, position 1) gives way to the best parent.
        assert_eq!(fits(&next), vec![7.0, 9.0]);
    }

    #[test]
    fn elitism_stays_quiet_when_offspring_lead() {
        let parents = inds(&[5.0, 4.0]);
        let offspring = inds(&[5.0, 1.0]);
        let next = generational_replacement(&parents, &offspring, 1).unwrap();
        assert_eq!(fits(&next), vec![5.0, 1.0]);
    }

    #[test]
    fn steady_state_ignores_a_worse_child() {
        let pop = inds(&[5.0, 3.0]);
        let next = steady_state_replace(&pop, &ind(2.0));
        assert_eq!(fits(&next), vec![5.0, 3.0]);
    }

    #[test]
    fn steady_state_replaces_the_worst_with_a_better_child() {
        let pop = inds(&[5.0, 3.0]);
        let next = steady_state_replace(&pop, &ind(4.0));
        assert_eq!(fits(&next), vec![5.0, 4.0]);
    }

    #[test]
    fn steady_state_best_is_monotone_over_repeated_steps() {
        let mut rng = stream(2);
        let mut pop = inds(&[1.0, 2.0, 3.0]);
        let mut best = 3.0;
        for _ in 0..500 {
            let child = ind((rng.random::<f64>() * 10.0).round());
            pop = steady_state_replace(&pop, &child);
            let now = fits(&pop).into_iter().fold(f64::NEG_INFINITY, f64::max);
            assert!(now >= best);
            best = now;
        }
    }

    #[test]
    fn two_candidate_duel_keeps_the_fitter_offspring() {
        let parents = inds(&[1.0]);
        let offspring = inds(&[2.0]);
        for q in [1, 3, 10] {
            let mut rng = stream(3);
            let survivors = ep_stochastic_plus(&parents, &offspring, q, &mut rng).unwrap();
            assert_eq!(fits(&survivors), vec![2.0]);
        }
    }

    #[test]
    fn stochastic_plus_always_returns_mu_survivors() {
        let mut rng = stream(4);
        for _ in 0..100 {
            let parents: Vec<Individual> =
                (0..5).map(|_| ind(rng.random::<f64>() * 10.0)).collect();
            let offspring: Vec<Individual> =
                (0..5).map(|_| ind(rng.random::<f64>() * 10.0)).collect();
            let survivors = ep_stochastic_plus(&parents, &offspring, 10, &mut rng).unwrap();
            assert_eq!(survivors.len(), 5);
        }
    }

    #[test]
    fn large_q_converges_to_deterministic_plus() {
        let mut rng = stream(5);
        let mut agreements = 0;
        let instances = 100;
        for _ in 0..instances {
            // Distinct fitnesses so both survivor sets are unambiguous.
            let mut values: Vec<f64> = (0..10).map(|i| i as f64).collect();
            for i in (1..values.len()).rev() {
                let j = rng.random_range(0..=i);
                values.swap(i, j);
            }
            let parents = inds(&values[..5]);
            let offspring = inds(&values[5..]);
            let stochastic = ep_stochastic_plus(&parents, &offspring, 1000, &mut rng).unwrap();
            let deterministic = plus_replacement(&parents, &offspring, 5);
            let mut a = fits(&stochastic);
            let mut b = fits(&deterministic);
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            if a == b {
                agreements += 1;
            }
        }
        assert!(agreements >= 99, "only {agreements}/{instances} agreed");
    }
}
