//! First-improvement hill climbing bolted onto offspring, turning a
//! plain evolutionary run into a memetic one. The climber probes the
//! genotype's elementary move (bit flip, single-component Gaussian
//! nudge, pair swap, subtree regrow) and keeps a candidate only when it
//! strictly improves fitness, so the returned fitness never drops.

use crate::engine::Individual;
use crate::error::{EvoError, Result};
use crate::genotype::Genotype;
use crate::mutation::{subtree_mutate, MutationSpec};
use crate::problem::Problem;
use crate::rng::{normal, Rng};

/// Upper bound on the per-offspring evaluation budget. Keeps a config
/// typo from turning one generation into a week of hill climbing.
pub const MAX_LOCAL_SEARCH_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalSearchSpec {
    /// Fitness evaluations the climber may spend per offspring.
    pub budget: usize,
}

impl LocalSearchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.budget > MAX_LOCAL_SEARCH_BUDGET {
            return Err(EvoError::InvalidConfig(format!(
                "local search budget {} exceeds the cap of {MAX_LOCAL_SEARCH_BUDGET}",
                self.budget
            )));
        }
        Ok(())
    }
}

enum MovePlan {
    BitSweep { len: usize },
    RealNudge { n: usize, sigma: f64 },
    AdaptiveNudge { n: usize },
    PairSweep { n: usize },
    TreeRegrow { max_depth: usize },
}

/// Hill climbs from `ind`, spending at most `budget` evaluations, and
/// returns the improved individual plus the evaluations actually used.
///
/// Move strengths come from `mutation` (Gaussian sigma, subtree depth
/// cap); self-adaptive vectors use their own per-component sigmas. An
/// unevaluated input is evaluated first, off budget, to establish the
/// baseline. Bit-strings and permutations stop early once a full sweep
/// of their finite neighborhood fails to improve.
pub fn local_search<R: Rng + ?Sized>(
    ind: &Individual,
    problem: &Problem,
    budget: usize,
    mutation: &MutationSpec,
    rng: &mut R,
) -> Result<(Individual, u64)> {
    let mut current = ind.clone();
    if !current.is_evaluated() {
        current.evaluate_with(problem);
    }
    let plan = match (&current.genotype, mutation) {
        (Genotype::Bits(b), _) => MovePlan::BitSweep { len: b.len() },
        (Genotype::Real(r), MutationSpec::Gaussian { sigma }) => {
            MovePlan::RealNudge { n: r.len(), sigma: *sigma }
        }
        (Genotype::Real(_), other) => {
            return Err(EvoError::InvalidConfig(format!(
                "local search on real vectors takes its step size from a gaussian mutation \
                 spec, got a {:?} spec",
                other.kind()
            )));
        }
        (Genotype::SelfAdaptive(r), _) => MovePlan::AdaptiveNudge { n: r.len() },
        (Genotype::Perm(p), _) => MovePlan::PairSweep { n: p.len() },
        (Genotype::Tree(_), MutationSpec::Subtree { max_depth, .. }) => {
            MovePlan::TreeRegrow { max_depth: *max_depth }
        }
        (Genotype::Tree(_), other) => {
            return Err(EvoError::InvalidConfig(format!(
                "local search on trees takes its depth cap from a subtree mutation spec, \
                 got a {:?} spec",
                other.kind()
            )));
        }
    };
    if budget == 0 {
        return Ok((current, 0));
    }

    let mut used: u64 = 0;
    let mut probes_left = budget;
    // Accepts a candidate when it strictly improves; one evaluation per
    // call.
    let probe = |current: &mut Individual, candidate: Genotype, used: &mut u64| {
        let fitness = problem.fitness(&candidate);
        *used += 1;
        if fitness > current.fitness() {
            current.genotype = candidate;
            current.set_fitness(fitness);
            true
        } else {
            false
        }
    };

    match plan {
        MovePlan::BitSweep { len } => {
            let mut failures = 0;
            let mut k = 0;
            while probes_left > 0 && failures < len {
                let mut candidate = current.genotype.clone();
                if let Genotype::Bits(bits) = &mut candidate {
                    bits.bits[k] = !bits.bits[k];
                }
                if probe(&mut current, candidate, &mut used) {
                    failures = 0;
                } else {
                    failures += 1;
                }
                probes_left -= 1;
                k = (k + 1) % len;
            }
        }
        MovePlan::RealNudge { n, sigma } => {
            let mut k = 0;
            while probes_left > 0 {
                let mut candidate = current.genotype.clone();
                if let Genotype::Real(v) = &mut candidate {
                    v.values[k] += sigma * normal(rng);
                    if let Some(bounds) = &v.bounds {
                        let (lo, hi) = bounds[k];
                        v.values[k] = v.values[k].clamp(lo, hi);
                    }
                }
                probe(&mut current, candidate, &mut used);
                probes_left -= 1;
                k = (k + 1) % n;
            }
        }
        MovePlan::AdaptiveNudge { n } => {
            // Strategy parameters stay fixed during the climb; only the
            // object variables move, each by its own sigma.
            let mut k = 0;
            while probes_left > 0 {
                let mut candidate = current.genotype.clone();
                if let Genotype::SelfAdaptive(v) = &mut candidate {
                    v.values[k] += v.sigmas[k] * normal(rng);
                    if let Some(bounds) = &v.bounds {
                        let (lo, hi) = bounds[k];
                        v.values[k] = v.values[k].clamp(lo, hi);
                    }
                }
                probe(&mut current, candidate, &mut used);
                probes_left -= 1;
                k = (k + 1) % n;
            }
        }
        MovePlan::PairSweep { n } => {
            if n < 2 {
                return Ok((current, 0));
            }
            let pair_count = n * (n - 1) / 2;
            let mut pairs = Vec::with_capacity(pair_count);
            for i in 0..n {
                for j in i + 1..n {
                    pairs.push((i, j));
                }
            }
            let mut failures = 0;
            let mut idx = 0;
            while probes_left > 0 && failures < pair_count {
                let (i, j) = pairs[idx];
                let mut candidate = current.genotype.clone();
                if let Genotype::Perm(perm) = &mut candidate {
                    perm.order.swap(i, j);
                }
                if probe(&mut current, candidate, &mut used) {
                    failures = 0;
                } else {
                    failures += 1;
                }
                probes_left -= 1;
                idx = (idx + 1) % pair_count;
            }
        }
        MovePlan::TreeRegrow { max_depth } => {
            while probes_left > 0 {
                let candidate = match &current.genotype {
                    Genotype::Tree(t) => Genotype::Tree(subtree_mutate(t, max_depth, rng)),
                    _ => unreachable!(),
                };
                probe(&mut current, candidate, &mut used);
                probes_left -= 1;
            }
        }
    }
    Ok((current, used))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genotype::{BitString, Permutation, RealVector};
    use crate::problem::{onemax, sphere, tour};
    use crate::rng::stream;

    fn evaluated(problem: &Problem, g: Genotype) -> Individual {
        let fitness = problem.fitness(&g);
        Individual::evaluated(g, fitness)
    }

    #[test]
    fn zero_budget_leaves_the_individual_untouched() {
        let problem = onemax(5).unwrap();
        let start = evaluated(&problem, Genotype::Bits(BitString::parse("01010").unwrap()));
        let mut rng = stream(1);
        let (out, used) =
            local_search(&start, &problem, 0, &MutationSpec::BitFlip { p_m: 0.1 }, &mut rng)
                .unwrap();
        assert_eq!(out, start);
        assert_eq!(used, 0);
    }

    #[test]
    fn systematic_sweep_solves_onemax_from_all_zeros() {
        let problem = onemax(5).unwrap();
        let start = evaluated(&problem, Genotype::Bits(BitString::parse("00000").unwrap()));
        let mut rng = stream(2);
        let (out, used) =
            local_search(&start, &problem, 5, &MutationSpec::BitFlip { p_m: 0.1 }, &mut rng)
                .unwrap();
        assert_eq!(out.fitness(), 5.0);
        assert_eq!(used, 5, "every flip improves, so exactly L evaluations");
    }

    #[test]
    fn sweep_stops_early_at_a_local_optimum() {
        // All-ones is the global optimum; every flip fails, so the
        // climber quits after one full sweep despite a huge budget.
        let problem = onemax(8).unwrap();
        let start = evaluated(&problem, Genotype::Bits(BitString::parse("11111111").unwrap()));
        let mut rng = stream(3);
        let (out, used) =
            local_search(&start, &problem, 1000, &MutationSpec::BitFlip { p_m: 0.1 }, &mut rng)
                .unwrap();
        assert_eq!(out.fitness(), 8.0);
        assert_eq!(used, 8);
    }

    #[test]
    fn returned_fitness_never_drops() {
        let problem = sphere(4, -3.0, 3.0).unwrap();
        let mut rng = stream(4);
        for _ in 0..50 {
            let g = problem.spec().sample(&mut rng).unwrap();
            let start = evaluated(&problem, g);
            let (out, used) = local_search(
                &start,
                &problem,
                30,
                &MutationSpec::Gaussian { sigma: 0.5 },
                &mut rng,
            )
            .unwrap();
            assert!(out.fitness() >= start.fitness());
            assert!(used <= 30);
        }
    }

    #[test]
    fn gaussian_probes_improve_a_sphere_point() {
        let problem = sphere(3, -2.0, 2.0).unwrap();
        let start = evaluated(&problem, Genotype::Real(RealVector::new(vec![1.0, -1.5, 0.5])));
        let mut rng = stream(5);
        let (out, _) = local_search(
            &start,
            &problem,
            200,
            &MutationSpec::Gaussian { sigma: 0.3 },
            &mut rng,
        )
        .unwrap();
        assert!(out.fitness() > start.fitness());
    }

    #[test]
    fn pair_swaps_shorten_a_bad_tour() {
        // Four cities on a line; the optimal tour visits them in order.
        let m = vec![
            vec![0.0, 1.0, 2.0, 3.0],
            vec![1.0, 0.0, 1.0, 2.0],
            vec![2.0, 1.0, 0.0, 1.0],
            vec![3.0, 2.0, 1.0, 0.0],
        ];
        let problem = tour(m).unwrap();
        let start = evaluated(&problem, Genotype::Perm(Permutation::new(vec![0, 2, 1, 3])));
        let mut rng = stream(6);
        let (out, _) = local_search(
            &start,
            &problem,
            100,
            &MutationSpec::Swap { swaps: 1 },
            &mut rng,
        )
        .unwrap();
        assert!(out.fitness() > start.fitness());
        assert_eq!(out.fitness(), -6.0, "line tour optimum is 6");
    }

    #[test]
    fn singleton_permutations_are_returned_unchanged() {
        let problem = tour(vec![vec![0.0]]).unwrap();
        let start = evaluated(&problem, Genotype::Perm(Permutation::identity(1)));
        let mut rng = stream(7);
        let (out, used) = local_search(
            &start,
            &problem,
            50,
            &MutationSpec::Swap { swaps: 1 },
            &mut rng,
        )
        .unwrap();
        assert_eq!(out, start);
        assert_eq!(used, 0);
    }

    #[test]
    fn real_climb_without_a_gaussian_spec_is_rejected() {
        let problem = sphere(2, -1.0, 1.0).unwrap();
        let start = evaluated(&problem, Genotype::Real(RealVector::new(vec![0.5, 0.5])));
        let mut rng = stream(8);
        let err = local_search(
            &start,
            &problem,
            10,
            &MutationSpec::BitFlip { p_m: 0.5 },
            &mut rng,
        );
        assert!(err.is_err());
    }

    #[test]
    fn budget_cap_is_enforced_by_validation() {
        assert!(LocalSearchSpec { budget: MAX_LOCAL_SEARCH_BUDGET }.validate().is_ok());
        assert!(LocalSearchSpec { budget: MAX_LOCAL_SEARCH_BUDGET + 1 }.validate().is_err());
    }
}
