//! Preset configurations for the four classic engine families. Each
//! constructor assembles a complete [`EaConfig`] with conventional
//! operator bindings; callers then override termination and seed.
//! Presets default to a 100-generation budget.

use std::fmt;

use crate::crossover::{CrossoverOp, CrossoverSpec};
use crate::engine::{EaConfig, TerminationCriterion};
use crate::error::{EvoError, Result};
use crate::genotype::GenotypeKind;
use crate::mutation::MutationSpec;
use crate::replacement::ReplacementSpec;
use crate::selection::{ScalingSpec, SelectionSpec};
use crate::tree::PrimitiveSet;

pub const DEFAULT_GENERATION_BUDGET: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    Ga,
    Es,
    Ep,
    Gp,
}

impl Dialect {
    /// Genotype family the dialect's operators are built for.
    pub fn required_kind(self) -> GenotypeKind {
        match self {
            Dialect::Ga => GenotypeKind::BitString,
            Dialect::Es | Dialect::Ep => GenotypeKind::SelfAdaptiveRealVector,
            Dialect::Gp => GenotypeKind::ParseTree,
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::Ga => "GA",
            Dialect::Es => "ES",
            Dialect::Ep => "EP",
            Dialect::Gp => "GP",
        })
    }
}

fn default_termination() -> Vec<TerminationCriterion> {
    vec![TerminationCriterion::MaxGenerations(DEFAULT_GENERATION_BUDGET)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaReplacement {
    Generational,
    SteadyState,
}

/// Classic genetic algorithm over length-L bit-strings: roulette-wheel
/// selection with shift scaling, one-point crossover, per-bit mutation.
/// `p_c` defaults to 0.7 and `p_m` to 1/L. Steady-state replacement
/// forces lambda = 1; generational uses lambda = mu.
pub fn ga_preset(
    len: usize,
    mu: usize,
    p_c: Option<f64>,
    p_m: Option<f64>,
    replacement: GaReplacement,
    elitism_count: usize,
) -> Result<EaConfig> {
    if len < 1 {
        return Err(EvoError::InvalidConfig("bit-string length must be >= 1".into()));
    }
    let (replacement, lambda) = match replacement {
        GaReplacement::Generational => (ReplacementSpec::Generational, mu),
        GaReplacement::SteadyState => (ReplacementSpec::SteadyState, 1),
    };
    let config = EaConfig {
        mu,
        lambda,
        selection: SelectionSpec::RouletteWheel {
            scaling: Some(ScalingSpec::ShiftToPositive { epsilon: 1.0 }),
        },
        replacement,
        crossover: Some(CrossoverSpec {
            op: CrossoverOp::OnePoint,
            p_c: p_c.unwrap_or(0.7),
        }),
        mutation: MutationSpec::BitFlip { p_m: p_m.unwrap_or(1.0 / len as f64) },
        elitism_count,
        local_search: None,
        fitness_sharing: None,
        termination: default_termination(),
        seed: 0,
    };
    config.mutation.validate()?;
    if let Some(cx) = &config.crossover {
        cx.validate()?;
    }
    Ok(config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsMode {
    Plus,
    Comma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EsCrossover {
    None,
    /// Components copied whole from either parent.
    Discrete,
    /// Component-wise blend of both parents.
    Intermediate,
}

/// Evolution strategy over n-dimensional self-adaptive vectors: uniform
/// genitor choice (selection pressure lives in replacement), lognormal
/// step-size self-adaptation with tau = 1/sqrt(2n) and
/// tau' = 1/sqrt(2 sqrt(n)), plus or comma replacement. Recombination is
/// historically absent; when requested it applies to every pair.
pub fn es_preset(
    n: usize,
    mu: usize,
    lambda: usize,
    mode: EsMode,
    crossover: EsCrossover,
) -> Result<EaConfig> {
    if n < 1 {
        return Err(EvoError::InvalidConfig("dimension must be >= 1".into()));
    }
    let replacement = match mode {
        EsMode::Plus => ReplacementSpec::Plus,
        EsMode::Comma => {
            if lambda < mu {
                return Err(EvoError::InvalidConfig(format!(
                    "comma replacement needs lambda >= mu, got ({mu}, {lambda})"
                )));
            }
            ReplacementSpec::Comma
        }
    };
    let nf = n as f64;
    Ok(EaConfig {
        mu,
        lambda,
        selection: SelectionSpec::Uniform,
        replacement,
        crossover: match crossover {
            EsCrossover::None => None,
            EsCrossover::Discrete => Some(CrossoverSpec { op: CrossoverOp::Discrete, p_c: 1.0 }),
            EsCrossover::Intermediate => {
                Some(CrossoverSpec { op: CrossoverOp::Arithmetic, p_c: 1.0 })
            }
        },
        mutation: MutationSpec::SelfAdaptive {
            tau: 1.0 / (2.0 * nf).sqrt(),
            tau_prime: 1.0 / (2.0 * nf.sqrt()).sqrt(),
            sigma_floor: 1e-10,
        },
        elitism_count: 0,
        local_search: None,
        fitness_sharing: None,
        termination: default_termination(),
        seed: 0,
    })
}

/// Evolutionary programming over n-dimensional self-adaptive vectors:
/// every parent produces exactly one offspring by mutation alone, then
/// parents and offspring fight q-opponent tournaments for survival.
pub fn ep_preset(n: usize, mu: usize, q: usize) -> Result<EaConfig> {
    if n < 1 {
        return Err(EvoError::InvalidConfig("dimension must be >= 1".into()));
    }
    if mu < 1 {
        return Err(EvoError::InvalidConfig("mu must be >= 1".into()));
    }
    if q < 1 {
        return Err(EvoError::InvalidConfig(
            "stochastic plus replacement needs q >= 1".into(),
        ));
    }
    let nf = n as f64;
    Ok(EaConfig {
        mu,
        lambda: mu,
        selection: SelectionSpec::AllParents,
        replacement: ReplacementSpec::EpStochasticPlus { q },
        crossover: None,
        mutation: MutationSpec::SelfAdaptive {
            tau: 1.0 / (2.0 * nf).sqrt(),
            tau_prime: 1.0 / (2.0 * nf.sqrt()).sqrt(),
            sigma_floor: 1e-10,
        },
        elitism_count: 0,
        local_search: None,
        fitness_sharing: None,
        termination: default_termination(),
        seed: 0,
    })
}

/// Genetic programming over parse trees: tournament selection (default
/// T = 7), subtree crossover at p_c (default 0.9), subtree mutation at
/// 0.1 under a depth cap (default 17), generational replacement with one
/// elite. Pair with a tree problem whose depth cap matches `max_depth`
/// and whose initialization is ramped half-and-half.
pub fn gp_preset(
    primitives: &PrimitiveSet,
    mu: usize,
    p_c: Option<f64>,
    max_depth: Option<usize>,
    tournament: Option<usize>,
) -> Result<EaConfig> {
    if primitives.variables().is_empty() && primitives.constants().is_none() {
        return Err(EvoError::InvalidConfig(
            "primitive set has no terminals; trees could never bottom out".into(),
        ));
    }
    let config = EaConfig {
        mu,
        lambda: mu,
        selection: SelectionSpec::Tournament { t: tournament.unwrap_or(7) },
        replacement: ReplacementSpec::Generational,
        crossover: Some(CrossoverSpec {
            op: CrossoverOp::Subtree,
            p_c: p_c.unwrap_or(0.9),
        }),
        mutation: MutationSpec::Subtree {
            probability: 0.1,
            max_depth: max_depth.unwrap_or(17),
        },
        elitism_count: 1,
        local_search: None,
        fitness_sharing: None,
        termination: default_termination(),
        seed: 0,
    };
    if let Some(cx) = &config.crossover {
        cx.validate()?;
    }
    config.mutation.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;
    use crate::genotype::GenotypeSpec;
    use crate::problem::{onemax, sphere_adaptive, symreg};
    use crate::tree::TreeInit;
    use std::sync::Arc;

    #[test]
    fn ga_default_is_roulette_plus_generational() {
        let cfg = ga_preset(50, 30, None, None, GaReplacement::Generational, 1).unwrap();
        assert!(matches!(
            cfg.selection,
            SelectionSpec::RouletteWheel { scaling: Some(ScalingSpec::ShiftToPositive { .. }) }
        ));
        assert_eq!(cfg.replacement, ReplacementSpec::Generational);
        assert_eq!(cfg.lambda, 30);
        assert_eq!(cfg.mutation, MutationSpec::BitFlip { p_m: 0.02 });
        assert_eq!(cfg.crossover.as_ref().unwrap().p_c, 0.7);
        let problem = onemax(50).unwrap();
        assert!(cfg.validate(&problem).is_ok());
    }

    #[test]
    fn ga_steady_state_forces_lambda_one() {
        let cfg = ga_preset(20, 10, None, None, GaReplacement::SteadyState, 0).unwrap();
        assert_eq!(cfg.lambda, 1);
        assert_eq!(cfg.replacement, ReplacementSpec::SteadyState);
        assert!(cfg.validate(&onemax(20).unwrap()).is_ok());
    }

    #[test]
    fn ga_rejects_probabilities_outside_the_unit_interval() {
        assert!(ga_preset(10, 5, Some(1.5), None, GaReplacement::Generational, 0).is_err());
        assert!(ga_preset(10, 5, None, Some(-0.1), GaReplacement::Generational, 0).is_err());
    }

    #[test]
    fn es_comma_requires_enough_offspring() {
        assert!(es_preset(10, 15, 100, EsMode::Comma, EsCrossover::None).is_ok());
        assert!(es_preset(10, 100, 15, EsMode::Comma, EsCrossover::None).is_err());
    }

    #[test]
    fn es_preset_validates_against_an_adaptive_problem() {
        let problem = sphere_adaptive(10, -5.0, 5.0).unwrap();
        for crossover in [EsCrossover::None, EsCrossover::Discrete, EsCrossover::Intermediate] {
            let cfg = es_preset(10, 15, 100, EsMode::Comma, crossover).unwrap();
            assert!(cfg.validate(&problem).is_ok());
        }
        let plain = es_preset(10, 15, 100, EsMode::Comma, EsCrossover::None).unwrap();
        assert!(plain.crossover.is_none());
    }

    #[test]
    fn es_plus_runs_are_monotone() {
        let problem = sphere_adaptive(4, -3.0, 3.0).unwrap();
        let mut cfg = es_preset(4, 5, 20, EsMode::Plus, EsCrossover::None).unwrap();
        cfg.termination = vec![TerminationCriterion::MaxGenerations(30)];
        cfg.seed = 7;
        let trace = run(&cfg, &problem).unwrap();
        for pair in trace.rows.windows(2) {
            assert!(pair[1].best_fitness >= pair[0].best_fitness);
        }
    }

    #[test]
    fn ep_preset_shape() {
        let cfg = ep_preset(5, 20, 10).unwrap();
        assert!(cfg.crossover.is_none());
        assert_eq!(cfg.lambda, cfg.mu);
        assert_eq!(cfg.replacement, ReplacementSpec::EpStochasticPlus { q: 10 });
        assert_eq!(cfg.selection, SelectionSpec::AllParents);
        assert!(cfg.validate(&sphere_adaptive(5, -10.0, 10.0).unwrap()).is_ok());
        assert!(ep_preset(5, 0, 10).is_err());
        assert!(ep_preset(5, 20, 0).is_err());
    }

    #[test]
    fn gp_preset_shape_and_defaults() {
        let set = PrimitiveSet::arithmetic(&["x"], Some((-1.0, 1.0))).unwrap();
        let cfg = gp_preset(&set, 100, None, None, None).unwrap();
        assert_eq!(cfg.selection, SelectionSpec::Tournament { t: 7 });
        assert_eq!(cfg.replacement, ReplacementSpec::Generational);
        assert_eq!(cfg.elitism_count, 1);
        let cx = cfg.crossover.as_ref().unwrap();
        assert_eq!(cx.op, CrossoverOp::Subtree);
        assert_eq!(cx.p_c, 0.9);
        assert_eq!(cfg.mutation, MutationSpec::Subtree { probability: 0.1, max_depth: 17 });

        let dataset = vec![(-1.0, 1.0), (0.0, 0.0), (1.0, 1.0)];
        let problem = symreg(
            dataset,
            Arc::new(PrimitiveSet::arithmetic(&["x"], Some((-1.0, 1.0))).unwrap()),
            17,
            TreeInit::RampedHalfAndHalf { min_depth: 2, max_depth: 6 },
        )
        .unwrap();
        assert!(cfg.validate(&problem).is_ok());
    }

    #[test]
    fn preset_run_matches_a_hand_assembled_config() {
        let problem = onemax(10).unwrap();
        let mut preset = ga_preset(10, 8, None, None, GaReplacement::Generational, 1).unwrap();
        preset.termination = vec![TerminationCriterion::MaxGenerations(15)];
        preset.seed = 77;
        let by_hand = EaConfig {
            mu: 8,
            lambda: 8,
            selection: SelectionSpec::RouletteWheel {
                scaling: Some(ScalingSpec::ShiftToPositive { epsilon: 1.0 }),
            },
            replacement: ReplacementSpec::Generational,
            crossover: Some(CrossoverSpec { op: CrossoverOp::OnePoint, p_c: 0.7 }),
            mutation: MutationSpec::BitFlip { p_m: 0.1 },
            elitism_count: 1,
            local_search: None,
            fitness_sharing: None,
            termination: vec![TerminationCriterion::MaxGenerations(15)],
            seed: 77,
        };
        assert_eq!(run(&preset, &problem).unwrap(), run(&by_hand, &problem).unwrap());
    }

    #[test]
    fn dialect_names_and_kinds() {
        assert_eq!(Dialect::Ga.to_string(), "GA");
        assert_eq!(Dialect::Gp.required_kind(), GenotypeKind::ParseTree);
        assert_eq!(Dialect::Es.required_kind(), GenotypeKind::SelfAdaptiveRealVector);
        // Presets are meant to pair with problems of their kind.
        let spec = GenotypeSpec::self_adaptive(3, -1.0, 1.0);
        assert_eq!(spec.kind(), Dialect::Ep.required_kind());
    }
}
