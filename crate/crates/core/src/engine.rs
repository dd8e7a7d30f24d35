//! The generational loop: initialize, evaluate, select, vary, evaluate,
//! replace, record. The engine always maximizes; minimization problems
//! arrive pre-negated from the problem layer.
//!
//! Every stochastic draw happens on one logical stream in a fixed order
//! (selection, per-pair crossover coin, crossover, mutation, local
//! search, replacement), so a (config, problem, seed) triple pins down
//! the entire run bit for bit.

use std::fmt;
use std::time::Instant;

use crate::crossover::{crossover_pair, CrossoverSpec};
use crate::error::{EvoError, Result};
use crate::genotype::{Genotype, GenotypeSpec};
use crate::local_search::{local_search, LocalSearchSpec};
use crate::mutation::{mutate, MutationSpec};
use crate::problem::Problem;
use crate::replacement::{
    apply_elitism, comma_replacement, ep_stochastic_plus, generational_replacement,
    plus_replacement, steady_state_replace, ReplacementSpec,
};
use crate::rng::{stream, RandomStream, Rng};
use crate::selection::{scale_fitness, select_genitors, ScalingSpec, SelectionSpec};
use crate::stats::{population_diversity, shared_fitness, SharingSpec};

/// One candidate solution plus bookkeeping. Fitness is in internal
/// (maximize) units and, once set, always equals a fresh evaluation of
/// the genotype.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genotype: Genotype,
    fitness: Option<f64>,
    pub birth_generation: u64,
}

impl Individual {
    pub fn new(genotype: Genotype, birth_generation: u64) -> Self {
        Individual { genotype, fitness: None, birth_generation }
    }

    pub fn evaluated(genotype: Genotype, fitness: f64) -> Self {
        Individual { genotype, fitness: Some(fitness), birth_generation: 0 }
    }

    /// Internal-units fitness. Panics on an unevaluated individual;
    /// populations at generation boundaries are always evaluated.
    pub fn fitness(&self) -> f64 {
        self.fitness.expect("fitness read before evaluation")
    }

    pub fn fitness_opt(&self) -> Option<f64> {
        self.fitness
    }

    pub fn is_evaluated(&self) -> bool {
        self.fitness.is_some()
    }

    pub fn evaluate_with(&mut self, problem: &Problem) {
        self.fitness = Some(problem.fitness(&self.genotype));
    }

    pub fn set_fitness(&mut self, fitness: f64) {
        self.fitness = Some(fitness);
    }
}

/// Populations are plain ordered vectors; the engine holds the
/// generation counter. Size equals mu at every generation boundary.
pub type Population = Vec<Individual>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TerminationCriterion {
    MaxEvaluations(u64),
    MaxGenerations(u64),
    /// Internal (maximize) units; met when the best-ever fitness reaches
    /// the value.
    TargetFitness(f64),
    /// Fires when the best-ever fitness has not improved over the last
    /// `window` completed generations.
    NoImprovement { window: u64 },
    WallClock { seconds: f64 },
}

impl TerminationCriterion {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TerminationCriterion::MaxEvaluations(_) | TerminationCriterion::MaxGenerations(_) => {}
            TerminationCriterion::TargetFitness(v) => {
                if !v.is_finite() {
                    return Err(EvoError::InvalidConfig(format!(
                        "target fitness must be finite, got {v}"
                    )));
                }
            }
            TerminationCriterion::NoImprovement { window } => {
                if window < 1 {
                    return Err(EvoError::InvalidConfig(
                        "no-improvement window must be >= 1".into(),
                    ));
                }
            }
            TerminationCriterion::WallClock { seconds } => {
                if !(seconds > 0.0 && seconds.is_finite()) {
                    return Err(EvoError::InvalidConfig(format!(
                        "wall-clock limit must be a positive number of seconds, got {seconds}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// True for criteria that bound the run length on their own.
    /// TargetFitness may never be met, so it does not qualify.
    fn is_finite_bound(&self) -> bool {
        !matches!(self, TerminationCriterion::TargetFitness(_))
    }
}

impl fmt::Display for TerminationCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TerminationCriterion::MaxEvaluations(n) => write!(f, "max_evaluations({n})"),
            TerminationCriterion::MaxGenerations(n) => write!(f, "max_generations({n})"),
            TerminationCriterion::TargetFitness(v) => write!(f, "target_fitness({v})"),
            TerminationCriterion::NoImprovement { window } => {
                write!(f, "no_improvement({window})")
            }
            TerminationCriterion::WallClock { seconds } => write!(f, "wall_clock({seconds}s)"),
        }
    }
}

fn validate_termination(criteria: &[TerminationCriterion]) -> Result<()> {
    if criteria.is_empty() {
        return Err(EvoError::InvalidConfig(
            "at least one termination criterion is required".into(),
        ));
    }
    for c in criteria {
        c.validate()?;
    }
    if !criteria.iter().any(TerminationCriterion::is_finite_bound) {
        return Err(EvoError::InvalidConfig(
            "a target-fitness criterion alone cannot guarantee termination; add a budget \
             (max_generations, max_evaluations, no_improvement, or wall_clock)"
                .into(),
        ));
    }
    Ok(())
}

/// Full parameterization of one evolutionary run.
#[derive(Debug, Clone)]
pub struct EaConfig {
    pub mu: usize,
    pub lambda: usize,
    pub selection: SelectionSpec,
    pub replacement: ReplacementSpec,
    pub crossover: Option<CrossoverSpec>,
    pub mutation: MutationSpec,
    pub elitism_count: usize,
    pub local_search: Option<LocalSearchSpec>,
    pub fitness_sharing: Option<SharingSpec>,
    /// The run stops as soon as any listed criterion fires.
    pub termination: Vec<TerminationCriterion>,
    pub seed: u64,
}

impl EaConfig {
    pub fn validate(&self, problem: &Problem) -> Result<()> {
        if self.mu < 1 {
            return Err(EvoError::InvalidConfig("mu must be >= 1".into()));
        }
        if self.lambda < 1 {
            return Err(EvoError::InvalidConfig("lambda must be >= 1".into()));
        }
        self.selection.validate(self.mu)?;
        if matches!(self.selection, SelectionSpec::AllParents) && self.lambda != self.mu {
            return Err(EvoError::InvalidConfig(format!(
                "all-parents selection needs lambda = mu, got lambda {} and mu {}",
                self.lambda, self.mu
            )));
        }
        self.replacement.validate(self.mu, self.lambda)?;
        if self.elitism_count > self.mu {
            return Err(EvoError::InvalidConfig(format!(
                "elitism count {} exceeds mu {}",
                self.elitism_count, self.mu
            )));
        }
        let kind = problem.spec().kind();
        self.mutation.validate()?;
        if self.mutation.kind() != kind {
            return Err(EvoError::InvalidConfig(format!(
                "mutation operates on {} genotypes but the problem uses {kind}",
                self.mutation.kind()
            )));
        }
        if let MutationSpec::Subtree { max_depth, .. } = self.mutation {
            if let GenotypeSpec::ParseTree { max_depth: cap, .. } = problem.spec() {
                if max_depth > *cap {
                    return Err(EvoError::InvalidConfig(format!(
                        "subtree mutation depth limit {max_depth} exceeds the problem's tree \
                         depth limit {cap}"
                    )));
                }
            }
        }
        if let Some(cx) = &self.crossover {
            cx.validate()?;
            if !cx.op.supports(kind) {
                return Err(EvoError::InvalidConfig(format!(
                    "crossover operator {:?} does not apply to {kind} genotypes",
                    cx.op
                )));
            }
        }
        if let Some(ls) = &self.local_search {
            ls.validate()?;
        }
        if let Some(sh) = &self.fitness_sharing {
            sh.validate()?;
        }
        validate_termination(&self.termination)
    }
}

/// One per-generation trace record, in internal (maximize) units.
/// best/mean/diversity describe the population at the generation
/// boundary, not the best-ever individual.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub generation: u64,
    pub evaluations: u64,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub diversity: f64,
    /// Population mean of per-individual mean mutation strengths; absent
    /// for genotypes without strategy parameters.
    pub mean_sigma: Option<f64>,
}

/// Everything a finished run reports.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
    /// Best individual over every evaluation, not just survivors.
    pub best: Individual,
    /// The criterion that ended the run.
    pub reason: TerminationCriterion,
    /// Problem optimum in internal units, when known.
    pub internal_optimum: Option<f64>,
}

/// Evaluates mu individuals: inoculants verbatim first, the rest sampled
/// uniformly from the problem's genotype space.
pub fn initialize_population<R: Rng + ?Sized>(
    problem: &Problem,
    mu: usize,
    inoculants: &[Genotype],
    rng: &mut R,
) -> Result<Population> {
    if mu < 1 {
        return Err(EvoError::InvalidConfig("mu must be >= 1".into()));
    }
    if inoculants.len() > mu {
        return Err(EvoError::InvalidConfig(format!(
            "{} inoculants exceed the population size {mu}",
            inoculants.len()
        )));
    }
    let mut pop = Vec::with_capacity(mu);
    for g in inoculants {
        problem.spec().check(g)?;
        pop.push(Individual::evaluated(g.clone(), problem.fitness(g)));
    }
    while pop.len() < mu {
        let g = problem.spec().sample(rng)?;
        let fitness = problem.fitness(&g);
        pop.push(Individual::evaluated(g, fitness));
    }
    Ok(pop)
}

/// Live engine state. Construct, then either drive with [`Engine::step`]
/// or let [`Engine::run`] loop to termination.
pub struct Engine<'a> {
    config: &'a EaConfig,
    problem: &'a Problem,
    rng: RandomStream,
    pop: Population,
    generation: u64,
    evaluations: u64,
    best_ever: Individual,
    /// Best-ever fitness after each completed generation, indexed by
    /// generation number. Monotone by construction.
    best_history: Vec<f64>,
    started: Instant,
    rows: Vec<TraceRow>,
}

impl<'a> Engine<'a> {
    pub fn new(config: &'a EaConfig, problem: &'a Problem) -> Result<Self> {
        Engine::with_inoculants(config, problem, &[])
    }

    pub fn with_inoculants(
        config: &'a EaConfig,
        problem: &'a Problem,
        inoculants: &[Genotype],
    ) -> Result<Self> {
        config.validate(problem)?;
        let mut rng = stream(config.seed);
        let pop = initialize_population(problem, config.mu, inoculants, &mut rng)?;
        // First-encountered wins fitness ties, so scan with a strict >.
        let mut best_ever = pop[0].clone();
        for ind in &pop[1..] {
            if ind.fitness() > best_ever.fitness() {
                best_ever = ind.clone();
            }
        }
        let mut engine = Engine {
            config,
            problem,
            rng,
            pop,
            generation: 0,
            evaluations: config.mu as u64,
            best_history: vec![best_ever.fitness()],
            best_ever,
            started: Instant::now(),
            rows: Vec::new(),
        };
        engine.record_row()?;
        Ok(engine)
    }

    pub fn population(&self) -> &[Individual] {
        &self.pop
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn best(&self) -> &Individual {
        &self.best_ever
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    /// First listed criterion whose condition holds, if any.
    pub fn should_stop(&self) -> Option<TerminationCriterion> {
        self.config.termination.iter().copied().find(|c| match *c {
            TerminationCriterion::MaxEvaluations(n) => self.evaluations >= n,
            TerminationCriterion::MaxGenerations(n) => self.generation >= n,
            TerminationCriterion::TargetFitness(v) => self.best_ever.fitness() >= v,
            TerminationCriterion::NoImprovement { window } => {
                self.generation >= window
                    && self.best_history[self.generation as usize]
                        == self.best_history[(self.generation - window) as usize]
            }
            TerminationCriterion::WallClock { seconds } => {
                self.started.elapsed().as_secs_f64() >= seconds
            }
        })
    }

    /// One full generation: select lambda genitors, cross over pairwise
    /// with probability p_c, mutate, evaluate, optionally improve by
    /// local search, replace, and record a trace row.
    pub fn step(&mut self) -> Result<()> {
        let cfg = self.config;
        let lambda = cfg.lambda;

        // Selection sees raw fitness, then scaling, then sharing.
        let mut sel_fit: Vec<f64> = self.pop.iter().map(Individual::fitness).collect();
        let dispatch_spec = match &cfg.selection {
            SelectionSpec::RouletteWheel { scaling: Some(s) } => {
                sel_fit = scale_fitness(&sel_fit, s);
                SelectionSpec::RouletteWheel { scaling: None }
            }
            other => other.clone(),
        };
        if let Some(sharing) = &cfg.fitness_sharing {
            // Sharing divides fitness, so inputs must be nonnegative.
            // Roulette configs bring their own scaling (and error without
            // one); rank-based and uniform selectors get a minimal shift,
            // which cannot change their no-sharing outcome.
            if !matches!(cfg.selection, SelectionSpec::RouletteWheel { .. })
                && sel_fit.iter().any(|f| *f < 0.0)
            {
                sel_fit = scale_fitness(&sel_fit, &ScalingSpec::ShiftToPositive { epsilon: 1e-9 });
            }
            sel_fit = shared_fitness(&self.pop, &sel_fit, sharing)?;
        }
        let genitors = select_genitors(&sel_fit, &dispatch_spec, lambda, &mut self.rng)?;

        let tree_cap = match self.problem.spec() {
            GenotypeSpec::ParseTree { max_depth, .. } => *max_depth,
            _ => 0,
        };
        let mut raw_offspring: Vec<Genotype> = Vec::with_capacity(lambda);
        let mut i = 0;
        while i < genitors.len() {
            let a = &self.pop[genitors[i]].genotype;
            if i + 1 < genitors.len() {
                let b = &self.pop[genitors[i + 1]].genotype;
                let crossed = match &cfg.crossover {
                    Some(cx) if self.rng.random::<f64>() < cx.p_c => {
                        Some(crossover_pair(a, b, cx.op, tree_cap, &mut self.rng)?)
                    }
                    _ => None,
                };
                match crossed {
                    Some((c, d)) => {
                        raw_offspring.push(c);
                        raw_offspring.push(d);
                    }
                    None => {
                        raw_offspring.push(a.clone());
                        raw_offspring.push(b.clone());
                    }
                }
                i += 2;
            } else {
                // An unpaired trailing genitor passes to mutation without
                // a crossover coin.
                raw_offspring.push(a.clone());
                i += 1;
            }
        }

        let next_gen = self.generation + 1;
        let mut offspring: Vec<Individual> = Vec::with_capacity(lambda);
        for g in &raw_offspring {
            let mutated = mutate(g, &cfg.mutation, &mut self.rng)?;
            offspring.push(Individual::new(mutated, next_gen));
        }
        for child in &mut offspring {
            child.evaluate_with(self.problem);
        }
        self.evaluations += lambda as u64;
        if let Some(ls) = &cfg.local_search {
            for child in &mut offspring {
                let (improved, used) =
                    local_search(child, self.problem, ls.budget, &cfg.mutation, &mut self.rng)?;
                *child = improved;
                self.evaluations += used;
            }
        }

        for child in &offspring {
            if child.fitness() > self.best_ever.fitness() {
                self.best_ever = child.clone();
            }
        }

        let mut next = match cfg.replacement {
            ReplacementSpec::Plus => plus_replacement(&self.pop, &offspring, cfg.mu),
            ReplacementSpec::Comma => comma_replacement(&offspring, cfg.mu)?,
            ReplacementSpec::Generational => {
                generational_replacement(&self.pop, &offspring, cfg.elitism_count)?
            }
            ReplacementSpec::SteadyState => steady_state_replace(&self.pop, &offspring[0]),
            ReplacementSpec::EpStochasticPlus { q } => {
                ep_stochastic_plus(&self.pop, &offspring, q, &mut self.rng)?
            }
        };
        // Plus and steady-state never lose their best; generational
        // handles elitism itself. Comma and stochastic plus can drop the
        // best parent, so the retention rule runs after replacement.
        if matches!(
            cfg.replacement,
            ReplacementSpec::Comma | ReplacementSpec::EpStochasticPlus { .. }
        ) {
            apply_elitism(&self.pop, &mut next, cfg.elitism_count);
        }
        self.pop = next;
        self.generation = next_gen;
        self.best_history.push(self.best_ever.fitness());
        self.record_row()
    }

    /// Steps until a termination criterion fires.
    pub fn run(mut self) -> Result<RunTrace> {
        loop {
            if let Some(reason) = self.should_stop() {
                return Ok(RunTrace {
                    rows: self.rows,
                    best: self.best_ever,
                    reason,
                    internal_optimum: self.problem.internal_optimum(),
                });
            }
            self.step()?;
        }
    }

    fn record_row(&mut self) -> Result<()> {
        let best = self
            .pop
            .iter()
            .map(Individual::fitness)
            .fold(f64::NEG_INFINITY, f64::max);
        let mean =
            self.pop.iter().map(Individual::fitness).sum::<f64>() / self.pop.len() as f64;
        let diversity = population_diversity(&self.pop)?;
        self.rows.push(TraceRow {
            generation: self.generation,
            evaluations: self.evaluations,
            best_fitness: best,
            mean_fitness: mean,
            diversity,
            mean_sigma: mean_sigma(&self.pop),
        });
        Ok(())
    }
}

fn mean_sigma(pop: &[Individual]) -> Option<f64> {
    let mut total = 0.0;
    for ind in pop {
        match &ind.genotype {
            Genotype::SelfAdaptive(sa) if !sa.sigmas.is_empty() => {
                total += sa.sigmas.iter().sum::<f64>() / sa.sigmas.len() as f64;
            }
            _ => return None,
        }
    }
    Some(total / pop.len() as f64)
}

/// Runs a configuration against a problem to completion.
pub fn run(config: &EaConfig, problem: &Problem) -> Result<RunTrace> {
    Engine::new(config, problem)?.run()
}

/// Same, with known-good genotypes planted in the initial population.
pub fn run_with_inoculants(
    config: &EaConfig,
    problem: &Problem,
    inoculants: &[Genotype],
) -> Result<RunTrace> {
    Engine::with_inoculants(config, problem, inoculants)?.run()
}
