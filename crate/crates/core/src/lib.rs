//! Dialect-agnostic evolutionary computation: one generational engine
//! parameterized by genotype, variation operators, selection, and
//! replacement, with the four classic dialects (GA, ES, EP, GP) as
//! preset configurations rather than separate machinery.
//!
//! The engine maximizes internally; minimization problems are negated at
//! the problem boundary. Runs are deterministic: a seed fixes every
//! draw, so traces reproduce bit for bit.

pub mod crossover;
pub mod dialect;
pub mod engine;
pub mod error;
pub mod genotype;
pub mod local_search;
pub mod mutation;
pub mod problem;
pub mod replacement;
pub mod rng;
pub mod selection;
pub mod stats;
pub mod tree;

pub use crossover::{CrossoverOp, CrossoverSpec};
pub use dialect::{
    ep_preset, es_preset, ga_preset, gp_preset, Dialect, EsCrossover, EsMode, GaReplacement,
};
pub use engine::{
    initialize_population, run, run_with_inoculants, EaConfig, Engine, Individual, Population,
    RunTrace, TerminationCriterion, TraceRow,
};
pub use error::{EvoError, Result};
pub use genotype::{
    distance, BitString, Genotype, GenotypeKind, GenotypeSpec, Permutation, RealVector,
    SelfAdaptiveRealVector,
};
pub use local_search::{local_search, LocalSearchSpec, MAX_LOCAL_SEARCH_BUDGET};
pub use mutation::{mutate, MutationSpec};
pub use problem::{
    load_dataset, load_matrix, onemax, sphere, sphere_adaptive, symreg, tour, two_peaks,
    Direction, Problem,
};
pub use replacement::ReplacementSpec;
pub use rng::{stream, RandomStream};
pub use selection::{ScalingSpec, SelectionSpec};
pub use stats::{
    detect_premature_convergence, population_diversity, run_batch, run_batch_traced,
    shared_fitness, t_critical, welch_t_test, BatchResult, RunSummary, SharingSpec,
    Significance, DEFAULT_RUN_COUNT,
};
pub use tree::{FunctionSymbol, Node, ParseTree, PrimitiveSet, TreeInit, TreeMethod};
