//! TOML experiment configs: parsing, validation, and assembly into a
//! runnable problem + engine configuration pair.
//!
//! A config names a problem and exactly one of a dialect preset or an
//! explicit engine section. Unknown keys are errors, not warnings, and
//! keys that do not apply to the chosen problem or dialect are rejected
//! by name. Fitness targets are written in problem units (cost for
//! minimize problems) and converted to the engine's internal maximize
//! scale here, so nothing downstream needs to know the direction.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use evokit::{
    ep_preset, es_preset, ga_preset, gp_preset, load_dataset, load_matrix, onemax, sphere,
    sphere_adaptive, symreg, tour, two_peaks, CrossoverOp, CrossoverSpec, EaConfig, EsCrossover,
    EsMode, GaReplacement, GenotypeSpec, LocalSearchSpec, MutationSpec, PrimitiveSet, Problem,
    ReplacementSpec, ScalingSpec, SelectionSpec, SharingSpec, TerminationCriterion, TreeInit,
    DEFAULT_RUN_COUNT,
};

/// Default cap on the number of sweep grid points.
pub const DEFAULT_SWEEP_CAP: usize = 256;

/// A fully validated experiment: everything `run`, `compare`, and
/// `sweep` need, with all defaults filled in.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub problem: Problem,
    pub config: EaConfig,
    /// Independent runs per batch.
    pub runs: usize,
    /// Seed of the first run; run i uses base_seed + i.
    pub base_seed: u64,
    /// Diversity level below which a run is flagged as prematurely
    /// converged, when set.
    pub diversity_threshold: Option<f64>,
    /// "GA", "ES", "EP", "GP", or "custom" for explicit engine sections.
    pub dialect: String,
    pub sweep_cap: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: ProblemSection,
    dialect: Option<DialectSection>,
    engine: Option<EngineSection>,
    termination: Option<TerminationSection>,
    analysis: Option<AnalysisSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemSection {
    /// onemax | sphere | two_peaks | symreg | tour
    name: String,
    /// onemax: bit-string length.
    length: Option<usize>,
    /// sphere: dimension.
    dim: Option<usize>,
    /// sphere: initialization interval, default [-5, 5].
    lo: Option<f64>,
    hi: Option<f64>,
    /// symreg: two-column sample file, resolved against the config dir.
    data: Option<String>,
    /// symreg: ephemeral constant range [lo, hi]; [] disables constants;
    /// default [-1, 1].
    constants: Option<Vec<f64>>,
    /// symreg: tree depth cap, default 17.
    max_depth: Option<usize>,
    /// symreg: ramped half-and-half depth range, default [2, 6].
    init_depth: Option<Vec<usize>>,
    /// tour: square distance-matrix file, resolved against the config dir.
    matrix: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DialectSection {
    /// GA | ES | EP | GP (case-insensitive).
    name: String,
    mu: Option<usize>,
    /// ES only.
    lambda: Option<usize>,
    /// GA, GP.
    p_c: Option<f64>,
    /// GA only; default 1/length.
    p_m: Option<f64>,
    /// GA: generational | steady_state.
    replacement: Option<String>,
    /// GA only; default 1.
    elitism: Option<usize>,
    /// ES: plus | comma.
    mode: Option<String>,
    /// ES: none | discrete | intermediate.
    crossover: Option<String>,
    /// EP: opponents per tournament.
    q: Option<usize>,
    /// GP: tournament size.
    tournament: Option<usize>,
    /// GP: operator depth cap; default = problem tree depth cap.
    max_depth: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EngineSection {
    mu: usize,
    lambda: usize,
    /// roulette | tournament | uniform | all_parents
    selection: String,
    tournament_size: Option<usize>,
    /// Roulette shift scaling: f' = f - min(f) + epsilon.
    scaling_epsilon: Option<f64>,
    /// Roulette linear scaling pressure.
    scaling_pressure: Option<f64>,
    /// plus | comma | generational | steady_state | ep_stochastic_plus
    replacement: String,
    /// ep_stochastic_plus: opponents per tournament.
    q: Option<usize>,
    elitism: Option<usize>,
    /// one_point | uniform | arithmetic | discrete | order | subtree
    crossover: Option<String>,
    p_c: Option<f64>,
    /// bit_flip | gaussian | self_adaptive | swap | subtree
    mutation: String,
    /// bit_flip: per-bit flip probability. subtree: application
    /// probability, default 0.1.
    p_m: Option<f64>,
    /// gaussian: noise standard deviation.
    sigma: Option<f64>,
    /// swap: exchanges per application, default 1.
    swaps: Option<usize>,
    /// self_adaptive overrides; defaults follow the problem dimension.
    tau: Option<f64>,
    tau_prime: Option<f64>,
    sigma_floor: Option<f64>,
    /// subtree mutation depth cap; default = problem tree depth cap.
    max_depth: Option<usize>,
    /// Hill-climbing evaluations per offspring; absent = no local search.
    local_search_budget: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TerminationSection {
    max_generations: Option<u64>,
    max_evaluations: Option<u64>,
    /// Problem units: a cost bound for minimize problems, a fitness
    /// bound for maximize problems.
    target_fitness: Option<f64>,
    /// Generations without improvement of the population best.
    no_improvement: Option<u64>,
    wall_clock_seconds: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalysisSection {
    runs: Option<usize>,
    base_seed: Option<u64>,
    diversity_threshold: Option<f64>,
    /// Fitness sharing toggle; requires sigma_share when true.
    sharing: Option<bool>,
    sigma_share: Option<f64>,
    /// Sharing falloff exponent, default 1.
    alpha: Option<f64>,
    sweep_cap: Option<usize>,
}

/// Loads and validates a config file. Errors are human-readable
/// diagnostics; TOML-level ones carry the offending key and line.
pub fn load_experiment(path: &Path) -> Result<Experiment, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let raw: RawConfig =
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let base_dir = path.parent().unwrap_or(Path::new("."));
    build(raw, base_dir)
}

/// Same pipeline for an already-parsed document; the sweep command edits
/// grid values into a `toml::Value` and revalidates through here.
pub fn experiment_from_value(doc: toml::Value, base_dir: &Path) -> Result<Experiment, String> {
    let raw: RawConfig = doc.try_into().map_err(|e| e.to_string())?;
    build(raw, base_dir)
}

fn build(raw: RawConfig, base_dir: &Path) -> Result<Experiment, String> {
    let (dialect_label, wants_self_adaptive) = match (&raw.dialect, &raw.engine) {
        (Some(d), None) => {
            let label = normalize_dialect(&d.name)?;
            (label, matches!(label, "ES" | "EP"))
        }
        (None, Some(e)) => ("custom", e.mutation == "self_adaptive"),
        (Some(_), Some(_)) => {
            return Err("config sets both [dialect] and [engine]; pick one".into())
        }
        (None, None) => return Err("config needs a [dialect] or an [engine] section".into()),
    };

    let problem = build_problem(&raw.problem, base_dir, wants_self_adaptive)?;

    let mut config = match (&raw.dialect, &raw.engine) {
        (Some(d), _) => build_dialect(d, dialect_label, &problem)?,
        (_, Some(e)) => build_engine(e, &problem)?,
        _ => unreachable!("exactly-one-of checked above"),
    };

    if let Some(t) = &raw.termination {
        config.termination = build_termination(t, &problem)?;
    }

    let analysis = raw.analysis.unwrap_or_default();
    config.fitness_sharing = build_sharing(&analysis)?;

    config
        .validate(&problem)
        .map_err(|e| e.to_string())?;

    Ok(Experiment {
        problem,
        config,
        runs: analysis.runs.unwrap_or(DEFAULT_RUN_COUNT),
        base_seed: analysis.base_seed.unwrap_or(0),
        diversity_threshold: analysis.diversity_threshold,
        dialect: dialect_label.to_string(),
        sweep_cap: analysis.sweep_cap.unwrap_or(DEFAULT_SWEEP_CAP),
    })
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            runs: None,
            base_seed: None,
            diversity_threshold: None,
            sharing: None,
            sigma_share: None,
            alpha: None,
            sweep_cap: None,
        }
    }
}

fn normalize_dialect(name: &str) -> Result<&'static str, String> {
    match name.to_ascii_uppercase().as_str() {
        "GA" => Ok("GA"),
        "ES" => Ok("ES"),
        "EP" => Ok("EP"),
        "GP" => Ok("GP"),
        other => Err(format!("unknown dialect `{other}`; expected GA, ES, EP, or GP")),
    }
}

/// Rejects a key that is present but meaningless in this context, so a
/// config cannot silently carry settings that do nothing.
fn forbid<T>(value: &Option<T>, key: &str, context: &str) -> Result<(), String> {
    if value.is_some() {
        return Err(format!("key `{key}` does not apply to {context}"));
    }
    Ok(())
}

fn require<T: Copy>(value: &Option<T>, key: &str, context: &str) -> Result<T, String> {
    value.ok_or_else(|| format!("{context} requires key `{key}`"))
}

fn resolve(base_dir: &Path, file: &str) -> PathBuf {
    let p = Path::new(file);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base_dir.join(p)
    }
}

fn build_problem(
    section: &ProblemSection,
    base_dir: &Path,
    wants_self_adaptive: bool,
) -> Result<Problem, String> {
    let name = section.name.as_str();
    let err = |e: evokit::EvoError| e.to_string();
    match name {
        "onemax" => {
            let length = require(&section.length, "length", "problem onemax")?;
            forbid_problem_keys(section, &["length"])?;
            onemax(length).map_err(err)
        }
        "sphere" => {
            let dim = require(&section.dim, "dim", "problem sphere")?;
            forbid_problem_keys(section, &["dim", "lo", "hi"])?;
            let lo = section.lo.unwrap_or(-5.0);
            let hi = section.hi.unwrap_or(5.0);
            if wants_self_adaptive {
                sphere_adaptive(dim, lo, hi).map_err(err)
            } else {
                sphere(dim, lo, hi).map_err(err)
            }
        }
        "two_peaks" => {
            forbid_problem_keys(section, &[])?;
            two_peaks().map_err(err)
        }
        "symreg" => {
            let data = section
                .data
                .as_deref()
                .ok_or("problem symreg requires key `data`")?;
            forbid_problem_keys(section, &["data", "constants", "max_depth", "init_depth"])?;
            let constants = match &section.constants {
                None => Some((-1.0, 1.0)),
                Some(range) if range.is_empty() => None,
                Some(range) if range.len() == 2 => Some((range[0], range[1])),
                Some(range) => {
                    return Err(format!(
                        "`constants` takes [lo, hi] or [], got {} values",
                        range.len()
                    ))
                }
            };
            let max_depth = section.max_depth.unwrap_or(17);
            let init = match &section.init_depth {
                None => TreeInit::RampedHalfAndHalf { min_depth: 2, max_depth: 6 },
                Some(range) if range.len() == 2 => {
                    TreeInit::RampedHalfAndHalf { min_depth: range[0], max_depth: range[1] }
                }
                Some(range) => {
                    return Err(format!(
                        "`init_depth` takes [min, max], got {} values",
                        range.len()
                    ))
                }
            };
            let set = PrimitiveSet::arithmetic(&["x"], constants).map_err(err)?;
            let dataset = load_dataset(&resolve(base_dir, data)).map_err(err)?;
            symreg(dataset, Arc::new(set), max_depth, init).map_err(err)
        }
        "tour" => {
            let matrix_path = section
                .matrix
                .as_deref()
                .ok_or("problem tour requires key `matrix`")?;
            forbid_problem_keys(section, &["matrix"])?;
            let matrix = load_matrix(&resolve(base_dir, matrix_path)).map_err(err)?;
            tour(matrix).map_err(err)
        }
        other => Err(format!(
            "unknown problem `{other}`; expected onemax, sphere, two_peaks, symreg, or tour"
        )),
    }
}

/// Every optional problem key, so inapplicable ones can be rejected by
/// name for whichever problem was chosen.
fn forbid_problem_keys(section: &ProblemSection, allowed: &[&str]) -> Result<(), String> {
    let context = format!("problem {}", section.name);
    let check = |present: bool, key: &str| -> Result<(), String> {
        if present && !allowed.contains(&key) {
            return Err(format!("key `{key}` does not apply to {context}"));
        }
        Ok(())
    };
    check(section.length.is_some(), "length")?;
    check(section.dim.is_some(), "dim")?;
    check(section.lo.is_some(), "lo")?;
    check(section.hi.is_some(), "hi")?;
    check(section.data.is_some(), "data")?;
    check(section.constants.is_some(), "constants")?;
    check(section.max_depth.is_some(), "max_depth")?;
    check(section.init_depth.is_some(), "init_depth")?;
    check(section.matrix.is_some(), "matrix")?;
    Ok(())
}

fn build_dialect(
    section: &DialectSection,
    label: &str,
    problem: &Problem,
) -> Result<EaConfig, String> {
    let err = |e: evokit::EvoError| e.to_string();
    match label {
        "GA" => {
            let context = "dialect GA";
            forbid(&section.lambda, "lambda", context)?;
            forbid(&section.mode, "mode", context)?;
            forbid(&section.crossover, "crossover", context)?;
            forbid(&section.q, "q", context)?;
            forbid(&section.tournament, "tournament", context)?;
            forbid(&section.max_depth, "max_depth", context)?;
            let len = match problem.spec() {
                GenotypeSpec::BitString { len } => *len,
                _ => {
                    return Err(format!(
                        "dialect GA runs on bit strings; problem {} is not one",
                        problem.name()
                    ))
                }
            };
            let replacement = match section.replacement.as_deref() {
                None | Some("generational") => GaReplacement::Generational,
                Some("steady_state") => GaReplacement::SteadyState,
                Some(other) => {
                    return Err(format!(
                        "unknown GA replacement `{other}`; expected generational or steady_state"
                    ))
                }
            };
            ga_preset(
                len,
                section.mu.unwrap_or(100),
                section.p_c,
                section.p_m,
                replacement,
                section.elitism.unwrap_or(1),
            )
            .map_err(err)
        }
        "ES" => {
            let context = "dialect ES";
            forbid(&section.p_c, "p_c", context)?;
            forbid(&section.p_m, "p_m", context)?;
            forbid(&section.replacement, "replacement", context)?;
            forbid(&section.elitism, "elitism", context)?;
            forbid(&section.q, "q", context)?;
            forbid(&section.tournament, "tournament", context)?;
            forbid(&section.max_depth, "max_depth", context)?;
            let mode = match section.mode.as_deref() {
                None | Some("comma") => EsMode::Comma,
                Some("plus") => EsMode::Plus,
                Some(other) => {
                    return Err(format!("unknown ES mode `{other}`; expected plus or comma"))
                }
            };
            let crossover = match section.crossover.as_deref() {
                None | Some("none") => EsCrossover::None,
                Some("discrete") => EsCrossover::Discrete,
                Some("intermediate") => EsCrossover::Intermediate,
                Some(other) => {
                    return Err(format!(
                        "unknown ES crossover `{other}`; expected none, discrete, or intermediate"
                    ))
                }
            };
            es_preset(
                problem.spec().dimension(),
                section.mu.unwrap_or(15),
                section.lambda.unwrap_or(100),
                mode,
                crossover,
            )
            .map_err(err)
        }
        "EP" => {
            let context = "dialect EP";
            forbid(&section.lambda, "lambda", context)?;
            forbid(&section.p_c, "p_c", context)?;
            forbid(&section.p_m, "p_m", context)?;
            forbid(&section.replacement, "replacement", context)?;
            forbid(&section.elitism, "elitism", context)?;
            forbid(&section.mode, "mode", context)?;
            forbid(&section.crossover, "crossover", context)?;
            forbid(&section.tournament, "tournament", context)?;
            forbid(&section.max_depth, "max_depth", context)?;
            ep_preset(
                problem.spec().dimension(),
                section.mu.unwrap_or(20),
                section.q.unwrap_or(10),
            )
            .map_err(err)
        }
        "GP" => {
            let context = "dialect GP";
            forbid(&section.lambda, "lambda", context)?;
            forbid(&section.p_m, "p_m", context)?;
            forbid(&section.replacement, "replacement", context)?;
            forbid(&section.elitism, "elitism", context)?;
            forbid(&section.mode, "mode", context)?;
            forbid(&section.crossover, "crossover", context)?;
            forbid(&section.q, "q", context)?;
            let (primitives, tree_cap) = match problem.spec() {
                GenotypeSpec::ParseTree { primitives, max_depth, .. } => {
                    (primitives.clone(), *max_depth)
                }
                _ => {
                    return Err(format!(
                        "dialect GP runs on parse trees; problem {} is not one",
                        problem.name()
                    ))
                }
            };
            gp_preset(
                &primitives,
                section.mu.unwrap_or(500),
                section.p_c,
                Some(section.max_depth.unwrap_or(tree_cap)),
                section.tournament,
            )
            .map_err(err)
        }
        _ => unreachable!("normalize_dialect admits only the four presets"),
    }
}

fn build_engine(section: &EngineSection, problem: &Problem) -> Result<EaConfig, String> {
    let selection = match section.selection.as_str() {
        "roulette" => {
            forbid(&section.tournament_size, "tournament_size", "roulette selection")?;
            let scaling = match (section.scaling_epsilon, section.scaling_pressure) {
                (None, None) => None,
                (Some(epsilon), None) => Some(ScalingSpec::ShiftToPositive { epsilon }),
                (None, Some(pressure)) => Some(ScalingSpec::Linear { pressure }),
                (Some(_), Some(_)) => {
                    return Err(
                        "set at most one of `scaling_epsilon` and `scaling_pressure`".into()
                    )
                }
            };
            SelectionSpec::RouletteWheel { scaling }
        }
        other => {
            forbid(&section.scaling_epsilon, "scaling_epsilon", "non-roulette selection")?;
            forbid(&section.scaling_pressure, "scaling_pressure", "non-roulette selection")?;
            match other {
                "tournament" => SelectionSpec::Tournament {
                    t: require(&section.tournament_size, "tournament_size", "tournament selection")?,
                },
                "uniform" | "all_parents" => {
                    forbid(&section.tournament_size, "tournament_size", "this selection")?;
                    if other == "uniform" {
                        SelectionSpec::Uniform
                    } else {
                        SelectionSpec::AllParents
                    }
                }
                unknown => {
                    return Err(format!(
                        "unknown selection `{unknown}`; expected roulette, tournament, uniform, or all_parents"
                    ))
                }
            }
        }
    };

    let replacement = match section.replacement.as_str() {
        "ep_stochastic_plus" => ReplacementSpec::EpStochasticPlus {
            q: require(&section.q, "q", "ep_stochastic_plus replacement")?,
        },
        other => {
            forbid(&section.q, "q", "this replacement")?;
            match other {
                "plus" => ReplacementSpec::Plus,
                "comma" => ReplacementSpec::Comma,
                "generational" => ReplacementSpec::Generational,
                "steady_state" => ReplacementSpec::SteadyState,
                unknown => {
                    return Err(format!(
                        "unknown replacement `{unknown}`; expected plus, comma, generational, steady_state, or ep_stochastic_plus"
                    ))
                }
            }
        }
    };

    let tree_cap = match problem.spec() {
        GenotypeSpec::ParseTree { max_depth, .. } => Some(*max_depth),
        _ => None,
    };

    let mutation = match section.mutation.as_str() {
        "bit_flip" => {
            forbid_mutation_keys(section, &["p_m"])?;
            MutationSpec::BitFlip { p_m: require(&section.p_m, "p_m", "bit_flip mutation")? }
        }
        "gaussian" => {
            forbid_mutation_keys(section, &["sigma"])?;
            MutationSpec::Gaussian {
                sigma: require(&section.sigma, "sigma", "gaussian mutation")?,
            }
        }
        "self_adaptive" => {
            forbid_mutation_keys(section, &["tau", "tau_prime", "sigma_floor"])?;
            let n = problem.spec().dimension().max(1) as f64;
            MutationSpec::SelfAdaptive {
                tau: section.tau.unwrap_or(1.0 / (2.0 * n).sqrt()),
                tau_prime: section.tau_prime.unwrap_or(1.0 / (2.0 * n.sqrt()).sqrt()),
                sigma_floor: section.sigma_floor.unwrap_or(1e-10),
            }
        }
        "swap" => {
            forbid_mutation_keys(section, &["swaps"])?;
            MutationSpec::Swap { swaps: section.swaps.unwrap_or(1) }
        }
        "subtree" => {
            forbid_mutation_keys(section, &["p_m", "max_depth"])?;
            let cap = tree_cap.ok_or("subtree mutation needs a tree problem")?;
            MutationSpec::Subtree {
                probability: section.p_m.unwrap_or(0.1),
                max_depth: section.max_depth.unwrap_or(cap),
            }
        }
        unknown => {
            return Err(format!(
                "unknown mutation `{unknown}`; expected bit_flip, gaussian, self_adaptive, swap, or subtree"
            ))
        }
    };

    let crossover = match (&section.crossover, section.p_c) {
        (None, None) => None,
        (None, Some(_)) => return Err("`p_c` is set but `crossover` is not".into()),
        (Some(name), p_c) => {
            let op = match name.as_str() {
                "one_point" => CrossoverOp::OnePoint,
                "uniform" => CrossoverOp::Uniform,
                "arithmetic" => CrossoverOp::Arithmetic,
                "discrete" => CrossoverOp::Discrete,
                "order" => CrossoverOp::Order,
                "subtree" => CrossoverOp::Subtree,
                unknown => {
                    return Err(format!(
                        "unknown crossover `{unknown}`; expected one_point, uniform, arithmetic, discrete, order, or subtree"
                    ))
                }
            };
            Some(CrossoverSpec {
                op,
                p_c: p_c.ok_or("`crossover` is set but `p_c` is not")?,
            })
        }
    };

    Ok(EaConfig {
        mu: section.mu,
        lambda: section.lambda,
        selection,
        replacement,
        crossover,
        mutation,
        elitism_count: section.elitism.unwrap_or(0),
        local_search: section.local_search_budget.map(|budget| LocalSearchSpec { budget }),
        fitness_sharing: None,
        termination: vec![TerminationCriterion::MaxGenerations(100)],
        seed: 0,
    })
}

/// Mutation parameter keys are shared across kinds; each kind whitelists
/// its own so a leftover setting cannot pass silently.
fn forbid_mutation_keys(section: &EngineSection, allowed: &[&str]) -> Result<(), String> {
    let context = format!("{} mutation", section.mutation);
    let check = |present: bool, key: &str| -> Result<(), String> {
        if present && !allowed.contains(&key) {
            return Err(format!("key `{key}` does not apply to {context}"));
        }
        Ok(())
    };
    check(section.p_m.is_some(), "p_m")?;
    check(section.sigma.is_some(), "sigma")?;
    check(section.swaps.is_some(), "swaps")?;
    check(section.tau.is_some(), "tau")?;
    check(section.tau_prime.is_some(), "tau_prime")?;
    check(section.sigma_floor.is_some(), "sigma_floor")?;
    check(section.max_depth.is_some(), "max_depth")?;
    Ok(())
}

/// Builds the criterion list in a fixed priority order, so the reported
/// stop reason is stable when several fire in the same generation:
/// target first, then evaluation, generation, stagnation, and wall-clock
/// bounds. Targets are converted from problem units to internal ones.
fn build_termination(
    section: &TerminationSection,
    problem: &Problem,
) -> Result<Vec<TerminationCriterion>, String> {
    let mut criteria = Vec::new();
    if let Some(raw) = section.target_fitness {
        criteria.push(TerminationCriterion::TargetFitness(problem.to_internal(raw)));
    }
    if let Some(n) = section.max_evaluations {
        criteria.push(TerminationCriterion::MaxEvaluations(n));
    }
    if let Some(n) = section.max_generations {
        criteria.push(TerminationCriterion::MaxGenerations(n));
    }
    if let Some(window) = section.no_improvement {
        criteria.push(TerminationCriterion::NoImprovement { window });
    }
    if let Some(seconds) = section.wall_clock_seconds {
        criteria.push(TerminationCriterion::WallClock { seconds });
    }
    if criteria.is_empty() {
        return Err("[termination] is present but sets no criterion".into());
    }
    Ok(criteria)
}

fn build_sharing(analysis: &AnalysisSection) -> Result<Option<SharingSpec>, String> {
    if !analysis.sharing.unwrap_or(false) {
        forbid(&analysis.sigma_share, "sigma_share", "a config without sharing")?;
        forbid(&analysis.alpha, "alpha", "a config without sharing")?;
        return Ok(None);
    }
    Ok(Some(SharingSpec {
        sigma_share: require(&analysis.sigma_share, "sigma_share", "fitness sharing")?,
        alpha: analysis.alpha.unwrap_or(1.0),
    }))
}
