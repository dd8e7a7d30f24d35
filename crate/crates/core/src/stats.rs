//! Population diagnostics (diversity, fitness sharing, premature-
//! convergence detection) and multi-run statistics: batch summaries and
//! the Welch t-test with a bundled critical-value table.

use crate::engine::{EaConfig, Individual, RunTrace, TerminationCriterion};
use crate::error::{EvoError, Result};
use crate::genotype::distance;
use crate::problem::Problem;

/// Fitness-sharing parameters. Individuals closer than `sigma_share`
/// split their fitness, pushing selection toward unexplored niches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharingSpec {
    /// Niche radius in genotype-distance units.
    pub sigma_share: f64,
    /// Sharing exponent; 1 is linear falloff.
    pub alpha: f64,
}

impl SharingSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_share > 0.0 && self.sigma_share.is_finite()) {
            return Err(EvoError::InvalidConfig(format!(
                "sharing radius must be > 0, got {}",
                self.sigma_share
            )));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(EvoError::InvalidConfig(format!(
                "sharing exponent must be > 0, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Mean pairwise genotype distance over all unordered pairs; 0 for a
/// single-member population.
pub fn population_diversity(pop: &[Individual]) -> Result<f64> {
    if pop.is_empty() {
        return Err(EvoError::Stats("diversity of an empty population".into()));
    }
    let n = pop.len();
    if n == 1 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            total += distance(&pop[i].genotype, &pop[j].genotype)?;
        }
    }
    Ok(total / (n * (n - 1) / 2) as f64)
}

/// Divides each fitness by its niche count: f'_i = f_i / sum_j sh(d_ij)
/// with sh(d) = 1 - (d/sigma_share)^alpha below the radius, else 0. The
/// sum includes j = i, so every denominator is at least 1 and no fitness
/// ever increases. Fitnesses must be nonnegative (scale first).
pub fn shared_fitness(
    pop: &[Individual],
    fitness: &[f64],
    spec: &SharingSpec,
) -> Result<Vec<f64>> {
    spec.validate()?;
    if pop.len() != fitness.len() {
        return Err(EvoError::Stats(format!(
            "sharing got {} fitness values for {} individuals",
            fitness.len(),
            pop.len()
        )));
    }
    if let Some(bad) = fitness.iter().find(|f| **f < 0.0) {
        return Err(EvoError::Stats(format!(
            "sharing requires nonnegative fitness, got {bad}; apply scaling first"
        )));
    }
    let n = pop.len();
    let sh = |d: f64| {
        if d < spec.sigma_share {
            1.0 - (d / spec.sigma_share).powf(spec.alpha)
        } else {
            0.0
        }
    };
    let mut niche = vec![0.0; n];
    for i in 0..n {
        niche[i] += 1.0;
        for j in i + 1..n {
            let s = sh(distance(&pop[i].genotype, &pop[j].genotype)?);
            niche[i] += s;
            niche[j] += s;
        }
    }
    Ok(fitness.iter().zip(&niche).map(|(f, c)| f / c).collect())
}

/// Earliest generation whose diversity fell below the threshold while
/// the population best was still short of the known optimum. With no
/// known optimum, the diversity condition alone decides.
pub fn detect_premature_convergence(trace: &RunTrace, diversity_threshold: f64) -> Option<u64> {
    trace
        .rows
        .iter()
        .find(|row| {
            row.diversity < diversity_threshold
                && trace.internal_optimum.map_or(true, |opt| row.best_fitness < opt)
        })
        .map(|row| row.generation)
}

/// Default batch size for comparative experiments.
pub const DEFAULT_RUN_COUNT: usize = 20;

/// Aggregate statistics over a batch of independent runs. Fitness values
/// are in internal (maximize) units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub runs: usize,
    /// Best-ever fitness of each run, in seed order.
    pub best_fitnesses: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (divisor R-1); absent for a single run.
    pub std: Option<f64>,
    pub min: f64,
    pub max: f64,
    /// Fraction of runs whose best reached the target; absent when the
    /// config names no target fitness.
    pub success_rate: Option<f64>,
    /// Per-run evaluations consumed when the target was first met, in
    /// seed order; None marks an unsuccessful run.
    pub evals_to_success: Vec<Option<u64>>,
}

impl RunSummary {
    /// Builds the summary from per-run bests. `target` is the internal-
    /// units success threshold, when one exists.
    pub fn from_bests(
        best_fitnesses: Vec<f64>,
        target: Option<f64>,
        evals_to_success: Vec<Option<u64>>,
    ) -> Result<Self> {
        let runs = best_fitnesses.len();
        if runs == 0 {
            return Err(EvoError::Stats("summary of zero runs".into()));
        }
        let mean = best_fitnesses.iter().sum::<f64>() / runs as f64;
        let std = if runs >= 2 {
            let ss: f64 = best_fitnesses.iter().map(|b| (b - mean) * (b - mean)).sum();
            Some((ss / (runs - 1) as f64).sqrt())
        } else {
            None
        };
        let min = best_fitnesses.iter().copied().fold(f64::INFINITY, f64::min);
        let max = best_fitnesses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let success_rate = target.map(|t| {
            best_fitnesses.iter().filter(|b| **b >= t).count() as f64 / runs as f64
        });
        Ok(RunSummary {
            runs,
            best_fitnesses,
            mean,
            std,
            min,
            max,
            success_rate,
            evals_to_success,
        })
    }

    /// Quartiles (25/50/75, nearest-rank) of evaluations-to-success over
    /// the successful runs; absent when no run succeeded.
    pub fn success_quantiles(&self) -> Option<[u64; 3]> {
        let mut evals: Vec<u64> = self.evals_to_success.iter().flatten().copied().collect();
        if evals.is_empty() {
            return None;
        }
        evals.sort_unstable();
        let pick = |q: f64| {
            let rank = (q * evals.len() as f64).ceil() as usize;
            evals[rank.max(1) - 1]
        };
        Some([pick(0.25), pick(0.5), pick(0.75)])
    }
}

/// A batch's traces alongside its summary, for callers that also need
/// the per-generation records.
#[derive(Debug, Clone)]
pub struct BatchResult {
    pub seeds: Vec<u64>,
    pub traces: Vec<RunTrace>,
    pub summary: RunSummary,
}

/// Runs the configuration `runs` times with seeds base_seed, base_seed+1,
/// ..., and aggregates per-run bests. A failing run reports its seed.
pub fn run_batch(
    config: &EaConfig,
    problem: &Problem,
    runs: usize,
    base_seed: u64,
) -> Result<RunSummary> {
    Ok(run_batch_traced(config, problem, runs, base_seed)?.summary)
}

/// Same as [`run_batch`], keeping every trace.
pub fn run_batch_traced(
    config: &EaConfig,
    problem: &Problem,
    runs: usize,
    base_seed: u64,
) -> Result<BatchResult> {
    if runs < 1 {
        return Err(EvoError::InvalidConfig("a batch needs at least one run".into()));
    }
    let target = config.termination.iter().find_map(|c| match c {
        TerminationCriterion::TargetFitness(v) => Some(*v),
        _ => None,
    });
    let mut seeds = Vec::with_capacity(runs);
    let mut traces = Vec::with_capacity(runs);
    for i in 0..runs {
        let seed = base_seed.wrapping_add(i as u64);
        let mut cfg = config.clone();
        cfg.seed = seed;
        let trace = crate::engine::run(&cfg, problem).map_err(|e| EvoError::RunFailed {
            seed,
            message: e.to_string(),
        })?;
        seeds.push(seed);
        traces.push(trace);
    }
    let bests: Vec<f64> = traces.iter().map(|t| t.best.fitness()).collect();
    let evals = traces
        .iter()
        .map(|t| target.and_then(|v| evals_to_target(t, v)))
        .collect();
    let summary = RunSummary::from_bests(bests, target, evals)?;
    Ok(BatchResult { seeds, traces, summary })
}

/// Evaluations consumed when the running best first reached the target,
/// read off the trace rows.
fn evals_to_target(trace: &RunTrace, target: f64) -> Option<u64> {
    let mut running = f64::NEG_INFINITY;
    for row in &trace.rows {
        running = running.max(row.best_fitness);
        if running >= target {
            return Some(row.evaluations);
        }
    }
    // A non-elitist engine can meet the target through an individual
    // that never survives to a generation boundary.
    if trace.best.fitness() >= target {
        return trace.rows.last().map(|r| r.evaluations);
    }
    None
}

/// Welch's unequal-variance t statistic and its Welch-Satterthwaite
/// degrees of freedom. Both samples need at least two values and at
/// least one nonzero variance.
pub fn welch_t_test(sample_a: &[f64], sample_b: &[f64]) -> Result<(f64, f64)> {
    let na = sample_a.len();
    let nb = sample_b.len();
    if na < 2 || nb < 2 {
        return Err(EvoError::Stats(format!(
            "Welch t-test needs at least 2 values per sample, got {na} and {nb}"
        )));
    }
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let var = |s: &[f64], m: f64| {
        s.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (s.len() - 1) as f64
    };
    let ma = mean(sample_a);
    let mb = mean(sample_b);
    let va = var(sample_a, ma);
    let vb = var(sample_b, mb);
    if va == 0.0 && vb == 0.0 {
        return Err(EvoError::Stats(
            "Welch t-test is undefined when both samples have zero variance".into(),
        ));
    }
    let qa = va / na as f64;
    let qb = vb / nb as f64;
    let t = (ma - mb) / (qa + qb).sqrt();
    let dof = (qa + qb) * (qa + qb)
        / (qa * qa / (na as f64 - 1.0) + qb * qb / (nb as f64 - 1.0));
    Ok((t, dof))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Significance {
    /// alpha = 0.05
    FivePercent,
    /// alpha = 0.01
    OnePercent,
}

/// Two-sided critical values for Student's t, rows (dof, 0.05, 0.01).
/// Fractional dof buckets down to the largest tabulated row.
const T_TABLE: &[(f64, f64, f64)] = &[
    (1.0, 12.706, 63.657),
    (2.0, 4.303, 9.925),
    (3.0, 3.182, 5.841),
    (4.0, 2.776, 4.604),
    (5.0, 2.571, 4.032),
    (6.0, 2.447, 3.707),
    (7.0, 2.365, 3.499),
    (8.0, 2.306, 3.355),
    (9.0, 2.262, 3.250),
    (10.0, 2.228, 3.169),
    (11.0, 2.201, 3.106),
    (12.0, 2.179, 3.055),
    (13.0, 2.160, 3.012),
    (14.0, 2.145, 2.977),
    (15.0, 2.131, 2.947),
    (16.0, 2.120, 2.921),
    (17.0, 2.110, 2.898),
    (18.0, 2.101, 2.878),
    (19.0, 2.093, 2.861),
    (20.0, 2.086, 2.845),
    (21.0, 2.080, 2.831),
    (22.0, 2.074, 2.819),
    (23.0, 2.069, 2.807),
    (24.0, 2.064, 2.797),
    (25.0, 2.060, 2.787),
    (26.0, 2.056, 2.779),
    (27.0, 2.052, 2.771),
    (28.0, 2.048, 2.763),
    (29.0, 2.045, 2.756),
    (30.0, 2.042, 2.750),
    (40.0, 2.021, 2.704),
    (60.0, 2.000, 2.660),
    (120.0, 1.980, 2.617),
];

/// Normal-approximation row, used for dof of 1000 and beyond.
const T_LIMIT: (f64, f64) = (1.960, 2.576);

/// Two-sided critical value; |t| at or above it rejects equal means at
/// the chosen significance. Buckets round dof down (conservative);
/// dof below 1 clamps to the first row.
pub fn t_critical(dof: f64, significance: Significance) -> f64 {
    let pick = |row: (f64, f64, f64)| match significance {
        Significance::FivePercent => row.1,
        Significance::OnePercent => row.2,
    };
    if dof >= 1000.0 {
        return match significance {
            Significance::FivePercent => T_LIMIT.0,
            Significance::OnePercent => T_LIMIT.1,
        };
    }
    let mut chosen = T_TABLE[0];
    for row in T_TABLE {
        if row.0 <= dof {
            chosen = *row;
        } else {
            break;
        }
    }
    pick(chosen)
}
