//! The three subcommands. Exit codes are part of the contract: 0 for
//! success, 2 for configuration or usage problems, 3 for failures at
//! run time; nothing else is ever returned.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use evokit::{
    detect_premature_convergence, run_batch, run_batch_traced, t_critical, welch_t_test,
    RunSummary, Significance,
};

use crate::config;
use crate::output::{aggregate_line, fmt_float, summary_json, trace_csv};

#[derive(Debug)]
pub enum CmdError {
    /// Bad config, grid, or flags; exit code 2.
    Config(String),
    /// The experiment itself failed; exit code 3.
    Runtime(String),
}

impl CmdError {
    pub fn code(&self) -> i32 {
        match self {
            CmdError::Config(_) => 2,
            CmdError::Runtime(_) => 3,
        }
    }
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Config(msg) | CmdError::Runtime(msg) => write!(f, "{msg}"),
        }
    }
}

fn runtime(e: evokit::EvoError) -> CmdError {
    CmdError::Runtime(e.to_string())
}

/// Files written into the output directory, removed again if the
/// command fails before committing. A directory this command created is
/// removed wholesale on failure; a preexisting one only loses the files
/// written into it.
struct OutputGuard {
    dir: PathBuf,
    created_dir: bool,
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputGuard {
    fn new(dir: PathBuf) -> Result<Self, CmdError> {
        let created_dir = !dir.exists();
        fs::create_dir_all(&dir)
            .map_err(|e| CmdError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
        Ok(OutputGuard { dir, created_dir, written: Vec::new(), committed: false })
    }

    /// Removes leftovers of an earlier batch so a rerun with fewer runs
    /// cannot leave a stale run_042.csv lying around.
    fn clean_stale(&self) -> Result<(), CmdError> {
        let entries = fs::read_dir(&self.dir)
            .map_err(|e| CmdError::Runtime(format!("cannot read {}: {e}", self.dir.display())))?;
        for entry in entries.flatten() {
            let name = entry.file_name();
            let name = name.to_string_lossy();
            let is_trace = name
                .strip_prefix("run_")
                .and_then(|rest| rest.strip_suffix(".csv"))
                .map_or(false, |digits| {
                    digits.len() >= 3 && digits.bytes().all(|b| b.is_ascii_digit())
                });
            if is_trace || name == "summary.json" || name == "sweep.csv" {
                fs::remove_file(entry.path()).map_err(|e| {
                    CmdError::Runtime(format!("cannot remove stale {}: {e}", name))
                })?;
            }
        }
        Ok(())
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CmdError> {
        let path = self.dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| CmdError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for path in &self.written {
            fs::remove_file(path).ok();
        }
        if self.created_dir {
            fs::remove_dir_all(&self.dir).ok();
        }
    }
}

pub fn cmd_run(
    config_path: &Path,
    out: Option<PathBuf>,
    seed: Option<u64>,
    runs: Option<usize>,
    quiet: bool,
) -> Result<(), CmdError> {
    let mut exp = config::load_experiment(config_path).map_err(CmdError::Config)?;
    if let Some(seed) = seed {
        exp.base_seed = seed;
    }
    if let Some(runs) = runs {
        if runs == 0 {
            return Err(CmdError::Config("--runs must be at least 1".into()));
        }
        exp.runs = runs;
    }

    let batch =
        run_batch_traced(&exp.config, &exp.problem, exp.runs, exp.base_seed).map_err(runtime)?;

    let dir = out.unwrap_or_else(|| PathBuf::from("out"));
    let mut guard = OutputGuard::new(dir)?;
    guard.clean_stale()?;
    for (i, trace) in batch.traces.iter().enumerate() {
        guard.write(&format!("run_{i:03}.csv"), &trace_csv(trace))?;
    }
    guard.write(
        "summary.json",
        &summary_json(exp.problem.name(), &exp.dialect, &batch.summary, &batch.seeds),
    )?;

    if !quiet {
        for (i, trace) in batch.traces.iter().enumerate() {
            let last = trace.rows.last().expect("a trace always has its generation-0 row");
            let mut line = format!(
                "run {i:03}: seed={} best={} evals={} stop={}",
                batch.seeds[i],
                fmt_float(trace.best.fitness()),
                last.evaluations,
                trace.reason,
            );
            if let Some(threshold) = exp.diversity_threshold {
                if let Some(generation) = detect_premature_convergence(trace, threshold) {
                    line.push_str(&format!(" premature_convergence={generation}"));
                }
            }
            println!("{line}");
        }
        println!("aggregate: {}", aggregate_line(&batch.summary));
        println!(
            "wrote {} trace file(s) and summary.json to {}",
            batch.traces.len(),
            guard.dir.display()
        );
    }
    guard.commit();
    Ok(())
}

pub fn cmd_compare(
    a_path: &Path,
    b_path: &Path,
    runs: Option<usize>,
) -> Result<(), CmdError> {
    let mut a = config::load_experiment(a_path).map_err(CmdError::Config)?;
    let mut b = config::load_experiment(b_path).map_err(CmdError::Config)?;
    if let Some(runs) = runs {
        a.runs = runs;
        b.runs = runs;
    }
    if a.runs < 2 || b.runs < 2 {
        return Err(CmdError::Config(
            "compare needs at least two runs per configuration".into(),
        ));
    }
    if a.problem.name() != b.problem.name() {
        return Err(CmdError::Config(format!(
            "configs target different problems: {} vs {}",
            a.problem.name(),
            b.problem.name()
        )));
    }

    let summary_a = run_batch(&a.config, &a.problem, a.runs, a.base_seed).map_err(runtime)?;
    let summary_b = run_batch(&b.config, &b.problem, b.runs, b.base_seed).map_err(runtime)?;
    println!("a: {} {}", a_path.display(), aggregate_line(&summary_a));
    println!("b: {} {}", b_path.display(), aggregate_line(&summary_b));

    let std_a = summary_a.std.expect("two or more runs carry a std");
    let std_b = summary_b.std.expect("two or more runs carry a std");
    if std_a == 0.0 && std_b == 0.0 {
        // No spread on either side; the t statistic is undefined. Equal
        // means are trivially indistinguishable, unequal ones trivially
        // distinct.
        let dof = (summary_a.runs + summary_b.runs - 2) as f64;
        if summary_a.mean == summary_b.mean {
            println!("welch: t=0 dof={}", fmt_float(dof));
            println!("significance at 0.05: not significant");
            println!("significance at 0.01: not significant");
        } else {
            println!("welch: both samples are constant with different means; t is unbounded");
            println!("significance at 0.05: significant");
            println!("significance at 0.01: significant");
        }
    } else {
        let (t, dof) = welch_t_test(&summary_a.best_fitnesses, &summary_b.best_fitnesses)
            .map_err(runtime)?;
        println!("welch: t={} dof={}", fmt_float(t), fmt_float(dof));
        for (level, label) in [
            (Significance::FivePercent, "0.05"),
            (Significance::OnePercent, "0.01"),
        ] {
            let critical = t_critical(dof, level);
            let verdict = if t.abs() > critical { "significant" } else { "not significant" };
            println!(
                "significance at {label}: {verdict} (|t|={} critical={})",
                fmt_float(t.abs()),
                fmt_float(critical)
            );
        }
    }

    if summary_a.mean > summary_b.mean {
        println!("higher mean best fitness: {}", a_path.display());
    } else if summary_b.mean > summary_a.mean {
        println!("higher mean best fitness: {}", b_path.display());
    } else {
        println!("higher mean best fitness: (equal)");
    }
    Ok(())
}

/// One sweep axis: a dotted config path and the values it takes.
type Axis = (String, Vec<toml::Value>);

pub fn cmd_sweep(
    config_path: &Path,
    grid_path: &Path,
    out: Option<PathBuf>,
) -> Result<(), CmdError> {
    let base = config::load_experiment(config_path).map_err(CmdError::Config)?;
    let base_dir = config_path.parent().unwrap_or(Path::new("."));
    let text = fs::read_to_string(config_path)
        .map_err(|e| CmdError::Config(format!("cannot read config {}: {e}", config_path.display())))?;
    let base_doc: toml::Value = toml::from_str(&text)
        .map_err(|e| CmdError::Config(format!("{}: {e}", config_path.display())))?;

    let grid_text = fs::read_to_string(grid_path)
        .map_err(|e| CmdError::Config(format!("cannot read grid {}: {e}", grid_path.display())))?;
    let axes = parse_grid(&grid_text).map_err(CmdError::Config)?;

    let settings = axes.iter().map(|(_, values)| values.len()).try_fold(
        1usize,
        |acc, len| acc.checked_mul(len),
    );
    let settings = match settings {
        Some(n) if n <= base.sweep_cap => n,
        _ => {
            return Err(CmdError::Config(format!(
                "grid exceeds the cap of {} settings",
                base.sweep_cap
            )))
        }
    };

    let mut rows: Vec<(Vec<String>, RunSummary)> = Vec::with_capacity(settings);
    for index in 0..settings {
        let mut doc = base_doc.clone();
        let mut labels = Vec::with_capacity(axes.len());
        let mut remainder = index;
        for (key, values) in &axes {
            let value = &values[remainder % values.len()];
            remainder /= values.len();
            set_path(&mut doc, key, value.clone()).map_err(CmdError::Config)?;
            labels.push(render_value(value));
        }
        let label = axes
            .iter()
            .zip(&labels)
            .map(|((key, _), value)| format!("{key}={value}"))
            .collect::<Vec<_>>()
            .join(" ");
        let exp = config::experiment_from_value(doc, base_dir)
            .map_err(|e| CmdError::Config(format!("setting {label}: {e}")))?;
        let summary =
            run_batch(&exp.config, &exp.problem, exp.runs, exp.base_seed).map_err(runtime)?;
        println!("{label}: {}", aggregate_line(&summary));
        rows.push((labels, summary));
    }

    rows.sort_by(|a, b| b.1.mean.total_cmp(&a.1.mean));

    let mut csv = String::new();
    for (key, _) in &axes {
        csv.push_str(key);
        csv.push(',');
    }
    csv.push_str("runs,mean,std,min,max,success_rate\n");
    for (labels, summary) in &rows {
        for label in labels {
            csv.push_str(label);
            csv.push(',');
        }
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            summary.runs,
            fmt_float(summary.mean),
            summary.std.map(fmt_float).unwrap_or_default(),
            fmt_float(summary.min),
            fmt_float(summary.max),
            summary.success_rate.map(fmt_float).unwrap_or_default(),
        ));
    }

    let dir = out.unwrap_or_else(|| PathBuf::from("out"));
    let mut guard = OutputGuard::new(dir)?;
    guard.write("sweep.csv", &csv)?;
    println!("wrote {} setting(s) to {}", rows.len(), guard.dir.join("sweep.csv").display());
    guard.commit();
    Ok(())
}

/// Parses the grid file: every key is a dotted config path mapping to a
/// non-empty list of numbers, written either as `dialect.p_m = [...]`
/// or under a `[dialect]` heading. Axes come back sorted by key so the
/// sweep table's column order does not depend on the file layout.
fn parse_grid(text: &str) -> Result<Vec<Axis>, String> {
    let doc: toml::Value = toml::from_str(text).map_err(|e| e.to_string())?;
    let mut axes = Vec::new();
    flatten_grid(String::new(), doc, &mut axes)?;
    if axes.is_empty() {
        return Err("grid is empty; nothing to sweep".into());
    }
    axes.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(axes)
}

fn flatten_grid(prefix: String, value: toml::Value, axes: &mut Vec<Axis>) -> Result<(), String> {
    match value {
        toml::Value::Table(table) => {
            for (key, value) in table {
                let path = if prefix.is_empty() { key } else { format!("{prefix}.{key}") };
                flatten_grid(path, value, axes)?;
            }
            Ok(())
        }
        toml::Value::Array(list) => {
            let key = prefix;
            let last = key.rsplit('.').next().unwrap_or(&key);
            if last == "seed" || last == "base_seed" {
                return Err(format!(
                    "grid key `{key}`: seeds are not tunables; use --seed on the run command"
                ));
            }
            if list.is_empty() {
                return Err(format!("grid key `{key}` lists no values"));
            }
            if !list
                .iter()
                .all(|v| matches!(v, toml::Value::Integer(_) | toml::Value::Float(_)))
            {
                return Err(format!("grid key `{key}` must list numbers only"));
            }
            axes.push((key, list));
            Ok(())
        }
        _ if prefix.is_empty() => Err("grid file must be a table of key = [values] lines".into()),
        _ => Err(format!("grid key `{prefix}` must map to a list of values")),
    }
}

/// Writes `value` at a dotted path, creating intermediate tables. The
/// subsequent full revalidation decides whether the key actually means
/// anything.
fn set_path(doc: &mut toml::Value, path: &str, value: toml::Value) -> Result<(), String> {
    let segments: Vec<&str> = path.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(format!("grid key `{path}` is malformed"));
    }
    let mut cursor = doc;
    for segment in &segments[..segments.len() - 1] {
        let table = cursor
            .as_table_mut()
            .ok_or_else(|| format!("grid key `{path}`: `{segment}` is not inside a table"))?;
        cursor = table
            .entry(segment.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    let table = cursor
        .as_table_mut()
        .ok_or_else(|| format!("grid key `{path}` does not address a table"))?;
    table.insert(segments[segments.len() - 1].to_string(), value);
    Ok(())
}

fn render_value(value: &toml::Value) -> String {
    match value {
        toml::Value::Integer(n) => n.to_string(),
        toml::Value::Float(x) => fmt_float(*x),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_axes_come_back_sorted_with_values_intact() {
        let axes = parse_grid("dialect.p_m = [0.01, 0.02]\ndialect.p_c = [0.5, 0.7]\n").unwrap();
        assert_eq!(axes.len(), 2);
        assert_eq!(axes[0].0, "dialect.p_c");
        assert_eq!(axes[1].0, "dialect.p_m");
        assert_eq!(axes[1].1, vec![toml::Value::Float(0.01), toml::Value::Float(0.02)]);
    }

    #[test]
    fn quoted_keys_and_section_headings_address_the_same_axis() {
        let quoted = parse_grid("\"engine.mu\" = [10, 20]\n").unwrap();
        let heading = parse_grid("[engine]\nmu = [10, 20]\n").unwrap();
        assert_eq!(quoted, heading);
    }

    #[test]
    fn empty_grid_and_empty_axis_are_rejected() {
        assert!(parse_grid("").unwrap_err().contains("empty"));
        assert!(parse_grid("\"dialect.p_m\" = []\n").unwrap_err().contains("no values"));
    }

    #[test]
    fn seed_axes_are_rejected() {
        let err = parse_grid("\"analysis.base_seed\" = [1, 2]\n").unwrap_err();
        assert!(err.contains("not tunables"), "diagnostic was: {err}");
    }

    #[test]
    fn non_numeric_axes_are_rejected() {
        let err = parse_grid("\"dialect.name\" = [\"GA\", \"ES\"]\n").unwrap_err();
        assert!(err.contains("numbers only"), "diagnostic was: {err}");
    }

    #[test]
    fn set_path_reaches_nested_keys_and_creates_tables() {
        let mut doc: toml::Value = toml::from_str("[dialect]\nname = \"GA\"\n").unwrap();
        set_path(&mut doc, "dialect.p_m", toml::Value::Float(0.05)).unwrap();
        set_path(&mut doc, "analysis.runs", toml::Value::Integer(5)).unwrap();
        assert_eq!(doc["dialect"]["p_m"], toml::Value::Float(0.05));
        assert_eq!(doc["analysis"]["runs"], toml::Value::Integer(5));

        let err = set_path(&mut doc, "dialect.name.deeper", toml::Value::Integer(1)).unwrap_err();
        assert!(err.contains("deeper") || err.contains("not inside"), "got: {err}");
    }

    #[test]
    fn uncommitted_outputs_are_removed_on_drop() {
        let dir = std::env::temp_dir().join(format!("evokit-guard-{}", std::process::id()));
        std::fs::remove_dir_all(&dir).ok();
        {
            let mut guard = OutputGuard::new(dir.clone()).unwrap();
            guard.write("run_000.csv", "header\n").unwrap();
            assert!(dir.join("run_000.csv").exists());
        }
        assert!(!dir.exists(), "directory created by the guard should be gone");

        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("keep.txt"), "untouched").unwrap();
        {
            let mut guard = OutputGuard::new(dir.clone()).unwrap();
            guard.write("run_000.csv", "header\n").unwrap();
        }
        assert!(dir.exists());
        assert!(dir.join("keep.txt").exists());
        assert!(!dir.join("run_000.csv").exists());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn committed_outputs_survive() {
        let dir = std::env::temp_dir().join(format!("evokit-commit-{}", std::process::id()));
        std::fs::remove_dir_all(&dir).ok();
        {
            let mut guard = OutputGuard::new(dir.clone()).unwrap();
            guard.write("summary.json", "{}\n").unwrap();
            guard.commit();
        }
        assert!(dir.join("summary.json").exists());
        std::fs::remove_dir_all(&dir).ok();
    }
}
