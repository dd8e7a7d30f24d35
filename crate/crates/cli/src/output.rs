//! Rendering of traces and summaries to the on-disk formats.
//!
//! Every floating-point value goes through [`fmt_float`]: round to nine
//! significant digits, then print the shortest decimal that parses back
//! to the rounded value. Reruns with the same config and seed therefore
//! produce byte-identical files.

use evokit::{RunSummary, RunTrace};

/// Nine-significant-digit float rendering. Plain decimal notation, no
/// exponent, so spreadsheet tools and diff stay happy.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("rounded float reparses");
    rounded.to_string()
}

/// One trace file: a mandatory header plus one row per generation. The
/// mean_sigma column is empty for genotypes without step sizes.
pub fn trace_csv(trace: &RunTrace) -> String {
    let mut out =
        String::from("generation,evaluations,best_fitness,mean_fitness,diversity,mean_sigma\n");
    for row in &trace.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.generation,
            row.evaluations,
            fmt_float(row.best_fitness),
            fmt_float(row.mean_fitness),
            fmt_float(row.diversity),
            row.mean_sigma.map(fmt_float).unwrap_or_default(),
        ));
    }
    out
}

/// The batch summary document. `std` is omitted for a single run;
/// `success_rate` is null when the config names no fitness target. All
/// numbers are internal (maximize) units, matching the trace files.
pub fn summary_json(problem: &str, dialect: &str, summary: &RunSummary, seeds: &[u64]) -> String {
    let mut out = String::from("{\n");
    out.push_str(&format!("  \"problem\": {},\n", json_string(problem)));
    out.push_str(&format!("  \"dialect\": {},\n", json_string(dialect)));
    out.push_str(&format!("  \"runs\": {},\n", summary.runs));
    out.push_str(&format!("  \"mean\": {},\n", fmt_float(summary.mean)));
    if let Some(std) = summary.std {
        out.push_str(&format!("  \"std\": {},\n", fmt_float(std)));
    }
    out.push_str(&format!("  \"min\": {},\n", fmt_float(summary.min)));
    out.push_str(&format!("  \"max\": {},\n", fmt_float(summary.max)));
    match summary.success_rate {
        Some(rate) => out.push_str(&format!("  \"success_rate\": {},\n", fmt_float(rate))),
        None => out.push_str("  \"success_rate\": null,\n"),
    }
    let seeds: Vec<String> = seeds.iter().map(u64::to_string).collect();
    out.push_str(&format!("  \"seeds\": [{}]\n", seeds.join(", ")));
    out.push_str("}\n");
    out
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// The aggregate line printed by `run` and `compare`; optional fields
/// appear only when defined so the line never shows placeholders.
pub fn aggregate_line(summary: &RunSummary) -> String {
    let mut line = format!("runs={} mean={}", summary.runs, fmt_float(summary.mean));
    if let Some(std) = summary.std {
        line.push_str(&format!(" std={}", fmt_float(std)));
    }
    line.push_str(&format!(
        " min={} max={}",
        fmt_float(summary.min),
        fmt_float(summary.max)
    ));
    if let Some(rate) = summary.success_rate {
        line.push_str(&format!(" success_rate={}", fmt_float(rate)));
    }
    line
}

#[cfg(test)]
mod tests {
    use super::*;
    use evokit::{Genotype, Individual, RealVector, TerminationCriterion, TraceRow};

    #[test]
    fn floats_render_at_nine_significant_digits() {
        assert_eq!(fmt_float(0.5), "0.5");
        assert_eq!(fmt_float(50.0), "50");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_float(-1e-8), "-0.00000001");
        assert_eq!(fmt_float(0.1 + 0.2), "0.3");
        assert_eq!(fmt_float(123456789.25), "123456789");
        assert_eq!(fmt_float(1e15), "1000000000000000");
        assert_eq!(fmt_float(-0.0), "0");
    }

    #[test]
    fn formatted_floats_reparse_to_the_nine_digit_rounding() {
        for &x in &[0.7, -2.25, 1.0 / 7.0, 3.141592653589793, 1e-12, 6.02e23] {
            let rendered: f64 = fmt_float(x).parse().unwrap();
            let rounded: f64 = format!("{x:.8e}").parse().unwrap();
            assert_eq!(rendered, rounded, "for input {x}");
        }
    }

    fn sample_trace(mean_sigma: Option<f64>) -> RunTrace {
        let best = Individual::evaluated(Genotype::Real(RealVector::new(vec![0.25])), 1.5);
        RunTrace {
            rows: vec![
                TraceRow {
                    generation: 0,
                    evaluations: 4,
                    best_fitness: 1.0,
                    mean_fitness: 0.5,
                    diversity: 0.25,
                    mean_sigma,
                },
                TraceRow {
                    generation: 1,
                    evaluations: 8,
                    best_fitness: 1.5,
                    mean_fitness: 1.0 / 3.0,
                    diversity: 0.0,
                    mean_sigma,
                },
            ],
            best,
            reason: TerminationCriterion::MaxGenerations(1),
            internal_optimum: None,
        }
    }

    #[test]
    fn trace_csv_has_fixed_header_and_one_row_per_generation() {
        let csv = trace_csv(&sample_trace(None));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "generation,evaluations,best_fitness,mean_fitness,diversity,mean_sigma"
        );
        assert_eq!(lines[1], "0,4,1,0.5,0.25,");
        assert_eq!(lines[2], "1,8,1.5,0.333333333,0,");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn trace_csv_fills_mean_sigma_when_present() {
        let csv = trace_csv(&sample_trace(Some(0.125)));
        assert!(csv.lines().nth(1).unwrap().ends_with(",0.125"));
    }

    fn sample_summary(runs: usize) -> RunSummary {
        RunSummary {
            runs,
            best_fitnesses: vec![1.0; runs],
            mean: 2.0,
            std: if runs > 1 { Some(1.0) } else { None },
            min: 1.0,
            max: 3.0,
            success_rate: Some(0.5),
            evals_to_success: vec![Some(10); runs],
        }
    }

    #[test]
    fn summary_json_round_trips_and_keeps_field_names() {
        let text = summary_json("onemax-20", "GA", &sample_summary(2), &[7, 8]);
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["problem"], "onemax-20");
        assert_eq!(doc["dialect"], "GA");
        assert_eq!(doc["runs"], 2);
        assert_eq!(doc["mean"], 2.0);
        assert_eq!(doc["std"], 1.0);
        assert_eq!(doc["min"], 1.0);
        assert_eq!(doc["max"], 3.0);
        assert_eq!(doc["success_rate"], 0.5);
        assert_eq!(doc["seeds"], serde_json::json!([7, 8]));
    }

    #[test]
    fn single_run_summary_omits_std() {
        let text = summary_json("onemax-20", "GA", &sample_summary(1), &[7]);
        assert!(!text.contains("\"std\""));
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(doc.get("std").is_none());
    }

    #[test]
    fn summary_without_target_reports_null_success_rate() {
        let mut summary = sample_summary(2);
        summary.success_rate = None;
        let text = summary_json("sphere-3", "ES", &summary, &[0, 1]);
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(doc["success_rate"].is_null());
    }

    #[test]
    fn aggregate_line_grows_with_available_fields() {
        assert_eq!(
            aggregate_line(&sample_summary(2)),
            "runs=2 mean=2 std=1 min=1 max=3 success_rate=0.5"
        );
        let mut bare = sample_summary(1);
        bare.success_rate = None;
        assert_eq!(aggregate_line(&bare), "runs=1 mean=2 min=1 max=3");
    }
}
