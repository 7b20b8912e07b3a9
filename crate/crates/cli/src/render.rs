use std::io::Write;

use serde_json::{json, Value};

use pvopt_core::harness::BatchReport;
use pvopt_core::optimum::{write_sweep_csv, GridSweep, OptimumCertificate};
use pvopt_core::validator::CorpusReport;
use pvopt_core::Design;

use crate::OutputFormat;

/// `x` with 17 significant digits, enough to round-trip any `f64`.
pub fn sig17(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        return format!("{x:.16e}");
    }
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

fn opt(x: Option<f64>) -> String {
    x.map(sig17).unwrap_or_else(|| "-".into())
}

fn variable_names(design: &Design) -> Vec<&'static str> {
    match design {
        Design::Vessel(_) => vec!["d1", "d2", "r", "L"],
        Design::Cantilever(_) => vec!["x1", "x2", "x3", "x4", "x5"],
    }
}

pub fn certificate<W: Write>(out: &mut W, cert: &OptimumCertificate, format: OutputFormat) -> anyhow::Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, cert)?;
            writeln!(out)?;
        }
        OutputFormat::Text => {
            writeln!(out, "problem            {}", cert.problem)?;
            writeln!(out, "objective          {}", sig17(cert.objective))?;
            for (name, v) in variable_names(&cert.design).iter().zip(cert.design.values()) {
                writeln!(out, "  {name:<16} {}", sig17(v))?;
            }
            let active: Vec<String> = cert.active_constraints.iter().map(|n| format!("g{n}")).collect();
            writeln!(out, "active             {}", active.join(", "))?;
            for m in &cert.multipliers {
                writeln!(out, "multiplier {:<7} {}", m.constraint, sig17(m.value))?;
            }
            writeln!(out, "kkt residual       {}", sig17(cert.kkt_residual))?;
            writeln!(out, "provenance         {}", serde_json::to_value(cert.provenance)?.as_str().unwrap_or_default())?;
            if let Some(curve) = &cert.curve {
                writeln!(out, "arc                [{}, {}]", sig17(curve.lower), sig17(curve.upper))?;
                writeln!(out, "slope at ends      {}, {}", sig17(curve.derivative_at_lower), sig17(curve.derivative_at_upper))?;
                let roots: Vec<String> = curve.roots_in_range.iter().map(|r| sig17(*r)).collect();
                writeln!(out, "stationary points  {}", if roots.is_empty() { "none".into() } else { roots.join(", ") })?;
                writeln!(out, "curve minimum      {}", serde_json::to_value(curve.minimum)?.as_str().unwrap_or_default())?;
                writeln!(out, "volume lambda      {}", sig17(curve.volume_lambda))?;
            }
            for alt in &cert.alternatives {
                writeln!(out, "rejected           {} f = {}", alt.label, sig17(alt.objective))?;
            }
        }
        OutputFormat::Csv => {
            writeln!(out, "field,value")?;
            writeln!(out, "problem,{}", cert.problem)?;
            writeln!(out, "objective,{}", sig17(cert.objective))?;
            for (name, v) in variable_names(&cert.design).iter().zip(cert.design.values()) {
                writeln!(out, "{name},{}", sig17(v))?;
            }
            for n in &cert.active_constraints {
                writeln!(out, "active,g{n}")?;
            }
            for m in &cert.multipliers {
                writeln!(out, "multiplier_{},{}", m.constraint, sig17(m.value))?;
            }
            writeln!(out, "kkt_residual,{}", sig17(cert.kkt_residual))?;
            writeln!(out, "provenance,{}", serde_json::to_value(cert.provenance)?.as_str().unwrap_or_default())?;
        }
    }
    Ok(())
}

fn verdict_rows(report: &CorpusReport) -> Vec<Value> {
    report
        .entries
        .iter()
        .map(|e| {
            json!({
                "source": e.record.source,
                "problem": e.record.problem,
                "reported_f": e.record.reported_f,
                "flagged_invalid": e.record.flagged_invalid,
                "classification": e.verdict.classification,
                "recomputed_f": e.verdict.recomputed_f,
                "worst_violation": e.verdict.worst_violation,
                "gap_to_optimum": e.verdict.gap_to_optimum,
                "as_expected": e.as_expected,
            })
        })
        .collect()
}

pub fn corpus<W: Write>(out: &mut W, report: &CorpusReport, format: OutputFormat) -> anyhow::Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, &verdict_rows(report))?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "source,problem,reported_f,flagged_invalid,classification,recomputed_f,worst_violation,gap_to_optimum,as_expected")?;
            for e in &report.entries {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    e.record.source,
                    e.record.problem,
                    e.record.reported_f,
                    e.record.flagged_invalid,
                    e.verdict.classification,
                    e.verdict.recomputed_f.map(|v| v.to_string()).unwrap_or_default(),
                    e.verdict.worst_violation.map(|v| v.to_string()).unwrap_or_default(),
                    e.verdict.gap_to_optimum,
                    e.as_expected
                )?;
            }
        }
        OutputFormat::Text => {
            let width = report.entries.iter().map(|e| e.record.source.len()).max().unwrap_or(6).max(6);
            writeln!(out, "{:<width$}  {:<10}  {:>12}  {:<24}  {:>12}  {:>12}", "source", "problem", "reported", "verdict", "recomputed", "gap")?;
            for e in &report.entries {
                let star = if e.record.flagged_invalid { "*" } else { " " };
                let mark = if e.as_expected { "" } else { "  <-- anomaly" };
                writeln!(
                    out,
                    "{:<width$}  {:<10}  {:>11}{star}  {:<24}  {:>12}  {:>12.6}{mark}",
                    e.record.source,
                    e.record.problem.name(),
                    e.record.reported_f,
                    e.verdict.classification.as_str(),
                    e.verdict.recomputed_f.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into()),
                    e.verdict.gap_to_optimum,
                )?;
            }
            writeln!(out)?;
            for (c, n) in &report.counts {
                writeln!(out, "{:<24} {n}", c.as_str())?;
            }
            if let Some((source, f)) = &report.best_unflagged {
                writeln!(out, "best unflagged           {f} ({source})")?;
            }
            writeln!(out, "anomalies                {}", report.anomalies)?;
        }
    }
    Ok(())
}

pub fn sweep<W: Write>(out: &mut W, sweep: &GridSweep, format: OutputFormat) -> anyhow::Result<()> {
    match format {
        OutputFormat::Csv => write_sweep_csv(sweep, &mut *out)?,
        OutputFormat::Json => {
            serde_json::to_writer(&mut *out, sweep)?;
            writeln!(out)?;
        }
        OutputFormat::Text => {
            writeln!(out, "{:>3} {:>3} {:>7} {:>7} {:>9} {:>20} {:>20} {:>20}", "I", "J", "d1", "d2", "feasible", "r_opt", "L_opt", "f_opt")?;
            for r in &sweep.rows {
                writeln!(
                    out,
                    "{:>3} {:>3} {:>7} {:>7} {:>9} {:>20} {:>20} {:>20}",
                    r.i, r.j, r.d1, r.d2, r.feasible, opt(r.r_opt), opt(r.l_opt), opt(r.f_opt)
                )?;
            }
            writeln!(out, "argmin I={} J={} f={}", sweep.argmin.0, sweep.argmin.1, sig17(sweep.min_objective))?;
        }
    }
    Ok(())
}

pub fn batch<W: Write>(out: &mut W, report: &BatchReport, format: OutputFormat) -> anyhow::Result<()> {
    match format {
        OutputFormat::Json => {
            let runs: Vec<Value> = report
                .runs
                .iter()
                .map(|r| {
                    json!({
                        "seed": r.config.seed,
                        "algorithm": r.config.algorithm,
                        "evaluations": r.evaluations_used,
                        "best_penalized_f": r.best_penalized_f,
                        "best_feasible_f": r.best_feasible_f,
                        "best_feasible_design": r.best_feasible_design,
                        "gap": r.gap,
                    })
                })
                .collect();
            let doc = json!({
                "problem": report.problem,
                "runs": runs,
                "thresholds": report.thresholds,
                "infeasible_runs": report.infeasible_runs,
                "median_gap": report.median_gap,
                "best_gap": report.best_gap,
                "worst_gap": report.worst_gap,
                "mean_gap": report.mean_gap,
                "gap_variance": report.gap_variance,
            });
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "seed,algorithm,evaluations,best_penalized_f,best_feasible_f,gap")?;
            for r in &report.runs {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.config.seed,
                    r.config.algorithm,
                    r.evaluations_used,
                    r.best_penalized_f,
                    r.best_feasible_f.map(|v| v.to_string()).unwrap_or_default(),
                    r.gap.map(|v| v.to_string()).unwrap_or_default()
                )?;
            }
        }
        OutputFormat::Text => {
            writeln!(out, "{:>6}  {:>12}  {:>22}  {:>22}  {:>12}", "seed", "evaluations", "best penalized", "best feasible", "gap")?;
            for r in &report.runs {
                writeln!(
                    out,
                    "{:>6}  {:>12}  {:>22}  {:>22}  {:>12}",
                    r.config.seed,
                    r.evaluations_used,
                    sig17(r.best_penalized_f),
                    opt(r.best_feasible_f),
                    r.gap.map(|g| format!("{g:.3e}")).unwrap_or_else(|| "-".into())
                )?;
            }
            writeln!(out)?;
            for t in &report.thresholds {
                writeln!(out, "gap < {:<10} {}/{} ({:.1}%)", t.threshold, t.successes, report.runs.len(), 100.0 * t.success_rate)?;
            }
            let g = |v: Option<f64>| v.map(|g| format!("{g:.3e}")).unwrap_or_else(|| "-".into());
            writeln!(out, "median gap       {}", g(report.median_gap))?;
            writeln!(out, "best gap         {}", g(report.best_gap))?;
            writeln!(out, "worst gap        {}", g(report.worst_gap))?;
            writeln!(out, "infeasible runs  {}", report.infeasible_runs)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig17_round_trips() {
        for x in [6059.714335048436, 1.339956360599074, 0.4466521202, 42.0984455958549, 1e-12, 123456789.125] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(sig17(6059.714335048436), "6059.7143350484357");
        assert_eq!(sig17(0.0), "0");
    }
}
