//! Rendering of run reports.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::mutation::MutantId;
use crate::suite::RunReport;

/// Pretty JSON with keys sorted at every level.
pub fn to_json(report: &RunReport) -> String {
    // serde_json::Value keeps object keys in a BTreeMap
    let value = serde_json::to_value(report).expect("report serializes");
    let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
    out.push('\n');
    out
}

pub const HISTORY_HEADER: &str = "generation,best_fitness,suite_score,mean_fitness";

pub fn history_csv(report: &RunReport) -> String {
    let mut out = String::from(HISTORY_HEADER);
    out.push('\n');
    for row in &report.per_generation_history {
        let _ = writeln!(out, "{},{},{},{}", row.generation, row.best_fitness, row.suite_score, row.mean_fitness);
    }
    out
}

fn ids(set: &BTreeSet<MutantId>) -> String {
    if set.is_empty() {
        return "none".into();
    }
    set.iter().map(|id| id.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn to_text(report: &RunReport) -> String {
    let mut out = String::new();
    let score = report.score();
    let _ = writeln!(out, "generations run: {}", report.generations_run);
    let _ = writeln!(out, "mutation score:  {:.4} ({score})", report.final_score);
    if let Some(max) = report.achievable_score {
        let _ = writeln!(out, "achievable:      {max:.4}");
    }
    if report.best_fit_flag {
        out.push_str("result:          best fit\n");
    } else {
        let _ = writeln!(out, "result:          {} mutants found", report.killed_count);
    }
    let _ = writeln!(out, "target reached:  {}", if report.target_reached { "yes" } else { "no" });
    let _ = writeln!(out, "killed:          {}", ids(&report.killed_mutant_ids));
    let _ = writeln!(out, "surviving:       {}", ids(&report.surviving_mutant_ids));
    match &report.equivalent_mutant_ids {
        Some(eq) => {
            let _ = writeln!(out, "equivalent:      {}", ids(eq));
        }
        None => out.push_str("equivalent:      not scanned\n"),
    }
    let _ = writeln!(out, "seed:            {}", report.seed);
    let _ = writeln!(out, "final suite ({} tests):", report.final_suite.len());
    for t in &report.final_suite {
        let _ = writeln!(out, "  {t}");
    }
    out
}
