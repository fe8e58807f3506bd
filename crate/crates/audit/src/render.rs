//! Plain-text rendering of an [`AuditReport`] with an aligned verdict table.

use std::fmt::Write;

use crate::run::{AuditReport, CheckOutcome};

/// Counterexamples listed per failing check.
const SHOWN: usize = 3;

fn detail(c: &CheckOutcome) -> String {
    if let Some(e) = &c.error {
        return e.clone();
    }
    if let Some(fit) = &c.fit {
        let status = if fit.feasible() { "feasible" } else { "infeasible" };
        return format!(
            "{status}, margin {:.3e}, agreement {:.4}, λ = {:?}",
            fit.margin, fit.agreement, rounded(&fit.lambda)
        );
    }
    if let Some(cal) = &c.calibration {
        return format!("κ = {:?}, lemma-zero {}", rounded(&cal.kappa), cal.lemma_zero);
    }
    match &c.report {
        Some(r) => format!(
            "{} profiles, {} comparisons, {} violations, {} inconclusive",
            r.stats.profiles_examined, r.stats.comparisons, r.stats.violations, r.stats.inconclusive
        ),
        None => String::new(),
    }
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e6).round() / 1e6).collect()
}

pub fn render_text(report: &AuditReport) -> String {
    let mut out = String::new();
    let cfg = &report.config;
    let _ = writeln!(out, "{} {}", report.tool, report.version);
    let _ = writeln!(out, "mechanism  {} ({} agents; alternatives {})", report.mechanism, cfg.agents, cfg.alternatives.join(" "));
    let _ = writeln!(out, "payments   {}", report.payments);
    let boxes: Vec<String> = cfg.bounds.iter().map(|[lo, hi]| format!("({lo}, {hi})")).collect();
    let _ = writeln!(
        out,
        "grid       r = {:?}, {} profiles, box {}",
        report.grid.resolution,
        report.grid.profiles,
        boxes.join(" × ")
    );
    let _ = writeln!(out, "seed       {} ({})", report.seed, report.prng);
    let _ = writeln!(out);

    let rows: Vec<[String; 5]> = report
        .checks
        .iter()
        .map(|c| {
            [
                c.name.clone(),
                c.verdict.as_str().into(),
                c.expected.map_or("-".into(), |e| e.as_str().into()),
                c.expectation_met.map_or("-".into(), |m| if m { "yes" } else { "no" }.into()),
                detail(c),
            ]
        })
        .collect();
    let header = ["CHECK", "VERDICT", "EXPECTED", "MET", "DETAIL"].map(String::from);
    let mut widths = [0usize; 4];
    for row in std::iter::once(&header).chain(&rows) {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    for row in std::iter::once(&header).chain(&rows) {
        let mut line = String::new();
        for (w, cell) in widths.iter().zip(row) {
            let _ = write!(line, "{cell:<w$}  ", w = *w);
        }
        line.push_str(&row[4]);
        let _ = writeln!(out, "{}", line.trim_end());
    }

    for c in &report.checks {
        let Some(r) = &c.report else { continue };
        if r.counterexamples.is_empty() {
            continue;
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{} counterexamples ({} of {}):", c.name, r.counterexamples.len().min(SHOWN), r.stats.violations);
        for cx in r.counterexamples.iter().take(SHOWN) {
            let _ = writeln!(out, "  profiles {:?}: {} (margin {:.3e})", cx.profiles, cx.explanation, cx.margin);
        }
    }
    for c in &report.checks {
        if let Some(fit) = &c.fit {
            if !fit.violating_profiles.is_empty() {
                let _ = writeln!(out);
                let _ = writeln!(out, "{} violating profiles: {:?}", c.name, fit.violating_profiles);
            }
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "overall: {}  expectations: {}",
        report.overall.as_str(),
        if report.expectations_met { "met" } else { "not met" }
    );
    out
}
