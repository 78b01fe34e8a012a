use std::fmt::Write;

use super::{AuditRecord, AuditReport};

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn record_line(out: &mut String, r: &AuditRecord) {
    let oracle = r.oracle.map_or("?", yes_no);
    let solver: Vec<String> = r
        .solver
        .iter()
        .map(|s| s.decision.map_or("?".to_string(), |d| d.to_string().to_lowercase()))
        .collect();
    let held = r.identities.iter().filter(|c| c.holds).count();
    let _ = writeln!(
        out,
        "#{:<5} n={} m={} k={} oracle={} solver=[{}] identities={}/{} replays={}/{} {}  {}",
        r.index,
        r.n,
        r.m,
        r.k,
        oracle,
        solver.join(","),
        held,
        r.identities.len(),
        r.replays.iter().filter(|p| p.achieved).count(),
        r.replays.len(),
        r.status.keyword(),
        r.encoding
    );
    for f in &r.failures {
        let _ = writeln!(out, "       ! {f}");
    }
}

/// Human-readable report. Contains no timing, so equal specs give equal text.
pub fn render_text(report: &AuditReport) -> String {
    let mut out = String::new();
    let spec = &report.spec;
    let _ = writeln!(out, "gadget: {}", spec.gadget);
    let _ = writeln!(out, "source: {}", spec.source);
    let _ = writeln!(
        out,
        "budget: {}",
        spec.budget.map_or("unlimited".to_string(), |b| b.to_string())
    );
    let _ = writeln!(out, "instances: {}", report.records.len());
    let _ = writeln!(
        out,
        "agreement: {}",
        report.agreement.map_or("not checked", |a| if a { "yes" } else { "no" })
    );
    let _ = writeln!(out, "counterexamples: {}", report.counterexamples.len());
    let _ = writeln!(out, "budget exceeded: {}", report.budget_exceeded.len());
    if let Some(first) = report.counterexamples.first().and_then(|&i| report.record(i)) {
        let _ = writeln!(out, "minimal counterexample: #{} {}", first.index, first.encoding);
    }
    if !report.formulas.is_empty() {
        let _ = writeln!(out, "\nformulas:");
        for t in &report.formulas {
            let _ = writeln!(
                out,
                "  {:>6} held {:>6} failed{}  {}",
                t.held,
                t.failed,
                if t.required { "  " } else { " *" },
                t.row
            );
        }
        let _ = writeln!(out, "  (* = reported only)");
    }
    let _ = writeln!(out, "\nrecords:");
    for r in &report.records {
        record_line(&mut out, r);
    }
    out
}

/// One JSON object per record, in report order.
pub fn render_json_lines(report: &AuditReport) -> String {
    report
        .records
        .iter()
        .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
        .collect()
}
