//! Text, markdown and JSON renderings of pipeline reports.

use triality_core::factored;

use crate::pipeline::{multiset, Check, PipelineReport, Status, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Markdown,
    Json,
}

fn status_tag(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::HeuristicPass => "heuristic-pass",
        Status::HeuristicFail => "HEURISTIC-FAIL",
    }
}

/// One line per check, without timings when `timings` is false.
pub fn render_checks(checks: &[Check], timings: bool) -> String {
    let mut out = String::new();
    for c in checks {
        out.push_str(&format!("[{}] {}: expected {}; actual {}", status_tag(c.status), c.name, c.expected, c.actual));
        if timings {
            out.push_str(&format!(" ({:.2} s)", c.seconds));
        }
        out.push('\n');
    }
    out
}

fn orbit_cell(orbits: &[u64]) -> String {
    let s = multiset(orbits);
    s.trim_start_matches('{').trim_end_matches('}').to_string()
}

/// The subgroup table for one or more reports: structure, factored order
/// and the orbit sizes per case.
pub fn render_table(reports: &[PipelineReport], format: Format) -> String {
    let mut structures: Vec<(String, u64)> = Vec::new();
    for r in reports {
        for e in &r.table {
            if !structures.iter().any(|(s, _)| *s == e.structure) {
                structures.push((e.structure.clone(), e.order));
            }
        }
    }
    let mut header = vec!["Structure".to_string(), "Order".to_string()];
    header.extend(reports.iter().map(|r| format!("Orbit sizes ({})", r.case)));
    let mut rows = vec![header];
    for (name, order) in &structures {
        let mut row = vec![name.clone(), factored(*order as u128)];
        for r in reports {
            row.push(match r.table.iter().find(|e| e.structure == *name) {
                Some(e) => orbit_cell(&e.orbits),
                None => "---".to_string(),
            });
        }
        rows.push(row);
    }
    let mut out = String::new();
    match format {
        Format::Markdown => {
            for (i, row) in rows.iter().enumerate() {
                out.push_str(&format!("| {} |\n", row.join(" | ")));
                if i == 0 {
                    out.push_str(&format!("|{}\n", row.iter().map(|_| "---|").collect::<String>()));
                }
            }
        }
        Format::Text | Format::Json => {
            for row in &rows {
                out.push_str(&row.join(" | "));
                out.push('\n');
            }
        }
    }
    out
}

/// Full human-readable report of one run; ends with the conclusions.
pub fn render_report(report: &PipelineReport, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Markdown => out.push_str(&format!("## Case {} (seed {})\n\n```\n", report.case, report.seed)),
        _ => out.push_str(&format!("case {} (seed {})\n", report.case, report.seed)),
    }
    out.push_str(&render_checks(&report.stages, true));
    if format == Format::Markdown {
        out.push_str("```\n");
    }
    if !report.table.is_empty() {
        out.push('\n');
        out.push_str(&render_table(std::slice::from_ref(report), format));
    }
    out.push('\n');
    for c in report.stages.iter().filter(|c| c.status == Status::HeuristicPass) {
        out.push_str(&format!("warning: {} passed heuristically\n", c.name));
    }
    out.push_str(&format!(
        "verdict: {}\n",
        match report.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    ));
    for name in ["alpha(vrho)", "alpha(rho)"] {
        if let Some(c) = report.check(name) {
            out.push_str(&format!("{name} = {}\n", c.actual));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::TableEntry;

    fn report(case: &str, table: Vec<TableEntry>) -> PipelineReport {
        PipelineReport { case: case.into(), seed: 1, stages: Vec::new(), table, verdict: Verdict::Pass }
    }

    #[test]
    fn rows_match_the_printed_table() {
        let r = report(
            "q2",
            vec![TableEntry {
                structure: "A4".into(),
                order: 12,
                orbits: vec![63, 63, 63],
                fingerprint: String::new(),
            }],
        );
        assert!(render_table(std::slice::from_ref(&r), Format::Markdown).contains("A4 | 2^2.3 | 63 (x3)"));
        assert!(render_table(&[r], Format::Text).contains("A4 | 2^2.3 | 63 (x3)"));
        let r = report(
            "q3",
            vec![TableEntry {
                structure: "[3^5]".into(),
                order: 243,
                orbits: vec![157248],
                fingerprint: String::new(),
            }],
        );
        assert!(render_table(&[r], Format::Text).contains("[3^5] | 3^5 | 157248"));
    }

    #[test]
    fn empty_report_gives_header_only() {
        let text = render_table(&[report("q2", Vec::new())], Format::Text);
        assert_eq!(text, "Structure | Order | Orbit sizes (q2)\n");
    }
}
