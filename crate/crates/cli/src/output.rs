//! Output rendering: the CSV documents, the structured-text report, and the
//! per-element fusion transcript. All rendering is pure string building so
//! the same bytes can go to stdout or to files.

use std::fmt::Write as _;

use nonrank::{Bpa, DistanceMatrix, ElementTrace, InfluenceRanking, NodeLabel};

/// Hop-distance matrix as CSV: label header row, `inf` for unreachable.
pub fn distances_csv(dist: &DistanceMatrix, labels: &[NodeLabel]) -> String {
    let n = dist.node_count();
    let mut out = String::new();
    let header: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| match dist.get(i, j) {
                Some(d) => d.to_string(),
                None => "inf".into(),
            })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Ranking as CSV, scores at full precision.
pub fn ranking_csv(ranking: &InfluenceRanking) -> String {
    let mut out = String::from("rank,label,score\n");
    for entry in ranking.entries() {
        let _ = writeln!(out, "{},{},{}", entry.rank, entry.label, entry.score);
    }
    out
}

/// Provenance header shared by the structured-text report.
pub struct ReportContext<'a> {
    pub mode: &'a str,
    pub score: &'a str,
    pub layer_names: &'a [String],
    pub digest: &'a str,
}

/// Ranking as a structured-text report with provenance, scores at four
/// decimals.
pub fn ranking_report(ranking: &InfluenceRanking, ctx: &ReportContext) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "tool: nonrank {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "input-sha256: {}", ctx.digest);
    let _ = writeln!(out, "mode: {}", ctx.mode);
    let _ = writeln!(out, "score: {}", ctx.score);
    let _ = writeln!(
        out,
        "tie-break: descending score, then ascending node label"
    );
    let _ = writeln!(out, "layers: {}", ctx.layer_names.join(", "));
    let _ = writeln!(out, "nodes: {}", ranking.len());
    for entry in ranking.entries() {
        let _ = writeln!(
            out,
            "rank {}: node {} score {:.4}",
            entry.rank, entry.label, entry.score
        );
    }
    out
}

fn bpa_triple(bpa: &Bpa) -> String {
    format!(
        "({:.4}, {:.4}, {:.4})",
        bpa.similar(),
        bpa.dissimilar(),
        bpa.uncertain()
    )
}

/// Fold history of every off-diagonal element, one line per fold step.
pub fn transcript(traces: &[ElementTrace]) -> String {
    let mut out = String::new();
    for trace in traces {
        for step in &trace.steps {
            let _ = write!(
                out,
                "element ({},{}): layer {} BPA {}, K={:.6}, running {}",
                trace.row_label,
                trace.col_label,
                step.layer,
                bpa_triple(&step.input),
                step.conflict,
                bpa_triple(&step.running),
            );
            if step.degenerate {
                out.push_str(" [degenerate layer: vacuous]");
            }
            out.push('\n');
        }
    }
    out
}
