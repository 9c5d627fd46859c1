//! Alignment reporting: per-document outcome table, correction totals, and
//! the information-loss table, in matching machine-readable (TSV) and
//! human-readable forms.

use std::collections::BTreeMap;

use crate::stats::{diff, group_thousands, Counts, LossRow};

use super::index::Split;
use super::{AlignedDocument, DocOutcome, MatchKind};

/// Aggregated correction counters for one treebank.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorrectionTotals {
    /// Markable fragments whose trailing pipe token was cut (and how many
    /// documents were touched); counted during conversion.
    pub pipe_fragments: usize,
    pub pipe_documents: usize,
    /// Ambiguous sentences resolved by the assignment (and their documents).
    pub ambiguous_sentences: usize,
    pub ambiguous_documents: usize,
    /// Mention spans whose token ranges changed while mapping onto the
    /// treebank tokens.
    pub adjusted_spans: usize,
    /// Mentions dropped: lost lines or unmappable fragments.
    pub dropped_mentions: usize,
    /// Mentions dropped because the bracket encoding cannot express them.
    pub dropped_crossing: usize,
}

/// One row of the per-document outcome table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocRow {
    pub doc_id: String,
    /// Splits the resolved sentences touch; two marks mean a split overlap.
    pub splits: Vec<Split>,
    pub outcome: String,
    pub detail: String,
}

/// Everything reported about one treebank's alignment run.
#[derive(Debug, Clone, Default)]
pub struct TreebankReport {
    pub name: String,
    pub docs: Vec<DocRow>,
    /// Counts over the converted records (before alignment).
    pub before: Counts,
    /// Counts over the aligned output (after alignment).
    pub after: Counts,
    pub corrections: CorrectionTotals,
    pub match_kinds: BTreeMap<&'static str, usize>,
    pub findings: Vec<String>,
    pub outcome_counts: BTreeMap<String, usize>,
}

impl TreebankReport {
    pub fn new(name: impl Into<String>) -> Self {
        TreebankReport {
            name: name.into(),
            ..TreebankReport::default()
        }
    }

    /// Fold one aligned document into the report. `before`/`after` counts
    /// are added separately because they come from the statistics pass.
    pub fn add_document(&mut self, doc: &AlignedDocument) {
        let splits = match &doc.outcome {
            DocOutcome::Aligned { split } | DocOutcome::Moved { split, .. } => vec![*split],
            DocOutcome::Discarded { splits } => splits.clone(),
            DocOutcome::Unmatched | DocOutcome::Unresolvable => Vec::new(),
        };
        self.docs.push(DocRow {
            doc_id: doc.doc_id.clone(),
            splits,
            outcome: doc.outcome.label(),
            detail: doc.findings.join("; "),
        });
        *self
            .outcome_counts
            .entry(outcome_family(&doc.outcome).to_string())
            .or_default() += 1;
        for kind in doc.line_kinds.iter() {
            let name = kind.map(MatchKind::name).unwrap_or("lost");
            *self.match_kinds.entry(name).or_default() += 1;
        }
        self.corrections.adjusted_spans += doc.corrections.adjusted_spans;
        self.corrections.dropped_mentions += doc.corrections.dropped_mentions;
        self.corrections.dropped_crossing += doc.corrections.dropped_crossing;
        if doc.corrections.ambiguous_resolved > 0 {
            self.corrections.ambiguous_sentences += doc.corrections.ambiguous_resolved;
            self.corrections.ambiguous_documents += 1;
        }
        for finding in &doc.findings {
            self.findings.push(format!("{}: {finding}", doc.doc_id));
        }
    }

    pub fn loss_rows(&self) -> Vec<LossRow> {
        diff(&self.before, &self.after)
    }

    /// The per-document outcome table: one row per document, an `x` under
    /// every split it touches.
    pub fn outcome_table_tsv(&self) -> String {
        let mut out = String::from("document\ttrain\ttest\tdev\toutcome\tdetail\n");
        for row in &self.docs {
            out.push_str(&row.doc_id);
            for split in Split::ALL {
                out.push('\t');
                if row.splits.contains(&split) {
                    out.push('x');
                }
            }
            out.push('\t');
            out.push_str(&row.outcome);
            out.push('\t');
            out.push_str(&row.detail);
            out.push('\n');
        }
        out
    }
}

fn outcome_family(outcome: &DocOutcome) -> &'static str {
    match outcome {
        DocOutcome::Aligned { .. } => "aligned",
        DocOutcome::Moved { .. } => "moved",
        DocOutcome::Discarded { .. } => "discarded",
        DocOutcome::Unmatched | DocOutcome::Unresolvable => "unmatched",
    }
}

/// The loss table over one or more treebanks: absolute counts with
/// percentages per treebank plus a total column.
pub fn loss_table_tsv(reports: &[TreebankReport]) -> String {
    let mut out = String::from("category");
    for report in reports {
        out.push_str(&format!("\t{0} lost\t{0} pct", report.name));
    }
    out.push_str("\ttotal\n");

    let rows: Vec<Vec<LossRow>> = reports.iter().map(TreebankReport::loss_rows).collect();
    for i in 0..crate::stats::Category::LOSS.len() {
        out.push_str(rows[0][i].category.name());
        let mut total = 0i64;
        for per_tb in &rows {
            let row = &per_tb[i];
            total += row.lost();
            out.push_str(&format!("\t{}\t{}", row.lost(), row.percent()));
        }
        out.push_str(&format!("\t{total}\n"));
    }
    out
}

/// Human-readable rendering of the same loss table.
pub fn loss_table_text(reports: &[TreebankReport]) -> String {
    let mut columns: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["Alignment loss".to_string()];
    for report in reports {
        header.push(format!("{} (%)", report.name));
    }
    header.push("Total".to_string());

    let rows: Vec<Vec<LossRow>> = reports.iter().map(TreebankReport::loss_rows).collect();
    for i in 0..crate::stats::Category::LOSS.len() {
        let mut line = vec![rows[0][i].category.name().to_string()];
        let mut total = 0i64;
        for per_tb in &rows {
            let row = &per_tb[i];
            total += row.lost();
            line.push(row.cell_grouped());
        }
        line.push(group_thousands(total));
        columns.push(line);
    }

    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for line in &columns {
        for (i, cell) in line.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let render = |cells: &[String]| {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<width$}", c, width = widths[i]))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = render(&header);
    out.push('\n');
    for line in &columns {
        out.push_str(&render(line));
        out.push('\n');
    }
    out
}

/// Short human-readable run summary for one treebank.
pub fn summary_text(report: &TreebankReport) -> String {
    let mut out = format!("treebank {}\n", report.name);
    out.push_str(&format!("  documents: {}\n", report.docs.len()));
    for (family, count) in &report.outcome_counts {
        out.push_str(&format!("    {family}: {count}\n"));
    }
    out.push_str("  sentences by match kind:\n");
    for (kind, count) in &report.match_kinds {
        out.push_str(&format!("    {kind}: {count}\n"));
    }
    let c = &report.corrections;
    out.push_str(&format!(
        "  corrections: {} pipe spans in {} documents, {} ambiguous sentences in {} documents, {} adjusted spans\n",
        c.pipe_fragments, c.pipe_documents, c.ambiguous_sentences, c.ambiguous_documents, c.adjusted_spans
    ));
    out.push_str(&format!(
        "  dropped: {} mentions (lost lines), {} mentions (bracket order)\n",
        c.dropped_mentions, c.dropped_crossing
    ));
    out
}
