//! Treebank alignment: match converted documents against UD splits, resolve
//! duplicate sentences, detect split overlaps, fall back to the companion
//! treebank, and produce merged CoNLL-U with loss accounting.

pub mod index;
pub mod matcher;
pub mod report;

pub use index::{Split, TreebankIndex};
pub use matcher::{
    check_split_overlap, compute_remap, cross_treebank_fallback, disambiguate,
    exact_match_fraction, match_fraction, match_sentences, Candidate, Disambiguation,
    HomeDecision, MatchKind, ResolvedLine, SplitCheck, TokenRemap,
};
pub use report::{CorrectionTotals, DocRow, TreebankReport};

use crate::conllu::{merge_misc, ConlluSentence};
use crate::entity::{annotation_items, encode_entities_dropping};
use crate::error::Error;
use crate::record::{renumber_clusters, CorefDocument, Mention};
use crate::spans::WordSpan;

/// Tunable alignment behaviour. The defaults implement the documented
/// normalization rules; everything is a named setting so the pipeline
/// generalizes to other corpus pairs.
#[derive(Debug, Clone)]
pub struct AlignOptions {
    /// Extra positions around the expected window when fuzzy-matching.
    pub fuzzy_window_slack: usize,
    /// Fraction of exactly-matched lines above which a document counts as
    /// belonging to a treebank.
    pub majority_threshold: f64,
}

impl Default for AlignOptions {
    fn default() -> Self {
        AlignOptions {
            fuzzy_window_slack: 2,
            majority_threshold: 0.5,
        }
    }
}

/// Final placement of one document.
#[derive(Debug, Clone, PartialEq)]
pub enum DocOutcome {
    Aligned { split: Split },
    Moved { to: String, split: Split },
    Discarded { splits: Vec<Split> },
    Unmatched,
    /// Matched somewhere but without a single unambiguous sentence to
    /// anchor disambiguation.
    Unresolvable,
}

impl DocOutcome {
    pub fn label(&self) -> String {
        match self {
            DocOutcome::Aligned { .. } => "aligned".to_string(),
            DocOutcome::Moved { to, .. } => format!("moved:{to}"),
            DocOutcome::Discarded { .. } => "discarded:split-overlap".to_string(),
            DocOutcome::Unmatched => "unmatched".to_string(),
            DocOutcome::Unresolvable => "unmatched:no-anchor".to_string(),
        }
    }
}

/// Per-document correction tallies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DocCorrections {
    pub ambiguous_resolved: usize,
    /// Mention fragments whose token range changed during remapping.
    pub adjusted_spans: usize,
    /// Mentions dropped because a line was lost or a fragment unmappable.
    pub dropped_mentions: usize,
    /// Mentions dropped because the bracket encoding cannot express them.
    pub dropped_crossing: usize,
}

/// Everything the report and the writers need about one aligned document.
#[derive(Debug, Clone)]
pub struct AlignedDocument {
    pub doc_id: String,
    pub outcome: DocOutcome,
    /// Match kind per line; `None` for lost lines.
    pub line_kinds: Vec<Option<MatchKind>>,
    /// The surviving structure on treebank tokens; what the merged output
    /// encodes, and the "after" side of the loss accounting.
    pub aligned: Option<CorefDocument>,
    /// Merged sentences ready to emit, first one carrying `# newdoc id`.
    pub merged: Vec<ConlluSentence>,
    pub corrections: DocCorrections,
    pub findings: Vec<String>,
}

/// Align one converted document against its treebank, falling back to the
/// companion treebanks when it is not found at home.
pub fn align_document(
    record: &CorefDocument,
    home: &TreebankIndex,
    others: &[&TreebankIndex],
    opts: &AlignOptions,
) -> AlignedDocument {
    let mut findings = Vec::new();

    // the stay/leave signal includes normalized matches; the move check
    // against other treebanks is exact-only
    let home_fraction = match_fraction(record, home);
    let decision = cross_treebank_fallback(record, home_fraction, others, opts.majority_threshold);

    let (target, moved_to) = match &decision {
        HomeDecision::Stay => (home, None),
        HomeDecision::AmbiguousHome {
            other,
            other_fraction,
        } => {
            findings.push(format!(
                "also matches treebank {other} ({:.0}% of lines); kept in {}",
                other_fraction * 100.0,
                home.name
            ));
            (home, None)
        }
        HomeDecision::Move { to, other_fraction } => {
            findings.push(format!(
                "not found in {} ({:.0}% exact) but matches {to} ({:.0}%); moved",
                home.name,
                home_fraction * 100.0,
                other_fraction * 100.0
            ));
            let target = others
                .iter()
                .find(|o| &o.name == to)
                .expect("fallback names a known treebank");
            (*target, Some(to.clone()))
        }
        HomeDecision::Unmatched => {
            // a document with some home matches below the majority threshold
            // still aligns at home (partially, with losses)
            if home_fraction > 0.0 {
                (home, None)
            } else {
                return AlignedDocument {
                    doc_id: record.doc_id.clone(),
                    outcome: DocOutcome::Unmatched,
                    line_kinds: vec![None; record.sentences.len()],
                    aligned: None,
                    merged: Vec::new(),
                    corrections: DocCorrections::default(),
                    findings,
                };
            }
        }
    };

    let candidates = match_sentences(record, target, opts);
    let resolution = match disambiguate(&record.doc_id, &candidates, target) {
        Ok(r) => r,
        Err(Error::NoAnchors { .. }) => {
            findings.push("no unambiguous sentence to anchor disambiguation".to_string());
            return AlignedDocument {
                doc_id: record.doc_id.clone(),
                outcome: DocOutcome::Unresolvable,
                line_kinds: vec![None; record.sentences.len()],
                aligned: None,
                merged: Vec::new(),
                corrections: DocCorrections::default(),
                findings,
            };
        }
        Err(other) => {
            findings.push(format!("disambiguation failed: {other}"));
            return AlignedDocument {
                doc_id: record.doc_id.clone(),
                outcome: DocOutcome::Unresolvable,
                line_kinds: vec![None; record.sentences.len()],
                aligned: None,
                merged: Vec::new(),
                corrections: DocCorrections::default(),
                findings,
            };
        }
    };

    for (line, table) in &resolution.candidate_table {
        findings.push(format!(
            "line {line} unresolved; candidates: {}",
            table.join(", ")
        ));
    }
    for (a, b) in &resolution.monotonicity_violations {
        findings.push(format!(
            "resolved positions of lines {a} and {b} are not increasing"
        ));
    }

    let line_kinds: Vec<Option<MatchKind>> = resolution
        .lines
        .iter()
        .map(|r| r.as_ref().map(|r| r.kind))
        .collect();

    match check_split_overlap(&resolution.lines, target) {
        SplitCheck::Empty => AlignedDocument {
            doc_id: record.doc_id.clone(),
            outcome: DocOutcome::Unmatched,
            line_kinds,
            aligned: None,
            merged: Vec::new(),
            corrections: DocCorrections::default(),
            findings,
        },
        SplitCheck::Discarded(splits) => {
            findings.push(format!(
                "sentences span splits {}; document discarded",
                splits
                    .iter()
                    .map(|s| s.name())
                    .collect::<Vec<_>>()
                    .join("+")
            ));
            AlignedDocument {
                doc_id: record.doc_id.clone(),
                outcome: DocOutcome::Discarded { splits },
                line_kinds,
                aligned: None,
                merged: Vec::new(),
                corrections: DocCorrections::default(),
                findings,
            }
        }
        SplitCheck::Kept(split) => {
            let (aligned, merged, corrections, mut merge_findings) =
                build_merged(record, &resolution, target);
            findings.append(&mut merge_findings);
            let outcome = match moved_to {
                Some(to) => DocOutcome::Moved { to, split },
                None => DocOutcome::Aligned { split },
            };
            AlignedDocument {
                doc_id: record.doc_id.clone(),
                outcome,
                line_kinds,
                aligned: Some(aligned),
                merged,
                corrections: DocCorrections {
                    ambiguous_resolved: resolution.ambiguous_resolved,
                    ..corrections
                },
                findings,
            }
        }
    }
}

/// Project the record onto its resolved treebank sentences and render the
/// merged CoNLL-U.
fn build_merged(
    record: &CorefDocument,
    resolution: &Disambiguation,
    index: &TreebankIndex,
) -> (CorefDocument, Vec<ConlluSentence>, DocCorrections, Vec<String>) {
    let mut corrections = DocCorrections::default();
    let mut findings = Vec::new();

    // kept lines in order, with their treebank sentences and token remaps
    let mut new_index_of: Vec<Option<usize>> = vec![None; record.sentences.len()];
    let mut bases: Vec<&ConlluSentence> = Vec::new();
    let mut remaps: Vec<TokenRemap> = Vec::new();
    let mut forms: Vec<Vec<String>> = Vec::new();
    for (line, resolved) in resolution.lines.iter().enumerate() {
        let Some(res) = resolved else { continue };
        let meta = index.meta(&res.sent_id).expect("resolved ids are indexed");
        let ud_forms: Vec<String> = meta
            .sentence
            .tokens()
            .map(|t| t.form().to_string())
            .collect();
        let remap = compute_remap(&record.sentences[line], &ud_forms);
        new_index_of[line] = Some(bases.len());
        bases.push(&meta.sentence);
        remaps.push(remap);
        forms.push(ud_forms);
    }

    // project mentions through the remaps
    let mut mentions: Vec<Mention> = Vec::new();
    'mention: for mention in &record.mentions {
        let mut fragments = Vec::with_capacity(mention.fragments.len());
        let mut adjusted = false;
        for frag in &mention.fragments {
            let Some(new_sentence) = new_index_of[frag.sentence] else {
                corrections.dropped_mentions += 1;
                continue 'mention;
            };
            match &remaps[new_sentence] {
                TokenRemap::Identity => fragments.push(WordSpan {
                    sentence: new_sentence,
                    start: frag.start,
                    end: frag.end,
                }),
                TokenRemap::Map(map) => {
                    let start = (frag.start..=frag.end).find_map(|t| map.get(t).copied().flatten());
                    let end = (frag.start..=frag.end)
                        .rev()
                        .find_map(|t| map.get(t).copied().flatten());
                    match (start, end) {
                        (Some(start), Some(end)) if start <= end => {
                            if start != frag.start || end != frag.end {
                                adjusted = true;
                            }
                            fragments.push(WordSpan {
                                sentence: new_sentence,
                                start,
                                end,
                            });
                        }
                        _ => {
                            corrections.dropped_mentions += 1;
                            findings.push(format!(
                                "mention of cluster {} lost: tokens {}..={} of line {} have no treebank counterpart",
                                mention.cluster, frag.start, frag.end, frag.sentence
                            ));
                            continue 'mention;
                        }
                    }
                }
            }
        }
        if adjusted {
            corrections.adjusted_spans += 1;
        }
        mentions.push(Mention {
            cluster: mention.cluster,
            fragments,
        });
    }

    let mut aligned = CorefDocument {
        doc_id: record.doc_id.clone(),
        sentences: forms,
        mentions,
        bridges: record.bridges.clone(),
        split_antecedents: record.split_antecedents.clone(),
    };
    renumber_clusters(&mut aligned);
    aligned.sort_mentions();

    let (aligned, annotations, dropped) =
        encode_entities_dropping(&aligned).expect("projected document is structurally valid");
    corrections.dropped_crossing = dropped.len();
    for mention in &dropped {
        findings.push(format!(
            "mention of cluster {} at sentence {} tokens {}..={} not representable; dropped",
            mention.cluster,
            mention.first().sentence,
            mention.first().start,
            mention.last().end
        ));
    }

    let items = annotation_items(&annotations);
    let mut merged = Vec::with_capacity(bases.len());
    for (i, base) in bases.iter().enumerate() {
        let sentence =
            merge_misc(base, &items[i]).expect("annotation slots match the base token count");
        merged.push(sentence);
    }
    if let Some(first) = merged.first_mut() {
        first
            .comments
            .insert(0, format!("# newdoc id = {}", record.doc_id));
    }

    (aligned, merged, corrections, findings)
}
