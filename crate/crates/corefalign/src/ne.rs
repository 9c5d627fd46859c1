//! Named-entity transfer between treebank versions.
//!
//! Entities live in a single MISC item per token (key `name` in the source
//! data, configurable). Labels are either plain per-token values grouped by
//! runs, or BIO-prefixed (`B-PER`/`I-PER`) behind a flag; `O` and absent
//! both mean outside. Placement copies nothing but that item: every other
//! column stays the current treebank's.

use std::collections::HashMap;

use crate::conllu::ConlluSentence;
use crate::error::{Error, Result};

/// A contiguous entity span; token indices are 1-based CoNLL-U IDs,
/// inclusive on both ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedEntitySpan {
    pub sent_id: String,
    pub start: usize,
    pub end: usize,
    pub label: String,
}

/// Extraction result: spans plus the token count of every source sentence,
/// for the placement-side consistency check.
#[derive(Debug, Clone, Default)]
pub struct EntityExtraction {
    pub spans: Vec<NamedEntitySpan>,
    pub token_counts: HashMap<String, usize>,
}

/// Pull entity spans out of MISC items under `key`.
pub fn extract_entities(
    sentences: &[ConlluSentence],
    key: &str,
    bio: bool,
    file: &str,
) -> Result<EntityExtraction> {
    let mut extraction = EntityExtraction::default();

    for sentence in sentences {
        let line = sentence.start_line;
        let sent_id = sentence
            .sent_id()
            .ok_or_else(|| Error::EntityExtract {
                file: file.to_string(),
                line,
                item: String::new(),
                reason: "sentence lacks a sent_id comment".to_string(),
            })?
            .to_string();
        extraction
            .token_counts
            .insert(sent_id.clone(), sentence.token_count());

        let mut current: Option<(usize, String)> = None; // (start, label)
        for (idx, token) in sentence.tokens().enumerate() {
            let position = idx + 1;
            let value = token.misc().value(key).map(str::to_owned);
            let bad_item = |reason: String| Error::EntityExtract {
                file: file.to_string(),
                line,
                item: format!("{key}={}", value.clone().unwrap_or_default()),
                reason,
            };

            let label = match value.as_deref() {
                None | Some("O") => None,
                Some("") => return Err(bad_item("empty entity label".to_string())),
                Some(v) if bio => match v.split_once('-') {
                    Some(("B", label)) if !label.is_empty() => Some((label.to_string(), true)),
                    Some(("I", label)) if !label.is_empty() => Some((label.to_string(), false)),
                    _ => {
                        return Err(bad_item(format!(
                            "expected O, B-<label> or I-<label>, found {v:?}"
                        )))
                    }
                },
                Some(v) => Some((v.to_string(), false)),
            };

            match label {
                None => {
                    if let Some((start, label)) = current.take() {
                        extraction.spans.push(NamedEntitySpan {
                            sent_id: sent_id.clone(),
                            start,
                            end: position - 1,
                            label,
                        });
                    }
                }
                Some((label, begins)) => {
                    let continues = match &current {
                        Some((_, open)) => !begins && *open == label,
                        None => false,
                    };
                    if !continues {
                        if let Some((start, open)) = current.take() {
                            extraction.spans.push(NamedEntitySpan {
                                sent_id: sent_id.clone(),
                                start,
                                end: position - 1,
                                label: open,
                            });
                        }
                        current = Some((position, label));
                    }
                }
            }
        }
        if let Some((start, label)) = current.take() {
            extraction.spans.push(NamedEntitySpan {
                sent_id: sent_id.clone(),
                start,
                end: sentence.token_count(),
                label,
            });
        }
    }

    Ok(extraction)
}

/// Outcome of a placement pass.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlacementSummary {
    pub spans_placed: usize,
    pub sentences_annotated: usize,
    /// Source sentences with no counterpart in the target treebank.
    pub missing_sentences: Vec<String>,
}

/// Write entity spans into the target sentences by sent_id and token index.
///
/// Sentences present in the extraction get a `key=` item on every token
/// (explicit `O` outside spans when `emit_outside` is set); sentences absent
/// from the extraction are left untouched. A token-count mismatch between
/// the two versions is an error, never silently guessed.
pub fn place_entities(
    target: &mut [ConlluSentence],
    extraction: &EntityExtraction,
    key: &str,
    bio: bool,
    emit_outside: bool,
) -> Result<PlacementSummary> {
    let mut summary = PlacementSummary::default();
    let mut spans_by_sentence: HashMap<&str, Vec<&NamedEntitySpan>> = HashMap::new();
    for span in &extraction.spans {
        spans_by_sentence
            .entry(span.sent_id.as_str())
            .or_default()
            .push(span);
    }

    let mut seen: HashMap<String, bool> = extraction
        .token_counts
        .keys()
        .map(|k| (k.clone(), false))
        .collect();

    for sentence in target.iter_mut() {
        let Some(sent_id) = sentence.sent_id().map(str::to_owned) else {
            continue;
        };
        let Some(&source_count) = extraction.token_counts.get(&sent_id) else {
            continue;
        };
        seen.insert(sent_id.clone(), true);
        let target_count = sentence.token_count();
        if target_count != source_count {
            return Err(Error::EntityTokenConflict {
                sent_id,
                expected: target_count,
                found: source_count,
            });
        }

        let mut labels: Vec<Option<(&str, bool)>> = vec![None; target_count]; // (label, begins)
        for span in spans_by_sentence.get(sent_id.as_str()).into_iter().flatten() {
            for position in span.start..=span.end {
                labels[position - 1] = Some((span.label.as_str(), position == span.start));
            }
            summary.spans_placed += 1;
        }

        for (token, label) in sentence.tokens_mut().zip(&labels) {
            let item = match label {
                Some((label, begins)) => {
                    if bio {
                        let prefix = if *begins { "B" } else { "I" };
                        format!("{key}={prefix}-{label}")
                    } else {
                        format!("{key}={label}")
                    }
                }
                None => {
                    if !emit_outside {
                        continue;
                    }
                    format!("{key}=O")
                }
            };
            let mut misc = token.misc();
            misc.remove_key(key);
            misc.push_unique(&item);
            token.set_misc(&misc);
        }
        summary.sentences_annotated += 1;
    }

    summary.missing_sentences = seen
        .into_iter()
        .filter(|(_, found)| !found)
        .map(|(id, _)| id)
        .collect();
    summary.missing_sentences.sort();

    Ok(summary)
}
