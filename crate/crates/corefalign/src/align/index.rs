//! Treebank sentence index: normalized text → sent_id, sent_id → split and
//! ordinal position.

use std::collections::{BTreeMap, HashMap};

use crate::conllu::ConlluSentence;
use crate::error::{Error, Result};

/// The train/test/dev partition of a treebank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Test,
    Dev,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Test, Split::Dev];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
            Split::Dev => "dev",
        }
    }
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct SentMeta {
    pub split: Split,
    /// Ordinal position within the split file, 0-based.
    pub position: usize,
    pub sentence: ConlluSentence,
}

/// Lookup structure over one treebank's splits.
#[derive(Debug, Clone, Default)]
pub struct TreebankIndex {
    pub name: String,
    exact: HashMap<String, Vec<String>>,
    normalized: HashMap<String, Vec<String>>,
    meta: HashMap<String, SentMeta>,
    split_ids: BTreeMap<Split, Vec<String>>,
}

impl TreebankIndex {
    pub fn new(name: impl Into<String>) -> Self {
        TreebankIndex {
            name: name.into(),
            ..TreebankIndex::default()
        }
    }

    /// Index one split file. Every sentence needs `sent_id` and `text`
    /// comments; duplicate ids across splits are rejected.
    pub fn add_split(
        &mut self,
        split: Split,
        sentences: Vec<ConlluSentence>,
        file: &str,
    ) -> Result<()> {
        for sentence in sentences {
            let missing = |what: &str| Error::IndexComment {
                file: file.to_string(),
                line: sentence.start_line,
                missing: what.to_string(),
            };
            let sent_id = sentence.sent_id().ok_or_else(|| missing("sent_id"))?.to_string();
            if sentence.text().is_none() {
                return Err(missing("text"));
            }
            if self.meta.contains_key(&sent_id) {
                return Err(Error::ConlluParse {
                    file: file.to_string(),
                    line: sentence.start_line,
                    reason: format!("sent_id {sent_id} already indexed"),
                });
            }
            let joined = sentence.forms_joined();
            self.exact.entry(joined.clone()).or_default().push(sent_id.clone());
            let norm = normalize_tokens(&tokens_of(&joined)).join(" ");
            self.normalized.entry(norm).or_default().push(sent_id.clone());
            let ids = self.split_ids.entry(split).or_default();
            let position = ids.len();
            ids.push(sent_id.clone());
            self.meta.insert(
                sent_id,
                SentMeta {
                    split,
                    position,
                    sentence,
                },
            );
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.meta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.meta.is_empty()
    }

    pub fn exact_ids(&self, joined: &str) -> &[String] {
        self.exact.get(joined).map_or(&[], Vec::as_slice)
    }

    pub fn normalized_ids(&self, normalized_joined: &str) -> &[String] {
        self.normalized
            .get(normalized_joined)
            .map_or(&[], Vec::as_slice)
    }

    pub fn meta(&self, sent_id: &str) -> Option<&SentMeta> {
        self.meta.get(sent_id)
    }

    pub fn split_of(&self, sent_id: &str) -> Option<Split> {
        self.meta.get(sent_id).map(|m| m.split)
    }

    pub fn position_of(&self, sent_id: &str) -> Option<usize> {
        self.meta.get(sent_id).map(|m| m.position)
    }

    /// Ids of one split between two positions, inclusive bounds, clamped.
    pub fn ids_in_window(&self, split: Split, lo: isize, hi: isize) -> &[String] {
        let Some(ids) = self.split_ids.get(&split) else {
            return &[];
        };
        if ids.is_empty() || hi < 0 {
            return &[];
        }
        let lo = lo.max(0) as usize;
        let hi = (hi as usize).min(ids.len() - 1);
        if lo > hi {
            return &[];
        }
        &ids[lo..=hi]
    }

    pub fn splits(&self) -> impl Iterator<Item = (Split, usize)> + '_ {
        self.split_ids.iter().map(|(s, ids)| (*s, ids.len()))
    }
}

pub(crate) fn tokens_of(line: &str) -> Vec<String> {
    line.split_whitespace().map(str::to_owned).collect()
}

fn is_dash(token: &str) -> bool {
    matches!(token, "-" | "–" | "—")
}

fn is_strippable_punct(token: &str) -> bool {
    matches!(token, "." | "!" | "?" | ":" | ";" | "," | "|" | "…")
}

/// Normalization used for the second matching tier: drop inserted `|`
/// tokens (they precede some commas and sentence ends in the source but are
/// absent from the treebank) and a leading dash token.
pub fn normalize_tokens(tokens: &[String]) -> Vec<String> {
    let mut out: Vec<String> = tokens.iter().filter(|t| *t != "|").cloned().collect();
    if out.first().map(|t| is_dash(t)).unwrap_or(false) && out.len() > 1 {
        out.remove(0);
    }
    out
}

/// Normalization used for fuzzy comparison: [`normalize_tokens`] plus one
/// trailing punctuation token.
pub fn normalize_fuzzy(tokens: &[String]) -> Vec<String> {
    let mut out = normalize_tokens(tokens);
    if out.len() > 1 && out.last().map(|t| is_strippable_punct(t)).unwrap_or(false) {
        out.pop();
    }
    out
}
