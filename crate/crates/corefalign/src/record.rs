//! The intermediate document record: one line-delimited record per document,
//! bridging conversion and CoNLL-U emission.
//!
//! The on-disk schema follows the common coreference line-record convention
//! (document key, sentences as token arrays, clusters as span lists), with
//! `bridges` and `split_antecedents` arrays added because that convention
//! has no place for them. Spans are `[sentence, start, end]` with 0-based
//! inclusive token indices; a mention is a list of such fragments so
//! discontinuous mentions survive.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::brat::RawDocument;
use crate::clusters::{ClusterSet, SplitAnteGroup};
use crate::error::{Error, Result};
use crate::spans::{TokenTable, WordSpan};

pub const RECORD_VERSION: u32 = 1;

/// One mention: a cluster number and the word-span fragments, in text order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mention {
    pub cluster: u32,
    pub fragments: Vec<WordSpan>,
}

impl Mention {
    pub fn first(&self) -> WordSpan {
        self.fragments[0]
    }

    pub fn last(&self) -> WordSpan {
        *self.fragments.last().unwrap()
    }

    /// Sort key: position of the first fragment, wider mentions first,
    /// cluster number as the final tiebreak.
    fn order_key(&self) -> (usize, usize, std::cmp::Reverse<(usize, usize)>, u32) {
        let first = self.first();
        let last = self.last();
        (
            first.sentence,
            first.start,
            std::cmp::Reverse((last.sentence, last.end)),
            self.cluster,
        )
    }
}

/// Word-indexed sentences, mentions, and link structure for one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorefDocument {
    pub doc_id: String,
    pub sentences: Vec<Vec<String>>,
    /// Sorted by (sentence, start token, descending end), no duplicates.
    pub mentions: Vec<Mention>,
    pub bridges: Vec<(u32, u32)>,
    pub split_antecedents: Vec<SplitAnteGroup>,
}

impl CorefDocument {
    pub fn empty(doc_id: impl Into<String>) -> Self {
        CorefDocument {
            doc_id: doc_id.into(),
            sentences: Vec::new(),
            mentions: Vec::new(),
            bridges: Vec::new(),
            split_antecedents: Vec::new(),
        }
    }

    /// Number of distinct clusters.
    pub fn cluster_count(&self) -> u32 {
        self.mentions.iter().map(|m| m.cluster).max().unwrap_or(0)
    }

    pub fn sort_mentions(&mut self) {
        self.mentions.sort_by(|a, b| {
            a.order_key()
                .cmp(&b.order_key())
                .then_with(|| a.fragments.cmp(&b.fragments))
        });
        self.mentions.dedup();
    }

    /// Check every structural invariant; used after assembly and after
    /// deserialization. A failure here means a pipeline bug, not bad data.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Assembly(msg));
        for mention in &self.mentions {
            if mention.fragments.is_empty() {
                return fail(format!(
                    "cluster {} mention has no fragments",
                    mention.cluster
                ));
            }
            for span in &mention.fragments {
                let Some(sentence) = self.sentences.get(span.sentence) else {
                    return fail(format!(
                        "mention span references sentence {} of {}",
                        span.sentence,
                        self.sentences.len()
                    ));
                };
                if span.start > span.end || span.end >= sentence.len() {
                    return fail(format!(
                        "token range {}..={} invalid in sentence {} ({} tokens)",
                        span.start,
                        span.end,
                        span.sentence,
                        sentence.len()
                    ));
                }
            }
            for pair in mention.fragments.windows(2) {
                if pair[1] <= pair[0] {
                    return fail("mention fragments out of order".into());
                }
            }
        }
        let k = self.cluster_count();
        let mut seen = vec![false; k as usize + 1];
        for mention in &self.mentions {
            if mention.cluster == 0 {
                return fail("cluster numbers are 1-based".into());
            }
            seen[mention.cluster as usize] = true;
        }
        if let Some(gap) = (1..=k).find(|&c| !seen[c as usize]) {
            return fail(format!("cluster numbering has a gap at {gap}"));
        }
        let exists = |c: u32| c >= 1 && c <= k;
        for (a, b) in &self.bridges {
            if !exists(*a) || !exists(*b) {
                return fail(format!("bridge ({a},{b}) references a missing cluster"));
            }
        }
        for group in &self.split_antecedents {
            if !exists(group.anaphor) || group.antecedents.iter().any(|a| !exists(*a)) {
                return fail(format!(
                    "split-antecedent group for cluster {} references a missing cluster",
                    group.anaphor
                ));
            }
        }
        let mut prev: Option<&Mention> = None;
        for mention in &self.mentions {
            if let Some(p) = prev {
                if mention.order_key() < p.order_key() {
                    return fail("mention list is not sorted".into());
                }
            }
            prev = Some(mention);
        }
        Ok(())
    }
}

/// Build the document record from the parsed document, its clusters, and the
/// word spans that survived indexing (markable id -> fragments).
///
/// Clusters that lost every mention (dropped cross-line markables) are
/// renumbered away; bridges and split-antecedent groups pointing at dead
/// clusters are dropped with them.
pub fn assemble(
    doc: &RawDocument,
    table: &TokenTable,
    clusters: &ClusterSet,
    spans: &BTreeMap<String, Vec<WordSpan>>,
) -> Result<CorefDocument> {
    let sentences: Vec<Vec<String>> = (0..table.lines.len())
        .map(|i| table.forms(doc, i).into_iter().map(str::to_owned).collect())
        .collect();

    let mut mentions = Vec::new();
    let mut surviving: Vec<u32> = Vec::new();
    for cluster in &clusters.clusters {
        let mut any = false;
        for markable_id in &cluster.markables {
            if let Some(fragments) = spans.get(markable_id) {
                mentions.push(Mention {
                    cluster: cluster.number,
                    fragments: fragments.clone(),
                });
                any = true;
            }
        }
        if any {
            surviving.push(cluster.number);
        }
    }

    // contiguous renumbering in original order
    let renumber: BTreeMap<u32, u32> = surviving
        .iter()
        .enumerate()
        .map(|(i, &old)| (old, (i + 1) as u32))
        .collect();
    for mention in &mut mentions {
        mention.cluster = renumber[&mention.cluster];
    }

    let bridges: Vec<(u32, u32)> = clusters
        .bridges
        .iter()
        .filter_map(|(a, b)| Some((*renumber.get(a)?, *renumber.get(b)?)))
        .collect();

    let split_antecedents: Vec<SplitAnteGroup> = clusters
        .split_antecedents
        .iter()
        .filter_map(|group| {
            let anaphor = *renumber.get(&group.anaphor)?;
            let antecedents: Vec<u32> = group
                .antecedents
                .iter()
                .filter_map(|a| renumber.get(a).copied())
                .collect();
            if antecedents.is_empty() {
                return None;
            }
            Some(SplitAnteGroup {
                antecedents,
                anaphor,
            })
        })
        .collect();

    let mut record = CorefDocument {
        doc_id: doc.doc_id.clone(),
        sentences,
        mentions,
        bridges,
        split_antecedents,
    };
    record.sort_mentions();
    record.validate()?;
    Ok(record)
}

/// Restore contiguous 1-based cluster numbering after mentions were removed,
/// preserving the relative order of the surviving numbers. Bridges and
/// split-antecedent groups pointing at dead clusters are dropped.
pub fn renumber_clusters(doc: &mut CorefDocument) {
    let mut surviving: Vec<u32> = doc.mentions.iter().map(|m| m.cluster).collect();
    surviving.sort_unstable();
    surviving.dedup();
    let renumber: BTreeMap<u32, u32> = surviving
        .iter()
        .enumerate()
        .map(|(i, &old)| (old, (i + 1) as u32))
        .collect();

    for mention in &mut doc.mentions {
        mention.cluster = renumber[&mention.cluster];
    }
    doc.bridges = doc
        .bridges
        .iter()
        .filter_map(|(a, b)| Some((*renumber.get(a)?, *renumber.get(b)?)))
        .collect();
    doc.split_antecedents = doc
        .split_antecedents
        .iter()
        .filter_map(|group| {
            let anaphor = *renumber.get(&group.anaphor)?;
            let antecedents: Vec<u32> = group
                .antecedents
                .iter()
                .filter_map(|a| renumber.get(a).copied())
                .collect();
            if antecedents.is_empty() {
                return None;
            }
            Some(SplitAnteGroup {
                antecedents,
                anaphor,
            })
        })
        .collect();
}

#[derive(Serialize, Deserialize)]
struct RecordRepr {
    doc_key: String,
    version: u32,
    sentences: Vec<Vec<String>>,
    /// clusters[k-1] lists the mentions of cluster k; each mention is a list
    /// of [sentence, start, end] fragments.
    clusters: Vec<Vec<Vec<[usize; 3]>>>,
    #[serde(default)]
    bridges: Vec<(u32, u32)>,
    #[serde(default)]
    split_antecedents: Vec<(Vec<u32>, u32)>,
}

impl From<&CorefDocument> for RecordRepr {
    fn from(doc: &CorefDocument) -> Self {
        let k = doc.cluster_count() as usize;
        let mut clusters = vec![Vec::new(); k];
        for mention in &doc.mentions {
            clusters[mention.cluster as usize - 1].push(
                mention
                    .fragments
                    .iter()
                    .map(|s| [s.sentence, s.start, s.end])
                    .collect(),
            );
        }
        RecordRepr {
            doc_key: doc.doc_id.clone(),
            version: RECORD_VERSION,
            sentences: doc.sentences.clone(),
            clusters,
            bridges: doc.bridges.clone(),
            split_antecedents: doc
                .split_antecedents
                .iter()
                .map(|g| (g.antecedents.clone(), g.anaphor))
                .collect(),
        }
    }
}

impl RecordRepr {
    fn into_document(self) -> CorefDocument {
        let mut mentions = Vec::new();
        for (idx, cluster_mentions) in self.clusters.into_iter().enumerate() {
            for fragments in cluster_mentions {
                mentions.push(Mention {
                    cluster: (idx + 1) as u32,
                    fragments: fragments
                        .into_iter()
                        .map(|[sentence, start, end]| WordSpan {
                            sentence,
                            start,
                            end,
                        })
                        .collect(),
                });
            }
        }
        let mut doc = CorefDocument {
            doc_id: self.doc_key,
            sentences: self.sentences,
            mentions,
            bridges: self.bridges,
            split_antecedents: self
                .split_antecedents
                .into_iter()
                .map(|(antecedents, anaphor)| SplitAnteGroup {
                    antecedents,
                    anaphor,
                })
                .collect(),
        };
        doc.sort_mentions();
        doc
    }
}

/// Serialize one document as a single JSON line (no trailing newline).
pub fn write_record(doc: &CorefDocument) -> String {
    serde_json::to_string(&RecordRepr::from(doc)).expect("record serialization cannot fail")
}

/// Parse one record line. `line_no` is 1-based and only used for errors.
pub fn read_record(line: &str, line_no: usize) -> Result<CorefDocument> {
    let repr: RecordRepr = serde_json::from_str(line).map_err(|e| Error::RecordParse {
        line: line_no,
        reason: e.to_string(),
    })?;
    let doc = repr.into_document();
    doc.validate().map_err(|e| Error::RecordParse {
        line: line_no,
        reason: e.to_string(),
    })?;
    Ok(doc)
}

/// Serialize documents, one record per line.
pub fn write_records(docs: &[CorefDocument]) -> String {
    let mut out = String::new();
    for doc in docs {
        out.push_str(&write_record(doc));
        out.push('\n');
    }
    out
}

/// Parse a line-delimited record file. Blank lines are not allowed between
/// records; errors carry the 1-based line number.
pub fn read_records(text: &str) -> Result<Vec<CorefDocument>> {
    text.lines()
        .enumerate()
        .map(|(idx, line)| read_record(line, idx + 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brat::parse_ann;
    use crate::clusters::build_clusters;
    use crate::spans::{char_to_word, tokenize_lines};

    fn assemble_fixture(ann: &str, txt: &str) -> CorefDocument {
        let doc = parse_ann(ann, txt, "fixture").unwrap();
        let table = tokenize_lines(&doc);
        let clusters = build_clusters(&doc).unwrap();
        let mut spans = BTreeMap::new();
        for m in &doc.markables {
            let (s, _) = char_to_word(m, &table).unwrap();
            spans.insert(m.id.clone(), s);
        }
        assemble(&doc, &table, &clusters, &spans).unwrap()
    }

    #[test]
    fn empty_document_assembles_empty_record() {
        let record = assemble_fixture("", "en setning .\n");
        assert!(record.mentions.is_empty());
        assert_eq!(record.sentences, vec![vec!["en", "setning", "."]]);
    }

    #[test]
    fn round_trip_is_identity() {
        let txt = "Kidnapperne kom seg unna .\nkystvakten så båten .\n";
        let ann = concat!(
            "T1\tMarkable 0 11\tKidnapperne\n",
            "T2\tMarkable 16 19\tseg\n",
            "T3\tMarkable 27 37\tkystvakten\n",
            "T4\tMarkable 41 46\tbåten\n",
            "R1\tAnaphoric Arg1:T2 Arg2:T1\n",
            "R2\tBridging Arg1:T4 Arg2:T3\n"
        );
        let record = assemble_fixture(ann, txt);
        let line = write_record(&record);
        let back = read_record(&line, 1).unwrap();
        assert_eq!(record, back);
    }

    #[test]
    fn split_antecedent_groups_survive_round_trip() {
        let txt = "Per og Kari kom .\nde dro .\n";
        let ann = concat!(
            "T1\tMarkable 0 3\tPer\n",
            "T2\tMarkable 7 11\tKari\n",
            "T3\tMarkable 18 20\tde\n",
            "R1\tSplit_antecedent Arg1:T3 Arg2:T1\n",
            "R2\tSplit_antecedent Arg1:T3 Arg2:T2\n"
        );
        let record = assemble_fixture(ann, txt);
        assert_eq!(record.split_antecedents.len(), 1);
        let back = read_record(&write_record(&record), 1).unwrap();
        assert_eq!(back.split_antecedents, record.split_antecedents);
    }

    #[test]
    fn truncated_line_names_its_line_number() {
        let err = read_records("{\"doc_key\": \"x\", \"version\"").unwrap_err();
        match err {
            Error::RecordParse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn mention_ordering_is_restored_after_deserialization() {
        // hand-written record with mentions listed out of order
        let line = r#"{"doc_key":"d","version":1,"sentences":[["a","b","c"]],"clusters":[[[[0,2,2]],[[0,0,0]]],[[[0,0,1]]]],"bridges":[],"split_antecedents":[]}"#;
        let doc = read_record(line, 1).unwrap();
        let positions: Vec<(usize, usize)> = doc
            .mentions
            .iter()
            .map(|m| (m.first().start, m.first().end))
            .collect();
        assert_eq!(positions, vec![(0, 1), (0, 0), (2, 2)]);
    }

    #[test]
    fn dropped_clusters_are_renumbered_contiguously() {
        let txt = "a b\nc d\n";
        let ann = concat!(
            "T1\tMarkable 0 1\ta\n",
            "T2\tMarkable 4 5\tc\n",
            "T3\tMarkable 6 7\td\n"
        );
        let doc = parse_ann(ann, txt, "d").unwrap();
        let table = tokenize_lines(&doc);
        let clusters = build_clusters(&doc).unwrap();
        // pretend T1 was dropped (e.g. cross-line): only T2, T3 survive
        let mut spans = BTreeMap::new();
        for m in &doc.markables[1..] {
            let (s, _) = char_to_word(m, &table).unwrap();
            spans.insert(m.id.clone(), s);
        }
        let record = assemble(&doc, &table, &clusters, &spans).unwrap();
        assert_eq!(record.cluster_count(), 2);
        assert_eq!(record.mentions[0].cluster, 1);
        assert_eq!(record.mentions[1].cluster, 2);
    }
}
