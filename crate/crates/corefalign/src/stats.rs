//! Corpus statistics and loss tables.
//!
//! Counting semantics: markables are the unique entities of a document
//! (distinct clusters, singletons included), mentions are all occurrences,
//! and bridging / split-antecedent figures count grouped link clusters, not
//! the relations inside a group. Counts are additive over documents, so a
//! parallel fold is sound.

use std::ops::{Add, AddAssign};

use crate::conllu::ConlluSentence;
use crate::entity::decode_entities;
use crate::error::Result;
use crate::ne;
use crate::record::CorefDocument;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Sentences,
    Tokens,
    Entities,
    Markables,
    Mentions,
    SplitAnteClusters,
    BridgingClusters,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Sentences,
        Category::Tokens,
        Category::Entities,
        Category::Markables,
        Category::Mentions,
        Category::SplitAnteClusters,
        Category::BridgingClusters,
    ];

    /// The six categories of the information-loss table.
    pub const LOSS: [Category; 6] = [
        Category::Sentences,
        Category::Tokens,
        Category::Markables,
        Category::Mentions,
        Category::SplitAnteClusters,
        Category::BridgingClusters,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Sentences => "Sentences",
            Category::Tokens => "Tokens",
            Category::Entities => "Entities",
            Category::Markables => "Markables",
            Category::Mentions => "Mentions",
            Category::SplitAnteClusters => "SplitAnte Clusters",
            Category::BridgingClusters => "Bridging Clusters",
        }
    }
}

/// Category counts for a document or a whole corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub sentences: u64,
    pub tokens: u64,
    pub entities: u64,
    pub markables: u64,
    pub mentions: u64,
    pub splitante_clusters: u64,
    pub bridging_clusters: u64,
}

impl Counts {
    pub fn get(&self, category: Category) -> u64 {
        match category {
            Category::Sentences => self.sentences,
            Category::Tokens => self.tokens,
            Category::Entities => self.entities,
            Category::Markables => self.markables,
            Category::Mentions => self.mentions,
            Category::SplitAnteClusters => self.splitante_clusters,
            Category::BridgingClusters => self.bridging_clusters,
        }
    }
}

impl Add for Counts {
    type Output = Counts;

    fn add(self, rhs: Counts) -> Counts {
        Counts {
            sentences: self.sentences + rhs.sentences,
            tokens: self.tokens + rhs.tokens,
            entities: self.entities + rhs.entities,
            markables: self.markables + rhs.markables,
            mentions: self.mentions + rhs.mentions,
            splitante_clusters: self.splitante_clusters + rhs.splitante_clusters,
            bridging_clusters: self.bridging_clusters + rhs.bridging_clusters,
        }
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, rhs: Counts) {
        *self = *self + rhs;
    }
}

/// Count one document record. Empty sentences (blank source lines) do not
/// count; named entities are not carried by records, so `entities` is 0.
pub fn count_document(doc: &CorefDocument) -> Counts {
    Counts {
        sentences: doc.sentences.iter().filter(|s| !s.is_empty()).count() as u64,
        tokens: doc.sentences.iter().map(|s| s.len() as u64).sum(),
        entities: 0,
        markables: u64::from(doc.cluster_count()),
        mentions: doc.mentions.len() as u64,
        splitante_clusters: doc.split_antecedents.len() as u64,
        bridging_clusters: doc.bridges.len() as u64,
    }
}

pub fn count_documents<'a>(docs: impl IntoIterator<Item = &'a CorefDocument>) -> Counts {
    docs.into_iter()
        .map(count_document)
        .fold(Counts::default(), Counts::add)
}

/// Count one document's CoNLL-U sentences: the decoded coreference structure
/// plus named-entity spans under `ne_key`.
pub fn count_conllu_document(
    sentences: &[ConlluSentence],
    doc_id: &str,
    ne_key: &str,
    ne_bio: bool,
) -> Result<Counts> {
    let doc = decode_entities(sentences, doc_id)?;
    let extraction = ne::extract_entities(sentences, ne_key, ne_bio, doc_id)?;
    let mut counts = count_document(&doc);
    counts.entities = extraction.spans.len() as u64;
    Ok(counts)
}

/// One row of the information-loss table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LossRow {
    pub category: Category,
    pub before: u64,
    pub after: u64,
}

impl LossRow {
    pub fn lost(&self) -> i64 {
        self.before as i64 - self.after as i64
    }

    /// Percentage of `before`, one decimal; em dash when `before` is zero.
    pub fn percent(&self) -> String {
        if self.before == 0 {
            "—".to_string()
        } else {
            format!("{:.1}%", self.lost() as f64 * 100.0 / self.before as f64)
        }
    }

    /// `"5 (5.0%)"` / `"0 (0.0%)"` / `"0 (—)"`.
    pub fn cell(&self) -> String {
        format!("{} ({})", self.lost(), self.percent())
    }

    /// Like [`LossRow::cell`] with thousands separators, for the
    /// human-readable table.
    pub fn cell_grouped(&self) -> String {
        format!("{} ({})", group_thousands(self.lost()), self.percent())
    }
}

/// Per-category losses between two counting passes, loss-table categories
/// only.
pub fn diff(before: &Counts, after: &Counts) -> Vec<LossRow> {
    Category::LOSS
        .iter()
        .map(|&category| LossRow {
            category,
            before: before.get(category),
            after: after.get(category),
        })
        .collect()
}

pub fn group_thousands(value: i64) -> String {
    let negative = value < 0;
    let digits = value.unsigned_abs().to_string();
    let mut grouped = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    if negative {
        format!("-{grouped}")
    } else {
        grouped
    }
}

/// Tab-separated counts table, one column per label.
pub fn counts_tsv(columns: &[(String, Counts)]) -> String {
    let mut out = String::from("category");
    for (label, _) in columns {
        out.push('\t');
        out.push_str(label);
    }
    out.push('\n');
    for category in Category::ALL {
        out.push_str(category.name());
        for (_, counts) in columns {
            out.push('\t');
            out.push_str(&counts.get(category).to_string());
        }
        out.push('\n');
    }
    out
}
