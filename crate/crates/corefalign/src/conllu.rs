//! CoNLL-U reading and writing.
//!
//! Reading an unmodified file and writing it back is byte-identical:
//! comments are kept verbatim, and multiword-token ranges (`1-2`) and empty
//! nodes (`1.1`) are carried as opaque rows. Token IDs of regular rows must
//! be `1..n` consecutive.

use crate::error::{Error, Result};

pub const FIELD_COUNT: usize = 10;
pub const MISC: usize = 9;
pub const FORM: usize = 1;

/// One token row: ten tab-separated fields
/// (ID, FORM, LEMMA, UPOS, XPOS, FEATS, HEAD, DEPREL, DEPS, MISC).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenRow {
    pub fields: [String; FIELD_COUNT],
}

impl TokenRow {
    /// A row with every field `_` except ID and FORM.
    pub fn bare(id: usize, form: &str) -> Self {
        let mut fields: [String; FIELD_COUNT] = Default::default();
        for f in fields.iter_mut() {
            *f = "_".to_string();
        }
        fields[0] = id.to_string();
        fields[FORM] = form.to_string();
        TokenRow { fields }
    }

    pub fn form(&self) -> &str {
        &self.fields[FORM]
    }

    pub fn misc(&self) -> MiscField {
        MiscField::parse(&self.fields[MISC])
    }

    pub fn set_misc(&mut self, misc: &MiscField) {
        self.fields[MISC] = misc.to_string();
    }
}

/// A row of the sentence block: a regular token or an opaque
/// multiword/empty-node row preserved verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Row {
    Token(TokenRow),
    Opaque([String; FIELD_COUNT]),
}

/// One sentence: verbatim comment lines followed by token rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConlluSentence {
    pub comments: Vec<String>,
    pub rows: Vec<Row>,
    /// 1-based line of the first comment/row in the source file; 0 when the
    /// sentence was built in memory.
    pub start_line: usize,
}

impl ConlluSentence {
    /// Build a plain sentence from token forms, with `sent_id` and `text`
    /// comments. `text` joins the forms with single spaces.
    pub fn from_forms(sent_id: &str, forms: &[&str]) -> Self {
        let mut rows = Vec::with_capacity(forms.len());
        for (i, form) in forms.iter().enumerate() {
            rows.push(Row::Token(TokenRow::bare(i + 1, form)));
        }
        ConlluSentence {
            comments: vec![
                format!("# sent_id = {sent_id}"),
                format!("# text = {}", forms.join(" ")),
            ],
            rows,
            start_line: 0,
        }
    }

    pub fn comment_value(&self, key: &str) -> Option<&str> {
        let prefix = format!("# {key} = ");
        self.comments
            .iter()
            .find_map(|c| c.strip_prefix(&prefix))
            .map(str::trim)
    }

    pub fn sent_id(&self) -> Option<&str> {
        self.comment_value("sent_id")
    }

    pub fn text(&self) -> Option<&str> {
        self.comment_value("text")
    }

    pub fn tokens(&self) -> impl Iterator<Item = &TokenRow> {
        self.rows.iter().filter_map(|r| match r {
            Row::Token(t) => Some(t),
            Row::Opaque(_) => None,
        })
    }

    pub fn tokens_mut(&mut self) -> impl Iterator<Item = &mut TokenRow> {
        self.rows.iter_mut().filter_map(|r| match r {
            Row::Token(t) => Some(t),
            Row::Opaque(_) => None,
        })
    }

    pub fn token_count(&self) -> usize {
        self.tokens().count()
    }

    /// Token forms joined with single spaces: the key used for matching
    /// against pre-tokenized source lines.
    pub fn forms_joined(&self) -> String {
        self.tokens().map(|t| t.form()).collect::<Vec<_>>().join(" ")
    }

    /// Rebuild the raw text from FORM fields and `SpaceAfter=No`.
    pub fn reconstructed_text(&self) -> String {
        let mut out = String::new();
        let tokens: Vec<&TokenRow> = self.tokens().collect();
        for (i, token) in tokens.iter().enumerate() {
            out.push_str(token.form());
            let space_after = token.misc().value("SpaceAfter").map(str::to_owned);
            if i + 1 < tokens.len() && space_after.as_deref() != Some("No") {
                out.push(' ');
            }
        }
        out
    }
}

/// The MISC column as an ordered item list. `_` means empty; unmodified
/// fields reproduce their source bytes exactly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MiscField {
    items: Vec<String>,
}

impl MiscField {
    pub fn parse(misc: &str) -> Self {
        if misc == "_" || misc.is_empty() {
            return MiscField::default();
        }
        MiscField {
            items: misc.split('|').map(str::to_owned).collect(),
        }
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Value of the first `key=value` item with this key.
    pub fn value(&self, key: &str) -> Option<&str> {
        self.items
            .iter()
            .find_map(|item| item.split_once('=').filter(|(k, _)| *k == key))
            .map(|(_, v)| v)
    }

    /// Append an item unless an identical one is already present.
    pub fn push_unique(&mut self, item: &str) {
        if !self.items.iter().any(|existing| existing == item) {
            self.items.push(item.to_string());
        }
    }

    /// Remove every `key=...` item with the given key.
    pub fn remove_key(&mut self, key: &str) {
        let prefix = format!("{key}=");
        self.items.retain(|item| !item.starts_with(&prefix));
    }
}

impl std::fmt::Display for MiscField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.items.is_empty() {
            f.write_str("_")
        } else {
            f.write_str(&self.items.join("|"))
        }
    }
}

/// Parse a CoNLL-U file. `file` names the source in errors.
pub fn parse_conllu(text: &str, file: &str) -> Result<Vec<ConlluSentence>> {
    let mut sentences = Vec::new();
    let mut comments: Vec<String> = Vec::new();
    let mut rows: Vec<Row> = Vec::new();
    let mut next_id = 1usize;
    let mut start_line = 0usize;

    let err = |line: usize, reason: String| Error::ConlluParse {
        file: file.to_string(),
        line,
        reason,
    };

    let mut flush = |comments: &mut Vec<String>,
                     rows: &mut Vec<Row>,
                     next_id: &mut usize,
                     start_line: &mut usize| {
        if !comments.is_empty() || !rows.is_empty() {
            sentences.push(ConlluSentence {
                comments: std::mem::take(comments),
                rows: std::mem::take(rows),
                start_line: *start_line,
            });
        }
        *next_id = 1;
        *start_line = 0;
    };

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.is_empty() {
            flush(&mut comments, &mut rows, &mut next_id, &mut start_line);
            continue;
        }
        if start_line == 0 {
            start_line = line_no;
        }
        if line.starts_with('#') {
            if !rows.is_empty() {
                return Err(err(line_no, "comment after token rows".into()));
            }
            comments.push(line.to_string());
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != FIELD_COUNT {
            return Err(err(
                line_no,
                format!("expected {FIELD_COUNT} tab-separated fields, found {}", fields.len()),
            ));
        }
        let mut owned: [String; FIELD_COUNT] = Default::default();
        for (slot, value) in owned.iter_mut().zip(&fields) {
            *slot = value.to_string();
        }
        let id = fields[0];
        if id.contains('-') || id.contains('.') {
            rows.push(Row::Opaque(owned));
        } else {
            let parsed: usize = id
                .parse()
                .map_err(|_| err(line_no, format!("token id {id:?} is not numeric")))?;
            if parsed != next_id {
                return Err(err(
                    line_no,
                    format!("token id {parsed} out of order; expected {next_id}"),
                ));
            }
            next_id += 1;
            rows.push(Row::Token(TokenRow { fields: owned }));
        }
    }
    flush(&mut comments, &mut rows, &mut next_id, &mut start_line);
    Ok(sentences)
}

/// Write sentences in canonical layout: comments, rows, one blank line each.
pub fn write_conllu(sentences: &[ConlluSentence]) -> String {
    let mut out = String::new();
    for sentence in sentences {
        for comment in &sentence.comments {
            out.push_str(comment);
            out.push('\n');
        }
        for row in &sentence.rows {
            let fields = match row {
                Row::Token(t) => &t.fields,
                Row::Opaque(f) => f,
            };
            out.push_str(&fields.join("\t"));
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Group sentences into documents at `# newdoc id = ...` comments.
/// Sentences before the first marker form an unnamed document.
pub fn split_documents(sentences: &[ConlluSentence]) -> Vec<(String, &[ConlluSentence])> {
    let mut bounds: Vec<(String, usize)> = Vec::new();
    for (i, sentence) in sentences.iter().enumerate() {
        if let Some(id) = sentence.comment_value("newdoc id") {
            bounds.push((id.to_string(), i));
        }
    }
    if sentences.is_empty() {
        return Vec::new();
    }
    let mut docs = Vec::new();
    if bounds.first().is_none_or(|(_, i)| *i > 0) {
        let end = bounds.first().map_or(sentences.len(), |(_, i)| *i);
        docs.push(("<nodoc>".to_string(), &sentences[..end]));
    }
    for (k, (id, start)) in bounds.iter().enumerate() {
        let end = bounds.get(k + 1).map_or(sentences.len(), |(_, i)| *i);
        docs.push((id.clone(), &sentences[*start..end]));
    }
    docs
}

/// Merge per-token MISC additions into a sentence. All non-MISC columns come
/// from `base` (the treebank side is authoritative); additions are appended
/// after the existing items with exact duplicates dropped.
///
/// `additions` must have one entry per regular token row.
pub fn merge_misc(base: &ConlluSentence, additions: &[Vec<String>]) -> Result<ConlluSentence> {
    if base.token_count() != additions.len() {
        return Err(Error::MiscTokenCount {
            sent_id: base.sent_id().unwrap_or("<unknown>").to_string(),
            base: base.token_count(),
            additions: additions.len(),
        });
    }
    let mut merged = base.clone();
    for (token, items) in merged.tokens_mut().zip(additions) {
        if items.is_empty() {
            continue;
        }
        let mut misc = token.misc();
        for item in items {
            misc.push_unique(item);
        }
        token.set_misc(&misc);
    }
    Ok(merged)
}
