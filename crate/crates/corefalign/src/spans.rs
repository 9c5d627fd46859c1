//! Character spans to word spans.
//!
//! The source `.txt` lines are pre-tokenized and space-separated, so tokens
//! are maximal non-space runs. Before mapping, markable spans that end in an
//! isolated `|` token get their end index decremented: the corpus inserts
//! that character before some commas and at ends of sentences, and the
//! treebank side does not have it.

use std::fmt;

use crate::brat::{Fragment, RawDocument};
use crate::error::{Error, Result};
use crate::text::Line;

/// One token with its document-level character interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub start: usize,
    pub end: usize,
}

/// Tokens of one source line.
#[derive(Debug, Clone)]
pub struct LineTokens {
    pub span: Line,
    pub tokens: Vec<Token>,
}

/// Per-line token table for one document.
#[derive(Debug, Clone)]
pub struct TokenTable {
    pub lines: Vec<LineTokens>,
    /// Line indices that do not reconstruct from their tokens with single
    /// spaces (double spaces, tabs, leading/trailing blanks).
    pub irregular_lines: Vec<usize>,
}

impl TokenTable {
    /// Token surface forms of one line.
    pub fn forms<'d>(&self, doc: &'d RawDocument, line: usize) -> Vec<&'d str> {
        self.lines[line]
            .tokens
            .iter()
            .map(|t| doc.charmap().slice(&doc.text, t.start, t.end))
            .collect()
    }
}

/// Split every line into tokens with character offsets.
///
/// Empty lines yield empty token sequences. Lines that do not round-trip as
/// `tokens.join(" ")` are flagged in `irregular_lines`.
pub fn tokenize_lines(doc: &RawDocument) -> TokenTable {
    let chars: Vec<char> = doc.text.chars().collect();
    let mut lines = Vec::with_capacity(doc.lines.len());
    let mut irregular_lines = Vec::new();

    for (line_idx, line) in doc.lines.iter().enumerate() {
        let mut tokens = Vec::new();
        let mut pos = line.start;
        while pos < line.end {
            if chars[pos].is_whitespace() {
                pos += 1;
                continue;
            }
            let start = pos;
            while pos < line.end && !chars[pos].is_whitespace() {
                pos += 1;
            }
            tokens.push(Token { start, end: pos });
        }
        let reconstructs = {
            let joined_len: usize = tokens.iter().map(|t| t.end - t.start).sum::<usize>()
                + tokens.len().saturating_sub(1);
            joined_len == line.end - line.start
                && tokens
                    .windows(2)
                    .all(|pair| pair[1].start == pair[0].end + 1)
                && tokens.first().is_none_or(|t| t.start == line.start)
        };
        if !reconstructs && !(line.start == line.end) {
            irregular_lines.push(line_idx);
        }
        lines.push(LineTokens { span: *line, tokens });
    }

    TokenTable {
        lines,
        irregular_lines,
    }
}

/// Outcome of the pipe-span correction pass.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PipeCorrections {
    /// Number of fragments whose end index was decremented.
    pub corrected: usize,
    /// (markable id, fragment index) pairs that contain a `|` the rule does
    /// not cover (mid-span pipes, pipe-only fragments); left untouched.
    pub flagged: Vec<(String, usize)>,
}

/// Shrink every markable fragment that ends in an isolated pipe token so the
/// token and its preceding space fall outside the span. Applying the pass
/// twice equals applying it once.
pub fn correct_pipe_spans(mut doc: RawDocument) -> (RawDocument, PipeCorrections) {
    let chars: Vec<char> = doc.text.chars().collect();
    let mut report = PipeCorrections::default();

    for markable in doc.markables.iter_mut() {
        let mut changed = false;
        for (f_idx, frag) in markable.fragments.iter_mut().enumerate() {
            let mut end = frag.end;
            let mut shrunk = false;
            // isolated trailing pipes: "... |" (repeat so one pass reaches
            // the fixed point)
            while end >= frag.start + 2 && chars[end - 1] == '|' && chars[end - 2].is_whitespace()
            {
                end -= 1;
                while end > frag.start && chars[end - 1].is_whitespace() {
                    end -= 1;
                }
                shrunk = true;
            }
            if shrunk && end > frag.start {
                frag.end = end;
                report.corrected += 1;
                changed = true;
            } else if shrunk {
                // span was nothing but pipes; leave it for the report
                report.flagged.push((markable.id.clone(), f_idx));
            } else if chars[frag.start..frag.end].contains(&'|') {
                report.flagged.push((markable.id.clone(), f_idx));
            }
        }
        if changed {
            markable.text = markable
                .fragments
                .iter()
                .map(|f| chars[f.start..f.end].iter().collect::<String>())
                .collect::<Vec<_>>()
                .join(" ");
        }
    }

    (doc, report)
}

/// A word-level span: token indices are 0-based and inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WordSpan {
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
}

/// A fragment that only partially overlapped a token and was widened to
/// whole-token boundaries. No annotated character is ever dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapFinding {
    pub markable: String,
    pub fragment: usize,
    pub snapped_start: bool,
    pub snapped_end: bool,
}

impl fmt::Display for SnapFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match (self.snapped_start, self.snapped_end) {
            (true, true) => "both ends",
            (true, false) => "start",
            _ => "end",
        };
        write!(
            f,
            "markable {} fragment {} snapped outward at {}",
            self.markable, self.fragment, side
        )
    }
}

/// Map one markable's character fragments to word spans.
///
/// Each fragment must lie inside a single line; a fragment crossing a line
/// boundary is an error and callers drop the mention with a loss record.
/// Partial-token overlaps snap outward and are reported.
pub fn char_to_word(
    markable: &crate::brat::Markable,
    table: &TokenTable,
) -> Result<(Vec<WordSpan>, Vec<SnapFinding>)> {
    let mut spans = Vec::with_capacity(markable.fragments.len());
    let mut snaps = Vec::new();

    for (f_idx, frag) in markable.fragments.iter().enumerate() {
        let line_idx = locate_line(table, *frag).ok_or(Error::CrossLineFragment {
            id: markable.id.clone(),
            start: frag.start,
            end: frag.end,
        })?;
        let tokens = &table.lines[line_idx].tokens;

        let first = tokens.iter().position(|t| t.end > frag.start);
        let last = tokens.iter().rposition(|t| t.start < frag.end);
        let (first, last) = match (first, last) {
            (Some(a), Some(b)) if a <= b => (a, b),
            // fragment falls entirely into whitespace; treat as crossing
            _ => {
                return Err(Error::CrossLineFragment {
                    id: markable.id.clone(),
                    start: frag.start,
                    end: frag.end,
                })
            }
        };

        let snapped_start = frag.start > tokens[first].start;
        let snapped_end = frag.end < tokens[last].end;
        if snapped_start || snapped_end {
            snaps.push(SnapFinding {
                markable: markable.id.clone(),
                fragment: f_idx,
                snapped_start,
                snapped_end,
            });
        }
        spans.push(WordSpan {
            sentence: line_idx,
            start: first,
            end: last,
        });
    }

    Ok((spans, snaps))
}

fn locate_line(table: &TokenTable, frag: Fragment) -> Option<usize> {
    if table.lines.is_empty() {
        return None;
    }
    let idx = table
        .lines
        .partition_point(|lt| lt.span.end < frag.start)
        .min(table.lines.len() - 1);
    // fragment may butt against a newline; probe the neighbors too
    for i in idx.saturating_sub(1)..=(idx + 1).min(table.lines.len() - 1) {
        let line = table.lines[i].span;
        if frag.start >= line.start && frag.end <= line.end {
            return Some(i);
        }
    }
    None
}
