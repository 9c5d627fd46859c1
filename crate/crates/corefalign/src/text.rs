//! Character-offset bookkeeping.
//!
//! BRAT offsets count Unicode scalar values, not bytes, so every lookup into
//! the document text goes through a [`CharMap`] that translates character
//! offsets to byte offsets once per document.

/// A line of the source text, addressed in character offsets.
///
/// `start..end` excludes the terminating newline; lines partition the text
/// together with their newlines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Line {
    pub start: usize,
    pub end: usize,
}

/// Character-to-byte offset table for one text.
#[derive(Debug, Clone)]
pub struct CharMap {
    /// Byte offset of each character; one extra entry for the text end.
    byte_of: Vec<usize>,
}

impl CharMap {
    pub fn new(text: &str) -> Self {
        let mut byte_of: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        byte_of.push(text.len());
        CharMap { byte_of }
    }

    /// Number of characters in the text.
    pub fn len(&self) -> usize {
        self.byte_of.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Slice `text` by character offsets `[start, end)`.
    ///
    /// Panics if the offsets are out of bounds; callers validate bounds when
    /// parsing annotations.
    pub fn slice<'t>(&self, text: &'t str, start: usize, end: usize) -> &'t str {
        &text[self.byte_of[start]..self.byte_of[end]]
    }
}

/// Split `text` into lines with character offsets.
///
/// A trailing newline does not produce an extra empty line; a text without a
/// final newline keeps its last line.
pub fn split_lines(text: &str) -> Vec<Line> {
    let mut lines = Vec::new();
    let mut start = 0usize;
    let mut pos = 0usize;
    for ch in text.chars() {
        if ch == '\n' {
            lines.push(Line { start, end: pos });
            start = pos + 1;
        }
        pos += 1;
    }
    if start < pos {
        lines.push(Line { start, end: pos });
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slices_by_characters_not_bytes() {
        let text = "Slått ut .";
        let map = CharMap::new(text);
        assert_eq!(map.len(), 10);
        assert_eq!(map.slice(text, 0, 5), "Slått");
        assert_eq!(map.slice(text, 6, 8), "ut");
    }

    #[test]
    fn lines_partition_text() {
        let text = "a b\n\ncd\n";
        let lines = split_lines(text);
        assert_eq!(
            lines,
            vec![
                Line { start: 0, end: 3 },
                Line { start: 4, end: 4 },
                Line { start: 5, end: 7 },
            ]
        );
    }

    #[test]
    fn last_line_without_newline_is_kept() {
        let lines = split_lines("x\ny");
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1], Line { start: 2, end: 3 });
    }
}
