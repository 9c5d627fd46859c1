//! Sentence matching and disambiguation.
//!
//! Candidates come from three tiers: exact text match, normalized match
//! (trailing `|`, leading dash), and window-restricted fuzzy match (one
//! substituted token after final-punctuation normalization). Lines with a
//! unique candidate anchor the document; ambiguous lines are then resolved
//! jointly as a linear assignment over offsets to the nearest anchors.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::assignment::{solve, CostMatrix};
use crate::error::{Error, Result};
use crate::record::CorefDocument;

use super::index::{normalize_fuzzy, normalize_tokens, Split, TreebankIndex};
use super::AlignOptions;

/// How a source line matched its treebank sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MatchKind {
    Exact,
    Normalized,
    Fuzzy,
    /// Fuzzy with one substituted word token: the treebank side carries a
    /// different word form (lemma injected or corrected) at one position.
    LemmaInjection,
}

impl MatchKind {
    pub fn name(self) -> &'static str {
        match self {
            MatchKind::Exact => "exact",
            MatchKind::Normalized => "normalized",
            MatchKind::Fuzzy => "fuzzy",
            MatchKind::LemmaInjection => "lemma-injection",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub sent_id: String,
    pub kind: MatchKind,
}

/// Compare two token sequences under fuzzy normalization.
pub fn fuzzy_compare(source: &[String], treebank: &[String]) -> Option<MatchKind> {
    let a = normalize_fuzzy(source);
    let b = normalize_fuzzy(treebank);
    if a == b {
        return Some(MatchKind::Fuzzy);
    }
    if a.len() != b.len() {
        return None;
    }
    let diffs: Vec<usize> = (0..a.len()).filter(|&i| a[i] != b[i]).collect();
    if diffs.len() != 1 {
        return None;
    }
    let i = diffs[0];
    let wordlike = |t: &str| t.chars().any(char::is_alphanumeric);
    if wordlike(&a[i]) && wordlike(&b[i]) {
        Some(MatchKind::LemmaInjection)
    } else {
        Some(MatchKind::Fuzzy)
    }
}

/// Candidate treebank sentences for every line of the document.
///
/// Fuzzy matching is window-restricted: only sentences positioned between
/// the surrounding anchors (plus a slack margin) are considered, never the
/// whole treebank.
pub fn match_sentences(
    doc: &CorefDocument,
    index: &TreebankIndex,
    opts: &AlignOptions,
) -> Vec<Vec<Candidate>> {
    let mut candidates: Vec<Vec<Candidate>> = Vec::with_capacity(doc.sentences.len());

    for tokens in &doc.sentences {
        if tokens.is_empty() {
            candidates.push(Vec::new());
            continue;
        }
        let joined = tokens.join(" ");
        let exact = index.exact_ids(&joined);
        if !exact.is_empty() {
            candidates.push(
                exact
                    .iter()
                    .map(|id| Candidate {
                        sent_id: id.clone(),
                        kind: MatchKind::Exact,
                    })
                    .collect(),
            );
            continue;
        }
        let norm = normalize_tokens(tokens).join(" ");
        let normalized = index.normalized_ids(&norm);
        candidates.push(
            normalized
                .iter()
                .map(|id| Candidate {
                    sent_id: id.clone(),
                    kind: MatchKind::Normalized,
                })
                .collect(),
        );
    }

    // anchors for the fuzzy window: unique-candidate lines
    let anchors: Vec<(usize, String)> = candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() == 1)
        .map(|(i, c)| (i, c[0].sent_id.clone()))
        .collect();
    if anchors.is_empty() {
        return candidates;
    }

    let slack = opts.fuzzy_window_slack as isize;
    #[allow(clippy::needless_range_loop)] // candidates[line] is written below
    for line in 0..doc.sentences.len() {
        if !candidates[line].is_empty() || doc.sentences[line].is_empty() {
            continue;
        }
        let before = anchors.iter().rev().find(|(a, _)| *a < line);
        let after = anchors.iter().find(|(a, _)| *a > line);

        let mut window_ids: BTreeSet<&String> = BTreeSet::new();
        if let (Some((a_line, a_id)), Some((b_line, b_id))) = (before, after) {
            let (Some(a_meta), Some(b_meta)) = (index.meta(a_id), index.meta(b_id)) else {
                continue;
            };
            if a_meta.split == b_meta.split {
                window_ids.extend(index.ids_in_window(
                    a_meta.split,
                    a_meta.position as isize + 1,
                    b_meta.position as isize - 1,
                ));
            } else {
                let gap_a = (line - a_line) as isize;
                let gap_b = (b_line - line) as isize;
                window_ids.extend(index.ids_in_window(
                    a_meta.split,
                    a_meta.position as isize + 1,
                    a_meta.position as isize + gap_a + slack,
                ));
                window_ids.extend(index.ids_in_window(
                    b_meta.split,
                    b_meta.position as isize - gap_b - slack,
                    b_meta.position as isize - 1,
                ));
            }
        } else if let Some((a_line, a_id)) = before {
            let Some(a_meta) = index.meta(a_id) else { continue };
            let gap = (line - a_line) as isize;
            window_ids.extend(index.ids_in_window(
                a_meta.split,
                a_meta.position as isize + 1,
                a_meta.position as isize + gap + slack,
            ));
        } else if let Some((b_line, b_id)) = after {
            let Some(b_meta) = index.meta(b_id) else { continue };
            let gap = (b_line - line) as isize;
            window_ids.extend(index.ids_in_window(
                b_meta.split,
                b_meta.position as isize - gap - slack,
                b_meta.position as isize - 1,
            ));
        }

        let source = &doc.sentences[line];
        let mut found = Vec::new();
        for id in window_ids {
            let meta = index.meta(id).expect("window ids are indexed");
            let ud_tokens: Vec<String> = meta
                .sentence
                .tokens()
                .map(|t| t.form().to_string())
                .collect();
            if let Some(kind) = fuzzy_compare(source, &ud_tokens) {
                found.push(Candidate {
                    sent_id: id.clone(),
                    kind,
                });
            }
        }
        candidates[line] = found;
    }

    candidates
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedLine {
    pub sent_id: String,
    pub kind: MatchKind,
}

/// Outcome of joint sentence disambiguation for one document.
#[derive(Debug, Clone, Default)]
pub struct Disambiguation {
    pub lines: Vec<Option<ResolvedLine>>,
    /// Ambiguous lines successfully resolved by the assignment.
    pub ambiguous_resolved: usize,
    /// Line indices that could not be resolved injectively.
    pub unresolved: Vec<usize>,
    /// (earlier line, later line) pairs whose resolved positions are not
    /// strictly increasing.
    pub monotonicity_violations: Vec<(usize, usize)>,
    /// Candidate table for unresolved lines, for the report.
    pub candidate_table: Vec<(usize, Vec<String>)>,
}

const CROSS_SPLIT: f64 = 1e6;
const DUMMY: f64 = 1e7;
const FORBIDDEN: f64 = 1e9;

/// Resolve every line to at most one sent_id, injectively.
///
/// Lines with a unique candidate are anchors. Every ambiguous line i gets,
/// for candidate j, the cost
/// `sum over nearest anchors a of |(pos(j) - pos(a)) - (i - a)|`
/// and the whole document is resolved as one assignment problem.
pub fn disambiguate(
    doc_id: &str,
    candidates: &[Vec<Candidate>],
    index: &TreebankIndex,
) -> Result<Disambiguation> {
    let mut result = Disambiguation {
        lines: vec![None; candidates.len()],
        ..Disambiguation::default()
    };
    if candidates.iter().all(Vec::is_empty) {
        return Ok(result);
    }

    // anchors in line order; duplicate anchor ids keep the first line
    let mut used: HashSet<&str> = HashSet::new();
    let mut anchors: Vec<(usize, &Candidate)> = Vec::new();
    for (line, cands) in candidates.iter().enumerate() {
        if cands.len() == 1 {
            if used.insert(cands[0].sent_id.as_str()) {
                anchors.push((line, &cands[0]));
                result.lines[line] = Some(ResolvedLine {
                    sent_id: cands[0].sent_id.clone(),
                    kind: cands[0].kind,
                });
            } else {
                result.unresolved.push(line);
                result
                    .candidate_table
                    .push((line, vec![cands[0].sent_id.clone()]));
            }
        }
    }
    if anchors.is_empty() {
        return Err(Error::NoAnchors {
            doc_id: doc_id.to_string(),
        });
    }

    // ambiguous lines and their usable candidates
    let mut rows: Vec<(usize, Vec<&Candidate>)> = Vec::new();
    for (line, cands) in candidates.iter().enumerate() {
        if cands.len() < 2 {
            continue;
        }
        let usable: Vec<&Candidate> = cands
            .iter()
            .filter(|c| !used.contains(c.sent_id.as_str()))
            .collect();
        if usable.is_empty() {
            result.unresolved.push(line);
            result.candidate_table.push((
                line,
                cands.iter().map(|c| c.sent_id.clone()).collect(),
            ));
        } else {
            rows.push((line, usable));
        }
    }

    if !rows.is_empty() {
        // deterministic column order: by (split, position)
        let mut columns: Vec<&str> = rows
            .iter()
            .flat_map(|(_, cands)| cands.iter().map(|c| c.sent_id.as_str()))
            .collect::<BTreeSet<&str>>()
            .into_iter()
            .collect();
        columns.sort_by_key(|id| {
            let meta = index.meta(id).expect("candidates are indexed");
            (meta.split, meta.position)
        });
        let col_of: HashMap<&str, usize> =
            columns.iter().enumerate().map(|(i, id)| (*id, i)).collect();

        let n = rows.len();
        let m = columns.len() + n; // dummy slack columns allow giving up a line
        let mut matrix = CostMatrix::new(n, m);
        for (r, (line, cands)) in rows.iter().enumerate() {
            for c in 0..m {
                matrix.set(r, c, if c < columns.len() { FORBIDDEN } else { DUMMY });
            }
            let nearest_before = anchors.iter().rev().find(|(a, _)| a < line);
            let nearest_after = anchors.iter().find(|(a, _)| a > line);
            for cand in cands {
                let meta = index.meta(&cand.sent_id).expect("candidate indexed");
                let mut cost = 0.0;
                for anchor in [nearest_before, nearest_after].into_iter().flatten() {
                    let (a_line, a_cand) = anchor;
                    let a_meta = index.meta(&a_cand.sent_id).expect("anchor indexed");
                    if a_meta.split == meta.split {
                        let expected = *line as f64 - *a_line as f64;
                        let actual = meta.position as f64 - a_meta.position as f64;
                        cost += (actual - expected).abs();
                    } else {
                        cost += CROSS_SPLIT;
                    }
                }
                matrix.set(r, col_of[cand.sent_id.as_str()], cost);
            }
        }

        let solved = solve(&matrix)?;
        for (r, (line, cands)) in rows.iter().enumerate() {
            let col = solved.row_to_col[r];
            let resolved = (col < columns.len()).then(|| columns[col]).and_then(|id| {
                cands
                    .iter()
                    .find(|c| c.sent_id == id)
                    .map(|c| ResolvedLine {
                        sent_id: c.sent_id.clone(),
                        kind: c.kind,
                    })
            });
            match resolved {
                Some(res) => {
                    result.lines[*line] = Some(res);
                    result.ambiguous_resolved += 1;
                }
                None => {
                    result.unresolved.push(*line);
                    result.candidate_table.push((
                        *line,
                        cands.iter().map(|c| c.sent_id.clone()).collect(),
                    ));
                }
            }
        }
    }

    result.unresolved.sort_unstable();
    result.candidate_table.sort();

    // anchored monotonicity: resolved positions strictly increase
    let mut last: Option<(usize, Split, usize)> = None;
    for (line, resolved) in result.lines.iter().enumerate() {
        let Some(res) = resolved else { continue };
        let meta = index.meta(&res.sent_id).expect("resolved ids are indexed");
        if let Some((prev_line, prev_split, prev_pos)) = last {
            if prev_split == meta.split && meta.position <= prev_pos {
                result.monotonicity_violations.push((prev_line, line));
            }
        }
        last = Some((line, meta.split, meta.position));
    }

    Ok(result)
}

/// Split membership of a resolved document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitCheck {
    /// No line resolved.
    Empty,
    /// Every resolved line lives in one split.
    Kept(Split),
    /// The document spans several splits and must be discarded.
    Discarded(Vec<Split>),
}

pub fn check_split_overlap(
    lines: &[Option<ResolvedLine>],
    index: &TreebankIndex,
) -> SplitCheck {
    let splits: BTreeSet<Split> = lines
        .iter()
        .flatten()
        .filter_map(|r| index.split_of(&r.sent_id))
        .collect();
    match splits.len() {
        0 => SplitCheck::Empty,
        1 => SplitCheck::Kept(*splits.iter().next().unwrap()),
        _ => SplitCheck::Discarded(splits.into_iter().collect()),
    }
}

/// Fraction of non-empty lines with at least one exact match in `index`.
pub fn exact_match_fraction(doc: &CorefDocument, index: &TreebankIndex) -> f64 {
    fraction(doc, |tokens| !index.exact_ids(&tokens.join(" ")).is_empty())
}

/// Fraction of non-empty lines with an exact or normalized match; the
/// signal for whether a document belongs to a treebank at all.
pub fn match_fraction(doc: &CorefDocument, index: &TreebankIndex) -> f64 {
    fraction(doc, |tokens| {
        !index.exact_ids(&tokens.join(" ")).is_empty()
            || !index
                .normalized_ids(&normalize_tokens(tokens).join(" "))
                .is_empty()
    })
}

fn fraction(doc: &CorefDocument, matched: impl Fn(&[String]) -> bool) -> f64 {
    let mut total = 0usize;
    let mut hits = 0usize;
    for tokens in &doc.sentences {
        if tokens.is_empty() {
            continue;
        }
        total += 1;
        if matched(tokens) {
            hits += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}

/// Where a document belongs when its declared treebank does not carry it.
#[derive(Debug, Clone, PartialEq)]
pub enum HomeDecision {
    /// Majority-matched at home; no reason to look elsewhere.
    Stay,
    /// Majority-matched at home, but another treebank also matches; kept at
    /// home with a finding.
    AmbiguousHome { other: String, other_fraction: f64 },
    /// Not matched at home, majority-matched in the other treebank.
    Move { to: String, other_fraction: f64 },
    /// Matched nowhere.
    Unmatched,
}

/// Decide whether an unmatched document should move to another treebank.
/// `home_fraction` is the document's [`exact_match_fraction`] at home.
pub fn cross_treebank_fallback(
    doc: &CorefDocument,
    home_fraction: f64,
    others: &[&TreebankIndex],
    threshold: f64,
) -> HomeDecision {
    let mut best: Option<(&TreebankIndex, f64)> = None;
    for other in others {
        let fraction = exact_match_fraction(doc, other);
        if best.is_none_or(|(_, b)| fraction > b) {
            best = Some((other, fraction));
        }
    }
    let Some((other, other_fraction)) = best else {
        return if home_fraction > threshold {
            HomeDecision::Stay
        } else {
            HomeDecision::Unmatched
        };
    };

    if home_fraction > threshold {
        if other_fraction > threshold {
            HomeDecision::AmbiguousHome {
                other: other.name.clone(),
                other_fraction,
            }
        } else {
            HomeDecision::Stay
        }
    } else if other_fraction > threshold {
        HomeDecision::Move {
            to: other.name.clone(),
            other_fraction,
        }
    } else {
        HomeDecision::Unmatched
    }
}

/// Token mapping from a source line to its treebank sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenRemap {
    Identity,
    /// source token index -> treebank token index
    Map(Vec<Option<usize>>),
}

impl TokenRemap {
    pub fn is_lossy(&self) -> bool {
        match self {
            TokenRemap::Identity => false,
            TokenRemap::Map(m) => m.iter().any(Option::is_none),
        }
    }
}

/// Map source tokens onto treebank tokens. Pipe tokens vanish, a dash
/// present on only one side shifts the mapping, and tokens beyond the
/// treebank sentence are unmapped (the span-adjustment case).
pub fn compute_remap(source: &[String], treebank: &[String]) -> TokenRemap {
    if source == treebank {
        return TokenRemap::Identity;
    }
    let is_dash = |t: &str| matches!(t, "-" | "–" | "—");
    let source_dash = source.first().map(|t| is_dash(t)).unwrap_or(false);
    let treebank_dash = treebank.first().map(|t| is_dash(t)).unwrap_or(false);
    let offset = usize::from(treebank_dash && !source_dash);
    let skip_first = source_dash && !treebank_dash;

    let mut map = Vec::with_capacity(source.len());
    let mut next = offset;
    for (i, token) in source.iter().enumerate() {
        if token == "|" || (i == 0 && skip_first) {
            map.push(None);
        } else if next < treebank.len() {
            map.push(Some(next));
            next += 1;
        } else {
            map.push(None);
        }
    }
    TokenRemap::Map(map)
}

#[cfg(test)]
#[allow(clippy::type_complexity)]
mod tests {
    use super::*;
    use crate::conllu::ConlluSentence;

    fn index_with(splits: &[(Split, &[(&str, &[&str])])]) -> TreebankIndex {
        let mut index = TreebankIndex::new("tb");
        for (split, sents) in splits {
            let sentences: Vec<ConlluSentence> = sents
                .iter()
                .map(|(id, forms)| ConlluSentence::from_forms(id, forms))
                .collect();
            index.add_split(*split, sentences, "f").unwrap();
        }
        index
    }

    fn doc_with(lines: &[&[&str]]) -> CorefDocument {
        let mut doc = CorefDocument::empty("d");
        doc.sentences = lines
            .iter()
            .map(|l| l.iter().map(|t| t.to_string()).collect())
            .collect();
        doc
    }

    fn opts() -> AlignOptions {
        AlignOptions::default()
    }

    #[test]
    fn trailing_pipe_matches_normalized() {
        let index = index_with(&[(Split::Train, &[("1", &["Illustrasjonsfoto"])])]);
        let doc = doc_with(&[&["Illustrasjonsfoto", "|"]]);
        let candidates = match_sentences(&doc, &index, &opts());
        assert_eq!(candidates[0].len(), 1);
        assert_eq!(candidates[0][0].kind, MatchKind::Normalized);
    }

    #[test]
    fn dash_and_final_punct_match_fuzzy_in_window() {
        let index = index_with(&[(
            Split::Train,
            &[
                ("1", &["fast", "anker", "en"]),
                ("2", &["-", "Nei", "?"]),
                ("3", &["fast", "anker", "to"]),
            ],
        )]);
        let doc = doc_with(&[
            &["fast", "anker", "en"],
            &["Nei", "!"],
            &["fast", "anker", "to"],
        ]);
        let candidates = match_sentences(&doc, &index, &opts());
        assert_eq!(candidates[1].len(), 1);
        assert_eq!(candidates[1][0].sent_id, "2");
        assert_eq!(candidates[1][0].kind, MatchKind::Fuzzy);
    }

    #[test]
    fn single_word_substitution_flags_lemma_injection() {
        let index = index_with(&[(
            Split::Train,
            &[
                ("1", &["anker"]),
                ("2", &["kostar", "oss", "mykje"]),
                ("3", &["anker", "to"]),
            ],
        )]);
        let doc = doc_with(&[&["anker"], &["kostar", "vi", "mykje"], &["anker", "to"]]);
        let candidates = match_sentences(&doc, &index, &opts());
        assert_eq!(candidates[1].len(), 1);
        assert_eq!(candidates[1][0].kind, MatchKind::LemmaInjection);
    }

    #[test]
    fn single_candidate_smaller_offset_wins() {
        // anchor at line 0; line 1 ambiguous between position 1 and 50
        let mut sents: Vec<(String, Vec<String>)> = vec![
            ("a0".to_string(), vec!["anker".to_string()]),
            ("a1".to_string(), vec!["tvetydig".to_string()]),
        ];
        for i in 2..51 {
            sents.push((format!("a{i}"), vec![format!("fyll{i}")]));
        }
        sents.push(("a51".to_string(), vec!["tvetydig".to_string()]));
        let mut index = TreebankIndex::new("tb");
        let sentences: Vec<ConlluSentence> = sents
            .iter()
            .map(|(id, forms)| {
                let forms: Vec<&str> = forms.iter().map(String::as_str).collect();
                ConlluSentence::from_forms(id, &forms)
            })
            .collect();
        index.add_split(Split::Train, sentences, "f").unwrap();

        let doc = doc_with(&[&["anker"], &["tvetydig"]]);
        let candidates = match_sentences(&doc, &index, &opts());
        assert_eq!(candidates[1].len(), 2);
        let resolution = disambiguate("d", &candidates, &index).unwrap();
        assert_eq!(resolution.lines[1].as_ref().unwrap().sent_id, "a1");
        assert_eq!(resolution.ambiguous_resolved, 1);
        assert!(resolution.monotonicity_violations.is_empty());
    }

    #[test]
    fn repeated_dialogue_lines_resolve_in_order() {
        // "Elling" appears at many positions; document order must pick
        // distinct, increasing ids
        let mut sents: Vec<(String, Vec<String>)> = Vec::new();
        for i in 0..12 {
            let forms = if i % 3 == 0 {
                vec!["Elling".to_string()]
            } else {
                vec![format!("tekst{i}")]
            };
            sents.push((format!("s{i:02}"), forms));
        }
        let mut index = TreebankIndex::new("tb");
        let sentences: Vec<ConlluSentence> = sents
            .iter()
            .map(|(id, forms)| {
                let forms: Vec<&str> = forms.iter().map(String::as_str).collect();
                ConlluSentence::from_forms(id, &forms)
            })
            .collect();
        index.add_split(Split::Train, sentences, "f").unwrap();

        let doc = doc_with(&[
            &["Elling"],
            &["tekst1"],
            &["tekst2"],
            &["Elling"],
            &["tekst4"],
            &["tekst5"],
            &["Elling"],
        ]);
        let candidates = match_sentences(&doc, &index, &opts());
        let resolution = disambiguate("d", &candidates, &index).unwrap();
        let resolved: Vec<String> = resolution
            .lines
            .iter()
            .map(|r| r.as_ref().unwrap().sent_id.clone())
            .collect();
        assert_eq!(resolved, vec!["s00", "s01", "s02", "s03", "s04", "s05", "s06"]);
        assert!(resolution.monotonicity_violations.is_empty());
    }

    #[test]
    fn no_anchor_is_an_error() {
        let index = index_with(&[(
            Split::Train,
            &[("1", &["hei"]), ("2", &["hei"])],
        )]);
        let doc = doc_with(&[&["hei"]]);
        let candidates = match_sentences(&doc, &index, &opts());
        let err = disambiguate("d", &candidates, &index).unwrap_err();
        assert!(matches!(err, Error::NoAnchors { .. }), "{err}");
    }

    #[test]
    fn split_overlap_is_discarded_with_the_pair() {
        let index = index_with(&[
            (Split::Test, &[("t1", &["en"]), ("t2", &["to"])]),
            (Split::Dev, &[("d1", &["tre"]), ("d2", &["fire"])]),
        ]);
        let doc = doc_with(&[&["en"], &["to"], &["tre"], &["fire"]]);
        let candidates = match_sentences(&doc, &index, &opts());
        let resolution = disambiguate("d", &candidates, &index).unwrap();
        match check_split_overlap(&resolution.lines, &index) {
            SplitCheck::Discarded(splits) => {
                assert_eq!(splits, vec![Split::Test, Split::Dev]);
            }
            other => panic!("expected discard, got {other:?}"),
        }
    }

    #[test]
    fn all_train_document_is_kept() {
        let index = index_with(&[(Split::Train, &[("1", &["en"]), ("2", &["to"])])]);
        let doc = doc_with(&[&["en"], &["to"]]);
        let candidates = match_sentences(&doc, &index, &opts());
        let resolution = disambiguate("d", &candidates, &index).unwrap();
        assert_eq!(
            check_split_overlap(&resolution.lines, &index),
            SplitCheck::Kept(Split::Train)
        );
    }

    #[test]
    fn unmatched_document_moves_to_the_other_treebank() {
        let home = index_with(&[(Split::Train, &[("1", &["annet"])])]);
        let mut other = TreebankIndex::new("nn");
        other
            .add_split(
                Split::Train,
                vec![
                    ConlluSentence::from_forms("n1", &["berre", "tekst"]),
                    ConlluSentence::from_forms("n2", &["meir", "tekst"]),
                ],
                "f",
            )
            .unwrap();
        let doc = doc_with(&[&["berre", "tekst"], &["meir", "tekst"]]);
        let home_fraction = exact_match_fraction(&doc, &home);
        assert_eq!(home_fraction, 0.0);
        match cross_treebank_fallback(&doc, home_fraction, &[&other], 0.5) {
            HomeDecision::Move { to, .. } => assert_eq!(to, "nn"),
            other => panic!("expected move, got {other:?}"),
        }
    }

    #[test]
    fn document_matching_neither_stays_unmatched() {
        let home = index_with(&[(Split::Train, &[("1", &["annet"])])]);
        let other = index_with(&[(Split::Train, &[("2", &["ukjent"])])]);
        let doc = doc_with(&[&["finnes", "ikke"]]);
        assert_eq!(
            cross_treebank_fallback(&doc, 0.0, &[&other], 0.5),
            HomeDecision::Unmatched
        );
        let _ = home;
    }

    #[test]
    fn document_matching_both_keeps_home_with_finding() {
        let other = index_with(&[(Split::Train, &[("o1", &["samme", "tekst"])])]);
        let doc = doc_with(&[&["samme", "tekst"]]);
        match cross_treebank_fallback(&doc, 1.0, &[&other], 0.5) {
            HomeDecision::AmbiguousHome { other, .. } => assert_eq!(other, "tb"),
            other => panic!("expected ambiguous home, got {other:?}"),
        }
    }

    #[test]
    fn remap_strips_pipes_and_respects_dash_prefix() {
        let toks = |s: &[&str]| s.iter().map(|t| t.to_string()).collect::<Vec<_>>();
        assert_eq!(
            compute_remap(&toks(&["a", "b"]), &toks(&["a", "b"])),
            TokenRemap::Identity
        );
        assert_eq!(
            compute_remap(&toks(&["Illustrasjonsfoto", "|"]), &toks(&["Illustrasjonsfoto"])),
            TokenRemap::Map(vec![Some(0), None])
        );
        assert_eq!(
            compute_remap(&toks(&["Nei", "!"]), &toks(&["-", "Nei", "?"])),
            TokenRemap::Map(vec![Some(1), Some(2)])
        );
        assert_eq!(
            compute_remap(&toks(&["-", "Ja", "."]), &toks(&["Ja", "."])),
            TokenRemap::Map(vec![None, Some(0), Some(1)])
        );
        // treebank side shorter: excess tokens unmapped
        assert_eq!(
            compute_remap(&toks(&["en", "to", "tre"]), &toks(&["en", "to"])),
            TokenRemap::Map(vec![Some(0), Some(1), None])
        );
    }
}
