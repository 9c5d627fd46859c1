//! Entity, Bridge and SplitAnte encoding in the MISC column.
//!
//! Cluster numbers are document-scoped (they restart at 1 in every
//! document). A single-token mention of cluster k is `(k)`, a multi-token
//! mention opens `(k` on its first token and closes `k)` on its last. At a
//! token, openings come first ordered by descending mention end (outer
//! first), then closings ordered by descending mention start (the inner
//! mention closes first, which keeps brackets nested). Discontinuous
//! mentions annotate each fragment separately with a `[part/total]` marker,
//! e.g. `(3[1/2]`.
//!
//! `Bridge=a<b` sits on the first token of the anaphor mention (cluster b),
//! `SplitAnte=a<p,b<p` on the closing token of the anaphor mention
//! (cluster p).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::clusters::SplitAnteGroup;
use crate::conllu::ConlluSentence;
use crate::error::{Error, Result};
use crate::record::{renumber_clusters, CorefDocument, Mention};
use crate::spans::WordSpan;

/// MISC items contributed to one token, in emission order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenAnnotations {
    pub split_ante: Option<String>,
    pub bridge: Option<String>,
    pub entity: Option<String>,
}

impl TokenAnnotations {
    pub fn is_empty(&self) -> bool {
        self.split_ante.is_none() && self.bridge.is_none() && self.entity.is_none()
    }

    /// Full MISC items: SplitAnte and Bridge precede Entity.
    pub fn items(&self) -> Vec<String> {
        let mut items = Vec::new();
        if let Some(v) = &self.split_ante {
            items.push(format!("SplitAnte={v}"));
        }
        if let Some(v) = &self.bridge {
            items.push(format!("Bridge={v}"));
        }
        if let Some(v) = &self.entity {
            items.push(format!("Entity={v}"));
        }
        items
    }
}

/// Per-sentence, per-token annotations for one document.
pub type DocAnnotations = Vec<Vec<TokenAnnotations>>;

/// Convert annotations to the per-token item lists `merge_misc` expects.
pub fn annotation_items(annotations: &DocAnnotations) -> Vec<Vec<Vec<String>>> {
    annotations
        .iter()
        .map(|sentence| sentence.iter().map(TokenAnnotations::items).collect())
        .collect()
}

/// A bracket identity: cluster number plus an optional `[part/total]`
/// marker for discontinuous mentions.
type PartKey = (u32, Option<(u32, u32)>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct FragRef {
    cluster: u32,
    part: Option<(u32, u32)>,
    start: usize,
    end: usize,
    single: bool,
}

fn bracket_open(cluster: u32, part: Option<(u32, u32)>, single: bool) -> String {
    let marker = part.map(|(i, n)| format!("[{i}/{n}]")).unwrap_or_default();
    if single {
        format!("({cluster}{marker})")
    } else {
        format!("({cluster}{marker}")
    }
}

fn bracket_close(cluster: u32, part: Option<(u32, u32)>) -> String {
    let marker = part.map(|(i, n)| format!("[{i}/{n}]")).unwrap_or_default();
    format!("{cluster}{marker})")
}

/// Encode a document's mention structure into per-token MISC annotations.
///
/// Fails with an ordering error when the bracket scheme cannot represent the
/// mention set (crossing mentions of the *same* cluster); use
/// [`encode_entities_dropping`] to drop the offenders instead.
pub fn encode_entities(doc: &CorefDocument) -> Result<DocAnnotations> {
    doc.validate()?;
    encode_once(doc).map_err(|offenders| {
        Error::EntityOrdering(
            offenders
                .iter()
                .map(describe_mention)
                .collect::<Vec<_>>()
                .join("; "),
        )
    })
}

/// Encode, dropping mentions the bracket scheme cannot represent. Each
/// dropped mention is returned; the document is renumbered if a cluster
/// loses its last mention.
pub fn encode_entities_dropping(
    doc: &CorefDocument,
) -> Result<(CorefDocument, DocAnnotations, Vec<Mention>)> {
    doc.validate()?;
    let mut work = doc.clone();
    let mut dropped = Vec::new();
    loop {
        match encode_once(&work) {
            Ok(annotations) => return Ok((work, annotations, dropped)),
            Err(offenders) => {
                // drop the later-starting offender and retry
                let victim = offenders
                    .into_iter()
                    .max_by_key(|m| (m.first(), m.cluster))
                    .expect("mismatch always names a mention");
                work.mentions.retain(|m| *m != victim);
                renumber_clusters(&mut work);
                dropped.push(victim);
            }
        }
    }
}

fn describe_mention(m: &Mention) -> String {
    let first = m.first();
    let last = m.last();
    format!(
        "cluster {} at sentence {} tokens {}..={}",
        m.cluster, first.sentence, first.start, last.end
    )
}

/// Returns the annotations, or the mentions whose structure did not survive
/// an encode/decode round trip.
fn encode_once(doc: &CorefDocument) -> std::result::Result<DocAnnotations, Vec<Mention>> {
    let mut annotations: DocAnnotations = doc
        .sentences
        .iter()
        .map(|s| vec![TokenAnnotations::default(); s.len()])
        .collect();

    // bracket events per token
    let mut opens: HashMap<(usize, usize), Vec<FragRef>> = HashMap::new();
    let mut closes: HashMap<(usize, usize), Vec<FragRef>> = HashMap::new();
    for mention in doc.mentions.iter() {
        let total = mention.fragments.len() as u32;
        for (f_idx, frag) in mention.fragments.iter().enumerate() {
            let part = (total > 1).then(|| (f_idx as u32 + 1, total));
            let fr = FragRef {
                cluster: mention.cluster,
                part,
                start: frag.start,
                end: frag.end,
                single: frag.start == frag.end,
            };
            opens.entry((frag.sentence, frag.start)).or_default().push(fr);
            if !fr.single {
                closes.entry((frag.sentence, frag.end)).or_default().push(fr);
            }
        }
    }

    for (&(sent, token), refs) in opens.iter_mut() {
        refs.sort_by_key(|fr| (std::cmp::Reverse(fr.end), fr.cluster, fr.part));
        let slot = &mut annotations[sent][token];
        let mut value = slot.entity.take().unwrap_or_default();
        for fr in refs.iter() {
            value.push_str(&bracket_open(fr.cluster, fr.part, fr.single));
        }
        slot.entity = Some(value);
    }
    for (&(sent, token), refs) in closes.iter_mut() {
        refs.sort_by_key(|fr| (std::cmp::Reverse(fr.start), std::cmp::Reverse(fr.cluster)));
        let slot = &mut annotations[sent][token];
        let mut value = slot.entity.take().unwrap_or_default();
        for fr in refs.iter() {
            value.push_str(&bracket_close(fr.cluster, fr.part));
        }
        slot.entity = Some(value);
    }

    // first mention of each cluster anchors its links
    let mut first_mention: BTreeMap<u32, &Mention> = BTreeMap::new();
    for mention in &doc.mentions {
        first_mention.entry(mention.cluster).or_insert(mention);
    }

    let mut bridge_at: BTreeMap<(usize, usize), Vec<(u32, u32)>> = BTreeMap::new();
    for &(a, b) in &doc.bridges {
        let anchor = first_mention[&b].first();
        bridge_at
            .entry((anchor.sentence, anchor.start))
            .or_default()
            .push((a, b));
    }
    for ((sent, token), mut pairs) in bridge_at {
        pairs.sort_unstable();
        pairs.dedup();
        let value = pairs
            .iter()
            .map(|(a, b)| format!("{a}<{b}"))
            .collect::<Vec<_>>()
            .join(",");
        annotations[sent][token].bridge = Some(value);
    }

    let mut split_at: BTreeMap<(usize, usize), Vec<(u32, u32)>> = BTreeMap::new();
    for group in &doc.split_antecedents {
        let anchor = first_mention[&group.anaphor].last();
        let slot = split_at.entry((anchor.sentence, anchor.end)).or_default();
        for &a in &group.antecedents {
            slot.push((group.anaphor, a));
        }
    }
    for ((sent, token), mut pairs) in split_at {
        pairs.sort_unstable();
        pairs.dedup();
        let value = pairs
            .iter()
            .map(|(p, a)| format!("{a}<{p}"))
            .collect::<Vec<_>>()
            .join(",");
        annotations[sent][token].split_ante = Some(value);
    }

    // postcondition: our own decoder must reconstruct the exact structure
    match decode_annotations(&doc.doc_id, &doc.sentences, &annotations) {
        Ok(decoded) if structurally_equal(doc, &decoded) => Ok(annotations),
        Ok(decoded) => {
            let mine: HashSet<&Mention> = doc.mentions.iter().collect();
            let theirs: HashSet<&Mention> = decoded.mentions.iter().collect();
            let mut offenders: Vec<Mention> = mine
                .symmetric_difference(&theirs)
                .filter(|m| mine.contains(*m))
                .map(|m| (*m).clone())
                .collect();
            if offenders.is_empty() {
                offenders = doc.mentions.clone();
            }
            Err(offenders)
        }
        Err(_) => Err(doc.mentions.clone()),
    }
}

fn structurally_equal(a: &CorefDocument, b: &CorefDocument) -> bool {
    let norm_bridges = |v: &[(u32, u32)]| {
        let mut v = v.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    let norm_splits = |v: &[SplitAnteGroup]| {
        let mut v = v.to_vec();
        v.sort_by_key(|g| g.anaphor);
        v
    };
    a.mentions == b.mentions
        && norm_bridges(&a.bridges) == norm_bridges(&b.bridges)
        && norm_splits(&a.split_antecedents) == norm_splits(&b.split_antecedents)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Element {
    Open {
        cluster: u32,
        part: Option<(u32, u32)>,
        closes_too: bool,
    },
    Close {
        cluster: u32,
        part: Option<(u32, u32)>,
    },
}

fn parse_entity_value(value: &str) -> std::result::Result<Vec<Element>, String> {
    let mut elements = Vec::new();
    let chars: Vec<char> = value.chars().collect();
    let mut pos = 0usize;

    let parse_num = |pos: &mut usize| -> std::result::Result<u32, String> {
        let start = *pos;
        while *pos < chars.len() && chars[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if start == *pos {
            return Err(format!("expected a number at position {start} of {value:?}"));
        }
        chars[start..*pos]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| format!("number out of range in {value:?}"))
    };

    while pos < chars.len() {
        if chars[pos] == '(' {
            pos += 1;
            let cluster = parse_num(&mut pos)?;
            let part = parse_part(&chars, &mut pos)?;
            let closes_too = pos < chars.len() && chars[pos] == ')';
            if closes_too {
                pos += 1;
            }
            elements.push(Element::Open {
                cluster,
                part,
                closes_too,
            });
        } else if chars[pos].is_ascii_digit() {
            let cluster = parse_num(&mut pos)?;
            let part = parse_part(&chars, &mut pos)?;
            if pos >= chars.len() || chars[pos] != ')' {
                return Err(format!("missing ')' after {cluster} in {value:?}"));
            }
            pos += 1;
            elements.push(Element::Close { cluster, part });
        } else {
            return Err(format!(
                "unexpected character {:?} in Entity value {value:?}",
                chars[pos]
            ));
        }
    }
    Ok(elements)
}

fn parse_part(
    chars: &[char],
    pos: &mut usize,
) -> std::result::Result<Option<(u32, u32)>, String> {
    if *pos >= chars.len() || chars[*pos] != '[' {
        return Ok(None);
    }
    let text: String = chars.iter().collect();
    *pos += 1;
    let read_num = |pos: &mut usize| -> std::result::Result<u32, String> {
        let start = *pos;
        while *pos < chars.len() && chars[*pos].is_ascii_digit() {
            *pos += 1;
        }
        chars[start..*pos]
            .iter()
            .collect::<String>()
            .parse()
            .map_err(|_| format!("bad part marker in {text:?}"))
    };
    let index = read_num(pos)?;
    if *pos >= chars.len() || chars[*pos] != '/' {
        return Err(format!("bad part marker in {text:?}"));
    }
    *pos += 1;
    let total = read_num(pos)?;
    if *pos >= chars.len() || chars[*pos] != ']' {
        return Err(format!("bad part marker in {text:?}"));
    }
    *pos += 1;
    Ok(Some((index, total)))
}

fn parse_link_pairs(value: &str) -> std::result::Result<Vec<(u32, u32)>, String> {
    value
        .split(',')
        .map(|pair| {
            let (a, b) = pair
                .split_once('<')
                .ok_or_else(|| format!("link pair {pair:?} is not a<b"))?;
            let a = a.trim().parse().map_err(|_| format!("bad cluster in {pair:?}"))?;
            let b = b.trim().parse().map_err(|_| format!("bad cluster in {pair:?}"))?;
            Ok((a, b))
        })
        .collect()
}

/// Decode per-token annotations back into a document. Cluster numbers are
/// taken verbatim from the brackets and must be contiguous from 1.
pub fn decode_annotations(
    doc_id: &str,
    sentences: &[Vec<String>],
    annotations: &DocAnnotations,
) -> Result<CorefDocument> {
    let names: Vec<String> = (0..sentences.len())
        .map(|i| format!("{doc_id}#{i}"))
        .collect();
    decode_with_names(doc_id, sentences, annotations, &names)
}

fn decode_with_names(
    doc_id: &str,
    sentences: &[Vec<String>],
    annotations: &DocAnnotations,
    names: &[String],
) -> Result<CorefDocument> {
    let sent_name = |idx: usize| names.get(idx).cloned().unwrap_or_else(|| idx.to_string());
    let mut fragments: Vec<FragRecord> = Vec::new();
    let mut bridges: Vec<(u32, u32)> = Vec::new();
    let mut split_pairs: Vec<(u32, u32)> = Vec::new(); // (anaphor, antecedent)

    for (s_idx, tokens) in annotations.iter().enumerate() {
        // open fragments per (cluster, part), most recent last
        let mut open: HashMap<PartKey, Vec<usize>> = HashMap::new();
        for (t_idx, token) in tokens.iter().enumerate() {
            let fail = |reason: String| Error::EntityDecode {
                sent_id: sent_name(s_idx),
                token: t_idx,
                reason,
            };
            if let Some(value) = &token.entity {
                let elements = parse_entity_value(value).map_err(&fail)?;
                for element in elements {
                    match element {
                        Element::Open {
                            cluster,
                            part,
                            closes_too,
                        } => {
                            if closes_too {
                                fragments.push(FragRecord {
                                    cluster,
                                    part,
                                    span: WordSpan {
                                        sentence: s_idx,
                                        start: t_idx,
                                        end: t_idx,
                                    },
                                });
                            } else {
                                fragments.push(FragRecord {
                                    cluster,
                                    part,
                                    span: WordSpan {
                                        sentence: s_idx,
                                        start: t_idx,
                                        end: usize::MAX, // patched at close
                                    },
                                });
                                open.entry((cluster, part))
                                    .or_default()
                                    .push(fragments.len() - 1);
                            }
                        }
                        Element::Close { cluster, part } => {
                            let stack = open.get_mut(&(cluster, part));
                            let idx = stack.and_then(|s| s.pop()).ok_or_else(|| {
                                fail(format!("closing bracket {cluster}) without an opening"))
                            })?;
                            fragments[idx].span.end = t_idx;
                        }
                    }
                }
            }
            if let Some(value) = &token.bridge {
                bridges.extend(parse_link_pairs(value).map_err(&fail)?);
            }
            if let Some(value) = &token.split_ante {
                for (a, p) in parse_link_pairs(value).map_err(&fail)? {
                    split_pairs.push((p, a));
                }
            }
        }
        if let Some((key, _)) = open.iter().find(|(_, stack)| !stack.is_empty()) {
            return Err(Error::EntityDecode {
                sent_id: sent_name(s_idx),
                token: tokens.len().saturating_sub(1),
                reason: format!("mention of cluster {} still open at sentence end", key.0),
            });
        }
    }

    let mentions = group_fragments(doc_id, fragments)?;

    let mut doc = CorefDocument {
        doc_id: doc_id.to_string(),
        sentences: sentences.to_vec(),
        mentions,
        bridges: Vec::new(),
        split_antecedents: Vec::new(),
    };
    doc.sort_mentions();

    let known: HashSet<u32> = doc.mentions.iter().map(|m| m.cluster).collect();
    let check_ref = |cluster: u32| -> Result<()> {
        if known.contains(&cluster) {
            return Ok(());
        }
        Err(Error::EntityDecode {
            sent_id: doc_id.to_string(),
            token: 0,
            reason: format!("link references cluster {cluster} which has no mention"),
        })
    };
    bridges.sort_unstable();
    bridges.dedup();
    for &(a, b) in &bridges {
        check_ref(a)?;
        check_ref(b)?;
    }
    doc.bridges = bridges;

    let mut by_anaphor: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (p, a) in split_pairs {
        check_ref(p)?;
        check_ref(a)?;
        by_anaphor.entry(p).or_default().push(a);
    }
    doc.split_antecedents = by_anaphor
        .into_iter()
        .map(|(anaphor, mut antecedents)| {
            antecedents.sort_unstable();
            antecedents.dedup();
            SplitAnteGroup {
                antecedents,
                anaphor,
            }
        })
        .collect();

    doc.validate().map_err(|e| Error::EntityDecode {
        sent_id: doc_id.to_string(),
        token: 0,
        reason: e.to_string(),
    })?;
    Ok(doc)
}

struct FragRecord {
    cluster: u32,
    part: Option<(u32, u32)>,
    span: WordSpan,
}

fn group_fragments(doc_id: &str, fragments: Vec<FragRecord>) -> Result<Vec<Mention>> {
    let mut mentions = Vec::new();
    let mut parted: BTreeMap<u32, Vec<FragRecord>> = BTreeMap::new();
    for record in fragments {
        match record.part {
            None => mentions.push(Mention {
                cluster: record.cluster,
                fragments: vec![record.span],
            }),
            Some(_) => parted.entry(record.cluster).or_default().push(record),
        }
    }
    for (cluster, mut records) in parted {
        records.sort_by_key(|r| r.span);
        let mut pending: Vec<WordSpan> = Vec::new();
        let mut expect = 1u32;
        let mut total = 0u32;
        for record in records {
            let (index, n) = record.part.unwrap();
            if index == 1 {
                if !pending.is_empty() {
                    return Err(part_error(doc_id, cluster));
                }
                total = n;
                expect = 1;
            }
            if index != expect || n != total {
                return Err(part_error(doc_id, cluster));
            }
            pending.push(record.span);
            expect += 1;
            if index == total {
                mentions.push(Mention {
                    cluster,
                    fragments: std::mem::take(&mut pending),
                });
                expect = 1;
            }
        }
        if !pending.is_empty() {
            return Err(part_error(doc_id, cluster));
        }
    }
    Ok(mentions)
}

fn part_error(doc_id: &str, cluster: u32) -> Error {
    Error::EntityDecode {
        sent_id: doc_id.to_string(),
        token: 0,
        reason: format!("discontinuous mention parts of cluster {cluster} do not line up"),
    }
}

/// Decode the coreference structure of CoNLL-U sentences (one document).
/// Errors carry the sentence id of the offending token.
pub fn decode_entities(sentences: &[ConlluSentence], doc_id: &str) -> Result<CorefDocument> {
    let forms: Vec<Vec<String>> = sentences
        .iter()
        .map(|s| s.tokens().map(|t| t.form().to_string()).collect())
        .collect();
    let annotations: DocAnnotations = sentences
        .iter()
        .map(|s| {
            s.tokens()
                .map(|t| {
                    let misc = t.misc();
                    TokenAnnotations {
                        split_ante: misc.value("SplitAnte").map(str::to_owned),
                        bridge: misc.value("Bridge").map(str::to_owned),
                        entity: misc.value("Entity").map(str::to_owned),
                    }
                })
                .collect()
        })
        .collect();
    let names: Vec<String> = sentences
        .iter()
        .enumerate()
        .map(|(i, s)| {
            s.sent_id()
                .map(str::to_owned)
                .unwrap_or_else(|| format!("{doc_id}#{i}"))
        })
        .collect();
    decode_with_names(doc_id, &forms, &annotations, &names)
}

/// Entity-ordering findings: the coreference subset of the treebank
/// validator's deepest level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Level6Finding {
    /// Unmatched bracket or malformed Entity syntax.
    Unbalanced {
        sent_id: String,
        token: usize,
        detail: String,
    },
    /// Two mentions open at one token in the wrong order (inner before outer).
    OpeningOrder {
        sent_id: String,
        token: usize,
        first: u32,
        second: u32,
    },
    /// Bridge/SplitAnte names a cluster that never appears in Entity
    /// brackets, or the link syntax is malformed.
    UndefinedReference {
        sent_id: String,
        token: usize,
        item: String,
    },
}

impl fmt::Display for Level6Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level6Finding::Unbalanced {
                sent_id,
                token,
                detail,
            } => write!(f, "{sent_id} token {token}: unbalanced entity brackets: {detail}"),
            Level6Finding::OpeningOrder {
                sent_id,
                token,
                first,
                second,
            } => write!(
                f,
                "{sent_id} token {token}: opening of cluster {first} precedes wider cluster {second}"
            ),
            Level6Finding::UndefinedReference {
                sent_id,
                token,
                item,
            } => write!(f, "{sent_id} token {token}: link references undefined cluster: {item}"),
        }
    }
}

/// Check entity bracket balance, same-token opening order, and Bridge /
/// SplitAnte cluster references over one document's sentences.
pub fn validate_level6(sentences: &[ConlluSentence]) -> Vec<Level6Finding> {
    let mut findings = Vec::new();
    let mut defined: HashSet<u32> = HashSet::new();
    // (sent index, token, pairs, raw item) for the reference check
    let mut links: Vec<(usize, usize, Vec<u32>)> = Vec::new();

    let sent_name = |sentences: &[ConlluSentence], idx: usize| {
        sentences[idx]
            .sent_id()
            .map(str::to_owned)
            .unwrap_or_else(|| format!("sentence {idx}"))
    };

    for (s_idx, sentence) in sentences.iter().enumerate() {
        // open fragments: (cluster, part, start token, sequence at start)
        let mut open: Vec<(PartKey, usize, usize)> = Vec::new();
        // closed fragments per opening token: (sequence at start, cluster, end)
        let mut opened_at: HashMap<usize, Vec<(usize, u32, usize)>> = HashMap::new();

        for (t_idx, token) in sentence.tokens().enumerate() {
            let misc = token.misc();
            let mut seq = 0usize;
            if let Some(value) = misc.value("Entity") {
                match parse_entity_value(value) {
                    Err(detail) => findings.push(Level6Finding::Unbalanced {
                        sent_id: sent_name(sentences, s_idx),
                        token: t_idx,
                        detail,
                    }),
                    Ok(elements) => {
                        for element in elements {
                            match element {
                                Element::Open {
                                    cluster,
                                    part,
                                    closes_too,
                                } => {
                                    defined.insert(cluster);
                                    if closes_too {
                                        opened_at
                                            .entry(t_idx)
                                            .or_default()
                                            .push((seq, cluster, t_idx));
                                    } else {
                                        open.push(((cluster, part), t_idx, seq));
                                    }
                                    seq += 1;
                                }
                                Element::Close { cluster, part } => {
                                    let found = open
                                        .iter()
                                        .rposition(|(key, _, _)| *key == (cluster, part));
                                    match found {
                                        Some(idx) => {
                                            let ((cluster, _), start, start_seq) = open.remove(idx);
                                            opened_at
                                                .entry(start)
                                                .or_default()
                                                .push((start_seq, cluster, t_idx));
                                        }
                                        None => findings.push(Level6Finding::Unbalanced {
                                            sent_id: sent_name(sentences, s_idx),
                                            token: t_idx,
                                            detail: format!(
                                                "closing bracket {cluster}) without an opening"
                                            ),
                                        }),
                                    }
                                }
                            }
                        }
                    }
                }
            }
            for key in ["Bridge", "SplitAnte"] {
                if let Some(value) = misc.value(key) {
                    match parse_link_pairs(value) {
                        Ok(pairs) => links.push((
                            s_idx,
                            t_idx,
                            pairs.iter().flat_map(|(a, b)| [*a, *b]).collect(),
                        )),
                        Err(_) => findings.push(Level6Finding::UndefinedReference {
                            sent_id: sent_name(sentences, s_idx),
                            token: t_idx,
                            item: format!("{key}={value}"),
                        }),
                    }
                }
            }
        }

        for ((cluster, _), start, _) in open {
            findings.push(Level6Finding::Unbalanced {
                sent_id: sent_name(sentences, s_idx),
                token: start,
                detail: format!("mention of cluster {cluster} never closes in its sentence"),
            });
        }

        // openings at one token must be widest-first, in source item order
        for (token, mut spans) in opened_at {
            spans.sort_unstable();
            for pair in spans.windows(2) {
                let (_, c1, e1) = pair[0];
                let (_, c2, e2) = pair[1];
                if e1 < e2 {
                    findings.push(Level6Finding::OpeningOrder {
                        sent_id: sent_name(sentences, s_idx),
                        token,
                        first: c1,
                        second: c2,
                    });
                }
            }
        }
    }

    for (s_idx, t_idx, clusters) in links {
        for cluster in clusters {
            if !defined.contains(&cluster) {
                findings.push(Level6Finding::UndefinedReference {
                    sent_id: sent_name(sentences, s_idx),
                    token: t_idx,
                    item: cluster.to_string(),
                });
            }
        }
    }

    findings
}

#[cfg(test)]
#[allow(clippy::type_complexity)]
mod tests {
    use super::*;

    fn doc_from(
        sentences: Vec<Vec<&str>>,
        mentions: Vec<(u32, Vec<(usize, usize, usize)>)>,
        bridges: Vec<(u32, u32)>,
        splits: Vec<(Vec<u32>, u32)>,
    ) -> CorefDocument {
        let mut doc = CorefDocument {
            doc_id: "d".into(),
            sentences: sentences
                .into_iter()
                .map(|s| s.into_iter().map(str::to_owned).collect())
                .collect(),
            mentions: mentions
                .into_iter()
                .map(|(cluster, frags)| Mention {
                    cluster,
                    fragments: frags
                        .into_iter()
                        .map(|(sentence, start, end)| WordSpan {
                            sentence,
                            start,
                            end,
                        })
                        .collect(),
                })
                .collect(),
            bridges,
            split_antecedents: splits
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

    fn entity_of(annotations: &DocAnnotations, sent: usize, token: usize) -> String {
        annotations[sent][token]
            .items()
            .join("|")
    }

    #[test]
    fn single_token_mention_encodes_parenthesized() {
        let doc = doc_from(vec![vec!["Kidnapperne", "kom"]], vec![(1, vec![(0, 0, 0)])], vec![], vec![]);
        let annotations = encode_entities(&doc).unwrap();
        assert_eq!(entity_of(&annotations, 0, 0), "Entity=(1)");
        assert!(annotations[0][1].is_empty());
    }

    #[test]
    fn nested_single_token_closing_order() {
        // cluster 1 spans tokens 0..=1, cluster 2 is the single token 1:
        // the inner single-token mention opens before the outer one closes
        let doc = doc_from(
            vec![vec!["barnet", "deres"]],
            vec![(1, vec![(0, 0, 1)]), (2, vec![(0, 1, 1)])],
            vec![],
            vec![],
        );
        let annotations = encode_entities(&doc).unwrap();
        assert_eq!(entity_of(&annotations, 0, 0), "Entity=(1");
        assert_eq!(entity_of(&annotations, 0, 1), "Entity=(2)1)");
    }

    #[test]
    fn bridge_sits_on_anaphor_first_token() {
        let doc = doc_from(
            vec![vec!["kystvakten", "båten"]],
            vec![(1, vec![(0, 0, 0)]), (2, vec![(0, 1, 1)])],
            vec![(1, 2)],
            vec![],
        );
        let annotations = encode_entities(&doc).unwrap();
        assert_eq!(entity_of(&annotations, 0, 1), "Bridge=1<2|Entity=(2)");
    }

    #[test]
    fn encode_decode_round_trip_with_discontinuity() {
        let doc = doc_from(
            vec![vec!["a", "b", "c", "d", "e", "f"]],
            vec![
                (1, vec![(0, 0, 5)]),
                (2, vec![(0, 0, 1), (0, 4, 4)]),
                (3, vec![(0, 2, 2)]),
            ],
            vec![(1, 3)],
            vec![(vec![1, 2], 3)],
        );
        let annotations = encode_entities(&doc).unwrap();
        assert_eq!(entity_of(&annotations, 0, 0), "Entity=(1(2[1/2]");
        assert_eq!(
            entity_of(&annotations, 0, 2),
            "SplitAnte=1<3,2<3|Bridge=1<3|Entity=(3)"
        );
        let decoded = decode_annotations("d", &doc.sentences, &annotations).unwrap();
        assert_eq!(decoded, doc);
    }

    #[test]
    fn crossing_at_shared_token_is_dropped_not_misencoded() {
        // cluster 1 closes where cluster 2 opens: "(21)" would be ambiguous
        // with bare integer ids, so the later-starting mention is dropped
        let doc = doc_from(
            vec![vec!["a", "b", "c", "d", "e"]],
            vec![(1, vec![(0, 0, 1)]), (2, vec![(0, 1, 4)])],
            vec![],
            vec![],
        );
        assert!(encode_entities(&doc).is_err());
        let (kept, annotations, dropped) = encode_entities_dropping(&doc).unwrap();
        assert_eq!(dropped.len(), 1);
        assert_eq!(dropped[0].first().start, 1);
        let decoded = decode_annotations("d", &kept.sentences, &annotations).unwrap();
        assert_eq!(decoded.mentions, kept.mentions);
    }

    #[test]
    fn same_cluster_crossing_cannot_encode() {
        let doc = doc_from(
            vec![vec!["a", "b", "c", "d"]],
            vec![(1, vec![(0, 0, 2)]), (1, vec![(0, 1, 3)])],
            vec![],
            vec![],
        );
        let err = encode_entities(&doc).unwrap_err();
        assert!(matches!(err, Error::EntityOrdering(_)), "{err}");

        let (kept, annotations, dropped) = encode_entities_dropping(&doc).unwrap();
        assert_eq!(dropped.len(), 1);
        assert_eq!(dropped[0].first().start, 1);
        assert_eq!(kept.mentions.len(), 1);
        let decoded = decode_annotations("d", &kept.sentences, &annotations).unwrap();
        assert_eq!(decoded.mentions, kept.mentions);
    }

    #[test]
    fn different_cluster_crossing_is_representable() {
        let doc = doc_from(
            vec![vec!["a", "b", "c", "d"]],
            vec![(1, vec![(0, 0, 2)]), (2, vec![(0, 1, 3)])],
            vec![],
            vec![],
        );
        let annotations = encode_entities(&doc).unwrap();
        let decoded = decode_annotations("d", &doc.sentences, &annotations).unwrap();
        assert_eq!(decoded, doc);
    }

    #[test]
    fn decode_rejects_unbalanced_brackets() {
        let mut sentence = ConlluSentence::from_forms("s1", &["a", "b"]);
        sentence.tokens_mut().next().unwrap().fields[crate::conllu::MISC] = "Entity=(1".into();
        let err = decode_entities(&[sentence], "d").unwrap_err();
        assert!(matches!(err, Error::EntityDecode { .. }), "{err}");
    }

    #[test]
    fn decode_of_plain_misc_yields_empty_document() {
        let sentences = vec![ConlluSentence::from_forms("s1", &["bare", "ord"])];
        let doc = decode_entities(&sentences, "d").unwrap();
        assert!(doc.mentions.is_empty());
        assert!(doc.bridges.is_empty());
    }

    #[test]
    fn validator_accepts_encoder_output() {
        let doc = doc_from(
            vec![vec!["a", "b", "c"], vec!["d", "e"]],
            vec![
                (1, vec![(0, 0, 2)]),
                (2, vec![(0, 1, 1)]),
                (3, vec![(1, 0, 1)]),
            ],
            vec![(1, 3)],
            vec![],
        );
        let annotations = encode_entities(&doc).unwrap();
        let sentences: Vec<ConlluSentence> = doc
            .sentences
            .iter()
            .enumerate()
            .map(|(i, forms)| {
                let forms: Vec<&str> = forms.iter().map(String::as_str).collect();
                let base = ConlluSentence::from_forms(&format!("s{i}"), &forms);
                crate::conllu::merge_misc(&base, &annotation_items(&annotations)[i]).unwrap()
            })
            .collect();
        assert!(validate_level6(&sentences).is_empty());
    }

    #[test]
    fn validator_flags_unbalanced_open() {
        let mut sentence = ConlluSentence::from_forms("s1", &["a", "b"]);
        sentence.tokens_mut().next().unwrap().fields[crate::conllu::MISC] = "Entity=(1".into();
        let findings = validate_level6(&[sentence]);
        assert_eq!(findings.len(), 1);
        assert!(matches!(findings[0], Level6Finding::Unbalanced { .. }));
    }

    #[test]
    fn validator_flags_wrong_opening_order() {
        // (1 closes before (2 although 1 was opened first
        let mut sentence = ConlluSentence::from_forms("s1", &["a", "b", "c"]);
        {
            let mut tokens = sentence.tokens_mut();
            tokens.next().unwrap().fields[crate::conllu::MISC] = "Entity=(1(2".into();
            tokens.next().unwrap().fields[crate::conllu::MISC] = "Entity=1)".into();
            tokens.next().unwrap().fields[crate::conllu::MISC] = "Entity=2)".into();
        }
        let findings = validate_level6(&[sentence]);
        assert!(
            findings
                .iter()
                .any(|f| matches!(f, Level6Finding::OpeningOrder { first: 1, second: 2, .. })),
            "{findings:?}"
        );
    }

    #[test]
    fn validator_flags_undefined_bridge_reference() {
        let mut sentence = ConlluSentence::from_forms("s1", &["a"]);
        sentence.tokens_mut().next().unwrap().fields[crate::conllu::MISC] =
            "Bridge=7<9|Entity=(1)".into();
        let findings = validate_level6(&[sentence]);
        assert_eq!(
            findings
                .iter()
                .filter(|f| matches!(f, Level6Finding::UndefinedReference { .. }))
                .count(),
            2
        );
    }
}
