//! BRAT standoff parsing: one `.ann`/`.txt` pair per document.
//!
//! T-lines become [`Markable`]s (semicolon-separated offset pairs group the
//! fragments of a discontinuous mention), R-lines become [`RelationEdge`]s.
//! Every other line type (`#` comments, attribute `A`-lines, ...) is kept as
//! an opaque record so unrelated BRAT features never abort a run.
//!
//! Offsets are half-open `[start, end)` intervals counted in characters
//! (Unicode scalar values), which is how BRAT addresses text.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::text::{split_lines, CharMap, Line};

/// One character interval of a markable, `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fragment {
    pub start: usize,
    pub end: usize,
}

/// An annotated span: a T-line of the `.ann` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Markable {
    /// Annotation identifier, e.g. `T37`.
    pub id: String,
    /// Type label as written in the file, e.g. `Markable`.
    pub kind_label: String,
    /// Character intervals into the `.txt`, sorted ascending, non-overlapping.
    pub fragments: Vec<Fragment>,
    /// Verbatim surface text from the annotation line.
    pub text: String,
    line_no: usize,
}

impl Markable {
    pub fn new(
        id: impl Into<String>,
        kind_label: impl Into<String>,
        fragments: Vec<Fragment>,
        text: impl Into<String>,
    ) -> Self {
        Markable {
            id: id.into(),
            kind_label: kind_label.into(),
            fragments,
            text: text.into(),
            line_no: 0,
        }
    }

    /// Character offset key used for document-order sorting: earliest start,
    /// then widest span first.
    pub fn order_key(&self) -> (usize, std::cmp::Reverse<usize>) {
        let start = self.fragments.first().map_or(0, |f| f.start);
        let end = self.fragments.last().map_or(0, |f| f.end);
        (start, std::cmp::Reverse(end))
    }
}

/// The four relation kinds annotated in the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationKind {
    Anaphoric,
    Cataphoric,
    Bridging,
    SplitAntecedent,
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RelationKind::Anaphoric => "anaphoric",
            RelationKind::Cataphoric => "cataphoric",
            RelationKind::Bridging => "bridging",
            RelationKind::SplitAntecedent => "split-antecedent",
        };
        f.write_str(s)
    }
}

/// An R-line. The first argument is the anaphor side (`source`), the
/// remaining arguments are its antecedents (`targets`); a split antecedent
/// may carry several.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationEdge {
    pub id: String,
    pub kind: RelationKind,
    /// Type label as written in the file, e.g. `Bridging`.
    pub label: String,
    pub source: String,
    pub targets: Vec<String>,
    arg_names: Vec<String>,
    line_no: usize,
}

impl RelationEdge {
    pub fn new(
        id: impl Into<String>,
        kind: RelationKind,
        label: impl Into<String>,
        source: impl Into<String>,
        targets: Vec<String>,
    ) -> Self {
        let arg_names = (1..=targets.len() + 1).map(|n| format!("Arg{n}")).collect();
        RelationEdge {
            id: id.into(),
            kind,
            label: label.into(),
            source: source.into(),
            targets,
            arg_names,
            line_no: 0,
        }
    }
}

/// A preserved but uninterpreted annotation line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpaqueRecord {
    pub raw: String,
    line_no: usize,
}

/// One parsed `.ann`/`.txt` pair.
#[derive(Debug, Clone)]
pub struct RawDocument {
    pub doc_id: String,
    pub text: String,
    /// Sentence lines of the `.txt` with their character offsets.
    pub lines: Vec<Line>,
    pub markables: Vec<Markable>,
    pub relations: Vec<RelationEdge>,
    pub opaque: Vec<OpaqueRecord>,
    charmap: CharMap,
}

impl RawDocument {
    /// Build a document from raw parts, recomputing lines and offsets.
    /// `parse_ann` is the usual entry point; this one serves tests and
    /// deserialized data.
    pub fn from_parts(
        doc_id: impl Into<String>,
        text: impl Into<String>,
        markables: Vec<Markable>,
        relations: Vec<RelationEdge>,
    ) -> Self {
        let text = text.into();
        let charmap = CharMap::new(&text);
        RawDocument {
            doc_id: doc_id.into(),
            lines: split_lines(&text),
            markables,
            relations,
            opaque: Vec::new(),
            charmap,
            text,
        }
    }

    pub fn charmap(&self) -> &CharMap {
        &self.charmap
    }

    /// Text covered by one fragment.
    pub fn fragment_text(&self, frag: Fragment) -> &str {
        self.charmap.slice(&self.text, frag.start, frag.end)
    }

    /// Text covered by a markable: fragments joined with single spaces.
    pub fn covered_text(&self, markable: &Markable) -> String {
        markable
            .fragments
            .iter()
            .map(|f| self.fragment_text(*f))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn markable(&self, id: &str) -> Option<&Markable> {
        self.markables.iter().find(|m| m.id == id)
    }

    /// Serialize back to `.ann` syntax, preserving original line order.
    pub fn to_ann(&self) -> String {
        enum Rec<'a> {
            M(&'a Markable),
            R(&'a RelationEdge),
            O(&'a OpaqueRecord),
        }
        let mut recs: Vec<(usize, Rec)> = Vec::new();
        for m in &self.markables {
            recs.push((m.line_no, Rec::M(m)));
        }
        for r in &self.relations {
            recs.push((r.line_no, Rec::R(r)));
        }
        for o in &self.opaque {
            recs.push((o.line_no, Rec::O(o)));
        }
        recs.sort_by_key(|(n, _)| *n);

        let mut out = String::new();
        for (_, rec) in recs {
            match rec {
                Rec::M(m) => {
                    let frags = m
                        .fragments
                        .iter()
                        .map(|f| format!("{} {}", f.start, f.end))
                        .collect::<Vec<_>>()
                        .join(";");
                    out.push_str(&format!("{}\t{} {}\t{}\n", m.id, m.kind_label, frags, m.text));
                }
                Rec::R(r) => {
                    let mut args = Vec::with_capacity(1 + r.targets.len());
                    let ids = std::iter::once(&r.source).chain(r.targets.iter());
                    for (name, id) in r.arg_names.iter().zip(ids) {
                        args.push(format!("{name}:{id}"));
                    }
                    out.push_str(&format!("{}\t{} {}\n", r.id, r.label, args.join(" ")));
                }
                Rec::O(o) => {
                    out.push_str(&o.raw);
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// Case-insensitive mapping from relation type strings to [`RelationKind`].
///
/// The corpus' literal BRAT type strings are not fixed anywhere, so the
/// shipped defaults are a convenience, not an authority; extend or replace
/// them to match your annotation scheme.
#[derive(Debug, Clone)]
pub struct RelationAliases {
    map: HashMap<String, RelationKind>,
}

impl Default for RelationAliases {
    fn default() -> Self {
        let mut aliases = RelationAliases {
            map: HashMap::new(),
        };
        for name in ["anaphoric", "anaphora", "anaphor", "coref", "coreference"] {
            aliases.insert(name, RelationKind::Anaphoric);
        }
        for name in ["cataphoric", "cataphora", "cataphor"] {
            aliases.insert(name, RelationKind::Cataphoric);
        }
        for name in ["bridging", "bridge"] {
            aliases.insert(name, RelationKind::Bridging);
        }
        for name in [
            "split_antecedent",
            "split-antecedent",
            "splitantecedent",
            "split_ante",
            "splitante",
        ] {
            aliases.insert(name, RelationKind::SplitAntecedent);
        }
        aliases
    }
}

impl RelationAliases {
    pub fn empty() -> Self {
        RelationAliases {
            map: HashMap::new(),
        }
    }

    pub fn insert(&mut self, name: &str, kind: RelationKind) {
        self.map.insert(name.to_lowercase(), kind);
    }

    pub fn resolve(&self, name: &str) -> Option<RelationKind> {
        self.map.get(&name.to_lowercase()).copied()
    }
}

/// Parse a `.ann`/`.txt` pair with the default relation alias table.
pub fn parse_ann(ann_text: &str, txt_text: &str, doc_id: &str) -> Result<RawDocument> {
    parse_ann_with(ann_text, txt_text, doc_id, &RelationAliases::default())
}

/// Parse a `.ann`/`.txt` pair, resolving relation types via `aliases`.
pub fn parse_ann_with(
    ann_text: &str,
    txt_text: &str,
    doc_id: &str,
    aliases: &RelationAliases,
) -> Result<RawDocument> {
    let charmap = CharMap::new(txt_text);
    let text_len = charmap.len();
    let mut markables: Vec<Markable> = Vec::new();
    let mut relations: Vec<RelationEdge> = Vec::new();
    let mut opaque: Vec<OpaqueRecord> = Vec::new();

    let malformed = |line_no: usize, reason: String| Error::AnnParse {
        file: doc_id.to_string(),
        line: line_no,
        reason,
    };

    for (idx, raw) in ann_text.lines().enumerate() {
        let line_no = idx + 1;
        if raw.starts_with('T') {
            let cols: Vec<&str> = raw.split('\t').collect();
            if cols.len() != 3 {
                return Err(malformed(
                    line_no,
                    format!("expected 3 tab-separated columns, found {}", cols.len()),
                ));
            }
            let id = cols[0].to_string();
            let (kind_label, offsets) = cols[1]
                .split_once(' ')
                .ok_or_else(|| malformed(line_no, "missing offsets after type".into()))?;
            let mut fragments = Vec::new();
            for part in offsets.split(';') {
                let mut nums = part.split_whitespace();
                let (s, e) = match (nums.next(), nums.next(), nums.next()) {
                    (Some(s), Some(e), None) => (s, e),
                    _ => {
                        return Err(malformed(
                            line_no,
                            format!("offset fragment {part:?} is not a start/end pair"),
                        ))
                    }
                };
                let start: usize = s
                    .parse()
                    .map_err(|_| malformed(line_no, format!("non-numeric offset {s:?}")))?;
                let end: usize = e
                    .parse()
                    .map_err(|_| malformed(line_no, format!("non-numeric offset {e:?}")))?;
                if start >= end {
                    return Err(malformed(
                        line_no,
                        format!("empty or inverted fragment [{start},{end})"),
                    ));
                }
                if end > text_len {
                    return Err(Error::FragmentBounds {
                        file: doc_id.to_string(),
                        id,
                        start,
                        end,
                        len: text_len,
                    });
                }
                fragments.push(Fragment { start, end });
            }
            fragments.sort();
            for pair in fragments.windows(2) {
                if pair[0].end > pair[1].start {
                    return Err(malformed(
                        line_no,
                        format!(
                            "overlapping fragments [{},{}) and [{},{})",
                            pair[0].start, pair[0].end, pair[1].start, pair[1].end
                        ),
                    ));
                }
            }
            let covered = fragments
                .iter()
                .map(|f| charmap.slice(txt_text, f.start, f.end))
                .collect::<Vec<_>>()
                .join(" ");
            if normalize_ws(&covered) != normalize_ws(cols[2]) {
                return Err(malformed(
                    line_no,
                    format!(
                        "annotation text {:?} does not match covered text {:?}",
                        cols[2], covered
                    ),
                ));
            }
            markables.push(Markable {
                id,
                kind_label: kind_label.to_string(),
                fragments,
                text: cols[2].to_string(),
                line_no,
            });
        } else if raw.starts_with('R') {
            let cols: Vec<&str> = raw.split('\t').collect();
            if cols.len() != 2 {
                return Err(malformed(
                    line_no,
                    format!("expected 2 tab-separated columns, found {}", cols.len()),
                ));
            }
            let id = cols[0].to_string();
            let mut parts = cols[1].split_whitespace();
            let label = parts
                .next()
                .ok_or_else(|| malformed(line_no, "missing relation type".into()))?
                .to_string();
            let kind = aliases.resolve(&label).ok_or_else(|| {
                malformed(
                    line_no,
                    format!("unknown relation type {label:?}; extend the alias table"),
                )
            })?;
            let mut arg_names = Vec::new();
            let mut arg_ids = Vec::new();
            for arg in parts {
                let (name, value) = arg.split_once(':').ok_or_else(|| {
                    malformed(line_no, format!("argument {arg:?} is not name:id"))
                })?;
                arg_names.push(name.to_string());
                arg_ids.push(value.to_string());
            }
            if arg_ids.len() < 2 {
                return Err(malformed(
                    line_no,
                    format!("relation needs at least two arguments, found {}", arg_ids.len()),
                ));
            }
            let source = arg_ids.remove(0);
            relations.push(RelationEdge {
                id,
                kind,
                label,
                source,
                targets: arg_ids,
                arg_names,
                line_no,
            });
        } else {
            opaque.push(OpaqueRecord {
                raw: raw.to_string(),
                line_no,
            });
        }
    }

    let declared: HashSet<&str> = markables.iter().map(|m| m.id.as_str()).collect();
    for rel in &relations {
        for target in std::iter::once(&rel.source).chain(rel.targets.iter()) {
            if !declared.contains(target.as_str()) {
                return Err(Error::DanglingReference {
                    file: doc_id.to_string(),
                    id: rel.id.clone(),
                    target: target.clone(),
                });
            }
        }
    }

    Ok(RawDocument {
        doc_id: doc_id.to_string(),
        lines: split_lines(txt_text),
        markables,
        relations,
        opaque,
        charmap,
        text: txt_text.to_string(),
    })
}

fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// A defect in the relation graph. Findings are data, not failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationFinding {
    SelfReference { relation: String },
    Dangling { relation: String, target: String },
    Duplicate { relation: String, duplicate_of: String },
}

impl fmt::Display for RelationFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationFinding::SelfReference { relation } => {
                write!(f, "relation {relation} refers to its own source markable")
            }
            RelationFinding::Dangling { relation, target } => {
                write!(f, "relation {relation} references undeclared markable {target}")
            }
            RelationFinding::Duplicate {
                relation,
                duplicate_of,
            } => write!(f, "relation {relation} duplicates {duplicate_of}"),
        }
    }
}

/// Check the relation graph for self-references, dangling references and
/// duplicate edges. An empty result means the graph is clean.
pub fn validate_relations(doc: &RawDocument) -> Vec<RelationFinding> {
    let declared: HashSet<&str> = doc.markables.iter().map(|m| m.id.as_str()).collect();
    let mut findings = Vec::new();
    let mut seen: HashMap<(RelationKind, &str, Vec<&str>), &str> = HashMap::new();

    for rel in &doc.relations {
        if rel.targets.contains(&rel.source) {
            findings.push(RelationFinding::SelfReference {
                relation: rel.id.clone(),
            });
        }
        for target in std::iter::once(&rel.source).chain(rel.targets.iter()) {
            if !declared.contains(target.as_str()) {
                findings.push(RelationFinding::Dangling {
                    relation: rel.id.clone(),
                    target: target.clone(),
                });
            }
        }
        let mut targets: Vec<&str> = rel.targets.iter().map(|t| t.as_str()).collect();
        targets.sort_unstable();
        match seen.entry((rel.kind, rel.source.as_str(), targets)) {
            std::collections::hash_map::Entry::Occupied(first) => {
                findings.push(RelationFinding::Duplicate {
                    relation: rel.id.clone(),
                    duplicate_of: first.get().to_string(),
                });
            }
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(&rel.id);
            }
        }
    }
    findings
}
