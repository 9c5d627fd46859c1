//! Shared test fixtures: a synthetic mini corpus with annotation pairs,
//! treebank splits, and an entity-enriched treebank variant.
//!
//! The corpus is deterministic and designed to align with zero loss unless
//! a variant flag removes material. Document doc09's last sentence is the
//! designated victim for loss-accounting tests: removing it costs exactly
//! one sentence, four tokens, one markable, one mention and one bridging
//! cluster.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

struct Markable {
    id: &'static str,
    line: usize,
    tokens: (usize, usize),
    second_fragment: Option<(usize, usize)>,
}

struct DocSpec {
    id: &'static str,
    split: &'static str,
    lines: &'static [&'static str],
    markables: &'static [Markable],
    relations: &'static [&'static str],
}

const fn m(id: &'static str, line: usize, from: usize, to: usize) -> Markable {
    Markable {
        id,
        line,
        tokens: (from, to),
        second_fragment: None,
    }
}

const DOCS: &[DocSpec] = &[
    DocSpec {
        id: "doc01",
        split: "train",
        lines: &["Per kom til Oslo .", "Han likte byen ."],
        markables: &[m("T1", 0, 0, 0), m("T2", 0, 3, 3), m("T3", 1, 0, 0), m("T4", 1, 2, 2)],
        relations: &["R1\tAnaphoric Arg1:T3 Arg2:T1", "R2\tAnaphoric Arg1:T4 Arg2:T2"],
    },
    DocSpec {
        id: "doc02",
        split: "train",
        lines: &["Kari og Ola kom hjem .", "De var trette ."],
        markables: &[m("T1", 0, 0, 0), m("T2", 0, 2, 2), m("T3", 1, 0, 0)],
        relations: &[
            "R1\tSplit_antecedent Arg1:T3 Arg2:T1",
            "R2\tSplit_antecedent Arg1:T3 Arg2:T2",
        ],
    },
    DocSpec {
        id: "doc03",
        split: "train",
        lines: &["Båten lå ved kaia .", "Motoren var ny ."],
        markables: &[m("T1", 0, 0, 0), m("T2", 0, 3, 3), m("T3", 1, 0, 0)],
        relations: &["R1\tBridging Arg1:T3 Arg2:T1"],
    },
    DocSpec {
        id: "doc04",
        split: "train",
        lines: &["Hvem er der ?", "Elling .", "Hva vil du ?", "Elling ."],
        markables: &[m("T1", 1, 0, 0), m("T2", 3, 0, 0)],
        relations: &["R1\tAnaphoric Arg1:T2 Arg2:T1"],
    },
    DocSpec {
        id: "doc05",
        split: "train",
        lines: &["Den gamle mannen smilte .", "Han var glad ."],
        markables: &[m("T1", 0, 0, 2), m("T2", 0, 2, 2), m("T3", 1, 0, 0)],
        relations: &["R1\tAnaphoric Arg1:T3 Arg2:T1"],
    },
    DocSpec {
        id: "doc06",
        split: "train",
        lines: &["Huset ble malt rødt og pent .", "Det så fint ut ."],
        markables: &[
            Markable {
                id: "T1",
                line: 0,
                tokens: (0, 0),
                second_fragment: Some((3, 3)),
            },
            m("T2", 1, 0, 0),
        ],
        relations: &["R1\tAnaphoric Arg1:T2 Arg2:T1"],
    },
    DocSpec {
        id: "doc07",
        split: "test",
        lines: &["Regnet falt i Bergen .", "Folk ble våte ."],
        markables: &[m("T1", 0, 3, 3), m("T2", 1, 0, 0)],
        relations: &[],
    },
    DocSpec {
        id: "doc08",
        split: "test",
        lines: &["Katten sov på matten .", "Den drømte søtt ."],
        markables: &[m("T1", 0, 0, 0), m("T2", 0, 3, 3), m("T3", 1, 0, 0)],
        relations: &["R1\tAnaphoric Arg1:T3 Arg2:T1"],
    },
    DocSpec {
        id: "doc09",
        split: "dev",
        lines: &[
            "Mannen kom hjem .",
            "Han hilste på hunden .",
            "Halen logret veldig .",
        ],
        markables: &[m("T1", 0, 0, 0), m("T2", 1, 0, 0), m("T3", 1, 3, 3), m("T4", 2, 0, 0)],
        relations: &["R1\tAnaphoric Arg1:T2 Arg2:T1", "R2\tBridging Arg1:T4 Arg2:T3"],
    },
    DocSpec {
        id: "doc10",
        split: "dev",
        lines: &["Sola skinte i Oslo .", "Det ble varmt ."],
        markables: &[m("T1", 0, 0, 0), m("T2", 0, 3, 3), m("T3", 1, 0, 0)],
        relations: &["R1\tAnaphoric Arg1:T3 Arg2:T1"],
    },
];

/// The overlap document: first line lands in test, second in dev.
const OVERLAP_DOC: DocSpec = DocSpec {
    id: "doc11",
    split: "overlap",
    lines: &["Første del av teksten her .", "Andre del av teksten her ."],
    markables: &[m("T1", 0, 0, 1), m("T2", 1, 0, 1)],
    relations: &["R1\tAnaphoric Arg1:T2 Arg2:T1"],
};

/// The sentence removed by the loss variant.
pub const VICTIM_SENTENCE: &str = "Halen logret veldig .";

fn entity_label(token: &str) -> Option<&'static str> {
    match token {
        "Per" | "Kari" | "Ola" | "Elling" => Some("PER"),
        "Oslo" | "Bergen" => Some("GPE_LOC"),
        _ => None,
    }
}

fn char_span(line: &str, tokens: (usize, usize)) -> (usize, usize) {
    let mut offsets = Vec::new();
    let mut pos = 0usize;
    for token in line.split(' ') {
        let len = token.chars().count();
        offsets.push((pos, pos + len));
        pos += len + 1;
    }
    (offsets[tokens.0].0, offsets[tokens.1].1)
}

fn ann_of(doc: &DocSpec) -> String {
    let mut line_starts = Vec::new();
    let mut pos = 0usize;
    for line in doc.lines {
        line_starts.push(pos);
        pos += line.chars().count() + 1;
    }
    let mut out = String::new();
    for markable in doc.markables {
        let line = doc.lines[markable.line];
        let base = line_starts[markable.line];
        let (s1, e1) = char_span(line, markable.tokens);
        let chars: Vec<char> = line.chars().collect();
        let piece = |s: usize, e: usize| chars[s..e].iter().collect::<String>();
        match markable.second_fragment {
            None => {
                let _ = writeln!(
                    out,
                    "{}\tMarkable {} {}\t{}",
                    markable.id,
                    base + s1,
                    base + e1,
                    piece(s1, e1)
                );
            }
            Some(second) => {
                let (s2, e2) = char_span(line, second);
                let _ = writeln!(
                    out,
                    "{}\tMarkable {} {};{} {}\t{} {}",
                    markable.id,
                    base + s1,
                    base + e1,
                    base + s2,
                    base + e2,
                    piece(s1, e1),
                    piece(s2, e2)
                );
            }
        }
    }
    for relation in doc.relations {
        out.push_str(relation);
        out.push('\n');
    }
    out
}

fn no_space_before(token: &str) -> bool {
    matches!(token, "." | "," | "!" | "?" | ":" | ";")
}

/// Render one sentence with sent_id/text comments, SpaceAfter handling, and
/// optional entity labels.
fn conllu_sentence(sent_id: &str, line: &str, with_names: bool) -> String {
    let tokens: Vec<&str> = line.split(' ').collect();
    let mut text = String::new();
    for (i, token) in tokens.iter().enumerate() {
        text.push_str(token);
        let glue = tokens.get(i + 1).map(|next| no_space_before(next)) == Some(true);
        if i + 1 < tokens.len() && !glue {
            text.push(' ');
        }
    }
    let mut out = format!("# sent_id = {sent_id}\n# text = {text}\n");
    for (i, token) in tokens.iter().enumerate() {
        let mut misc_items = Vec::new();
        if tokens.get(i + 1).map(|next| no_space_before(next)) == Some(true) {
            misc_items.push("SpaceAfter=No".to_string());
        }
        if with_names {
            let label = entity_label(token).unwrap_or("O");
            misc_items.push(format!("name={label}"));
        }
        let misc = if misc_items.is_empty() {
            "_".to_string()
        } else {
            misc_items.join("|")
        };
        let _ = writeln!(
            out,
            "{}\t{}\t_\t_\t_\t_\t_\t_\t_\t{}",
            i + 1,
            token,
            misc
        );
    }
    out.push('\n');
    out
}

/// Builder for the on-disk corpus.
#[derive(Debug, Clone, Copy, Default)]
pub struct MiniCorpus {
    /// Add a document whose halves land in the test and dev splits.
    pub include_overlap_doc: bool,
    /// Remove doc09's third sentence from the treebank (the loss scenario).
    pub remove_victim_sentence: bool,
    /// Skip the entity-enriched treebank (and its config section).
    pub without_norne: bool,
}

pub struct MiniPaths {
    pub root: PathBuf,
    pub docs: PathBuf,
    pub ud: PathBuf,
    pub norne: Option<PathBuf>,
    pub out: PathBuf,
    pub config: PathBuf,
}

impl MiniCorpus {
    pub fn write(&self, root: &Path) -> MiniPaths {
        let docs_dir = root.join("docs");
        let ud_dir = root.join("ud");
        let norne_dir = root.join("norne");
        std::fs::create_dir_all(&docs_dir).unwrap();
        std::fs::create_dir_all(&ud_dir).unwrap();
        if !self.without_norne {
            std::fs::create_dir_all(&norne_dir).unwrap();
        }

        let mut docs: Vec<&DocSpec> = DOCS.iter().collect();
        if self.include_overlap_doc {
            docs.push(&OVERLAP_DOC);
        }

        for doc in &docs {
            let mut text = String::new();
            for line in doc.lines {
                text.push_str(line);
                text.push('\n');
            }
            std::fs::write(docs_dir.join(format!("{}.txt", doc.id)), &text).unwrap();
            std::fs::write(docs_dir.join(format!("{}.ann", doc.id)), ann_of(doc)).unwrap();
        }

        // treebank sentences per split: doc blocks in order with unique
        // filler sentences between them
        let mut split_lines: Vec<(&str, Vec<String>)> =
            vec![("train", Vec::new()), ("test", Vec::new()), ("dev", Vec::new())];
        let mut push = |split: &str, line: String| {
            split_lines
                .iter_mut()
                .find(|(s, _)| *s == split)
                .unwrap()
                .1
                .push(line);
        };
        let mut filler = 0usize;
        for doc in &docs {
            if doc.split == "overlap" {
                push("test", doc.lines[0].to_string());
                push("dev", doc.lines[1].to_string());
                continue;
            }
            for line in doc.lines {
                if self.remove_victim_sentence && *line == VICTIM_SENTENCE {
                    continue;
                }
                push(doc.split, line.to_string());
            }
            filler += 1;
            push(doc.split, format!("Dette er fyllsetning nummer {filler} ."));
        }

        for (split, lines) in &split_lines {
            let prefix = &split[..2];
            let mut ud = String::new();
            let mut norne = String::new();
            for (i, line) in lines.iter().enumerate() {
                let sent_id = format!("{prefix}{:04}", i + 1);
                ud.push_str(&conllu_sentence(&sent_id, line, false));
                norne.push_str(&conllu_sentence(&sent_id, line, true));
            }
            std::fs::write(ud_dir.join(format!("{split}.conllu")), ud).unwrap();
            if !self.without_norne {
                std::fs::write(norne_dir.join(format!("{split}.conllu")), norne).unwrap();
            }
        }

        let out = root.join("out");
        let mut config = format!(
            "[output]\ndir = {:?}\n\n[options]\nworkers = 1\n\n[[treebank]]\nname = \"mini\"\ndocs = {:?}\n[treebank.splits]\ntrain = {:?}\ntest = {:?}\ndev = {:?}\n",
            out.display().to_string(),
            docs_dir.display().to_string(),
            ud_dir.join("train.conllu").display().to_string(),
            ud_dir.join("test.conllu").display().to_string(),
            ud_dir.join("dev.conllu").display().to_string(),
        );
        if !self.without_norne {
            let _ = write!(
                config,
                "[treebank.norne]\ntrain = {:?}\ntest = {:?}\ndev = {:?}\n",
                norne_dir.join("train.conllu").display().to_string(),
                norne_dir.join("test.conllu").display().to_string(),
                norne_dir.join("dev.conllu").display().to_string(),
            );
        }
        let config_path = root.join("corefalign.toml");
        std::fs::write(&config_path, config).unwrap();

        MiniPaths {
            root: root.to_path_buf(),
            docs: docs_dir,
            ud: ud_dir,
            norne: (!self.without_norne).then_some(norne_dir),
            out,
            config: config_path,
        }
    }
}

/// Path to a shipped fixture file.
pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}
