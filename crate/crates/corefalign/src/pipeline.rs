//! The convert → merge-entities → align → report pipeline.
//!
//! Each stage is a standalone function over explicit paths, so the CLI can
//! run one stage at a time; [`run`] composes them and writes identical
//! artifacts. All outputs are deterministic: documents are processed in
//! doc_id order regardless of the worker count, and nothing timestamped is
//! written.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::align::{
    align_document, report, AlignOptions, AlignedDocument, DocOutcome, Split, TreebankIndex,
    TreebankReport,
};
use crate::brat::{parse_ann_with, validate_relations, RelationAliases, RelationFinding};
use crate::clusters::build_clusters;
use crate::config::{Config, Options, SplitPaths};
use crate::conllu::{parse_conllu, split_documents, write_conllu, ConlluSentence};
use crate::entity::{validate_level6, Level6Finding};
use crate::error::{Error, Result};
use crate::ne::{extract_entities, place_entities};
use crate::record::{read_records, write_record, CorefDocument};
use crate::spans::{char_to_word, correct_pipe_spans, tokenize_lines};
use crate::stats::{count_document, count_documents, Counts};

/// Run a closure on a rayon pool with the requested worker count
/// (0 = one thread per core).
pub fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool construction");
    pool.install(f)
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// convert
// ---------------------------------------------------------------------------

/// What happened while converting one document.
#[derive(Debug, Clone, Default)]
pub struct DocConvertReport {
    pub pipe_fragments: usize,
    pub snapped_fragments: usize,
    pub dropped_mentions: usize,
    pub findings: Vec<String>,
}

/// Convert one `.ann`/`.txt` pair into a document record.
///
/// Relation-graph defects (self-references, duplicates) are dropped with
/// findings rather than aborting; genuinely malformed annotations error.
pub fn convert_document(
    ann_text: &str,
    txt_text: &str,
    doc_id: &str,
    aliases: &RelationAliases,
) -> Result<(CorefDocument, DocConvertReport)> {
    let mut report = DocConvertReport::default();
    let mut doc = parse_ann_with(ann_text, txt_text, doc_id, aliases)?;

    let findings = validate_relations(&doc);
    if !findings.is_empty() {
        let bad: Vec<String> = findings
            .iter()
            .map(|f| match f {
                RelationFinding::SelfReference { relation }
                | RelationFinding::Dangling { relation, .. }
                | RelationFinding::Duplicate { relation, .. } => relation.clone(),
            })
            .collect();
        for finding in &findings {
            report.findings.push(format!("relation dropped: {finding}"));
        }
        doc.relations.retain(|r| !bad.contains(&r.id));
    }

    let (doc, pipe) = correct_pipe_spans(doc);
    report.pipe_fragments = pipe.corrected;
    for (id, fragment) in &pipe.flagged {
        report
            .findings
            .push(format!("markable {id} fragment {fragment} contains an uncorrected pipe"));
    }

    let table = tokenize_lines(&doc);
    for line in &table.irregular_lines {
        report
            .findings
            .push(format!("line {line} does not reconstruct from its tokens"));
    }

    let mut spans = BTreeMap::new();
    for markable in &doc.markables {
        match char_to_word(markable, &table) {
            Ok((word_spans, snaps)) => {
                report.snapped_fragments += snaps.len();
                for snap in snaps {
                    report.findings.push(snap.to_string());
                }
                spans.insert(markable.id.clone(), word_spans);
            }
            Err(Error::CrossLineFragment { id, start, end }) => {
                report.dropped_mentions += 1;
                report.findings.push(format!(
                    "markable {id} dropped: fragment [{start},{end}) crosses a line boundary"
                ));
            }
            Err(other) => return Err(other),
        }
    }

    let clusters = build_clusters(&doc)?;
    let record = crate::record::assemble(&doc, &table, &clusters, &spans)?;
    Ok((record, report))
}

/// Outcome of the conversion stage over one document directory.
#[derive(Debug, Clone, Default)]
pub struct ConvertSummary {
    pub documents: usize,
    pub records_written: usize,
    pub pipe_fragments: usize,
    pub pipe_documents: usize,
    pub snapped_fragments: usize,
    pub dropped_mentions: usize,
    /// (doc_id, error) pairs; these documents produced no record.
    pub errors: Vec<(String, String)>,
    pub warnings: Vec<String>,
    pub findings: Vec<String>,
}

const CONVERT_LOG: &str = "_convert.tsv";

/// Convert every `.ann`/`.txt` pair under `docs_dir` into one record file
/// per document under `records_dir`, plus a `_convert.tsv` stage log.
pub fn convert_stage(
    docs_dir: &Path,
    records_dir: &Path,
    aliases: &RelationAliases,
) -> Result<ConvertSummary> {
    let mut summary = ConvertSummary::default();

    let mut pairs: Vec<(String, PathBuf, PathBuf)> = Vec::new();
    let entries = std::fs::read_dir(docs_dir).map_err(|e| Error::io(docs_dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(docs_dir, e))?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) != Some("ann") {
            continue;
        }
        let doc_id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        let txt = path.with_extension("txt");
        if txt.is_file() {
            pairs.push((doc_id, path, txt));
        } else {
            summary
                .errors
                .push((doc_id, format!("no companion .txt for {}", path.display())));
        }
    }
    pairs.sort();
    summary.documents = pairs.len();
    if pairs.is_empty() {
        summary
            .warnings
            .push(format!("no .ann/.txt pairs under {}", docs_dir.display()));
    }

    let converted: Vec<(String, Result<(CorefDocument, DocConvertReport)>)> = pairs
        .par_iter()
        .map(|(doc_id, ann, txt)| {
            let result = (|| {
                let ann_text = read_file(ann)?;
                let txt_text = read_file(txt)?;
                convert_document(&ann_text, &txt_text, doc_id, aliases)
            })();
            (doc_id.clone(), result)
        })
        .collect();

    std::fs::create_dir_all(records_dir).map_err(|e| Error::io(records_dir, e))?;
    let mut log = String::from(
        "doc_id\tsentences\ttokens\tmarkables\tmentions\tpipe_fragments\tsnapped\tdropped_mentions\tfindings\n",
    );
    for (doc_id, result) in converted {
        match result {
            Ok((record, doc_report)) => {
                let counts = count_document(&record);
                log.push_str(&format!(
                    "{doc_id}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                    counts.sentences,
                    counts.tokens,
                    counts.markables,
                    counts.mentions,
                    doc_report.pipe_fragments,
                    doc_report.snapped_fragments,
                    doc_report.dropped_mentions,
                    doc_report.findings.len(),
                ));
                summary.pipe_fragments += doc_report.pipe_fragments;
                if doc_report.pipe_fragments > 0 {
                    summary.pipe_documents += 1;
                }
                summary.snapped_fragments += doc_report.snapped_fragments;
                summary.dropped_mentions += doc_report.dropped_mentions;
                for finding in doc_report.findings {
                    summary.findings.push(format!("{doc_id}: {finding}"));
                }
                let mut line = write_record(&record);
                line.push('\n');
                write_file(&records_dir.join(format!("{doc_id}.jsonl")), &line)?;
                summary.records_written += 1;
            }
            Err(error) => summary.errors.push((doc_id, error.to_string())),
        }
    }
    write_file(&records_dir.join(CONVERT_LOG), &log)?;
    Ok(summary)
}

fn read_convert_log(records_dir: &Path) -> (usize, usize) {
    let Ok(text) = std::fs::read_to_string(records_dir.join(CONVERT_LOG)) else {
        return (0, 0);
    };
    let mut fragments = 0usize;
    let mut documents = 0usize;
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split('\t').collect();
        if let Some(n) = fields.get(5).and_then(|v| v.parse::<usize>().ok()) {
            fragments += n;
            if n > 0 {
                documents += 1;
            }
        }
    }
    (fragments, documents)
}

/// Read every record under a directory, sorted by doc_id.
pub fn read_record_dir(records_dir: &Path) -> Result<Vec<CorefDocument>> {
    let mut files: Vec<PathBuf> = Vec::new();
    let entries = std::fs::read_dir(records_dir).map_err(|e| Error::io(records_dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(records_dir, e))?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) == Some("jsonl") {
            files.push(path);
        }
    }
    files.sort();
    let mut docs = Vec::new();
    for file in files {
        let text = read_file(&file)?;
        docs.extend(read_records(&text)?);
    }
    docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    Ok(docs)
}

// ---------------------------------------------------------------------------
// merge-ne
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Default)]
pub struct MergeNeSummary {
    pub spans_placed: usize,
    pub sentences_annotated: usize,
    pub missing_sentences: usize,
    /// Split files written (enriched, or copied verbatim when the entity
    /// source lacks the split).
    pub files: Vec<PathBuf>,
}

/// Transfer entity annotations from `norne` onto the `ud` split files and
/// write the enriched treebank under `out_dir/<split>.conllu`.
pub fn merge_ne_stage(
    ud: &SplitPaths,
    norne: &SplitPaths,
    out_dir: &Path,
    options: &Options,
) -> Result<(MergeNeSummary, SplitPaths)> {
    let mut summary = MergeNeSummary::default();
    let mut enriched = SplitPaths::default();

    let norne_by_split: BTreeMap<Split, &PathBuf> = norne.iter().collect();
    for (split, ud_path) in ud.iter() {
        let mut sentences = parse_conllu(&read_file(ud_path)?, &ud_path.display().to_string())?;
        if let Some(norne_path) = norne_by_split.get(&split) {
            let source =
                parse_conllu(&read_file(norne_path)?, &norne_path.display().to_string())?;
            let extraction = extract_entities(
                &source,
                &options.ne_key,
                options.ne_bio,
                &norne_path.display().to_string(),
            )?;
            let placement = place_entities(
                &mut sentences,
                &extraction,
                &options.ne_key,
                options.ne_bio,
                options.ne_emit_outside,
            )?;
            summary.spans_placed += placement.spans_placed;
            summary.sentences_annotated += placement.sentences_annotated;
            summary.missing_sentences += placement.missing_sentences.len();
        }
        let out_path = out_dir.join(format!("{}.conllu", split.name()));
        write_file(&out_path, &write_conllu(&sentences))?;
        summary.files.push(out_path.clone());
        match split {
            Split::Train => enriched.train = Some(out_path),
            Split::Test => enriched.test = Some(out_path),
            Split::Dev => enriched.dev = Some(out_path),
        }
    }
    Ok((summary, enriched))
}

// ---------------------------------------------------------------------------
// align
// ---------------------------------------------------------------------------

/// Build a [`TreebankIndex`] from split files.
pub fn load_index(name: &str, splits: &SplitPaths) -> Result<TreebankIndex> {
    let mut index = TreebankIndex::new(name);
    for (split, path) in splits.iter() {
        let file = path.display().to_string();
        let sentences = parse_conllu(&read_file(path)?, &file)?;
        index.add_split(split, sentences, &file)?;
    }
    Ok(index)
}

/// Align every record against the home treebank, write the merged and
/// quarantined outputs plus reports under `out_dir`, and return the report.
pub fn align_stage(
    records_dir: &Path,
    home_name: &str,
    home_splits: &SplitPaths,
    others: &[(String, SplitPaths)],
    out_dir: &Path,
    opts: &AlignOptions,
    options: &Options,
) -> Result<TreebankReport> {
    let records = read_record_dir(records_dir)?;
    let home = load_index(home_name, home_splits)?;
    let mut other_indexes = Vec::new();
    for (name, splits) in others {
        other_indexes.push(load_index(name, splits)?);
    }
    let other_refs: Vec<&TreebankIndex> = other_indexes.iter().collect();

    let mut aligned: Vec<AlignedDocument> = records
        .par_iter()
        .map(|record| align_document(record, &home, &other_refs, opts))
        .collect();
    aligned.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));

    let mut tb_report = TreebankReport::new(home_name);
    let (pipe_fragments, pipe_documents) = read_convert_log(records_dir);
    tb_report.corrections.pipe_fragments = pipe_fragments;
    tb_report.corrections.pipe_documents = pipe_documents;
    tb_report.before = count_documents(records.iter());
    tb_report.after = count_documents(aligned.iter().filter_map(|d| d.aligned.as_ref()));
    for doc in &aligned {
        tb_report.add_document(doc);
    }

    // merged output, grouped by destination
    let mut merged_by_file: BTreeMap<String, Vec<&AlignedDocument>> = BTreeMap::new();
    for doc in &aligned {
        let file = match &doc.outcome {
            DocOutcome::Aligned { split } => format!("{}.conllu", split.name()),
            DocOutcome::Moved { to, split } => format!("moved-to-{to}-{}.conllu", split.name()),
            _ => continue,
        };
        merged_by_file.entry(file).or_default().push(doc);
    }
    let mut entity_spans = 0usize;
    for (file, docs) in &merged_by_file {
        let sentences: Vec<ConlluSentence> = docs
            .iter()
            .flat_map(|d| d.merged.iter().cloned())
            .collect();
        entity_spans += extract_entities(&sentences, &options.ne_key, options.ne_bio, file)
            .map(|e| e.spans.len())
            .unwrap_or(0);
        write_file(&out_dir.join("merged").join(file), &write_conllu(&sentences))?;
    }
    tb_report.after.entities = entity_spans as u64;

    // quarantine: discarded and unmatched documents, with reasons
    let mut reasons = String::from("doc_id\toutcome\tdetail\n");
    let mut quarantined = 0usize;
    for doc in &aligned {
        if matches!(
            doc.outcome,
            DocOutcome::Aligned { .. } | DocOutcome::Moved { .. }
        ) {
            continue;
        }
        let record = records
            .iter()
            .find(|r| r.doc_id == doc.doc_id)
            .expect("aligned docs come from records");
        let mut line = write_record(record);
        line.push('\n');
        write_file(&out_dir.join("quarantine").join(format!("{}.jsonl", doc.doc_id)), &line)?;
        reasons.push_str(&format!(
            "{}\t{}\t{}\n",
            doc.doc_id,
            doc.outcome.label(),
            doc.findings.join("; ")
        ));
        quarantined += 1;
    }
    if quarantined > 0 {
        write_file(&out_dir.join("quarantine").join("reasons.tsv"), &reasons)?;
    }

    write_file(
        &out_dir.join("report").join("alignment.tsv"),
        &tb_report.outcome_table_tsv(),
    )?;
    write_file(
        &out_dir.join("report").join("loss.tsv"),
        &report::loss_table_tsv(std::slice::from_ref(&tb_report)),
    )?;
    write_file(
        &out_dir.join("report").join("summary.txt"),
        &report::summary_text(&tb_report),
    )?;
    write_file(
        &out_dir.join("stats").join("counts.tsv"),
        &crate::stats::counts_tsv(&[
            ("converted".to_string(), tb_report.before),
            ("aligned".to_string(), tb_report.after),
        ]),
    )?;
    let per_doc: Vec<(String, Counts)> = records
        .iter()
        .map(|r| (r.doc_id.clone(), count_document(r)))
        .collect();
    write_file(
        &out_dir.join("stats").join("per_doc.tsv"),
        &crate::stats::counts_tsv(&per_doc),
    )?;

    Ok(tb_report)
}

// ---------------------------------------------------------------------------
// stats / validate
// ---------------------------------------------------------------------------

/// Counts over a record directory: total plus per-document rows.
pub fn stats_records(records_dir: &Path) -> Result<(Counts, Vec<(String, Counts)>)> {
    let docs = read_record_dir(records_dir)?;
    let per_doc: Vec<(String, Counts)> = docs
        .iter()
        .map(|d| (d.doc_id.clone(), count_document(d)))
        .collect();
    Ok((count_documents(docs.iter()), per_doc))
}

/// Counts over CoNLL-U files (documents split at `# newdoc id`).
pub fn stats_conllu(
    files: &[PathBuf],
    options: &Options,
) -> Result<(Counts, Vec<(String, Counts)>)> {
    let mut total = Counts::default();
    let mut per_doc = Vec::new();
    for file in files {
        let name = file.display().to_string();
        let sentences = parse_conllu(&read_file(file)?, &name)?;
        for (doc_id, slice) in split_documents(&sentences) {
            let label = if doc_id == "<nodoc>" {
                file.file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("file")
                    .to_string()
            } else {
                doc_id
            };
            let counts = crate::stats::count_conllu_document(
                slice,
                &label,
                &options.ne_key,
                options.ne_bio,
            )?;
            total += counts;
            per_doc.push((label, counts));
        }
    }
    Ok((total, per_doc))
}

/// Entity-ordering validation over CoNLL-U files; findings are tagged with
/// the file they came from.
pub fn validate_files(files: &[PathBuf]) -> Result<Vec<(String, Level6Finding)>> {
    let mut findings = Vec::new();
    for file in files {
        let name = file.display().to_string();
        let sentences = parse_conllu(&read_file(file)?, &name)?;
        for (_, slice) in split_documents(&sentences) {
            for finding in validate_level6(slice) {
                findings.push((name.clone(), finding));
            }
        }
    }
    Ok(findings)
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

/// Everything a finished run reports.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub convert: Vec<(String, ConvertSummary)>,
    pub merge_ne: Vec<(String, MergeNeSummary)>,
    pub reports: Vec<TreebankReport>,
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl RunSummary {
    /// Findings that strict mode turns into a nonzero exit: quarantined
    /// documents or per-document findings.
    pub fn has_findings(&self) -> bool {
        self.reports.iter().any(|r| {
            !r.findings.is_empty()
                || r.outcome_counts.get("discarded").copied().unwrap_or(0) > 0
                || r.outcome_counts.get("unmatched").copied().unwrap_or(0) > 0
        }) || self.convert.iter().any(|(_, c)| !c.findings.is_empty())
    }

    pub fn has_errors(&self) -> bool {
        !self.errors.is_empty()
    }
}

/// Run the whole pipeline for every configured treebank.
pub fn run(config: &Config) -> Result<RunSummary> {
    let mut summary = RunSummary {
        output_dir: config.output.dir.clone(),
        ..RunSummary::default()
    };
    let aliases = config.relation_aliases();
    let align_opts = config.align_options();
    let out = &config.output.dir;

    // convert every treebank's documents
    for tb in &config.treebanks {
        let records_dir = out.join(&tb.name).join("records");
        let converted = convert_stage(&tb.docs, &records_dir, &aliases)
            .map_err(|e| e.in_stage("convert"))?;
        for (doc, error) in &converted.errors {
            summary.errors.push(format!("convert {doc}: {error}"));
        }
        summary.warnings.extend(converted.warnings.iter().cloned());
        summary.convert.push((tb.name.clone(), converted));
    }

    // enrich with named entities where a source is configured
    let mut effective_splits: BTreeMap<String, SplitPaths> = BTreeMap::new();
    for tb in &config.treebanks {
        let splits = match &tb.norne {
            Some(norne) => {
                let enriched_dir = out.join(&tb.name).join("enriched");
                let (merged, enriched) =
                    merge_ne_stage(&tb.splits, norne, &enriched_dir, &config.options)
                        .map_err(|e| e.in_stage("merge-ne"))?;
                summary.merge_ne.push((tb.name.clone(), merged));
                enriched
            }
            None => tb.splits.clone(),
        };
        effective_splits.insert(tb.name.clone(), splits);
    }

    // align each treebank, with the others available for fallback
    for tb in &config.treebanks {
        let records_dir = out.join(&tb.name).join("records");
        let others: Vec<(String, SplitPaths)> = config
            .treebanks
            .iter()
            .filter(|other| other.name != tb.name)
            .map(|other| (other.name.clone(), effective_splits[&other.name].clone()))
            .collect();
        let report = align_stage(
            &records_dir,
            &tb.name,
            &effective_splits[&tb.name],
            &others,
            &out.join(&tb.name),
            &align_opts,
            &config.options,
        )
        .map_err(|e| e.in_stage("align"))?;
        summary.reports.push(report);
    }

    // combined report
    write_file(
        &out.join("report").join("loss.tsv"),
        &report::loss_table_tsv(&summary.reports),
    )?;
    write_file(
        &out.join("report").join("loss.txt"),
        &report::loss_table_text(&summary.reports),
    )?;
    let mut combined = String::new();
    for tb_report in &summary.reports {
        combined.push_str(&report::summary_text(tb_report));
        combined.push('\n');
    }
    write_file(&out.join("report").join("summary.txt"), &combined)?;

    Ok(summary)
}
