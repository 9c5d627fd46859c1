use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use corefalign::align::report;
use corefalign::brat::RelationAliases;
use corefalign::config::{Config, Options, CONFIG_ENV};
use corefalign::pipeline;
use corefalign::stats::counts_tsv;

/// Convert BRAT coreference annotations to CoNLL-U, align them with UD
/// treebanks, merge named entities, and audit the result.
#[derive(Parser)]
#[command(name = "corefalign", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// Configuration file (or set COREFALIGN_CONFIG).
    #[arg(long, env = CONFIG_ENV)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full convert -> merge-ne -> align -> report pipeline.
    Run {
        #[command(flatten)]
        config: ConfigArg,
        /// Exit nonzero on findings (quarantined documents, losses), not
        /// just errors.
        #[arg(long)]
        strict: bool,
        /// Worker threads for document-level parallelism (0 = all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Convert .ann/.txt pairs into document records.
    Convert {
        /// Directory with the annotation pairs.
        #[arg(long)]
        docs: PathBuf,
        /// Output directory for the record files.
        #[arg(long)]
        out: PathBuf,
        /// Optional config, for the relation alias table.
        #[arg(long, env = CONFIG_ENV)]
        config: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Align converted records with a treebank and write merged CoNLL-U.
    Align {
        /// Directory of record files from `convert`.
        #[arg(long)]
        records: PathBuf,
        /// Treebank name used in reports and output paths.
        #[arg(long, default_value = "treebank")]
        name: String,
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long)]
        dev: Option<PathBuf>,
        /// Output directory (merged/, quarantine/, report/, stats/).
        #[arg(long)]
        out: PathBuf,
        /// Align a treebank from the config instead of explicit paths.
        #[arg(long, env = CONFIG_ENV)]
        config: Option<PathBuf>,
        /// Treebank name to pick from the config (enables fallback against
        /// the other configured treebanks).
        #[arg(long)]
        treebank: Option<String>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Transfer named-entity annotations onto treebank split files.
    MergeNe {
        #[arg(long)]
        ud_train: Option<PathBuf>,
        #[arg(long)]
        ud_test: Option<PathBuf>,
        #[arg(long)]
        ud_dev: Option<PathBuf>,
        #[arg(long)]
        norne_train: Option<PathBuf>,
        #[arg(long)]
        norne_test: Option<PathBuf>,
        #[arg(long)]
        norne_dev: Option<PathBuf>,
        /// Output directory for the enriched split files.
        #[arg(long)]
        out: PathBuf,
        /// MISC key carrying the entity labels.
        #[arg(long, default_value = "name")]
        key: String,
        /// Labels use B-/I- prefixes.
        #[arg(long)]
        bio: bool,
    },
    /// Count corpus statistics over records and/or CoNLL-U files.
    Stats {
        /// Record directory (the "before" side when both are given).
        #[arg(long)]
        records: Option<PathBuf>,
        /// CoNLL-U files (the "after" side when both are given).
        #[arg(long)]
        conllu: Vec<PathBuf>,
        /// Also print one row per document.
        #[arg(long)]
        per_doc: bool,
        #[arg(long, default_value = "name")]
        ne_key: String,
        #[arg(long)]
        ne_bio: bool,
    },
    /// Check entity ordering (bracket balance, opening order, link
    /// references) in CoNLL-U files.
    Validate {
        conllu: Vec<PathBuf>,
        /// Exit nonzero when findings exist.
        #[arg(long)]
        strict: bool,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> corefalign::Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            strict,
            workers,
        } => {
            let mut config = Config::load(&config.config)?;
            if strict {
                config.options.strict = true;
            }
            if let Some(workers) = workers {
                config.options.workers = workers;
            }
            let summary =
                pipeline::with_pool(config.options.workers, || pipeline::run(&config))?;

            for warning in &summary.warnings {
                eprintln!("warning: {warning}");
            }
            for error in &summary.errors {
                eprintln!("error: {error}");
            }
            for tb_report in &summary.reports {
                eprint!("{}", report::summary_text(tb_report));
            }
            eprintln!("artifacts written to {}", summary.output_dir.display());

            if summary.has_errors() || (config.options.strict && summary.has_findings()) {
                Ok(ExitCode::FAILURE)
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Convert {
            docs,
            out,
            config,
            workers,
        } => {
            let aliases = match &config {
                Some(path) => Config::load(path)?.relation_aliases(),
                None => RelationAliases::default(),
            };
            let summary = pipeline::with_pool(workers.unwrap_or(0), || {
                pipeline::convert_stage(&docs, &out, &aliases)
            })?;
            for warning in &summary.warnings {
                eprintln!("warning: {warning}");
            }
            for (doc, error) in &summary.errors {
                eprintln!("error: convert {doc}: {error}");
            }
            eprintln!(
                "converted {} of {} documents ({} pipe spans in {} documents, {} snapped, {} dropped mentions)",
                summary.records_written,
                summary.documents,
                summary.pipe_fragments,
                summary.pipe_documents,
                summary.snapped_fragments,
                summary.dropped_mentions
            );
            Ok(if summary.errors.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Align {
            records,
            name,
            train,
            test,
            dev,
            out,
            config,
            treebank,
            workers,
        } => {
            let (home_name, home_splits, others, align_opts, options) =
                match (&config, &treebank) {
                    (Some(path), Some(tb_name)) => {
                        let config = Config::load(path)?;
                        let tb = config
                            .treebanks
                            .iter()
                            .find(|t| &t.name == tb_name)
                            .ok_or_else(|| {
                                corefalign::Error::Config(format!(
                                    "treebank {tb_name:?} not in config"
                                ))
                            })?;
                        let others: Vec<(String, corefalign::config::SplitPaths)> = config
                            .treebanks
                            .iter()
                            .filter(|t| t.name != *tb_name)
                            .map(|t| (t.name.clone(), t.splits.clone()))
                            .collect();
                        (
                            tb.name.clone(),
                            tb.splits.clone(),
                            others,
                            config.align_options(),
                            config.options.clone(),
                        )
                    }
                    _ => {
                        let splits = corefalign::config::SplitPaths { train, test, dev };
                        if splits.is_empty() {
                            return Err(corefalign::Error::Config(
                                "align needs --train/--test/--dev or --config with --treebank"
                                    .to_string(),
                            ));
                        }
                        (
                            name,
                            splits,
                            Vec::new(),
                            Default::default(),
                            Options::default(),
                        )
                    }
                };
            let tb_report = pipeline::with_pool(workers.unwrap_or(0), || {
                pipeline::align_stage(
                    &records,
                    &home_name,
                    &home_splits,
                    &others,
                    &out,
                    &align_opts,
                    &options,
                )
            })?;
            eprint!("{}", report::summary_text(&tb_report));
            Ok(ExitCode::SUCCESS)
        }
        Command::MergeNe {
            ud_train,
            ud_test,
            ud_dev,
            norne_train,
            norne_test,
            norne_dev,
            out,
            key,
            bio,
        } => {
            let ud = corefalign::config::SplitPaths {
                train: ud_train,
                test: ud_test,
                dev: ud_dev,
            };
            let norne = corefalign::config::SplitPaths {
                train: norne_train,
                test: norne_test,
                dev: norne_dev,
            };
            if ud.is_empty() {
                return Err(corefalign::Error::Config(
                    "merge-ne needs at least one --ud-<split> file".to_string(),
                ));
            }
            let options = Options {
                ne_key: key,
                ne_bio: bio,
                ..Options::default()
            };
            let (summary, _) = pipeline::merge_ne_stage(&ud, &norne, &out, &options)?;
            eprintln!(
                "placed {} spans on {} sentences ({} source sentences missing); wrote {} files",
                summary.spans_placed,
                summary.sentences_annotated,
                summary.missing_sentences,
                summary.files.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats {
            records,
            conllu,
            per_doc,
            ne_key,
            ne_bio,
        } => {
            let options = Options {
                ne_key,
                ne_bio,
                ..Options::default()
            };
            let mut columns = Vec::new();
            let mut per_doc_rows = Vec::new();
            if let Some(records_dir) = &records {
                let (total, docs) = pipeline::stats_records(records_dir)?;
                columns.push(("records".to_string(), total));
                per_doc_rows.push(("records", docs));
            }
            if !conllu.is_empty() {
                let (total, docs) = pipeline::stats_conllu(&conllu, &options)?;
                columns.push(("conllu".to_string(), total));
                per_doc_rows.push(("conllu", docs));
            }
            if columns.is_empty() {
                return Err(corefalign::Error::Config(
                    "stats needs --records and/or --conllu".to_string(),
                ));
            }
            print!("{}", counts_tsv(&columns));
            if columns.len() == 2 {
                println!();
                println!("category\tlost\tpct");
                for row in corefalign::stats::diff(&columns[0].1, &columns[1].1) {
                    println!("{}\t{}\t{}", row.category.name(), row.lost(), row.percent());
                }
            }
            if per_doc {
                for (label, docs) in per_doc_rows {
                    println!();
                    println!("# per-document ({label})");
                    let rows: Vec<(String, corefalign::stats::Counts)> = docs;
                    print!("{}", counts_tsv(&rows));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { conllu, strict } => {
            if conllu.is_empty() {
                return Err(corefalign::Error::Config(
                    "validate needs at least one CoNLL-U file".to_string(),
                ));
            }
            let findings = pipeline::validate_files(&conllu)?;
            for (file, finding) in &findings {
                println!("{file}: {finding}");
            }
            eprintln!("{} finding(s)", findings.len());
            Ok(if findings.is_empty() || !strict {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}
