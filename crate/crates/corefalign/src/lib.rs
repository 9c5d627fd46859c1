//! Convert BRAT standoff coreference annotations to CoNLL-U, align the
//! converted documents with Universal Dependencies treebanks, merge named
//! entities from an enriched treebank, and audit the whole merge.
//!
//! The library is organized along the pipeline:
//!
//! - [`brat`] parses `.ann`/`.txt` pairs into markables and relations
//! - [`clusters`] builds identity clusters and cross-cluster links
//! - [`spans`] corrects pipe-damaged spans and maps characters to words
//! - [`record`] holds the per-document intermediate record (JSON lines)
//! - [`conllu`] reads and writes CoNLL-U byte-faithfully
//! - [`entity`] encodes/decodes `Entity`, `Bridge` and `SplitAnte` in MISC
//!   and checks the entity-ordering rules
//! - [`assignment`] solves the linear assignment problem exactly
//! - [`align`] matches documents against treebank splits, resolves
//!   duplicate sentences, detects data-split overlaps
//! - [`ne`] transfers named-entity annotations between treebank versions
//! - [`stats`] counts markables, mentions and link clusters, and renders
//!   loss tables
//! - [`pipeline`] composes the stages behind the `corefalign` binary
//!
//! ## Start with the examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --example parse_brat          # standoff parsing + validation
//! cargo run --example convert_document    # .ann/.txt -> word-indexed record
//! cargo run --example encode_misc         # Entity/Bridge/SplitAnte encoding
//! cargo run --example solve_assignment    # the assignment solver alone
//! cargo run --example align_corpus        # matching + disambiguation
//! cargo run --example merge_entities      # named-entity transfer
//! cargo run --example corpus_statistics   # counts and loss tables
//! cargo run --example validate_entities   # entity-ordering checks
//! cargo run --example full_pipeline       # everything, end to end
//! ```
//!
//! ## A document in five lines
//!
//! ```
//! use corefalign::brat::RelationAliases;
//! use corefalign::pipeline::convert_document;
//!
//! let txt = "Per kom hjem .\nHan smilte .\n";
//! let ann = "T1\tMarkable 0 3\tPer\nT2\tMarkable 15 18\tHan\nR1\tAnaphoric Arg1:T2 Arg2:T1\n";
//! let (record, _) = convert_document(ann, txt, "demo", &RelationAliases::default())?;
//! assert_eq!(record.cluster_count(), 1);
//! assert_eq!(record.mentions.len(), 2);
//! # corefalign::Result::Ok(())
//! ```

pub mod align;
pub mod assignment;
pub mod brat;
pub mod clusters;
pub mod config;
pub mod conllu;
pub mod entity;
pub mod error;
pub mod ne;
pub mod pipeline;
pub mod record;
pub mod spans;
pub mod stats;
pub mod text;

pub use error::{Error, Result};
