//! Declarative run configuration.
//!
//! A single TOML file names the input directories, split files and the
//! output directory; every normalization rule is a named setting so the
//! pipeline can be tuned for other corpus pairs without code changes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::align::AlignOptions;
use crate::brat::{RelationAliases, RelationKind};
use crate::error::{Error, Result};

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "COREFALIGN_CONFIG";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub output: OutputConfig,
    #[serde(default)]
    pub options: Options,
    /// Extra relation-type aliases, e.g. `anaphoric = ["ref", "coref"]`.
    /// They extend the built-in table.
    #[serde(default)]
    pub aliases: BTreeMap<String, Vec<String>>,
    #[serde(rename = "treebank")]
    pub treebanks: Vec<TreebankConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    /// Fail the run on findings (split overlaps, losses), not just errors.
    pub strict: bool,
    /// Worker threads for document-level parallelism; 0 = one per core.
    pub workers: usize,
    /// Extra positions around the expected window when fuzzy matching.
    pub fuzzy_window_slack: usize,
    /// Exact-match fraction above which a document belongs to a treebank.
    pub majority_threshold: f64,
    /// MISC key carrying named-entity labels.
    pub ne_key: String,
    /// Entity labels use B-/I- prefixes instead of plain run-length labels.
    pub ne_bio: bool,
    /// Write an explicit `O` item on tokens outside any entity.
    pub ne_emit_outside: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            strict: false,
            workers: 0,
            fuzzy_window_slack: 2,
            majority_threshold: 0.5,
            ne_key: "name".to_string(),
            ne_bio: false,
            ne_emit_outside: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreebankConfig {
    /// Short name used in output paths and the report, e.g. `bm`.
    pub name: String,
    /// Directory holding the `.ann`/`.txt` pairs.
    pub docs: PathBuf,
    pub splits: SplitPaths,
    /// Entity-enriched variant of the same treebank, if available.
    #[serde(default)]
    pub norne: Option<SplitPaths>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitPaths {
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub dev: Option<PathBuf>,
}

impl SplitPaths {
    pub fn iter(&self) -> impl Iterator<Item = (crate::align::Split, &PathBuf)> {
        use crate::align::Split;
        [
            (Split::Train, self.train.as_ref()),
            (Split::Test, self.test.as_ref()),
            (Split::Dev, self.dev.as_ref()),
        ]
        .into_iter()
        .filter_map(|(split, path)| path.map(|p| (split, p)))
    }

    pub fn is_empty(&self) -> bool {
        self.train.is_none() && self.test.is_none() && self.dev.is_none()
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Config> {
        let config: Config =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Config::from_toml(&text)?;
        // paths are relative to the config file
        if let Some(base) = path.parent() {
            config.rebase(base);
        }
        Ok(config)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&p);
            }
        };
        fix(&mut self.output.dir);
        for tb in &mut self.treebanks {
            fix(&mut tb.docs);
            for paths in [Some(&mut tb.splits), tb.norne.as_mut()].into_iter().flatten() {
                for p in [&mut paths.train, &mut paths.test, &mut paths.dev].into_iter().flatten() {
                    fix(p);
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if self.treebanks.is_empty() {
            return Err(Error::Config("no [[treebank]] sections".to_string()));
        }
        let mut names = std::collections::HashSet::new();
        for tb in &self.treebanks {
            if !names.insert(tb.name.as_str()) {
                return Err(Error::Config(format!("duplicate treebank name {:?}", tb.name)));
            }
            if tb.splits.is_empty() {
                return Err(Error::Config(format!(
                    "treebank {:?} declares no split files",
                    tb.name
                )));
            }
        }
        for kind in self.aliases.keys() {
            parse_kind(kind)?;
        }
        Ok(())
    }

    /// Built-in relation alias table extended with the configured entries.
    pub fn relation_aliases(&self) -> RelationAliases {
        let mut aliases = RelationAliases::default();
        for (kind, names) in &self.aliases {
            let kind = parse_kind(kind).expect("validated at load");
            for name in names {
                aliases.insert(name, kind);
            }
        }
        aliases
    }

    pub fn align_options(&self) -> AlignOptions {
        AlignOptions {
            fuzzy_window_slack: self.options.fuzzy_window_slack,
            majority_threshold: self.options.majority_threshold,
        }
    }
}

fn parse_kind(name: &str) -> Result<RelationKind> {
    match name.to_lowercase().as_str() {
        "anaphoric" => Ok(RelationKind::Anaphoric),
        "cataphoric" => Ok(RelationKind::Cataphoric),
        "bridging" => Ok(RelationKind::Bridging),
        "split_antecedent" | "split-antecedent" | "splitante" => Ok(RelationKind::SplitAntecedent),
        other => Err(Error::Config(format!(
            "unknown relation kind {other:?} in [aliases]; expected anaphoric, cataphoric, bridging or split_antecedent"
        ))),
    }
}
