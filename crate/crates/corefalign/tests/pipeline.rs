//! Pipeline-level integration: stage composition, determinism, quarantine
//! behaviour, statistics consistency, and the CLI surface.

mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use corefalign::config::{Config, Options};
use corefalign::conllu::{parse_conllu, split_documents};
use corefalign::pipeline::{
    align_stage, convert_stage, merge_ne_stage, run, stats_conllu, stats_records, validate_files,
};
use corefalign::stats::Category;

use common::MiniCorpus;

/// Every file under a directory, as path -> bytes.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(dir: &Path, root: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        let Ok(entries) = std::fs::read_dir(dir) else {
            return;
        };
        for entry in entries.flatten() {
            let path = entry.path();
            if path.is_dir() {
                walk(&path, root, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

#[test]
fn staged_subcommand_sequence_equals_monolithic_run() {
    let dir = tempfile::tempdir().unwrap();
    let paths = MiniCorpus::default().write(dir.path());
    let config = Config::load(&paths.config).unwrap();

    // monolithic
    run(&config).unwrap();
    let monolithic = snapshot(&paths.out);
    std::fs::remove_dir_all(&paths.out).unwrap();

    // staged: same stage entry points the subcommands call
    let tb = &config.treebanks[0];
    let aliases = config.relation_aliases();
    let records_dir = paths.out.join("mini/records");
    convert_stage(&tb.docs, &records_dir, &aliases).unwrap();
    let (_, enriched) = merge_ne_stage(
        &tb.splits,
        tb.norne.as_ref().unwrap(),
        &paths.out.join("mini/enriched"),
        &config.options,
    )
    .unwrap();
    align_stage(
        &records_dir,
        &tb.name,
        &enriched,
        &[],
        &paths.out.join("mini"),
        &config.align_options(),
        &config.options,
    )
    .unwrap();
    let staged = snapshot(&paths.out);

    for (path, bytes) in &staged {
        // the combined report is run-only; everything else must be identical
        if path.starts_with("report/") {
            continue;
        }
        assert_eq!(
            Some(bytes),
            monolithic.get(path),
            "staged output differs for {path}"
        );
    }
    for path in monolithic.keys() {
        if path.starts_with("report/") {
            continue;
        }
        assert!(staged.contains_key(path), "staged run missing {path}");
    }
}

#[test]
fn rerunning_on_unchanged_inputs_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let paths = MiniCorpus::default().write(dir.path());
    let config = Config::load(&paths.config).unwrap();

    run(&config).unwrap();
    let first = snapshot(&paths.out);
    run(&config).unwrap();
    let second = snapshot(&paths.out);
    assert_eq!(first, second);
}

#[test]
fn worker_count_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let paths = MiniCorpus::default().write(dir.path());
    let mut config = Config::load(&paths.config).unwrap();

    run(&config).unwrap();
    let sequential = snapshot(&paths.out);
    std::fs::remove_dir_all(&paths.out).unwrap();

    config.options.workers = 4;
    corefalign::pipeline::with_pool(4, || run(&config)).unwrap();
    let parallel = snapshot(&paths.out);
    assert_eq!(sequential, parallel);
}

#[test]
fn merged_output_passes_entity_validation_and_overlap_recheck() {
    let dir = tempfile::tempdir().unwrap();
    let paths = MiniCorpus {
        include_overlap_doc: true,
        ..MiniCorpus::default()
    }
    .write(dir.path());
    let config = Config::load(&paths.config).unwrap();
    run(&config).unwrap();

    let mut merged_files = Vec::new();
    for split in ["train", "test", "dev"] {
        let path = paths.out.join(format!("mini/merged/{split}.conllu"));
        if path.is_file() {
            merged_files.push(path);
        }
    }
    assert_eq!(merged_files.len(), 3);

    // zero entity-ordering findings on everything the pipeline emitted
    let findings = validate_files(&merged_files).unwrap();
    assert!(findings.is_empty(), "{findings:?}");

    // discard soundness: no emitted document mixes sent_ids from two splits
    let index = corefalign::pipeline::load_index(
        "mini",
        &corefalign::config::SplitPaths {
            train: Some(paths.ud.join("train.conllu")),
            test: Some(paths.ud.join("test.conllu")),
            dev: Some(paths.ud.join("dev.conllu")),
        },
    )
    .unwrap();
    for file in &merged_files {
        let sentences = parse_conllu(
            &std::fs::read_to_string(file).unwrap(),
            &file.display().to_string(),
        )
        .unwrap();
        for (doc_id, slice) in split_documents(&sentences) {
            let splits: std::collections::BTreeSet<_> = slice
                .iter()
                .filter_map(|s| s.sent_id())
                .filter_map(|id| index.split_of(id))
                .collect();
            assert_eq!(splits.len(), 1, "{doc_id} spans {splits:?}");
        }
    }
}

#[test]
fn record_and_conllu_statistics_agree_on_zero_loss_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let paths = MiniCorpus::default().write(dir.path());
    let config = Config::load(&paths.config).unwrap();
    run(&config).unwrap();

    let (records_total, _) = stats_records(&paths.out.join("mini/records")).unwrap();
    let merged: Vec<PathBuf> = ["train", "test", "dev"]
        .iter()
        .map(|s| paths.out.join(format!("mini/merged/{s}.conllu")))
        .collect();
    let (conllu_total, _) = stats_conllu(&merged, &Options::default()).unwrap();

    // two routes, one answer (entities only exist on the merged side)
    for category in Category::LOSS {
        assert_eq!(
            records_total.get(category),
            conllu_total.get(category),
            "{}",
            category.name()
        );
    }
    assert_eq!(conllu_total.entities, 8);
}

#[test]
fn mention_conservation_matches_recorded_losses() {
    let dir = tempfile::tempdir().unwrap();
    let paths = MiniCorpus {
        remove_victim_sentence: true,
        ..MiniCorpus::default()
    }
    .write(dir.path());
    let config = Config::load(&paths.config).unwrap();
    let summary = run(&config).unwrap();

    let (records_total, _) = stats_records(&paths.out.join("mini/records")).unwrap();
    let merged: Vec<PathBuf> = ["train", "test", "dev"]
        .iter()
        .map(|s| paths.out.join(format!("mini/merged/{s}.conllu")))
        .collect();
    let (conllu_total, _) = stats_conllu(&merged, &Options::default()).unwrap();

    let report = &summary.reports[0];
    let lost_mentions = report
        .loss_rows()
        .iter()
        .find(|r| r.category == Category::Mentions)
        .unwrap()
        .lost();
    assert_eq!(
        conllu_total.mentions as i64,
        records_total.mentions as i64 - lost_mentions
    );
}

#[test]
fn ann_serialization_round_trips_on_every_shipped_fixture() {
    let dir = common::fixture("excerpts");
    let mut checked = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("ann") {
            continue;
        }
        let ann = std::fs::read_to_string(&path).unwrap();
        let txt = std::fs::read_to_string(path.with_extension("txt")).unwrap();
        let stem = path.file_stem().unwrap().to_str().unwrap();
        let doc = corefalign::brat::parse_ann(&ann, &txt, stem).unwrap();
        assert_eq!(doc.to_ann(), ann, "{stem}");
        checked += 1;
    }
    assert_eq!(checked, 3);
}

#[test]
fn converting_the_fixture_directory_yields_expected_records() {
    let out = tempfile::tempdir().unwrap();
    let summary = convert_stage(
        &common::fixture("excerpts"),
        out.path(),
        &corefalign::brat::RelationAliases::default(),
    )
    .unwrap();
    assert!(summary.errors.is_empty(), "{:?}", summary.errors);
    assert_eq!(summary.records_written, 3);
    assert_eq!(summary.pipe_fragments, 1);

    let records = corefalign::pipeline::read_record_dir(out.path()).unwrap();
    let excerpt = records
        .iter()
        .find(|r| r.doc_id == "ap_20091016-3323000")
        .unwrap();
    // all 37 markables survive conversion (alignment filtering comes later)
    assert_eq!(excerpt.mentions.len(), 37);
}

#[test]
fn empty_input_directory_warns_and_produces_empty_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let paths = MiniCorpus::default().write(dir.path());
    // wipe the documents
    std::fs::remove_dir_all(&paths.docs).unwrap();
    std::fs::create_dir_all(&paths.docs).unwrap();

    let config = Config::load(&paths.config).unwrap();
    let summary = run(&config).unwrap();
    assert!(summary.errors.is_empty());
    assert!(!summary.warnings.is_empty());
    assert!(!summary.has_findings());
    assert_eq!(summary.reports[0].docs.len(), 0);
}

#[test]
fn document_declared_in_one_treebank_moves_to_the_other() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();

    let write = |rel: &str, contents: &str| {
        let path = root.join(rel);
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(path, contents).unwrap();
    };
    let conllu = |prefix: &str, lines: &[&str]| {
        let mut out = String::new();
        for (i, line) in lines.iter().enumerate() {
            out.push_str(&format!("# sent_id = {prefix}{:04}\n# text = {line}\n", i + 1));
            for (t, token) in line.split(' ').enumerate() {
                out.push_str(&format!("{}\t{token}\t_\t_\t_\t_\t_\t_\t_\t_\n", t + 1));
            }
            out.push('\n');
        }
        out
    };

    // one document sits in bm's docs dir but its text only exists in nn
    write("bm-docs/hjemme.txt", "Denne finnes i bm .\n");
    write(
        "bm-docs/hjemme.ann",
        "T1\tMarkable 0 5\tDenne\n",
    );
    write("bm-docs/flyttet.txt", "Denne finnes berre i nn .\nOg denne òg .\n");
    write(
        "bm-docs/flyttet.ann",
        "T1\tMarkable 0 5\tDenne\nT2\tMarkable 29 34\tdenne\nR1\tAnaphoric Arg1:T2 Arg2:T1\n",
    );
    write("nn-docs/berre.txt", "Ei vanleg nynorsk setning .\n");
    write("nn-docs/berre.ann", "T1\tMarkable 10 17\tnynorsk\n");

    write("ud/bm-train.conllu", &conllu("bm", &["Denne finnes i bm .", "Fyll en ."]));
    write(
        "ud/nn-train.conllu",
        &conllu(
            "nn",
            &[
                "Ei vanleg nynorsk setning .",
                "Denne finnes berre i nn .",
                "Og denne òg .",
            ],
        ),
    );

    let config_text = format!(
        "[output]\ndir = {:?}\n\n\
         [[treebank]]\nname = \"bm\"\ndocs = {:?}\n[treebank.splits]\ntrain = {:?}\n\n\
         [[treebank]]\nname = \"nn\"\ndocs = {:?}\n[treebank.splits]\ntrain = {:?}\n",
        root.join("out").display().to_string(),
        root.join("bm-docs").display().to_string(),
        root.join("ud/bm-train.conllu").display().to_string(),
        root.join("nn-docs").display().to_string(),
        root.join("ud/nn-train.conllu").display().to_string(),
    );
    write("corefalign.toml", &config_text);

    let config = Config::load(&root.join("corefalign.toml")).unwrap();
    let summary = run(&config).unwrap();
    assert!(summary.errors.is_empty(), "{:?}", summary.errors);

    let bm = summary.reports.iter().find(|r| r.name == "bm").unwrap();
    let moved = bm.docs.iter().find(|d| d.doc_id == "flyttet").unwrap();
    assert_eq!(moved.outcome, "moved:nn");
    let home = bm.docs.iter().find(|d| d.doc_id == "hjemme").unwrap();
    assert_eq!(home.outcome, "aligned");
    assert!(root
        .join("out/bm/merged/moved-to-nn-train.conllu")
        .is_file());

    // the moved document keeps its id and is not counted as loss
    for row in bm.loss_rows() {
        assert_eq!(row.lost(), 0, "{}", row.category.name());
    }
    let moved_text =
        std::fs::read_to_string(root.join("out/bm/merged/moved-to-nn-train.conllu")).unwrap();
    assert!(moved_text.contains("# newdoc id = flyttet"));

    let nn = summary.reports.iter().find(|r| r.name == "nn").unwrap();
    assert_eq!(nn.docs.len(), 1);
    assert_eq!(nn.docs[0].outcome, "aligned");
}

fn corefalign_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_corefalign"))
}

#[test]
fn cli_run_exits_zero_and_strict_mode_fails_on_overlap() {
    let dir = tempfile::tempdir().unwrap();
    let paths = MiniCorpus::default().write(dir.path());
    let status = corefalign_cmd()
        .args(["run", "--config"])
        .arg(&paths.config)
        .status()
        .unwrap();
    assert!(status.success());

    // an overlap document quarantines and, under --strict, fails the run
    let dir = tempfile::tempdir().unwrap();
    let paths = MiniCorpus {
        include_overlap_doc: true,
        ..MiniCorpus::default()
    }
    .write(dir.path());
    let status = corefalign_cmd()
        .args(["run", "--strict", "--config"])
        .arg(&paths.config)
        .status()
        .unwrap();
    assert!(!status.success());
    assert!(paths.out.join("mini/quarantine/doc11.jsonl").is_file());

    // without --strict the same corpus passes
    let dir = tempfile::tempdir().unwrap();
    let paths = MiniCorpus {
        include_overlap_doc: true,
        ..MiniCorpus::default()
    }
    .write(dir.path());
    let status = corefalign_cmd()
        .args(["run", "--config"])
        .arg(&paths.config)
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn cli_stage_subcommands_compose() {
    let dir = tempfile::tempdir().unwrap();
    let paths = MiniCorpus::default().write(dir.path());

    let records = paths.root.join("staged-records");
    let status = corefalign_cmd()
        .arg("convert")
        .arg("--docs")
        .arg(&paths.docs)
        .arg("--out")
        .arg(&records)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(records.join("doc01.jsonl").is_file());

    let enriched = paths.root.join("staged-enriched");
    let norne = paths.norne.as_ref().unwrap();
    let status = corefalign_cmd()
        .arg("merge-ne")
        .arg("--ud-train")
        .arg(paths.ud.join("train.conllu"))
        .arg("--norne-train")
        .arg(norne.join("train.conllu"))
        .arg("--out")
        .arg(&enriched)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(enriched.join("train.conllu").is_file());

    let aligned = paths.root.join("staged-align");
    let status = corefalign_cmd()
        .arg("align")
        .arg("--records")
        .arg(&records)
        .args(["--name", "mini"])
        .arg("--train")
        .arg(enriched.join("train.conllu"))
        .arg("--test")
        .arg(paths.ud.join("test.conllu"))
        .arg("--dev")
        .arg(paths.ud.join("dev.conllu"))
        .arg("--out")
        .arg(&aligned)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(aligned.join("merged/train.conllu").is_file());

    let output = corefalign_cmd()
        .arg("stats")
        .arg("--records")
        .arg(&records)
        .arg("--conllu")
        .arg(aligned.join("merged/train.conllu"))
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("Markables"), "{stdout}");
    assert!(stdout.contains("lost"), "{stdout}");

    let status = corefalign_cmd()
        .arg("validate")
        .arg(aligned.join("merged/train.conllu"))
        .arg("--strict")
        .status()
        .unwrap();
    assert!(status.success(), "validator found problems in emitted output");
}

#[test]
fn cli_validate_flags_corrupted_entities() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.conllu");
    std::fs::write(
        &file,
        "# sent_id = s1\n# text = a b\n1\ta\t_\t_\t_\t_\t_\t_\t_\tEntity=(1\n2\tb\t_\t_\t_\t_\t_\t_\t_\t_\n\n",
    )
    .unwrap();
    let output = corefalign_cmd()
        .arg("validate")
        .arg(&file)
        .arg("--strict")
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("never closes"), "{stdout}");
}
