//! Align converted documents against a treebank index: tiered matching,
//! duplicate disambiguation, split-overlap detection.
//!
//! ```bash
//! cargo run --example align_corpus
//! ```

use corefalign::align::{align_document, AlignOptions, DocOutcome, Split, TreebankIndex};
use corefalign::brat::RelationAliases;
use corefalign::conllu::{write_conllu, ConlluSentence};
use corefalign::pipeline::convert_document;

fn sentence(id: &str, line: &str) -> ConlluSentence {
    let forms: Vec<&str> = line.split(' ').collect();
    ConlluSentence::from_forms(id, &forms)
}

fn main() -> corefalign::Result<()> {
    // a small treebank: the document block sits in train, with the
    // dialogue line "Elling ." duplicated
    let train: Vec<ConlluSentence> = [
        "Dette er en annen tekst .",
        "Hvem er der ?",
        "Elling .",
        "Hva vil du ?",
        "Elling .",
        "Mer urelatert fyll her .",
    ]
    .iter()
    .enumerate()
    .map(|(i, line)| sentence(&format!("tr{:04}", i + 1), line))
    .collect();

    let mut index = TreebankIndex::new("demo");
    index.add_split(Split::Train, train, "train.conllu")?;

    let txt = "Hvem er der ?\nElling .\nHva vil du ?\nElling .\n";
    let ann = concat!(
        "T1\tMarkable 14 20\tElling\n",
        "T2\tMarkable 36 42\tElling\n",
        "R1\tAnaphoric Arg1:T2 Arg2:T1\n"
    );
    let (record, _) = convert_document(ann, txt, "elling-dialog", &RelationAliases::default())?;

    let aligned = align_document(&record, &index, &[], &AlignOptions::default());
    println!("outcome: {}", aligned.outcome.label());
    assert!(matches!(aligned.outcome, DocOutcome::Aligned { split: Split::Train }));
    println!(
        "ambiguous sentences resolved: {}",
        aligned.corrections.ambiguous_resolved
    );
    println!("\nmerged output:\n{}", write_conllu(&aligned.merged));
    Ok(())
}
