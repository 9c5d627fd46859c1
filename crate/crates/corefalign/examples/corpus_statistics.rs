//! Corpus statistics and the information-loss table.
//!
//! ```bash
//! cargo run --example corpus_statistics
//! ```

use corefalign::brat::RelationAliases;
use corefalign::pipeline::convert_document;
use corefalign::stats::{count_documents, counts_tsv, diff, Counts};

const DOCS: &[(&str, &str, &str)] = &[
    (
        "skip",
        "Skipet la fra kai .\nDekket var nymalt .\n",
        "T1\tMarkable 0 6\tSkipet\nT2\tMarkable 20 26\tDekket\nR1\tBridging Arg1:T2 Arg2:T1\n",
    ),
    (
        "venner",
        "Per og Kari kom .\nDe smilte .\n",
        "T1\tMarkable 0 3\tPer\nT2\tMarkable 7 11\tKari\nT3\tMarkable 18 20\tDe\n\
         R1\tSplit_antecedent Arg1:T3 Arg2:T1\nR2\tSplit_antecedent Arg1:T3 Arg2:T2\n",
    ),
];

fn main() -> corefalign::Result<()> {
    let mut records = Vec::new();
    for (doc_id, txt, ann) in DOCS {
        let (record, _) = convert_document(ann, txt, doc_id, &RelationAliases::default())?;
        records.push(record);
    }
    let before = count_documents(records.iter());
    print!("{}", counts_tsv(&[("corpus".to_string(), before)]));

    // pretend alignment lost one sentence with one mention
    let after = Counts {
        sentences: before.sentences - 1,
        tokens: before.tokens - 4,
        mentions: before.mentions - 1,
        markables: before.markables - 1,
        ..before
    };
    println!("\nloss table:");
    for row in diff(&before, &after) {
        println!("{:20} {}", row.category.name(), row.cell());
    }
    Ok(())
}
