//! Entity/Bridge/SplitAnte encoding in the MISC column, and the decode that
//! inverts it.
//!
//! ```bash
//! cargo run --example encode_misc
//! ```

use corefalign::brat::RelationAliases;
use corefalign::conllu::{merge_misc, write_conllu, ConlluSentence};
use corefalign::entity::{annotation_items, decode_entities, encode_entities, validate_level6};
use corefalign::pipeline::convert_document;

const TXT: &str = "\
Kidnapperne kom seg senere unna fordi kystvakten var redd de ville senke båten .
";

const ANN: &str = "\
T1\tMarkable 0 11\tKidnapperne
T2\tMarkable 16 19\tseg
T3\tMarkable 38 48\tkystvakten
T4\tMarkable 58 60\tde
T5\tMarkable 73 78\tbåten
R1\tAnaphoric Arg1:T2 Arg2:T1
R2\tAnaphoric Arg1:T4 Arg2:T2
R3\tBridging Arg1:T5 Arg2:T3
";

fn main() -> corefalign::Result<()> {
    let (record, _) = convert_document(ANN, TXT, "kidnappers", &RelationAliases::default())?;

    let annotations = encode_entities(&record)?;
    let forms: Vec<&str> = record.sentences[0].iter().map(String::as_str).collect();
    let base = ConlluSentence::from_forms("example-1", &forms);
    let merged = merge_misc(&base, &annotation_items(&annotations)[0])?;

    println!("{}", write_conllu(std::slice::from_ref(&merged)));

    let findings = validate_level6(std::slice::from_ref(&merged));
    println!("entity-ordering findings: {}", findings.len());

    let decoded = decode_entities(std::slice::from_ref(&merged), "kidnappers")?;
    assert_eq!(decoded.mentions, record.mentions);
    assert_eq!(decoded.bridges, record.bridges);
    println!("decode reproduced the mention structure exactly");
    Ok(())
}
