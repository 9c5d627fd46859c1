//! Parse a BRAT `.ann`/`.txt` pair and inspect markables, relations, and
//! relation-graph findings.
//!
//! ```bash
//! cargo run --example parse_brat
//! ```

use corefalign::brat::{parse_ann, validate_relations};

const TXT: &str = "\
Kidnapperne kom seg senere unna fordi kystvakten var redd de ville senke båten .
Politiet lette etter dem hele natten .
";

const ANN: &str = "\
T1\tMarkable 0 11\tKidnapperne
T2\tMarkable 16 19\tseg
T3\tMarkable 38 48\tkystvakten
T4\tMarkable 58 60\tde
T5\tMarkable 73 78\tbåten
T6\tMarkable 102 105\tdem
R1\tAnaphoric Arg1:T2 Arg2:T1
R2\tAnaphoric Arg1:T4 Arg2:T2
R3\tBridging Arg1:T5 Arg2:T3
R4\tAnaphoric Arg1:T6 Arg2:T4
";

fn main() -> corefalign::Result<()> {
    let doc = parse_ann(ANN, TXT, "kidnappers")?;

    println!("document {}: {} lines of text", doc.doc_id, doc.lines.len());
    println!("\nmarkables:");
    for markable in &doc.markables {
        let spans: Vec<String> = markable
            .fragments
            .iter()
            .map(|f| format!("[{},{})", f.start, f.end))
            .collect();
        println!(
            "  {:3}  {:12}  {:?}",
            markable.id,
            spans.join(";"),
            doc.covered_text(markable)
        );
    }

    println!("\nrelations:");
    for relation in &doc.relations {
        println!(
            "  {:3}  {:16}  {} -> {}",
            relation.id,
            relation.kind.to_string(),
            relation.source,
            relation.targets.join(", ")
        );
    }

    let findings = validate_relations(&doc);
    if findings.is_empty() {
        println!("\nrelation graph is clean");
    } else {
        println!("\nfindings:");
        for finding in findings {
            println!("  {finding}");
        }
    }

    // the parsed form serializes back to the original annotation lines
    assert_eq!(doc.to_ann(), ANN);
    println!("round trip back to .ann verified");
    Ok(())
}
