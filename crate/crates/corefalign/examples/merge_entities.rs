//! Transfer named-entity annotations from an enriched treebank onto the
//! current one by token index; every non-MISC column stays as the target
//! has it.
//!
//! ```bash
//! cargo run --example merge_entities
//! ```

use corefalign::conllu::{parse_conllu, write_conllu};
use corefalign::ne::{extract_entities, place_entities};

const SOURCE: &str = "\
# sent_id = 000318
# text = Jens Stoltenberg kom til Oslo.
1\tJens\tJens\tPROPN\t_\t_\t3\tnsubj\t_\tname=B-PER
2\tStoltenberg\tStoltenberg\tPROPN\t_\t_\t1\tflat:name\t_\tname=I-PER
3\tkom\tkomme\tVERB\t_\t_\t0\troot\t_\tname=O
4\ttil\ttil\tADP\t_\t_\t5\tcase\t_\tname=O
5\tOslo\tOslo\tPROPN\t_\t_\t3\tobl\t_\tSpaceAfter=No|name=B-GPE_LOC
6\t.\t$.\tPUNCT\t_\t_\t3\tpunct\t_\tname=O

";

/// Same sentence in the current treebank: HEAD values were corrected,
/// and there are no entity annotations yet.
const TARGET: &str = "\
# sent_id = 000318
# text = Jens Stoltenberg kom til Oslo.
1\tJens\tJens\tPROPN\t_\t_\t3\tnsubj\t_\t_
2\tStoltenberg\tStoltenberg\tPROPN\t_\t_\t1\tflat:name\t_\t_
3\tkom\tkomme\tVERB\t_\t_\t0\troot\t_\t_
4\ttil\ttil\tADP\t_\t_\t5\tcase\t_\t_
5\tOslo\tOslo\tPROPN\t_\t_\t4\tobl\t_\tSpaceAfter=No
6\t.\t$.\tPUNCT\t_\t_\t3\tpunct\t_\t_

";

fn main() -> corefalign::Result<()> {
    let source = parse_conllu(SOURCE, "source")?;
    let mut target = parse_conllu(TARGET, "target")?;

    let extraction = extract_entities(&source, "name", true, "source")?;
    println!("extracted spans:");
    for span in &extraction.spans {
        println!(
            "  {} tokens {}..={}  {}",
            span.sent_id, span.start, span.end, span.label
        );
    }

    let summary = place_entities(&mut target, &extraction, "name", true, true)?;
    println!(
        "\nplaced {} spans on {} sentence(s)\n",
        summary.spans_placed, summary.sentences_annotated
    );
    print!("{}", write_conllu(&target));

    // HEAD corrections in the target survive the merge
    let oslo = target[0].tokens().nth(4).unwrap();
    assert_eq!(oslo.fields[6], "4");
    assert_eq!(oslo.fields[9], "SpaceAfter=No|name=B-GPE_LOC");
    Ok(())
}
