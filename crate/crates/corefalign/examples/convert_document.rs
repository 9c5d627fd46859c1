//! Full document conversion: standoff annotations to a word-indexed record
//! with clusters, bridges and split antecedents, serialized as one JSON
//! line.
//!
//! ```bash
//! cargo run --example convert_document
//! ```

use corefalign::brat::RelationAliases;
use corefalign::pipeline::convert_document;
use corefalign::record::write_record;
use corefalign::stats::count_document;

const TXT: &str = "\
Hennes fraseparerte ektemann , som har hentet barnet deres noen dager tidligere , er ikke å få tak i .
";

const ANN: &str = "\
T1\tMarkable 0 79\tHennes fraseparerte ektemann , som har hentet barnet deres noen dager tidligere
T2\tMarkable 0 6\tHennes
T3\tMarkable 46 58\tbarnet deres
T4\tMarkable 53 58\tderes
T5\tMarkable 59 69\tnoen dager
T6\tMarkable 95 100\ttak i
R1\tSplit_antecedent Arg1:T4 Arg2:T1
R2\tSplit_antecedent Arg1:T4 Arg2:T2
";

fn main() -> corefalign::Result<()> {
    let (record, report) = convert_document(ANN, TXT, "ektemann", &RelationAliases::default())?;

    println!("mentions by cluster:");
    for mention in &record.mentions {
        let frags: Vec<String> = mention
            .fragments
            .iter()
            .map(|f| format!("s{} {}..={}", f.sentence, f.start, f.end))
            .collect();
        let words: Vec<&str> = mention
            .fragments
            .iter()
            .flat_map(|f| record.sentences[f.sentence][f.start..=f.end].iter())
            .map(String::as_str)
            .collect();
        println!(
            "  cluster {}  {}  {:?}",
            mention.cluster,
            frags.join(" + "),
            words.join(" ")
        );
    }
    for group in &record.split_antecedents {
        println!(
            "split antecedents: clusters {:?} jointly antecede cluster {}",
            group.antecedents, group.anaphor
        );
    }

    let counts = count_document(&record);
    println!(
        "\ncounts: {} markables, {} mentions, {} split-antecedent cluster(s)",
        counts.markables, counts.mentions, counts.splitante_clusters
    );
    println!(
        "corrections: {} pipe spans, {} snapped fragments, {} dropped mentions",
        report.pipe_fragments, report.snapped_fragments, report.dropped_mentions
    );

    println!("\nrecord line:\n{}", write_record(&record));
    Ok(())
}
