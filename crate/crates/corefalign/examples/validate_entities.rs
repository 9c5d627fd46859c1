//! The entity-ordering checks: bracket balance, same-token opening order,
//! and link references, on both clean and corrupted input.
//!
//! ```bash
//! cargo run --example validate_entities
//! ```

use corefalign::conllu::parse_conllu;
use corefalign::entity::validate_level6;

const CLEAN: &str = "\
# sent_id = ok-1
# text = Den gamle mannen smilte.
1\tDen\t_\t_\t_\t_\t_\t_\t_\tEntity=(1
2\tgamle\t_\t_\t_\t_\t_\t_\t_\t_
3\tmannen\t_\t_\t_\t_\t_\t_\t_\tEntity=(2)1)
4\tsmilte\t_\t_\t_\t_\t_\t_\t_\tSpaceAfter=No
5\t.\t_\t_\t_\t_\t_\t_\t_\t_

";

const CORRUPTED: &str = "\
# sent_id = bad-1
# text = a b c
1\ta\t_\t_\t_\t_\t_\t_\t_\tEntity=(1(2
2\tb\t_\t_\t_\t_\t_\t_\t_\tEntity=1)
3\tc\t_\t_\t_\t_\t_\t_\t_\tBridge=7<9|Entity=2)

# sent_id = bad-2
# text = d e
1\td\t_\t_\t_\t_\t_\t_\t_\tEntity=(3
2\te\t_\t_\t_\t_\t_\t_\t_\t_

";

fn main() -> corefalign::Result<()> {
    let clean = parse_conllu(CLEAN, "clean")?;
    println!("clean file: {} finding(s)", validate_level6(&clean).len());

    let corrupted = parse_conllu(CORRUPTED, "corrupted")?;
    let findings = validate_level6(&corrupted);
    println!("corrupted file: {} finding(s)", findings.len());
    for finding in &findings {
        println!("  {finding}");
    }
    Ok(())
}
