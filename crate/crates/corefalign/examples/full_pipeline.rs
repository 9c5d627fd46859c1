//! The whole pipeline end to end on a generated micro corpus: convert,
//! entity merge, alignment, reports. Writes everything under a temporary
//! directory and prints the loss table.
//!
//! ```bash
//! cargo run --example full_pipeline
//! ```

use std::fmt::Write as _;
use std::path::Path;

use corefalign::align::report::{loss_table_text, summary_text};
use corefalign::config::Config;
use corefalign::pipeline::run;

fn write(path: &Path, contents: &str) {
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(path, contents).unwrap();
}

fn conllu(lines: &[&str], prefix: &str, names: bool) -> String {
    let mut out = String::new();
    for (i, line) in lines.iter().enumerate() {
        let _ = writeln!(out, "# sent_id = {prefix}{:04}", i + 1);
        let _ = writeln!(out, "# text = {line}");
        for (t, token) in line.split(' ').enumerate() {
            let misc = if names && token.chars().next().is_some_and(char::is_uppercase) {
                "name=PER"
            } else if names {
                "name=O"
            } else {
                "_"
            };
            let _ = writeln!(out, "{}\t{token}\t_\t_\t_\t_\t_\t_\t_\t{misc}", t + 1);
        }
        out.push('\n');
    }
    out
}

fn main() -> corefalign::Result<()> {
    let dir = std::env::temp_dir().join("corefalign-example");
    let _ = std::fs::remove_dir_all(&dir);

    // two tiny documents with coreference annotations
    write(
        &dir.join("docs/brev.txt"),
        "Kari skrev et brev .\nHun sendte det straks .\n",
    );
    write(
        &dir.join("docs/brev.ann"),
        "T1\tMarkable 0 4\tKari\nT2\tMarkable 11 19\tet brev\nT3\tMarkable 21 24\tHun\nT4\tMarkable 32 35\tdet\n\
         R1\tAnaphoric Arg1:T3 Arg2:T1\nR2\tAnaphoric Arg1:T4 Arg2:T2\n",
    );
    write(
        &dir.join("docs/hus.txt"),
        "Huset var gammelt .\nTaket lakk .\n",
    );
    write(
        &dir.join("docs/hus.ann"),
        "T1\tMarkable 0 5\tHuset\nT2\tMarkable 20 25\tTaket\nR1\tBridging Arg1:T2 Arg2:T1\n",
    );

    // the treebank carries the same sentences plus unrelated ones
    let train = [
        "Kari skrev et brev .",
        "Hun sendte det straks .",
        "Noe helt annet står her .",
    ];
    let dev = ["Huset var gammelt .", "Taket lakk ."];
    write(&dir.join("ud/train.conllu"), &conllu(&train, "tr", false));
    write(&dir.join("ud/dev.conllu"), &conllu(&dev, "de", false));
    write(&dir.join("norne/train.conllu"), &conllu(&train, "tr", true));
    write(&dir.join("norne/dev.conllu"), &conllu(&dev, "de", true));

    let config_text = format!(
        "[output]\ndir = {:?}\n\n[[treebank]]\nname = \"demo\"\ndocs = {:?}\n\
         [treebank.splits]\ntrain = {:?}\ndev = {:?}\n\
         [treebank.norne]\ntrain = {:?}\ndev = {:?}\n",
        dir.join("out").display().to_string(),
        dir.join("docs").display().to_string(),
        dir.join("ud/train.conllu").display().to_string(),
        dir.join("ud/dev.conllu").display().to_string(),
        dir.join("norne/train.conllu").display().to_string(),
        dir.join("norne/dev.conllu").display().to_string(),
    );
    write(&dir.join("corefalign.toml"), &config_text);

    let config = Config::load(&dir.join("corefalign.toml"))?;
    let summary = run(&config)?;

    for report in &summary.reports {
        print!("{}", summary_text(report));
    }
    println!("\n{}", loss_table_text(&summary.reports));
    println!("merged train split:\n");
    print!(
        "{}",
        std::fs::read_to_string(dir.join("out/demo/merged/train.conllu")).unwrap()
    );
    println!("artifacts under {}", dir.join("out").display());
    Ok(())
}
