use std::path::PathBuf;

use facecolor::ribbon::examples;
use facecolor::{corpus, PmDiagram, RibbonGraph};

fn read(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", name].iter().collect();
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn diagram_files_match_the_constants() {
    for (file, text) in [
        ("theta.pd", corpus::THETA),
        ("k4.pd", corpus::K4),
        ("double_theta_chords.pd", corpus::DOUBLE_THETA_CHORDS),
        ("double_theta_ends.pd", corpus::DOUBLE_THETA_ENDS),
        ("k33.pd", corpus::K33),
        ("petersen.pd", corpus::PETERSEN),
        ("j3.pd", corpus::J3),
        ("petbu.pd", corpus::PETERSEN_BLOWUP),
    ] {
        let from_file = PmDiagram::parse_file(&read(file)).unwrap();
        assert_eq!(from_file, PmDiagram::parse(text).unwrap(), "{file}");
    }
}

#[test]
fn graph_files_match_the_examples() {
    for (file, g) in [
        ("theta.graph", examples::theta()),
        ("k4.graph", examples::k4()),
        ("k33.graph", examples::k33()),
        ("petersen.graph", examples::petersen()),
    ] {
        let from_file = RibbonGraph::parse(&read(file)).unwrap();
        assert_eq!(from_file.to_text(), g.to_text(), "{file}");
    }
}
