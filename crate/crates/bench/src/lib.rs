//! Shared fixtures for the benchmarks.

use facecolor::{corpus, PmDiagram};

/// Parsed corpus diagrams by name.
pub fn diagram(name: &str) -> PmDiagram {
    let text = match name {
        "theta" => corpus::THETA,
        "k33" => corpus::K33,
        "petersen" => corpus::PETERSEN,
        "j3" => corpus::J3,
        "petbu" => corpus::PETERSEN_BLOWUP,
        other => panic!("no corpus diagram named {other}"),
    };
    PmDiagram::parse(text).expect("corpus diagrams parse")
}
