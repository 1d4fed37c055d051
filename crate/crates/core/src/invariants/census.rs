//! PK-bracket of every perfect matching of a trivalent ribbon graph.

use serde::Serialize;

use super::{pk_bracket, InvariantError};
use crate::poly::IntPoly;
use crate::ribbon::RibbonGraph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    /// Matching edges as half-edge pairs.
    pub matching: Vec<[usize; 2]>,
    #[serde(serialize_with = "poly_text")]
    pub pk: IntPoly,
    pub zero: bool,
    /// `(n, value)` at each probe.
    pub evaluations: Vec<(i64, String)>,
}

fn poly_text<S: serde::Serializer>(p: &IntPoly, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

/// One row per perfect matching, in the order of [`RibbonGraph::matchings`].
pub fn census(g: &RibbonGraph, probes: &[i64]) -> Result<Vec<CensusRow>, InvariantError> {
    g.check_trivalent()?;
    g.matchings()
        .into_iter()
        .map(|m| {
            let d = g.clone().with_matching(&m)?.immerse()?;
            let pk = pk_bracket(&d)?;
            Ok(CensusRow {
                matching: m.iter().map(|&e| g.edge(e)).collect(),
                zero: pk.is_zero(),
                evaluations: probes.iter().map(|&n| (n, pk.eval(n, 0).to_string())).collect(),
                pk,
            })
        })
        .collect()
}
