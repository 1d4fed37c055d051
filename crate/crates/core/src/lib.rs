//! Perfect matching diagrams of trivalent ribbon graphs and their face colour
//! brackets.
//!
//! A diagram is stored in graph PD notation ([`pd::PmDiagram`]). Its
//! resolution states ([`states`]) feed four polynomial invariants
//! ([`invariants`]): the Penrose polynomial, the PK-bracket with virtual
//! crossings, the colour bracket of touch-graph colourings, and the graded
//! total face colour polynomial. [`homology`] builds the filtered colour
//! chain complex for small diagrams.

pub mod corpus;
pub mod homology;
pub mod invariants;
pub mod pd;
pub mod poly;
pub mod ribbon;
pub mod states;

pub use homology::{BettiReport, ChainComplex, HomologyError};
pub use invariants::{
    color_bracket, oracle_pm_colorings, penrose, pk_bracket, tensor_contraction, total_polynomial, InvariantError,
};
pub use pd::{PdError, PmDiagram};
pub use poly::IntPoly;
pub use ribbon::{RibbonError, RibbonGraph};
pub use states::{CircleDecomposition, CircleId, EdgeType, StateIndex, TouchGraph, VirtualChoice};
