//! State-sum evaluation of the four brackets.

use rayon::prelude::*;

use super::chromatic::ChromaticCache;
use super::dense::{self, Dense};
use super::potts::PottsCache;
use super::InvariantError;
use crate::pd::PmDiagram;
use crate::poly::IntPoly;
use crate::states::{circles, touch_graph_of, DisjointSet, StateIndex, StateSpace, VirtualChoice};

/// Largest `ℓ` (plus `v` for the full expansion) a state sum will enumerate.
pub const MAX_STATE_BITS: usize = 40;

/// How [`pk_bracket_with`] expands the virtual crossings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PkMethod {
    /// Full enumeration for small diagrams, reduced otherwise.
    #[default]
    Auto,
    /// Every (matching state, node/plain choice) pair, one union-find each.
    StateSum,
    /// Per matching state, sums the virtual choices in closed form as a
    /// signed colouring count on the circle-crossing graph.
    Reduced,
}

/// Full expansion is used up to this many `ℓ + v` bits.
const AUTO_FULL_BITS: usize = 16;

fn check_bits(bits: usize) -> Result<(), InvariantError> {
    if bits > MAX_STATE_BITS {
        Err(InvariantError::TooManyStates {
            bits,
            max: MAX_STATE_BITS,
        })
    } else {
        Ok(())
    }
}

fn sign(weight: u32) -> i128 {
    if weight.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Per-worker scratch space for the matching-state loop.
struct Scratch {
    ds: DisjointSet,
    circle_of: Vec<usize>,
    acc: Dense,
}

impl Scratch {
    fn new(space: &StateSpace) -> Self {
        Self {
            ds: DisjointSet::new(space.num_arcs()),
            circle_of: vec![0; space.num_arcs()],
            acc: vec![0; space.num_arcs() + 1],
        }
    }
}

fn merge(mut a: Dense, b: Dense) -> Dense {
    dense::add_into(&mut a, &b);
    a
}

pub fn pk_bracket(d: &PmDiagram) -> Result<IntPoly, InvariantError> {
    pk_bracket_with(d, PkMethod::Auto)
}

pub fn pk_bracket_with(d: &PmDiagram, method: PkMethod) -> Result<IntPoly, InvariantError> {
    let space = StateSpace::new(d);
    let (l, v) = (space.num_sites(), space.num_virtuals());
    let method = match method {
        PkMethod::Auto if l + v <= AUTO_FULL_BITS => PkMethod::StateSum,
        PkMethod::Auto => PkMethod::Reduced,
        m => m,
    };
    let acc = match method {
        PkMethod::StateSum => {
            check_bits(l + v)?;
            pk_state_sum(&space)
        }
        _ => {
            check_bits(l)?;
            if space.num_arcs() > super::bitgraph::MAX_VERTICES {
                return Err(InvariantError::TooLarge(format!(
                    "{} arcs exceed the reduced evaluator limit",
                    space.num_arcs()
                )));
            }
            pk_reduced(&space)
        }
    };
    Ok(dense::to_poly(&dense::shift(&acc, space.loops() as usize)))
}

fn pk_state_sum(space: &StateSpace) -> Dense {
    let l = space.num_sites();
    let v = space.num_virtuals();
    let virtuals = space.virtual_arcs();
    (0..1u64 << l)
        .into_par_iter()
        .fold(
            || (Scratch::new(space), DisjointSet::new(space.num_arcs()), Vec::new()),
            |(mut s, mut fuse, mut pairs), alpha| {
                let k = space.circle_indices(alpha, &mut s.ds, &mut s.circle_of);
                let sa = sign(alpha.count_ones());
                pairs.clear();
                pairs.extend(virtuals.iter().map(|&[x, y]| (s.circle_of[x], s.circle_of[y])));
                for mask in 0..1u64 << v {
                    fuse.reset();
                    let mut complexes = k;
                    for (i, &(cx, cy)) in pairs.iter().enumerate() {
                        if (mask >> i) & 1 == 1 && fuse.union(cx, cy) {
                            complexes -= 1;
                        }
                    }
                    let nodes = mask.count_ones();
                    let coeff = sa * sign(v as u32 - nodes) * (1i128 << nodes);
                    s.acc[complexes] += coeff;
                }
                (s, fuse, pairs)
            },
        )
        .map(|(s, _, _)| s.acc)
        .reduce(Vec::new, merge)
}

fn pk_reduced(space: &StateSpace) -> Dense {
    let l = space.num_sites();
    let virtuals = space.virtual_arcs();
    (0..1u64 << l)
        .into_par_iter()
        .fold(
            || (Scratch::new(space), PottsCache::default()),
            |(mut s, mut cache), alpha| {
                let k = space.circle_indices(alpha, &mut s.ds, &mut s.circle_of);
                let mut adj = vec![0u128; k];
                for &[x, y] in virtuals {
                    let (cx, cy) = (s.circle_of[x], s.circle_of[y]);
                    if cx != cy {
                        adj[cx] ^= 1 << cy;
                        adj[cy] ^= 1 << cx;
                    }
                }
                let p = cache.eval(&adj);
                dense::add_scaled_into(&mut s.acc, &p, sign(alpha.count_ones()));
                (s, cache)
            },
        )
        .map(|(s, _)| s.acc)
        .reduce(Vec::new, merge)
}

pub fn penrose(d: &PmDiagram) -> Result<IntPoly, InvariantError> {
    let space = StateSpace::new(d);
    let l = space.num_sites();
    check_bits(l)?;
    let acc = (0..1u64 << l)
        .into_par_iter()
        .fold(
            || Scratch::new(&space),
            |mut s, alpha| {
                let k = space.circle_indices(alpha, &mut s.ds, &mut s.circle_of);
                s.acc[k] += sign(alpha.count_ones());
                s
            },
        )
        .map(|s| s.acc)
        .reduce(Vec::new, merge);
    Ok(dense::to_poly(&dense::shift(&acc, space.loops() as usize)))
}

/// Chromatic polynomial of every matching state's touch graph, by weight.
fn graded_colorings(d: &PmDiagram) -> Result<Vec<Dense>, InvariantError> {
    let space = StateSpace::new(d);
    let l = space.num_sites();
    check_bits(l)?;
    let plain = VirtualChoice::all_plain(d.num_virtuals());
    let per_weight = (0..1u64 << l)
        .into_par_iter()
        .fold(
            || (vec![Vec::new(); l + 1], ChromaticCache::new()),
            |(mut acc, mut cache): (Vec<Dense>, ChromaticCache), alpha| {
                let s = StateIndex::new(alpha, l);
                let dec = circles(d, s, plain).expect("state lengths match the diagram");
                let p = cache.touch_dense(&touch_graph_of(&dec));
                dense::add_into(&mut acc[s.weight() as usize], &p);
                (acc, cache)
            },
        )
        .map(|(acc, _)| acc)
        .reduce(
            || vec![Vec::new(); l + 1],
            |a, b| a.into_iter().zip(b).map(|(x, y)| merge(x, y)).collect(),
        );
    Ok(per_weight
        .into_iter()
        .map(|p| dense::shift(&dense::trim(p), space.loops() as usize))
        .collect())
}

pub fn color_bracket(d: &PmDiagram) -> Result<IntPoly, InvariantError> {
    let graded = graded_colorings(d)?;
    let total = graded.into_iter().fold(Vec::new(), merge);
    Ok(dense::to_poly(&total))
}

pub fn total_polynomial(d: &PmDiagram) -> Result<IntPoly, InvariantError> {
    let graded = graded_colorings(d)?;
    let mut out = IntPoly::zero();
    for (i, p) in graded.iter().enumerate() {
        for (k, c) in p.iter().enumerate() {
            if *c != 0 {
                out += IntPoly::monomial(*c, k as u32, i as u32);
            }
        }
    }
    Ok(out)
}
