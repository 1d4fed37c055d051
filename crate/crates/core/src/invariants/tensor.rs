//! Literal tensor contraction of a diagram at a fixed number of colours.
//!
//! Each arc carries a colour index. A matching site `M[a,b,c,d]` contributes
//! `[a=d][b=c] - [a=c][b=d]` and a virtual crossing `V[x,y]` contributes
//! `2[x=y] - 1`. The contraction sums the product over every colouring.

use serde::Serialize;

use super::InvariantError;
use crate::pd::PmDiagram;
use crate::states::StateSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TensorResult {
    pub value: i128,
    /// Whether every colouring with a nonzero product contributed exactly `+1`.
    pub all_terms_plus_one: bool,
    /// Colourings with a nonzero product.
    pub nonzero_terms: u128,
}

pub(crate) fn steps(n: u64, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, _| acc.saturating_mul(n as u128))
}

enum Factor {
    Site([usize; 4]),
    Virtual([usize; 2]),
}

impl Factor {
    fn value(&self, c: &[u8]) -> i32 {
        match *self {
            Factor::Site([a, b, x, y]) => {
                let planar = (c[a] == c[y] && c[b] == c[x]) as i32;
                let crossed = (c[a] == c[x] && c[b] == c[y]) as i32;
                planar - crossed
            }
            Factor::Virtual([x, y]) => {
                if c[x] == c[y] {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

struct Search {
    n: u8,
    order: Vec<usize>,
    /// Factors completed once the arc at each position is coloured.
    ready: Vec<Vec<Factor>>,
    colors: Vec<u8>,
    plus: u128,
    minus: u128,
}

impl Search {
    fn run(&mut self, pos: usize, product: i32) {
        if pos == self.order.len() {
            if product > 0 {
                self.plus += 1;
            } else {
                self.minus += 1;
            }
            return;
        }
        let arc = self.order[pos];
        // colour symmetry: the first arc is fixed to colour 0
        let range = if pos == 0 { 1 } else { self.n };
        for col in 0..range {
            self.colors[arc] = col;
            let mut p = product;
            for f in &self.ready[pos] {
                p *= f.value(&self.colors);
                if p == 0 {
                    break;
                }
            }
            if p != 0 {
                self.run(pos + 1, p);
            }
        }
    }
}

/// Sums the tensor network at `n` colours; refuses when `n^#arcs > budget`.
pub fn tensor_contraction(d: &PmDiagram, n: u64, budget: u64) -> Result<TensorResult, InvariantError> {
    if !(1..=255).contains(&n) {
        return Err(InvariantError::BadColors { n, min: 1, max: 255 });
    }
    let space = StateSpace::new(d);
    let arcs = space.num_arcs();
    let needed = steps(n, arcs);
    if needed > budget as u128 {
        return Err(InvariantError::Budget {
            what: "tensor contraction",
            needed,
            budget,
        });
    }

    // colour arcs in order of first appearance so factors complete early
    let mut order = Vec::with_capacity(arcs);
    let mut pos_of = vec![usize::MAX; arcs];
    let mut visit = |arc: usize, order: &mut Vec<usize>| {
        if pos_of[arc] == usize::MAX {
            pos_of[arc] = order.len();
            order.push(arc);
        }
    };
    for site in space.sites() {
        for &a in site {
            visit(a, &mut order);
        }
    }
    for v in space.virtual_arcs() {
        for &a in v {
            visit(a, &mut order);
        }
    }
    let mut ready: Vec<Vec<Factor>> = (0..arcs).map(|_| Vec::new()).collect();
    for &s in space.sites() {
        let last = s.iter().map(|&a| pos_of[a]).max().unwrap();
        ready[last].push(Factor::Site(s));
    }
    for &v in space.virtual_arcs() {
        let last = v.iter().map(|&a| pos_of[a]).max().unwrap();
        ready[last].push(Factor::Virtual(v));
    }

    let mut search = Search {
        n: n as u8,
        order,
        ready,
        colors: vec![0; arcs],
        plus: 0,
        minus: 0,
    };
    search.run(0, 1);

    // undo the colour-symmetry reduction, then the free loops
    let fixed = if arcs > 0 { n as u128 } else { 1 };
    let free = steps(n, space.loops() as usize);
    let scale = fixed * free;
    let plus = search.plus * scale;
    let minus = search.minus * scale;
    Ok(TensorResult {
        value: plus as i128 - minus as i128,
        all_terms_plus_one: minus == 0,
        nonzero_terms: plus + minus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn theta_at_three() {
        let d = PmDiagram::parse(corpus::THETA).unwrap();
        let r = tensor_contraction(&d, 3, 1_000).unwrap();
        assert_eq!((r.value, r.all_terms_plus_one), (6, true));
    }

    #[test]
    fn refuses_over_budget() {
        let d = PmDiagram::parse(corpus::J3).unwrap();
        assert!(matches!(
            tensor_contraction(&d, 4, 1_000),
            Err(InvariantError::Budget { .. })
        ));
    }

    #[test]
    fn j3_counts() {
        let d = PmDiagram::parse(corpus::J3).unwrap();
        assert_eq!(tensor_contraction(&d, 3, u64::MAX).unwrap().value, 0);
        let r = tensor_contraction(&d, 4, u64::MAX).unwrap();
        assert_eq!((r.value, r.all_terms_plus_one), (24, true));
    }

    #[test]
    fn invalid_immersion_shows_negative_terms() {
        // one virtual crossing between two circles violates the parity argument
        let d = PmDiagram::parse("G[M[1,2,2,1],V[1,2]]").unwrap();
        let r = tensor_contraction(&d, 3, 1_000).unwrap();
        assert!(!r.all_terms_plus_one);
    }
}
