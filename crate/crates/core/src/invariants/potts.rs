//! Signed colouring sums `Σ_σ Π_{uv ∈ E} (2[σu = σv] - 1)` over `n` colours.
//!
//! This is the contribution of one matching state to the PK-bracket once all
//! virtual crossings are expanded: a crossing between arcs of the same circle
//! contributes a factor 1, and two crossings between the same pair of circles
//! cancel. Parallel edges therefore reduce modulo 2, and contraction takes the
//! symmetric difference of neighbourhoods.

use std::collections::HashMap;

use super::bitgraph::{self, bit, Adj};
use super::dense::{self, Dense};

#[derive(Default, Debug)]
pub(crate) struct PottsCache {
    memo: HashMap<Adj, Dense>,
}

impl PottsCache {
    pub(crate) fn eval(&mut self, adj: &[u128]) -> Dense {
        potts(adj, &mut self.memo)
    }
}

/// `2 - n`, the factor from summing out a vertex of degree one.
const LEAF: [i128; 2] = [2, -1];

fn potts(adj: &[u128], memo: &mut HashMap<Adj, Dense>) -> Dense {
    let k = adj.len();
    if k == 0 {
        return dense::one();
    }
    let isolated = adj.iter().filter(|&&a| a == 0).count();
    if isolated > 0 {
        let keep = (0..k).filter(|&v| adj[v] != 0).fold(0u128, |m, v| m | bit(v));
        return dense::shift(&potts(&bitgraph::induced(adj, keep), memo), isolated);
    }
    if let Some(v) = (0..k).find(|&v| adj[v].count_ones() == 1) {
        return dense::mul(&LEAF, &potts(&bitgraph::without(adj, v), memo));
    }
    let comps = bitgraph::components(adj);
    if comps.len() > 1 {
        return comps.iter().fold(dense::one(), |acc, &c| {
            dense::mul(&acc, &potts(&bitgraph::induced(adj, c), memo))
        });
    }
    let key = bitgraph::normal_form(adj);
    if let Some(p) = memo.get(&key) {
        return p.clone();
    }
    let result = if let Some(v) = (0..k).find(|&v| key[v].count_ones() == 2) {
        // summing out a degree-two vertex between a and b leaves
        // (n - 2) + 2 (2[σa = σb] - 1)
        let a = key[v].trailing_zeros() as usize;
        let b = 127 - key[v].leading_zeros() as usize;
        let mut toggled = key.clone();
        toggled[a] ^= bit(b);
        toggled[b] ^= bit(a);
        let with = potts(&bitgraph::without(&toggled, v), memo);
        let without = potts(&bitgraph::without(&key, v), memo);
        let mut r = dense::times_n_minus(&without, 2);
        dense::add_scaled_into(&mut r, &with, 2);
        dense::trim(r)
    } else {
        // (2δ - 1) = 2δ - 1: contract with weight 2, delete with weight -1
        let u = (0..k).min_by_key(|&v| key[v].count_ones()).unwrap();
        let w = key[u].trailing_zeros() as usize;
        let mut minus = key.clone();
        minus[u] &= !bit(w);
        minus[w] &= !bit(u);
        let mut r = potts(&contract_xor(&key, u, w), memo);
        r.iter_mut().for_each(|c| *c *= 2);

        dense::sub(&r, &potts(&minus, memo))
    };
    memo.insert(key, result.clone());
    result
}

/// Identifies `v` with `u`; edges to common neighbours cancel in pairs.
fn contract_xor(adj: &[u128], u: usize, v: usize) -> Adj {
    let mut a = adj.to_vec();
    let nu = a[u] & !bit(v);
    let nv = a[v] & !bit(u);
    let merged = nu ^ nv;
    a[u] = merged;
    for (w, row) in a.iter_mut().enumerate() {
        if w == u || w == v {
            continue;
        }
        if merged & bit(w) != 0 {
            *row |= bit(u);
        } else {
            *row &= !bit(u);
        }
    }
    bitgraph::without(&a, v)
}
