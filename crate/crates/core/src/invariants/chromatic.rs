//! Chromatic polynomials of touch graphs.

use std::collections::HashMap;

use super::bitgraph::{self, bit, Adj, MAX_VERTICES};
use super::dense::{self, Dense};
use crate::poly::IntPoly;
use crate::states::TouchGraph;

/// Simple graph on at most 128 vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    adj: Adj,
}

impl SimpleGraph {
    pub fn new(k: usize) -> Self {
        assert!(k <= MAX_VERTICES, "at most {MAX_VERTICES} vertices");
        Self { adj: vec![0; k] }
    }

    pub fn from_edges(k: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(k);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    /// Adds the edge `ab`; repeats are absorbed. Panics on a loop.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert_ne!(a, b, "simple graphs have no loops");
        self.adj[a] |= bit(b);
        self.adj[b] |= bit(a);
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        bitgraph::edge_count(&self.adj)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] & bit(b) != 0
    }

    /// Collapses a touch graph; `None` when it has a loop.
    pub fn from_touch(tg: &TouchGraph) -> Option<Self> {
        if tg.has_loop() {
            return None;
        }
        Some(Self::from_edges(tg.vertices.len(), &tg.edges))
    }
}

/// Memo for chromatic polynomials keyed by the relabeled adjacency.
#[derive(Default, Debug, Clone)]
pub struct ChromaticCache {
    memo: HashMap<Adj, Dense>,
}

impl ChromaticCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }

    pub fn chromatic(&mut self, g: &SimpleGraph) -> IntPoly {
        dense::to_poly(&self.dense(&g.adj))
    }

    /// Chromatic polynomial of a touch graph; zero if any circle touches itself.
    pub fn touch(&mut self, tg: &TouchGraph) -> IntPoly {
        dense::to_poly(&self.touch_dense(tg))
    }

    pub(crate) fn touch_dense(&mut self, tg: &TouchGraph) -> Dense {
        match SimpleGraph::from_touch(tg) {
            Some(g) => self.dense(&g.adj),
            None => vec![0],
        }
    }

    pub(crate) fn dense(&mut self, adj: &[u128]) -> Dense {
        chrom(adj, &mut self.memo)
    }
}

pub fn chromatic(g: &SimpleGraph) -> IntPoly {
    ChromaticCache::new().chromatic(g)
}

/// Chromatic polynomial of a touch graph with loops and multi-edges.
pub fn chromatic_touch(tg: &TouchGraph) -> IntPoly {
    ChromaticCache::new().touch(tg)
}

/// `n (n-1) ... (n-k+1)`
fn falling(k: usize) -> Dense {
    let mut p = dense::one();
    for i in 0..k {
        p = dense::times_n_minus(&p, i as i128);
    }
    p
}

fn chrom(adj: &[u128], memo: &mut HashMap<Adj, Dense>) -> Dense {
    let k = adj.len();
    if k == 0 {
        return dense::one();
    }
    let isolated = adj.iter().filter(|&&a| a == 0).count();
    if isolated > 0 {
        let keep = (0..k).filter(|&v| adj[v] != 0).fold(0u128, |m, v| m | bit(v));
        let rest = chrom(&bitgraph::induced(adj, keep), memo);
        return dense::shift(&rest, isolated);
    }
    let comps = bitgraph::components(adj);
    if comps.len() > 1 {
        // every component has an edge, so each factor is divisible by n
        return comps.iter().fold(dense::one(), |acc, &c| {
            dense::mul(&acc, &chrom(&bitgraph::induced(adj, c), memo))
        });
    }
    let m = bitgraph::edge_count(adj);
    if m == k - 1 {
        let mut p = vec![0, 1];
        for _ in 1..k {
            p = dense::times_n_minus(&p, 1);
        }
        return p;
    }
    if m == k * (k - 1) / 2 {
        return falling(k);
    }
    // a vertex whose neighbourhood is a clique can be coloured last
    for v in 0..k {
        let nb = adj[v];
        let mut rest = nb;
        let mut clique = true;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if (adj[u] | bit(u)) & nb != nb {
                clique = false;
                break;
            }
        }
        if clique {
            let sub = chrom(&bitgraph::without(adj, v), memo);
            return dense::times_n_minus(&sub, nb.count_ones() as i128);
        }
    }

    let key = bitgraph::normal_form(adj);
    if let Some(p) = memo.get(&key) {
        return p.clone();
    }
    let result = if 4 * m > k * (k - 1) {
        // dense: P(G) = P(G + uv) + P(G / uv) for a non-edge uv
        let (u, v) = non_edge(&key);
        let mut plus = key.clone();
        plus[u] |= bit(v);
        plus[v] |= bit(u);
        let mut r = chrom(&plus, memo);
        dense::add_into(&mut r, &chrom(&contract(&key, u, v), memo));
        dense::trim(r)
    } else {
        // sparse: P(G) = P(G - uv) - P(G / uv)
        let (u, v) = branch_edge(&key);
        let mut minus = key.clone();
        minus[u] &= !bit(v);
        minus[v] &= !bit(u);
        dense::sub(&chrom(&minus, memo), &chrom(&contract(&key, u, v), memo))
    };
    memo.insert(key, result.clone());
    result
}

/// Merges `v` into `u` (simple-graph contraction).
fn contract(adj: &[u128], u: usize, v: usize) -> Adj {
    let mut a = adj.to_vec();
    let nv = a[v] & !bit(u);
    a[u] = (a[u] | nv) & !bit(v);
    let mut m = nv;
    while m != 0 {
        let w = m.trailing_zeros() as usize;
        m &= m - 1;
        a[w] |= bit(u);
    }
    bitgraph::without(&a, v)
}

/// Edge at a minimum-degree vertex to its highest-degree neighbour.
fn branch_edge(adj: &[u128]) -> (usize, usize) {
    let u = (0..adj.len())
        .filter(|&v| adj[v] != 0)
        .min_by_key(|&v| adj[v].count_ones())
        .expect("graph has an edge");
    let mut best = None;
    let mut m = adj[u];
    while m != 0 {
        let w = m.trailing_zeros() as usize;
        m &= m - 1;
        let d = adj[w].count_ones();
        if best.is_none_or(|(bd, _)| d > bd) {
            best = Some((d, w));
        }
    }
    (u, best.unwrap().1)
}

fn non_edge(adj: &[u128]) -> (usize, usize) {
    let k = adj.len();
    // highest-degree vertex that is not universal
    let u = (0..k)
        .filter(|&v| adj[v].count_ones() as usize + 1 < k)
        .max_by_key(|&v| adj[v].count_ones())
        .expect("graph is not complete");
    let v = (0..k)
        .filter(|&w| w != u && adj[u] & bit(w) == 0)
        .max_by_key(|&w| adj[w].count_ones())
        .unwrap();
    (u, v)
}
