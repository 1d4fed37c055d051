//! Small simple graphs as adjacency bitsets, for the memoized recursions.

/// Maximum vertex count of a [`BitGraph`].
pub const MAX_VERTICES: usize = 128;

pub(crate) type Adj = Vec<u128>;

#[inline]
pub(crate) fn bit(i: usize) -> u128 {
    1u128 << i
}

pub(crate) fn full_mask(k: usize) -> u128 {
    if k == 128 {
        u128::MAX
    } else {
        bit(k) - 1
    }
}

pub(crate) fn edge_count(adj: &[u128]) -> usize {
    adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
}

/// Compresses the bits of `x` selected by `mask` into the low bits.
fn extract(x: u128, mut mask: u128) -> u128 {
    let mut out = 0u128;
    let mut k = 0;
    while mask != 0 {
        let i = mask.trailing_zeros();
        if (x >> i) & 1 == 1 {
            out |= bit(k);
        }
        k += 1;
        mask &= mask - 1;
    }
    out
}

/// Subgraph induced on `mask`, renumbered in increasing order.
pub(crate) fn induced(adj: &[u128], mask: u128) -> Adj {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        out.push(extract(adj[v], mask));
        m &= m - 1;
    }
    out
}

pub(crate) fn without(adj: &[u128], v: usize) -> Adj {
    induced(adj, full_mask(adj.len()) & !bit(v))
}

/// Connected components as vertex masks, ordered by least vertex.
pub(crate) fn components(adj: &[u128]) -> Vec<u128> {
    let mut seen = 0u128;
    let mut out = Vec::new();
    for start in 0..adj.len() {
        if seen & bit(start) != 0 {
            continue;
        }
        let mut comp = bit(start);
        let mut frontier = bit(start);
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = adj[v] & !comp;
            comp |= fresh;
            frontier |= fresh;
        }
        seen |= comp;
        out.push(comp);
    }
    out
}

/// Relabels vertices by (degree, neighbour degree sum) so that isomorphic
/// graphs reached by different recursion paths often share a key. The key
/// is the exact relabeled adjacency, so distinct graphs never collide.
pub(crate) fn normal_form(adj: &[u128]) -> Adj {
    let deg: Vec<u32> = adj.iter().map(|a| a.count_ones()).collect();
    let score = |v: usize| {
        let mut s = 0u32;
        let mut m = adj[v];
        while m != 0 {
            s += deg[m.trailing_zeros() as usize];
            m &= m - 1;
        }
        (deg[v], s)
    };
    let mut order: Vec<usize> = (0..adj.len()).collect();
    order.sort_by_key(|&v| score(v));
    let mut pos = vec![0usize; adj.len()];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    order
        .iter()
        .map(|&old| {
            let mut row = 0u128;
            let mut m = adj[old];
            while m != 0 {
                row |= bit(pos[m.trailing_zeros() as usize]);
                m &= m - 1;
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(k: usize) -> Adj {
        let mut adj = vec![0u128; k];
        for i in 0..k - 1 {
            adj[i] |= bit(i + 1);
            adj[i + 1] |= bit(i);
        }
        adj
    }

    #[test]
    fn induced_renumbers() {
        let p = path(4);
        assert_eq!(induced(&p, 0b1110), path(3));
        assert_eq!(without(&p, 0), path(3));
        assert_eq!(edge_count(&p), 3);
    }

    #[test]
    fn components_of_split_path() {
        let p = without(&path(5), 2);
        assert_eq!(components(&p), vec![0b0011, 0b1100]);
    }

    #[test]
    fn normal_form_preserves_edges() {
        let p = path(5);
        let nf = normal_form(&p);
        assert_eq!(edge_count(&nf), 4);
        assert_eq!(normal_form(&nf), nf);
    }
}
