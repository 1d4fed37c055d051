//! Direct count of perfect matching colourings, straight from the definition.

use super::tensor::steps;
use super::InvariantError;
use crate::ribbon::{RibbonError, RibbonGraph};

/// Constraint at one matching edge: the free edges at each end.
struct Site {
    near: [usize; 2],
    far: [usize; 2],
}

/// Counts colourings of the non-matching edges with `n` colours such that
/// at every matching edge the two edges at each end get two distinct colours
/// and both ends see the same pair. Free loops contribute a factor `n`.
pub fn oracle_pm_colorings(g: &RibbonGraph, n: u64, budget: u64) -> Result<u128, InvariantError> {
    g.check_trivalent()?;
    let matching = g.matching().ok_or(RibbonError::Unmatched)?;
    let free: Vec<usize> = (0..g.num_edges()).filter(|&e| !g.is_matching_edge(e)).collect();
    let needed = steps(n, free.len());
    if needed > budget as u128 {
        return Err(InvariantError::Budget {
            what: "perfect matching colouring oracle",
            needed,
            budget,
        });
    }
    let mut index = vec![usize::MAX; g.num_edges()];
    for (i, &e) in free.iter().enumerate() {
        index[e] = i;
    }
    let free_at = |h: usize| -> [usize; 2] {
        let others: Vec<usize> = g
            .rotation(g.vertex_of(h))
            .iter()
            .filter(|&&x| x != h)
            .map(|&x| index[g.edge_of(x)])
            .collect();
        [others[0], others[1]]
    };
    let sites: Vec<Site> = matching
        .iter()
        .map(|&e| {
            let [a, b] = g.edge(e);
            Site {
                near: free_at(a),
                far: free_at(b),
            }
        })
        .collect();

    // check each site once its last edge is coloured
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); free.len()];
    for (i, s) in sites.iter().enumerate() {
        let last = s.near.iter().chain(&s.far).copied().max().unwrap();
        ready[last].push(i);
    }
    let ok = |s: &Site, c: &[u64]| {
        let (x, y) = (c[s.near[0]], c[s.near[1]]);
        let (z, w) = (c[s.far[0]], c[s.far[1]]);
        x != y && ((x == z && y == w) || (x == w && y == z))
    };

    fn go(
        pos: usize,
        n: u64,
        colors: &mut Vec<u64>,
        ready: &[Vec<usize>],
        check: &dyn Fn(usize, &[u64]) -> bool,
    ) -> u128 {
        if pos == colors.len() {
            return 1;
        }
        let range = if pos == 0 { 1 } else { n };
        let mut total = 0;
        for c in 0..range {
            colors[pos] = c;
            if ready[pos].iter().all(|&i| check(i, colors)) {
                total += go(pos + 1, n, colors, ready, check);
            }
        }
        total
    }
    let check = |i: usize, c: &[u64]| ok(&sites[i], c);
    let mut colors = vec![0u64; free.len()];
    let mut count = go(0, n, &mut colors, &ready, &check);
    if !free.is_empty() {
        // the first edge was pinned to one colour
        count *= n as u128;
    }
    Ok(count * steps(n, g.free_loops() as usize))
}
