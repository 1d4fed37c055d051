//! Reference diagrams.
//!
//! `THETA`, `K4`, the double thetas and `K33` were traced from drawings and
//! are checked against the colouring counts of their underlying graphs in
//! the test suite. The same codes ship as files under `corpus/`.

/// Theta graph, one matching edge. Bracket `n(n-1)`.
pub const THETA: &str = "G[M[1,2,2,1]]";

/// Planar K4 with matching {AD, BC} for outer triangle ABC and centre D.
pub const K4: &str = "G[M[4,1,2,3],M[2,1,4,3]]";

/// Double theta graph matched on its two parallel chords. Bracket `n(n-1)^2`.
pub const DOUBLE_THETA_CHORDS: &str = "G[M[1,4,4,3],M[2,1,3,2]]";

/// Double theta graph matched on its two single edges. Bracket `2n(n-1)`.
pub const DOUBLE_THETA_ENDS: &str = "G[M[1,2,4,3],M[3,4,2,1]]";

/// K33 drawn as a hexagon with its three long diagonals, under one of its
/// six perfect matchings. Bracket `n(n-1)^2`, Penrose `n(n-1)(n-3)`.
pub const K33: &str = "G[M[1,6,3,4],M[3,2,5,6],M[1,2,5,4],V[1,6],V[2,5],V[3,4]]";

pub const PETERSEN: &str = "G[M[9,10,1,5],M[6,7,2,1],M[8,9,3,2],M[3,4,6,10],M[4,5,8,7],V[5,9],V[3,9],V[3,5]]";

pub const J3: &str = "G[M[5,6,9,1],M[4,5,12,10],M[11,12,1,2],M[6,7,2,3],M[7,8,10,11],M[3,4,8,9],V[3,6],V[3,9],V[6,9]]";

pub const PETERSEN_BLOWUP: &str = "G[M[4, 5, 1, 2], M[13, 14, 3, 1], M[7, 8, 6, 4], M[10, 11, 14, 15],\
M[29, 30, 17, 18], M[27, 25, 5, 6], M[20, 21, 2, 3],\
M[24, 22, 12, 10], M[21, 19, 18, 16], M[26, 27, 23, 24], M[9, 7, 11, 12],\
M[16, 17, 8, 9], M[19, 20, 22, 23],\
M[25, 26, 30, 28], M[28, 29, 15, 13], V[2, 11],\
V[2, 12], V[3, 11], V[3, 12], V[26, 29], V[26, 30], V[27, 29], V[27, 30]]";

/// Diagrams small enough for exhaustive state checks.
pub const SMALL_DIAGRAMS: &[&str] = &[THETA, K4, DOUBLE_THETA_CHORDS, DOUBLE_THETA_ENDS, K33, PETERSEN, J3];
