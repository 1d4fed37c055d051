//! Dense univariate integer polynomials in `n`, lowest degree first.
//!
//! Used for the hot loops of the state sums; converted to [`IntPoly`] at the end.

use crate::poly::IntPoly;

pub(crate) type Dense = Vec<i128>;

pub(crate) fn one() -> Dense {
    vec![1]
}

pub(crate) fn trim(mut a: Dense) -> Dense {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

pub(crate) fn add_into(acc: &mut Dense, a: &[i128]) {
    if acc.len() < a.len() {
        acc.resize(a.len(), 0);
    }
    for (x, y) in acc.iter_mut().zip(a) {
        *x += y;
    }
}

pub(crate) fn add_scaled_into(acc: &mut Dense, a: &[i128], c: i128) {
    if acc.len() < a.len() {
        acc.resize(a.len(), 0);
    }
    for (x, y) in acc.iter_mut().zip(a) {
        *x += c * y;
    }
}

pub(crate) fn sub(a: &[i128], b: &[i128]) -> Dense {
    let mut out = a.to_vec();
    add_scaled_into(&mut out, b, -1);
    trim(out)
}

pub(crate) fn mul(a: &[i128], b: &[i128]) -> Dense {
    if a.is_empty() || b.is_empty() {
        return vec![0];
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// Multiplies by `n^k`.
pub(crate) fn shift(a: &[i128], k: usize) -> Dense {
    let mut out = vec![0; k];
    out.extend_from_slice(a);
    trim(out)
}

/// Multiplies by the linear factor `n - c`.
pub(crate) fn times_n_minus(a: &[i128], c: i128) -> Dense {
    let mut out = vec![0; a.len() + 1];
    for (i, x) in a.iter().enumerate() {
        out[i + 1] += x;
        out[i] -= c * x;
    }
    trim(out)
}

pub(crate) fn to_poly(a: &[i128]) -> IntPoly {
    IntPoly::from_n_coeffs(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        assert_eq!(mul(&[-1, 1], &[1, 1]), vec![-1, 0, 1]);
        assert_eq!(times_n_minus(&[0, 1], 1), vec![0, -1, 1]);
        assert_eq!(sub(&[0, 1], &[0, 1]), vec![0]);
        assert_eq!(shift(&[2], 3), vec![0, 0, 0, 2]);
        assert_eq!(to_poly(&[0, -1, 1]).to_string(), "n^2 - n");
    }
}
