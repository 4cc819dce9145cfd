//! Division-free determinants.
//!
//! Elimination needs exact division, which `Z/m` and `Z/m[e]` lack in general.
//! Small matrices use cofactor expansion; larger ones go through Berkowitz's
//! characteristic polynomial, which only adds and multiplies.

use crate::ring::RingElem;

use super::Matrix;

const COFACTOR_MAX: usize = 4;

pub(crate) fn determinant(a: &Matrix) -> RingElem {
    debug_assert!(a.is_square());
    if a.rows() <= COFACTOR_MAX {
        cofactor(a)
    } else {
        let n = a.rows();
        let p = charpoly(a);
        // p(x) = det(xI - A), so det A = (-1)^n p(0)
        a.ring().sign(n as i64) * p[n]
    }
}

fn cofactor(a: &Matrix) -> RingElem {
    let n = a.rows();
    let ring = a.ring();
    match n {
        0 => ring.one(),
        1 => a.get(0, 0),
        2 => a.get(0, 0) * a.get(1, 1) - a.get(0, 1) * a.get(1, 0),
        _ => {
            let mut acc = ring.zero();
            for j in 0..n {
                let x = a.get(0, j);
                if x.is_zero() {
                    continue;
                }
                let minor = Matrix::from_fn(ring, n - 1, n - 1, |r, c| a.get(r + 1, if c < j { c } else { c + 1 }));
                acc += ring.sign(j as i64) * x * cofactor(&minor);
            }
            acc
        }
    }
}

/// Coefficients of `det(xI - A)`, leading coefficient first.
pub fn charpoly(a: &Matrix) -> Vec<RingElem> {
    assert!(a.is_square(), "charpoly of a non-square matrix");
    let ring = a.ring();
    let n = a.rows();
    if n == 0 {
        return vec![ring.one()];
    }
    let mut poly = vec![ring.one(), -a.get(0, 0)];
    for r in 1..n {
        // Leading r x r block S, row R = A[r][..r], column C = A[..r][r].
        // Toeplitz column: 1, -a_rr, -R C, -R S C, ..., -R S^(r-1) C.
        let mut toeplitz = Vec::with_capacity(r + 2);
        toeplitz.push(ring.one());
        toeplitz.push(-a.get(r, r));
        let mut col: Vec<RingElem> = (0..r).map(|i| a.get(i, r)).collect();
        for k in 0..r {
            let rc = (0..r).fold(ring.zero(), |acc, j| acc + a.get(r, j) * col[j]);
            toeplitz.push(-rc);
            if k + 1 < r {
                col = (0..r).map(|i| (0..r).fold(ring.zero(), |acc, j| acc + a.get(i, j) * col[j])).collect();
            }
        }
        let next: Vec<RingElem> =
            (0..r + 2).map(|i| (0..=i.min(r)).fold(ring.zero(), |acc, j| acc + toeplitz[i - j] * poly[j])).collect();
        poly = next;
    }
    poly
}
