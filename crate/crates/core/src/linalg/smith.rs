//! Smith normal form over the integers, generic over the integer type.

use num_integer::Integer;
use num_traits::Signed;

/// Dense row-major integer matrix as nested rows.
pub type IntMatrix<T> = Vec<Vec<T>>;

/// `u * a * v = s` with `u`, `v` unimodular and `s` diagonal,
/// `s[0][0] | s[1][1] | ...`, all diagonal entries non-negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm<T> {
    pub u: IntMatrix<T>,
    pub s: IntMatrix<T>,
    pub v: IntMatrix<T>,
}

impl<T: Clone> SmithForm<T> {
    /// The diagonal `s_1, ..., s_k`, `k = min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<T> {
        let k = self.s.len().min(self.s.first().map_or(0, Vec::len));
        (0..k).map(|i| self.s[i][i].clone()).collect()
    }
}

fn identity<T: Integer + Clone>(n: usize) -> IntMatrix<T> {
    (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect()
}

/// Replaces rows `(i, k)` by `(x*ri + y*rk, z*ri + w*rk)`.
fn combine_rows<T: Integer + Clone>(m: &mut IntMatrix<T>, i: usize, k: usize, x: &T, y: &T, z: &T, w: &T) {
    for c in 0..m[i].len() {
        let a = m[i][c].clone();
        let b = m[k][c].clone();
        m[i][c] = x.clone() * a.clone() + y.clone() * b.clone();
        m[k][c] = z.clone() * a + w.clone() * b;
    }
}

fn combine_cols<T: Integer + Clone>(m: &mut IntMatrix<T>, j: usize, k: usize, x: &T, y: &T, z: &T, w: &T) {
    for row in m.iter_mut() {
        let a = row[j].clone();
        let b = row[k].clone();
        row[j] = x.clone() * a.clone() + y.clone() * b.clone();
        row[k] = z.clone() * a + w.clone() * b;
    }
}

/// Smith normal form of an integer matrix. Works for any signed integer type
/// (`i64`, `i128`, `BigInt`, ...); fixed-width types may overflow on large
/// inputs.
pub fn smith_normal_form<T>(a: &IntMatrix<T>) -> SmithForm<T>
where
    T: Integer + Signed + Clone,
{
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    assert!(a.iter().all(|r| r.len() == cols), "ragged matrix");
    let mut s = a.clone();
    let mut u = identity::<T>(rows);
    let mut v = identity::<T>(cols);
    let one = T::one();
    let zero = T::zero();
    let k = rows.min(cols);

    for t in 0..k {
        // smallest nonzero |entry| in the trailing block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if s[i][j].is_zero() {
                    continue;
                }
                if pivot.is_none_or(|(pi, pj)| s[i][j].abs() < s[pi][pj].abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        s.swap(t, pi);
        u.swap(t, pi);
        for row in s.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if s[i][t].is_zero() {
                    continue;
                }
                let p = s[t][t].clone();
                let b = s[i][t].clone();
                if b.is_multiple_of(&p) {
                    let q = b / p;
                    combine_rows(&mut s, t, i, &one, &zero, &-q.clone(), &one);
                    combine_rows(&mut u, t, i, &one, &zero, &-q, &one);
                } else {
                    let eg = p.extended_gcd(&b);
                    let (z, w) = (-(b / eg.gcd.clone()), p / eg.gcd.clone());
                    combine_rows(&mut s, t, i, &eg.x, &eg.y, &z, &w);
                    combine_rows(&mut u, t, i, &eg.x, &eg.y, &z, &w);
                }
            }
            for j in t + 1..cols {
                if s[t][j].is_zero() {
                    continue;
                }
                let p = s[t][t].clone();
                let b = s[t][j].clone();
                if b.is_multiple_of(&p) {
                    let q = b / p;
                    combine_cols(&mut s, t, j, &one, &zero, &-q.clone(), &one);
                    combine_cols(&mut v, t, j, &one, &zero, &-q, &one);
                } else {
                    let eg = p.extended_gcd(&b);
                    let (z, w) = (-(b / eg.gcd.clone()), p / eg.gcd.clone());
                    combine_cols(&mut s, t, j, &eg.x, &eg.y, &z, &w);
                    combine_cols(&mut v, t, j, &eg.x, &eg.y, &z, &w);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        if s[t][t].is_negative() {
            for x in s[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
    }

    // divisibility chain: diag(a, b) -> diag(g, ab/g)
    for i in 0..k {
        for j in i + 1..k {
            let a = s[i][i].clone();
            let b = s[j][j].clone();
            if a.is_zero() || b.is_multiple_of(&a) {
                continue;
            }
            let eg = a.extended_gcd(&b);
            let g = eg.gcd.clone();
            let (ag, bg) = (a.clone() / g.clone(), b.clone() / g.clone());
            let (x, y) = (eg.x, eg.y);
            combine_rows(&mut s, i, j, &x, &y, &-bg.clone(), &ag);
            combine_rows(&mut u, i, j, &x, &y, &-bg.clone(), &ag);
            // columns: V' = [[1, -y*b/g], [1, x*a/g]]
            let (c01, c11) = (-(y * bg), x * ag);
            combine_cols(&mut s, i, j, &one, &one, &c01, &c11);
            combine_cols(&mut v, i, j, &one, &one, &c01, &c11);
            if s[j][j].is_negative() {
                s[j][j] = -s[j][j].clone();
                for x in u[j].iter_mut() {
                    *x = -x.clone();
                }
            }
        }
    }

    SmithForm { u, s, v }
}
