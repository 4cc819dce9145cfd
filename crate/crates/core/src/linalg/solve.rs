//! Linear systems over `Z/m` and `Z/m[e]`.
//!
//! Over `Z/m` the coefficient matrix is diagonalized by invertible row and
//! column operations (`U A V = D`); a system `A x = b` then splits into scalar
//! congruences `d_i y_i = c_i` with `c = U b`, `x = V y`. Each congruence is
//! solvable iff `gcd(d_i, m) | c_i` and then has exactly `gcd(d_i, m)`
//! solutions, which gives solvability, a witness and the exact count.
//!
//! `Z/m[e]` is not a principal ideal ring, so there a system
//! `(A0 + e A1)(x0 + e x1) = b0 + e b1` is rewritten as the doubled system
//! `[[A0, 0], [A1, A0]] [x0; x1] = [b0; b1]` over `Z/m`.

use num_bigint::BigUint;
use num_integer::Integer;
use rand::Rng;

use crate::error::{Error, Result};
use crate::ring::{mod_inverse, RingElem, RingSpec};

use super::Matrix;

/// Outcome of [`solve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionReport {
    pub solvable: bool,
    pub witness: Option<Vec<RingElem>>,
    pub solution_count: BigUint,
}

/// `U A V = D` over `Z/m`, flat row-major storage.
#[derive(Debug, Clone)]
struct ModDiagonal {
    m: u64,
    rows: usize,
    cols: usize,
    u: Vec<u64>,
    v: Vec<u64>,
    diag: Vec<u64>,
}

fn mulm(x: u64, y: u64, m: u64) -> u64 {
    ((x as u128 * y as u128) % m as u128) as u64
}

fn to_mod(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Dense {
    fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Dense { rows: n, cols: n, data }
    }

    fn at(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    /// rows (i, k) <- (x ri + y rk, z ri + w rk), coefficients already mod m.
    fn combine_rows(&mut self, i: usize, k: usize, c: [u64; 4], m: u64) {
        let [x, y, z, w] = c;
        for col in 0..self.cols {
            let a = self.data[i * self.cols + col];
            let b = self.data[k * self.cols + col];
            self.data[i * self.cols + col] = (mulm(x, a, m) + mulm(y, b, m)) % m;
            self.data[k * self.cols + col] = (mulm(z, a, m) + mulm(w, b, m)) % m;
        }
    }

    fn combine_cols(&mut self, j: usize, k: usize, c: [u64; 4], m: u64) {
        let [x, y, z, w] = c;
        for row in 0..self.rows {
            let a = self.data[row * self.cols + j];
            let b = self.data[row * self.cols + k];
            self.data[row * self.cols + j] = (mulm(x, a, m) + mulm(y, b, m)) % m;
            self.data[row * self.cols + k] = (mulm(z, a, m) + mulm(w, b, m)) % m;
        }
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        for col in 0..self.cols {
            self.data.swap(i * self.cols + col, k * self.cols + col);
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j == k {
            return;
        }
        for row in 0..self.rows {
            self.data.swap(row * self.cols + j, row * self.cols + k);
        }
    }
}

/// Coefficients turning `(p, b)` into `(q, 0)`: either a plain subtraction
/// when `p | b` in `Z/m`, or a determinant-one Bezout combination.
fn eliminator(p: u64, b: u64, m: u64) -> ([u64; 4], bool) {
    let g = p.gcd(&m);
    if b.is_multiple_of(g) {
        // p * q = b (mod m)
        let (pg, bg, mg) = (p / g, b / g, m / g);
        let q = if mg == 1 { 0 } else { mulm(bg % mg, mod_inverse(pg % mg, mg).expect("coprime"), mg) };
        (([1, 0, (m - q % m) % m, 1]), false)
    } else {
        let eg = (p as i128).extended_gcd(&(b as i128));
        let h = eg.gcd;
        let c = [to_mod(eg.x, m), to_mod(eg.y, m), to_mod(-(b as i128 / h), m), to_mod(p as i128 / h, m)];
        (c, true)
    }
}

impl ModDiagonal {
    fn new(data: Vec<u64>, rows: usize, cols: usize, m: u64) -> Self {
        let mut s = Dense { rows, cols, data };
        let mut u = Dense::identity(rows);
        let mut v = Dense::identity(cols);
        let k = rows.min(cols);
        let mut diag = vec![0; k];
        for t in 0..k {
            // pivot: nonzero entry generating the largest ideal
            let mut pivot: Option<(usize, usize, u64)> = None;
            'search: for i in t..rows {
                for j in t..cols {
                    let x = s.at(i, j);
                    if x == 0 {
                        continue;
                    }
                    let g = x.gcd(&m);
                    if pivot.is_none_or(|(_, _, best)| g < best) {
                        pivot = Some((i, j, g));
                        if g == 1 {
                            break 'search;
                        }
                    }
                }
            }
            let Some((pi, pj, _)) = pivot else { break };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..rows {
                    let b = s.at(i, t);
                    if b == 0 {
                        continue;
                    }
                    let (c, _) = eliminator(s.at(t, t), b, m);
                    s.combine_rows(t, i, c, m);
                    u.combine_rows(t, i, c, m);
                }
                for j in t + 1..cols {
                    let b = s.at(t, j);
                    if b == 0 {
                        continue;
                    }
                    let (c, bezout) = eliminator(s.at(t, t), b, m);
                    s.combine_cols(t, j, c, m);
                    v.combine_cols(t, j, c, m);
                    dirty |= bezout;
                }
                if !dirty {
                    break;
                }
            }
            diag[t] = s.at(t, t);
        }
        ModDiagonal { m, rows, cols, u: u.data, v: v.data, diag }
    }

    /// `g_i = gcd(d_i, m)` for every unknown; unknowns past the diagonal get `m`.
    fn orders(&self) -> Vec<u64> {
        (0..self.cols).map(|i| self.diag.get(i).copied().unwrap_or(0).gcd(&self.m)).collect()
    }

    fn kernel_count(&self) -> BigUint {
        self.orders().into_iter().fold(BigUint::from(1u32), |acc, g| acc * g)
    }

    fn apply_v(&self, y: &[u64]) -> Vec<u64> {
        let m = self.m;
        (0..self.cols)
            .map(|i| (0..self.cols).fold(0, |acc, j| (acc + mulm(self.v[i * self.cols + j], y[j], m)) % m))
            .collect()
    }

    /// A particular solution of `A x = b`, if any.
    fn particular(&self, b: &[u64]) -> Option<Vec<u64>> {
        let m = self.m;
        let c: Vec<u64> = (0..self.rows)
            .map(|i| (0..self.rows).fold(0, |acc, j| (acc + mulm(self.u[i * self.rows + j], b[j], m)) % m))
            .collect();
        let mut y = vec![0u64; self.cols];
        for (i, &ci) in c.iter().enumerate() {
            if i >= self.cols {
                if ci != 0 {
                    return None;
                }
                continue;
            }
            let d = self.diag.get(i).copied().unwrap_or(0);
            let g = d.gcd(&m);
            if ci % g != 0 {
                return None;
            }
            let mg = m / g;
            if mg > 1 {
                let inv = mod_inverse((d / g) % mg, mg).expect("coprime");
                y[i] = mulm((ci / g) % mg, inv, mg);
            }
        }
        Some(self.apply_v(&y))
    }

    /// Kernel generators `V e_i * (m / g_i)` with their additive orders `g_i > 1`.
    fn kernel_generators(&self) -> Vec<(Vec<u64>, u64)> {
        let m = self.m;
        self.orders()
            .into_iter()
            .enumerate()
            .filter(|&(_, g)| g > 1)
            .map(|(i, g)| {
                let mut y = vec![0u64; self.cols];
                y[i] = m / g;
                (self.apply_v(&y), g)
            })
            .collect()
    }
}

/// A reusable factorization of a coefficient matrix over its ring.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    ring: RingSpec,
    rows: usize,
    cols: usize,
    diag: ModDiagonal,
}

impl LinearSystem {
    pub fn new(a: &Matrix) -> Self {
        let ring = a.ring();
        let m = ring.modulus();
        let (rows, cols) = a.shape();
        let diag = if ring.has_epsilon() {
            let (r2, c2) = (2 * rows, 2 * cols);
            let mut data = vec![0u64; r2 * c2];
            for i in 0..rows {
                for j in 0..cols {
                    let x = a.get(i, j);
                    data[i * c2 + j] = x.real();
                    data[(rows + i) * c2 + cols + j] = x.real();
                    data[(rows + i) * c2 + j] = x.eps_part();
                }
            }
            ModDiagonal::new(data, r2, c2, m)
        } else {
            let data = a.entries().iter().map(RingElem::real).collect();
            ModDiagonal::new(data, rows, cols, m)
        };
        LinearSystem { ring, rows, cols, diag }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    fn flatten(&self, b: &[RingElem]) -> Result<Vec<u64>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!("right-hand side of length {} for {} equations", b.len(), self.rows)));
        }
        if let Some(x) = b.iter().find(|x| x.ring() != self.ring) {
            return Err(Error::RingMismatch { left: self.ring, right: x.ring() });
        }
        let mut out: Vec<u64> = b.iter().map(RingElem::real).collect();
        if self.ring.has_epsilon() {
            out.extend(b.iter().map(RingElem::eps_part));
        }
        Ok(out)
    }

    fn unflatten(&self, z: &[u64]) -> Vec<RingElem> {
        let n = self.cols;
        (0..n)
            .map(|i| {
                let b = if self.ring.has_epsilon() { z[n + i] } else { 0 };
                self.ring.from_parts(z[i], b)
            })
            .collect()
    }

    /// Number of solutions of `A x = 0`.
    pub fn kernel_count(&self) -> BigUint {
        self.diag.kernel_count()
    }

    /// Number of vectors in the image of `A`.
    pub fn image_count(&self) -> BigUint {
        let domain = BigUint::from(self.ring.cardinality()).pow(self.cols as u32);
        domain / self.kernel_count()
    }

    /// One solution of `A x = b`, or `None`.
    pub fn particular(&self, b: &[RingElem]) -> Result<Option<Vec<RingElem>>> {
        let flat = self.flatten(b)?;
        Ok(self.diag.particular(&flat).map(|z| self.unflatten(&z)))
    }

    pub fn solve(&self, b: &[RingElem]) -> Result<SolutionReport> {
        let witness = self.particular(b)?;
        let solution_count = if witness.is_some() { self.kernel_count() } else { BigUint::from(0u32) };
        Ok(SolutionReport { solvable: witness.is_some(), witness, solution_count })
    }

    /// All solutions of `A x = b` as particular solution plus kernel.
    pub fn solution_space(&self, b: &[RingElem]) -> Result<Option<SolutionSpace>> {
        let Some(particular) = self.particular(b)? else { return Ok(None) };
        Ok(Some(SolutionSpace { ring: self.ring, particular, generators: self.kernel() }))
    }

    pub fn kernel_space(&self) -> SolutionSpace {
        SolutionSpace { ring: self.ring, particular: vec![self.ring.zero(); self.cols], generators: self.kernel() }
    }

    fn kernel(&self) -> Vec<(Vec<RingElem>, u64)> {
        self.diag.kernel_generators().into_iter().map(|(z, g)| (self.unflatten(&z), g)).collect()
    }
}

/// The affine set `particular + { sum k_i g_i : 0 <= k_i < order_i }`.
///
/// Distinct coefficient tuples give distinct solutions, so enumeration and
/// uniform sampling are exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSpace {
    ring: RingSpec,
    particular: Vec<RingElem>,
    generators: Vec<(Vec<RingElem>, u64)>,
}

impl SolutionSpace {
    pub fn particular(&self) -> &[RingElem] {
        &self.particular
    }

    pub fn generators(&self) -> &[(Vec<RingElem>, u64)] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.particular.len()
    }

    pub fn count(&self) -> BigUint {
        self.generators.iter().fold(BigUint::from(1u32), |acc, (_, g)| acc * *g)
    }

    /// The count as `u128`, `None` on overflow.
    pub fn count_u128(&self) -> Option<u128> {
        self.generators.iter().try_fold(1u128, |acc, (_, g)| acc.checked_mul(*g as u128))
    }

    fn combine(&self, coeffs: &[u64]) -> Vec<RingElem> {
        let mut x = self.particular.clone();
        for ((g, _), &k) in self.generators.iter().zip(coeffs) {
            if k == 0 {
                continue;
            }
            let k = self.ring.from_int(k as i64);
            for (xi, gi) in x.iter_mut().zip(g) {
                *xi += k * *gi;
            }
        }
        x
    }

    /// A uniformly random element.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<RingElem> {
        let coeffs: Vec<u64> = self.generators.iter().map(|(_, g)| rng.gen_range(0..*g)).collect();
        self.combine(&coeffs)
    }

    /// Every element, in mixed-radix order of the coefficients.
    pub fn iter(&self) -> impl Iterator<Item = Vec<RingElem>> + '_ {
        let mut coeffs = vec![0u64; self.generators.len()];
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let x = self.combine(&coeffs);
            done = true;
            for (k, (_, g)) in coeffs.iter_mut().zip(&self.generators) {
                *k += 1;
                if *k < *g {
                    done = false;
                    break;
                }
                *k = 0;
            }
            Some(x)
        })
    }
}

/// Solvability, a witness and the exact number of solutions of `A x = b`.
pub fn solve(a: &Matrix, b: &[RingElem]) -> Result<SolutionReport> {
    LinearSystem::new(a).solve(b)
}

/// `|ker A|`.
pub fn kernel_count(a: &Matrix) -> BigUint {
    LinearSystem::new(a).kernel_count()
}

/// `|im A|`.
pub fn image_count(a: &Matrix) -> BigUint {
    LinearSystem::new(a).image_count()
}
