//! Dense integer matrices and Smith normal form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed for the zero-row case.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (j, x) in row.iter().enumerate() {
                m.data[i * cols + j] = x.clone().into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(|r| r.to_vec()).collect()
    }

    /// Rows as `i64`, or `None` if some entry does not fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).to_i64()).collect())
            .collect()
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    /// Determinant of a square matrix (fraction-free Bareiss elimination).
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    /// Rank over the field with `p` elements.
    pub fn rank_mod_p(&self, p: u64) -> usize {
        let p_big = BigInt::from(p);
        let mut a: Vec<Vec<u64>> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).mod_floor(&p_big).to_u64().unwrap())
                    .collect()
            })
            .collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(piv) = (rank..self.rows).find(|&i| a[i][col] != 0) else {
                continue;
            };
            a.swap(rank, piv);
            let inv = mod_pow(a[rank][col], p - 2, p);
            for j in col..self.cols {
                a[rank][j] = a[rank][j] * inv % p;
            }
            for i in 0..self.rows {
                if i != rank && a[i][col] != 0 {
                    let f = a[i][col];
                    for j in col..self.cols {
                        a[i][j] = (a[i][j] + p - f * a[rank][j] % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k · row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if !s.is_zero() {
                let v = s * k;
                self.data[dst * self.cols + j] += v;
            }
        }
    }

    /// col[dst] += k · col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src];
            if !s.is_zero() {
                let v = s * k;
                self.data[i * self.cols + dst] += v;
            }
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = std::mem::take(&mut self.data[r * self.cols + j]);
            self.data[r * self.cols + j] = -v;
        }
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// `u · a · v = s` with `u`, `v` unimodular and `s` diagonal, its entries
/// non-negative and each dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub s: IntegerMatrix,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    /// Non-zero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.s.diagonal().into_iter().filter(|d| !d.is_zero()).collect()
    }
}

pub fn smith_normal_form(a: &IntegerMatrix) -> SmithForm {
    let mut calc = SnfCalc {
        s: a.clone(),
        u: Some(IntegerMatrix::identity(a.rows)),
        v: Some(IntegerMatrix::identity(a.cols)),
    };
    calc.run();
    SmithForm {
        s: calc.s,
        u: calc.u.unwrap(),
        v: calc.v.unwrap(),
    }
}

/// Diagonal of the Smith form without tracking the transforms.
pub fn smith_diagonal(a: &IntegerMatrix) -> Vec<BigInt> {
    let mut calc = SnfCalc {
        s: a.clone(),
        u: None,
        v: None,
    };
    calc.run();
    calc.s.diagonal()
}

struct SnfCalc {
    s: IntegerMatrix,
    u: Option<IntegerMatrix>,
    v: Option<IntegerMatrix>,
}

impl SnfCalc {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.s.swap_rows(a, b);
        if let Some(u) = &mut self.u {
            u.swap_rows(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.s.swap_cols(a, b);
        if let Some(v) = &mut self.v {
            v.swap_cols(a, b);
        }
    }

    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.s.add_row(dst, src, k);
        if let Some(u) = &mut self.u {
            u.add_row(dst, src, k);
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.s.add_col(dst, src, k);
        if let Some(v) = &mut self.v {
            v.add_col(dst, src, k);
        }
    }

    fn negate_row(&mut self, r: usize) {
        self.s.negate_row(r);
        if let Some(u) = &mut self.u {
            u.negate_row(r);
        }
    }

    /// Position of a non-zero entry of least absolute value in the block
    /// starting at `(t, t)`.
    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.s.rows {
            for j in t..self.s.cols {
                let x = self.s.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bi, bj)) => x.magnitude() < self.s.get(bi, bj).magnitude(),
                };
                if better {
                    best = Some((i, j));
                    if x.magnitude().is_one() {
                        return best;
                    }
                }
            }
        }
        best
    }

    fn run(&mut self) {
        let (rows, cols) = (self.s.rows, self.s.cols);
        for t in 0..rows.min(cols) {
            let Some((pi, pj)) = self.min_pivot(t) else {
                return;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                // Clear column t and row t by division with remainder; any
                // remainder is strictly smaller than the pivot.
                let mut dirty = false;
                for i in t + 1..rows {
                    if self.s.get(i, t).is_zero() {
                        continue;
                    }
                    let q = self.s.get(i, t).div_floor(self.s.get(t, t));
                    self.add_row(i, t, &-q);
                    if !self.s.get(i, t).is_zero() {
                        dirty = true;
                    }
                }
                for j in t + 1..cols {
                    if self.s.get(t, j).is_zero() {
                        continue;
                    }
                    let q = self.s.get(t, j).div_floor(self.s.get(t, t));
                    self.add_col(j, t, &-q);
                    if !self.s.get(t, j).is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    self.repivot_cross(t);
                    continue;
                }
                // Enforce divisibility of the remaining block.
                let p = self.s.get(t, t).clone();
                let offender = (t + 1..rows)
                    .find(|&i| (t + 1..cols).any(|j| !self.s.get(i, j).is_multiple_of(&p)));
                match offender {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.s.get(t, t).is_negative() {
                self.negate_row(t);
            }
        }
    }

    /// Moves the least non-zero entry of row t / column t onto the diagonal.
    fn repivot_cross(&mut self, t: usize) {
        let mut best = (t, t);
        let mut best_mag = self.s.get(t, t).magnitude().clone();
        for i in t + 1..self.s.rows {
            let x = self.s.get(i, t);
            if !x.is_zero() && x.magnitude() < &best_mag {
                best_mag = x.magnitude().clone();
                best = (i, t);
            }
        }
        for j in t + 1..self.s.cols {
            let x = self.s.get(t, j);
            if !x.is_zero() && x.magnitude() < &best_mag {
                best_mag = x.magnitude().clone();
                best = (t, j);
            }
        }
        self.swap_rows(t, best.0);
        self.swap_cols(t, best.1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>], cols: usize) -> IntegerMatrix {
        IntegerMatrix::from_rows(rows, cols)
    }

    fn check(a: &IntegerMatrix) -> SmithForm {
        let f = smith_normal_form(a);
        assert_eq!(f.u.mul(a).mul(&f.v), f.s);
        assert!(f.s.is_diagonal());
        assert!(f.u.determinant().magnitude().is_one());
        assert!(f.v.determinant().magnitude().is_one());
        let d = f.s.diagonal();
        for w in d.windows(2) {
            assert!(!w[0].is_negative());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        assert_eq!(smith_diagonal(a), d);
        f
    }

    #[test]
    fn single_row() {
        let f = check(&m(&[vec![2, 2]], 2));
        assert_eq!(f.s, m(&[vec![2, 0]], 2));
    }

    #[test]
    fn identity_is_fixed() {
        let f = check(&IntegerMatrix::identity(2));
        assert_eq!(f.s, IntegerMatrix::identity(2));
    }

    #[test]
    fn triangle_237_relation_matrix() {
        // gcd of entries is 1; gcd of the 2×2 minors 6, 14, -21 is 1.
        let f = check(&m(&[vec![2, 0], vec![0, 3], vec![7, 7]], 2));
        assert_eq!(f.s, m(&[vec![1, 0], vec![0, 1], vec![0, 0]], 2));
    }

    #[test]
    fn coprime_torsion_collapses_to_one_factor() {
        let f = check(&m(&[vec![3, 0], vec![0, 5]], 2));
        assert_eq!(f.s.diagonal(), vec![BigInt::from(1), BigInt::from(15)]);
    }

    #[test]
    fn degenerate_shapes() {
        check(&IntegerMatrix::zeros(0, 3));
        check(&IntegerMatrix::zeros(3, 0));
        check(&IntegerMatrix::zeros(2, 2));
        let f = check(&m(&[vec![0, 0, -4], vec![0, 6, 0]], 3));
        assert_eq!(f.s.diagonal(), vec![BigInt::from(2), BigInt::from(12)]);
    }

    #[test]
    fn determinant_and_mod_p_rank() {
        let a = m(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]], 3);
        assert_eq!(a.determinant(), BigInt::from(18));
        assert_eq!(a.rank_mod_p(5), 3);
        assert_eq!(a.rank_mod_p(2), 2);
        assert_eq!(a.rank_mod_p(3), 2);
        assert_eq!(m(&[vec![2, 2]], 2).rank_mod_p(2), 0);
    }
}
