//! Exact integer linear algebra: Smith normal form, integer kernels,
//! cokernels and sublattice coordinates.
//!
//! Everything in here works on [`BigInt`] entries. Callers elsewhere in the
//! crate keep lattice vectors as `Vec<i64>` and convert at this boundary.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix stored in row-major order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from `i64` rows. `cols` is needed for the empty case.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            entries.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        Self::new(rows.len(), cols, entries)
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(columns: &[Vec<i64>], rows: usize) -> Result<Self> {
        Ok(Self::from_rows(columns, rows)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.entries[idx] += a * rhs.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j) * &v[j])
                    .fold(BigInt::zero(), |acc, x| acc + x)
            })
            .collect()
    }

    /// Applies the matrix to an `i64` vector, failing if the result overflows.
    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        to_i64_vec(&self.mul_vec(&big))
    }

    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>> {
        (0..self.rows).map(|i| to_i64_vec(&self.row(i))).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                    Some(i) => {
                        m.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1)
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs().is_one()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += k * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        for j in 0..self.cols {
            let delta = k * self.get(source, j);
            self.entries[target * self.cols + j] += delta;
        }
    }

    /// col[target] += k * col[source]
    fn add_col_multiple(&mut self, target: usize, source: usize, k: &BigInt) {
        for i in 0..self.rows {
            let delta = k * self.get(i, source);
            self.entries[i * self.cols + target] += delta;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.entries[idx] = -&self.entries[idx];
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let idx = i * self.cols + j;
            self.entries[idx] = -&self.entries[idx];
        }
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

pub fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(|x| x.to_i64().ok_or(Error::Overflow)).collect()
}

pub fn to_big_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// `left * A * right == diag(diag)` with `left`, `right` unimodular.
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub left: IntegerMatrix,
    pub diag: Vec<BigInt>,
    pub right: IntegerMatrix,
    left_inverse: IntegerMatrix,
    right_inverse: IntegerMatrix,
}

impl SnfDecomposition {
    pub fn left_inverse(&self) -> &IntegerMatrix {
        &self.left_inverse
    }

    pub fn right_inverse(&self) -> &IntegerMatrix {
        &self.right_inverse
    }

    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diag.iter().take_while(|d| !d.is_zero()).count()
    }

    /// The diagonal matrix with the shape of the decomposed matrix.
    pub fn diagonal_matrix(&self) -> IntegerMatrix {
        let mut d = IntegerMatrix::zeros(self.left.rows(), self.right.rows());
        for (i, x) in self.diag.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }
}

fn smallest_nonzero(
    m: &IntegerMatrix,
    rows: impl Iterator<Item = usize> + Clone,
    cols: impl Iterator<Item = usize> + Clone,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            let x = m.get(i, j);
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < m.get(bi, bj).abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Smith normal form by elementary row and column operations, always
/// pivoting on an entry of smallest absolute value.
pub fn smith_normal_form(a: &IntegerMatrix) -> SnfDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut left = IntegerMatrix::identity(m);
    let mut left_inv = IntegerMatrix::identity(m);
    let mut right = IntegerMatrix::identity(n);
    let mut right_inv = IntegerMatrix::identity(n);

    // Row op E on d: left <- E left, left_inv <- left_inv E^-1.
    // Column op E on d: right <- right E, right_inv <- E^-1 right_inv.
    let swap_rows = |d: &mut IntegerMatrix, l: &mut IntegerMatrix, li: &mut IntegerMatrix, a: usize, b: usize| {
        d.swap_rows(a, b);
        l.swap_rows(a, b);
        li.swap_cols(a, b);
    };
    let swap_cols = |d: &mut IntegerMatrix, r: &mut IntegerMatrix, ri: &mut IntegerMatrix, a: usize, b: usize| {
        d.swap_cols(a, b);
        r.swap_cols(a, b);
        ri.swap_rows(a, b);
    };
    let add_row = |d: &mut IntegerMatrix, l: &mut IntegerMatrix, li: &mut IntegerMatrix, t: usize, s: usize, k: &BigInt| {
        d.add_row_multiple(t, s, k);
        l.add_row_multiple(t, s, k);
        li.add_col_multiple(s, t, &-k);
    };
    let add_col = |d: &mut IntegerMatrix, r: &mut IntegerMatrix, ri: &mut IntegerMatrix, t: usize, s: usize, k: &BigInt| {
        d.add_col_multiple(t, s, k);
        r.add_col_multiple(t, s, k);
        ri.add_row_multiple(s, t, &-k);
    };

    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = smallest_nonzero(&d, t..m, t..n) else {
            break;
        };
        swap_rows(&mut d, &mut left, &mut left_inv, t, pi);
        swap_cols(&mut d, &mut right, &mut right_inv, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = d.get(i, t).div_floor(d.get(t, t));
                add_row(&mut d, &mut left, &mut left_inv, i, t, &-q);
                dirty |= !d.get(i, t).is_zero();
            }
            for j in t + 1..n {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = d.get(t, j).div_floor(d.get(t, t));
                add_col(&mut d, &mut right, &mut right_inv, j, t, &-q);
                dirty |= !d.get(t, j).is_zero();
            }
            if dirty {
                let row_best = smallest_nonzero(&d, t..m, t..t + 1);
                let col_best = smallest_nonzero(&d, t..t + 1, t..n);
                let pick = match (row_best, col_best) {
                    (Some(a), Some(b)) => {
                        if d.get(a.0, a.1).abs() <= d.get(b.0, b.1).abs() {
                            a
                        } else {
                            b
                        }
                    }
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => unreachable!("pivot vanished"),
                };
                swap_rows(&mut d, &mut left, &mut left_inv, t, pick.0);
                swap_cols(&mut d, &mut right, &mut right_inv, t, pick.1);
                continue;
            }
            let pivot = d.get(t, t).clone();
            let bad_row = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d.get(i, j).is_multiple_of(&pivot)));
            if let Some(i) = bad_row {
                add_row(&mut d, &mut left, &mut left_inv, t, i, &BigInt::one());
                continue;
            }
            break;
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            left.negate_row(t);
            left_inv.negate_col(t);
        }
        t += 1;
    }

    let diag = (0..m.min(n)).map(|i| d.get(i, i).clone()).collect();
    SnfDecomposition {
        left,
        diag,
        right,
        left_inverse: left_inv,
        right_inverse: right_inv,
    }
}

/// Row-style Hermite normal form of a set of integer vectors: a canonical
/// basis of the lattice they span, with positive pivots and reduced entries
/// above each pivot. Zero rows are dropped.
pub fn hermite_basis(vectors: &[Vec<BigInt>], dim: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = vectors.to_vec();
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    let mut col = 0;
    while col < dim && !rows.is_empty() {
        loop {
            rows.retain(|r| r.iter().any(|x| !x.is_zero()));
            let nonzero: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if nonzero.len() <= 1 {
                break;
            }
            let p = *nonzero
                .iter()
                .min_by_key(|&&i| rows[i][col].abs())
                .unwrap();
            let pivot_row = rows[p].clone();
            for &i in &nonzero {
                if i == p {
                    continue;
                }
                let q = rows[i][col].div_floor(&pivot_row[col]);
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| !rows[i][col].is_zero()) {
            let mut r = rows.remove(i);
            if r[col].is_negative() {
                r.iter_mut().for_each(|x| *x = -&*x);
            }
            out.push(r);
        }
        col += 1;
    }
    // reduce entries above pivots
    for k in 0..out.len() {
        let pc = (0..dim).find(|&c| !out[k][c].is_zero()).unwrap();
        let pivot = out[k].clone();
        for row in out.iter_mut().take(k) {
            let q = row[pc].div_floor(&pivot[pc]);
            if !q.is_zero() {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &q * y;
                }
            }
        }
    }
    out
}

/// Basis of the integer kernel `{x in Z^n : A x = 0}`, returned as the
/// columns of an `n x k` matrix in Hermite normal form (canonical).
pub fn kernel_basis(a: &IntegerMatrix) -> IntegerMatrix {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    let n = a.cols();
    let vectors: Vec<Vec<BigInt>> = (rank..n).map(|j| snf.right.column(j)).collect();
    let basis = hermite_basis(&vectors, n);
    let mut out = IntegerMatrix::zeros(n, basis.len());
    for (j, v) in basis.iter().enumerate() {
        for (i, x) in v.iter().enumerate() {
            out.set(i, j, x.clone());
        }
    }
    out
}

/// Convenience wrapper: kernel of the matrix whose rows are given.
pub fn kernel_vectors(rows: &[Vec<i64>], dim: usize) -> Result<Vec<Vec<i64>>> {
    let k = kernel_basis(&IntegerMatrix::from_rows(rows, dim)?);
    (0..k.cols()).map(|j| to_i64_vec(&k.column(j))).collect()
}

/// `coker(A) = Z^free_rank (+) Z/d_1 (+) ... (+) Z/d_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CokernelInvariants {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

pub fn cokernel_invariants(a: &IntegerMatrix) -> CokernelInvariants {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    CokernelInvariants {
        free_rank: a.rows() - rank,
        torsion: snf.diag[..rank].iter().filter(|d| !d.is_one()).cloned().collect(),
    }
}

/// A sublattice of `Z^ambient` with coordinates relative to an adapted basis.
///
/// If `L G R = D` is the Smith form of the generator matrix `G`, the
/// sublattice has basis `d_i * L^-1 e_i` for `i < rank`, and the last
/// `ambient - rank` coordinates of `L v` give the free part of
/// `Z^ambient / sublattice`.
#[derive(Clone, Debug)]
pub struct Sublattice {
    ambient: usize,
    rank: usize,
    diag: Vec<BigInt>,
    left: IntegerMatrix,
    left_inv: IntegerMatrix,
}

impl Sublattice {
    pub fn spanned_by(ambient: usize, generators: &[Vec<i64>]) -> Result<Self> {
        let g = IntegerMatrix::from_columns(generators, ambient)?;
        let snf = smith_normal_form(&g);
        let rank = snf.rank();
        Ok(Self {
            ambient,
            rank,
            diag: snf.diag[..rank].to_vec(),
            left_inv: snf.left_inverse().clone(),
            left: snf.left,
        })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// True iff `Z^ambient / self` is torsion-free.
    pub fn is_saturated(&self) -> bool {
        self.diag.iter().all(One::is_one)
    }

    pub fn basis(&self) -> Result<Vec<Vec<i64>>> {
        (0..self.rank)
            .map(|i| {
                let col: Vec<BigInt> = self.left_inv.column(i).iter().map(|x| x * &self.diag[i]).collect();
                to_i64_vec(&col)
            })
            .collect()
    }

    /// Coordinates of `v` in [`Sublattice::basis`], or `None` if `v` is not in the sublattice.
    pub fn coordinates(&self, v: &[i64]) -> Option<Vec<i64>> {
        if v.len() != self.ambient {
            return None;
        }
        let w = self.left.mul_vec(&to_big_vec(v));
        if w[self.rank..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        let mut out = Vec::with_capacity(self.rank);
        for (x, d) in w[..self.rank].iter().zip(&self.diag) {
            if !x.is_multiple_of(d) {
                return None;
            }
            out.push((x / d).to_i64()?);
        }
        Some(out)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn from_coordinates(&self, c: &[i64]) -> Result<Vec<i64>> {
        let mut w = vec![BigInt::zero(); self.ambient];
        for (i, x) in c.iter().enumerate() {
            w[i] = BigInt::from(*x) * &self.diag[i];
        }
        to_i64_vec(&self.left_inv.mul_vec(&w))
    }

    /// The quotient map onto the free part of `Z^ambient / self`.
    pub fn project(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: v.len(),
            });
        }
        let w = self.left.mul_vec(&to_big_vec(v));
        to_i64_vec(&w[self.rank..])
    }

    /// A section of [`Sublattice::project`].
    pub fn lift(&self, w: &[i64]) -> Result<Vec<i64>> {
        let mut full = vec![BigInt::zero(); self.ambient];
        for (i, x) in w.iter().enumerate() {
            full[self.rank + i] = BigInt::from(*x);
        }
        to_i64_vec(&self.left_inv.mul_vec(&full))
    }

    /// Matrix of [`Sublattice::project`].
    pub fn projection_matrix(&self) -> Result<Vec<Vec<i64>>> {
        (self.rank..self.ambient).map(|i| to_i64_vec(&self.left.row(i))).collect()
    }

    /// Matrix of [`Sublattice::lift`] (columns are lifts of unit vectors).
    pub fn lift_matrix(&self) -> Result<Vec<Vec<i64>>> {
        let cols: Vec<Vec<i64>> = (self.rank..self.ambient)
            .map(|j| to_i64_vec(&self.left_inv.column(j)))
            .collect::<Result<_>>()?;
        Ok(transpose_i64(&cols, self.ambient))
    }
}

/// An integer solution `c` of `sum_j c_j * columns[j] = rhs`, if one exists.
pub fn solve_integer(columns: &[Vec<i64>], rhs: &[i64]) -> Result<Option<Vec<i64>>> {
    let n = rhs.len();
    let a = IntegerMatrix::from_columns(columns, n)?;
    let snf = smith_normal_form(&a);
    let rank = snf.rank();
    let b = snf.left.mul_vec(&to_big_vec(rhs));
    if b[rank..].iter().any(|x| !x.is_zero()) {
        return Ok(None);
    }
    let mut y = vec![BigInt::zero(); columns.len()];
    for i in 0..rank {
        if !b[i].is_multiple_of(&snf.diag[i]) {
            return Ok(None);
        }
        y[i] = &b[i] / &snf.diag[i];
    }
    Ok(Some(to_i64_vec(&snf.right.mul_vec(&y))?))
}

/// Inverse of a square integer matrix with determinant `+-1`.
pub fn inverse_unimodular(m: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = m.len();
    let a: Vec<Vec<BigRational>> = m.iter().map(|r| r.iter().map(|&x| rational(x)).collect()).collect();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<BigRational> = (0..n).map(|i| rational(i64::from(i == j))).collect();
        let x = solve_rational(&a, &e, n).ok_or(Error::NotHomomorphism("matrix is singular".into()))?;
        let mut col = Vec::with_capacity(n);
        for v in x {
            if !v.is_integer() {
                return Err(Error::NotHomomorphism("matrix is not unimodular".into()));
            }
            col.push(v.to_integer().to_i64().ok_or(Error::Overflow)?);
        }
        cols.push(col);
    }
    Ok(transpose_i64(&cols, n))
}

/// Matrix whose `j`-th column is `f(e_j)`.
pub fn matrix_of<F>(rows: usize, cols: usize, mut f: F) -> Result<Vec<Vec<i64>>>
where
    F: FnMut(&[i64]) -> Result<Vec<i64>>,
{
    let mut columns = Vec::with_capacity(cols);
    for j in 0..cols {
        let e: Vec<i64> = (0..cols).map(|i| i64::from(i == j)).collect();
        let c = f(&e)?;
        if c.len() != rows {
            return Err(Error::DimensionMismatch {
                expected: rows,
                got: c.len(),
            });
        }
        columns.push(c);
    }
    let mut out = vec![vec![0i64; cols]; rows];
    for (j, c) in columns.iter().enumerate() {
        for (i, x) in c.iter().enumerate() {
            out[i][j] = *x;
        }
    }
    Ok(out)
}

pub fn transpose_i64(rows: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    (0..cols).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

pub fn mat_vec_i64(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// `a * b` for row-major `i64` matrices; `inner` is needed when `a` has no rows.
pub fn mat_mul_i64(a: &[Vec<i64>], b: &[Vec<i64>], b_cols: usize) -> Vec<Vec<i64>> {
    a.iter()
        .map(|row| {
            (0..b_cols)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum())
                .collect()
        })
        .collect()
}

pub fn identity_i64(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn gcd_of(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Divides out the gcd of the coordinates. The zero vector is left alone.
pub fn make_primitive(v: &mut [i64]) {
    let g = gcd_of(v);
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

/// Integer determinant of a square `i64` matrix.
pub fn det_i64(rows: &[Vec<i64>]) -> Result<BigInt> {
    let m = IntegerMatrix::from_rows(rows, rows.len())?;
    Ok(m.determinant())
}

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Solves `A x = b` over the rationals, returning one solution (free
/// variables set to zero) or `None` when the system is inconsistent.
pub fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational], unknowns: usize) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..unknowns {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[unknowns].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); unknowns];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][unknowns].clone();
    }
    Some(x)
}

/// Rank of an `i64` matrix over the rationals.
pub fn rank_i64(rows: &[Vec<i64>], cols: usize) -> usize {
    match IntegerMatrix::from_rows(rows, cols) {
        Ok(m) => smith_normal_form(&m).rank(),
        Err(_) => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[Vec<i64>], cols: usize) -> IntegerMatrix {
        IntegerMatrix::from_rows(rows, cols).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        to_big_vec(v)
    }

    fn check_snf(a: &IntegerMatrix) -> SnfDecomposition {
        let snf = smith_normal_form(a);
        let prod = snf.left.mul(a).mul(&snf.right);
        assert_eq!(prod, snf.diagonal_matrix());
        assert!(snf.left.is_unimodular());
        assert!(snf.right.is_unimodular());
        assert_eq!(snf.left.mul(snf.left_inverse()), IntegerMatrix::identity(a.rows()));
        assert_eq!(snf.right.mul(snf.right_inverse()), IntegerMatrix::identity(a.cols()));
        for w in snf.diag.windows(2) {
            if !w[1].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]));
            } else {
                assert!(w[1].is_zero());
            }
        }
        snf
    }

    #[test]
    fn snf_identity() {
        let snf = check_snf(&IntegerMatrix::identity(2));
        assert_eq!(snf.diag, big(&[1, 1]));
        assert_eq!(snf.left, IntegerMatrix::identity(2));
        assert_eq!(snf.right, IntegerMatrix::identity(2));
    }

    #[test]
    fn snf_two_by_two() {
        // By hand: gcd of entries is 2, |det| = 8, so the factors are (2, 4).
        let snf = check_snf(&m(&[vec![2, 4], vec![6, 8]], 2));
        assert_eq!(snf.diag, big(&[2, 4]));
    }

    #[test]
    fn snf_zero() {
        let snf = check_snf(&IntegerMatrix::zeros(2, 3));
        assert_eq!(snf.diag, big(&[0, 0]));
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&m(&[vec![1, 1]], 2));
        assert_eq!((k.rows(), k.cols()), (2, 1));
        assert_eq!(k.column(0), big(&[1, -1]));

        assert_eq!(kernel_basis(&IntegerMatrix::identity(3)).cols(), 0);

        let k = kernel_basis(&m(&[vec![2, 4]], 2));
        assert_eq!(k.column(0), big(&[2, -1]));
    }

    #[test]
    fn cokernel_examples() {
        let c = cokernel_invariants(&m(&[vec![1], vec![0]], 1));
        assert_eq!(c.free_rank, 1);
        assert!(c.torsion.is_empty());

        let c = cokernel_invariants(&m(&[vec![2]], 1));
        assert_eq!(c.free_rank, 0);
        assert_eq!(c.torsion, big(&[2]));

        let c = cokernel_invariants(&m(&[vec![1, 0], vec![0, 3]], 2));
        assert_eq!(c.free_rank, 0);
        assert_eq!(c.torsion, big(&[3]));
    }

    #[test]
    fn determinant_small() {
        assert_eq!(m(&[vec![2, 1], vec![1, 1]], 2).determinant(), BigInt::from(1));
        assert_eq!(
            m(&[vec![0, 1, 2], vec![1, 0, 3], vec![4, -3, 8]], 3).determinant(),
            BigInt::from(-2)
        );
    }

    #[test]
    fn sublattice_coordinates() {
        let s = Sublattice::spanned_by(2, &[vec![2, 0], vec![0, 3]]).unwrap();
        assert!(!s.is_saturated());
        assert!(s.contains(&[4, 3]));
        assert!(!s.contains(&[1, 0]));
        let c = s.coordinates(&[4, -6]).unwrap();
        assert_eq!(s.from_coordinates(&c).unwrap(), vec![4, -6]);

        let line = Sublattice::spanned_by(3, &[vec![1, 1, 0]]).unwrap();
        assert!(line.is_saturated());
        let w = line.project(&[0, 0, 1]).unwrap();
        assert_eq!(w.len(), 2);
        let back = line.lift(&w).unwrap();
        assert_eq!(line.project(&back).unwrap(), w);
        assert_eq!(line.project(&[3, 3, 0]).unwrap(), vec![0, 0]);
    }

    #[test]
    fn rational_solve() {
        let a = vec![
            vec![rational(1), rational(1)],
            vec![rational(1), rational(-1)],
        ];
        let x = solve_rational(&a, &[rational(3), rational(1)], 2).unwrap();
        assert_eq!(x, vec![rational(2), rational(1)]);
        let inconsistent = vec![vec![rational(1)], vec![rational(1)]];
        assert!(solve_rational(&inconsistent, &[rational(1), rational(2)], 1).is_none());
    }

    #[test]
    fn unimodular_inverse() {
        let m = vec![vec![2, 1], vec![1, 1]];
        let inv = inverse_unimodular(&m).unwrap();
        assert_eq!(mat_mul_i64(&m, &inv, 2), identity_i64(2));
        assert!(inverse_unimodular(&[vec![2]]).is_err());
    }

    #[test]
    fn integer_solve() {
        let cols = vec![vec![2, 0], vec![0, 3]];
        assert_eq!(solve_integer(&cols, &[4, 9]).unwrap(), Some(vec![2, 3]));
        assert_eq!(solve_integer(&cols, &[1, 0]).unwrap(), None);
        assert_eq!(solve_integer(&[], &[0, 0]).unwrap(), Some(vec![]));
        assert_eq!(solve_integer(&[], &[1, 0]).unwrap(), None);
    }

    proptest! {
        #[test]
        fn snf_is_exact(rows in 1usize..4, cols in 1usize..4, seed in proptest::collection::vec(-6i64..7, 16)) {
            let entries: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 4 + j]).collect()).collect();
            let a = m(&entries, cols);
            check_snf(&a);
        }

        #[test]
        fn kernel_is_saturated_and_annihilated(rows in 1usize..3, cols in 1usize..4, seed in proptest::collection::vec(-5i64..6, 12)) {
            let entries: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 4 + j]).collect()).collect();
            let a = m(&entries, cols);
            let k = kernel_basis(&a);
            prop_assert!(a.mul(&k).is_zero());
            prop_assert_eq!(k.cols(), cols - smith_normal_form(&a).rank());
            if k.cols() > 0 {
                prop_assert!(cokernel_invariants(&k).torsion.is_empty());
            }
        }
    }
}
