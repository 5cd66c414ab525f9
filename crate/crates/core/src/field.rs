//! Exact arithmetic over prime fields GF(p) and dense matrices over them.
//!
//! Elimination always picks the leftmost pivot column and, within it, the
//! first row holding a nonzero entry, so every derived quantity (bases,
//! solutions) is reproducible.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("modulus {0} exceeds the supported range")]
    TooLarge(u32),
}

/// Largest supported modulus; products of two residues must fit in a `u64`.
pub const MAX_MODULUS: u32 = 1 << 31;

/// A prime field GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    p: u32,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn new(p: u32) -> Result<Self, FieldError> {
        if p >= MAX_MODULUS {
            return Err(FieldError::TooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Field { p })
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, v: u64) -> u32 {
        (v % self.p as u64) as u32
    }

    /// Reduces a signed integer into `[0, p)`.
    pub fn from_i64(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        if s >= self.p as u64 {
            (s - self.p as u64) as u32
        } else {
            s as u32
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.p as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.p) {
            return None;
        }
        Some(self.pow(a, self.p as u64 - 2))
    }

    pub fn element(self, v: u64) -> FieldElement {
        FieldElement {
            value: self.reduce(v),
            modulus: self.p,
        }
    }

    /// All elements `0..p` in increasing order.
    pub fn elements(self) -> impl Iterator<Item = u32> {
        0..self.p
    }
}

/// A single residue together with its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    modulus: u32,
}

impl FieldElement {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    fn field(self) -> Field {
        Field { p: self.modulus }
    }

    pub fn inv(self) -> Option<FieldElement> {
        self.field().inv(self.value).map(|value| FieldElement {
            value,
            modulus: self.modulus,
        })
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, other: FieldElement) {
        assert_eq!(
            self.modulus, other.modulus,
            "field elements from different fields"
        );
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        self.check(rhs);
        FieldElement {
            value: self.field().add(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self.check(rhs);
        FieldElement {
            value: self.field().sub(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.check(rhs);
        FieldElement {
            value: self.field().mul(self.value, rhs.value),
            modulus: self.modulus,
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            value: self.field().neg(self.value),
            modulus: self.modulus,
        }
    }
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "FieldMatrix<GF({})> {}x{}",
            self.field.p, self.rows, self.cols
        )?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Result of reducing a matrix to reduced row echelon form.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub matrix: FieldMatrix,
    /// Pivot column of each nonzero row, in order.
    pub pivots: Vec<usize>,
}

impl FieldMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.p;
        }
        m
    }

    /// Builds a matrix from rows of raw integers, reducing each entry mod p.
    ///
    /// # Panics
    /// If the rows have different lengths.
    pub fn from_rows<R: AsRef<[u32]>>(field: Field, rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        Self::from_rows_with_cols(field, rows, cols)
    }

    /// Like [`FieldMatrix::from_rows`] but with an explicit column count, so
    /// that zero-row matrices keep their width.
    pub fn from_rows_with_cols<R: AsRef<[u32]>>(field: Field, rows: &[R], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&v| v % field.p));
        }
        FieldMatrix {
            field,
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_fn(
        field: Field,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> u32,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c) % field.p);
            }
        }
        FieldMatrix {
            field,
            rows,
            cols,
            data,
        }
    }

    /// A single column vector.
    pub fn column_vector(field: Field, v: &[u32]) -> Self {
        Self::from_fn(field, v.len(), 1, |r, _| v[r])
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn element(&self, r: usize, c: usize) -> FieldElement {
        FieldElement {
            value: self.get(r, c),
            modulus: self.field.p,
        }
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.p;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field, self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Matrix product.
    ///
    /// # Panics
    /// On dimension or field mismatch.
    pub fn mul(&self, other: &FieldMatrix) -> FieldMatrix {
        assert_eq!(self.field, other.field, "field mismatch");
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let p = self.field.p as u64;
        let mut out = FieldMatrix::zeros(self.field, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * other.cols + c;
                    out.data[idx] =
                        ((out.data[idx] as u64 + a * other.get(k, c) as u64) % p) as u32;
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        let p = self.field.p as u64;
        (0..self.rows)
            .map(|r| {
                let s = self
                    .row(r)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p);
                s as u32
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &FieldMatrix) -> FieldMatrix {
        assert_eq!(self.field, other.field, "field mismatch");
        assert_eq!(self.rows, other.rows, "row count mismatch");
        Self::from_fn(self.field, self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols {
                self.get(r, c)
            } else {
                other.get(r, c - self.cols)
            }
        })
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &FieldMatrix) -> FieldMatrix {
        assert_eq!(self.field, other.field, "field mismatch");
        assert_eq!(self.cols, other.cols, "column count mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        FieldMatrix {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> FieldMatrix {
        Self::from_fn(self.field, rows.len(), self.cols, |r, c| {
            self.get(rows[r], c)
        })
    }

    pub fn select_cols(&self, cols: &[usize]) -> FieldMatrix {
        Self::from_fn(self.field, self.rows, cols.len(), |r, c| {
            self.get(r, cols[c])
        })
    }

    /// Columns `range` as a new matrix.
    pub fn col_block(&self, range: std::ops::Range<usize>) -> FieldMatrix {
        let cols: Vec<usize> = range.collect();
        self.select_cols(&cols)
    }

    pub fn scale(&self, s: u32) -> FieldMatrix {
        let f = self.field;
        FieldMatrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f.mul(v, s)).collect(),
        }
    }

    /// Reduced row echelon form with leftmost-pivot, first-nonzero-row
    /// tie-breaking.
    pub fn rref(&self) -> Echelon {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0usize;
        for c in 0..m.cols {
            if lead == m.rows {
                break;
            }
            let Some(pr) = (lead..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            if pr != lead {
                for k in 0..m.cols {
                    m.data.swap(pr * m.cols + k, lead * m.cols + k);
                }
            }
            let inv = f.inv(m.get(lead, c)).expect("pivot is nonzero");
            for k in 0..m.cols {
                let idx = lead * m.cols + k;
                m.data[idx] = f.mul(m.data[idx], inv);
            }
            for r in 0..m.rows {
                if r == lead {
                    continue;
                }
                let factor = m.get(r, c);
                if factor == 0 {
                    continue;
                }
                for k in 0..m.cols {
                    let v = f.mul(factor, m.data[lead * m.cols + k]);
                    let idx = r * m.cols + k;
                    m.data[idx] = f.sub(m.data[idx], v);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right null space `{x : self·x = 0}`, one basis vector per
    /// column. Basis vector `k` has a 1 in the `k`-th free column and zeros in
    /// the other free columns.
    pub fn null_space(&self) -> FieldMatrix {
        let f = self.field;
        let Echelon { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = FieldMatrix::zeros(f, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            basis.set(fc, k, 1);
            for (r, &pc) in pivots.iter().enumerate() {
                basis.set(pc, k, f.neg(matrix.get(r, fc)));
            }
        }
        basis
    }

    /// Basis of the left null space `{y : y·self = 0}`, one basis vector per row.
    pub fn left_null_space(&self) -> FieldMatrix {
        self.transpose().null_space().transpose()
    }

    /// Solves `self · x = b`, returning the solution whose free variables are
    /// all zero, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &FieldMatrix) -> Option<FieldMatrix> {
        assert_eq!(self.rows, b.rows, "row count mismatch");
        assert_eq!(self.field, b.field, "field mismatch");
        let aug = self.hstack(b);
        let Echelon { matrix, pivots } = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = FieldMatrix::zeros(self.field, self.cols, b.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            for k in 0..b.cols {
                x.set(pc, k, matrix.get(r, self.cols + k));
            }
        }
        Some(x)
    }

    /// Determinant of a square matrix.
    pub fn det(&self) -> u32 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let f = self.field;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = 1 % f.p;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&r| m.get(r, c) != 0) else {
                return 0;
            };
            if pr != c {
                for k in 0..n {
                    m.data.swap(pr * n + k, c * n + k);
                }
                det = f.neg(det);
            }
            let pivot = m.get(c, c);
            det = f.mul(det, pivot);
            let inv = f.inv(pivot).expect("pivot is nonzero");
            for r in c + 1..n {
                let factor = f.mul(m.get(r, c), inv);
                if factor == 0 {
                    continue;
                }
                for k in c..n {
                    let v = f.mul(factor, m.get(c, k));
                    let idx = r * n + k;
                    m.data[idx] = f.sub(m.data[idx], v);
                }
            }
        }
        det
    }

    /// Whether the column vector `v` lies in the column span of `self`.
    pub fn spans_column(&self, v: &[u32]) -> bool {
        let b = FieldMatrix::column_vector(self.field, v);
        self.solve(&b).is_some()
    }
}

/// Dot product of two residue vectors.
pub fn dot(field: Field, a: &[u32], b: &[u32]) -> u32 {
    assert_eq!(a.len(), b.len(), "dimension mismatch");
    let p = field.modulus() as u64;
    (a.iter()
        .zip(b)
        .fold(0u64, |acc, (&x, &y)| (acc + x as u64 * y as u64) % p)) as u32
}

/// Iterates over every vector of GF(p)^n in lexicographic order (last
/// coordinate fastest). Intended for small exhaustive checks.
pub fn all_vectors(field: Field, n: usize) -> impl Iterator<Item = Vec<u32>> {
    let p = field.modulus();
    let total = (p as u128)
        .checked_pow(n as u32)
        .expect("enumeration too large");
    let total = u64::try_from(total).expect("enumeration too large");
    (0..total).map(move |mut idx| {
        let mut v = vec![0u32; n];
        for slot in v.iter_mut().rev() {
            *slot = (idx % p as u64) as u32;
            idx /= p as u64;
        }
        v
    })
}
