//! Prime fields and dense matrices over them.
//!
//! Every computation in the crate is exact: values are stored as residues in
//! `[0, p)` and all linear algebra is plain Gaussian elimination.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operands live over different fields (F_{0} vs F_{1})")]
    ModulusMismatch(u32, u32),
    #[error("matrix is not invertible")]
    NotInvertible,
}

/// A prime field `F_p`, verified at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Field {
    p: u32,
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut q = 2u64;
    while q * q <= p as u64 {
        if p as u64 % q == 0 {
            return false;
        }
        q += 1;
    }
    true
}

impl Field {
    pub fn new(p: u32) -> Result<Self, CoeffError> {
        if is_prime(p) {
            Ok(Field { p })
        } else {
            Err(CoeffError::NotPrime(p))
        }
    }

    #[inline]
    pub fn modulus(self) -> u32 {
        self.p
    }

    /// Reduces an arbitrary integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    pub fn elem(self, v: i64) -> FieldElement {
        FieldElement { value: self.reduce(v), modulus: self.p }
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
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
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        if a % self.p == 0 {
            None
        } else {
            Some(self.pow(a, self.p as u64 - 2))
        }
    }

    /// `(-1)^e` as a field element.
    #[inline]
    pub fn sign(self, e: i64) -> u32 {
        if e.rem_euclid(2) == 0 {
            1 % self.p
        } else {
            self.neg(1)
        }
    }

    pub fn units(self) -> impl Iterator<Item = u32> {
        1..self.p
    }

    pub fn elements(self) -> impl Iterator<Item = u32> {
        0..self.p
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// A residue together with its modulus.
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

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Option<FieldElement> {
        self.field().inv(self.value).map(|value| FieldElement { value, ..self })
    }
}

macro_rules! elem_binop {
    ($tr:ident, $method:ident, $op:ident) => {
        impl core::ops::$tr for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                assert_eq!(self.modulus, rhs.modulus, "field element modulus mismatch");
                FieldElement { value: self.field().$op(self.value, rhs.value), modulus: self.modulus }
            }
        }
    };
}

elem_binop!(Add, add, add);
elem_binop!(Sub, sub, sub);
elem_binop!(Mul, mul, mul);

impl core::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { value: self.field().neg(self.value), modulus: self.modulus }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Row-major dense matrix over a prime field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DenseMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Solution set of `A x = b`: `particular + span(kernel)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<u32>,
    pub kernel: Vec<Vec<u32>>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub matrix: DenseMatrix,
    pub pivots: Vec<usize>,
}

impl DenseMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        DenseMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn diagonal(field: Field, diag: &[u32]) -> Self {
        let mut m = Self::zeros(field, diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds a matrix from signed integer rows, reducing mod `p`.
    pub fn from_rows(field: Field, rows: &[&[i64]]) -> Result<Self, CoeffError> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(field, rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(CoeffError::DimensionMismatch { expected: cols, found: row.len() });
            }
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, field.reduce(v));
            }
        }
        Ok(m)
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u32) -> Self {
        let mut m = Self::zeros(field, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = f(r, c) % field.p;
                m.set(r, c, v);
            }
        }
        m
    }

    /// Column matrix from a vector.
    pub fn column(field: Field, v: &[u32]) -> Self {
        Self::from_fn(field, v.len(), 1, |r, _| v[r])
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.p;
    }

    pub fn entry(&self, r: usize, c: usize) -> FieldElement {
        FieldElement { value: self.get(r, c), modulus: self.field.p }
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Nonzero entries as `(row, col, value)` in row-major order.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.data.iter().enumerate().filter(|(_, &v)| v != 0).map(move |(idx, &v)| (idx / self.cols, idx % self.cols, v))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field, self.cols, self.rows, |r, c| self.get(c, r))
    }

    fn check_field(&self, other: &Self) -> Result<(), CoeffError> {
        if self.field != other.field {
            Err(CoeffError::ModulusMismatch(self.field.p, other.field.p))
        } else {
            Ok(())
        }
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, CoeffError> {
        self.check_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(CoeffError::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let p = self.field.p as u64;
        let mut out = Self::zeros(self.field, self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k) as u64;
                if a == 0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.get(k, c) as u64;
                    if b != 0 {
                        let idx = r * out.cols + c;
                        out.data[idx] = ((out.data[idx] as u64 + a * b) % p) as u32;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix product; panics on shape mismatch (an internal invariant violation).
    pub fn mul(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r).iter().zip(v).fold(0u32, |acc, (&a, &b)| self.field.add(acc, self.field.mul(a, b)))
            })
            .collect()
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, CoeffError> {
        self.check_field(rhs)?;
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(CoeffError::DimensionMismatch { expected: self.rows * self.cols, found: rhs.rows * rhs.cols });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| self.field.add(a, b)).collect();
        Ok(DenseMatrix { data, ..self.clone() })
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(self.field.neg(1)))
    }

    pub fn scale(&self, c: u32) -> Self {
        let data = self.data.iter().map(|&a| self.field.mul(a, c)).collect();
        DenseMatrix { data, ..self.clone() }
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(self.field, rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]))
    }

    /// Reduced row echelon form.
    pub fn rref(&self) -> Echelon {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if piv != row {
                for c in 0..m.cols {
                    m.data.swap(piv * m.cols + c, row * m.cols + c);
                }
            }
            let inv = f.inv(m.get(row, col)).expect("nonzero pivot");
            for c in col..m.cols {
                let v = f.mul(m.get(row, c), inv);
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        // eliminate along the shorter side
        if self.rows > self.cols {
            self.transpose().rref().pivots.len()
        } else {
            self.rref().pivots.len()
        }
    }

    /// Basis of the right kernel `{x : A x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<u32>> {
        let ech = self.rref();
        kernel_from_echelon(&ech, self.cols)
    }

    /// Kernel basis together with the free column of each vector; vector `t`
    /// is 1 at `free[t]` and 0 at every other free column, so the free
    /// columns give coordinates on the kernel.
    pub fn kernel_with_free(&self) -> (Vec<Vec<u32>>, Vec<usize>) {
        let ech = self.rref();
        let basis = kernel_from_echelon(&ech, self.cols);
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let free = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        (basis, free)
    }

    /// Parametrizes `{x : A x = b}`; `Ok(None)` when the system is inconsistent.
    pub fn solve_affine(&self, b: &[u32]) -> Result<Option<AffineSolution>, CoeffError> {
        if b.len() != self.rows {
            return Err(CoeffError::DimensionMismatch { expected: self.rows, found: b.len() });
        }
        let f = self.field;
        let aug = Self::from_fn(f, self.rows, self.cols + 1, |r, c| if c < self.cols { self.get(r, c) } else { b[r] % f.p });
        let ech = aug.rref();
        if ech.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut particular = vec![0; self.cols];
        for (r, &pc) in ech.pivots.iter().enumerate() {
            particular[pc] = ech.matrix.get(r, self.cols);
        }
        let kernel = kernel_from_echelon(&ech, self.cols);
        Ok(Some(AffineSolution { particular, kernel }))
    }

    pub fn inverse(&self) -> Result<Self, CoeffError> {
        if !self.is_square() {
            return Err(CoeffError::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let aug = Self::from_fn(self.field, n, 2 * n, |r, c| {
            if c < n {
                self.get(r, c)
            } else if c - n == r {
                1
            } else {
                0
            }
        });
        let ech = aug.rref();
        if ech.pivots.len() < n || (n > 0 && ech.pivots[n - 1] >= n) {
            return Err(CoeffError::NotInvertible);
        }
        Ok(Self::from_fn(self.field, n, n, |r, c| ech.matrix.get(r, n + c)))
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.nonzero_entries().all(|(r, c, _)| r >= c)
    }

    pub fn is_strictly_lower_triangular(&self) -> bool {
        self.nonzero_entries().all(|(r, c, _)| r > c)
    }

    pub fn is_diagonal(&self) -> bool {
        self.nonzero_entries().all(|(r, c, _)| r == c)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == u32::from(r == c)))
    }

    pub fn diag(&self) -> Vec<u32> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.field, self.rows + other.rows, self.cols + other.cols);
        for (r, c, v) in self.nonzero_entries() {
            m.set(r, c, v);
        }
        for (r, c, v) in other.nonzero_entries() {
            m.set(self.rows + r, self.cols + c, v);
        }
        m
    }
}

fn kernel_from_echelon(ech: &Echelon, ncols: usize) -> Vec<Vec<u32>> {
    let f = ech.matrix.field;
    let mut is_pivot = vec![false; ncols];
    for &p in &ech.pivots {
        if p < ncols {
            is_pivot[p] = true;
        }
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0; ncols];
        v[free] = 1;
        for (r, &pc) in ech.pivots.iter().enumerate() {
            if pc < ncols {
                v[pc] = f.neg(ech.matrix.get(r, free));
            }
        }
        basis.push(v);
    }
    basis
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DenseMatrix<{}>{}x{}[", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

/// Enumerates all vectors of `F_p^dim` in lexicographic order, calling `visit`
/// until it returns `false`.
pub fn for_each_vector(field: Field, dim: usize, mut visit: impl FnMut(&[u32]) -> bool) {
    let mut v = vec![0u32; dim];
    loop {
        if !visit(&v) {
            return;
        }
        let mut i = dim;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            v[i] += 1;
            if v[i] < field.p {
                break;
            }
            v[i] = 0;
        }
    }
}

/// Linear combination `Σ coeffs[t] · vectors[t]`.
pub fn combine(field: Field, coeffs: &[u32], vectors: &[Vec<u32>], len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for (&c, v) in coeffs.iter().zip(vectors) {
        if c == 0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(v) {
            *o = field.add(*o, field.mul(c, x));
        }
    }
    out
}

/// Searches `span(vectors)` for a vector with no zero coordinate.
///
/// Only an independent subset is enumerated, so the search visits `p^r`
/// combinations with `r` the rank of the span. Returns the coefficients (one
/// per input vector) of a hit, `Ok(None)` if the span has none, and
/// `Err(r)` if `p^r` exceeds `bound`.
pub fn find_nowhere_zero(field: Field, vectors: &[Vec<u32>], len: usize, bound: u64) -> Result<Option<Vec<u32>>, usize> {
    if len == 0 {
        return Ok(Some(vec![0; vectors.len()]));
    }
    let m = DenseMatrix::from_fn(field, len, vectors.len(), |r, c| vectors[c][r]);
    let pivots = m.rref().pivots;
    let r = pivots.len();
    let size = (field.p as u64).checked_pow(r as u32);
    if size.map_or(true, |s| s > bound) {
        return Err(r);
    }
    let basis: Vec<Vec<u32>> = pivots.iter().map(|&c| vectors[c].clone()).collect();
    let mut found = None;
    for_each_vector(field, r, |coeffs| {
        let v = combine(field, coeffs, &basis, len);
        if v.iter().all(|&x| x != 0) {
            let mut full = vec![0; vectors.len()];
            for (&c, &x) in pivots.iter().zip(coeffs) {
                full[c] = x;
            }
            found = Some(full);
            return false;
        }
        true
    });
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> Field {
        Field::new(p).unwrap()
    }

    #[test]
    fn field_construction() {
        assert_eq!(f(2).modulus(), 2);
        assert_eq!(f(3).modulus(), 3);
        assert_eq!(Field::new(4), Err(CoeffError::NotPrime(4)));
        assert_eq!(Field::new(1), Err(CoeffError::NotPrime(1)));
        assert_eq!(Field::new(0), Err(CoeffError::NotPrime(0)));
        assert!(Field::new(7919).is_ok());
    }

    #[test]
    fn inverses() {
        let k = f(7);
        for a in k.units() {
            assert_eq!(k.mul(a, k.inv(a).unwrap()), 1);
        }
        assert_eq!(k.inv(0), None);
        let a = k.elem(-3);
        assert_eq!(a.value(), 4);
        assert_eq!((a * a.inv().unwrap()).value(), 1);
    }

    #[test]
    fn rank_examples() {
        let k = f(2);
        assert_eq!(DenseMatrix::zeros(k, 0, 0).rank(), 0);
        assert_eq!(DenseMatrix::identity(k, 5).rank(), 5);
        assert_eq!(DenseMatrix::from_rows(k, &[&[1, 1], &[1, 1]]).unwrap().rank(), 1);
    }

    #[test]
    fn solve_affine_examples() {
        let k = f(5);
        let id = DenseMatrix::identity(k, 3);
        let sol = id.solve_affine(&[1, 2, 3]).unwrap().unwrap();
        assert_eq!(sol.particular, vec![1, 2, 3]);
        assert!(sol.kernel.is_empty());

        let zero = DenseMatrix::zeros(k, 2, 3);
        let sol = zero.solve_affine(&[0, 0]).unwrap().unwrap();
        assert_eq!(sol.kernel.len(), 3);
        assert_eq!(zero.solve_affine(&[0, 1]).unwrap(), None);

        assert!(matches!(id.solve_affine(&[1]), Err(CoeffError::DimensionMismatch { .. })));
    }

    #[test]
    fn inverse_roundtrip() {
        let k = f(3);
        let m = DenseMatrix::from_rows(k, &[&[1, 0, 0], &[2, 2, 0], &[1, 1, 1]]).unwrap();
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        let sing = DenseMatrix::from_rows(k, &[&[1, 1], &[1, 1]]).unwrap();
        assert_eq!(sing.inverse(), Err(CoeffError::NotInvertible));
    }

    #[test]
    fn vector_enumeration_is_lexicographic() {
        let mut seen = Vec::new();
        for_each_vector(f(2), 2, |v| {
            seen.push(v.to_vec());
            true
        });
        assert_eq!(seen, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let mut count = 0;
        for_each_vector(f(3), 0, |_| {
            count += 1;
            true
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn nowhere_zero_search() {
        // span{(1,1)} over F2 contains (1,1)
        assert_eq!(find_nowhere_zero(f(2), &[vec![1, 1]], 2, 100), Ok(Some(vec![1])));
        // span{(1,0),(0,1)} over F3: (1,1)
        let hit = find_nowhere_zero(f(3), &[vec![1, 0], vec![0, 1]], 2, 100).unwrap().unwrap();
        assert_eq!(hit, vec![1, 1]);
        assert_eq!(find_nowhere_zero(f(2), &[vec![1, 0]], 2, 100), Ok(None));
        assert_eq!(find_nowhere_zero(f(2), &[vec![1, 0], vec![0, 1]], 2, 3), Err(2));
    }

    #[test]
    fn kernel_coordinates_are_free_columns() {
        let a = DenseMatrix::from_rows(f(5), &[&[1, 2, 0, 1], &[0, 0, 1, 3]]).unwrap();
        let (basis, free) = a.kernel_with_free();
        assert_eq!(free, vec![1, 3]);
        for (t, v) in basis.iter().enumerate() {
            assert!(a.mul_vec(v).iter().all(|&x| x == 0));
            for (u, &c) in free.iter().enumerate() {
                assert_eq!(v[c], u32::from(t == u));
            }
        }
    }
}
