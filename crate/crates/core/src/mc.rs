//! Filtered graded complexes over a point.
//!
//! Generators are indexed `0..n` (0-based) in decreasing order of critical
//! value, generator `i` has degree `-μ(i)` and the filtration step `ᵏV` is
//! spanned by the generators with index `≥ k`. Differentials are strictly
//! lower triangular and morphisms lower triangular.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::coeff::{CoeffError, DenseMatrix, Field};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum McError {
    #[error("d does not square to zero")]
    NotSquareZero,
    #[error("entry <{row}|d|{col}> has the wrong degree")]
    DegreeViolation { row: usize, col: usize },
    #[error("entry <{row}|d|{col}> is not strictly below the diagonal")]
    FiltrationViolation { row: usize, col: usize },
    #[error("entry <{row}|phi|{col}> breaks the filtration or the degree")]
    NotFiltered { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("bases do not match")]
    BasisMismatch,
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// Generator degrees of a filtered graded module.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedBasis {
    mu: Vec<i32>,
}

impl GradedBasis {
    pub fn new(mu: Vec<i32>) -> Self {
        GradedBasis { mu }
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn mu(&self) -> &[i32] {
        &self.mu
    }

    pub fn degree(&self, i: usize) -> i32 {
        -self.mu[i]
    }

    pub fn degrees(&self) -> Vec<i32> {
        self.mu.iter().map(|m| -m).collect()
    }
}

/// A square-zero, degree one, strictly lower triangular operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MCObject {
    basis: GradedBasis,
    d: DenseMatrix,
}

impl MCObject {
    pub fn new(basis: GradedBasis, d: DenseMatrix) -> Result<Self, McError> {
        let obj = Self::new_unchecked(basis, d)?;
        obj.check()?;
        Ok(obj)
    }

    /// Only the shape is checked; see [`MCObject::check`].
    pub fn new_unchecked(basis: GradedBasis, d: DenseMatrix) -> Result<Self, McError> {
        let n = basis.len();
        if d.rows() != n || d.cols() != n {
            return Err(McError::DimensionMismatch { expected: n, found: d.rows().max(d.cols()) });
        }
        Ok(MCObject { basis, d })
    }

    /// Builds an object from 0-based `(j, i, value)` triples for `<j|d|i>`.
    pub fn from_entries(field: Field, mu: Vec<i32>, entries: &[(usize, usize, i64)]) -> Result<Self, McError> {
        let n = mu.len();
        let mut d = DenseMatrix::zeros(field, n, n);
        for &(j, i, v) in entries {
            if j >= n || i >= n {
                return Err(McError::DimensionMismatch { expected: n, found: j.max(i) + 1 });
            }
            d.set(j, i, field.reduce(v));
        }
        Self::new(GradedBasis::new(mu), d)
    }

    pub fn zero(field: Field, basis: GradedBasis) -> Self {
        let n = basis.len();
        MCObject { basis, d: DenseMatrix::zeros(field, n, n) }
    }

    pub fn check(&self) -> Result<(), McError> {
        for (j, i, _) in self.d.nonzero_entries() {
            if j <= i {
                return Err(McError::FiltrationViolation { row: j, col: i });
            }
            if self.basis.mu[i] - self.basis.mu[j] != 1 {
                return Err(McError::DegreeViolation { row: j, col: i });
            }
        }
        if !self.d.mul(&self.d).is_zero() {
            return Err(McError::NotSquareZero);
        }
        Ok(())
    }

    pub fn field(&self) -> Field {
        self.d.field()
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn d(&self) -> &DenseMatrix {
        &self.d
    }

    /// `g d g⁻¹` for an invertible `g`.
    pub fn conjugate(&self, g: &DenseMatrix) -> Result<Self, McError> {
        let ginv = g.inverse()?;
        Self::new_unchecked(self.basis.clone(), g.try_mul(&self.d)?.try_mul(&ginv)?)
    }

    /// The underlying complex, graded by `deg = -μ`.
    pub fn complex(&self) -> ChainComplex {
        ChainComplex::from_graded(self.field(), &self.basis.degrees(), &self.d)
    }

    /// Subcomplex on the generators `k..n`, i.e. the filtration step `ᵏV`.
    pub fn filtration_step(&self, k: usize) -> ChainComplex {
        let idx: Vec<usize> = (k..self.len()).collect();
        let degrees: Vec<i32> = idx.iter().map(|&i| self.basis.degree(i)).collect();
        ChainComplex::from_graded(self.field(), &degrees, &self.d.select(&idx, &idx))
    }
}

/// A lower triangular map between filtered graded modules of fixed degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FilteredHom {
    source: GradedBasis,
    target: GradedBasis,
    matrix: DenseMatrix,
    degree: i32,
}

impl FilteredHom {
    pub fn new(source: GradedBasis, target: GradedBasis, matrix: DenseMatrix, degree: i32) -> Result<Self, McError> {
        if matrix.rows() != target.len() {
            return Err(McError::DimensionMismatch { expected: target.len(), found: matrix.rows() });
        }
        if matrix.cols() != source.len() {
            return Err(McError::DimensionMismatch { expected: source.len(), found: matrix.cols() });
        }
        for (j, i, _) in matrix.nonzero_entries() {
            if j < i || source.mu[i] - target.mu[j] != degree {
                return Err(McError::NotFiltered { row: j, col: i });
            }
        }
        Ok(FilteredHom { source, target, matrix, degree })
    }

    pub fn identity(field: Field, basis: &GradedBasis) -> Self {
        FilteredHom { source: basis.clone(), target: basis.clone(), matrix: DenseMatrix::identity(field, basis.len()), degree: 0 }
    }

    pub fn zero(field: Field, source: &GradedBasis, target: &GradedBasis, degree: i32) -> Self {
        FilteredHom {
            source: source.clone(),
            target: target.clone(),
            matrix: DenseMatrix::zeros(field, target.len(), source.len()),
            degree,
        }
    }

    pub fn source(&self) -> &GradedBasis {
        &self.source
    }

    pub fn target(&self) -> &GradedBasis {
        &self.target
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FilteredHom) -> Result<FilteredHom, McError> {
        if other.target != self.source {
            return Err(McError::BasisMismatch);
        }
        Ok(FilteredHom {
            source: other.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.try_mul(&other.matrix)?,
            degree: self.degree + other.degree,
        })
    }

    /// Square with nonzero diagonal; for lower triangular maps this is invertibility.
    pub fn is_invertible(&self) -> bool {
        self.matrix.is_square() && self.matrix.diag().iter().all(|&x| x != 0)
    }

    pub fn inverse(&self) -> Result<FilteredHom, McError> {
        Ok(FilteredHom {
            source: self.target.clone(),
            target: self.source.clone(),
            matrix: self.matrix.inverse()?,
            degree: -self.degree,
        })
    }

    /// `φ d_A = d_B φ`.
    pub fn is_chain_map(&self, a: &MCObject, b: &MCObject) -> bool {
        a.basis == self.source
            && b.basis == self.target
            && self.matrix.mul(&a.d) == b.d.mul(&self.matrix)
    }
}

/// The dg Hom complex `Hom(A, B)` with basis `|j⟩⟨i|`, `j ≥ i`.
#[derive(Debug, Clone)]
pub struct HomComplex {
    source: MCObject,
    target: MCObject,
    basis: BTreeMap<i32, Vec<(usize, usize)>>,
}

impl HomComplex {
    pub fn new(source: &MCObject, target: &MCObject) -> Self {
        let mut basis: BTreeMap<i32, Vec<(usize, usize)>> = BTreeMap::new();
        for j in 0..target.len() {
            for i in 0..source.len().min(j + 1) {
                let deg = source.basis.mu[i] - target.basis.mu[j];
                basis.entry(deg).or_default().push((j, i));
            }
        }
        HomComplex { source: source.clone(), target: target.clone(), basis }
    }

    pub fn source(&self) -> &MCObject {
        &self.source
    }

    pub fn target(&self) -> &MCObject {
        &self.target
    }

    pub fn field(&self) -> Field {
        self.source.field()
    }

    /// Degrees with a nonempty basis, increasing.
    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.basis.keys().copied()
    }

    /// Basis elements `(j, i)` standing for `|j⟩⟨i|` in degree `deg`.
    pub fn basis(&self, deg: i32) -> &[(usize, usize)] {
        self.basis.get(&deg).map_or(&[], |v| v.as_slice())
    }

    pub fn dim(&self, deg: i32) -> usize {
        self.basis(deg).len()
    }

    /// `Dφ = d_B φ - (-1)^{|φ|} φ d_A`.
    pub fn apply(&self, phi: &FilteredHom) -> FilteredHom {
        let f = self.field();
        let left = self.target.d.mul(&phi.matrix);
        let right = phi.matrix.mul(&self.source.d).scale(f.sign(phi.degree as i64));
        FilteredHom {
            source: self.source.basis.clone(),
            target: self.target.basis.clone(),
            matrix: left.sub(&right),
            degree: phi.degree + 1,
        }
    }

    pub fn coords(&self, phi: &FilteredHom) -> Vec<u32> {
        self.basis(phi.degree).iter().map(|&(j, i)| phi.matrix.get(j, i)).collect()
    }

    pub fn from_coords(&self, deg: i32, coords: &[u32]) -> FilteredHom {
        let mut m = DenseMatrix::zeros(self.field(), self.target.len(), self.source.len());
        for (&(j, i), &c) in self.basis(deg).iter().zip(coords) {
            m.set(j, i, c);
        }
        FilteredHom { source: self.source.basis.clone(), target: self.target.basis.clone(), matrix: m, degree: deg }
    }

    /// Matrix of `D` from degree `deg` to `deg + 1`.
    pub fn differential(&self, deg: i32) -> DenseMatrix {
        let f = self.field();
        let src = self.basis(deg);
        let tgt = self.basis(deg + 1);
        let mut m = DenseMatrix::zeros(f, tgt.len(), src.len());
        let mut unit = vec![0; src.len()];
        for c in 0..src.len() {
            unit[c] = 1;
            let image = self.apply(&self.from_coords(deg, &unit));
            for (r, &(j, i)) in tgt.iter().enumerate() {
                m.set(r, c, image.matrix.get(j, i));
            }
            unit[c] = 0;
        }
        m
    }

    pub fn to_chain_complex(&self) -> ChainComplex {
        let mut c = ChainComplex::new(self.field());
        for deg in self.degrees() {
            c.set_dim(deg, self.dim(deg));
        }
        for deg in self.degrees().collect::<Vec<_>>() {
            if self.dim(deg + 1) > 0 {
                c.set_differential(deg, self.differential(deg));
            }
        }
        c
    }
}

/// A bounded cochain complex of finite-dimensional spaces; `D^n : C^n → C^{n+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplex {
    field: Field,
    dims: BTreeMap<i32, usize>,
    diffs: BTreeMap<i32, DenseMatrix>,
}

impl ChainComplex {
    pub fn new(field: Field) -> Self {
        ChainComplex { field, dims: BTreeMap::new(), diffs: BTreeMap::new() }
    }

    /// Complex on generators with the given degrees and a generator-indexed
    /// differential that raises degree by one.
    pub fn from_graded(field: Field, degrees: &[i32], d: &DenseMatrix) -> Self {
        let mut by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (g, &deg) in degrees.iter().enumerate() {
            by_degree.entry(deg).or_default().push(g);
        }
        let mut c = ChainComplex::new(field);
        for (&deg, gens) in &by_degree {
            c.set_dim(deg, gens.len());
            if let Some(next) = by_degree.get(&(deg + 1)) {
                c.set_differential(deg, d.select(next, gens));
            }
        }
        c
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn set_dim(&mut self, deg: i32, dim: usize) {
        if dim == 0 {
            self.dims.remove(&deg);
        } else {
            self.dims.insert(deg, dim);
        }
    }

    pub fn set_differential(&mut self, deg: i32, m: DenseMatrix) {
        self.diffs.insert(deg, m);
    }

    pub fn dim(&self, deg: i32) -> usize {
        self.dims.get(&deg).copied().unwrap_or(0)
    }

    /// Degrees with nonzero dimension.
    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.dims.keys().copied()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn differential(&self, deg: i32) -> DenseMatrix {
        match self.diffs.get(&deg) {
            Some(m) => m.clone(),
            None => DenseMatrix::zeros(self.field, self.dim(deg + 1), self.dim(deg)),
        }
    }

    fn rank_of(&self, deg: i32) -> usize {
        self.diffs.get(&deg).map_or(0, |m| m.rank())
    }

    pub fn is_square_zero(&self) -> bool {
        self.diffs.iter().all(|(&deg, m)| match self.diffs.get(&(deg + 1)) {
            Some(next) => next.mul(m).is_zero(),
            None => true,
        })
    }

    /// `(degree, dim H^degree)` for every degree with nonzero cohomology.
    pub fn cohomology(&self) -> Vec<(i32, usize)> {
        self.dims
            .iter()
            .map(|(&deg, &dim)| (deg, dim - self.rank_of(deg) - self.rank_of(deg - 1)))
            .filter(|&(_, h)| h > 0)
            .collect()
    }

    pub fn cohomology_dim(&self, deg: i32) -> usize {
        self.dim(deg) - self.rank_of(deg) - self.rank_of(deg - 1)
    }

    pub fn is_acyclic(&self) -> bool {
        self.cohomology().is_empty()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims.iter().map(|(&deg, &d)| if deg.rem_euclid(2) == 0 { d as i64 } else { -(d as i64) }).sum()
    }
}

/// `dim H^n` for every degree with nonzero cohomology.
pub fn complex_cohomology(c: &ChainComplex) -> Vec<(i32, usize)> {
    c.cohomology()
}

/// Barannikov pairing; indices are 0-based with `i < j` in each pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Barcode {
    pub pairs: Vec<(usize, usize)>,
    pub unpaired: Vec<usize>,
}

impl Barcode {
    /// `dim H^k` of the stalk `ᵍV` (generators with index `≥ g`) predicted
    /// by counting bars: pairs with `i < g ≤ j` and unpaired `u ≥ g` whose
    /// surviving generator has degree `k`.
    pub fn stalk_dim(&self, basis: &GradedBasis, g: usize, k: i32) -> usize {
        let spanning = self.pairs.iter().filter(|&&(i, j)| i < g && g <= j && basis.degree(j) == k).count();
        let free = self.unpaired.iter().filter(|&&u| u >= g && basis.degree(u) == k).count();
        spanning + free
    }
}

/// Barcode together with a filtered degree-0 change of basis `P` such that
/// `P⁻¹ d P` sends `|i⟩ ↦ |j⟩` for every pair and kills unpaired generators.
#[derive(Debug, Clone)]
pub struct NormalForm {
    pub barcode: Barcode,
    pub basis_change: DenseMatrix,
}

/// Persistence reduction.
///
/// Subcomplexes `ᵏV` grow as `k` decreases, so columns are processed from
/// `n - 1` down to `0`. The pivot of a column is its smallest nonzero row and
/// a column is reduced against columns `i' > i` already carrying the same
/// pivot, which is a lower triangular change of basis.
pub fn normal_form(a: &MCObject) -> NormalForm {
    let f = a.field();
    let n = a.len();
    let mut reduced = a.d.clone();
    let mut v = DenseMatrix::identity(f, n);
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    let pivot = |m: &DenseMatrix, c: usize| (c + 1..n).find(|&r| m.get(r, c) != 0);
    for i in (0..n).rev() {
        while let Some(low) = pivot(&reduced, i) {
            let Some(&other) = owner.get(&low) else {
                owner.insert(low, i);
                break;
            };
            let factor = f.mul(reduced.get(low, i), f.inv(reduced.get(low, other)).unwrap());
            for r in 0..n {
                let x = f.sub(reduced.get(r, i), f.mul(factor, reduced.get(r, other)));
                reduced.set(r, i, x);
                let y = f.sub(v.get(r, i), f.mul(factor, v.get(r, other)));
                v.set(r, i, y);
            }
        }
    }
    let mut pairs: Vec<(usize, usize)> = owner.iter().map(|(&j, &i)| (i, j)).collect();
    pairs.sort();
    let paired: Vec<bool> = (0..n).map(|g| pairs.iter().any(|&(i, j)| i == g || j == g)).collect();
    let unpaired = (0..n).filter(|&g| !paired[g]).collect();
    let mut p = v.clone();
    for &(i, j) in &pairs {
        for r in 0..n {
            p.set(r, j, reduced.get(r, i));
        }
    }
    NormalForm { barcode: Barcode { pairs, unpaired }, basis_change: p }
}

pub fn barannikov(a: &MCObject) -> Barcode {
    normal_form(a).barcode
}

/// A filtered degree-0 isomorphism `A → B`, or `None` when the barcodes differ.
pub fn mc_isomorphic(a: &MCObject, b: &MCObject) -> Result<Option<FilteredHom>, McError> {
    if a.basis != b.basis {
        return Err(McError::BasisMismatch);
    }
    if a.field() != b.field() {
        return Err(CoeffError::ModulusMismatch(a.field().modulus(), b.field().modulus()).into());
    }
    let na = normal_form(a);
    let nb = normal_form(b);
    if na.barcode != nb.barcode {
        return Ok(None);
    }
    let m = nb.basis_change.mul(&na.basis_change.inverse()?);
    let phi = FilteredHom::new(a.basis.clone(), b.basis.clone(), m, 0)?;
    debug_assert!(phi.is_chain_map(a, b));
    Ok(Some(phi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> Field {
        Field::new(p).unwrap()
    }

    fn unknot(p: u32, c: i64) -> MCObject {
        MCObject::from_entries(f(p), vec![2, 1], &[(1, 0, c)]).unwrap()
    }

    #[test]
    fn construction_checks() {
        assert!(MCObject::from_entries(f(2), vec![5], &[]).is_ok());
        assert_eq!(
            MCObject::from_entries(f(2), vec![2, 2], &[(1, 0, 1)]),
            Err(McError::DegreeViolation { row: 1, col: 0 })
        );
        assert_eq!(
            MCObject::from_entries(f(2), vec![1, 2], &[(0, 1, 1)]),
            Err(McError::FiltrationViolation { row: 0, col: 1 })
        );
        assert_eq!(
            MCObject::from_entries(f(2), vec![3, 2, 1], &[(1, 0, 1), (2, 1, 1)]),
            Err(McError::NotSquareZero)
        );
    }

    #[test]
    fn unknot_end_complex() {
        let a = unknot(3, 1);
        let h = HomComplex::new(&a, &a);
        assert_eq!(h.basis(0), &[(0, 0), (1, 1)]);
        assert_eq!(h.basis(1), &[(1, 0)]);
        assert!(h.basis(-1).is_empty());
        // D|1><1| = |2><1|, D|2><2| = -|2><1|
        assert_eq!(h.differential(0), DenseMatrix::from_rows(f(3), &[&[1, 2]]).unwrap());
        let c = h.to_chain_complex();
        assert_eq!(c.cohomology_dim(0), 1);
        assert_eq!(c.cohomology_dim(1), 0);
        assert_eq!(c.cohomology(), vec![(0, 1)]);
        let h2 = HomComplex::new(&unknot(2, 1), &unknot(2, 1));
        assert_eq!(h2.differential(0), DenseMatrix::from_rows(f(2), &[&[1, 1]]).unwrap());
    }

    #[test]
    fn single_generator_hom() {
        let a = MCObject::from_entries(f(2), vec![0], &[]).unwrap();
        let h = HomComplex::new(&a, &a);
        assert_eq!(h.basis(0), &[(0, 0)]);
        assert_eq!(h.to_chain_complex().cohomology(), vec![(0, 1)]);
    }

    #[test]
    fn composition_examples() {
        let fld = f(2);
        let b = GradedBasis::new(vec![0, 0, 0]);
        let unit = |j: usize, i: usize| {
            let mut m = DenseMatrix::zeros(fld, 3, 3);
            m.set(j, i, 1);
            FilteredHom::new(b.clone(), b.clone(), m, 0).unwrap()
        };
        let id = FilteredHom::identity(fld, &b);
        assert_eq!(id.compose(&unit(1, 0)).unwrap(), unit(1, 0));
        assert_eq!(unit(2, 1).compose(&unit(1, 0)).unwrap(), unit(2, 0));
        assert!(unit(2, 0).compose(&unit(2, 1)).unwrap().matrix().is_zero());
        let other = GradedBasis::new(vec![0, 0]);
        assert_eq!(FilteredHom::identity(fld, &other).compose(&id), Err(McError::BasisMismatch));
    }

    #[test]
    fn cohomology_examples() {
        let fld = f(5);
        assert!(ChainComplex::new(fld).cohomology().is_empty());
        let single = ChainComplex::from_graded(fld, &[3], &DenseMatrix::zeros(fld, 1, 1));
        assert_eq!(single.cohomology(), vec![(3, 1)]);
        let pair = ChainComplex::from_graded(fld, &[0, 1], &DenseMatrix::from_rows(fld, &[&[0, 0], &[2, 0]]).unwrap());
        assert!(pair.is_acyclic());
    }

    #[test]
    fn barcode_examples() {
        assert_eq!(barannikov(&unknot(2, 1)), Barcode { pairs: vec![(0, 1)], unpaired: vec![] });
        let single = MCObject::from_entries(f(2), vec![4], &[]).unwrap();
        assert_eq!(barannikov(&single), Barcode { pairs: vec![], unpaired: vec![0] });
        let four = MCObject::from_entries(f(2), vec![2, 1, 2, 1], &[(1, 0, 1), (3, 0, 1), (3, 2, 1)]).unwrap();
        assert_eq!(barannikov(&four), Barcode { pairs: vec![(0, 1), (2, 3)], unpaired: vec![] });
    }

    #[test]
    fn normal_form_conjugates_to_pairing() {
        let four = MCObject::from_entries(f(2), vec![2, 1, 2, 1], &[(1, 0, 1), (3, 0, 1), (3, 2, 1)]).unwrap();
        let nf = normal_form(&four);
        let p = &nf.basis_change;
        assert!(p.is_lower_triangular());
        let conj = p.inverse().unwrap().mul(four.d()).mul(p);
        let mut expected = DenseMatrix::zeros(f(2), 4, 4);
        expected.set(1, 0, 1);
        expected.set(3, 2, 1);
        assert_eq!(conj, expected);
    }

    #[test]
    fn isomorphism_examples() {
        let a = unknot(3, 1);
        assert_eq!(mc_isomorphic(&a, &a).unwrap().unwrap().matrix(), &DenseMatrix::identity(f(3), 2));
        let b = unknot(3, 2);
        let phi = mc_isomorphic(&a, &b).unwrap().unwrap();
        assert_eq!(phi.matrix(), &DenseMatrix::diagonal(f(3), &[1, 2]));
        assert!(phi.is_chain_map(&a, &b));
        let zero = MCObject::zero(f(3), GradedBasis::new(vec![2, 1]));
        assert_eq!(mc_isomorphic(&a, &zero).unwrap(), None);
        let other = MCObject::zero(f(3), GradedBasis::new(vec![1, 1]));
        assert_eq!(mc_isomorphic(&a, &other), Err(McError::BasisMismatch));
    }
}
