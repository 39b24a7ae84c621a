//! Exhaustive enumeration of strict Morse complex sequences.
//!
//! A strict object has no handle slides. Reading the front left to right,
//! crossings and deaths determine the next differential (or kill the
//! branch) and births branch over every admissible extension.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::coeff::{for_each_vector, DenseMatrix, Field};
use crate::front::{EventKind, FrontDiagram, FrontError};
use crate::mc::{GradedBasis, MCObject};
use crate::mcs::{cusp_projection, cusp_quotient, crossing_successor, mcs_isomorphic, IsoWitness, MCSObject, McsError};

pub const DEFAULT_BRANCH_CAP: u64 = 10_000_000;
pub const DEFAULT_SEARCH_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error(transparent)]
    Front(#[from] FrontError),
    #[error(transparent)]
    Mcs(#[from] McsError),
    #[error("more than {cap} branches explored")]
    BranchExplosion { cap: u64 },
    #[error("composed witness between objects {0} and {1} does not verify")]
    InconsistentWitness(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumOptions {
    pub branch_cap: u64,
    pub search_bound: u64,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { branch_cap: DEFAULT_BRANCH_CAP, search_bound: DEFAULT_SEARCH_BOUND }
    }
}

/// Free entries of a birth at `k`, listed in row-major order: rows `k` and
/// `k+1` left of the new pair, the cusp entry `⟨k+1|d|k⟩`, and columns `k`,
/// `k+1` below the pair, restricted to entries of degree one.
fn birth_free_entries(mu: &[i32], k: usize) -> Vec<(usize, usize)> {
    let n = mu.len();
    let mut out = Vec::new();
    for r in 0..n {
        for c in 0..r {
            let free = ((r == k || r == k + 1) && c < k) || (r == k + 1 && c == k) || (r > k + 1 && (c == k || c == k + 1));
            if free && mu[c] - mu[r] == 1 {
                out.push((r, c));
            }
        }
    }
    out
}

/// Every `d₊` on `mu_plus` related to `d₋` by a birth at `k`, in
/// lexicographic order of the free entries.
pub fn birth_extensions(d_minus: &DenseMatrix, mu_plus: &[i32], k: usize) -> Vec<DenseMatrix> {
    let f = d_minus.field();
    let n = mu_plus.len();
    let free = birth_free_entries(mu_plus, k);
    let Some(cusp) = free.iter().position(|&e| e == (k + 1, k)) else {
        return Vec::new();
    };
    let old = |i: usize| if i < k { i } else { i - 2 };
    let basis = GradedBasis::new(mu_plus.to_vec());
    let mut out = Vec::new();
    for_each_vector(f, free.len(), |v| {
        if v[cusp] == 0 {
            return true;
        }
        let mut d = DenseMatrix::zeros(f, n, n);
        for (&(r, c), &x) in free.iter().zip(v) {
            d.set(r, c, x);
        }
        let cinv = f.inv(v[cusp]).unwrap();
        for r in 0..n {
            for c in 0..r {
                if r == k || r == k + 1 || c == k || c == k + 1 {
                    continue;
                }
                let corr = f.mul(f.mul(d.get(k + 1, c), d.get(r, k)), cinv);
                d.set(r, c, f.add(d_minus.get(old(r), old(c)), corr));
            }
        }
        let Ok(obj) = MCObject::new(basis.clone(), d) else { return true };
        let pi = cusp_projection(obj.d(), k).unwrap();
        if pi.mul(obj.d()) == d_minus.mul(&pi) {
            out.push(obj.d().clone());
        }
        true
    });
    out
}

struct Search<'a> {
    front: &'a FrontDiagram,
    mu: Vec<Vec<i32>>,
    cap: u64,
    branches: u64,
    path: Vec<DenseMatrix>,
    found: Vec<Vec<DenseMatrix>>,
}

impl Search<'_> {
    fn visit(&mut self, t: usize) -> Result<(), EnumError> {
        self.branches += 1;
        if self.branches > self.cap {
            return Err(EnumError::BranchExplosion { cap: self.cap });
        }
        let events = self.front.events();
        if t == events.len() {
            self.found.push(self.path.clone());
            return Ok(());
        }
        let ev = events[t];
        let k = ev.position - 1;
        let d = self.path.last().unwrap().clone();
        let next: Vec<DenseMatrix> = match ev.kind {
            EventKind::Crossing => crossing_successor(&d, k).into_iter().collect(),
            EventKind::RightCusp => cusp_quotient(&d, k).into_iter().collect(),
            EventKind::LeftCusp => birth_extensions(&d, &self.mu[t + 1], k),
        };
        for dn in next {
            self.path.push(dn);
            self.visit(t + 1)?;
            self.path.pop();
        }
        Ok(())
    }
}

/// All strict objects on `front`, ordered lexicographically by branch choices.
pub fn enumerate_strict(front: &FrontDiagram, baseline: i32, field: Field, branch_cap: u64) -> Result<Vec<MCSObject>, EnumError> {
    let maslov = front.maslov(baseline)?;
    let mut search = Search {
        front,
        mu: maslov.per_interval().to_vec(),
        cap: branch_cap,
        branches: 0,
        path: vec![DenseMatrix::zeros(field, 0, 0)],
        found: Vec::new(),
    };
    search.visit(0)?;
    search
        .found
        .into_iter()
        .map(|ints| MCSObject::new(front.clone(), baseline, ints, Vec::new()).map_err(EnumError::from))
        .collect()
}

/// One isomorphism class; `members[0]` is the representative and
/// `witnesses[t]` maps it to `members[t]`.
#[derive(Debug, Clone)]
pub struct IsoClass {
    pub members: Vec<usize>,
    pub witnesses: Vec<IsoWitness>,
}

impl IsoClass {
    pub fn representative(&self) -> usize {
        self.members[0]
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Partitions objects by isomorphism, comparing each object with the class
/// representatives in order. A new member's witness is composed with the
/// inverse of an earlier member's witness and the composite is re-verified.
pub fn group_iso_classes(objects: &[MCSObject], search_bound: u64) -> Result<Vec<IsoClass>, EnumError> {
    let mut classes: Vec<IsoClass> = Vec::new();
    'objects: for (idx, obj) in objects.iter().enumerate() {
        for class in classes.iter_mut() {
            let rep = &objects[class.representative()];
            if let Some(w) = mcs_isomorphic(rep, obj, search_bound)? {
                if let Some((&other, wo)) = class.members.iter().zip(&class.witnesses).nth(1) {
                    let composite = w.morphism.compose(&wo.morphism.inverse()?)?;
                    if !composite.verify(&objects[other], obj) {
                        return Err(EnumError::InconsistentWitness(other, idx));
                    }
                }
                class.members.push(idx);
                class.witnesses.push(w);
                continue 'objects;
            }
        }
        let id = mcs_isomorphic(obj, obj, search_bound)?.expect("identity is a witness");
        classes.push(IsoClass { members: vec![idx], witnesses: vec![id] });
    }
    Ok(classes)
}

#[derive(Debug, Clone)]
pub struct EnumerationResult {
    pub field: Field,
    pub front: FrontDiagram,
    pub baseline: i32,
    pub objects: Vec<MCSObject>,
    pub classes: Vec<IsoClass>,
}

impl EnumerationResult {
    pub fn strict_count(&self) -> usize {
        self.objects.len()
    }

    pub fn iso_class_count(&self) -> usize {
        self.classes.len()
    }
}

pub fn enumerate(front: &FrontDiagram, baseline: i32, field: Field, options: EnumOptions) -> Result<EnumerationResult, EnumError> {
    let objects = enumerate_strict(front, baseline, field, options.branch_cap)?;
    let classes = group_iso_classes(&objects, options.search_bound)?;
    Ok(EnumerationResult { field, front: front.clone(), baseline, objects, classes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> Field {
        Field::new(p).unwrap()
    }

    fn run(front: &str, p: u32) -> EnumerationResult {
        enumerate(&FrontDiagram::parse(front).unwrap(), 1, f(p), EnumOptions::default()).unwrap()
    }

    #[test]
    fn empty_front() {
        let r = run("", 2);
        assert_eq!(r.strict_count(), 1);
        assert_eq!(r.iso_class_count(), 1);
    }

    #[test]
    fn unknot_counts() {
        let r2 = run("L1 R1", 2);
        assert_eq!((r2.strict_count(), r2.iso_class_count()), (1, 1));
        let r3 = run("L1 R1", 3);
        assert_eq!((r3.strict_count(), r3.iso_class_count()), (2, 1));
        assert!(r3.objects.iter().all(|o| o.is_valid()));
    }

    #[test]
    fn branch_cap() {
        let front = FrontDiagram::parse("L1 L1 X2 X2 X2 R1 R1").unwrap();
        assert_eq!(enumerate_strict(&front, 1, f(3), 3), Err(EnumError::BranchExplosion { cap: 3 }));
    }

    #[test]
    fn obstructed_front() {
        let front = FrontDiagram::parse("L1 X1 R1").unwrap();
        assert!(matches!(enumerate_strict(&front, 1, f(2), 100), Err(EnumError::Front(FrontError::NoPotential { .. }))));
    }

    #[test]
    fn deterministic_order() {
        let front = FrontDiagram::parse("L1 L1 X2 X2 X2 R1 R1").unwrap();
        let a = enumerate_strict(&front, 1, f(3), DEFAULT_BRANCH_CAP).unwrap();
        let b = enumerate_strict(&front, 1, f(3), DEFAULT_BRANCH_CAP).unwrap();
        assert_eq!(a, b);
    }
}
