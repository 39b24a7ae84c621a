//! Morse complex sequences over a plat front.
//!
//! An [`MCSObject`] is a list of strata read left to right: the front events
//! interleaved with formal handle slides. Interval `t` sits between strata
//! `t - 1` and `t`, so there is one more interval than strata. Gluings on
//! intervals are always the identity; a nontrivial gluing is expressed by an
//! extra slide.
//!
//! Event relations, with `d₋`/`d₊` the differentials left/right of a stratum
//! and `k` the 0-based upper strand:
//!
//! * crossing: `⟨k+1|d₋|k⟩ = 0` and `d₊ = s d₋ s`
//! * death: `⟨k+1|d₋|k⟩ ≠ 0` and `π d₋ = d₊ π`, with `π` killing `|k⟩` and `d₋|k⟩`
//! * birth: `⟨k+1|d₊|k⟩ ≠ 0` and `π d₊ = d₋ π`, with `π : V₊ → V₋` built from `d₊`
//! * slide `g`: `g d₋ = d₊ g`

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::coeff::{find_nowhere_zero, CoeffError, DenseMatrix, Field};
use crate::front::{EventKind, FrontDiagram, FrontError, FrontEvent, MaslovPotential};
use crate::mc::{FilteredHom, GradedBasis, HomComplex, MCObject, McError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum McsError {
    #[error(transparent)]
    Front(#[from] FrontError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error("expected {expected} intervals, found {found}")]
    IntervalCount { expected: usize, found: usize },
    #[error("interval {interval} needs a {expected}x{expected} matrix, found {found_rows}x{found_cols}")]
    Shape { interval: usize, expected: usize, found_rows: usize, found_cols: usize },
    #[error("slide position {0} is past the last event")]
    SlidePosition(usize),
    #[error("stratum {0} is not a handle slide")]
    NotASlide(usize),
    #[error("slide at stratum {0} is not diagonal")]
    NotDiagonal(usize),
    #[error("slide matrix is not invertible")]
    NotInvertible,
    #[error("slide matrix does not have degree zero")]
    NotDegreeZero,
    #[error("slide cannot pass the crossing at stratum {stratum}")]
    ObstructedAtCrossing { stratum: usize },
    #[error("slide cannot pass the cusp at stratum {stratum}")]
    ObstructedAtCusp { stratum: usize },
    #[error("isomorphism search space has dimension {dim}, over the configured bound")]
    SearchSpaceTooLarge { dim: usize },
    #[error("objects live on different fronts, potentials or fields")]
    Incompatible,
    #[error("objects are not refined to the same strata")]
    StrataMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stratum {
    /// Front event number `index`.
    Event { index: usize, event: FrontEvent },
    Slide(DenseMatrix),
}

impl Stratum {
    pub fn is_slide(&self) -> bool {
        matches!(self, Stratum::Slide(_))
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stratum::Event { event, .. } => write!(f, "{event}"),
            Stratum::Slide(_) => f.write_str("slide"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Location {
    Interval(usize),
    Stratum(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub location: Location,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MCSObject {
    front: FrontDiagram,
    baseline: i32,
    maslov: MaslovPotential,
    strata: Vec<Stratum>,
    intervals: Vec<MCObject>,
}

/// `s_{k,k+1}`.
pub fn transposition(field: Field, n: usize, k: usize) -> DenseMatrix {
    DenseMatrix::from_fn(field, n, n, |r, c| {
        let src = if c == k {
            k + 1
        } else if c == k + 1 {
            k
        } else {
            c
        };
        u32::from(r == src)
    })
}

/// The projection `V → V/(|k⟩, d|k⟩)` in the basis `{|i⟩ : i ≠ k, k+1}`,
/// or `None` when `⟨k+1|d|k⟩ = 0`.
pub fn cusp_projection(d: &DenseMatrix, k: usize) -> Option<DenseMatrix> {
    let f = d.field();
    let n = d.rows();
    let c = d.get(k + 1, k);
    let cinv = f.inv(c)?;
    let mut pi = DenseMatrix::zeros(f, n - 2, n);
    for i in 0..n {
        if i < k {
            pi.set(i, i, 1);
        } else if i > k + 1 {
            pi.set(i - 2, i, 1);
        }
    }
    for j in k + 2..n {
        let v = f.neg(f.mul(cinv, d.get(j, k)));
        pi.set(j - 2, k + 1, v);
    }
    Some(pi)
}

/// The inclusion `|i'⟩ ↦ |i⟩` of the generators other than `k, k+1`.
pub fn cusp_section(field: Field, n: usize, k: usize) -> DenseMatrix {
    DenseMatrix::from_fn(field, n, n - 2, |r, c| u32::from(r == if c < k { c } else { c + 2 }))
}

/// `d₊` after a crossing, `None` when `⟨k+1|d|k⟩ ≠ 0`.
pub fn crossing_successor(d: &DenseMatrix, k: usize) -> Option<DenseMatrix> {
    if d.get(k + 1, k) != 0 {
        return None;
    }
    let s = transposition(d.field(), d.rows(), k);
    Some(s.mul(d).mul(&s))
}

/// Quotient differential after cancelling `|k⟩` against `|k+1⟩`.
pub fn cusp_quotient(d: &DenseMatrix, k: usize) -> Option<DenseMatrix> {
    let pi = cusp_projection(d, k)?;
    Some(pi.mul(d).mul(&cusp_section(d.field(), d.rows(), k)))
}

/// Drops rows and columns `k, k+1`.
fn drop_pair(m: &DenseMatrix, k: usize) -> DenseMatrix {
    let keep: Vec<usize> = (0..m.rows()).filter(|&i| i != k && i != k + 1).collect();
    m.select(&keep, &keep)
}

/// Inserts an identity block at rows and columns `k, k+1`.
fn insert_identity_pair(m: &DenseMatrix, k: usize) -> DenseMatrix {
    let n = m.rows() + 2;
    let old = |i: usize| if i < k { Some(i) } else if i > k + 1 { Some(i - 2) } else { None };
    DenseMatrix::from_fn(m.field(), n, n, |r, c| match (old(r), old(c)) {
        (Some(a), Some(b)) => m.get(a, b),
        (None, None) => u32::from(r == c),
        _ => 0,
    })
}

/// Identity plus exactly one off-diagonal entry.
pub fn is_elementary(g: &DenseMatrix) -> bool {
    let mut off = 0;
    for r in 0..g.rows() {
        for c in 0..g.cols() {
            let v = g.get(r, c);
            if r == c && v != 1 {
                return false;
            }
            if r != c && v != 0 {
                off += 1;
            }
        }
    }
    off == 1
}

impl MCSObject {
    /// Builds an object from the interval differentials (one per refined
    /// interval) and the extra slides, each given with the number of front
    /// events to its left. Slides sharing a position keep their order.
    /// Shapes are checked; event relations are left to [`MCSObject::validate`].
    pub fn new(
        front: FrontDiagram,
        baseline: i32,
        intervals: Vec<DenseMatrix>,
        slides: Vec<(usize, DenseMatrix)>,
    ) -> Result<Self, McsError> {
        let m = front.events().len();
        let mut slides = slides;
        slides.sort_by_key(|(pos, _)| *pos);
        let mut strata = Vec::with_capacity(m + slides.len());
        let mut next = slides.into_iter().peekable();
        for pos in 0..=m {
            while let Some((p, _)) = next.peek() {
                if *p > m {
                    return Err(McsError::SlidePosition(*p));
                }
                if *p != pos {
                    break;
                }
                strata.push(Stratum::Slide(next.next().unwrap().1));
            }
            if pos < m {
                strata.push(Stratum::Event { index: pos, event: front.events()[pos] });
            }
        }
        Self::from_strata(front, baseline, strata, intervals)
    }

    pub fn from_strata(
        front: FrontDiagram,
        baseline: i32,
        strata: Vec<Stratum>,
        intervals: Vec<DenseMatrix>,
    ) -> Result<Self, McsError> {
        let maslov = front.maslov(baseline)?;
        if intervals.len() != strata.len() + 1 {
            return Err(McsError::IntervalCount { expected: strata.len() + 1, found: intervals.len() });
        }
        let mut objects = Vec::with_capacity(intervals.len());
        let mut front_interval = 0;
        for (t, d) in intervals.into_iter().enumerate() {
            if t > 0 && !strata[t - 1].is_slide() {
                front_interval += 1;
            }
            let mu = maslov.interval(front_interval).to_vec();
            if d.rows() != mu.len() || d.cols() != mu.len() {
                return Err(McsError::Shape { interval: t, expected: mu.len(), found_rows: d.rows(), found_cols: d.cols() });
            }
            objects.push(MCObject::new_unchecked(GradedBasis::new(mu), d)?);
        }
        for (s, st) in strata.iter().enumerate() {
            if let Stratum::Slide(g) = st {
                let n = objects[s].len();
                if g.rows() != n || g.cols() != n {
                    return Err(McsError::Shape { interval: s, expected: n, found_rows: g.rows(), found_cols: g.cols() });
                }
            }
        }
        Ok(MCSObject { front, baseline, maslov, strata, intervals: objects })
    }

    fn rebuild(&self, strata: Vec<Stratum>, intervals: Vec<DenseMatrix>) -> Self {
        Self::from_strata(self.front.clone(), self.baseline, strata, intervals).expect("shapes preserved")
    }

    pub fn front(&self) -> &FrontDiagram {
        &self.front
    }

    pub fn baseline(&self) -> i32 {
        self.baseline
    }

    pub fn maslov(&self) -> &MaslovPotential {
        &self.maslov
    }

    pub fn field(&self) -> Field {
        self.intervals[0].field()
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn intervals(&self) -> &[MCObject] {
        &self.intervals
    }

    pub fn interval(&self, t: usize) -> &MCObject {
        &self.intervals[t]
    }

    pub fn slide_count(&self) -> usize {
        self.strata.iter().filter(|s| s.is_slide()).count()
    }

    /// Slides with the number of front events to their left.
    pub fn slides(&self) -> Vec<(usize, &DenseMatrix)> {
        let mut events = 0;
        let mut out = Vec::new();
        for st in &self.strata {
            match st {
                Stratum::Event { .. } => events += 1,
                Stratum::Slide(g) => out.push((events, g)),
            }
        }
        out
    }

    /// Front interval containing refined interval `t`.
    pub fn front_interval(&self, t: usize) -> usize {
        self.strata[..t].iter().filter(|s| !s.is_slide()).count()
    }

    /// Replaces one interval differential without any checks.
    pub fn with_interval(&self, t: usize, d: DenseMatrix) -> Result<Self, McsError> {
        let mut intervals: Vec<DenseMatrix> = self.intervals.iter().map(|o| o.d().clone()).collect();
        intervals[t] = d;
        Self::from_strata(self.front.clone(), self.baseline, self.strata.clone(), intervals)
    }

    fn matrices(&self) -> Vec<DenseMatrix> {
        self.intervals.iter().map(|o| o.d().clone()).collect()
    }

    /// Same front, potential and field.
    pub fn compatible(&self, other: &MCSObject) -> bool {
        self.front == other.front && self.maslov.per_interval() == other.maslov.per_interval() && self.field() == other.field()
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Every violated interval or event condition, in left-to-right order.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let last = self.intervals.len() - 1;
        for (t, obj) in self.intervals.iter().enumerate() {
            if (t == 0 || t == last) && !obj.is_empty() {
                out.push(Diagnostic { location: Location::Interval(t), message: "end interval is not empty".into() });
            }
            if let Err(e) = obj.check() {
                out.push(Diagnostic { location: Location::Interval(t), message: format!("{e}") });
            }
        }
        for (s, st) in self.strata.iter().enumerate() {
            if let Some(message) = self.check_stratum(s, st) {
                out.push(Diagnostic { location: Location::Stratum(s), message });
            }
        }
        out.sort_by_key(|d| match d.location {
            Location::Interval(t) => (2 * t, 0),
            Location::Stratum(s) => (2 * s + 1, 0),
        });
        out
    }

    fn check_stratum(&self, s: usize, st: &Stratum) -> Option<String> {
        let dm = self.intervals[s].d();
        let dp = self.intervals[s + 1].d();
        match st {
            Stratum::Event { event, .. } => {
                let k = event.position - 1;
                match event.kind {
                    EventKind::Crossing => {
                        if dm.get(k + 1, k) != 0 {
                            return Some(format!("{event}: <{}|d|{}> must vanish before the crossing", k + 2, k + 1));
                        }
                        let sk = transposition(dm.field(), dm.rows(), k);
                        (sk.mul(dm).mul(&sk) != *dp).then(|| format!("{event}: d+ != s d- s"))
                    }
                    EventKind::RightCusp => match cusp_projection(dm, k) {
                        None => Some(format!("{event}: <{}|d|{}> is not invertible", k + 2, k + 1)),
                        Some(pi) => (pi.mul(dm) != dp.mul(&pi)).then(|| format!("{event}: pi d- != d+ pi")),
                    },
                    EventKind::LeftCusp => match cusp_projection(dp, k) {
                        None => Some(format!("{event}: <{}|d|{}> is not invertible", k + 2, k + 1)),
                        Some(pi) => (pi.mul(dp) != dm.mul(&pi)).then(|| format!("{event}: pi d+ != d- pi")),
                    },
                }
            }
            Stratum::Slide(g) => {
                let basis = self.intervals[s].basis().clone();
                if FilteredHom::new(basis.clone(), basis, g.clone(), 0).is_err() {
                    return Some("slide is not lower triangular of degree 0".into());
                }
                if g.diag().iter().any(|&x| x == 0) {
                    return Some("slide is not invertible".into());
                }
                (g.mul(dm) != dp.mul(g)).then(|| "g d- != d+ g".into())
            }
        }
    }
}

/// An elementary slide `1 + c|row⟩⟨col|` with `row > col` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElementarySlide {
    pub row: usize,
    pub col: usize,
    pub coeff: u32,
}

impl ElementarySlide {
    pub fn matrix(&self, field: Field, n: usize) -> DenseMatrix {
        let mut m = DenseMatrix::identity(field, n);
        m.set(self.row, self.col, self.coeff);
        m
    }
}

/// `g = E_1 ⋯ E_m · D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryFactorization {
    pub factors: Vec<ElementarySlide>,
    pub diagonal: Vec<u32>,
}

impl ElementaryFactorization {
    pub fn product(&self, field: Field) -> DenseMatrix {
        let n = self.diagonal.len();
        let mut m = DenseMatrix::identity(field, n);
        for e in &self.factors {
            m = m.mul(&e.matrix(field, n));
        }
        m.mul(&DenseMatrix::diagonal(field, &self.diagonal))
    }
}

/// Splits a slide into elementary factors and a diagonal, reducing columns
/// left to right and rows bottom to top.
pub fn factor_handle_slide(g: &FilteredHom) -> Result<ElementaryFactorization, McsError> {
    if g.degree() != 0 {
        return Err(McsError::NotDegreeZero);
    }
    if !g.is_invertible() {
        return Err(McsError::NotInvertible);
    }
    let m = g.matrix();
    let f = m.field();
    let n = m.rows();
    let diagonal = m.diag();
    // U = g D⁻¹ is unipotent and equals the ordered product of its column factors.
    let mut factors = Vec::new();
    for col in 0..n {
        let inv = f.inv(diagonal[col]).unwrap();
        for row in (col + 1..n).rev() {
            let u = f.mul(m.get(row, col), inv);
            if u != 0 {
                factors.push(ElementarySlide { row, col, coeff: u });
            }
        }
    }
    Ok(ElementaryFactorization { factors, diagonal })
}

/// Moves the diagonal slide at stratum `at` past the next stratum.
pub fn push_diagonal_right(s: &MCSObject, at: usize) -> Result<MCSObject, McsError> {
    Ok(push_diagonal_step(s, at)?.0)
}

/// One push; also returns the new stratum of the diagonal if it survives.
fn push_diagonal_step(obj: &MCSObject, at: usize) -> Result<(MCSObject, Option<usize>), McsError> {
    let Some(Stratum::Slide(g)) = obj.strata.get(at) else {
        return Err(McsError::NotASlide(at));
    };
    if !g.is_diagonal() {
        return Err(McsError::NotDiagonal(at));
    }
    let f = obj.field();
    let mut strata = obj.strata.clone();
    let mut ints = obj.matrices();
    if g.is_identity() {
        strata.remove(at);
        ints.remove(at + 1);
        return Ok((obj.rebuild(strata, ints), None));
    }
    let da = ints[at].clone();
    let next = strata[at + 1].clone();
    let survivor = match &next {
        Stratum::Event { event, .. } => {
            let k = event.position - 1;
            match event.kind {
                EventKind::Crossing => {
                    let sk = transposition(f, da.rows(), k);
                    ints[at + 1] = sk.mul(&da).mul(&sk);
                    strata[at] = next.clone();
                    strata[at + 1] = Stratum::Slide(sk.mul(g).mul(&sk));
                    Some(at + 1)
                }
                EventKind::RightCusp => {
                    let quotient = cusp_quotient(&da, k).ok_or(McsError::ObstructedAtCusp { stratum: at + 1 })?;
                    ints[at + 1] = quotient;
                    strata[at] = next.clone();
                    let rest = drop_pair(g, k);
                    if rest.is_identity() {
                        strata.remove(at + 1);
                        ints.remove(at + 1);
                        None
                    } else {
                        strata[at + 1] = Stratum::Slide(rest);
                        Some(at + 1)
                    }
                }
                EventKind::LeftCusp => {
                    let ext = insert_identity_pair(g, k);
                    ints[at + 1] = ext.inverse()?.mul(&ints[at + 2]).mul(&ext);
                    strata[at] = next.clone();
                    strata[at + 1] = Stratum::Slide(ext);
                    Some(at + 1)
                }
            }
        }
        Stratum::Slide(h) if h.is_diagonal() => {
            strata[at] = Stratum::Slide(h.mul(g));
            strata.remove(at + 1);
            ints.remove(at + 1);
            Some(at)
        }
        Stratum::Slide(h) => {
            let h2 = g.inverse()?.mul(h).mul(g);
            ints[at + 1] = h2.mul(&da).mul(&h2.inverse()?);
            strata[at] = Stratum::Slide(h2);
            strata[at + 1] = Stratum::Slide(g.clone());
            Some(at + 1)
        }
    };
    Ok((obj.rebuild(strata, ints), survivor))
}

/// Pushes the diagonal slide at `at` rightward until it is absorbed.
pub fn push_diagonal_to_absorption(s: &MCSObject, at: usize) -> Result<MCSObject, McsError> {
    let mut cur = s.clone();
    let mut pos = Some(at);
    while let Some(p) = pos {
        let (next, np) = push_diagonal_step(&cur, p)?;
        cur = next;
        pos = np;
    }
    Ok(cur)
}

/// Replaces every slide by elementary ones: each slide is factored, its
/// factors are spliced in as consecutive slides and the diagonal part is
/// pushed right until absorbed.
pub fn normalize_elementary(s: &MCSObject) -> Result<MCSObject, McsError> {
    let f = s.field();
    let mut cur = s.clone();
    let mut idx = 0;
    while idx < cur.strata.len() {
        let Stratum::Slide(g) = &cur.strata[idx] else {
            idx += 1;
            continue;
        };
        if g.is_identity() {
            let mut strata = cur.strata.clone();
            let mut ints = cur.matrices();
            strata.remove(idx);
            ints.remove(idx + 1);
            cur = cur.rebuild(strata, ints);
            continue;
        }
        if is_elementary(g) {
            idx += 1;
            continue;
        }
        let basis = cur.intervals[idx].basis().clone();
        let fac = factor_handle_slide(&FilteredHom::new(basis.clone(), basis, g.clone(), 0)?)?;
        let n = g.rows();
        // left to right: D, E_m, ..., E_1
        let mut pieces = vec![DenseMatrix::diagonal(f, &fac.diagonal)];
        pieces.extend(fac.factors.iter().rev().map(|e| e.matrix(f, n)));
        let mut strata = cur.strata.clone();
        let mut ints = cur.matrices();
        let right = ints[idx + 1].clone();
        let mut d = ints[idx].clone();
        let mut new_ints = Vec::new();
        for piece in &pieces[..pieces.len() - 1] {
            d = piece.mul(&d).mul(&piece.inverse()?);
            new_ints.push(d.clone());
        }
        strata.splice(idx..=idx, pieces.into_iter().map(Stratum::Slide));
        ints.splice(idx + 1..idx + 1, new_ints);
        debug_assert_eq!(ints[idx + fac.factors.len() + 1], right);
        cur = push_diagonal_to_absorption(&cur.rebuild(strata, ints), idx)?;
    }
    Ok(cur)
}

/// Merges the slide at `at` into the structure to its right: it is carried
/// past crossings and cusps until it meets another slide (and is composed
/// into it), becomes the identity, or runs off the end.
pub fn remove_handle_slide(s: &MCSObject, at: usize) -> Result<MCSObject, McsError> {
    if !matches!(s.strata.get(at), Some(Stratum::Slide(_))) {
        return Err(McsError::NotASlide(at));
    }
    let f = s.field();
    let mut cur = s.clone();
    let mut pos = at;
    loop {
        let Stratum::Slide(g) = cur.strata[pos].clone() else { unreachable!() };
        let mut strata = cur.strata.clone();
        let mut ints = cur.matrices();
        if g.is_identity() {
            strata.remove(pos);
            ints.remove(pos + 1);
            return Ok(cur.rebuild(strata, ints));
        }
        let da = ints[pos].clone();
        let next = strata[pos + 1].clone();
        match &next {
            Stratum::Slide(h) => {
                strata[pos] = Stratum::Slide(h.mul(&g));
                strata.remove(pos + 1);
                ints.remove(pos + 1);
                let merged = cur.rebuild(strata, ints);
                match &merged.strata[pos] {
                    Stratum::Slide(m) if m.is_identity() => {
                        cur = merged;
                        continue;
                    }
                    _ => return Ok(merged),
                }
            }
            Stratum::Event { event, .. } => {
                let k = event.position - 1;
                let carried = match event.kind {
                    EventKind::Crossing => {
                        if g.get(k + 1, k) != 0 {
                            return Err(McsError::ObstructedAtCrossing { stratum: pos + 1 });
                        }
                        let sk = transposition(f, g.rows(), k);
                        ints[pos + 1] = sk.mul(&da).mul(&sk);
                        sk.mul(&g).mul(&sk)
                    }
                    EventKind::RightCusp => {
                        if (k + 1..g.rows()).any(|j| g.get(j, k) != 0) {
                            return Err(McsError::ObstructedAtCusp { stratum: pos + 1 });
                        }
                        let db = &ints[pos + 1];
                        let pib = cusp_projection(db, k).ok_or(McsError::ObstructedAtCusp { stratum: pos + 1 })?;
                        let quotient = cusp_quotient(&da, k).ok_or(McsError::ObstructedAtCusp { stratum: pos + 1 })?;
                        ints[pos + 1] = quotient;
                        pib.mul(&g).mul(&cusp_section(f, g.rows(), k))
                    }
                    EventKind::LeftCusp => {
                        let ext = insert_identity_pair(&g, k);
                        ints[pos + 1] = ext.inverse()?.mul(&ints[pos + 2]).mul(&ext);
                        ext
                    }
                };
                strata[pos] = next.clone();
                strata[pos + 1] = Stratum::Slide(carried);
                cur = cur.rebuild(strata, ints);
                pos += 1;
            }
        }
    }
}

/// Both objects refined to the same strata: in every gap between front
/// events the slides of `a` come first, then those of `b`, each object
/// receiving identity slides for the other's.
pub fn common_refinement(a: &MCSObject, b: &MCSObject) -> Result<(MCSObject, MCSObject), McsError> {
    if !a.compatible(b) {
        return Err(McsError::Incompatible);
    }
    let gaps = |o: &MCSObject| {
        let mut per_gap: Vec<Vec<usize>> = vec![Vec::new(); o.front.events().len() + 1];
        let mut events = 0;
        for (s, st) in o.strata.iter().enumerate() {
            match st {
                Stratum::Event { .. } => events += 1,
                Stratum::Slide(_) => per_gap[events].push(s),
            }
        }
        per_gap
    };
    let (ga, gb) = (gaps(a), gaps(b));
    let refine = |o: &MCSObject, mine: &[Vec<usize>], first: bool, other: &[Vec<usize>]| {
        let f = o.field();
        let events: Vec<usize> = (0..o.strata.len()).filter(|&s| !o.strata[s].is_slide()).collect();
        let mut strata = Vec::new();
        let mut ints = vec![o.intervals[0].d().clone()];
        let pad = |count: usize, strata: &mut Vec<Stratum>, ints: &mut Vec<DenseMatrix>| {
            for _ in 0..count {
                let last = ints.last().unwrap().clone();
                strata.push(Stratum::Slide(DenseMatrix::identity(f, last.rows())));
                ints.push(last);
            }
        };
        for gap in 0..mine.len() {
            if !first {
                pad(other[gap].len(), &mut strata, &mut ints);
            }
            for &s in &mine[gap] {
                strata.push(o.strata[s].clone());
                ints.push(o.intervals[s + 1].d().clone());
            }
            if first {
                pad(other[gap].len(), &mut strata, &mut ints);
            }
            if let Some(&ev) = events.get(gap) {
                strata.push(o.strata[ev].clone());
                ints.push(o.intervals[ev + 1].d().clone());
            }
        }
        MCSObject::from_strata(o.front.clone(), o.baseline, strata, ints)
    };
    Ok((refine(a, &ga, true, &gb)?, refine(b, &gb, false, &ga)?))
}

/// A degree-0 closed family `φ_t : A_t → B_t` compatible with every stratum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McsMorphism {
    pub components: Vec<FilteredHom>,
}

/// Relation residual at stratum `s` for a pair of interval maps.
pub(crate) fn stratum_residual(
    a: &MCSObject,
    b: &MCSObject,
    s: usize,
    left: &DenseMatrix,
    right: &DenseMatrix,
) -> DenseMatrix {
    let f = a.field();
    match (&a.strata[s], &b.strata[s]) {
        (Stratum::Event { event, .. }, _) => {
            let k = event.position - 1;
            match event.kind {
                EventKind::Crossing => {
                    let sk = transposition(f, left.rows(), k);
                    sk.mul(left).mul(&sk).sub(right)
                }
                EventKind::RightCusp => {
                    let pa = cusp_projection(a.intervals[s].d(), k).unwrap_or_else(|| DenseMatrix::zeros(f, left.cols() - 2, left.cols()));
                    let pb = cusp_projection(b.intervals[s].d(), k).unwrap_or_else(|| DenseMatrix::zeros(f, left.rows() - 2, left.rows()));
                    pb.mul(left).sub(&right.mul(&pa))
                }
                EventKind::LeftCusp => {
                    let pa = cusp_projection(a.intervals[s + 1].d(), k).unwrap_or_else(|| DenseMatrix::zeros(f, right.cols() - 2, right.cols()));
                    let pb = cusp_projection(b.intervals[s + 1].d(), k).unwrap_or_else(|| DenseMatrix::zeros(f, right.rows() - 2, right.rows()));
                    pb.mul(right).sub(&left.mul(&pa))
                }
            }
        }
        (Stratum::Slide(g), Stratum::Slide(h)) => h.mul(left).sub(&right.mul(g)),
        (Stratum::Slide(_), _) => unreachable!("strata checked to match"),
    }
}

pub(crate) fn same_strata(a: &MCSObject, b: &MCSObject) -> bool {
    a.strata.len() == b.strata.len()
        && a.strata.iter().zip(&b.strata).all(|(x, y)| match (x, y) {
            (Stratum::Event { index: i, .. }, Stratum::Event { index: j, .. }) => i == j,
            (Stratum::Slide(_), Stratum::Slide(_)) => true,
            _ => false,
        })
}

impl McsMorphism {
    /// Every component is a degree-0 chain map and every stratum relation holds.
    pub fn verify(&self, a: &MCSObject, b: &MCSObject) -> bool {
        if !a.compatible(b) || !same_strata(a, b) || self.components.len() != a.intervals.len() {
            return false;
        }
        let chain = self
            .components
            .iter()
            .zip(a.intervals.iter().zip(&b.intervals))
            .all(|(phi, (x, y))| phi.degree() == 0 && phi.is_chain_map(x, y));
        chain
            && (0..a.strata.len()).all(|s| {
                stratum_residual(a, b, s, self.components[s].matrix(), self.components[s + 1].matrix()).is_zero()
            })
    }

    pub fn is_invertible(&self) -> bool {
        self.components.iter().all(|c| c.is_invertible())
    }

    pub fn compose(&self, other: &McsMorphism) -> Result<McsMorphism, McsError> {
        let components = self.components.iter().zip(&other.components).map(|(x, y)| x.compose(y)).collect::<Result<_, _>>()?;
        Ok(McsMorphism { components })
    }

    pub fn inverse(&self) -> Result<McsMorphism, McsError> {
        let components = self.components.iter().map(|c| c.inverse()).collect::<Result<_, _>>()?;
        Ok(McsMorphism { components })
    }
}

/// Linear system whose kernel is the space of degree-0 morphisms `a → b`.
/// Unknowns are the degree-0 Hom coordinates of every interval, in order.
pub(crate) struct CocycleSystem {
    pub homs: Vec<HomComplex>,
    pub offsets: Vec<usize>,
    pub matrix: DenseMatrix,
}

impl CocycleSystem {
    pub fn build(a: &MCSObject, b: &MCSObject) -> Self {
        let f = a.field();
        let homs: Vec<HomComplex> = a.intervals.iter().zip(&b.intervals).map(|(x, y)| HomComplex::new(x, y)).collect();
        let mut offsets = vec![0];
        for h in &homs {
            offsets.push(offsets.last().unwrap() + h.dim(0));
        }
        let unknowns = *offsets.last().unwrap();
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for (t, h) in homs.iter().enumerate() {
            let dm = h.differential(0);
            for r in 0..dm.rows() {
                let mut row = vec![0; unknowns];
                row[offsets[t]..offsets[t + 1]].copy_from_slice(dm.row(r));
                rows.push(row);
            }
        }
        for s in 0..a.strata.len() {
            let (hl, hr) = (&homs[s], &homs[s + 1]);
            let zero_l = DenseMatrix::zeros(f, b.intervals[s].len(), a.intervals[s].len());
            let zero_r = DenseMatrix::zeros(f, b.intervals[s + 1].len(), a.intervals[s + 1].len());
            let mut columns: Vec<(usize, DenseMatrix)> = Vec::new();
            let mut unit = vec![0; hl.dim(0)];
            for c in 0..hl.dim(0) {
                unit[c] = 1;
                let left = hl.from_coords(0, &unit);
                columns.push((offsets[s] + c, stratum_residual(a, b, s, left.matrix(), &zero_r)));
                unit[c] = 0;
            }
            let mut unit = vec![0; hr.dim(0)];
            for c in 0..hr.dim(0) {
                unit[c] = 1;
                let right = hr.from_coords(0, &unit);
                columns.push((offsets[s + 1] + c, stratum_residual(a, b, s, &zero_l, right.matrix())));
                unit[c] = 0;
            }
            let Some((_, first)) = columns.first() else { continue };
            let (nr, nc) = (first.rows(), first.cols());
            for r in 0..nr {
                for c in 0..nc {
                    let mut row = vec![0; unknowns];
                    let mut any = false;
                    for (u, m) in &columns {
                        let v = m.get(r, c);
                        if v != 0 {
                            row[*u] = v;
                            any = true;
                        }
                    }
                    if any {
                        rows.push(row);
                    }
                }
            }
        }
        let matrix = DenseMatrix::from_fn(f, rows.len(), unknowns, |r, c| rows[r][c]);
        CocycleSystem { homs, offsets, matrix }
    }

    pub fn unknowns(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Positions of the diagonal entries `|i⟩⟨i|` among the unknowns.
    pub fn diagonal_positions(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (t, h) in self.homs.iter().enumerate() {
            for (c, &(j, i)) in h.basis(0).iter().enumerate() {
                if i == j {
                    out.push(self.offsets[t] + c);
                }
            }
        }
        out
    }

    pub fn morphism(&self, coords: &[u32]) -> McsMorphism {
        let components = self
            .homs
            .iter()
            .enumerate()
            .map(|(t, h)| h.from_coords(0, &coords[self.offsets[t]..self.offsets[t + 1]]))
            .collect();
        McsMorphism { components }
    }
}

/// A degree-0 cocycle of the homotopy-limit Hom complex: a closed map on
/// every interval and every event point (a pair satisfying the point
/// relation), and for each point `p` and neighbour `I` a degree -1 homotopy
/// `η` with `D η = φ_p|_I - φ_I`. Strict morphisms have all homotopies zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherentMorphism {
    pub components: Vec<FilteredHom>,
    pub points: Vec<(FilteredHom, FilteredHom)>,
    pub homotopies: Vec<(FilteredHom, FilteredHom)>,
}

impl CoherentMorphism {
    pub fn from_strict(m: &McsMorphism, a: &MCSObject, b: &MCSObject) -> Self {
        let f = a.field();
        let n = m.components.len();
        let points = (0..n.saturating_sub(1)).map(|s| (m.components[s].clone(), m.components[s + 1].clone())).collect();
        let zero = |t: usize| FilteredHom::zero(f, a.intervals[t].basis(), b.intervals[t].basis(), -1);
        let homotopies = (0..n.saturating_sub(1)).map(|s| (zero(s), zero(s + 1))).collect();
        CoherentMorphism { components: m.components.clone(), points, homotopies }
    }

    pub fn is_strict(&self) -> bool {
        self.homotopies.iter().all(|(l, r)| l.matrix().is_zero() && r.matrix().is_zero())
    }

    pub fn is_invertible(&self) -> bool {
        self.components.iter().all(|c| c.is_invertible())
    }

    pub fn verify(&self, a: &MCSObject, b: &MCSObject) -> bool {
        let strata = a.strata.len();
        if !a.compatible(b)
            || !same_strata(a, b)
            || self.components.len() != a.intervals.len()
            || self.points.len() != strata
            || self.homotopies.len() != strata
        {
            return false;
        }
        let closed = |phi: &FilteredHom, t: usize| phi.degree() == 0 && phi.is_chain_map(&a.intervals[t], &b.intervals[t]);
        if !(0..a.intervals.len()).all(|t| closed(&self.components[t], t)) {
            return false;
        }
        (0..strata).all(|s| {
            let (pl, pr) = &self.points[s];
            let (hl, hr) = &self.homotopies[s];
            let homotopic = |eta: &FilteredHom, p: &FilteredHom, t: usize| {
                let hom = HomComplex::new(&a.intervals[t], &b.intervals[t]);
                eta.degree() == -1
                    && eta.source() == a.intervals[t].basis()
                    && eta.target() == b.intervals[t].basis()
                    && *hom.apply(eta).matrix() == p.matrix().sub(self.components[t].matrix())
            };
            closed(pl, s)
                && closed(pr, s + 1)
                && stratum_residual(a, b, s, pl.matrix(), pr.matrix()).is_zero()
                && homotopic(hl, pl, s)
                && homotopic(hr, pr, s + 1)
        })
    }

    /// `self ∘ other`; homotopies compose as `η = φ_p η' + η φ'_I`.
    pub fn compose(&self, other: &CoherentMorphism) -> Result<CoherentMorphism, McsError> {
        let comp = |x: &FilteredHom, y: &FilteredHom| x.compose(y).map_err(McsError::from);
        let components = self.components.iter().zip(&other.components).map(|(x, y)| comp(x, y)).collect::<Result<_, _>>()?;
        let mut points = Vec::with_capacity(self.points.len());
        let mut homotopies = Vec::with_capacity(self.points.len());
        for s in 0..self.points.len() {
            let (yl, yr) = &self.points[s];
            let (xl, xr) = &other.points[s];
            points.push((comp(yl, xl)?, comp(yr, xr)?));
            let side = |yp: &FilteredHom, ex: &FilteredHom, ey: &FilteredHom, xi: &FilteredHom| -> Result<FilteredHom, McsError> {
                let m = yp.matrix().mul(ex.matrix()).add(&ey.matrix().mul(xi.matrix()));
                Ok(FilteredHom::new(ex.source().clone(), ey.target().clone(), m, -1)?)
            };
            let (exl, exr) = &other.homotopies[s];
            let (eyl, eyr) = &self.homotopies[s];
            homotopies.push((
                side(yl, exl, eyl, &other.components[s])?,
                side(yr, exr, eyr, &other.components[s + 1])?,
            ));
        }
        Ok(CoherentMorphism { components, points, homotopies })
    }

    /// Componentwise inverse; homotopies become `-φ_I⁻¹ η φ_p⁻¹`.
    pub fn inverse(&self) -> Result<CoherentMorphism, McsError> {
        let components: Vec<FilteredHom> = self.components.iter().map(|c| c.inverse()).collect::<Result<_, _>>()?;
        let mut points = Vec::with_capacity(self.points.len());
        let mut homotopies = Vec::with_capacity(self.points.len());
        for s in 0..self.points.len() {
            let (pl, pr) = (self.points[s].0.inverse()?, self.points[s].1.inverse()?);
            let side = |eta: &FilteredHom, inv_i: &FilteredHom, inv_p: &FilteredHom| -> Result<FilteredHom, McsError> {
                let m = inv_i.matrix().mul(eta.matrix()).mul(inv_p.matrix());
                let m = m.scale(m.field().neg(1));
                Ok(FilteredHom::new(eta.target().clone(), eta.source().clone(), m, -1)?)
            };
            let (hl, hr) = &self.homotopies[s];
            homotopies.push((side(hl, &components[s], &pl)?, side(hr, &components[s + 1], &pr)?));
            points.push((pl, pr));
        }
        Ok(CoherentMorphism { components, points, homotopies })
    }
}

/// Searches for a degree-0 morphism `a → b` that is invertible on every
/// interval. Objects are first brought to a common refinement; the witness
/// lives on the refined objects returned alongside it. Strict morphisms are
/// tried first. When none is invertible the search widens to cocycles of the
/// homotopy-limit complex, whose homotopies may be nonzero.
pub fn mcs_isomorphic(a: &MCSObject, b: &MCSObject, bound: u64) -> Result<Option<IsoWitness>, McsError> {
    let (ra, rb) = if same_strata(a, b) { (a.clone(), b.clone()) } else { common_refinement(a, b)? };
    if !ra.compatible(&rb) {
        return Err(McsError::Incompatible);
    }
    let sys = CocycleSystem::build(&ra, &rb);
    let kernel = sys.matrix.kernel();
    let diag = sys.diagonal_positions();
    let projected: Vec<Vec<u32>> = kernel.iter().map(|v| diag.iter().map(|&p| v[p]).collect()).collect();
    let hit = find_nowhere_zero(ra.field(), &projected, diag.len(), bound).map_err(|dim| McsError::SearchSpaceTooLarge { dim })?;
    if let Some(coeffs) = hit {
        let coords = crate::coeff::combine(ra.field(), &coeffs, &kernel, sys.unknowns());
        let strict = sys.morphism(&coords);
        debug_assert!(strict.verify(&ra, &rb) && strict.is_invertible());
        let morphism = CoherentMorphism::from_strict(&strict, &ra, &rb);
        return Ok(Some(IsoWitness { source: ra, target: rb, morphism }));
    }
    let tc = crate::sheaf::hom_total(&ra, &rb).map_err(|_| McsError::Incompatible)?;
    match tc.invertible_cocycle(bound) {
        Ok(Some(morphism)) => {
            debug_assert!(morphism.verify(&ra, &rb));
            Ok(Some(IsoWitness { source: ra, target: rb, morphism }))
        }
        Ok(None) => Ok(None),
        Err(crate::sheaf::SheafError::SearchSpaceTooLarge { dim }) => Err(McsError::SearchSpaceTooLarge { dim }),
        Err(_) => Err(McsError::Incompatible),
    }
}

/// An isomorphism together with the refined objects it relates.
#[derive(Debug, Clone)]
pub struct IsoWitness {
    pub source: MCSObject,
    pub target: MCSObject,
    pub morphism: CoherentMorphism,
}

impl IsoWitness {
    pub fn verify(&self) -> bool {
        self.morphism.is_invertible() && self.morphism.verify(&self.source, &self.target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> Field {
        Field::new(p).unwrap()
    }

    fn unknot(p: u32, c: i64) -> MCSObject {
        let fld = f(p);
        let front = FrontDiagram::parse("L1 R1").unwrap();
        let mid = DenseMatrix::from_rows(fld, &[&[0, 0], &[c, 0]]).unwrap();
        MCSObject::new(front, 1, vec![DenseMatrix::zeros(fld, 0, 0), mid, DenseMatrix::zeros(fld, 0, 0)], vec![]).unwrap()
    }

    #[test]
    fn unknot_validation() {
        assert!(unknot(2, 1).is_valid());
        let diags = unknot(2, 0).validate();
        assert_eq!(diags.len(), 2);
        assert!(diags.iter().all(|d| matches!(d.location, Location::Stratum(_))));
        assert!(diags.iter().any(|d| d.location == Location::Stratum(1)));
    }

    #[test]
    fn projection_kills_cusp_pair() {
        let fld = f(5);
        // 4 generators, μ = (3,2,2,1): d|1> = 2|2> + |3>, arbitrary below
        let d = DenseMatrix::from_rows(fld, &[&[0, 0, 0, 0], &[2, 0, 0, 0], &[1, 0, 0, 0], &[0, 3, 4, 0]]).unwrap();
        let pi = cusp_projection(&d, 0).unwrap();
        assert!(pi.mul(&d.select(&[0, 1, 2, 3], &[0])).is_zero());
        let e0 = DenseMatrix::column(fld, &[1, 0, 0, 0]);
        assert!(pi.mul(&e0).is_zero());
    }

    #[test]
    fn factorization_examples() {
        let fld = f(5);
        let b = GradedBasis::new(vec![1, 1]);
        let diag = FilteredHom::new(b.clone(), b.clone(), DenseMatrix::diagonal(fld, &[1, 3]), 0).unwrap();
        let fac = factor_handle_slide(&diag).unwrap();
        assert!(fac.factors.is_empty());
        assert_eq!(fac.diagonal, vec![1, 3]);
        let e = FilteredHom::new(b.clone(), b, DenseMatrix::from_rows(fld, &[&[1, 0], &[4, 1]]).unwrap(), 0).unwrap();
        let fac = factor_handle_slide(&e).unwrap();
        assert_eq!(fac.factors, vec![ElementarySlide { row: 1, col: 0, coeff: 4 }]);
        assert_eq!(fac.diagonal, vec![1, 1]);
        let b3 = GradedBasis::new(vec![0, 0, 0]);
        let g = DenseMatrix::from_rows(fld, &[&[2, 0, 0], &[1, 3, 0], &[4, 2, 1]]).unwrap();
        let fac = factor_handle_slide(&FilteredHom::new(b3.clone(), b3, g.clone(), 0).unwrap()).unwrap();
        assert_eq!(fac.product(fld), g);
    }

    #[test]
    fn factorization_errors() {
        let fld = f(3);
        let b = GradedBasis::new(vec![1, 1]);
        let sing = FilteredHom::new(b.clone(), b, DenseMatrix::diagonal(fld, &[1, 0]), 0).unwrap();
        assert_eq!(factor_handle_slide(&sing), Err(McsError::NotInvertible));
        let src = GradedBasis::new(vec![2]);
        let tgt = GradedBasis::new(vec![1]);
        let shifted = FilteredHom::new(src, tgt, DenseMatrix::identity(fld, 1), 1).unwrap();
        assert_eq!(factor_handle_slide(&shifted), Err(McsError::NotDegreeZero));
    }

    #[test]
    fn unknot_isomorphism_over_f3() {
        let a = unknot(3, 1);
        let b = unknot(3, 2);
        let w = mcs_isomorphic(&a, &b, 1_000_000).unwrap().unwrap();
        assert!(w.verify());
        assert!(w.morphism.components[1].matrix().is_diagonal());
        let id = mcs_isomorphic(&a, &a, 1_000_000).unwrap().unwrap();
        assert!(id.verify());
    }

    #[test]
    fn diagonal_into_death() {
        let a = unknot(3, 1);
        let fld = f(3);
        let s = MCSObject::new(
            a.front().clone(),
            1,
            vec![
                DenseMatrix::zeros(fld, 0, 0),
                a.interval(1).d().clone(),
                DenseMatrix::from_rows(fld, &[&[0, 0], &[2, 0]]).unwrap(),
                DenseMatrix::zeros(fld, 0, 0),
            ],
            vec![(1, DenseMatrix::diagonal(fld, &[2, 1]))],
        )
        .unwrap();
        assert!(s.is_valid(), "{:?}", s.validate());
        let pushed = push_diagonal_right(&s, 1).unwrap();
        assert_eq!(pushed.slide_count(), 0);
        assert!(pushed.is_valid());
        assert!(mcs_isomorphic(&s, &pushed, 1_000_000).unwrap().unwrap().verify());
    }

    #[test]
    fn identity_slide_is_dropped() {
        let a = unknot(2, 1);
        let fld = f(2);
        let mid = a.interval(1).d().clone();
        let s = MCSObject::new(
            a.front().clone(),
            1,
            vec![DenseMatrix::zeros(fld, 0, 0), mid.clone(), mid, DenseMatrix::zeros(fld, 0, 0)],
            vec![(1, DenseMatrix::identity(fld, 2))],
        )
        .unwrap();
        assert_eq!(push_diagonal_right(&s, 1).unwrap(), a);
        assert_eq!(remove_handle_slide(&s, 1).unwrap(), a);
        assert_eq!(normalize_elementary(&s).unwrap(), a);
        assert_eq!(push_diagonal_right(&s, 0), Err(McsError::NotASlide(0)));
    }
}
