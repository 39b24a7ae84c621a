//! The constructible sheaf attached to a Morse complex sequence.
//!
//! Over an interval with complex `(V, d)` the stalk in gap `g` (between
//! strands `g - 1` and `g`, 0-based; gap 0 is above everything) is the
//! subcomplex spanned by generators on strands `≥ g`. Moving up across a
//! strand is the inclusion of the smaller subcomplex.
//!
//! Over an event point, stalks are taken in the coordinates of the left
//! interval (crossings, deaths, slides) or of the right interval (births),
//! gap by gap. The singular gap of a crossing or cusp is the singular point
//! itself, whose stalk is the one just below it.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::coeff::{combine, find_nowhere_zero, DenseMatrix, Field};
use crate::front::{EventKind, FrontDiagram};
use crate::mc::{ChainComplex, FilteredHom, HomComplex};
use crate::mcs::{cusp_projection, same_strata, stratum_residual, transposition, CoherentMorphism, MCSObject, McsError, Stratum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error("invalid stalk query")]
    InvalidQuery,
    #[error("stalk queries are not adjacent")]
    NotAdjacent,
    #[error("objects are not refined to the same strata")]
    StrataMismatch,
    #[error("objects live on different fronts, potentials or fields")]
    Incompatible,
    #[error("H^0 has dimension {h0} but strict cocycles only span {strict}")]
    NonStrictRepresentative { h0: usize, strict: usize },
    #[error("invertible cocycle search space has dimension {dim}, over the configured bound")]
    SearchSpaceTooLarge { dim: usize },
    #[error("sum of objects on different fronts")]
    SumMismatch,
    #[error(transparent)]
    Mcs(#[from] McsError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Layer {
    d: DenseMatrix,
    strand: Vec<usize>,
    degree: Vec<i32>,
    strands: usize,
}

impl Layer {
    fn below(&self, gap: usize) -> Vec<usize> {
        (0..self.strand.len()).filter(|&g| self.strand[g] >= gap).collect()
    }
}

/// Where a point stalk's generators live and where its gaps go.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Stalk data of an MCS in which each strand may carry several generators,
/// so that direct sums can be formed.
#[derive(Debug, Clone)]
pub struct SheafModel {
    field: Field,
    front: FrontDiagram,
    strata: Vec<Stratum>,
    mu: Vec<Vec<i32>>,
    layers: Vec<Layer>,
    /// Left to right for crossings, deaths and slides; right to left for births.
    maps: Vec<DenseMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum XLocation {
    Interval(usize),
    Point(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct StalkQuery {
    pub x: XLocation,
    pub gap: usize,
}

impl StalkQuery {
    pub fn interval(t: usize, gap: usize) -> Self {
        StalkQuery { x: XLocation::Interval(t), gap }
    }

    pub fn point(s: usize, gap: usize) -> Self {
        StalkQuery { x: XLocation::Point(s), gap }
    }
}

/// A stalk: a subset of the generators of one interval with the restricted differential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stalk {
    pub interval: usize,
    pub generators: Vec<usize>,
    pub degrees: Vec<i32>,
    pub d: DenseMatrix,
}

impl Stalk {
    pub fn complex(&self) -> ChainComplex {
        ChainComplex::from_graded(self.d.field(), &self.degrees, &self.d)
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StalkMap {
    pub source: Stalk,
    pub target: Stalk,
    pub matrix: DenseMatrix,
}

impl StalkMap {
    pub fn is_chain_map(&self) -> bool {
        self.matrix.mul(&self.source.d) == self.target.d.mul(&self.matrix)
    }

    /// `Cone(f) = A[1] ⊕ B` with `D(a, b) = (-d a, f a + d b)`.
    pub fn cone(&self) -> ChainComplex {
        let f = self.matrix.field();
        let (na, nb) = (self.source.dim(), self.target.dim());
        let mut degrees: Vec<i32> = self.source.degrees.iter().map(|d| d - 1).collect();
        degrees.extend_from_slice(&self.target.degrees);
        let d = DenseMatrix::from_fn(f, na + nb, na + nb, |r, c| match (r < na, c < na) {
            (true, true) => f.neg(self.source.d.get(r, c)),
            (false, true) => self.matrix.get(r - na, c),
            (false, false) => self.target.d.get(r - na, c - na),
            (true, false) => 0,
        });
        ChainComplex::from_graded(f, &degrees, &d)
    }

    pub fn is_quasi_isomorphism(&self) -> bool {
        self.cone().is_acyclic()
    }
}

/// One gap of an event point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointGap {
    pub gap: usize,
    /// The singular point of a crossing or cusp.
    pub on_front: bool,
    pub left_gap: usize,
    pub right_gap: usize,
    /// Lowest strand (native coordinates) of the generators in the stalk.
    first_strand: usize,
}

impl SheafModel {
    pub fn from_mcs(s: &MCSObject) -> Self {
        let f = s.field();
        let mut mu = Vec::new();
        let layers: Vec<Layer> = s
            .intervals()
            .iter()
            .enumerate()
            .map(|(_, o)| {
                mu.push(o.basis().mu().to_vec());
                Layer { d: o.d().clone(), strand: (0..o.len()).collect(), degree: o.basis().degrees(), strands: o.len() }
            })
            .collect();
        let maps = s
            .strata()
            .iter()
            .enumerate()
            .map(|(i, st)| {
                let (dm, dp) = (s.interval(i).d(), s.interval(i + 1).d());
                match st {
                    Stratum::Slide(g) => g.clone(),
                    Stratum::Event { event, .. } => {
                        let k = event.position - 1;
                        match event.kind {
                            EventKind::Crossing => transposition(f, dm.rows(), k),
                            EventKind::RightCusp => {
                                cusp_projection(dm, k).unwrap_or_else(|| DenseMatrix::zeros(f, dm.rows() - 2, dm.rows()))
                            }
                            EventKind::LeftCusp => {
                                cusp_projection(dp, k).unwrap_or_else(|| DenseMatrix::zeros(f, dp.rows() - 2, dp.rows()))
                            }
                        }
                    }
                }
            })
            .collect();
        SheafModel { field: f, front: s.front().clone(), strata: s.strata().to_vec(), mu, layers, maps }
    }

    /// Strand-wise direct sum; generators are ordered by strand, then by summand.
    pub fn direct_sum(&self, other: &SheafModel) -> Result<SheafModel, SheafError> {
        if self.front != other.front || self.strata.len() != other.strata.len() || self.mu != other.mu {
            return Err(SheafError::SumMismatch);
        }
        let f = self.field;
        // perms[t][new] = old index in the block sum
        let perms: Vec<Vec<usize>> = self
            .layers
            .iter()
            .zip(&other.layers)
            .map(|(a, b)| {
                let mut idx: Vec<(usize, usize, usize)> = (0..a.strand.len()).map(|g| (a.strand[g], 0, g)).collect();
                idx.extend((0..b.strand.len()).map(|g| (b.strand[g], 1, a.strand.len() + g)));
                idx.sort();
                idx.into_iter().map(|(_, _, g)| g).collect()
            })
            .collect();
        let layers = self
            .layers
            .iter()
            .zip(&other.layers)
            .zip(&perms)
            .map(|((a, b), p)| {
                let d = a.d.direct_sum(&b.d).select(p, p);
                let strand_all: Vec<usize> = a.strand.iter().chain(&b.strand).copied().collect();
                let degree_all: Vec<i32> = a.degree.iter().chain(&b.degree).copied().collect();
                Layer {
                    d,
                    strand: p.iter().map(|&g| strand_all[g]).collect(),
                    degree: p.iter().map(|&g| degree_all[g]).collect(),
                    strands: a.strands,
                }
            })
            .collect();
        let maps = self
            .maps
            .iter()
            .zip(&other.maps)
            .enumerate()
            .map(|(s, (ma, mb))| {
                let sum = ma.direct_sum(mb);
                match self.native_side(s) {
                    Side::Left => sum.select(&perms[s + 1], &perms[s]),
                    Side::Right => sum.select(&perms[s], &perms[s + 1]),
                }
            })
            .collect();
        Ok(SheafModel { field: f, front: self.front.clone(), strata: self.strata.clone(), mu: self.mu.clone(), layers, maps })
    }

    pub fn interval_count(&self) -> usize {
        self.layers.len()
    }

    pub fn strands(&self, t: usize) -> usize {
        self.layers[t].strands
    }

    fn native_side(&self, s: usize) -> Side {
        match &self.strata[s] {
            Stratum::Event { event, .. } if event.kind == EventKind::LeftCusp => Side::Right,
            _ => Side::Left,
        }
    }

    fn native_interval(&self, s: usize) -> usize {
        match self.native_side(s) {
            Side::Left => s,
            Side::Right => s + 1,
        }
    }

    /// The gaps of event point `s`, in native coordinates.
    pub fn point_gaps(&self, s: usize) -> Vec<PointGap> {
        let n = self.layers[self.native_interval(s)].strands;
        let plain = |g: usize| PointGap { gap: g, on_front: false, left_gap: g, right_gap: g, first_strand: g };
        match &self.strata[s] {
            Stratum::Slide(_) => (0..=n).map(plain).collect(),
            Stratum::Event { event, .. } => {
                let k = event.position - 1;
                (0..=n)
                    .map(|g| {
                        if g == k + 1 {
                            let (left_gap, right_gap) = match event.kind {
                                EventKind::Crossing => (k + 1, k + 1),
                                EventKind::RightCusp => (k + 1, k),
                                EventKind::LeftCusp => (k, k + 1),
                            };
                            PointGap { gap: g, on_front: true, left_gap, right_gap, first_strand: k + 2 }
                        } else if g > k + 1 {
                            match event.kind {
                                EventKind::Crossing => plain(g),
                                EventKind::RightCusp => PointGap { right_gap: g - 2, ..plain(g) },
                                EventKind::LeftCusp => PointGap { left_gap: g - 2, ..plain(g) },
                            }
                        } else {
                            plain(g)
                        }
                    })
                    .collect()
            }
        }
    }

    fn stalk_of(&self, t: usize, gens: Vec<usize>) -> Stalk {
        let layer = &self.layers[t];
        Stalk {
            interval: t,
            degrees: gens.iter().map(|&g| layer.degree[g]).collect(),
            d: layer.d.select(&gens, &gens),
            generators: gens,
        }
    }

    pub fn stalk_at(&self, q: StalkQuery) -> Result<Stalk, SheafError> {
        match q.x {
            XLocation::Interval(t) => {
                let layer = self.layers.get(t).ok_or(SheafError::InvalidQuery)?;
                if q.gap > layer.strands {
                    return Err(SheafError::InvalidQuery);
                }
                Ok(self.stalk_of(t, layer.below(q.gap)))
            }
            XLocation::Point(s) => {
                if s >= self.strata.len() {
                    return Err(SheafError::InvalidQuery);
                }
                let pg = *self.point_gaps(s).get(q.gap).ok_or(SheafError::InvalidQuery)?;
                let t = self.native_interval(s);
                Ok(self.stalk_of(t, self.layers[t].below(pg.first_strand)))
            }
        }
    }

    /// Vertical maps `(t, g) → (t, g - 1)` on intervals and horizontal maps
    /// from an event point to either neighbouring interval.
    pub fn generization(&self, from: StalkQuery, to: StalkQuery) -> Result<StalkMap, SheafError> {
        let source = self.stalk_at(from)?;
        let target = self.stalk_at(to)?;
        let f = self.field;
        let select = |m: &DenseMatrix| m.select(&target.generators, &source.generators);
        let matrix = match (from.x, to.x) {
            (XLocation::Interval(a), XLocation::Interval(b)) if a == b && to.gap + 1 == from.gap => {
                select(&DenseMatrix::identity(f, self.layers[a].strand.len()))
            }
            (XLocation::Point(s), XLocation::Interval(t)) if t == s || t == s + 1 => {
                let pg = self.point_gaps(s)[from.gap];
                let side = if t == s { Side::Left } else { Side::Right };
                let expected = if side == Side::Left { pg.left_gap } else { pg.right_gap };
                if to.gap != expected {
                    return Err(SheafError::NotAdjacent);
                }
                if side == self.native_side(s) {
                    select(&DenseMatrix::identity(f, self.layers[t].strand.len()))
                } else {
                    select(&self.maps[s])
                }
            }
            _ => return Err(SheafError::NotAdjacent),
        };
        Ok(StalkMap { source, target, matrix })
    }

    /// Cone of the inclusion across strand `strand` of interval `t`.
    pub fn microstalk(&self, t: usize, strand: usize) -> Result<Microstalk, SheafError> {
        let map = self.generization(StalkQuery::interval(t, strand + 1), StalkQuery::interval(t, strand))?;
        let cohomology = map.cone().cohomology();
        Ok(Microstalk {
            interval: t,
            strand,
            rank: cohomology.iter().map(|&(_, d)| d).sum(),
            cohomology,
            expected_degree: -self.mu[t][strand],
        })
    }

    pub fn microstalks(&self) -> Vec<Microstalk> {
        let mut out = Vec::new();
        for t in 0..self.layers.len() {
            for i in 0..self.layers[t].strands {
                out.push(self.microstalk(t, i).expect("valid query"));
            }
        }
        out
    }

    /// Checks the four microsupport conditions and lists every failure.
    pub fn verify_microsupport(&self) -> MicrosupportReport {
        let mut failures = Vec::new();
        for s in 0..self.strata.len() {
            for pg in self.point_gaps(s) {
                if pg.on_front {
                    continue;
                }
                for (t, g) in [(s, pg.left_gap), (s + 1, pg.right_gap)] {
                    let map = self.generization(StalkQuery::point(s, pg.gap), StalkQuery::interval(t, g)).expect("adjacent");
                    if !map.is_chain_map() || !map.is_quasi_isomorphism() {
                        failures.push(format!("generization from point {s} gap {} to interval {t} gap {g} is not a quasi-isomorphism", pg.gap));
                    }
                }
            }
        }
        for m in self.microstalks() {
            if m.rank != 1 || m.cohomology.first().map(|&(d, _)| d) != Some(m.expected_degree) {
                failures.push(format!(
                    "microstalk at interval {} strand {} has cohomology {:?}, expected rank 1 in degree {}",
                    m.interval, m.strand, m.cohomology, m.expected_degree
                ));
            }
        }
        for t in 0..self.layers.len() {
            let n = self.layers[t].strands;
            if self.stalk_at(StalkQuery::interval(t, n)).unwrap().dim() != 0 {
                failures.push(format!("stalk below all strands of interval {t} is nonzero"));
            }
            if !self.stalk_at(StalkQuery::interval(t, 0)).unwrap().complex().is_acyclic() {
                failures.push(format!("full complex of interval {t} is not acyclic"));
            }
        }
        for s in 0..self.strata.len() {
            let last = self.point_gaps(s).len() - 1;
            if self.stalk_at(StalkQuery::point(s, last)).unwrap().dim() != 0 {
                failures.push(format!("stalk below all strands at point {s} is nonzero"));
            }
        }
        MicrosupportReport { passed: failures.is_empty(), failures }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Microstalk {
    pub interval: usize,
    pub strand: usize,
    pub rank: usize,
    pub cohomology: Vec<(i32, usize)>,
    pub expected_degree: i32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MicrosupportReport {
    pub passed: bool,
    pub failures: Vec<String>,
}

pub fn verify_microsupport(s: &MCSObject) -> MicrosupportReport {
    SheafModel::from_mcs(s).verify_microsupport()
}

/// Pairs `(φ₋, φ₊)` over an event point satisfying its relation, degree by degree.
#[derive(Debug, Clone)]
struct PointHom {
    /// Kernel basis vectors in `Hom_left^n ⊕ Hom_right^n` coordinates.
    basis: BTreeMap<i32, Vec<Vec<u32>>>,
    free: BTreeMap<i32, Vec<usize>>,
}

impl PointHom {
    fn dim(&self, deg: i32) -> usize {
        self.basis.get(&deg).map_or(0, |b| b.len())
    }

    fn coords_of(&self, deg: i32, v: &[u32]) -> Vec<u32> {
        self.free.get(&deg).map_or(Vec::new(), |fr| fr.iter().map(|&c| v[c]).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Summand {
    Interval(usize),
    Point(usize),
    /// Arrow from point `s` to interval `t`.
    Arrow(usize, usize),
}

/// Homotopy limit over the poset of strata: intervals, event points and an
/// arrow from each point to each neighbouring interval.
#[derive(Debug, Clone)]
pub struct HomTotalComplex {
    field: Field,
    homs: Vec<HomComplex>,
    points: Vec<PointHom>,
    layout: BTreeMap<i32, Vec<(Summand, usize)>>,
    complex: ChainComplex,
}

pub fn hom_total(a: &MCSObject, b: &MCSObject) -> Result<HomTotalComplex, SheafError> {
    if !a.compatible(b) {
        return Err(SheafError::Incompatible);
    }
    if !same_strata(a, b) {
        return Err(SheafError::StrataMismatch);
    }
    let f = a.field();
    let homs: Vec<HomComplex> = a.intervals().iter().zip(b.intervals()).map(|(x, y)| HomComplex::new(x, y)).collect();
    let strata = a.strata().len();
    let mut points = Vec::with_capacity(strata);
    for s in 0..strata {
        let (hl, hr) = (&homs[s], &homs[s + 1]);
        let degrees: Vec<i32> = hl.degrees().chain(hr.degrees()).collect::<alloc::collections::BTreeSet<_>>().into_iter().collect();
        let mut basis = BTreeMap::new();
        let mut free = BTreeMap::new();
        for deg in degrees {
            let (nl, nr) = (hl.dim(deg), hr.dim(deg));
            let mut columns = Vec::with_capacity(nl + nr);
            for c in 0..nl + nr {
                let mut u = vec![0; nl + nr];
                u[c] = 1;
                let left = hl.from_coords(deg, &u[..nl]);
                let right = hr.from_coords(deg, &u[nl..]);
                columns.push(stratum_residual(a, b, s, left.matrix(), right.matrix()));
            }
            let (rr, rc) = columns.first().map_or((0, 0), |m| (m.rows(), m.cols()));
            let rel = DenseMatrix::from_fn(f, rr * rc, nl + nr, |r, c| columns[c].get(r / rc.max(1), r % rc.max(1)));
            let (kb, kf) = rel.kernel_with_free();
            if !kb.is_empty() {
                basis.insert(deg, kb);
                free.insert(deg, kf);
            }
        }
        points.push(PointHom { basis, free });
    }

    let mut layout: BTreeMap<i32, Vec<(Summand, usize)>> = BTreeMap::new();
    let mut add = |deg: i32, s: Summand, dim: usize| {
        if dim > 0 {
            layout.entry(deg).or_default().push((s, dim));
        }
    };
    for (t, h) in homs.iter().enumerate() {
        for deg in h.degrees() {
            add(deg, Summand::Interval(t), h.dim(deg));
        }
    }
    for (s, p) in points.iter().enumerate() {
        for (&deg, vs) in &p.basis {
            add(deg, Summand::Point(s), vs.len());
        }
    }
    for s in 0..strata {
        for t in [s, s + 1] {
            for deg in homs[t].degrees() {
                add(deg + 1, Summand::Arrow(s, t), homs[t].dim(deg));
            }
        }
    }

    let mut tc = HomTotalComplex { field: f, homs, points, layout, complex: ChainComplex::new(f) };
    let degrees: Vec<i32> = tc.layout.keys().copied().collect();
    for &deg in &degrees {
        tc.complex.set_dim(deg, tc.dim(deg));
    }
    for &deg in &degrees {
        if tc.dim(deg + 1) > 0 {
            let m = tc.differential_block(deg);
            tc.complex.set_differential(deg, m);
        }
    }
    Ok(tc)
}

impl HomTotalComplex {
    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn dim(&self, deg: i32) -> usize {
        self.layout.get(&deg).map_or(0, |v| v.iter().map(|&(_, d)| d).sum())
    }

    pub fn cohomology(&self) -> Vec<(i32, usize)> {
        self.complex.cohomology()
    }

    fn offset(&self, deg: i32, s: Summand) -> Option<usize> {
        let mut off = 0;
        for &(x, d) in self.layout.get(&deg)? {
            if x == s {
                return Some(off);
            }
            off += d;
        }
        None
    }

    fn differential_block(&self, deg: i32) -> DenseMatrix {
        let f = self.field;
        let mut m = DenseMatrix::zeros(f, self.dim(deg + 1), self.dim(deg));
        let mut place = |row_off: usize, col_off: usize, block: &DenseMatrix, sign: u32| {
            for (r, c, v) in block.nonzero_entries() {
                let cur = m.get(row_off + r, col_off + c);
                m.set(row_off + r, col_off + c, f.add(cur, f.mul(sign, v)));
            }
        };
        let minus = f.neg(1);
        for &(summand, _) in self.layout.get(&deg).map_or(&[][..], |v| v.as_slice()) {
            let col = self.offset(deg, summand).unwrap();
            match summand {
                Summand::Interval(t) => {
                    if let Some(row) = self.offset(deg + 1, Summand::Interval(t)) {
                        place(row, col, &self.homs[t].differential(deg), 1);
                    }
                    for s in [t.wrapping_sub(1), t] {
                        if let Some(row) = self.offset(deg + 1, Summand::Arrow(s, t)) {
                            place(row, col, &DenseMatrix::identity(f, self.homs[t].dim(deg)), minus);
                        }
                    }
                }
                Summand::Point(s) => {
                    if let Some(row) = self.offset(deg + 1, Summand::Point(s)) {
                        place(row, col, &self.point_differential(s, deg), 1);
                    }
                    for (t, side) in [(s, 0), (s + 1, 1)] {
                        if let Some(row) = self.offset(deg + 1, Summand::Arrow(s, t)) {
                            place(row, col, &self.restriction(s, deg, side), 1);
                        }
                    }
                }
                Summand::Arrow(s, t) => {
                    if let Some(row) = self.offset(deg + 1, Summand::Arrow(s, t)) {
                        place(row, col, &self.homs[t].differential(deg - 1), minus);
                    }
                }
            }
        }
        m
    }

    /// `W_s^deg → Hom_t^deg` for the left (`side = 0`) or right neighbour.
    fn restriction(&self, s: usize, deg: i32, side: usize) -> DenseMatrix {
        let nl = self.homs[s].dim(deg);
        let nr = self.homs[s + 1].dim(deg);
        let basis = &self.points[s].basis[&deg];
        let (start, len) = if side == 0 { (0, nl) } else { (nl, nr) };
        DenseMatrix::from_fn(self.field, len, basis.len(), |r, c| basis[c][start + r])
    }

    fn point_differential(&self, s: usize, deg: i32) -> DenseMatrix {
        let (hl, hr) = (&self.homs[s], &self.homs[s + 1]);
        let p = &self.points[s];
        let src = &p.basis[&deg];
        let nl = hl.dim(deg);
        let mut m = DenseMatrix::zeros(self.field, p.dim(deg + 1), src.len());
        for (c, v) in src.iter().enumerate() {
            let dl = hl.apply(&hl.from_coords(deg, &v[..nl]));
            let dr = hr.apply(&hr.from_coords(deg, &v[nl..]));
            let mut image = hl.coords(&dl);
            image.extend(hr.coords(&dr));
            for (r, x) in p.coords_of(deg + 1, &image).into_iter().enumerate() {
                m.set(r, c, x);
            }
        }
        m
    }

    /// Degree-0 vector of the strict family with the given interval components.
    pub fn strict_vector(&self, components: &[FilteredHom]) -> Vec<u32> {
        let mut v = vec![0; self.dim(0)];
        for (t, h) in self.homs.iter().enumerate() {
            if let Some(off) = self.offset(0, Summand::Interval(t)) {
                for (i, x) in h.coords(&components[t]).into_iter().enumerate() {
                    v[off + i] = x;
                }
            }
        }
        for s in 0..self.points.len() {
            if let Some(off) = self.offset(0, Summand::Point(s)) {
                let mut both = self.homs[s].coords(&components[s]);
                both.extend(self.homs[s + 1].coords(&components[s + 1]));
                for (i, x) in self.points[s].coords_of(0, &both).into_iter().enumerate() {
                    v[off + i] = x;
                }
            }
        }
        v
    }

    /// Interval components of a degree-0 vector.
    pub fn components(&self, v: &[u32]) -> Vec<FilteredHom> {
        self.homs
            .iter()
            .enumerate()
            .map(|(t, h)| match self.offset(0, Summand::Interval(t)) {
                Some(off) => h.from_coords(0, &v[off..off + h.dim(0)]),
                None => h.from_coords(0, &[]),
            })
            .collect()
    }

    fn arrow_columns(&self, deg: i32) -> Vec<bool> {
        let mut out = Vec::new();
        for &(s, d) in self.layout.get(&deg).map_or(&[][..], |v| v.as_slice()) {
            out.extend(core::iter::repeat(matches!(s, Summand::Arrow(..))).take(d));
        }
        out
    }

    /// Degree-0 cocycles whose arrow components vanish.
    pub fn strict_cocycles(&self) -> Vec<Vec<u32>> {
        let arrows = self.arrow_columns(0);
        let keep: Vec<usize> = (0..arrows.len()).filter(|&c| !arrows[c]).collect();
        let d0 = self.complex.differential(0);
        let rows: Vec<usize> = (0..d0.rows()).collect();
        let restricted = d0.select(&rows, &keep);
        restricted
            .kernel()
            .into_iter()
            .map(|k| {
                let mut v = vec![0; arrows.len()];
                for (&c, x) in keep.iter().zip(k) {
                    v[c] = x;
                }
                v
            })
            .collect()
    }

    /// Every degree-0 cocycle, arrow components included.
    pub fn cocycles(&self) -> Vec<Vec<u32>> {
        self.complex.differential(0).kernel()
    }

    /// A strict degree-0 cocycle invertible on every interval.
    pub fn invertible_strict_cocycle(&self, bound: u64) -> Result<Option<CoherentMorphism>, SheafError> {
        self.invertible_among(self.strict_cocycles(), bound)
    }

    /// A degree-0 cocycle whose interval components are all invertible; this
    /// is an isomorphism in the homotopy limit.
    pub fn invertible_cocycle(&self, bound: u64) -> Result<Option<CoherentMorphism>, SheafError> {
        self.invertible_among(self.cocycles(), bound)
    }

    fn invertible_among(&self, cocycles: Vec<Vec<u32>>, bound: u64) -> Result<Option<CoherentMorphism>, SheafError> {
        let mut diag = Vec::new();
        for (t, h) in self.homs.iter().enumerate() {
            if let Some(off) = self.offset(0, Summand::Interval(t)) {
                for (c, &(j, i)) in h.basis(0).iter().enumerate() {
                    if i == j {
                        diag.push(off + c);
                    }
                }
            }
        }
        let projected: Vec<Vec<u32>> = cocycles.iter().map(|v| diag.iter().map(|&p| v[p]).collect()).collect();
        let hit = find_nowhere_zero(self.field, &projected, diag.len(), bound).map_err(|dim| SheafError::SearchSpaceTooLarge { dim })?;
        Ok(hit.map(|coeffs| self.morphism(&combine(self.field, &coeffs, &cocycles, self.dim(0)))))
    }

    /// Reads a degree-0 vector as interval maps, point pairs and homotopies.
    pub fn morphism(&self, v: &[u32]) -> CoherentMorphism {
        let components = self.components(v);
        let mut points = Vec::with_capacity(self.points.len());
        let mut homotopies = Vec::with_capacity(self.points.len());
        for s in 0..self.points.len() {
            let (hl, hr) = (&self.homs[s], &self.homs[s + 1]);
            let nl = hl.dim(0);
            let mut both = vec![0; nl + hr.dim(0)];
            if let Some(off) = self.offset(0, Summand::Point(s)) {
                for (k, b) in self.points[s].basis[&0].iter().enumerate() {
                    let c = v[off + k];
                    for (x, &y) in both.iter_mut().zip(b) {
                        *x = self.field.add(*x, self.field.mul(c, y));
                    }
                }
            }
            points.push((hl.from_coords(0, &both[..nl]), hr.from_coords(0, &both[nl..])));
            let eta = |t: usize| {
                let h = &self.homs[t];
                match self.offset(0, Summand::Arrow(s, t)) {
                    Some(off) => h.from_coords(-1, &v[off..off + h.dim(-1)]),
                    None => h.from_coords(-1, &[]),
                }
            };
            homotopies.push((eta(s), eta(s + 1)));
        }
        CoherentMorphism { components, points, homotopies }
    }
}

pub fn gf_homology(s: &MCSObject) -> Result<Vec<(i32, usize)>, SheafError> {
    Ok(hom_total(s, s)?.cohomology())
}

/// Product structure on `H⁰` of the endomorphism complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndRingReport {
    pub cohomology: Vec<(i32, usize)>,
    /// Coordinates of the identity class in the chosen basis.
    pub unit: Vec<u32>,
    /// `table[i][j]` holds the coordinates of `a_i ∘ a_j`.
    pub table: Vec<Vec<Vec<u32>>>,
    pub associative: bool,
    pub unital: bool,
}

pub fn end_ring(s: &MCSObject) -> Result<EndRingReport, SheafError> {
    let tc = hom_total(s, s)?;
    let f = tc.field;
    let h0 = tc.complex.cohomology_dim(0);
    let n0 = tc.dim(0);
    let boundary = tc.complex.differential(-1);
    let b_cols: Vec<Vec<u32>> = (0..boundary.cols()).map(|c| boundary.col(c)).collect();

    // extend a basis of B⁰ by strict cocycles
    let mut span: Vec<Vec<u32>> = Vec::new();
    let mut rank = 0;
    for v in &b_cols {
        let mut trial = span.clone();
        trial.push(v.clone());
        let r = DenseMatrix::from_fn(f, n0, trial.len(), |r, c| trial[c][r]).rank();
        if r > rank {
            span = trial;
            rank = r;
        }
    }
    let b_basis = span.clone();
    let mut reps: Vec<Vec<u32>> = Vec::new();
    for v in tc.strict_cocycles() {
        let mut trial = span.clone();
        trial.push(v.clone());
        let r = DenseMatrix::from_fn(f, n0, trial.len(), |r, c| trial[c][r]).rank();
        if r > rank {
            span = trial;
            rank = r;
            reps.push(v);
        }
    }
    if reps.len() < h0 {
        return Err(SheafError::NonStrictRepresentative { h0, strict: reps.len() });
    }
    let mut basis_cols = reps.clone();
    basis_cols.extend(b_basis.iter().cloned());
    let coords_matrix = DenseMatrix::from_fn(f, n0, basis_cols.len(), |r, c| basis_cols[c][r]);
    let coords = |v: &[u32]| -> Vec<u32> {
        let sol = coords_matrix.solve_affine(v).expect("shapes").expect("class lies in span");
        sol.particular[..reps.len()].to_vec()
    };
    let comps: Vec<Vec<FilteredHom>> = reps.iter().map(|v| tc.components(v)).collect();
    let compose = |a: &[FilteredHom], b: &[FilteredHom]| -> Vec<FilteredHom> {
        a.iter().zip(b).map(|(x, y)| x.compose(y).expect("same bases")).collect()
    };
    let table: Vec<Vec<Vec<u32>>> = comps
        .iter()
        .map(|a| comps.iter().map(|b| coords(&tc.strict_vector(&compose(a, b)))).collect())
        .collect();
    let identity: Vec<FilteredHom> = s.intervals().iter().map(|o| FilteredHom::identity(f, o.basis())).collect();
    let unit = coords(&tc.strict_vector(&identity));

    let h = reps.len();
    let mul = |x: &[u32], y: &[u32]| -> Vec<u32> {
        let mut out = vec![0; h];
        for i in 0..h {
            for j in 0..h {
                let c = f.mul(x[i], y[j]);
                if c == 0 {
                    continue;
                }
                for (o, &t) in out.iter_mut().zip(&table[i][j]) {
                    *o = f.add(*o, f.mul(c, t));
                }
            }
        }
        out
    };
    let e = |i: usize| -> Vec<u32> { (0..h).map(|t| u32::from(t == i)).collect() };
    let mut associative = true;
    let mut unital = true;
    for i in 0..h {
        if mul(&unit, &e(i)) != e(i) || mul(&e(i), &unit) != e(i) {
            unital = false;
        }
        for j in 0..h {
            for k in 0..h {
                if mul(&mul(&e(i), &e(j)), &e(k)) != mul(&e(i), &mul(&e(j), &e(k))) {
                    associative = false;
                }
            }
        }
    }
    Ok(EndRingReport { cohomology: tc.cohomology(), unit, table, associative, unital })
}

/// Human-readable location of a microstalk failure.
pub fn describe(q: StalkQuery) -> String {
    match q.x {
        XLocation::Interval(t) => format!("interval {t}, gap {}", q.gap),
        XLocation::Point(s) => format!("point {s}, gap {}", q.gap),
    }
}
