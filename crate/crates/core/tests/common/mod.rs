#![allow(dead_code)]

use legmcs_core::coeff::{for_each_vector, DenseMatrix, Field};
use legmcs_core::enumerate::birth_extensions;
use legmcs_core::front::{EventKind, FrontDiagram, MaslovPotential};
use legmcs_core::mc::{GradedBasis, MCObject};
use legmcs_core::mcs::{crossing_successor, cusp_quotient, MCSObject};
use rand::Rng;

pub const TREFOIL: &str = "L1 L1 X2 X2 X2 R1 R1";
pub const UNKNOT: &str = "L1 R1";

pub fn field(p: u32) -> Field {
    Field::new(p).unwrap()
}

pub fn front(text: &str) -> FrontDiagram {
    FrontDiagram::parse(text).unwrap()
}

pub fn random_matrix<R: Rng>(f: Field, rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    DenseMatrix::from_fn(f, rows, cols, |_, _| rng.gen_range(0..f.modulus()))
}

pub fn random_unit<R: Rng>(f: Field, rng: &mut R) -> u32 {
    rng.gen_range(1..f.modulus())
}

/// Lower triangular, invertible, nonzero only between generators of equal `μ`.
pub fn random_filtered_iso<R: Rng>(f: Field, mu: &[i32], rng: &mut R) -> DenseMatrix {
    let n = mu.len();
    DenseMatrix::from_fn(f, n, n, |r, c| {
        if r == c {
            random_unit(f, rng)
        } else if r > c && mu[r] == mu[c] && rng.gen_bool(0.5) {
            rng.gen_range(0..f.modulus())
        } else {
            0
        }
    })
}

/// A random valid object on `mu`, obtained by conjugating a random pairing.
pub fn random_mc<R: Rng>(f: Field, mu: &[i32], rng: &mut R) -> MCObject {
    let n = mu.len();
    let basis = GradedBasis::new(mu.to_vec());
    // greedily pair generators i < j with μ(i) = μ(j) + 1
    let mut used = vec![false; n];
    let mut d = DenseMatrix::zeros(f, n, n);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    for &i in &order {
        if used[i] || rng.gen_bool(0.25) {
            continue;
        }
        if let Some(j) = (i + 1..n).find(|&j| !used[j] && mu[i] == mu[j] + 1 && rng.gen_bool(0.7)) {
            used[i] = true;
            used[j] = true;
            d.set(j, i, random_unit(f, rng));
        }
    }
    let g = random_filtered_iso(f, mu, rng);
    let pairing = MCObject::new(basis, d).unwrap();
    pairing.conjugate(&g).unwrap()
}

/// A random valid object on `front`. Before each event a random filtered
/// slide is inserted with probability `slide_prob`; crossings and deaths that
/// would be obstructed restart the walk.
pub fn random_mcs<R: Rng>(fd: &FrontDiagram, baseline: i32, f: Field, slide_prob: f64, rng: &mut R) -> MCSObject {
    let mu = fd.maslov(baseline).unwrap();
    'restart: loop {
        let mut intervals = vec![DenseMatrix::zeros(f, 0, 0)];
        let mut slides = Vec::new();
        for (t, ev) in fd.events().iter().enumerate() {
            let k = ev.position - 1;
            let d = intervals.last().unwrap().clone();
            if d.rows() > 0 && rng.gen_bool(slide_prob) {
                let g = random_filtered_iso(f, mu.interval(t), rng);
                let next = g.mul(&d).mul(&g.inverse().unwrap());
                slides.push((t, g));
                intervals.push(next);
            }
            let d = intervals.last().unwrap().clone();
            let next = match ev.kind {
                EventKind::Crossing => crossing_successor(&d, k),
                EventKind::RightCusp => cusp_quotient(&d, k),
                EventKind::LeftCusp => {
                    let options = birth_extensions(&d, mu.interval(t + 1), k);
                    (!options.is_empty()).then(|| options[rng.gen_range(0..options.len())].clone())
                }
            };
            match next {
                Some(dn) => intervals.push(dn),
                None => continue 'restart,
            }
        }
        let s = MCSObject::new(fd.clone(), baseline, intervals, slides).unwrap();
        assert!(s.is_valid(), "generator produced an invalid object: {:?}", s.validate());
        return s;
    }
}

/// Inserts the slide `g` after `after_event` front events of the strict
/// object `s` and recomputes every interval to its right, searching over
/// the birth choices downstream.
pub fn with_slide(s: &MCSObject, after_event: usize, g: DenseMatrix) -> MCSObject {
    assert_eq!(s.slide_count(), 0);
    let fd = s.front();
    let mut intervals: Vec<DenseMatrix> = s.intervals()[..=after_event].iter().map(|o| o.d().clone()).collect();
    let d = intervals.last().unwrap().clone();
    intervals.push(g.mul(&d).mul(&g.inverse().unwrap()));
    assert!(extend(fd, s.maslov(), after_event, &mut intervals), "slide obstructs every continuation");
    MCSObject::new(fd.clone(), s.baseline(), intervals, vec![(after_event, g)]).unwrap()
}

fn extend(fd: &FrontDiagram, mu: &MaslovPotential, t: usize, intervals: &mut Vec<DenseMatrix>) -> bool {
    let Some(ev) = fd.events().get(t) else { return true };
    let k = ev.position - 1;
    let d = intervals.last().unwrap().clone();
    let options: Vec<DenseMatrix> = match ev.kind {
        EventKind::Crossing => crossing_successor(&d, k).into_iter().collect(),
        EventKind::RightCusp => cusp_quotient(&d, k).into_iter().collect(),
        EventKind::LeftCusp => birth_extensions(&d, mu.interval(t + 1), k),
    };
    for next in options {
        intervals.push(next);
        if extend(fd, mu, t + 1, intervals) {
            return true;
        }
        intervals.pop();
    }
    false
}

/// Random invertible diagonal matrix.
pub fn random_diagonal<R: Rng>(f: Field, n: usize, rng: &mut R) -> DenseMatrix {
    let diag: Vec<u32> = (0..n).map(|_| random_unit(f, rng)).collect();
    DenseMatrix::diagonal(f, &diag)
}

/// Every square-zero operator on `mu` with arbitrary admissible entries.
pub fn all_objects(f: Field, mu: &[i32]) -> Vec<DenseMatrix> {
    let n = mu.len();
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|c| (c + 1..n).map(move |r| (r, c))).filter(|&(r, c)| mu[c] - mu[r] == 1).collect();
    let mut out = Vec::new();
    for_each_vector(f, slots.len(), |v| {
        let mut d = DenseMatrix::zeros(f, n, n);
        for (&(r, c), &x) in slots.iter().zip(v) {
            d.set(r, c, x);
        }
        if MCObject::new(GradedBasis::new(mu.to_vec()), d.clone()).is_ok() {
            out.push(d);
        }
        true
    });
    out
}
