//! Plat-position front diagrams.
//!
//! A front is a word of events read left to right. Strand positions are
//! 1-based and counted from the top, so strand 1 has the largest `z`.
//! `L<k>` inserts two strands at positions `k, k+1`, `R<k>` joins strands
//! `k, k+1` in a right cusp and `X<k>` crosses them.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontError {
    #[error("syntax error: bad token `{token}`")]
    Syntax { token: String },
    #[error("event {event} (`{token}`) does not fit the {strands} strands to its left")]
    Position { event: usize, token: String, strands: usize },
    #[error("front is not closed: {strands} strands remain at the right end")]
    NotClosed { strands: usize },
    #[error("component {component} has nonzero rotation; no Maslov potential exists")]
    NoPotential { component: usize },
    #[error("illegal move: {0}")]
    IllegalMove(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    LeftCusp,
    RightCusp,
    Crossing,
}

impl EventKind {
    fn letter(self) -> char {
        match self {
            EventKind::LeftCusp => 'L',
            EventKind::RightCusp => 'R',
            EventKind::Crossing => 'X',
        }
    }
}

/// One event of a front; `position` is the 1-based upper strand index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FrontEvent {
    pub kind: EventKind,
    pub position: usize,
}

impl FrontEvent {
    pub fn left_cusp(position: usize) -> Self {
        FrontEvent { kind: EventKind::LeftCusp, position }
    }

    pub fn right_cusp(position: usize) -> Self {
        FrontEvent { kind: EventKind::RightCusp, position }
    }

    pub fn crossing(position: usize) -> Self {
        FrontEvent { kind: EventKind::Crossing, position }
    }

    /// Strand count to the right of this event, or `None` if the event does
    /// not fit `strands` strands on its left.
    fn apply_count(self, strands: usize) -> Option<usize> {
        let k = self.position;
        if k == 0 {
            return None;
        }
        match self.kind {
            EventKind::LeftCusp => (k <= strands + 1).then_some(strands + 2),
            EventKind::RightCusp => (k < strands).then(|| strands - 2),
            EventKind::Crossing => (k < strands).then_some(strands),
        }
    }
}

impl fmt::Display for FrontEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.letter(), self.position)
    }
}

/// A validated plat front together with the strand counts of its intervals.
///
/// Interval `t` lies between events `t - 1` and `t`; there are
/// `events.len() + 1` intervals and both end intervals are empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrontDiagram {
    events: Vec<FrontEvent>,
    strand_counts: Vec<usize>,
}

fn parse_token(token: &str) -> Result<FrontEvent, FrontError> {
    let syntax = || FrontError::Syntax { token: token.to_string() };
    let mut chars = token.chars();
    let kind = match chars.next() {
        Some('L') => EventKind::LeftCusp,
        Some('R') => EventKind::RightCusp,
        Some('X') => EventKind::Crossing,
        _ => return Err(syntax()),
    };
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax());
    }
    let position = digits.parse::<usize>().map_err(|_| syntax())?;
    Ok(FrontEvent { kind, position })
}

impl FrontDiagram {
    /// Parses the whitespace-separated token format; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, FrontError> {
        let mut events = Vec::new();
        for line in text.lines() {
            let code = line.split('#').next().unwrap_or("");
            for token in code.split_whitespace() {
                events.push(parse_token(token)?);
            }
        }
        Self::from_events(events)
    }

    pub fn from_events(events: Vec<FrontEvent>) -> Result<Self, FrontError> {
        let mut strand_counts = Vec::with_capacity(events.len() + 1);
        let mut n = 0usize;
        strand_counts.push(n);
        for (i, ev) in events.iter().enumerate() {
            n = ev.apply_count(n).ok_or_else(|| FrontError::Position { event: i, token: ev.to_string(), strands: n })?;
            strand_counts.push(n);
        }
        if n != 0 {
            return Err(FrontError::NotClosed { strands: n });
        }
        Ok(FrontDiagram { events, strand_counts })
    }

    pub fn empty() -> Self {
        FrontDiagram { events: Vec::new(), strand_counts: vec![0] }
    }

    pub fn events(&self) -> &[FrontEvent] {
        &self.events
    }

    pub fn strand_counts(&self) -> &[usize] {
        &self.strand_counts
    }

    pub fn interval_count(&self) -> usize {
        self.strand_counts.len()
    }

    /// Inverse of [`FrontDiagram::parse`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, ev) in self.events.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&ev.to_string());
        }
        out
    }

    /// Arc and cusp bookkeeping shared by the Maslov and invariant computations.
    pub fn arcs(&self) -> ArcLayout {
        ArcLayout::trace(self)
    }

    pub fn maslov(&self, baseline: i32) -> Result<MaslovPotential, FrontError> {
        MaslovPotential::compute(self, baseline)
    }

    pub fn classical_invariants(&self) -> ClassicalInvariants {
        ClassicalInvariants::compute(self)
    }

    pub fn apply_move(&self, kind: MoveKind, at: usize) -> Result<FrontDiagram, FrontError> {
        match kind {
            MoveKind::FarCommute => self.far_commute(at),
            MoveKind::Braid => self.braid_move(at),
        }
    }

    fn far_commute(&self, at: usize) -> Result<FrontDiagram, FrontError> {
        if at + 1 >= self.events.len() {
            return Err(FrontError::IllegalMove("far commutation needs two consecutive events".into()));
        }
        let (e1, e2) = (self.events[at], self.events[at + 1]);
        let n0 = self.strand_counts[at] as u32;
        let start: Vec<u32> = (0..n0).collect();
        let fresh1 = [n0, n0 + 1];
        let fresh2 = [n0 + 2, n0 + 3];
        let (mid, touched1) = relabel(&start, e1, fresh1).expect("validated front");
        let (end, touched2) = relabel(&mid, e2, fresh2).expect("validated front");
        if touched1.iter().any(|l| touched2.contains(l)) {
            return Err(FrontError::IllegalMove(alloc::format!("{e1} and {e2} share a strand")));
        }
        let max_k = start.len() + 4;
        for k2 in 1..=max_k {
            let first = FrontEvent { kind: e2.kind, position: k2 };
            let Some((mid2, t2)) = relabel(&start, first, fresh2) else { continue };
            if !same_set(&t2, &touched2) {
                continue;
            }
            for k1 in 1..=max_k {
                let second = FrontEvent { kind: e1.kind, position: k1 };
                let Some((end2, t1)) = relabel(&mid2, second, fresh1) else { continue };
                if same_set(&t1, &touched1) && end2 == end {
                    let mut events = self.events.clone();
                    events[at] = first;
                    events[at + 1] = second;
                    return FrontDiagram::from_events(events);
                }
            }
        }
        Err(FrontError::IllegalMove(alloc::format!("{e1} {e2} cannot be commuted")))
    }

    fn braid_move(&self, at: usize) -> Result<FrontDiagram, FrontError> {
        let window = self.events.get(at..at + 3).ok_or_else(|| FrontError::IllegalMove("braid move needs three events".into()))?;
        if window.iter().any(|e| e.kind != EventKind::Crossing) {
            return Err(FrontError::IllegalMove("braid move needs three crossings".into()));
        }
        let (a, b, c) = (window[0].position, window[1].position, window[2].position);
        if a != c || (b != a + 1 && a != b + 1) {
            return Err(FrontError::IllegalMove(alloc::format!("X{a} X{b} X{c} is not a braid relation pattern")));
        }
        let mut events = self.events.clone();
        events[at] = FrontEvent::crossing(b);
        events[at + 1] = FrontEvent::crossing(a);
        events[at + 2] = FrontEvent::crossing(b);
        FrontDiagram::from_events(events)
    }
}

impl fmt::Display for FrontDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn same_set(a: &[u32], b: &[u32]) -> bool {
    let sa: BTreeSet<_> = a.iter().collect();
    let sb: BTreeSet<_> = b.iter().collect();
    sa == sb
}

/// Applies an event to a list of strand labels, returning the new labels and
/// the labels the event touches.
fn relabel(labels: &[u32], ev: FrontEvent, fresh: [u32; 2]) -> Option<(Vec<u32>, Vec<u32>)> {
    ev.apply_count(labels.len())?;
    let k = ev.position - 1;
    let mut out = labels.to_vec();
    let touched = match ev.kind {
        EventKind::LeftCusp => {
            out.splice(k..k, fresh);
            fresh.to_vec()
        }
        EventKind::RightCusp => out.drain(k..k + 2).collect(),
        EventKind::Crossing => {
            out.swap(k, k + 1);
            vec![labels[k], labels[k + 1]]
        }
    };
    Some((out, touched))
}

/// Local front moves that produce Legendrian-isotopic presentations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    /// Swap two consecutive events acting on disjoint strands.
    FarCommute,
    /// `X_k X_{k+1} X_k <-> X_{k+1} X_k X_{k+1}`.
    Braid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cusp {
    pub event: usize,
    pub kind: EventKind,
    pub upper_arc: usize,
    pub lower_arc: usize,
}

/// Arcs are maximal strand segments between cusps, numbered in order of
/// creation. `per_interval[t][s]` is the arc at strand `s` (0-based) of interval `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcLayout {
    pub per_interval: Vec<Vec<usize>>,
    pub cusps: Vec<Cusp>,
    /// Component index of every arc, components numbered by first arc.
    pub component_of: Vec<usize>,
    pub component_count: usize,
}

impl ArcLayout {
    fn trace(fd: &FrontDiagram) -> Self {
        let mut current: Vec<usize> = Vec::new();
        let mut per_interval = vec![current.clone()];
        let mut cusps = Vec::new();
        let mut next_arc = 0;
        for (i, ev) in fd.events.iter().enumerate() {
            let k = ev.position - 1;
            match ev.kind {
                EventKind::LeftCusp => {
                    let (u, l) = (next_arc, next_arc + 1);
                    next_arc += 2;
                    current.splice(k..k, [u, l]);
                    cusps.push(Cusp { event: i, kind: ev.kind, upper_arc: u, lower_arc: l });
                }
                EventKind::RightCusp => {
                    let pair: Vec<usize> = current.drain(k..k + 2).collect();
                    cusps.push(Cusp { event: i, kind: ev.kind, upper_arc: pair[0], lower_arc: pair[1] });
                }
                EventKind::Crossing => current.swap(k, k + 1),
            }
            per_interval.push(current.clone());
        }
        // Arcs are graph nodes, cusps are edges; every arc has one cusp at each end.
        let mut adj = vec![Vec::new(); next_arc];
        for c in &cusps {
            adj[c.upper_arc].push(c.lower_arc);
            adj[c.lower_arc].push(c.upper_arc);
        }
        let mut component_of = vec![usize::MAX; next_arc];
        let mut component_count = 0;
        for start in 0..next_arc {
            if component_of[start] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([start]);
            component_of[start] = component_count;
            while let Some(a) = queue.pop_front() {
                for &b in &adj[a] {
                    if component_of[b] == usize::MAX {
                        component_of[b] = component_count;
                        queue.push_back(b);
                    }
                }
            }
            component_count += 1;
        }
        ArcLayout { per_interval, cusps, component_of, component_count }
    }

    pub fn arc_count(&self) -> usize {
        self.component_of.len()
    }
}

/// Integer labels on strands with `μ(upper) = μ(lower) + 1` at every cusp.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MaslovPotential {
    per_interval: Vec<Vec<i32>>,
    per_arc: Vec<i32>,
}

impl MaslovPotential {
    /// Solves the cusp relations; each component is shifted so that its
    /// minimum equals `baseline`.
    pub fn compute(fd: &FrontDiagram, baseline: i32) -> Result<Self, FrontError> {
        let layout = fd.arcs();
        let n = layout.arc_count();
        // edges (a, b, w) meaning μ(a) = μ(b) + w
        let mut adj: Vec<Vec<(usize, i32)>> = vec![Vec::new(); n];
        for c in &layout.cusps {
            adj[c.upper_arc].push((c.lower_arc, -1));
            adj[c.lower_arc].push((c.upper_arc, 1));
        }
        let mut value: Vec<Option<i32>> = vec![None; n];
        for start in 0..n {
            if value[start].is_some() {
                continue;
            }
            value[start] = Some(0);
            let mut queue = VecDeque::from([start]);
            while let Some(a) = queue.pop_front() {
                let va = value[a].unwrap();
                for &(b, w) in &adj[a] {
                    match value[b] {
                        None => {
                            value[b] = Some(va + w);
                            queue.push_back(b);
                        }
                        Some(vb) if vb != va + w => {
                            return Err(FrontError::NoPotential { component: layout.component_of[a] });
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        let mut minima: BTreeMap<usize, i32> = BTreeMap::new();
        for (a, v) in value.iter().enumerate() {
            let m = minima.entry(layout.component_of[a]).or_insert(i32::MAX);
            *m = (*m).min(v.unwrap());
        }
        let per_arc: Vec<i32> =
            value.iter().enumerate().map(|(a, v)| v.unwrap() - minima[&layout.component_of[a]] + baseline).collect();
        let per_interval = layout.per_interval.iter().map(|arcs| arcs.iter().map(|&a| per_arc[a]).collect()).collect();
        Ok(MaslovPotential { per_interval, per_arc })
    }

    /// Builds a potential from explicit per-interval values (no checks).
    pub fn from_intervals(per_interval: Vec<Vec<i32>>) -> Self {
        MaslovPotential { per_interval, per_arc: Vec::new() }
    }

    pub fn interval(&self, t: usize) -> &[i32] {
        &self.per_interval[t]
    }

    pub fn per_interval(&self) -> &[Vec<i32>] {
        &self.per_interval
    }

    pub fn arc(&self, arc: usize) -> i32 {
        self.per_arc[arc]
    }

    /// Checks the cusp relation and arc constancy against a front.
    pub fn satisfies(&self, fd: &FrontDiagram) -> bool {
        if self.per_interval.len() != fd.interval_count() {
            return false;
        }
        fd.events.iter().enumerate().all(|(t, ev)| {
            let (left, right) = (&self.per_interval[t], &self.per_interval[t + 1]);
            let k = ev.position - 1;
            match ev.kind {
                EventKind::LeftCusp => {
                    right[k] == right[k + 1] + 1 && left[..k] == right[..k] && left[k..] == right[k + 2..]
                }
                EventKind::RightCusp => {
                    left[k] == left[k + 1] + 1 && left[..k] == right[..k] && left[k + 2..] == right[k..]
                }
                EventKind::Crossing => {
                    let mut swapped = left.clone();
                    swapped.swap(k, k + 1);
                    &swapped == right
                }
            }
        })
    }
}

/// Thurston–Bennequin number, per-component rotation numbers and the
/// component count, with orientations traced automatically: each component
/// is oriented so that the upper arc of its first left cusp runs rightward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalInvariants {
    pub tb: i64,
    pub rotation: Vec<i64>,
    pub component_count: usize,
}

impl ClassicalInvariants {
    fn compute(fd: &FrontDiagram) -> Self {
        let layout = fd.arcs();
        let n = layout.arc_count();
        let mut rightward: Vec<Option<bool>> = vec![None; n];
        let mut adj = vec![Vec::new(); n];
        for c in &layout.cusps {
            adj[c.upper_arc].push(c.lower_arc);
            adj[c.lower_arc].push(c.upper_arc);
        }
        // arcs are created in pairs by left cusps, so the first arc of each
        // component is the upper arc of its first left cusp
        for start in 0..n {
            if rightward[start].is_some() {
                continue;
            }
            rightward[start] = Some(true);
            let mut queue = VecDeque::from([start]);
            while let Some(a) = queue.pop_front() {
                let dir = rightward[a].unwrap();
                for &b in &adj[a] {
                    if rightward[b].is_none() {
                        rightward[b] = Some(!dir);
                        queue.push_back(b);
                    }
                }
            }
        }
        let dir = |a: usize| rightward[a].unwrap();
        let mut writhe = 0i64;
        for (t, ev) in fd.events.iter().enumerate() {
            if ev.kind == EventKind::Crossing {
                let arcs = &layout.per_interval[t];
                let (a, b) = (arcs[ev.position - 1], arcs[ev.position]);
                writhe += if dir(a) == dir(b) { 1 } else { -1 };
            }
        }
        let right_cusps = layout.cusps.iter().filter(|c| c.kind == EventKind::RightCusp).count() as i64;
        let mut twice_rot = vec![0i64; layout.component_count];
        for c in &layout.cusps {
            let down = match c.kind {
                EventKind::LeftCusp => dir(c.lower_arc),
                _ => dir(c.upper_arc),
            };
            twice_rot[layout.component_of[c.upper_arc]] += if down { 1 } else { -1 };
        }
        ClassicalInvariants {
            tb: writhe - right_cusps,
            rotation: twice_rot.into_iter().map(|r| r / 2).collect(),
            component_count: layout.component_count,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNKNOT: &str = "L1 R1";
    const TREFOIL: &str = "L1 L1 X2 X2 X2 R1 R1";

    #[test]
    fn parses_standard_fronts() {
        let u = FrontDiagram::parse(UNKNOT).unwrap();
        assert_eq!(u.strand_counts(), &[0, 2, 0]);
        let t = FrontDiagram::parse(TREFOIL).unwrap();
        assert_eq!(t.strand_counts(), &[0, 2, 4, 4, 4, 4, 2, 0]);
        assert_eq!(FrontDiagram::parse("").unwrap(), FrontDiagram::empty());
        let commented = FrontDiagram::parse("# trefoil\nL1 L1 # births\nX2 X2 X2\nR1 R1\n").unwrap();
        assert_eq!(commented, t);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(FrontDiagram::parse("L1 R2"), Err(FrontError::Position { event: 1, .. })));
        assert!(matches!(FrontDiagram::parse("L1"), Err(FrontError::NotClosed { strands: 2 })));
        assert!(matches!(FrontDiagram::parse("L1 Q1"), Err(FrontError::Syntax { .. })));
        assert!(matches!(FrontDiagram::parse("L R1"), Err(FrontError::Syntax { .. })));
        assert!(matches!(FrontDiagram::parse("l1 r1"), Err(FrontError::Syntax { .. })));
        assert!(matches!(FrontDiagram::parse("L1 X-1 R1"), Err(FrontError::Syntax { .. })));
        assert!(matches!(FrontDiagram::parse("L0 R1"), Err(FrontError::Position { event: 0, .. })));
        assert!(matches!(FrontDiagram::parse("L1 X2 R1"), Err(FrontError::Position { event: 1, .. })));
    }

    #[test]
    fn render_roundtrip() {
        let t = FrontDiagram::parse(TREFOIL).unwrap();
        assert_eq!(t.render(), TREFOIL);
        assert_eq!(FrontDiagram::parse(&t.render()).unwrap(), t);
    }

    #[test]
    fn maslov_unknot_and_trefoil() {
        let u = FrontDiagram::parse(UNKNOT).unwrap();
        let m = u.maslov(1).unwrap();
        assert_eq!(m.interval(1), &[2, 1]);
        assert!(m.satisfies(&u));

        let t = FrontDiagram::parse(TREFOIL).unwrap();
        let m = t.maslov(1).unwrap();
        assert_eq!(m.interval(2), &[3, 2, 2, 1]);
        for iv in 2..=5 {
            let mut sorted = m.interval(iv).to_vec();
            sorted.sort();
            assert_eq!(sorted, vec![1, 2, 2, 3]);
        }
        assert!(m.satisfies(&t));
        assert_eq!(t.maslov(5).unwrap().interval(2), &[7, 6, 6, 5]);
    }

    #[test]
    fn maslov_obstruction() {
        let f = FrontDiagram::parse("L1 X1 R1").unwrap();
        assert_eq!(f.maslov(1), Err(FrontError::NoPotential { component: 0 }));
    }

    #[test]
    fn classical_invariant_examples() {
        let u = FrontDiagram::parse(UNKNOT).unwrap().classical_invariants();
        assert_eq!(u, ClassicalInvariants { tb: -1, rotation: vec![0], component_count: 1 });
        let t = FrontDiagram::parse(TREFOIL).unwrap().classical_invariants();
        assert_eq!(t, ClassicalInvariants { tb: 1, rotation: vec![0], component_count: 1 });
        let kink = FrontDiagram::parse("L1 X1 R1").unwrap().classical_invariants();
        assert_eq!(kink.tb, -2);
        assert_eq!(kink.rotation.len(), 1);
        assert_eq!(kink.rotation[0].abs(), 1);
        for two in ["L1 R1 L1 R1", "L1 L3 R3 R1", "L1 L3 R1 R1"] {
            let inv = FrontDiagram::parse(two).unwrap().classical_invariants();
            assert_eq!(inv.component_count, 2, "{two}");
            assert_eq!(inv.rotation, vec![0, 0]);
        }
    }

    #[test]
    fn far_commutation() {
        let f = FrontDiagram::parse("L1 L3 X1 X3 R3 R1").unwrap();
        let g = f.apply_move(MoveKind::FarCommute, 2).unwrap();
        assert_eq!(g.render(), "L1 L3 X3 X1 R3 R1");
        assert_eq!(g.apply_move(MoveKind::FarCommute, 2).unwrap(), f);

        let t = FrontDiagram::parse(TREFOIL).unwrap();
        assert_eq!(t.apply_move(MoveKind::FarCommute, 0).unwrap().render(), "L1 L3 X2 X2 X2 R1 R1");
        assert_eq!(t.apply_move(MoveKind::FarCommute, 5).unwrap().render(), "L1 L1 X2 X2 X2 R3 R1");
        assert!(matches!(t.apply_move(MoveKind::FarCommute, 2), Err(FrontError::IllegalMove(_))));
        assert!(matches!(t.apply_move(MoveKind::FarCommute, 1), Err(FrontError::IllegalMove(_))));
        let u = FrontDiagram::parse(UNKNOT).unwrap();
        assert!(matches!(u.apply_move(MoveKind::FarCommute, 0), Err(FrontError::IllegalMove(_))));
    }

    #[test]
    fn braid_relation() {
        let f = FrontDiagram::parse("L1 L1 X1 X2 X1 R1 R1").unwrap();
        let g = f.apply_move(MoveKind::Braid, 2).unwrap();
        assert_eq!(g.render(), "L1 L1 X2 X1 X2 R1 R1");
        assert_eq!(g.apply_move(MoveKind::Braid, 2).unwrap(), f);
        let t = FrontDiagram::parse(TREFOIL).unwrap();
        assert!(matches!(t.apply_move(MoveKind::Braid, 2), Err(FrontError::IllegalMove(_))));
        assert!(matches!(t.apply_move(MoveKind::Braid, 0), Err(FrontError::IllegalMove(_))));
    }
}
