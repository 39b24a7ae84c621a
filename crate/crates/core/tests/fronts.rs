mod common;

use common::{front, TREFOIL};
use legmcs_core::front::{EventKind, FrontDiagram, FrontEvent, MoveKind};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random closed plat front with at most `max_strands` strands.
fn random_front(seed: u64, len: usize, max_strands: usize) -> FrontDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = Vec::new();
    let mut n = 0usize;
    for _ in 0..len {
        let choice = rng.gen_range(0..3);
        if n == 0 || (choice == 0 && n + 2 <= max_strands) {
            events.push(FrontEvent::left_cusp(rng.gen_range(1..=n + 1)));
            n += 2;
        } else if choice == 1 {
            events.push(FrontEvent::right_cusp(rng.gen_range(1..n)));
            n -= 2;
        } else {
            events.push(FrontEvent::crossing(rng.gen_range(1..n)));
        }
    }
    while n > 0 {
        events.push(FrontEvent::right_cusp(rng.gen_range(1..n)));
        n -= 2;
    }
    FrontDiagram::from_events(events).unwrap()
}

#[test]
fn trefoil_presentations_are_connected_by_moves() {
    let t = front(TREFOIL);
    let a = t.apply_move(MoveKind::FarCommute, 0).unwrap();
    let b = t.apply_move(MoveKind::FarCommute, 5).unwrap();
    assert_eq!(a.render(), "L1 L3 X2 X2 X2 R1 R1");
    assert_eq!(b.render(), "L1 L1 X2 X2 X2 R3 R1");
    let c = b.apply_move(MoveKind::FarCommute, 0).unwrap();
    assert_eq!(c, a.apply_move(MoveKind::FarCommute, 5).unwrap());
    for fd in [&t, &a, &b, &c] {
        let ci = fd.classical_invariants();
        assert_eq!((ci.tb, ci.rotation.clone(), ci.component_count), (1, vec![0], 1));
        assert_eq!(fd.maslov(1).unwrap().interval(3), &[3, 2, 2, 1]);
    }
}

#[test]
fn braid_move_is_an_involution() {
    let fd = front("L1 L1 L1 X2 X3 X4 X3 R2 R1 R1");
    let moved = fd.apply_move(MoveKind::Braid, 4).unwrap();
    assert_eq!(moved.render(), "L1 L1 L1 X2 X4 X3 X4 R2 R1 R1");
    assert_eq!(moved.apply_move(MoveKind::Braid, 4).unwrap(), fd);
    assert!(fd.apply_move(MoveKind::Braid, 3).is_err());
}

proptest! {
    #[test]
    fn render_then_parse(seed in any::<u64>(), len in 0usize..14) {
        let fd = random_front(seed, len, 8);
        prop_assert_eq!(FrontDiagram::parse(&fd.render()).unwrap(), fd.clone());
        let commented = format!("# header\n{}\n# trailer", fd.render().replace(' ', "\n  "));
        prop_assert_eq!(FrontDiagram::parse(&commented).unwrap(), fd);
    }

    #[test]
    fn moves_preserve_classical_invariants(seed in any::<u64>(), len in 2usize..14) {
        let fd = random_front(seed, len, 8);
        let ci = fd.classical_invariants();
        for at in 0..fd.events().len() {
            for kind in [MoveKind::FarCommute, MoveKind::Braid] {
                if let Ok(g) = fd.apply_move(kind, at) {
                    let cg = g.classical_invariants();
                    // orientations follow the first left cusp, so a move can
                    // reverse a component: compare up to reorientation
                    if ci.component_count == 1 {
                        prop_assert_eq!(cg.tb, ci.tb);
                    }
                    prop_assert_eq!(cg.component_count, ci.component_count);
                    let mut r1: Vec<i64> = ci.rotation.iter().map(|r| r.abs()).collect();
                    let mut r2: Vec<i64> = cg.rotation.iter().map(|r| r.abs()).collect();
                    r1.sort();
                    r2.sort();
                    prop_assert_eq!(r1, r2);
                    prop_assert_eq!(g.maslov(1).is_ok(), fd.maslov(1).is_ok());
                }
            }
        }
    }

    #[test]
    fn maslov_jumps_at_cusps(seed in any::<u64>(), len in 2usize..14) {
        let fd = random_front(seed, len, 8);
        if let Ok(mu) = fd.maslov(1) {
            prop_assert!(mu.satisfies(&fd));
            for (t, ev) in fd.events().iter().enumerate() {
                let k = ev.position - 1;
                match ev.kind {
                    EventKind::LeftCusp => prop_assert_eq!(mu.interval(t + 1)[k], mu.interval(t + 1)[k + 1] + 1),
                    EventKind::RightCusp => prop_assert_eq!(mu.interval(t)[k], mu.interval(t)[k + 1] + 1),
                    EventKind::Crossing => {
                        prop_assert_eq!(mu.interval(t + 1)[k], mu.interval(t)[k + 1]);
                        prop_assert_eq!(mu.interval(t + 1)[k + 1], mu.interval(t)[k]);
                    }
                }
            }
            for c in 0..fd.classical_invariants().component_count {
                prop_assert_eq!(fd.classical_invariants().rotation[c], 0);
            }
        }
    }
}
