//! Property tests for the tally monoid: identity, commutativity of counts,
//! associativity, and partition-merge equivalence over arbitrary rows.

use faceoff_forge::aggregate::Tally;
use faceoff_forge::classify::ClassifiedFaceoff;
use faceoff_forge::rink::{Deployment, DirectionSector, Side, ZoneSection};
use proptest::prelude::*;

fn arb_row() -> impl Strategy<Value = ClassifiedFaceoff> {
    (
        0..1000u32,
        0..12u8,
        any::<bool>(),
        proptest::option::of((0..4u8, any::<bool>(), 0..8u8, any::<bool>())),
        any::<bool>(),
        (0.1..10.0f64, 1.0..40.0f64),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(fo, player, is_winner, labels, clean, (elapsed, dist), shot, zc)| {
            let (zone, side, direction, deployment) = match labels {
                Some((z, s, d, dep)) => (
                    Some(ZoneSection::ALL[z as usize]),
                    Some(if s { Side::Left } else { Side::Right }),
                    Some(DirectionSector::from_index(d as usize)),
                    Some(if dep { Deployment::Strong } else { Deployment::Weak }),
                ),
                None => (None, None, None, None),
            };
            ClassifiedFaceoff {
                faceoff_id: format!("f{fo}"),
                player: format!("p{player}"),
                is_winner,
                zone,
                side,
                direction,
                deployment,
                clean,
                elapsed_s: elapsed,
                distance_ft: dist,
                shot_event: shot,
                zone_change: zc,
            }
        })
}

proptest! {
    #[test]
    fn identity(rows in proptest::collection::vec(arb_row(), 0..80)) {
        let t = Tally::from_rows(rows.iter());
        let merged = Tally::merged(t.clone(), &Tally::new());
        prop_assert!(merged.counts_eq(&t));
        let merged = Tally::merged(Tally::new(), &t);
        prop_assert!(merged.counts_eq(&t));
    }

    #[test]
    fn commutative(a in proptest::collection::vec(arb_row(), 0..60),
                   b in proptest::collection::vec(arb_row(), 0..60)) {
        let (ta, tb) = (Tally::from_rows(a.iter()), Tally::from_rows(b.iter()));
        let ab = Tally::merged(ta.clone(), &tb);
        let ba = Tally::merged(tb, &ta);
        prop_assert!(ab.counts_eq(&ba));
    }

    #[test]
    fn associative(a in proptest::collection::vec(arb_row(), 0..40),
                   b in proptest::collection::vec(arb_row(), 0..40),
                   c in proptest::collection::vec(arb_row(), 0..40)) {
        let (ta, tb, tc) = (
            Tally::from_rows(a.iter()),
            Tally::from_rows(b.iter()),
            Tally::from_rows(c.iter()),
        );
        let left = Tally::merged(Tally::merged(ta.clone(), &tb), &tc);
        let right = Tally::merged(ta, &Tally::merged(tb, &tc));
        prop_assert!(left.counts_eq(&right));
    }

    #[test]
    fn partition_merge_equals_whole(rows in proptest::collection::vec(arb_row(), 0..120),
                                    mask in proptest::collection::vec(any::<bool>(), 0..120)) {
        let whole = Tally::from_rows(rows.iter());
        let (a, b): (Vec<_>, Vec<_>) = rows
            .iter()
            .enumerate()
            .partition(|(i, _)| mask.get(*i).copied().unwrap_or(false));
        let ta = Tally::from_rows(a.into_iter().map(|(_, r)| r));
        let tb = Tally::from_rows(b.into_iter().map(|(_, r)| r));
        prop_assert!(Tally::merged(ta, &tb).counts_eq(&whole));
    }
}
