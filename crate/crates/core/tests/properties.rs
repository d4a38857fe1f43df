//! Property tests over the crate's quotient and word machinery.

use proptest::prelude::*;

use profcheck::fincat::{chain3, walking_arrow};
use profcheck::limits::Limits;
use profcheck::presentation::{revdual, SColour};
use profcheck::prof::{self, coend, compose_prof, Elem};

proptest! {
    /// Coend class counts are invariant under the order the zig-zag unions
    /// are applied in.
    #[test]
    fn coend_confluence_under_arbitrary_seeds(seed in any::<u64>()) {
        let lim = Limits::default();
        let two = walking_arrow();
        let h = prof::hom_profunctor(&two, &lim).unwrap();
        let (_, table) = compose_prof(&h, &h, &lim).unwrap();
        let counts = coend::shuffled_class_counts(&h, &h, &lim, seed).unwrap();
        prop_assert_eq!(counts, table.class_counts());
    }

    /// Splicing two elements and splitting at the outer length recovers the
    /// parts exactly.
    #[test]
    fn elem_splice_split_round_trip(a in "[a-z]{1,6}", mid in "[a-z]{1,6}", b in "[a-z]{1,6}") {
        let outer = Elem::atom(&a);
        let inner = Elem::atom(&b);
        let chain = Elem::splice(&outer, &mid, &inner);
        let (o2, m2, i2) = chain.split(1);
        prop_assert_eq!(o2, outer);
        prop_assert_eq!(m2, mid);
        prop_assert_eq!(i2, inner);
    }

    /// Reverse-dual of a word is involutive.
    #[test]
    fn revdual_is_involutive(word in proptest::collection::vec(("[a-z]{1,4}", any::<bool>()), 0..6)) {
        let w: Vec<SColour> = word
            .iter()
            .map(|(c, d)| if *d { SColour::dual_of(c) } else { SColour::plain(c) })
            .collect();
        prop_assert_eq!(revdual(&revdual(&w)), w);
    }

    /// Composite fibers of poset homs never exceed one class (thin
    /// categories stay thin through the coend quotient).
    #[test]
    fn poset_composites_stay_thin(seed in any::<u64>()) {
        let _ = seed;
        let lim = Limits::default();
        let c3 = chain3();
        let h = prof::hom_profunctor(&c3, &lim).unwrap();
        let (hh, _) = compose_prof(&h, &h, &lim).unwrap();
        for b in 0..3 {
            for a in 0..3 {
                prop_assert!(hh.fiber(b, a).len() <= 1);
            }
        }
    }
}
