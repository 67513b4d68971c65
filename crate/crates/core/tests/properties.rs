//! Property tests for the algebraic invariants.

use proptest::prelude::*;

use blf::fiber::{
    apply_surgery, derived_ids, reverse_crossing, unapply_surgery, FiberDescription,
    SurgeryDescriptor,
};
use blf::format;
use blf::generate::Generator;
use blf::ids::ComponentId;
use blf::mcg::{
    compose_word, intersection_pairing, symplectic_form, twist_matrix, Handedness,
    HomologyClass, TwistWord,
};

fn homology_class(genus: usize) -> impl Strategy<Value = HomologyClass> {
    proptest::collection::vec(-4i64..=4, 2 * genus)
        .prop_map(|v| HomologyClass::new(v).unwrap())
}

proptest! {
    /// Transvections preserve the symplectic form: M^T J M = J.
    #[test]
    fn twists_are_symplectic(c in homology_class(2), h in prop_oneof![
        Just(Handedness::Right),
        Just(Handedness::Left),
    ]) {
        let m = twist_matrix(&c, h);
        let j = symplectic_form(2);
        prop_assert_eq!(m.transpose().mul(&j).mul(&m), j);
    }

    /// A twist composed with its opposite-handed twin is the identity.
    #[test]
    fn opposite_twists_cancel(c in homology_class(2)) {
        let r = twist_matrix(&c, Handedness::Right);
        let l = twist_matrix(&c, Handedness::Left);
        prop_assert_eq!(r.mul(&l), blf::mcg::SquareMatrix::identity(4));
    }

    /// The intersection pairing is antisymmetric.
    #[test]
    fn pairing_antisymmetric(a in homology_class(3), b in homology_class(3)) {
        prop_assert_eq!(
            intersection_pairing(&a, &b).unwrap(),
            -intersection_pairing(&b, &a).unwrap()
        );
    }

    /// A word composed with its inverse is the identity.
    #[test]
    fn word_inverse_cancels(
        cs in proptest::collection::vec(homology_class(1), 1..5)
    ) {
        let word = TwistWord::new(
            cs.into_iter().map(|c| (c, Handedness::Right)).collect()
        ).unwrap();
        let m = compose_word(&word);
        let minv = compose_word(&word.inverse());
        prop_assert_eq!(m.mul(&minv), blf::mcg::SquareMatrix::identity(2));
    }

    /// Undoing a surgery and redoing it is the identity on fibers.
    #[test]
    fn unapply_then_apply(genus in 0u32..6, sep in any::<bool>(), g1 in 0u32..3) {
        let f = FiberDescription::connected("c0", genus);
        let surgery = if sep {
            SurgeryDescriptor::separating("c0", g1.min(genus), genus.saturating_sub(g1.min(genus)))
        } else {
            SurgeryDescriptor::nonseparating("c0")
        };
        let up = unapply_surgery(&f, &surgery);
        if let Ok(up) = up {
            prop_assert_eq!(apply_surgery(&up, &surgery).unwrap(), f);
        }
    }

    /// A high/low fiber pair produced by a surgery passes the crossing
    /// check in both directions of computation.
    #[test]
    fn reverse_crossing_consistent(genus in 1u32..6) {
        let high = FiberDescription::connected("c0", genus);
        let surgery = SurgeryDescriptor::nonseparating("c0");
        let low = apply_surgery(&high, &surgery).unwrap();
        prop_assert!(reverse_crossing(&low, &surgery, &high));
        prop_assert_eq!(unapply_surgery(&low, &surgery).unwrap(), high);
    }

    /// Separating surgeries normalize their genus split.
    #[test]
    fn separating_normalized(g1 in 0u32..8, g2 in 0u32..8) {
        let s = SurgeryDescriptor::separating("c0", g1, g2);
        match s {
            SurgeryDescriptor::Separating(_, a, b) => prop_assert!(a <= b),
            _ => prop_assert!(false),
        }
    }

    /// Derived component ids never collide with each other.
    #[test]
    fn derived_ids_distinct(name in "[a-z][a-z0-9]{0,8}") {
        let (a, b) = derived_ids(&ComponentId::from(name.as_str()));
        prop_assert_ne!(a, b);
    }

    /// Serialization round-trips every generated diagram.
    #[test]
    fn serialize_parse_roundtrip(seed in any::<u64>()) {
        let mut gen = Generator::new(seed);
        let d = gen.diagram();
        let text = format::serialize(&d);
        prop_assert_eq!(format::parse(&text).unwrap(), d);
    }
}
