//! Identities of the calculus checked on random endogenies and
//! quasi-endomorphisms.

use endocalc_core::harness::random::{self, trial_rng};
use endocalc_core::invariance::{commutant_membership, is_invariant, sharp_commutes, CommutationKind, InvarianceMode};
use endocalc_core::prering::{bikatakernel, global_katakernel, quotient_action, RingPresentation};
use endocalc_core::{BiRelation, Caps, Subgroup};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn difference_with_itself_is_constant_on_kat(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let a = random::group(&mut rng, 3, 144);
        let f = random::relation(&mut rng, &a);
        let expected = BiRelation::product_relation(f.dom(), f.kat()).unwrap();
        prop_assert_eq!(&f.add(&f.neg()).unwrap(), &expected);
        if f.is_total() {
            prop_assert_eq!(&expected, &BiRelation::constant_to_subgroup(&a, f.kat()).unwrap());
        }
    }

    #[test]
    fn kernel_is_preimage_of_kat(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let a = random::group(&mut rng, 3, 144);
        let f = random::relation(&mut rng, &a);
        prop_assert_eq!(&f.preimage(f.kat()).unwrap(), f.ker());
    }

    /// `[γ, γ]` has image `γ[kat γ]`, so `kat γ` is weakly invariant exactly
    /// when `γ` sharply commutes with itself.
    #[test]
    fn kat_is_weakly_invariant_for_self_commuting(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let a = random::group(&mut rng, 3, 144);
        let g = random::endogeny(&mut rng, &a);
        let weak = is_invariant(g.kat(), std::slice::from_ref(&g), InvarianceMode::Weak).unwrap();
        prop_assert_eq!(sharp_commutes(&g, &g).unwrap().holds, weak);
    }

    #[test]
    fn constants_commute_exactly_with_weak_invariance(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let a = random::group(&mut rng, 3, 144);
        let g = random::endogeny(&mut rng, &a);
        let b = match seed % 3 {
            0 => g.kat().clone(),
            1 => random::finite_subgroup(&mut rng, &a),
            _ => g.apply(&Subgroup::torsion(&a)).unwrap(),
        };
        let c = BiRelation::constant_to_subgroup(&a, &b).unwrap();
        let weak = is_invariant(&b, std::slice::from_ref(&g), InvarianceMode::Weak).unwrap();
        prop_assert_eq!(sharp_commutes(&c, &g).unwrap().holds, weak);
        prop_assert_eq!(commutant_membership(&c, std::slice::from_ref(&g), CommutationKind::Sharp).unwrap(), weak);
    }

    #[test]
    fn bikatakernel_is_the_sum(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let a = random::group(&mut rng, 2, 72);
        let caps = Caps::default();
        let gamma = RingPresentation::pre_ring(&a, vec![random::endogeny(&mut rng, &a)]).unwrap();
        let delta = RingPresentation::pre_ring(&a, vec![random::endogeny(&mut rng, &a)]).unwrap();
        let sum = global_katakernel(&gamma, &caps).unwrap().sum(&global_katakernel(&delta, &caps).unwrap()).unwrap();
        prop_assert_eq!(bikatakernel(&gamma, &delta, &caps).unwrap(), sum);
    }

    #[test]
    fn quotient_by_global_kat_acts_by_endomorphisms(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let a = random::group(&mut rng, 2, 72);
        let g = random::endogeny(&mut rng, &a);
        let ring = RingPresentation::pre_ring(&a, vec![g.clone()]).unwrap();
        let kat = global_katakernel(&ring, &Caps::default()).unwrap();
        let q = quotient_action(&ring, &kat).unwrap();
        for gen in q.ring.generators() {
            prop_assert!(gen.kat().is_zero());
        }
        prop_assert!(q.push(&g.compose(&g).unwrap()).kat().is_zero());
    }
}
