use endocalc_core::group::finite_perturbation_rank_check;
use endocalc_core::harness::json::{parse_relation, relation as relation_json};
use endocalc_core::harness::random::{self, trial_rng};
use endocalc_core::harness::{emit_report, run_suite};
use endocalc_core::workspace::{parse_workspace, serialize_workspace};
use endocalc_core::{BiRelation, Caps, FgAbGroup, Int, Kind, Subgroup, Vector};
use proptest::prelude::*;

fn literal(v: &[Int]) -> String {
    format!("[{}]", v.iter().map(Int::to_string).collect::<Vec<_>>().join(", "))
}

const TORSION: [&[i64]; 6] = [&[], &[2], &[3], &[2, 4], &[6], &[2, 12]];

fn group() -> impl Strategy<Value = FgAbGroup> {
    (0usize..=3, 0usize..TORSION.len())
        .prop_filter("nontrivial", |(r, t)| r + TORSION[*t].len() > 0)
        .prop_map(|(r, t)| FgAbGroup::new(r, TORSION[t]).unwrap())
}

fn subgroup_of(a: &FgAbGroup) -> impl Strategy<Value = Subgroup> {
    let a = a.clone();
    prop::collection::vec(prop::collection::vec(-4i64..=4, a.cover_dim()), 0..=3).prop_map(move |rows| {
        let gens: Vec<Vector> = rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect();
        Subgroup::generated(&a, &gens).unwrap()
    })
}

fn group_and_subgroups(k: usize) -> impl Strategy<Value = (FgAbGroup, Vec<Subgroup>)> {
    group().prop_flat_map(move |a| {
        let subs = prop::collection::vec(subgroup_of(&a), k);
        (Just(a), subs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lattice_laws((_a, s) in group_and_subgroups(3)) {
        let (b1, b2, b3) = (&s[0], &s[1], &s[2]);
        prop_assert_eq!(b1.sum(b2).unwrap(), b2.sum(b1).unwrap());
        prop_assert_eq!(b1.intersect(b2).unwrap(), b2.intersect(b1).unwrap());
        prop_assert_eq!(b1.sum(b2).unwrap().sum(b3).unwrap(), b1.sum(&b2.sum(b3).unwrap()).unwrap());
        prop_assert_eq!(
            b1.intersect(b2).unwrap().intersect(b3).unwrap(),
            b1.intersect(&b2.intersect(b3).unwrap()).unwrap()
        );
        prop_assert_eq!(&b1.intersect(&b1.sum(b2).unwrap()).unwrap(), b1);
        prop_assert_eq!(&b1.sum(&b1.intersect(b2).unwrap()).unwrap(), b1);
        // Modular law with b1 ⊆ c.
        let c = b1.sum(b3).unwrap();
        prop_assert_eq!(
            b1.sum(&b2.intersect(&c).unwrap()).unwrap(),
            b1.sum(b2).unwrap().intersect(&c).unwrap()
        );
    }

    #[test]
    fn rank_laws((a, s) in group_and_subgroups(2)) {
        let (b1, b2) = (&s[0], &s[1]);
        prop_assert_eq!(b1.rank() == 0, b1.is_finite());
        prop_assert_eq!(b1.is_finite(), b1.order().is_some());
        prop_assert!(b1.rank() <= b1.sum(b2).unwrap().rank());
        prop_assert!(b1.sum(b2).unwrap().rank() <= b1.rank() + b2.rank());
        prop_assert!(b1.intersect(b2).unwrap().rank() <= b1.rank().min(b2.rank()));
        prop_assert_eq!(Subgroup::whole(&a).rank(), a.free_rank());
    }

    #[test]
    fn perturbation_identity((a, s) in group_and_subgroups(2), seed in any::<u64>()) {
        let c = random::finite_subgroup(&mut trial_rng(seed, 0), &a);
        prop_assert!(finite_perturbation_rank_check(&s[0], &s[1], &c).unwrap());
    }

    #[test]
    fn relation_laws(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let a = random::group(&mut rng, 3, 144);
        let (f, p, g) = (random::relation(&mut rng, &a), random::relation(&mut rng, &a), random::relation(&mut rng, &a));
        prop_assert_eq!(f.compose(&p).unwrap().compose(&g).unwrap(), f.compose(&p.compose(&g).unwrap()).unwrap());
        prop_assert_eq!(f.add(&p).unwrap(), p.add(&f).unwrap());
        prop_assert_eq!(&f.neg().neg(), &f);
        prop_assert_eq!(&f.converse().converse(), &f);
        prop_assert_eq!(f.add(&p).unwrap().kat().clone(), f.kat().sum(p.kat()).unwrap());
        prop_assert_eq!(f.compose(&p).unwrap().kat().clone(), f.apply(p.kat()).unwrap());
        prop_assert!(f.kind() != Kind::Neither);
        prop_assert!(f.kat().is_finite());
        prop_assert!(f.dom_index().is_finite());
        // Equivalence is reflexive and symmetric.
        prop_assert!(f.equivalent(&f).unwrap());
        prop_assert_eq!(f.equivalent(&p).unwrap(), p.equivalent(&f).unwrap());
    }

    #[test]
    fn left_distributivity_of_endogenies(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let a = random::group(&mut rng, 3, 144);
        let (d, f, p) = (random::endogeny(&mut rng, &a), random::endogeny(&mut rng, &a), random::endogeny(&mut rng, &a));
        prop_assert_eq!(d.compose(&f.add(&p).unwrap()).unwrap(), d.compose(&f).unwrap().add(&d.compose(&p).unwrap()).unwrap());
    }

    #[test]
    fn json_pairs_round_trip(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let a = random::group(&mut rng, 3, 144);
        let r = random::relation(&mut rng, &a);
        prop_assert_eq!(parse_relation(&a, &relation_json(&r)), Some(r));
    }

    #[test]
    fn workspace_round_trip(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let a = random::group(&mut rng, 3, 144);
        let (e, q) = (random::endogeny(&mut rng, &a), random::quasi(&mut rng, &a));
        let show = |r: &BiRelation| {
            let pairs: Vec<String> =
                r.generator_pairs().iter().map(|(x, y)| format!("[{}, {}]", literal(x), literal(y))).collect();
            format!("[{}]", pairs.join(", "))
        };
                let text = format!(
            "group A {{ free_rank = {}, torsion = {} }}\nendo e\n  group = A\n  pairs = {}\nquasi q\n  group = A\n  pairs = {}\nring R kind=near generators=[e, q]\n",
            a.free_rank(), literal(a.torsion_factors()), show(&e), show(&q)
        );
        let ws = parse_workspace(&text).unwrap();
        prop_assert_eq!(&ws.relations["e"].relation, &e);
        let again = parse_workspace(&serialize_workspace(&ws)).unwrap();
        prop_assert_eq!(ws, again);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn reports_are_deterministic(seed in any::<u64>()) {
        let caps = Caps::default();
        for name in ["L7-rank", "Q6-nearring"] {
            let a = emit_report(&run_suite(name, seed, 10, &caps).unwrap());
            let b = emit_report(&run_suite(name, seed, 10, &caps).unwrap());
            prop_assert_eq!(a, b);
        }
    }
}
