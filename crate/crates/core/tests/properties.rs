use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use msduality::algebra::{make_kleene_algebra, make_sugihara, product, FiniteAlgebra};
use msduality::bitset::BitSet;
use msduality::duality::{dual_of_algebra, structure_power, AlterEgo, DualitySpec};
use msduality::hom::{
    compose, is_partial_hom, is_subuniverse, partial_homs, quotient, subalgebras, subuniverse_closure, Congruence,
    PartialMap,
};
use msduality::json;
use msduality::kleene::{are_spaces_isomorphic, cornish_fowler_oracle, quotient_to_kleene_space};

fn z3_z5() -> &'static Arc<FiniteAlgebra> {
    static A: OnceLock<Arc<FiniteAlgebra>> = OnceLock::new();
    A.get_or_init(|| {
        let z3 = make_sugihara(3, false).unwrap();
        let z5 = make_sugihara(5, false).unwrap();
        Arc::new(product(&z3, &z5).unwrap().algebra)
    })
}

fn chain_homs() -> &'static (Vec<PartialMap>, Vec<PartialMap>, Vec<PartialMap>) {
    static H: OnceLock<(Vec<PartialMap>, Vec<PartialMap>, Vec<PartialMap>)> = OnceLock::new();
    H.get_or_init(|| {
        let z3 = Arc::new(make_sugihara(3, false).unwrap());
        let z4 = Arc::new(make_sugihara(4, false).unwrap());
        let z5 = Arc::new(make_sugihara(5, false).unwrap());
        (
            partial_homs(&z3, &z5).unwrap(),
            partial_homs(&z5, &z4).unwrap(),
            partial_homs(&z4, &z3).unwrap(),
        )
    })
}

fn kleene_square_subalgebras() -> &'static Vec<Arc<FiniteAlgebra>> {
    static S: OnceLock<Vec<Arc<FiniteAlgebra>>> = OnceLock::new();
    S.get_or_init(|| {
        let three = make_kleene_algebra();
        let square = Arc::new(product(&three, &three).unwrap().algebra);
        subalgebras(&square).unwrap().into_iter().map(|(s, _)| s).collect()
    })
}

fn spec_strategy() -> impl Strategy<Value = DualitySpec> {
    prop_oneof![
        (2i64..=3).prop_map(|m| DualitySpec::OddAlg { m }),
        Just(DualitySpec::EvenAlg { m: 2 }),
        (2i64..=3).prop_map(|m| DualitySpec::OddMon { m }),
        Just(DualitySpec::EvenMon { m: 2 }),
        Just(DualitySpec::KleeneAlg),
        Just(DualitySpec::KleeneLat),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sugihara_chains_satisfy_their_laws(k in 1i64..=8, monoid: bool) {
        let a = make_sugihara(k, monoid).unwrap();
        prop_assert!(a.check_laws().is_ok());
        prop_assert_eq!(a.size() as i64, k);
    }

    #[test]
    fn algebra_json_round_trip(k in 1i64..=7, monoid: bool) {
        let a = make_sugihara(k, monoid).unwrap();
        let text = json::to_pretty(&json::algebra_to_json(&a));
        let back = json::algebra_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(json::to_pretty(&json::algebra_to_json(&back)), text);
    }

    #[test]
    fn closure_is_the_least_subuniverse_above_the_seed(seed in prop::collection::vec(0usize..15, 1..4)) {
        let a = z3_z5();
        let closed = subuniverse_closure(a, &seed).unwrap();
        let set = BitSet::from_iter(a.size(), closed.iter().copied());
        prop_assert!(is_subuniverse(a, &set));
        prop_assert!(seed.iter().all(|s| set.contains(*s)));
        prop_assert_eq!(subuniverse_closure(a, &closed).unwrap(), closed);
    }

    #[test]
    fn partial_hom_composition_is_associative(i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), k in any::<prop::sample::Index>()) {
        let (ab, bc, ca) = chain_homs();
        let (f, g, h) = (i.get(ab), j.get(bc), k.get(ca));
        let gf = compose(g, f).unwrap();
        prop_assert!(is_partial_hom(gf.src(), gf.dst(), gf.assignment()));
        let left = compose(h, &gf).unwrap();
        let right = compose(&compose(h, g).unwrap(), f).unwrap();
        prop_assert_eq!(left.assignment(), right.assignment());
    }

    #[test]
    fn principal_quotients_are_surjective_homs(a in 0usize..15, b in 0usize..15) {
        let alg = z3_z5();
        let theta = Congruence::principal(alg, a, b);
        prop_assert!(theta.is_compatible(alg));
        prop_assert!(theta.related(a, b));
        let (q, p) = quotient(alg, &theta).unwrap();
        prop_assert_eq!(q.size(), theta.num_blocks());
        prop_assert!(p.is_total() && p.is_surjective());
        prop_assert!(is_partial_hom(alg, &q, p.assignment()));
    }

    #[test]
    fn kleene_duals_satisfy_the_space_axioms(i in any::<prop::sample::Index>()) {
        let a = i.get(kleene_square_subalgebras());
        let oracle = cornish_fowler_oracle(a).unwrap();
        prop_assert!(oracle.check_axioms().is_ok());
        let ego = AlterEgo::build(DualitySpec::KleeneAlg).unwrap();
        let q = quotient_to_kleene_space(&dual_of_algebra(a, &ego).unwrap().structure).unwrap();
        prop_assert!(q.space.check_axioms().is_ok());
        prop_assert!(are_spaces_isomorphic(&q.space, &oracle));
    }

    #[test]
    fn structure_json_round_trip(spec in spec_strategy(), s in 0usize..=1) {
        let ego = AlterEgo::build(spec).unwrap();
        let x = structure_power(&ego, s).unwrap();
        let text = json::to_pretty(&json::structure_to_json(&x));
        let back = json::structure_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(json::to_pretty(&json::structure_to_json(&back)), text);
    }
}
