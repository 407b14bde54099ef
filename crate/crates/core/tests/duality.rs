use std::sync::Arc;

use msduality::algebra::make_kleene_algebra;
use msduality::duality::{
    check_strongness, dual_of_algebra, evaluation_unit, free_algebra, unit_is_natural, AlterEgo, DualitySpec,
    EgoOptions,
};
use msduality::generators::SortFamily;
use msduality::kleene::{are_spaces_isomorphic, cornish_fowler_oracle, quotient_to_kleene_space};
use msduality::piggyback::{literal_f0_chain, separation_witness};
use msduality::verify::{corpus, corpus_homs};

fn without(spec: DualitySpec, names: &[&str]) -> AlterEgo {
    let options = EgoOptions {
        omit: names.iter().map(|s| s.to_string()).collect(),
        ..Default::default()
    };
    AlterEgo::build_with(spec, &options).unwrap()
}

fn unseparated_pairs(ego: &AlterEgo, max_len: usize) -> usize {
    let mut count = 0;
    for (i, sort) in ego.sorts.iter().enumerate() {
        for a in sort.elements() {
            for b in a + 1..sort.size() {
                count += usize::from(separation_witness(ego, i, a, b, max_len).is_err());
            }
        }
    }
    count
}

#[test]
fn dropping_one_link_loses_separation_but_not_the_unit() {
    let spec = DualitySpec::OddAlg { m: 2 };
    for link in ["id-+", "id+-"] {
        let ego = without(spec, &[link]);
        assert_eq!(unseparated_pairs(&ego, 8), 1, "without {link}");
        for a in corpus(spec).unwrap() {
            assert!(evaluation_unit(&a, &ego).unwrap().iso, "without {link} on {}", a.id());
        }
    }
}

#[test]
fn dropping_both_links_breaks_the_duality() {
    let spec = DualitySpec::OddAlg { m: 2 };
    let ego = without(spec, &["id-+", "id+-"]);
    let broken = corpus(spec).unwrap().iter().filter(|a| !evaluation_unit(a, &ego).unwrap().iso).count();
    assert_eq!(broken, corpus(spec).unwrap().len());
}

#[test]
fn dropping_f0_breaks_the_duality_somewhere() {
    let spec = DualitySpec::OddAlg { m: 2 };
    let ego = without(spec, &["f0"]);
    assert_eq!(unseparated_pairs(&ego, 8), 0);
    assert!(corpus(spec).unwrap().iter().any(|a| !evaluation_unit(a, &ego).unwrap().iso));
}

#[test]
fn full_ego_separates_every_pair() {
    for spec in [DualitySpec::OddAlg { m: 2 }, DualitySpec::EvenMon { m: 3 }, DualitySpec::KleeneAlg] {
        assert_eq!(unseparated_pairs(&AlterEgo::build(spec).unwrap(), 8), 0, "{spec}");
    }
}

#[test]
fn embedding_duals_generate_even_when_not_surjective() {
    let spec = DualitySpec::OddAlg { m: 3 };
    let ego = AlterEgo::build(spec).unwrap();
    let mut literal_misses = 0;
    for f in corpus_homs(spec).unwrap() {
        let r = check_strongness(&f, &ego).unwrap();
        assert!(r.holds_up_to_generation(), "{}", f.src().id());
        literal_misses += usize::from(!r.holds());
    }
    assert!(literal_misses > 0);
}

#[test]
fn unit_is_natural_over_corpus_homs() {
    for spec in [DualitySpec::OddAlg { m: 2 }, DualitySpec::EvenAlg { m: 2 }, DualitySpec::KleeneLat] {
        let ego = AlterEgo::build(spec).unwrap();
        for f in corpus_homs(spec).unwrap() {
            assert!(unit_is_natural(&f, &ego).unwrap(), "{spec} {}", f.src().id());
        }
    }
}

#[test]
fn three_element_kleene_algebra_has_a_two_point_dual() {
    let three = Arc::new(make_kleene_algebra());
    let oracle = cornish_fowler_oracle(&three).unwrap();
    assert_eq!(oracle.len(), 2);
    assert!(oracle.fixed_points().is_empty());
    assert_eq!(oracle.covers().len(), 1);

    let ego = AlterEgo::build(DualitySpec::KleeneAlg).unwrap();
    let q = quotient_to_kleene_space(&dual_of_algebra(&three, &ego).unwrap().structure).unwrap();
    assert!(are_spaces_isomorphic(&q.space, &oracle));
}

#[test]
fn small_free_algebra_sizes() {
    let cases = [
        (DualitySpec::OddAlg { m: 2 }, 1, 4),
        (DualitySpec::EvenAlg { m: 2 }, 1, 4),
        (DualitySpec::OddMon { m: 2 }, 0, 1),
        (DualitySpec::OddMon { m: 2 }, 1, 9),
        (DualitySpec::EvenMon { m: 2 }, 0, 2),
        (DualitySpec::KleeneAlg, 1, 6),
        (DualitySpec::KleeneLat, 1, 4),
    ];
    for (spec, s, size) in cases {
        let ego = AlterEgo::build(spec).unwrap();
        assert_eq!(free_algebra(&ego, s, 4096).unwrap().algebra.size(), size, "{spec} s={s}");
    }
}

#[test]
fn literal_f0_chain_does_not_compose() {
    for m in 2..=4 {
        assert!(literal_f0_chain(&SortFamily::new(m, false).unwrap()).is_err());
    }
}
