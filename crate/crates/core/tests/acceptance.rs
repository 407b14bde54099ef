//! Acceptance criteria, one test each. Run with
//! `cargo test -p msduality --test acceptance -- --nocapture --test-threads=1`
//! to see the PASS/FAIL lines.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use msduality::algebra::{make_kleene_algebra, make_sugihara, FiniteAlgebra, ProductAlgebra};
use msduality::duality::{
    check_strongness, evaluation_counit, evaluation_unit, free_algebra, free_algebra_oracle, structure_power, AlterEgo,
    DualitySpec,
};
use msduality::generators::{named_generator, GeneratorName, SortFamily};
use msduality::hom::{all_subuniverses, are_isomorphic, compose, homs, partial_homs, quotient, Congruence, Relation};
use msduality::kleene::{are_spaces_isomorphic, cornish_fowler_oracle, quotient_to_kleene_space, union_preorder};
use msduality::piggyback::{
    even_monoid_endomorphisms, kappa_bijection, maximal_subalgebras_in, pig_sublattice, separation_witness,
    verify_entailment, verify_generating_set, verify_table, CarrierMap, GeneratorFamily, PigVerdict,
};
use msduality::verify::{corpus, corpus_homs};

fn report(n: u32, title: &str, ok: bool, detail: impl AsRef<str>) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {n:>2} {verdict}: {title} [{}]", detail.as_ref());
    assert!(ok, "criterion {n} failed: {}", detail.as_ref());
}

fn param_specs(m: i64) -> [DualitySpec; 4] {
    [
        DualitySpec::OddAlg { m },
        DualitySpec::EvenAlg { m },
        DualitySpec::OddMon { m },
        DualitySpec::EvenMon { m },
    ]
}

/// The corpus sweep shared by the duality, fullness and strongness criteria.
fn sweep_specs() -> Vec<DualitySpec> {
    vec![
        DualitySpec::OddAlg { m: 2 },
        DualitySpec::OddAlg { m: 3 },
        DualitySpec::EvenAlg { m: 2 },
        DualitySpec::OddMon { m: 2 },
        DualitySpec::OddMon { m: 3 },
        DualitySpec::EvenMon { m: 2 },
    ]
}

#[test]
fn criterion_01_kleene_subalgebras_of_square() {
    let three = make_kleene_algebra();
    let start = Instant::now();
    let square = ProductAlgebra::new(&[&three, &three], "3x3").unwrap().algebra;
    let subs = all_subuniverses(&square);
    let elapsed = start.elapsed();
    report(
        1,
        "3^2 has exactly 11 subalgebras",
        subs.len() == 11 && elapsed < Duration::from_secs(1),
        format!("{} subuniverses in {elapsed:?}", subs.len()),
    );
}

#[test]
fn criterion_02_kleene_piggyback_relations() {
    let start = Instant::now();
    let ego = AlterEgo::build(DualitySpec::KleeneAlg).unwrap();
    let three = Arc::clone(&ego.sorts[0]);
    let el = |name: &str| three.names().iter().position(|n| n == name).unwrap();
    let rel = |pairs: &[(&str, &str)]| {
        let set: BTreeSet<_> = pairs.iter().map(|&(a, b)| (el(a), el(b))).collect();
        Relation::new(Arc::clone(&three), Arc::clone(&three), set).unwrap()
    };
    // The four expected relations.
    let order = rel(&[("0", "0"), ("a", "a"), ("1", "1"), ("0", "a"), ("1", "a")]);
    let all_but = rel(&[
        ("0", "0"),
        ("0", "a"),
        ("a", "0"),
        ("a", "a"),
        ("a", "1"),
        ("1", "a"),
        ("1", "1"),
    ]);
    let diagonal_ends = rel(&[("0", "0"), ("1", "1")]);
    let dual_order = order.converse();

    let minus = CarrierMap::kleene_beta_minus(&three).unwrap();
    let plus = CarrierMap::kleene_beta_plus(&three).unwrap();
    let cells = [
        ("(b-,b-)", &minus, &minus, &order),
        ("(b-,b+)", &minus, &plus, &diagonal_ends),
        ("(b+,b-)", &plus, &minus, &all_but),
        ("(b+,b+)", &plus, &plus, &dual_order),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, w, w2, expected) in cells {
        let max = maximal_subalgebras_in(&pig_sublattice(w, w2)).unwrap();
        let hit = max.len() == 1 && &max[0] == expected;
        ok &= hit;
        detail.push(format!("{name}: {} maximal, match {hit}", max.len()));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(1);
    report(2, "each Kleene piggyback sublattice has the expected unique maximal subalgebra", ok, format!("{}; {elapsed:?}", detail.join(", ")));
}

#[test]
fn criterion_03_unit_is_an_isomorphism_on_the_corpus() {
    let start = Instant::now();
    let (mut checked, mut failures) = (0, Vec::new());
    for spec in sweep_specs() {
        let ego = AlterEgo::build(spec).unwrap();
        for a in corpus(spec).unwrap() {
            checked += 1;
            if !evaluation_unit(&a, &ego).unwrap().iso {
                failures.push(format!("{spec} {}", a.id()));
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        3,
        "e_A is an isomorphism across the duality sweep",
        failures.is_empty() && elapsed < Duration::from_secs(600),
        format!("{checked} algebras, failures {failures:?}, {elapsed:?}"),
    );
}

#[test]
fn criterion_04_counit_is_an_isomorphism_on_duals() {
    let (mut checked, mut failures) = (0, Vec::new());
    for spec in sweep_specs() {
        let ego = AlterEgo::build(spec).unwrap();
        for a in corpus(spec).unwrap() {
            checked += 1;
            if !evaluation_counit(&a, &ego).unwrap().iso {
                failures.push(format!("{spec} {}", a.id()));
            }
        }
    }
    report(4, "epsilon_D(A) is an isomorphism across the sweep", failures.is_empty(), format!("{checked} duals, failures {failures:?}"));
}

#[test]
fn criterion_05_strongness_consequences() {
    let (mut embeddings, mut surjections) = (0, 0);
    let (mut emb_failures, mut surj_failures) = (Vec::new(), Vec::new());
    for spec in sweep_specs() {
        let ego = AlterEgo::build(spec).unwrap();
        for f in corpus_homs(spec).unwrap() {
            let r = check_strongness(&f, &ego).unwrap();
            if r.injective {
                embeddings += 1;
                if !r.dual_surjective {
                    emb_failures.push(format!("{spec} {}", f.src().id()));
                }
            }
            if r.surjective {
                surjections += 1;
                if !r.dual_embedding {
                    surj_failures.push(format!("{spec} {}", f.src().id()));
                }
            }
        }
    }
    let ok = embeddings >= 5 && surjections >= 5 && emb_failures.is_empty() && surj_failures.is_empty();
    report(
        5,
        "D sends embeddings to sortwise surjections and surjections to embeddings",
        ok,
        format!(
            "{embeddings} embeddings ({} not sortwise surjective: {emb_failures:?}), {surjections} surjections ({} failures)",
            emb_failures.len(),
            surj_failures.len()
        ),
    );
}

#[test]
fn criterion_06_generating_sets() {
    let mut detail = Vec::new();
    let mut ok = true;
    for m in 2..=4 {
        for kind in GeneratorFamily::ALL {
            let monoid = matches!(kind, GeneratorFamily::OddMonoid | GeneratorFamily::EvenMonoid);
            let family = SortFamily::new(m, monoid).unwrap();
            let gens = kind.generators(&family, kind.resolved_bound(m)).unwrap();
            let r = verify_generating_set(&kind.algebra(&family), &gens).unwrap();
            ok &= r.ok();
            detail.push(format!("m={m} {}: {}/{}", r.algebra, r.generated, r.expected));
        }
        let ends = even_monoid_endomorphisms(m).unwrap();
        let trivial = ends.len() == 1 && ends[0].is_total() && ends[0].image().len() == ends[0].src().size()
            && ends[0].src().elements().all(|e| ends[0].get(e) == Some(e));
        ok &= trivial;
        detail.push(format!("m={m} End(W{}) = {}", 2 * m, ends.len()));
    }
    for m in 3..=4 {
        let k = kappa_bijection(m).unwrap();
        ok &= k.bijective && k.monoid_count == k.algebra_count_with_empty;
        detail.push(format!("m={m} kappa {} = {}", k.monoid_count, k.algebra_count_with_empty));
    }
    report(6, "resolved generator sets, kappa bijection and trivial End(W_2m)", ok, detail.join("; "));
}

#[test]
fn criterion_07_piggyback_tables() {
    let mut ok = true;
    let (mut others, mut mismatches) = (0, Vec::new());
    for m in 2..=3 {
        for spec in param_specs(m) {
            let table = verify_table(&AlterEgo::build(spec).unwrap()).unwrap();
            for c in &table.cells {
                others += c.other_count();
                if !c.ok() {
                    let shapes: Vec<String> = c
                        .found
                        .iter()
                        .map(|f| match &f.verdict {
                            PigVerdict::GraphOf(h) => format!("graph {h}"),
                            PigVerdict::ConverseGraphOf(k) => format!("converse {k}"),
                            PigVerdict::Other => "other".into(),
                        })
                        .collect();
                    mismatches.push(format!("{spec} ({},{}) expected [{}] found {shapes:?}", c.src, c.dst, c.expected));
                }
            }
            ok &= table.ok();
        }
    }
    ok &= others == 0;
    report(7, "every table cell matches with no unclassified relations", ok, format!("other verdicts {others}; mismatches {mismatches:?}"));
}

#[test]
fn criterion_08_separation() {
    let (mut pairs, mut longest, mut missing) = (0, 0, Vec::new());
    for m in 2..=4 {
        for spec in param_specs(m) {
            let ego = AlterEgo::build(spec).unwrap();
            for (i, sort) in ego.sorts.iter().enumerate() {
                for a in sort.elements() {
                    for b in a + 1..sort.size() {
                        pairs += 1;
                        match separation_witness(&ego, i, a, b, 2 * m as usize) {
                            Ok(w) => longest = longest.max(w.path.len()),
                            Err(e) => missing.push(format!("{spec}: {e}")),
                        }
                    }
                }
            }
        }
    }
    report(8, "every unequal pair in every sort is separated", missing.is_empty(), format!("{pairs} pairs, longest witness {longest}, missing {missing:?}"));
}

#[test]
fn criterion_09_entailment() {
    let mut ok = true;
    let mut detail = Vec::new();
    for m in 2..=3 {
        for spec in param_specs(m) {
            let r = verify_entailment(&AlterEgo::build(spec).unwrap()).unwrap();
            ok &= r.ok();
            let expected: usize = r.pairs.iter().map(|p| p.expected).sum();
            let missing: usize = r.pairs.iter().map(|p| p.missing.len()).sum();
            detail.push(format!("{spec}: {expected} partial homs, {missing} missing"));
            if let (Some(eq), Some(inc)) = (r.f0_equals_u_after_v, r.f0_in_closure) {
                ok &= eq && inc;
                detail.push(format!("{spec}: f0 = u.v {eq}, f0 entailed {inc}"));
            }
        }
    }
    // The chain v, h_m, ..., h_2, u read left to right is well typed; record what it gives.
    for m in 2..=3 {
        let family = SortFamily::new(m, false).unwrap();
        let g = |n: GeneratorName| named_generator(&n, &family).unwrap();
        let mut acc = g(GeneratorName::V);
        for i in (2..=m).rev() {
            acc = compose(&g(GeneratorName::H(i)), &acc).unwrap();
        }
        acc = compose(&g(GeneratorName::U), &acc).unwrap();
        detail.push(format!("m={m} diagrammatic chain has domain size {}", acc.domain().len()));
    }
    for m in 2..=4 {
        let family = SortFamily::new(m, true).unwrap();
        let empty = [&family.minus, &family.plus]
            .iter()
            .all(|s| partial_homs(s, &family.even).unwrap().is_empty());
        ok &= empty;
        detail.push(format!("m={m} HOM_p(S+-, T) empty {empty}"));
    }
    report(9, "ego maps entail every cross-sort partial hom", ok, detail.join("; "));
}

#[test]
fn criterion_10_variety_facts() {
    let mut ok = true;
    let mut detail = Vec::new();
    for monoid in [false, true] {
        for m in 2..=3 {
            let odd = Arc::new(make_sugihara(2 * m - 1, monoid).unwrap());
            let even = Arc::new(make_sugihara(2 * m, monoid).unwrap());
            let no_homs = homs(&odd, &even).unwrap().is_empty();
            let theta = Congruence::from_label_blocks(&even, &[vec![-1, 1]]).unwrap();
            let (q, _) = quotient(&even, &theta).unwrap();
            let iso = are_isomorphic(&q, &odd).unwrap();
            ok &= no_homs && iso;
            detail.push(format!("{}: no homs {no_homs}, quotient iso {iso}", even.id()));
        }
    }
    report(10, "no homs from the odd chain into the even one, and the collapse quotient", ok, detail.join("; "));
}

fn free_pair(spec: DualitySpec, s: usize) -> (usize, usize, bool) {
    let ego = AlterEgo::build(spec).unwrap();
    let dual = free_algebra(&ego, s, 4096).unwrap();
    let oracle = free_algebra_oracle(&ego.sorts, s, 1 << 20).unwrap();
    let iso = are_isomorphic(&dual.algebra, &oracle).unwrap();
    (dual.algebra.size(), oracle.size(), iso)
}

#[test]
fn criterion_11_free_algebras() {
    let mut ok = true;
    let mut detail = Vec::new();
    let mut sizes = std::collections::HashMap::new();
    let mut runs: Vec<(DualitySpec, usize)> = Vec::new();
    for s in 0..=2 {
        runs.push((DualitySpec::KleeneAlg, s));
    }
    for s in 1..=2 {
        runs.push((DualitySpec::KleeneLat, s));
    }
    runs.extend([
        (DualitySpec::OddAlg { m: 2 }, 1),
        (DualitySpec::EvenAlg { m: 2 }, 1),
        (DualitySpec::OddMon { m: 2 }, 1),
    ]);
    for (spec, s) in runs {
        let start = Instant::now();
        let (d, o, iso) = free_pair(spec, s);
        let elapsed = start.elapsed();
        ok &= iso;
        if spec == DualitySpec::KleeneAlg && s == 2 {
            ok &= elapsed < Duration::from_secs(300);
        }
        sizes.insert((spec, s), d);
        detail.push(format!("{spec} s={s}: {d} vs {o}"));
    }
    // Without constants there is no free algebra on no generators.
    let klu = AlterEgo::build(DualitySpec::KleeneLat).unwrap();
    ok &= free_algebra(&klu, 0, 4096).is_err() && free_algebra_oracle(&klu.sorts, 0, 4096).is_err();
    for s in 1..=2 {
        let (ka, klu) = (sizes[&(DualitySpec::KleeneAlg, s)], sizes[&(DualitySpec::KleeneLat, s)]);
        ok &= klu + 2 == ka;
        detail.push(format!("|F_Klu({s})| + 2 = {} vs |F_KA({s})| = {ka}", klu + 2));
    }
    report(11, "free algebras via duality agree with the projection oracle", ok, detail.join("; "));
}

#[test]
fn criterion_12_kleene_translation() {
    let ego = AlterEgo::build(DualitySpec::KleeneAlg).unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for s in 0..=2 {
        let q = quotient_to_kleene_space(&structure_power(&ego, s).unwrap()).unwrap();
        let free: Arc<FiniteAlgebra> = free_algebra_oracle(&ego.sorts, s, 1 << 20).unwrap();
        let oracle = cornish_fowler_oracle(&free).unwrap();
        let iso = are_spaces_isomorphic(&q.space, &oracle);
        ok &= iso;
        detail.push(format!("s={s}: {} points, oracle {}, iso {iso}", q.space.len(), oracle.len()));
        if s == 1 {
            let y = &q.space;
            let n = y.len();
            let bottom = (0..n).filter(|&x| (0..n).all(|z| y.leq[x][z])).collect::<Vec<_>>();
            let top = (0..n).filter(|&x| (0..n).all(|z| y.leq[z][x])).collect::<Vec<_>>();
            let square = n == 4 && y.covers().len() == 4 && bottom.len() == 1 && top.len() == 1;
            let swaps_ends = square && y.g[bottom[0]] == top[0];
            let pre = union_preorder(&structure_power(&ego, 1).unwrap()).unwrap();
            let zero = |sort: &str| pre.names.iter().position(|p| p == &format!("0{sort}")).unwrap();
            let collapses = pre.equivalent(zero("-"), zero("+"));
            ok &= square && swaps_ends && collapses;
            detail.push(format!("s=1 is 2x2 {square}, g swaps top and bottom {swaps_ends}, 0- ~ 0+ {collapses}"));
        }
    }
    report(12, "quotient of the power agrees with the Cornish-Fowler dual", ok, detail.join("; "));
}
