//! Carrier maps and the piggyback relations they induce.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::algebra::{make_sugihara_algebra, make_sugihara_monoid, Elem, FiniteAlgebra, ProductAlgebra};
use crate::bitset::BitSet;
use crate::duality::{AlterEgo, DualitySpec};
use crate::error::{Error, Result};
use crate::generators::{
    even_algebra_generators, even_monoid_generators, kappa, named_generator, odd_generators, GeneratorBounds,
    GeneratorName, SortFamily,
};
use crate::hom::{
    closure_under_composition, compose, homs, partial_homs, partial_homs_with, subuniverses_within, ClosureOptions,
    PartialHomOptions, PartialMap, Relation,
};

/// A lattice homomorphism from a sort algebra onto the two-element lattice.
#[derive(Clone, Debug)]
pub struct CarrierMap {
    name: String,
    sort: Arc<FiniteAlgebra>,
    values: Vec<bool>,
}

impl CarrierMap {
    pub fn new(name: impl Into<String>, sort: &Arc<FiniteAlgebra>, values: Vec<bool>) -> Result<Self> {
        let name = name.into();
        if values.len() != sort.size() {
            return Err(Error::InvalidParameter(format!(
                "carrier map `{name}` has {} values for `{}` of size {}",
                values.len(),
                sort.id(),
                sort.size()
            )));
        }
        let map = CarrierMap { name, sort: Arc::clone(sort), values };
        if !map.is_lattice_hom() {
            return Err(Error::NotHomomorphism(format!(
                "carrier map `{}` does not preserve meet and join",
                map.name
            )));
        }
        Ok(map)
    }

    pub fn from_label_predicate(
        name: impl Into<String>,
        sort: &Arc<FiniteAlgebra>,
        pred: impl Fn(i64) -> bool,
    ) -> Result<Self> {
        let values = sort.elements().map(|e| pred(sort.label(e))).collect();
        CarrierMap::new(name, sort, values)
    }

    /// `1` exactly on the non-negative elements.
    pub fn delta_minus(sort: &Arc<FiniteAlgebra>) -> Result<Self> {
        CarrierMap::from_label_predicate("delta-", sort, |a| a >= 0)
    }

    /// `1` exactly on the elements `≥ 1`.
    pub fn delta_plus(sort: &Arc<FiniteAlgebra>) -> Result<Self> {
        CarrierMap::from_label_predicate("delta+", sort, |a| a >= 1)
    }

    /// `1` exactly on the positive elements of an even chain.
    pub fn beta(sort: &Arc<FiniteAlgebra>) -> Result<Self> {
        CarrierMap::from_label_predicate("beta", sort, |a| a > 0)
    }

    /// On the Kleene chain `0 < a < 1`: sends `a` to `1`.
    pub fn kleene_beta_minus(sort: &Arc<FiniteAlgebra>) -> Result<Self> {
        CarrierMap::from_label_predicate("beta-", sort, |a| a >= 1)
    }

    /// On the Kleene chain `0 < a < 1`: sends `a` to `0`.
    pub fn kleene_beta_plus(sort: &Arc<FiniteAlgebra>) -> Result<Self> {
        CarrierMap::from_label_predicate("beta+", sort, |a| a == 2)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sort(&self) -> &Arc<FiniteAlgebra> {
        &self.sort
    }

    pub fn value(&self, e: Elem) -> bool {
        self.values[e]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn is_lattice_hom(&self) -> bool {
        let s = &self.sort;
        s.elements().all(|a| {
            s.elements().all(|b| {
                self.values[s.meet(a, b)] == (self.values[a] && self.values[b])
                    && self.values[s.join(a, b)] == (self.values[a] || self.values[b])
            })
        })
    }
}

/// `(ω, ω′)⁻¹(≤)`: the pairs `(a, b)` with `ω(a) ≤ ω′(b)`.
pub fn pig_sublattice(omega: &CarrierMap, omega_prime: &CarrierMap) -> Relation {
    let pairs = omega
        .sort
        .elements()
        .flat_map(|a| omega_prime.sort.elements().map(move |b| (a, b)))
        .filter(|&(a, b)| !omega.value(a) || omega_prime.value(b))
        .collect();
    Relation::new(Arc::clone(&omega.sort), Arc::clone(&omega_prime.sort), pairs)
        .expect("pairs are typed by construction")
}

/// The subuniverses of `src × dst` inside `r` that are maximal under inclusion.
pub fn maximal_subalgebras_in(r: &Relation) -> Result<Vec<Relation>> {
    let prod = ProductAlgebra::new(&[r.src(), r.dst()], format!("{}x{}", r.src().id(), r.dst().id()))?;
    let allowed = BitSet::from_iter(
        prod.algebra.size(),
        r.pairs().iter().map(|&(a, b)| prod.index(&[a, b])),
    );
    let subs = subuniverses_within(&prod.algebra, &allowed);
    let maximal: Vec<&BitSet> = subs
        .iter()
        .filter(|s| !subs.iter().any(|t| t != *s && s.is_subset(t)))
        .collect();
    maximal
        .into_iter()
        .map(|s| {
            let pairs = s
                .iter()
                .map(|i| {
                    let c = prod.coords(i);
                    (c[0], c[1])
                })
                .collect();
            Relation::new(Arc::clone(r.src()), Arc::clone(r.dst()), pairs)
        })
        .collect()
}

/// How a piggyback relation is realised by a partial map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PigVerdict {
    /// `{(a, h(a))}` for the partial hom `h: src -> dst`.
    GraphOf(PartialMap),
    /// `{(k(b), b)}` for the partial hom `k: dst -> src`.
    ConverseGraphOf(PartialMap),
    Other,
}

#[derive(Clone, Debug)]
pub struct PigClassification {
    pub relation: Relation,
    pub verdict: PigVerdict,
    /// The relation is also the converse of a partial hom (only recorded for `GraphOf`).
    pub also_converse: bool,
}

impl PigClassification {
    pub fn is_graph(&self) -> bool {
        matches!(self.verdict, PigVerdict::GraphOf(_))
    }

    pub fn is_converse(&self) -> bool {
        self.also_converse || matches!(self.verdict, PigVerdict::ConverseGraphOf(_))
    }

    /// The map whose graph or converse graph the relation is.
    pub fn map(&self) -> Option<&PartialMap> {
        match &self.verdict {
            PigVerdict::GraphOf(h) | PigVerdict::ConverseGraphOf(h) => Some(h),
            PigVerdict::Other => None,
        }
    }

    /// Side conditions on the realising map, e.g. `0 ∉ dom`.
    pub fn side_conditions(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(h) = self.map() {
            if h.src().index_of(0).is_some() && !h.domain_contains_label(0) {
                out.push("0 ∉ dom".to_string());
            }
            if h.dst().index_of(0).is_some() && !h.image_contains_label(0) {
                out.push("0 ∉ img".to_string());
            }
        }
        out
    }
}

/// Reads `r` as a graph, else as a converse graph; ties go to the graph.
pub fn classify_pig_relation(r: &Relation) -> PigClassification {
    let converse = r.converse().as_partial_map();
    match (r.as_partial_map(), converse) {
        (Some(h), k) => PigClassification { relation: r.clone(), verdict: PigVerdict::GraphOf(h), also_converse: k.is_some() },
        (None, Some(k)) => {
            PigClassification { relation: r.clone(), verdict: PigVerdict::ConverseGraphOf(k), also_converse: false }
        }
        (None, None) => PigClassification { relation: r.clone(), verdict: PigVerdict::Other, also_converse: false },
    }
}

/// The expected shape of one table cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellSpec {
    /// No subalgebra lies inside the piggyback sublattice.
    Empty,
    /// Every maximal subalgebra is the graph of a partial hom `h` with the flagged conditions.
    Graph { zero_not_in_dom: bool, zero_not_in_img: bool },
    /// Every maximal subalgebra is the converse graph of a partial hom.
    Converse,
    GraphOrConverse,
}

impl CellSpec {
    fn plain_graph() -> Self {
        CellSpec::Graph { zero_not_in_dom: false, zero_not_in_img: false }
    }

    pub fn admits(&self, c: &PigClassification) -> bool {
        match *self {
            CellSpec::Empty => false,
            CellSpec::Graph { zero_not_in_dom, zero_not_in_img } => {
                let PigVerdict::GraphOf(h) = &c.verdict else { return false };
                (!zero_not_in_dom || !h.domain_contains_label(0)) && (!zero_not_in_img || !h.image_contains_label(0))
            }
            CellSpec::Converse => c.is_converse(),
            CellSpec::GraphOrConverse => c.is_graph() || c.is_converse(),
        }
    }
}

impl fmt::Display for CellSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellSpec::Empty => f.write_str("none"),
            CellSpec::Graph { zero_not_in_dom, zero_not_in_img } => {
                f.write_str("graph h")?;
                match (zero_not_in_dom, zero_not_in_img) {
                    (true, true) => f.write_str(", 0 ∉ dom h, 0 ∉ img h"),
                    (true, false) => f.write_str(", 0 ∉ dom h"),
                    (false, true) => f.write_str(", 0 ∉ img h"),
                    (false, false) => Ok(()),
                }
            }
            CellSpec::Converse => f.write_str("converse graph k"),
            CellSpec::GraphOrConverse => f.write_str("graph h or converse graph k"),
        }
    }
}

/// The published cell for the sort pair `(src, dst)` of `spec`, by sort position.
pub fn expected_cell(spec: DualitySpec, src: usize, dst: usize) -> Option<CellSpec> {
    let g = CellSpec::plain_graph();
    let g_both = CellSpec::Graph { zero_not_in_dom: true, zero_not_in_img: true };
    let g_img = CellSpec::Graph { zero_not_in_dom: false, zero_not_in_img: true };
    use CellSpec::{Converse, Empty, GraphOrConverse};
    // Sort positions: 0 = minus, 1 = plus, 2 = even.
    Some(match (spec, src, dst) {
        (DualitySpec::OddAlg { .. } | DualitySpec::EvenAlg { .. }, 0, 1) => g_both,
        (DualitySpec::OddMon { .. } | DualitySpec::EvenMon { .. }, 0, 1) => Empty,
        (DualitySpec::KleeneAlg | DualitySpec::KleeneLat, ..) => return None,
        (_, 0, 0) => g,
        (_, 1, 1) => Converse,
        (_, 1, 0) => GraphOrConverse,
        (DualitySpec::EvenAlg { .. }, 0, 2) => g,
        (DualitySpec::EvenAlg { .. }, 2, 0) => g,
        (DualitySpec::EvenAlg { .. }, 2, 2) => g,
        (DualitySpec::EvenAlg { .. }, 2, 1) => g_img,
        (DualitySpec::EvenAlg { .. }, 1, 2) => Converse,
        (DualitySpec::EvenMon { .. }, 0, 2) => Empty,
        (DualitySpec::EvenMon { .. }, 2, 0) => g,
        (DualitySpec::EvenMon { .. }, 2, 2) => g,
        (DualitySpec::EvenMon { .. }, 2, 1) => Empty,
        (DualitySpec::EvenMon { .. }, 1, 2) => Empty,
        _ => return None,
    })
}

#[derive(Clone, Debug)]
pub struct CellReport {
    pub src: String,
    pub dst: String,
    pub expected: CellSpec,
    pub found: Vec<PigClassification>,
}

impl CellReport {
    pub fn ok(&self) -> bool {
        match self.expected {
            CellSpec::Empty => self.found.is_empty(),
            spec => self.found.iter().all(|c| spec.admits(c)),
        }
    }

    pub fn other_count(&self) -> usize {
        self.found.iter().filter(|c| c.verdict == PigVerdict::Other).count()
    }
}

#[derive(Clone, Debug)]
pub struct TableReport {
    pub spec: DualitySpec,
    pub cells: Vec<CellReport>,
}

impl TableReport {
    pub fn ok(&self) -> bool {
        self.cells.iter().all(CellReport::ok)
    }

    pub fn failing(&self) -> Vec<&CellReport> {
        self.cells.iter().filter(|c| !c.ok()).collect()
    }

    /// Rows are source sorts, columns target sorts, as in the published tables.
    pub fn render(&self) -> String {
        let names: Vec<&str> = self.cells.iter().map(|c| c.src.as_str()).fold(Vec::new(), |mut v, s| {
            if !v.contains(&s) {
                v.push(s);
            }
            v
        });
        let mut out = format!("{}\n", self.spec);
        for row in &names {
            for col in &names {
                if let Some(c) = self.cells.iter().find(|c| c.src == *row && c.dst == *col) {
                    let mark = if c.ok() { "ok" } else { "MISMATCH" };
                    out.push_str(&format!(
                        "  ({row},{col}) expected [{}] found {} maximal: {mark}\n",
                        c.expected,
                        c.found.len()
                    ));
                }
            }
        }
        out
    }
}

/// Classifies every maximal piggyback subalgebra for each sort pair of `ego`.
pub fn verify_table(ego: &AlterEgo) -> Result<TableReport> {
    let n = ego.sorts.len();
    let mut cells = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let Some(expected) = expected_cell(ego.spec, i, j) else { continue };
            let r = pig_sublattice(&ego.carrier_maps[i], &ego.carrier_maps[j]);
            let found = maximal_subalgebras_in(&r)?.iter().map(classify_pig_relation).collect();
            cells.push(CellReport {
                src: ego.sorts[i].id().to_string(),
                dst: ego.sorts[j].id().to_string(),
                expected,
                found,
            });
        }
    }
    Ok(TableReport { spec: ego.spec, cells })
}

/// A composite of total ego maps separating two points under the carrier maps.
#[derive(Clone, Debug)]
pub struct SeparationWitness {
    /// Map names, applied right to left; empty for the identity.
    pub path: Vec<String>,
    pub map: PartialMap,
    pub target_sort: usize,
}

/// Breadth-first search over composites of the total ego maps, up to `max_len` steps.
pub fn separation_witness(ego: &AlterEgo, sort: usize, a: Elem, b: Elem, max_len: usize) -> Result<SeparationWitness> {
    let describe = || format!("({}, {}) in `{}`", ego.sorts[sort].name(a), ego.sorts[sort].name(b), ego.sorts[sort].id());
    if a == b {
        return Err(Error::InvalidParameter(format!("{} is not a pair of distinct points", describe())));
    }
    let separates = |s: usize, x: Elem, y: Elem| ego.carrier_maps[s].value(x) != ego.carrier_maps[s].value(y);
    // State: target sort and the images of a and b; path recorded outermost last.
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert((sort, a, b));
    queue.push_back((sort, a, b, Vec::<usize>::new()));
    while let Some((s, x, y, path)) = queue.pop_front() {
        if separates(s, x, y) {
            let mut map = PartialMap::identity(&ego.sorts[sort]);
            for &k in &path {
                map = compose(&ego.gops[k].map, &map)?;
            }
            let names = path.iter().rev().map(|&k| ego.gops[k].name.clone()).collect();
            return Ok(SeparationWitness { path: names, map, target_sort: s });
        }
        if path.len() >= max_len {
            continue;
        }
        for (k, g) in ego.gops.iter().enumerate() {
            if g.src != s {
                continue;
            }
            let (nx, ny) = (g.map.get(x).unwrap(), g.map.get(y).unwrap());
            if seen.insert((g.dst, nx, ny)) {
                let mut p = path.clone();
                p.push(k);
                queue.push_back((g.dst, nx, ny, p));
            }
        }
    }
    Err(Error::NoWitness(describe()))
}

/// Closure of a generator set compared with the brute-force partial-hom set.
#[derive(Clone, Debug)]
pub struct GeneratingReport {
    pub algebra: String,
    pub generators: Vec<String>,
    pub generated: usize,
    pub expected: usize,
    pub missing: Vec<PartialMap>,
    pub extra: Vec<PartialMap>,
}

impl GeneratingReport {
    pub fn ok(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Does composition closure of `gens` give every partial endomorphism of `alg`?
pub fn verify_generating_set(alg: &Arc<FiniteAlgebra>, gens: &[(GeneratorName, PartialMap)]) -> Result<GeneratingReport> {
    let maps: Vec<PartialMap> = gens.iter().map(|(_, p)| p.clone()).collect();
    let closure: BTreeSet<PartialMap> =
        closure_under_composition(&maps, std::slice::from_ref(alg), ClosureOptions::default())
            .into_iter()
            .collect();
    let brute: BTreeSet<PartialMap> = partial_homs(alg, alg)?.into_iter().collect();
    Ok(GeneratingReport {
        algebra: alg.id().to_string(),
        generators: gens.iter().map(|(n, _)| n.to_string()).collect(),
        generated: closure.len(),
        expected: brute.len(),
        missing: brute.difference(&closure).cloned().collect(),
        extra: closure.difference(&brute).cloned().collect(),
    })
}

/// Which endomorphism monoid a generator family is meant to generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorFamily {
    /// `f_0, …, f_k, g` on `Z_{2m−1}`.
    OddAlgebra,
    /// `f_1, …, f_k, g` on `W_{2m−1}`.
    OddMonoid,
    /// `h_2, …, h_k, j` on `Z_{2m}`.
    EvenAlgebra,
    /// `bar(h_2), …, bar(h_k), bar(j)` on `W_{2m}`.
    EvenMonoid,
}

impl GeneratorFamily {
    pub const ALL: [GeneratorFamily; 4] = [
        GeneratorFamily::OddAlgebra,
        GeneratorFamily::OddMonoid,
        GeneratorFamily::EvenAlgebra,
        GeneratorFamily::EvenMonoid,
    ];

    fn monoid(self) -> bool {
        matches!(self, GeneratorFamily::OddMonoid | GeneratorFamily::EvenMonoid)
    }

    /// The algebra whose partial endomorphisms are generated.
    pub fn algebra(self, family: &SortFamily) -> Arc<FiniteAlgebra> {
        match self {
            GeneratorFamily::OddAlgebra | GeneratorFamily::OddMonoid => Arc::clone(&family.minus),
            _ => Arc::clone(&family.even),
        }
    }

    /// Generators with largest parametric index `k`.
    pub fn generators(self, family: &SortFamily, k: i64) -> Result<Vec<(GeneratorName, PartialMap)>> {
        match self {
            GeneratorFamily::OddAlgebra => odd_generators(family, 0, k),
            GeneratorFamily::OddMonoid => odd_generators(family, 1, k),
            GeneratorFamily::EvenAlgebra => even_algebra_generators(family, k),
            GeneratorFamily::EvenMonoid => even_monoid_generators(family, k),
        }
    }

    /// The bound the alter egos use.
    pub fn resolved_bound(self, m: i64) -> i64 {
        let b = GeneratorBounds::resolved(m);
        match self {
            GeneratorFamily::OddAlgebra | GeneratorFamily::OddMonoid => b.f_max,
            GeneratorFamily::EvenAlgebra => b.h_max,
            GeneratorFamily::EvenMonoid => b.bar_h_max,
        }
    }

    /// The largest index that makes sense at all for this family.
    fn index_ceiling(self, m: i64) -> i64 {
        match self {
            GeneratorFamily::OddAlgebra | GeneratorFamily::OddMonoid => m - 1,
            GeneratorFamily::EvenAlgebra => m,
            GeneratorFamily::EvenMonoid => m - 1,
        }
    }

    fn index_floor(self) -> i64 {
        match self {
            GeneratorFamily::OddAlgebra => -1,
            GeneratorFamily::OddMonoid => 0,
            _ => 1,
        }
    }
}

impl fmt::Display for GeneratorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorFamily::OddAlgebra => "f0..fk, g on Z(2m-1)",
            GeneratorFamily::OddMonoid => "f1..fk, g on W(2m-1)",
            GeneratorFamily::EvenAlgebra => "h2..hk, j on Z(2m)",
            GeneratorFamily::EvenMonoid => "bar(h2)..bar(hk), bar(j) on W(2m)",
        })
    }
}

/// Smallest `k` for which the family generates every partial endomorphism,
/// or `None` when even the largest index falls short.
pub fn minimal_generator_bound(family_kind: GeneratorFamily, m: i64) -> Result<Option<i64>> {
    let family = SortFamily::new(m, family_kind.monoid())?;
    let alg = family_kind.algebra(&family);
    for k in family_kind.index_floor()..=family_kind.index_ceiling(m) {
        if verify_generating_set(&alg, &family_kind.generators(&family, k)?)?.ok() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// `|PE^t(W_{2m})|`, `|PE(Z_{2(m−1)})|` counted with the empty map, and
/// whether `κ` maps the latter onto the former.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaReport {
    pub m: i64,
    pub monoid_count: usize,
    pub algebra_count_with_empty: usize,
    pub bijective: bool,
}

pub fn kappa_bijection(m: i64) -> Result<KappaReport> {
    let family = SortFamily::new(m, true)?;
    let smaller = Arc::new(make_sugihara_algebra(2 * (m - 1))?);
    let small = partial_homs_with(&smaller, &smaller, PartialHomOptions { non_total_only: false, include_empty: true })?;
    let big: BTreeSet<PartialMap> = partial_homs(&family.even, &family.even)?.into_iter().collect();
    let lifted: BTreeSet<PartialMap> = small.iter().map(|e| kappa(e, &family.even)).collect::<Result<_>>()?;
    Ok(KappaReport {
        m,
        monoid_count: big.len(),
        algebra_count_with_empty: small.len(),
        bijective: lifted == big && lifted.len() == small.len(),
    })
}

/// Number of total endomorphisms of `W_{2m}`.
pub fn even_monoid_endomorphisms(m: i64) -> Result<Vec<PartialMap>> {
    let w = Arc::new(make_sugihara_monoid(2 * m)?);
    homs(&w, &w)
}

/// Coverage of one sort pair by the closure of the ego maps.
#[derive(Clone, Debug)]
pub struct PairCoverage {
    pub src: String,
    pub dst: String,
    pub expected: usize,
    pub missing: Vec<PartialMap>,
}

#[derive(Clone, Debug)]
pub struct EntailmentReport {
    pub spec: DualitySpec,
    pub restriction_used: bool,
    pub pairs: Vec<PairCoverage>,
    /// Even algebra only: `f_0` on the minus sort equals `u ∘ v`.
    pub f0_equals_u_after_v: Option<bool>,
    /// Even algebra only: `f_0` lies in the closure of the ego maps, which omit it.
    pub f0_in_closure: Option<bool>,
    /// Even algebra only: outcome of composing `v, h_m, …, h_2, u` as written.
    pub f0_literal_chain: Option<std::result::Result<PartialMap, Error>>,
    /// Monoid only: both `HOM_p^t(S^±, T)` sets are empty.
    pub no_monoid_homs_into_even: Option<bool>,
}

impl EntailmentReport {
    pub fn ok(&self) -> bool {
        self.pairs.iter().all(|p| p.missing.is_empty())
            && self.f0_equals_u_after_v != Some(false)
            && self.f0_in_closure != Some(false)
            && self.no_monoid_homs_into_even != Some(false)
    }
}

/// Checks that composing (and, for the even specs, restricting) the ego maps
/// reproduces every nonempty partial hom between every pair of sorts.
pub fn verify_entailment(ego: &AlterEgo) -> Result<EntailmentReport> {
    let spec = ego.spec;
    let m = spec
        .m()
        .ok_or_else(|| Error::InvalidParameter("entailment is checked for the Sugihara specs".into()))?;
    let restriction_used = spec.is_even();
    let gens: Vec<PartialMap> = ego.maps().map(|e| e.map.clone()).collect();
    let closure: BTreeSet<PartialMap> = closure_under_composition(
        &gens,
        &ego.sorts,
        ClosureOptions { allow_restriction: restriction_used, include_empty: false },
    )
    .into_iter()
    .collect();
    let mut pairs = Vec::new();
    for src in &ego.sorts {
        for dst in &ego.sorts {
            let expected = partial_homs(src, dst)?;
            let missing = expected.iter().filter(|p| !closure.contains(*p)).cloned().collect();
            pairs.push(PairCoverage {
                src: src.id().to_string(),
                dst: dst.id().to_string(),
                expected: expected.len(),
                missing,
            });
        }
    }
    let mut report = EntailmentReport {
        spec,
        restriction_used,
        pairs,
        f0_equals_u_after_v: None,
        f0_in_closure: None,
        f0_literal_chain: None,
        no_monoid_homs_into_even: None,
    };
    let family = SortFamily::new(m, spec.is_monoid())?;
    match spec {
        DualitySpec::EvenAlg { .. } => {
            let f0 = named_generator(&GeneratorName::F(0), &family)?;
            let u = named_generator(&GeneratorName::U, &family)?;
            let v = named_generator(&GeneratorName::V, &family)?;
            report.f0_equals_u_after_v = Some(compose(&u, &v)? == f0);
            report.f0_in_closure = Some(closure.contains(&f0));
            report.f0_literal_chain = Some(literal_f0_chain(&family));
        }
        DualitySpec::OddMon { .. } | DualitySpec::EvenMon { .. } => {
            let mut empty = true;
            for s in [&family.minus, &family.plus] {
                empty &= partial_homs(s, &family.even)?.is_empty();
            }
            report.no_monoid_homs_into_even = Some(empty);
        }
        _ => {}
    }
    Ok(report)
}

/// `v ∘ h_m ∘ ⋯ ∘ h_2 ∘ u`, composed exactly as written (rightmost first).
pub fn literal_f0_chain(family: &SortFamily) -> std::result::Result<PartialMap, Error> {
    let mut chain = vec![GeneratorName::V];
    chain.extend((2..=family.m).rev().map(GeneratorName::H));
    chain.push(GeneratorName::U);
    let maps: Vec<PartialMap> = chain.iter().map(|n| named_generator(n, family)).collect::<Result<_>>()?;
    let mut acc = maps.last().unwrap().clone();
    for outer in maps.iter().rev().skip(1) {
        acc = compose(outer, &acc)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::make_kleene_algebra;

    fn z(k: i64) -> Arc<FiniteAlgebra> {
        Arc::new(make_sugihara_algebra(k).unwrap())
    }

    #[test]
    fn delta_minus_pig_sublattice_on_z3() {
        let a = z(3);
        let d = CarrierMap::delta_minus(&a).unwrap();
        let r = pig_sublattice(&d, &d);
        assert_eq!(r.len(), 7);
        assert!(!r.contains(a.elem(0).unwrap(), a.elem(-1).unwrap()));
        assert!(!r.contains(a.elem(1).unwrap(), a.elem(-1).unwrap()));
    }

    #[test]
    fn carrier_maps_must_be_lattice_homs() {
        let a = z(3);
        assert!(CarrierMap::from_label_predicate("bad", &a, |x| x == 0).is_err());
        let k = Arc::new(make_kleene_algebra());
        assert!(CarrierMap::kleene_beta_minus(&k).unwrap().is_lattice_hom());
    }

    #[test]
    fn diagonal_lies_inside_some_maximal_subalgebra() {
        let a = z(3);
        let d = CarrierMap::delta_minus(&a).unwrap();
        let maxes = maximal_subalgebras_in(&pig_sublattice(&d, &d)).unwrap();
        assert!(maxes
            .iter()
            .any(|r| a.elements().all(|x| r.contains(x, x))));
    }

    #[test]
    fn symmetric_relation_ties_to_graph() {
        let a = z(3);
        let c = classify_pig_relation(&PartialMap::identity(&a).graph());
        assert!(matches!(c.verdict, PigVerdict::GraphOf(_)));
        assert!(c.also_converse);
    }

    #[test]
    fn separation_examples() {
        let ego = AlterEgo::build(DualitySpec::OddAlg { m: 2 }).unwrap();
        let p = &ego.sorts[0];
        let (m1, zero, one) = (p.elem(-1).unwrap(), p.elem(0).unwrap(), p.elem(1).unwrap());
        assert!(separation_witness(&ego, 0, m1, zero, 4).unwrap().path.is_empty());
        assert_eq!(separation_witness(&ego, 0, zero, one, 4).unwrap().path, ["id-+"]);
    }

    #[test]
    fn closure_of_small_odd_generators() {
        let fam = SortFamily::new(2, false).unwrap();
        let r = verify_generating_set(&fam.minus, &odd_generators(&fam, 0, 1).unwrap()).unwrap();
        assert!(r.ok());
        assert_eq!(r.expected, 5);
    }
}
