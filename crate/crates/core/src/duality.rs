//! Alter egos, the hom-functors `D` and `E`, evaluation maps, free algebras
//! and the strongness consequences of a duality.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::algebra::{make_kleene_algebra, make_kleene_lattice, Elem, FiniteAlgebra, OpSymbol};
use crate::error::{Error, Result};
use crate::generators::{
    even_algebra_generators, even_monoid_generators, named_generator, odd_generators, GeneratorBounds,
    GeneratorName, LinkDirection, SortFamily,
};
use crate::hom::{compose, homs, is_partial_hom, is_subuniverse, PartialMap, Relation};
use crate::bitset::BitSet;
use crate::piggyback::CarrierMap;
use crate::structure::{
    enumerate_morphisms, index_morphisms, unflatten, MultisortedMorphism, MultisortedStructure, Sort, StructConst,
    StructOp, StructRel,
};

/// The six shipped duality specifications.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DualitySpec {
    OddAlg { m: i64 },
    EvenAlg { m: i64 },
    OddMon { m: i64 },
    EvenMon { m: i64 },
    KleeneAlg,
    KleeneLat,
}

impl DualitySpec {
    pub const TAGS: [&'static str; 6] = ["odd-alg", "even-alg", "odd-mon", "even-mon", "kleene", "kleene-lattice"];

    pub fn tag(&self) -> &'static str {
        match self {
            DualitySpec::OddAlg { .. } => "odd-alg",
            DualitySpec::EvenAlg { .. } => "even-alg",
            DualitySpec::OddMon { .. } => "odd-mon",
            DualitySpec::EvenMon { .. } => "even-mon",
            DualitySpec::KleeneAlg => "kleene",
            DualitySpec::KleeneLat => "kleene-lattice",
        }
    }

    /// Builds a spec from its tag; `m` is ignored by the Kleene specs.
    pub fn from_tag(tag: &str, m: i64) -> Result<Self> {
        Ok(match tag {
            "odd-alg" => DualitySpec::OddAlg { m },
            "even-alg" => DualitySpec::EvenAlg { m },
            "odd-mon" => DualitySpec::OddMon { m },
            "even-mon" => DualitySpec::EvenMon { m },
            "kleene" => DualitySpec::KleeneAlg,
            "kleene-lattice" => DualitySpec::KleeneLat,
            _ => return Err(Error::InvalidParameter(format!("unknown duality spec `{tag}`"))),
        })
    }

    pub fn m(&self) -> Option<i64> {
        match *self {
            DualitySpec::OddAlg { m }
            | DualitySpec::EvenAlg { m }
            | DualitySpec::OddMon { m }
            | DualitySpec::EvenMon { m } => Some(m),
            DualitySpec::KleeneAlg | DualitySpec::KleeneLat => None,
        }
    }

    pub fn is_kleene(&self) -> bool {
        self.m().is_none()
    }

    pub fn is_monoid(&self) -> bool {
        matches!(self, DualitySpec::OddMon { .. } | DualitySpec::EvenMon { .. })
    }

    pub fn is_even(&self) -> bool {
        matches!(self, DualitySpec::EvenAlg { .. } | DualitySpec::EvenMon { .. })
    }
}

impl fmt::Display for DualitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.m() {
            Some(m) => write!(f, "{}(m={m})", self.tag()),
            None => f.write_str(self.tag()),
        }
    }
}

impl FromStr for DualitySpec {
    type Err = Error;

    /// Accepts `kleene`, `odd-alg` (m = 2) or `odd-alg:3`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some((tag, m)) => {
                let m = m
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad m in `{s}`")))?;
                DualitySpec::from_tag(tag, m)
            }
            None => DualitySpec::from_tag(s, 2),
        }
    }
}

/// Knobs for building non-standard alter egos.
#[derive(Clone, Debug, Default)]
pub struct EgoOptions {
    /// Generator index bounds; `None` uses [`GeneratorBounds::resolved`].
    pub bounds: Option<GeneratorBounds>,
    /// Names of operations, constants or relations to leave out.
    pub omit: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct EgoMap {
    pub name: String,
    pub src: usize,
    pub dst: usize,
    pub map: PartialMap,
}

#[derive(Clone, Debug)]
pub struct EgoConst {
    pub name: String,
    pub sort: usize,
    pub elem: Elem,
}

#[derive(Clone, Debug)]
pub struct EgoRelation {
    pub name: String,
    pub src: usize,
    pub dst: usize,
    pub relation: Relation,
}

/// Sort algebras, carrier maps and the structure on their disjoint union.
#[derive(Clone, Debug)]
pub struct AlterEgo {
    pub spec: DualitySpec,
    pub sorts: Vec<Arc<FiniteAlgebra>>,
    pub carrier_maps: Vec<CarrierMap>,
    pub gops: Vec<EgoMap>,
    pub hops: Vec<EgoMap>,
    pub consts: Vec<EgoConst>,
    pub rels: Vec<EgoRelation>,
    pub structure: MultisortedStructure,
}

impl AlterEgo {
    pub fn build(spec: DualitySpec) -> Result<Self> {
        AlterEgo::build_with(spec, &EgoOptions::default())
    }

    pub fn build_with(spec: DualitySpec, options: &EgoOptions) -> Result<Self> {
        let mut b = match spec {
            DualitySpec::KleeneAlg | DualitySpec::KleeneLat => kleene_parts(spec)?,
            _ => sugihara_parts(spec, options)?,
        };
        b.gops.retain(|g| !options.omit.contains(&g.name));
        b.hops.retain(|h| !options.omit.contains(&h.name));
        b.consts.retain(|c| !options.omit.contains(&c.name));
        b.rels.retain(|r| !options.omit.contains(&r.name));
        b.finish(spec)
    }

    pub fn sort_index(&self, id: &str) -> Option<usize> {
        self.sorts.iter().position(|s| s.id() == id)
    }

    pub fn sort(&self, id: &str) -> Option<&Arc<FiniteAlgebra>> {
        self.sort_index(id).map(|i| &self.sorts[i])
    }

    /// Every total and partial operation, in structure order.
    pub fn maps(&self) -> impl Iterator<Item = &EgoMap> {
        self.gops.iter().chain(&self.hops)
    }

    pub fn map(&self, name: &str) -> Option<&EgoMap> {
        self.maps().find(|m| m.name == name)
    }
}

struct EgoParts {
    sorts: Vec<Arc<FiniteAlgebra>>,
    carrier_maps: Vec<CarrierMap>,
    gops: Vec<EgoMap>,
    hops: Vec<EgoMap>,
    consts: Vec<EgoConst>,
    rels: Vec<EgoRelation>,
}

impl EgoParts {
    fn index(&self, alg: &FiniteAlgebra) -> Result<usize> {
        self.sorts
            .iter()
            .position(|s| s.id() == alg.id())
            .ok_or_else(|| Error::MalformedStructure(format!("`{}` is not a sort", alg.id())))
    }

    fn add_map(&mut self, name: &GeneratorName, map: PartialMap) -> Result<()> {
        let (src, dst) = (self.index(map.src())?, self.index(map.dst())?);
        let item = EgoMap { name: name.to_string(), src, dst, map };
        if item.map.is_total() {
            self.gops.push(item);
        } else {
            self.hops.push(item);
        }
        Ok(())
    }

    /// Checks the ego invariants and assembles the structure.
    fn finish(self, spec: DualitySpec) -> Result<AlterEgo> {
        for m in self.gops.iter().chain(&self.hops) {
            if !is_partial_hom(m.map.src(), m.map.dst(), m.map.assignment()) {
                return Err(Error::NotHomomorphism(format!("ego map `{}`", m.name)));
            }
        }
        for c in &self.consts {
            let alg = &self.sorts[c.sort];
            if !is_subuniverse(alg, &BitSet::from_iter(alg.size(), [c.elem])) {
                return Err(Error::MalformedStructure(format!(
                    "constant `{}` is not a one-element subalgebra",
                    c.name
                )));
            }
        }
        if let Some(r) = self.rels.iter().find(|r| !r.relation.is_subalgebra()) {
            return Err(Error::MalformedStructure(format!("relation `{}` is not a subalgebra", r.name)));
        }
        let op = |m: &EgoMap| StructOp {
            name: m.name.clone(),
            src: m.src,
            dst: m.dst,
            map: m.map.assignment().to_vec(),
        };
        let structure = MultisortedStructure {
            id: format!("ego:{spec}"),
            sorts: self
                .sorts
                .iter()
                .map(|s| Sort { name: s.id().to_string(), points: s.names().to_vec() })
                .collect(),
            gops: self.gops.iter().map(op).collect(),
            hops: self.hops.iter().map(op).collect(),
            consts: self
                .consts
                .iter()
                .map(|c| StructConst { name: c.name.clone(), sort: c.sort, point: c.elem })
                .collect(),
            rels: self
                .rels
                .iter()
                .map(|r| StructRel {
                    name: r.name.clone(),
                    src: r.src,
                    dst: r.dst,
                    pairs: r.relation.pairs().clone(),
                })
                .collect(),
        };
        structure.validate()?;
        Ok(AlterEgo {
            spec,
            sorts: self.sorts,
            carrier_maps: self.carrier_maps,
            gops: self.gops,
            hops: self.hops,
            consts: self.consts,
            rels: self.rels,
            structure,
        })
    }
}

fn sugihara_parts(spec: DualitySpec, options: &EgoOptions) -> Result<EgoParts> {
    let m = spec.m().unwrap_or(0);
    let family = SortFamily::new(m, spec.is_monoid())?;
    let bounds = options.bounds.unwrap_or_else(|| GeneratorBounds::resolved(m));
    let mut sorts = vec![Arc::clone(&family.minus), Arc::clone(&family.plus)];
    let mut carrier_maps = vec![CarrierMap::delta_minus(&family.minus)?, CarrierMap::delta_plus(&family.plus)?];
    if spec.is_even() {
        sorts.push(Arc::clone(&family.even));
        carrier_maps.push(CarrierMap::beta(&family.even)?);
    }
    let mut parts = EgoParts { sorts, carrier_maps, gops: vec![], hops: vec![], consts: vec![], rels: vec![] };

    let f_lo = if matches!(spec, DualitySpec::OddAlg { .. }) { 0 } else { 1 };
    let mut named = odd_generators(&family, f_lo, bounds.f_max)?;
    named.extend([
        GeneratorName::IdLink(LinkDirection::MinusToPlus),
        GeneratorName::IdLink(LinkDirection::PlusToMinus),
    ]
    .into_iter()
    .map(|n| named_generator(&n, &family).map(|p| (n, p)))
    .collect::<Result<Vec<_>>>()?);
    match spec {
        DualitySpec::EvenAlg { .. } => {
            for n in [GeneratorName::U, GeneratorName::V] {
                let p = named_generator(&n, &family)?;
                named.push((n, p));
            }
            named.extend(even_algebra_generators(&family, bounds.h_max)?);
        }
        DualitySpec::EvenMon { .. } => {
            let p = named_generator(&GeneratorName::U, &family)?;
            named.push((GeneratorName::U, p));
            named.extend(even_monoid_generators(&family, bounds.bar_h_max)?);
        }
        _ => {}
    }
    for (name, map) in named {
        parts.add_map(&name, map)?;
    }
    parts.consts.push(EgoConst {
        name: format!("0{}", family.minus.id()),
        sort: 0,
        elem: family.minus.elem(0)?,
    });
    Ok(parts)
}

/// Labels of the Kleene chain: 0, a, 1 are 0, 1, 2.
fn kleene_parts(spec: DualitySpec) -> Result<EgoParts> {
    let base = if spec == DualitySpec::KleeneAlg { make_kleene_algebra() } else { make_kleene_lattice() };
    let minus = Arc::new(base.renamed("3-"));
    let plus = Arc::new(base.renamed("3+"));
    let carrier_maps = vec![CarrierMap::kleene_beta_minus(&minus)?, CarrierMap::kleene_beta_plus(&plus)?];
    let diagonal = [(0, 0), (1, 1), (2, 2)];
    let with_diagonal = |extra: &[(i64, i64)]| -> Vec<(i64, i64)> { diagonal.iter().chain(extra).copied().collect() };
    let everything_but = |gone: &[(i64, i64)]| -> Vec<(i64, i64)> {
        (0..3)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .filter(|p| !gone.contains(p))
            .collect()
    };
    let rels = vec![
        ("prec-", 0, 0, with_diagonal(&[(0, 1), (2, 1)])),
        ("link-+", 0, 1, vec![(0, 0), (2, 2)]),
        ("link+-", 1, 0, everything_but(&[(0, 2), (2, 0)])),
        ("succ+", 1, 1, with_diagonal(&[(1, 0), (1, 2)])),
    ];
    let sorts = [Arc::clone(&minus), Arc::clone(&plus)];
    let rels = rels
        .into_iter()
        .map(|(name, src, dst, pairs)| {
            Ok(EgoRelation {
                name: name.to_string(),
                src,
                dst,
                relation: Relation::from_label_pairs(Arc::clone(&sorts[src]), Arc::clone(&sorts[dst]), &pairs)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut parts = EgoParts {
        sorts: sorts.to_vec(),
        carrier_maps,
        gops: vec![],
        hops: vec![],
        consts: vec![],
        rels,
    };
    for (name, src, dst) in [("id-+", &minus, &plus), ("id+-", &plus, &minus)] {
        let map = PartialMap::from_label_fn(Arc::clone(src), Arc::clone(dst), Some)?;
        parts.add_map(&name.parse::<GeneratorName>()?, map)?;
    }
    if spec == DualitySpec::KleeneLat {
        parts.consts.push(EgoConst { name: "a3-".into(), sort: 0, elem: 1 });
    }
    Ok(parts)
}

/// `D(A)`: the homs into each sort with the ego structure lifted pointwise.
#[derive(Clone, Debug)]
pub struct DualStructure {
    pub structure: MultisortedStructure,
    pub homs: Vec<Vec<PartialMap>>,
}

impl DualStructure {
    /// Position of a hom `A -> M_sort` among the points of `sort`.
    pub fn point_of(&self, sort: usize, hom: &PartialMap) -> Option<usize> {
        self.homs[sort].iter().position(|h| h.assignment() == hom.assignment())
    }
}

pub fn dual_of_algebra(a: &Arc<FiniteAlgebra>, ego: &AlterEgo) -> Result<DualStructure> {
    if a.signature() != ego.sorts[0].signature() {
        return Err(Error::SignatureMismatch(a.id().into(), ego.sorts[0].id().into()));
    }
    let hom_sets: Vec<Vec<PartialMap>> = ego.sorts.iter().map(|m| homs(a, m)).collect::<Result<_>>()?;
    let index: Vec<HashMap<Vec<Option<Elem>>, usize>> = hom_sets
        .iter()
        .map(|hs| hs.iter().enumerate().map(|(i, h)| (h.assignment().to_vec(), i)).collect())
        .collect();
    let lift = |m: &EgoMap| -> Result<StructOp> {
        let map = hom_sets[m.src]
            .iter()
            .map(|x| {
                let y = compose(&m.map, x)?;
                Ok(if y.is_total() { index[m.dst].get(y.assignment()).copied() } else { None })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StructOp { name: m.name.clone(), src: m.src, dst: m.dst, map })
    };
    let gops = ego.gops.iter().map(lift).collect::<Result<Vec<_>>>()?;
    let hops = ego.hops.iter().map(lift).collect::<Result<Vec<_>>>()?;
    let consts = ego
        .consts
        .iter()
        .map(|c| {
            let constant = vec![Some(c.elem); a.size()];
            let point = index[c.sort].get(&constant).copied().ok_or_else(|| {
                Error::MalformedStructure(format!("constant map `{}` on `{}` is not a hom", c.name, a.id()))
            })?;
            Ok(StructConst { name: c.name.clone(), sort: c.sort, point })
        })
        .collect::<Result<Vec<_>>>()?;
    let rels = ego
        .rels
        .iter()
        .map(|r| {
            let mut pairs = BTreeSet::new();
            for (i, x) in hom_sets[r.src].iter().enumerate() {
                for (j, y) in hom_sets[r.dst].iter().enumerate() {
                    if a.elements().all(|e| r.relation.contains(x.get(e).unwrap(), y.get(e).unwrap())) {
                        pairs.insert((i, j));
                    }
                }
            }
            StructRel { name: r.name.clone(), src: r.src, dst: r.dst, pairs }
        })
        .collect();
    let sorts = hom_sets
        .iter()
        .zip(&ego.sorts)
        .map(|(hs, m)| Sort {
            name: m.id().to_string(),
            points: hs
                .iter()
                .map(|h| {
                    let images: Vec<&str> = a.elements().map(|e| m.name(h.get(e).unwrap())).collect();
                    format!("({})", images.join(","))
                })
                .collect(),
        })
        .collect();
    let structure = MultisortedStructure { id: format!("D({})", a.id()), sorts, gops, hops, consts, rels };
    structure.validate()?;
    Ok(DualStructure { structure, homs: hom_sets })
}

/// `E(X)`: the morphisms `X -> M̃` with the pointwise algebra operations.
#[derive(Clone, Debug)]
pub struct DualAlgebra {
    pub algebra: Arc<FiniteAlgebra>,
    /// One flattened morphism per element, in element order.
    pub morphisms: Vec<Vec<usize>>,
    pub source: MultisortedStructure,
}

impl DualAlgebra {
    pub fn element_of(&self, flat: &[usize]) -> Option<Elem> {
        self.morphisms.iter().position(|m| m.as_slice() == flat)
    }
}

pub fn dual_of_structure(x: &MultisortedStructure, ego: &AlterEgo) -> Result<DualAlgebra> {
    let morphisms = enumerate_morphisms(x, &ego.structure)?;
    if morphisms.is_empty() {
        return Err(Error::MalformedStructure(format!("`{}` has no morphism into the alter ego", x.id)));
    }
    let index = index_morphisms(&morphisms);
    let sort_of_point: Vec<usize> = x
        .sorts
        .iter()
        .enumerate()
        .flat_map(|(i, s)| std::iter::repeat_n(i, s.len()))
        .collect();
    let signature = ego.sorts[0].signature().clone();
    let mut missing = false;
    let n = morphisms.len();
    let algebra = FiniteAlgebra::from_fn(
        format!("E({})", x.id),
        signature,
        (0..n as i64).collect(),
        None,
        |sym, args| {
            let value: Vec<usize> = sort_of_point
                .iter()
                .enumerate()
                .map(|(p, &i)| {
                    let alg = &ego.sorts[i];
                    let op = alg.op(sym).expect("shared signature");
                    let coords: Vec<Elem> = args.iter().map(|&a| morphisms[a][p]).collect();
                    alg.apply(op, &coords)
                })
                .collect();
            index.get(&value).copied().unwrap_or_else(|| {
                missing = true;
                0
            })
        },
    )?;
    if missing {
        return Err(Error::MalformedStructure(format!(
            "morphisms out of `{}` are not closed under the pointwise operations",
            x.id
        )));
    }
    Ok(DualAlgebra { algebra: Arc::new(algebra), morphisms, source: x.clone() })
}

fn tuples(base: usize, s: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = base.pow(s as u32);
    (0..total).map(move |mut code| {
        let mut t = vec![0; s];
        for slot in t.iter_mut().rev() {
            *slot = code % base;
            code /= base;
        }
        t
    })
}

fn encode(t: &[usize], base: usize) -> usize {
    t.iter().fold(0, |acc, &c| acc * base + c)
}

/// `M̃^s`, formed sort by sort with everything lifted coordinatewise.
pub fn structure_power(ego: &AlterEgo, s: usize) -> Result<MultisortedStructure> {
    let base = &ego.structure;
    let sizes = base.sort_sizes();
    let points: Vec<Vec<Vec<usize>>> = sizes.iter().map(|&n| tuples(n, s).collect()).collect();
    let sorts = base
        .sorts
        .iter()
        .zip(&points)
        .map(|(sort, pts)| Sort {
            name: sort.name.clone(),
            points: pts
                .iter()
                .map(|t| {
                    let names: Vec<&str> = t.iter().map(|&c| sort.points[c].as_str()).collect();
                    if s == 1 {
                        names[0].to_string()
                    } else {
                        format!("({})", names.join(","))
                    }
                })
                .collect(),
        })
        .collect();
    let lift_op = |op: &StructOp| StructOp {
        map: points[op.src]
            .iter()
            .map(|t| {
                t.iter()
                    .map(|&c| op.map[c])
                    .collect::<Option<Vec<_>>>()
                    .map(|img| encode(&img, sizes[op.dst]))
            })
            .collect(),
        ..op.clone()
    };
    let consts = base
        .consts
        .iter()
        .map(|c| StructConst { point: encode(&vec![c.point; s], sizes[c.sort]), ..c.clone() })
        .collect();
    let rels = base
        .rels
        .iter()
        .map(|r| {
            let mut pairs = BTreeSet::new();
            for (i, x) in points[r.src].iter().enumerate() {
                for (j, y) in points[r.dst].iter().enumerate() {
                    if x.iter().zip(y).all(|(&a, &b)| r.pairs.contains(&(a, b))) {
                        pairs.insert((i, j));
                    }
                }
            }
            StructRel { pairs, ..r.clone() }
        })
        .collect();
    let power = MultisortedStructure {
        id: format!("{}^{s}", base.id),
        sorts,
        gops: base.gops.iter().map(lift_op).collect(),
        hops: base.hops.iter().map(lift_op).collect(),
        consts,
        rels,
    };
    power.validate()?;
    Ok(power)
}

/// `e_A: A -> ED(A)`.
#[derive(Clone, Debug)]
pub struct UnitReport {
    pub dual: DualStructure,
    pub double_dual: DualAlgebra,
    /// Image of each element of `A`; `None` when an evaluation is not a morphism.
    pub map: Vec<Option<Elem>>,
    pub iso: bool,
}

pub fn evaluation_unit(a: &Arc<FiniteAlgebra>, ego: &AlterEgo) -> Result<UnitReport> {
    let dual = dual_of_algebra(a, ego)?;
    let double_dual = dual_of_structure(&dual.structure, ego)?;
    let index = index_morphisms(&double_dual.morphisms);
    let map: Vec<Option<Elem>> = a
        .elements()
        .map(|e| {
            let eval: Vec<usize> = dual.homs.iter().flatten().map(|x| x.get(e).unwrap()).collect();
            index.get(&eval).copied()
        })
        .collect();
    let bijective = map.iter().all(Option::is_some)
        && map.iter().collect::<BTreeSet<_>>().len() == double_dual.algebra.size()
        && a.size() == double_dual.algebra.size();
    let iso = bijective && is_partial_hom(a, &double_dual.algebra, &map);
    Ok(UnitReport { dual, double_dual, map, iso })
}

/// `ε_X: X -> DE(X)`.
#[derive(Clone, Debug)]
pub struct CounitReport {
    pub algebra: DualAlgebra,
    pub dual: DualStructure,
    pub morphism: MultisortedMorphism,
    pub iso: bool,
}

pub fn evaluation_counit_of(x: &MultisortedStructure, ego: &AlterEgo) -> Result<CounitReport> {
    let algebra = dual_of_structure(x, ego)?;
    let dual = dual_of_algebra(&algebra.algebra, ego)?;
    let off = x.offsets();
    let mut maps = Vec::with_capacity(x.sorts.len());
    for (i, sort) in x.sorts.iter().enumerate() {
        let mut m = Vec::with_capacity(sort.len());
        for p in 0..sort.len() {
            let eval: Vec<Option<Elem>> = algebra.morphisms.iter().map(|phi| Some(phi[off[i] + p])).collect();
            let point = dual.homs[i]
                .iter()
                .position(|h| h.assignment() == eval.as_slice())
                .ok_or_else(|| Error::MalformedStructure(format!("evaluation at a point of `{}` is not a hom", x.id)))?;
            m.push(point);
        }
        maps.push(m);
    }
    let morphism = MultisortedMorphism { src_id: x.id.clone(), dst_id: dual.structure.id.clone(), maps };
    let iso = morphism.is_isomorphism(x, &dual.structure);
    Ok(CounitReport { algebra, dual, morphism, iso })
}

/// `ε_{D(A)}`.
pub fn evaluation_counit(a: &Arc<FiniteAlgebra>, ego: &AlterEgo) -> Result<CounitReport> {
    let d = dual_of_algebra(a, ego)?;
    evaluation_counit_of(&d.structure, ego)
}

fn power_points(ego: &AlterEgo, s: usize) -> usize {
    ego.sorts.iter().map(|m| m.size().saturating_pow(s as u32)).sum()
}

fn guard(what: &str, needed: usize, limit: usize) -> Result<()> {
    if needed > limit {
        return Err(Error::SizeGuard { what: what.to_string(), needed, limit });
    }
    Ok(())
}

/// `E(M̃^s)`, with `guard_size` bounding the total number of points of the power.
pub fn free_algebra(ego: &AlterEgo, s: usize, guard_size: usize) -> Result<DualAlgebra> {
    if s == 0 && !ego.sorts[0].signature().has_constants() {
        return Err(Error::NeedsSeed(ego.sorts[0].id().to_string()));
    }
    guard("power of the alter ego", power_points(ego, s), guard_size)?;
    let power = structure_power(ego, s)?;
    dual_of_structure(&power, ego)
}

/// Largest subalgebra the oracle is allowed to grow before giving up.
pub const ORACLE_ELEMENT_LIMIT: usize = 200_000;

/// The subalgebra of `∏_i M_i^{M_i^s}` generated by the `s` projections.
/// Elements are listed in lexicographic order of their coordinate vectors.
pub fn free_algebra_oracle(sorts: &[Arc<FiniteAlgebra>], s: usize, guard_size: usize) -> Result<Arc<FiniteAlgebra>> {
    let first = sorts
        .first()
        .ok_or_else(|| Error::InvalidParameter("no sort algebras given".into()))?;
    let signature = first.signature().clone();
    if sorts.iter().any(|m| m.signature() != &signature) {
        return Err(Error::SignatureMismatch(first.id().into(), "sort algebras".into()));
    }
    let coords: Vec<(usize, Vec<usize>)> = sorts
        .iter()
        .enumerate()
        .flat_map(|(i, m)| tuples(m.size(), s).map(move |t| (i, t)))
        .collect();
    guard("coordinates of the free-algebra oracle", coords.len(), guard_size)?;
    let mut seed: Vec<Vec<Elem>> = (0..s)
        .map(|k| coords.iter().map(|(_, t)| t[k]).collect())
        .collect();
    for sym in signature.symbols().iter().filter(|sym| sym.arity() == 0) {
        seed.push(coords.iter().map(|(i, _)| sorts[*i].constant(*sym).unwrap()).collect());
    }
    if seed.is_empty() {
        return Err(Error::NeedsSeed(first.id().to_string()));
    }
    let apply = |sym: OpSymbol, args: &[&Vec<Elem>]| -> Vec<Elem> {
        coords
            .iter()
            .enumerate()
            .map(|(c, (i, _))| {
                let alg = &sorts[*i];
                let xs: Vec<Elem> = args.iter().map(|v| v[c]).collect();
                alg.apply(alg.op(sym).unwrap(), &xs)
            })
            .collect()
    };
    let mut elems: Vec<Vec<Elem>> = Vec::new();
    let mut seen: HashMap<Vec<Elem>, usize> = HashMap::new();
    for v in seed {
        if !seen.contains_key(&v) {
            seen.insert(v.clone(), elems.len());
            elems.push(v);
        }
    }
    let unary: Vec<OpSymbol> = signature.symbols().iter().copied().filter(|s| s.arity() == 1).collect();
    let binary: Vec<OpSymbol> = signature.symbols().iter().copied().filter(|s| s.arity() == 2).collect();
    let mut next = 0;
    while next < elems.len() {
        let mut fresh = Vec::new();
        for &sym in &unary {
            fresh.push(apply(sym, &[&elems[next]]));
        }
        for j in 0..=next {
            for &sym in &binary {
                fresh.push(apply(sym, &[&elems[next], &elems[j]]));
                fresh.push(apply(sym, &[&elems[j], &elems[next]]));
            }
        }
        for v in fresh {
            if !seen.contains_key(&v) {
                seen.insert(v.clone(), elems.len());
                elems.push(v);
            }
        }
        guard("free-algebra oracle elements", elems.len(), ORACLE_ELEMENT_LIMIT)?;
        next += 1;
    }
    elems.sort();
    let index: HashMap<&Vec<Elem>, usize> = elems.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let algebra = FiniteAlgebra::from_fn(
        format!("F({s})"),
        signature,
        (0..elems.len() as i64).collect(),
        None,
        |sym, args| {
            let refs: Vec<&Vec<Elem>> = args.iter().map(|&a| &elems[a]).collect();
            index[&apply(sym, &refs)]
        },
    )?;
    Ok(Arc::new(algebra))
}

/// `D(f) = − ∘ f`, a morphism `D(B) -> D(A)` for a total hom `f: A -> B`.
pub fn dual_morphism(f: &PartialMap, da: &DualStructure, db: &DualStructure) -> Result<MultisortedMorphism> {
    check_total_hom(f)?;
    let maps = db
        .homs
        .iter()
        .enumerate()
        .map(|(i, hs)| {
            hs.iter()
                .map(|x| {
                    let y = compose(x, f)?;
                    da.point_of(i, &y).ok_or_else(|| {
                        Error::MalformedStructure(format!("`{}` is missing a composite", da.structure.id))
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MultisortedMorphism { src_id: db.structure.id.clone(), dst_id: da.structure.id.clone(), maps })
}

/// `E(φ) = − ∘ φ`, a hom `E(Y) -> E(X)` for a morphism `φ: X -> Y`.
pub fn dual_of_morphism(phi: &MultisortedMorphism, ex: &DualAlgebra, ey: &DualAlgebra) -> Result<PartialMap> {
    let off_y = ey.source.offsets();
    let index = index_morphisms(&ex.morphisms);
    let assignment = ey
        .morphisms
        .iter()
        .map(|alpha| {
            let pulled: Vec<usize> = phi
                .maps
                .iter()
                .enumerate()
                .flat_map(|(i, m)| m.iter().map(move |&p| (i, p)))
                .map(|(i, p)| alpha[off_y[i] + p])
                .collect();
            index.get(&pulled).copied().map(Some).ok_or_else(|| {
                Error::MalformedStructure(format!("`{}` is missing a composite", ex.algebra.id()))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PartialMap::new(Arc::clone(&ey.algebra), Arc::clone(&ex.algebra), assignment)
}

fn check_total_hom(f: &PartialMap) -> Result<()> {
    if !f.is_total() || !is_partial_hom(f.src(), f.dst(), f.assignment()) {
        return Err(Error::NotHomomorphism(format!("{f} is not a total homomorphism")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongnessReport {
    pub injective: bool,
    pub surjective: bool,
    pub dual_is_morphism: bool,
    pub dual_surjective: bool,
    /// The image of `D(f)` generates `D(A)` under the total and partial operations.
    pub dual_image_generates: bool,
    pub dual_embedding: bool,
}

impl StrongnessReport {
    /// Injective `f` gives a sortwise surjective `D(f)`; surjective `f` gives an embedding.
    pub fn holds(&self) -> bool {
        self.dual_is_morphism
            && (!self.injective || self.dual_surjective)
            && (!self.surjective || self.dual_embedding)
    }

    /// As [`holds`](Self::holds), with sortwise surjectivity weakened to
    /// generation under the operations.
    pub fn holds_up_to_generation(&self) -> bool {
        self.dual_is_morphism
            && (!self.injective || self.dual_image_generates)
            && (!self.surjective || self.dual_embedding)
    }
}

pub fn check_strongness(f: &PartialMap, ego: &AlterEgo) -> Result<StrongnessReport> {
    check_total_hom(f)?;
    let da = dual_of_algebra(f.src(), ego)?;
    let db = dual_of_algebra(f.dst(), ego)?;
    let df = dual_morphism(f, &da, &db)?;
    Ok(StrongnessReport {
        injective: f.is_injective(),
        surjective: f.is_surjective(),
        dual_is_morphism: df.is_morphism(&db.structure, &da.structure),
        dual_surjective: df.is_surjective(&da.structure),
        dual_image_generates: da
            .structure
            .generated_by(&df.maps)
            .iter()
            .zip(da.structure.sort_sizes())
            .all(|(s, n)| s.len() == n),
        dual_embedding: df.is_embedding(&db.structure, &da.structure),
    })
}

/// Checks `ED(f) ∘ e_A = e_B ∘ f` for a total hom `f: A -> B`.
pub fn unit_is_natural(f: &PartialMap, ego: &AlterEgo) -> Result<bool> {
    let ua = evaluation_unit(f.src(), ego)?;
    let ub = evaluation_unit(f.dst(), ego)?;
    let df = dual_morphism(f, &ua.dual, &ub.dual)?;
    let edf = dual_of_morphism(&df, &ub.double_dual, &ua.double_dual)?;
    Ok(f.src().elements().all(|a| {
        let left = ua.map[a].and_then(|x| edf.get(x));
        let right = f.get(a).and_then(|b| ub.map[b]);
        left.is_some() && left == right
    }))
}

/// Per-sort unflattening of an element of `E(X)`.
pub fn morphism_of(e: &DualAlgebra, elem: Elem) -> MultisortedMorphism {
    MultisortedMorphism {
        src_id: e.source.id.clone(),
        dst_id: "ego".into(),
        maps: unflatten(&e.source, &e.morphisms[elem]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_sugihara_algebra, make_sugihara_monoid, product};
    use crate::hom::{are_isomorphic, subalgebras};

    fn arc(a: FiniteAlgebra) -> Arc<FiniteAlgebra> {
        Arc::new(a)
    }

    #[test]
    fn odd_alg_ego_shape() {
        let ego = AlterEgo::build(DualitySpec::OddAlg { m: 2 }).unwrap();
        let g: Vec<&str> = ego.gops.iter().map(|m| m.name.as_str()).collect();
        let h: Vec<&str> = ego.hops.iter().map(|m| m.name.as_str()).collect();
        assert_eq!(g, ["g", "id-+", "id+-"]);
        assert_eq!(h, ["f0", "f1"]);
        assert_eq!(ego.consts.len(), 1);
        assert_eq!(ego.structure.sort_sizes(), [3, 3]);
    }

    #[test]
    fn kleene_ego_relations_are_subalgebras() {
        let ego = AlterEgo::build(DualitySpec::KleeneAlg).unwrap();
        assert_eq!(ego.rels.len(), 4);
        assert!(ego.consts.is_empty());
        let lat = AlterEgo::build(DualitySpec::KleeneLat).unwrap();
        assert_eq!(lat.consts.len(), 1);
    }

    #[test]
    fn dual_sort_sizes_match_hom_counts() {
        let ego = AlterEgo::build(DualitySpec::OddAlg { m: 2 }).unwrap();
        let z3 = arc(make_sugihara_algebra(3).unwrap());
        let d = dual_of_algebra(&z3, &ego).unwrap();
        assert_eq!(d.structure.sort_sizes(), [2, 2]);
    }

    #[test]
    fn trivial_algebra_dual_under_even_alg() {
        let ego = AlterEgo::build(DualitySpec::EvenAlg { m: 2 }).unwrap();
        let one = arc(make_sugihara_algebra(1).unwrap());
        let d = dual_of_algebra(&one, &ego).unwrap();
        assert_eq!(d.structure.sort_sizes(), [1, 1, 0]);
        assert!(evaluation_unit(&one, &ego).unwrap().iso);
        assert!(evaluation_counit(&one, &ego).unwrap().iso);
    }

    #[test]
    fn empty_structure_gives_one_element_algebra() {
        // Needs an ego without constants: a constant forces a point.
        let ego = AlterEgo::build(DualitySpec::KleeneAlg).unwrap();
        let empty = ego.structure.empty_like("empty");
        let e = dual_of_structure(&empty, &ego).unwrap();
        assert_eq!(e.algebra.size(), 1);
    }

    #[test]
    fn power_zero_and_one() {
        let ego = AlterEgo::build(DualitySpec::KleeneAlg).unwrap();
        assert_eq!(structure_power(&ego, 0).unwrap().sort_sizes(), [1, 1]);
        let one = structure_power(&ego, 1).unwrap();
        assert_eq!(one.sorts, ego.structure.sorts);
        assert_eq!(one.rels, ego.structure.rels);
        assert_eq!(structure_power(&ego, 2).unwrap().sort_sizes(), [9, 9]);
    }

    #[test]
    fn units_on_small_algebras() {
        let ego = AlterEgo::build(DualitySpec::OddAlg { m: 2 }).unwrap();
        let z3 = arc(make_sugihara_algebra(3).unwrap());
        assert!(evaluation_unit(&z3, &ego).unwrap().iso);
        assert!(evaluation_counit(&z3, &ego).unwrap().iso);
        let sq = arc(product(&z3, &z3).unwrap().algebra);
        for (sub, _) in subalgebras(&sq).unwrap() {
            assert!(evaluation_unit(&sub, &ego).unwrap().iso, "{}", sub.id());
        }
        let even = AlterEgo::build(DualitySpec::EvenMon { m: 2 }).unwrap();
        let w4 = arc(make_sugihara_monoid(4).unwrap());
        assert!(evaluation_unit(&w4, &even).unwrap().iso);
        assert!(evaluation_counit(&w4, &even).unwrap().iso);
    }

    #[test]
    fn kleene_free_algebras_agree_with_oracle() {
        let ego = AlterEgo::build(DualitySpec::KleeneAlg).unwrap();
        for (s, size) in [(0, 2), (1, 6)] {
            let f = free_algebra(&ego, s, 1000).unwrap();
            let o = free_algebra_oracle(&ego.sorts, s, 1000).unwrap();
            assert_eq!(f.algebra.size(), size);
            assert!(are_isomorphic(&f.algebra, &o).unwrap());
        }
    }

    #[test]
    fn size_guard_trips() {
        let ego = AlterEgo::build(DualitySpec::KleeneAlg).unwrap();
        assert!(matches!(free_algebra(&ego, 3, 10), Err(Error::SizeGuard { .. })));
        assert!(matches!(free_algebra_oracle(&ego.sorts, 3, 10), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("odd-alg:3".parse::<DualitySpec>().unwrap(), DualitySpec::OddAlg { m: 3 });
        assert_eq!("kleene".parse::<DualitySpec>().unwrap(), DualitySpec::KleeneAlg);
        assert!("odd".parse::<DualitySpec>().is_err());
        assert!(AlterEgo::build(DualitySpec::OddAlg { m: 1 }).is_err());
    }
}
