//! Finite multisorted structures and the morphisms between them.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sort {
    pub name: String,
    pub points: Vec<String>,
}

impl Sort {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A unary operation between sorts. Total when every entry of `map` is `Some`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructOp {
    pub name: String,
    pub src: usize,
    pub dst: usize,
    pub map: Vec<Option<usize>>,
}

impl StructOp {
    pub fn is_total(&self) -> bool {
        self.map.iter().all(Option::is_some)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructConst {
    pub name: String,
    pub sort: usize,
    pub point: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructRel {
    pub name: String,
    pub src: usize,
    pub dst: usize,
    pub pairs: BTreeSet<(usize, usize)>,
}

/// Named finite sorts carrying total operations, partial operations,
/// constants and binary relations, all typed by sort index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultisortedStructure {
    pub id: String,
    pub sorts: Vec<Sort>,
    pub gops: Vec<StructOp>,
    pub hops: Vec<StructOp>,
    pub consts: Vec<StructConst>,
    pub rels: Vec<StructRel>,
}

impl MultisortedStructure {
    /// Checks that every item is typed by existing sorts and stays inside them.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::MalformedStructure(format!("`{}`: {what}", self.id)));
        let n = self.sorts.len();
        for (kind, ops) in [("operation", &self.gops), ("partial operation", &self.hops)] {
            for op in ops {
                if op.src >= n || op.dst >= n {
                    return bad(format!("{kind} `{}` names a missing sort", op.name));
                }
                if op.map.len() != self.sorts[op.src].len() {
                    return bad(format!("{kind} `{}` has the wrong arity", op.name));
                }
                if op.map.iter().flatten().any(|&y| y >= self.sorts[op.dst].len()) {
                    return bad(format!("{kind} `{}` leaves its target sort", op.name));
                }
            }
        }
        if let Some(op) = self.gops.iter().find(|op| !op.is_total()) {
            return bad(format!("operation `{}` is not total", op.name));
        }
        for c in &self.consts {
            if c.sort >= n || c.point >= self.sorts[c.sort].len() {
                return bad(format!("constant `{}` is out of range", c.name));
            }
        }
        for r in &self.rels {
            if r.src >= n || r.dst >= n {
                return bad(format!("relation `{}` names a missing sort", r.name));
            }
            if r
                .pairs
                .iter()
                .any(|&(a, b)| a >= self.sorts[r.src].len() || b >= self.sorts[r.dst].len())
            {
                return bad(format!("relation `{}` leaves its sorts", r.name));
            }
        }
        Ok(())
    }

    /// Same sort count and identically named and typed items.
    pub fn same_signature(&self, other: &MultisortedStructure) -> bool {
        let ops = |a: &[StructOp], b: &[StructOp]| {
            a.len() == b.len()
                && a.iter()
                    .zip(b)
                    .all(|(x, y)| x.name == y.name && x.src == y.src && x.dst == y.dst)
        };
        self.sorts.len() == other.sorts.len()
            && ops(&self.gops, &other.gops)
            && ops(&self.hops, &other.hops)
            && self.consts.len() == other.consts.len()
            && self
                .consts
                .iter()
                .zip(&other.consts)
                .all(|(x, y)| x.name == y.name && x.sort == y.sort)
            && self.rels.len() == other.rels.len()
            && self
                .rels
                .iter()
                .zip(&other.rels)
                .all(|(x, y)| x.name == y.name && x.src == y.src && x.dst == y.dst)
    }

    pub fn sort_sizes(&self) -> Vec<usize> {
        self.sorts.iter().map(Sort::len).collect()
    }

    pub fn total_points(&self) -> usize {
        self.sorts.iter().map(Sort::len).sum()
    }

    /// Start of each sort in the flattened point numbering.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.sorts
            .iter()
            .map(|s| {
                let o = acc;
                acc += s.len();
                o
            })
            .collect()
    }

    pub fn sort_index(&self, name: &str) -> Option<usize> {
        self.sorts.iter().position(|s| s.name == name)
    }

    /// Smallest subset containing `seeds` (one point list per sort) and the
    /// constants, closed under every total and partial operation.
    pub fn generated_by(&self, seeds: &[Vec<usize>]) -> Vec<BTreeSet<usize>> {
        let mut sets: Vec<BTreeSet<usize>> = self
            .sorts
            .iter()
            .enumerate()
            .map(|(i, _)| seeds.get(i).map(|s| s.iter().copied().collect()).unwrap_or_default())
            .collect();
        for c in &self.consts {
            sets[c.sort].insert(c.point);
        }
        let mut changed = true;
        while changed {
            changed = false;
            for op in self.gops.iter().chain(&self.hops) {
                let imgs: Vec<usize> = sets[op.src].iter().filter_map(|&p| op.map[p]).collect();
                for q in imgs {
                    changed |= sets[op.dst].insert(q);
                }
            }
        }
        sets
    }

    /// Structure with the same signature and no points.
    pub fn empty_like(&self, id: impl Into<String>) -> MultisortedStructure {
        MultisortedStructure {
            id: id.into(),
            sorts: self
                .sorts
                .iter()
                .map(|s| Sort { name: s.name.clone(), points: Vec::new() })
                .collect(),
            gops: self
                .gops
                .iter()
                .map(|op| StructOp { map: Vec::new(), ..op.clone() })
                .collect(),
            hops: self
                .hops
                .iter()
                .map(|op| StructOp { map: Vec::new(), ..op.clone() })
                .collect(),
            consts: Vec::new(),
            rels: self
                .rels
                .iter()
                .map(|r| StructRel { pairs: BTreeSet::new(), ..r.clone() })
                .collect(),
        }
    }
}

/// A sort-preserving map, one point map per sort.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultisortedMorphism {
    pub src_id: String,
    pub dst_id: String,
    pub maps: Vec<Vec<usize>>,
}

impl MultisortedMorphism {
    pub fn identity(x: &MultisortedStructure) -> Self {
        MultisortedMorphism {
            src_id: x.id.clone(),
            dst_id: x.id.clone(),
            maps: x.sorts.iter().map(|s| (0..s.len()).collect()).collect(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MultisortedMorphism) -> Result<MultisortedMorphism> {
        if other.dst_id != self.src_id || self.maps.len() != other.maps.len() {
            return Err(Error::TypeMismatch(format!(
                "cannot follow a morphism into `{}` by one out of `{}`",
                other.dst_id, self.src_id
            )));
        }
        Ok(MultisortedMorphism {
            src_id: other.src_id.clone(),
            dst_id: self.dst_id.clone(),
            maps: other
                .maps
                .iter()
                .zip(&self.maps)
                .map(|(inner, outer)| inner.iter().map(|&x| outer[x]).collect())
                .collect(),
        })
    }

    fn fits(&self, x: &MultisortedStructure, y: &MultisortedStructure) -> bool {
        x.same_signature(y)
            && self.maps.len() == x.sorts.len()
            && self
                .maps
                .iter()
                .zip(x.sorts.iter().zip(&y.sorts))
                .all(|(m, (sx, sy))| m.len() == sx.len() && m.iter().all(|&p| p < sy.len()))
    }

    /// Preserves every operation, partial operation (with domains), constant and relation.
    pub fn is_morphism(&self, x: &MultisortedStructure, y: &MultisortedStructure) -> bool {
        if !self.fits(x, y) {
            return false;
        }
        let phi = &self.maps;
        let ops_ok = x.gops.iter().zip(&y.gops).chain(x.hops.iter().zip(&y.hops)).all(|(ox, oy)| {
            ox.map.iter().enumerate().all(|(p, img)| match img {
                None => true,
                Some(q) => oy.map[phi[ox.src][p]] == Some(phi[ox.dst][*q]),
            })
        });
        let consts_ok = x
            .consts
            .iter()
            .zip(&y.consts)
            .all(|(cx, cy)| phi[cx.sort][cx.point] == cy.point);
        let rels_ok = x.rels.iter().zip(&y.rels).all(|(rx, ry)| {
            rx.pairs
                .iter()
                .all(|&(a, b)| ry.pairs.contains(&(phi[rx.src][a], phi[rx.dst][b])))
        });
        ops_ok && consts_ok && rels_ok
    }

    pub fn is_injective(&self) -> bool {
        self.maps.iter().all(|m| {
            let mut seen = std::collections::HashSet::new();
            m.iter().all(|p| seen.insert(*p))
        })
    }

    pub fn is_surjective(&self, y: &MultisortedStructure) -> bool {
        self.maps
            .iter()
            .zip(&y.sorts)
            .all(|(m, s)| m.iter().collect::<BTreeSet<_>>().len() == s.len())
    }

    /// Injective morphism that also reflects partial-operation domains and relations.
    pub fn is_embedding(&self, x: &MultisortedStructure, y: &MultisortedStructure) -> bool {
        if !self.is_morphism(x, y) || !self.is_injective() {
            return false;
        }
        let phi = &self.maps;
        let domains_reflected = x.hops.iter().zip(&y.hops).all(|(ox, oy)| {
            ox.map
                .iter()
                .enumerate()
                .all(|(p, img)| img.is_some() || oy.map[phi[ox.src][p]].is_none())
        });
        let rels_reflected = x.rels.iter().zip(&y.rels).all(|(rx, ry)| {
            (0..x.sorts[rx.src].len()).all(|a| {
                (0..x.sorts[rx.dst].len()).all(|b| {
                    rx.pairs.contains(&(a, b)) || !ry.pairs.contains(&(phi[rx.src][a], phi[rx.dst][b]))
                })
            })
        });
        domains_reflected && rels_reflected
    }

    pub fn is_isomorphism(&self, x: &MultisortedStructure, y: &MultisortedStructure) -> bool {
        self.is_embedding(x, y) && self.is_surjective(y)
    }
}

/// Binary constraint between two flattened points: `allowed[v]` is the set
/// of admissible values of `b` when `a` takes value `v`.
struct Constraint {
    a: usize,
    b: usize,
    allowed: Vec<u64>,
}

fn mask_of(values: impl IntoIterator<Item = usize>) -> u64 {
    values.into_iter().fold(0, |m, v| m | 1 << v)
}

/// Every morphism `x -> y`, each flattened over the points of `x` in sort
/// order and listed lexicographically.
///
/// Target sorts are limited to 64 points; the search keeps one bitmask
/// domain per source point.
pub fn enumerate_morphisms(x: &MultisortedStructure, y: &MultisortedStructure) -> Result<Vec<Vec<usize>>> {
    if !x.same_signature(y) {
        return Err(Error::MalformedStructure(format!(
            "`{}` and `{}` have different signatures",
            x.id, y.id
        )));
    }
    if let Some(s) = y.sorts.iter().find(|s| s.len() > 64) {
        return Err(Error::SizeGuard {
            what: format!("target sort `{}`", s.name),
            needed: s.len(),
            limit: 64,
        });
    }
    let off = x.offsets();
    let n = x.total_points();
    let mut domains: Vec<u64> = Vec::with_capacity(n);
    for (si, s) in x.sorts.iter().enumerate() {
        let full = mask_of(0..y.sorts[si].len());
        domains.extend(std::iter::repeat_n(full, s.len()));
    }
    let mut constraints = Vec::new();
    for (ox, oy) in x.gops.iter().zip(&y.gops).chain(x.hops.iter().zip(&y.hops)) {
        let allowed: Vec<u64> = oy.map.iter().map(|img| img.map_or(0, |q| 1 << q)).collect();
        let in_domain = mask_of(oy.map.iter().enumerate().filter(|(_, i)| i.is_some()).map(|(v, _)| v));
        for (p, img) in ox.map.iter().enumerate() {
            if let Some(q) = img {
                domains[off[ox.src] + p] &= in_domain;
                constraints.push(Constraint { a: off[ox.src] + p, b: off[ox.dst] + q, allowed: allowed.clone() });
            }
        }
    }
    for (cx, cy) in x.consts.iter().zip(&y.consts) {
        domains[off[cx.sort] + cx.point] &= 1 << cy.point;
    }
    for (rx, ry) in x.rels.iter().zip(&y.rels) {
        let mut allowed = vec![0u64; y.sorts[ry.src].len()];
        for &(v, w) in &ry.pairs {
            allowed[v] |= 1 << w;
        }
        for &(a, b) in &rx.pairs {
            constraints.push(Constraint { a: off[rx.src] + a, b: off[rx.dst] + b, allowed: allowed.clone() });
        }
    }

    let mut out = Vec::new();
    if propagate(&mut domains, &constraints) {
        search(domains, &constraints, &mut out);
    }
    out.sort();
    Ok(out)
}

fn propagate(domains: &mut [u64], constraints: &[Constraint]) -> bool {
    loop {
        let mut changed = false;
        for c in constraints {
            let (da, db) = (domains[c.a], domains[c.b]);
            let mut support = 0u64;
            let mut keep_a = 0u64;
            let mut rest = da;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let ok = c.allowed[v] & db;
                if ok != 0 {
                    keep_a |= 1 << v;
                    support |= ok;
                }
            }
            if keep_a == 0 {
                return false;
            }
            if keep_a != da || support != db {
                changed = true;
                domains[c.a] = keep_a;
                domains[c.b] = support;
            }
        }
        if !changed {
            return true;
        }
    }
}

fn search(domains: Vec<u64>, constraints: &[Constraint], out: &mut Vec<Vec<usize>>) {
    let pick = domains
        .iter()
        .enumerate()
        .filter(|(_, d)| d.count_ones() > 1)
        .min_by_key(|(_, d)| d.count_ones())
        .map(|(i, _)| i);
    match pick {
        None => {
            if domains.iter().all(|&d| d != 0) {
                out.push(domains.iter().map(|d| d.trailing_zeros() as usize).collect());
            }
        }
        Some(i) => {
            let mut rest = domains[i];
            while rest != 0 {
                let v = rest.trailing_zeros();
                rest &= rest - 1;
                let mut next = domains.clone();
                next[i] = 1 << v;
                if propagate(&mut next, constraints) {
                    search(next, constraints, out);
                }
            }
        }
    }
}

/// Splits a flattened morphism into per-sort maps.
pub fn unflatten(x: &MultisortedStructure, flat: &[usize]) -> Vec<Vec<usize>> {
    let off = x.offsets();
    x.sorts
        .iter()
        .enumerate()
        .map(|(i, s)| flat[off[i]..off[i] + s.len()].to_vec())
        .collect()
}

/// Index of every flattened morphism, for lookups.
pub(crate) fn index_morphisms(list: &[Vec<usize>]) -> HashMap<Vec<usize>, usize> {
    list.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two-sort structure: a 3-chain order on sort 0 and a total map sort 0 -> sort 1.
    fn sample() -> MultisortedStructure {
        MultisortedStructure {
            id: "X".into(),
            sorts: vec![
                Sort { name: "a".into(), points: vec!["0".into(), "1".into(), "2".into()] },
                Sort { name: "b".into(), points: vec!["p".into(), "q".into()] },
            ],
            gops: vec![StructOp { name: "f".into(), src: 0, dst: 1, map: vec![Some(0), Some(0), Some(1)] }],
            hops: vec![],
            consts: vec![],
            rels: vec![StructRel {
                name: "le".into(),
                src: 0,
                dst: 0,
                pairs: [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)].into_iter().collect(),
            }],
        }
    }

    /// Brute force over all sort-preserving maps.
    fn brute(x: &MultisortedStructure, y: &MultisortedStructure) -> Vec<Vec<usize>> {
        let sizes: Vec<usize> = x
            .sorts
            .iter()
            .enumerate()
            .flat_map(|(i, s)| std::iter::repeat_n(y.sorts[i].len(), s.len()))
            .collect();
        let total: usize = sizes.iter().product();
        let mut out = Vec::new();
        for mut code in 0..total {
            let flat: Vec<usize> = sizes
                .iter()
                .map(|&r| {
                    let v = code % r;
                    code /= r;
                    v
                })
                .collect();
            let m = MultisortedMorphism { src_id: x.id.clone(), dst_id: y.id.clone(), maps: unflatten(x, &flat) };
            if m.is_morphism(x, y) {
                out.push(flat);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn search_matches_brute_force() {
        let x = sample();
        assert_eq!(enumerate_morphisms(&x, &x).unwrap(), brute(&x, &x));
        assert_eq!(enumerate_morphisms(&x, &x).unwrap().len(), brute(&x, &x).len());
    }

    #[test]
    fn empty_source_has_one_morphism() {
        let x = sample();
        let e = x.empty_like("empty");
        e.validate().unwrap();
        assert_eq!(enumerate_morphisms(&e, &x).unwrap(), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn identity_is_an_isomorphism() {
        let x = sample();
        let id = MultisortedMorphism::identity(&x);
        assert!(id.is_isomorphism(&x, &x));
        assert_eq!(id.compose(&id).unwrap(), id);
    }

    #[test]
    fn validation_catches_bad_types() {
        let mut x = sample();
        x.gops[0].dst = 5;
        assert!(x.validate().is_err());
    }
}
