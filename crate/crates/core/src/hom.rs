//! Subuniverses, congruences and (partial) homomorphisms between finite algebras.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// A homomorphism from a subuniverse of `src` into `dst`.
///
/// `assignment[x]` is `Some(y)` exactly on the domain. Maps compare by the
/// ids of their end algebras and then by assignment, so copies of one algebra
/// under different ids give different maps.
#[derive(Clone)]
pub struct PartialMap {
    src: Arc<FiniteAlgebra>,
    dst: Arc<FiniteAlgebra>,
    assignment: Vec<Option<Elem>>,
}

impl PartialMap {
    /// Validated constructor; fails unless the domain is a subuniverse and
    /// every operation is preserved on it.
    pub fn new(
        src: Arc<FiniteAlgebra>,
        dst: Arc<FiniteAlgebra>,
        assignment: Vec<Option<Elem>>,
    ) -> Result<Self> {
        if src.signature() != dst.signature() {
            return Err(Error::SignatureMismatch(src.id().into(), dst.id().into()));
        }
        if assignment.len() != src.size() || assignment.iter().flatten().any(|&y| y >= dst.size()) {
            return Err(Error::NotHomomorphism(format!(
                "assignment does not fit `{}` -> `{}`",
                src.id(),
                dst.id()
            )));
        }
        if let Some(why) = hom_violation(&src, &dst, &assignment) {
            return Err(Error::NotHomomorphism(format!(
                "`{}` -> `{}`: {why}",
                src.id(),
                dst.id()
            )));
        }
        Ok(PartialMap { src, dst, assignment })
    }

    pub(crate) fn new_unchecked(
        src: Arc<FiniteAlgebra>,
        dst: Arc<FiniteAlgebra>,
        assignment: Vec<Option<Elem>>,
    ) -> Self {
        debug_assert!(hom_violation(&src, &dst, &assignment).is_none());
        PartialMap { src, dst, assignment }
    }

    /// Builds a map from `(source label, target label)` pairs.
    pub fn from_label_pairs(
        src: Arc<FiniteAlgebra>,
        dst: Arc<FiniteAlgebra>,
        pairs: &[(i64, i64)],
    ) -> Result<Self> {
        let mut assignment = vec![None; src.size()];
        for &(x, y) in pairs {
            let (x, y) = (src.elem(x)?, dst.elem(y)?);
            if assignment[x].is_some_and(|old| old != y) {
                return Err(Error::NotHomomorphism(format!(
                    "{} is sent to two values",
                    src.label(x)
                )));
            }
            assignment[x] = Some(y);
        }
        PartialMap::new(src, dst, assignment)
    }

    /// Builds a map from a label function; `None` leaves the point out of the domain.
    pub fn from_label_fn(
        src: Arc<FiniteAlgebra>,
        dst: Arc<FiniteAlgebra>,
        f: impl Fn(i64) -> Option<i64>,
    ) -> Result<Self> {
        let pairs: Vec<(i64, i64)> = src
            .labels()
            .iter()
            .filter_map(|&x| f(x).map(|y| (x, y)))
            .collect();
        PartialMap::from_label_pairs(src, dst, &pairs)
    }

    pub fn identity(alg: &Arc<FiniteAlgebra>) -> Self {
        PartialMap {
            src: alg.clone(),
            dst: alg.clone(),
            assignment: alg.elements().map(Some).collect(),
        }
    }

    /// The map with empty domain. It is a partial homomorphism only over a
    /// constant-free signature.
    pub fn empty(src: &Arc<FiniteAlgebra>, dst: &Arc<FiniteAlgebra>) -> Self {
        PartialMap {
            src: src.clone(),
            dst: dst.clone(),
            assignment: vec![None; src.size()],
        }
    }

    pub fn src(&self) -> &Arc<FiniteAlgebra> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<FiniteAlgebra> {
        &self.dst
    }

    pub fn assignment(&self) -> &[Option<Elem>] {
        &self.assignment
    }

    pub fn get(&self, x: Elem) -> Option<Elem> {
        self.assignment[x]
    }

    /// Label-level application.
    pub fn apply_label(&self, x: i64) -> Option<i64> {
        let x = self.src.index_of(x)?;
        self.assignment[x].map(|y| self.dst.label(y))
    }

    pub fn domain(&self) -> Vec<Elem> {
        self.src.elements().filter(|&x| self.assignment[x].is_some()).collect()
    }

    pub fn domain_set(&self) -> BitSet {
        BitSet::from_iter(self.src.size(), self.domain())
    }

    pub fn image(&self) -> Vec<Elem> {
        let set: BTreeSet<Elem> = self.assignment.iter().flatten().copied().collect();
        set.into_iter().collect()
    }

    pub fn is_total(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.iter().all(Option::is_none)
    }

    pub fn is_injective(&self) -> bool {
        let img: HashSet<Elem> = self.assignment.iter().flatten().copied().collect();
        img.len() == self.domain().len()
    }

    pub fn is_surjective(&self) -> bool {
        self.image().len() == self.dst.size()
    }

    pub fn domain_contains_label(&self, label: i64) -> bool {
        self.src
            .index_of(label)
            .is_some_and(|x| self.assignment[x].is_some())
    }

    pub fn image_contains_label(&self, label: i64) -> bool {
        self.dst
            .index_of(label)
            .is_some_and(|y| self.assignment.contains(&Some(y)))
    }

    /// `(x, p(x))` as labels, in domain order.
    pub fn label_pairs(&self) -> Vec<(i64, i64)> {
        self.src
            .elements()
            .filter_map(|x| self.assignment[x].map(|y| (self.src.label(x), self.dst.label(y))))
            .collect()
    }

    /// Restriction to a subuniverse contained in the domain.
    pub fn restrict(&self, subset: &BitSet) -> Result<PartialMap> {
        let assignment: Vec<Option<Elem>> = self
            .src
            .elements()
            .map(|x| if subset.contains(x) { self.assignment[x] } else { None })
            .collect();
        if subset.iter().any(|x| self.assignment[x].is_none()) {
            return Err(Error::InvalidParameter(
                "restriction outside the domain".into(),
            ));
        }
        PartialMap::new(self.src.clone(), self.dst.clone(), assignment)
    }

    /// The same underlying label map between other copies of the end algebras.
    pub fn retyped(&self, src: &Arc<FiniteAlgebra>, dst: &Arc<FiniteAlgebra>) -> Result<PartialMap> {
        PartialMap::from_label_pairs(src.clone(), dst.clone(), &self.label_pairs())
    }

    pub fn graph(&self) -> Relation {
        Relation {
            src: self.src.clone(),
            dst: self.dst.clone(),
            pairs: self
                .src
                .elements()
                .filter_map(|x| self.assignment[x].map(|y| (x, y)))
                .collect(),
        }
    }

    fn key(&self) -> (&str, &str, &[Option<Elem>]) {
        (self.src.id(), self.dst.id(), &self.assignment)
    }
}

impl PartialEq for PartialMap {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for PartialMap {}

impl Hash for PartialMap {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for PartialMap {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PartialMap {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Debug for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{} {{", self.src.id(), self.dst.id())?;
        let parts: Vec<String> = self
            .src
            .elements()
            .filter_map(|x| {
                self.assignment[x].map(|y| format!("{}↦{}", self.src.name(x), self.dst.name(y)))
            })
            .collect();
        write!(f, "{}}}", parts.join(", "))
    }
}

/// Independent check that `assignment` is a partial homomorphism: the domain
/// contains the constants, is closed under every operation, and the map
/// commutes with every operation on it.
pub fn is_partial_hom(src: &FiniteAlgebra, dst: &FiniteAlgebra, assignment: &[Option<Elem>]) -> bool {
    src.signature() == dst.signature() && hom_violation(src, dst, assignment).is_none()
}

fn hom_violation(src: &FiniteAlgebra, dst: &FiniteAlgebra, assignment: &[Option<Elem>]) -> Option<String> {
    let n = src.size();
    for (op, dop) in src.ops().iter().zip(dst.ops()) {
        match op.symbol.arity() {
            0 => match assignment[op.table[0]] {
                Some(y) if y == dop.table[0] => {}
                Some(_) => return Some(format!("constant `{}` is moved", op.symbol)),
                None => return Some(format!("constant `{}` is outside the domain", op.symbol)),
            },
            1 => {
                for a in 0..n {
                    let Some(ya) = assignment[a] else { continue };
                    match assignment[op.table[a]] {
                        Some(y) if y == dop.table[ya] => {}
                        Some(_) => {
                            return Some(format!("`{}` is not preserved at {}", op.symbol, src.name(a)))
                        }
                        None => return Some("domain is not a subuniverse".into()),
                    }
                }
            }
            _ => {
                let dn = dst.size();
                for a in 0..n {
                    let Some(ya) = assignment[a] else { continue };
                    for b in 0..n {
                        let Some(yb) = assignment[b] else { continue };
                        match assignment[op.table[a * n + b]] {
                            Some(y) if y == dop.table[ya * dn + yb] => {}
                            Some(_) => {
                                return Some(format!(
                                    "`{}` is not preserved at ({}, {})",
                                    op.symbol,
                                    src.name(a),
                                    src.name(b)
                                ))
                            }
                            None => return Some("domain is not a subuniverse".into()),
                        }
                    }
                }
            }
        }
    }
    None
}

fn check_signatures(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<()> {
    if a.signature() != b.signature() {
        return Err(Error::SignatureMismatch(a.id().into(), b.id().into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Subuniverses

/// Least subuniverse containing `seed` and all constants.
pub(crate) fn closure_bits(alg: &FiniteAlgebra, seed: &BitSet) -> BitSet {
    let mut set = seed.clone();
    let mut members: Vec<Elem> = set.to_vec();
    for c in alg.constants() {
        if set.insert(c) {
            members.push(c);
        }
    }
    let n = alg.size();
    let mut next = 0;
    while next < members.len() {
        let e = members[next];
        next += 1;
        for op in alg.ops() {
            match op.symbol.arity() {
                1 => {
                    let r = op.table[e];
                    if set.insert(r) {
                        members.push(r);
                    }
                }
                2 => {
                    // `members` grows while we scan it; new entries get their turn as `e`.
                    let mut i = 0;
                    while i < next {
                        let f = members[i];
                        for r in [op.table[e * n + f], op.table[f * n + e]] {
                            if set.insert(r) {
                                members.push(r);
                            }
                        }
                        i += 1;
                    }
                }
                _ => {}
            }
        }
    }
    set
}

pub fn is_subuniverse(alg: &FiniteAlgebra, set: &BitSet) -> bool {
    closure_bits(alg, set) == *set
}

/// Least subuniverse containing `seed`, as a sorted element list.
pub fn subuniverse_closure(alg: &FiniteAlgebra, seed: &[Elem]) -> Result<Vec<Elem>> {
    if seed.is_empty() && !alg.signature().has_constants() {
        return Err(Error::NeedsSeed(alg.id().into()));
    }
    if let Some(&bad) = seed.iter().find(|&&x| x >= alg.size()) {
        return Err(Error::InvalidParameter(format!(
            "{bad} is not an element index of `{}`",
            alg.id()
        )));
    }
    Ok(closure_bits(alg, &BitSet::from_iter(alg.size(), seed.iter().copied())).to_vec())
}

/// Every nonempty subuniverse contained in `allowed`.
pub fn subuniverses_within(alg: &FiniteAlgebra, allowed: &BitSet) -> Vec<BitSet> {
    let n = alg.size();
    let mut seen: HashSet<BitSet> = HashSet::new();
    let mut queue: VecDeque<BitSet> = VecDeque::new();
    let mut found = Vec::new();
    let offer = |s: BitSet, seen: &mut HashSet<BitSet>, queue: &mut VecDeque<BitSet>, found: &mut Vec<BitSet>| {
        if !s.is_empty() && s.is_subset(allowed) && seen.insert(s.clone()) {
            found.push(s.clone());
            queue.push_back(s);
        }
    };
    if alg.signature().has_constants() {
        let base = closure_bits(alg, &BitSet::new(n));
        offer(base, &mut seen, &mut queue, &mut found);
    } else {
        for x in allowed.iter() {
            let s = closure_bits(alg, &BitSet::from_iter(n, [x]));
            offer(s, &mut seen, &mut queue, &mut found);
        }
    }
    while let Some(s) = queue.pop_front() {
        for x in allowed.iter() {
            if s.contains(x) {
                continue;
            }
            let mut t = s.clone();
            t.insert(x);
            let t = closure_bits(alg, &t);
            offer(t, &mut seen, &mut queue, &mut found);
        }
    }
    sort_canonically(&mut found);
    found
}

fn sort_canonically(sets: &mut [BitSet]) {
    sets.sort_by(|a, b| a.count().cmp(&b.count()).then_with(|| a.to_vec().cmp(&b.to_vec())));
}

/// All nonempty subuniverses, ordered by size and then lexicographically.
pub fn all_subuniverses(alg: &FiniteAlgebra) -> Vec<Vec<Elem>> {
    all_subuniverse_sets(alg).iter().map(BitSet::to_vec).collect()
}

pub(crate) fn all_subuniverse_sets(alg: &FiniteAlgebra) -> Vec<BitSet> {
    subuniverses_within(alg, &BitSet::full(alg.size()))
}

/// The subalgebras of `alg`, each with its inclusion map, ids suffixed by position.
pub fn subalgebras(alg: &Arc<FiniteAlgebra>) -> Result<Vec<(Arc<FiniteAlgebra>, PartialMap)>> {
    all_subuniverse_sets(alg)
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let (sub, members) = alg.restrict(&s.to_vec(), format!("{}.sub{i}", alg.id()))?;
            let sub = Arc::new(sub);
            let mut assignment = vec![None; sub.size()];
            for (local, &parent) in members.iter().enumerate() {
                assignment[local] = Some(parent);
            }
            let incl = PartialMap::new(sub.clone(), alg.clone(), assignment)?;
            Ok((sub, incl))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Homomorphism search

struct HomSearch<'a> {
    src: &'a FiniteAlgebra,
    dst: &'a FiniteAlgebra,
    domain: Vec<Elem>,
    generators: Vec<Elem>,
    candidates: Vec<Vec<Elem>>,
    injective: bool,
    first_only: bool,
    found: Vec<Vec<Option<Elem>>>,
}

impl<'a> HomSearch<'a> {
    /// `domain` must be a subuniverse of `src`.
    fn new(src: &'a FiniteAlgebra, domain: &BitSet, dst: &'a FiniteAlgebra) -> Self {
        // Branch only on a generating sequence; propagation fixes the rest.
        let mut reached = closure_bits(src, &BitSet::new(src.size()));
        let mut generators = Vec::new();
        for x in domain.iter() {
            if !reached.contains(x) {
                generators.push(x);
                reached.insert(x);
                reached = closure_bits(src, &reached);
            }
        }
        let all: Vec<Elem> = dst.elements().collect();
        HomSearch {
            src,
            dst,
            domain: domain.to_vec(),
            candidates: vec![all; generators.len()],
            generators,
            injective: false,
            first_only: false,
            found: Vec::new(),
        }
    }

    fn set(&self, assign: &mut [Option<Elem>], used: &mut BitSet, x: Elem, y: Elem, changed: &mut bool) -> bool {
        match assign[x] {
            Some(old) => old == y,
            None => {
                if self.injective && !used.insert(y) {
                    return false;
                }
                assign[x] = Some(y);
                *changed = true;
                true
            }
        }
    }

    fn propagate(&self, assign: &mut [Option<Elem>], used: &mut BitSet) -> bool {
        let n = self.src.size();
        let dn = self.dst.size();
        loop {
            let mut changed = false;
            for (op, dop) in self.src.ops().iter().zip(self.dst.ops()) {
                match op.symbol.arity() {
                    1 => {
                        for &a in &self.domain {
                            let Some(ya) = assign[a] else { continue };
                            if !self.set(assign, used, op.table[a], dop.table[ya], &mut changed) {
                                return false;
                            }
                        }
                    }
                    2 => {
                        for &a in &self.domain {
                            let Some(ya) = assign[a] else { continue };
                            for &b in &self.domain {
                                let Some(yb) = assign[b] else { continue };
                                let (r, v) = (op.table[a * n + b], dop.table[ya * dn + yb]);
                                if !self.set(assign, used, r, v, &mut changed) {
                                    return false;
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn run(mut self) -> Vec<Vec<Option<Elem>>> {
        let mut assign = vec![None; self.src.size()];
        let mut used = BitSet::new(self.dst.size());
        let mut changed = false;
        for (op, dop) in self.src.ops().iter().zip(self.dst.ops()) {
            if op.symbol.arity() == 0
                && !self.set(&mut assign, &mut used, op.table[0], dop.table[0], &mut changed)
            {
                return Vec::new();
            }
        }
        if self.propagate(&mut assign, &mut used) {
            self.descend(0, assign, used);
        }
        self.found.sort();
        self.found
    }

    fn descend(&mut self, k: usize, assign: Vec<Option<Elem>>, used: BitSet) {
        if self.first_only && !self.found.is_empty() {
            return;
        }
        if k == self.generators.len() {
            debug_assert!(self.domain.iter().all(|&x| assign[x].is_some()));
            self.found.push(assign);
            return;
        }
        let x = self.generators[k];
        if assign[x].is_some() {
            self.descend(k + 1, assign, used);
            return;
        }
        for i in 0..self.candidates[k].len() {
            let y = self.candidates[k][i];
            let mut next = assign.clone();
            let mut next_used = used.clone();
            let mut changed = false;
            if self.set(&mut next, &mut next_used, x, y, &mut changed)
                && self.propagate(&mut next, &mut next_used)
            {
                self.descend(k + 1, next, next_used);
            }
        }
    }
}

/// All total homomorphisms `a -> b`, canonically sorted.
pub fn homs(a: &Arc<FiniteAlgebra>, b: &Arc<FiniteAlgebra>) -> Result<Vec<PartialMap>> {
    homs_from(a, &BitSet::full(a.size()), b)
}

/// All homomorphisms from the subalgebra on `domain` into `b`, as partial maps on `a`.
pub fn homs_from(a: &Arc<FiniteAlgebra>, domain: &BitSet, b: &Arc<FiniteAlgebra>) -> Result<Vec<PartialMap>> {
    check_signatures(a, b)?;
    if !is_subuniverse(a, domain) {
        return Err(Error::InvalidParameter(format!(
            "domain is not a subuniverse of `{}`",
            a.id()
        )));
    }
    if domain.is_empty() {
        return Ok(vec![PartialMap::empty(a, b)]);
    }
    Ok(HomSearch::new(a, domain, b)
        .run()
        .into_iter()
        .map(|assignment| PartialMap::new_unchecked(a.clone(), b.clone(), assignment))
        .collect())
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PartialHomOptions {
    /// Drop maps defined on the whole source.
    pub non_total_only: bool,
    /// Add the empty map (only meaningful without constants).
    pub include_empty: bool,
}

/// Union of the hom sets from every nonempty subuniverse of `a` into `b`.
pub fn partial_homs(a: &Arc<FiniteAlgebra>, b: &Arc<FiniteAlgebra>) -> Result<Vec<PartialMap>> {
    partial_homs_with(a, b, PartialHomOptions::default())
}

pub fn partial_homs_with(
    a: &Arc<FiniteAlgebra>,
    b: &Arc<FiniteAlgebra>,
    opts: PartialHomOptions,
) -> Result<Vec<PartialMap>> {
    check_signatures(a, b)?;
    let mut out = Vec::new();
    if opts.include_empty && !a.signature().has_constants() {
        out.push(PartialMap::empty(a, b));
    }
    for s in all_subuniverse_sets(a) {
        if opts.non_total_only && s.count() == a.size() {
            continue;
        }
        out.extend(homs_from(a, &s, b)?);
    }
    out.sort();
    Ok(out)
}

fn element_invariants(alg: &FiniteAlgebra) -> Vec<(usize, usize, usize)> {
    alg.elements()
        .map(|x| {
            let gen = closure_bits(alg, &BitSet::from_iter(alg.size(), [x])).count();
            let below = alg.elements().filter(|&y| alg.leq(y, x)).count();
            let above = alg.elements().filter(|&y| alg.leq(x, y)).count();
            (gen, below, above)
        })
        .collect()
}

/// Some isomorphism `a -> b`, if one exists.
pub fn find_isomorphism(a: &Arc<FiniteAlgebra>, b: &Arc<FiniteAlgebra>) -> Result<Option<PartialMap>> {
    check_signatures(a, b)?;
    if a.size() != b.size() {
        return Ok(None);
    }
    let (ia, ib) = (element_invariants(a), element_invariants(b));
    let mut sorted_a = ia.clone();
    let mut sorted_b = ib.clone();
    sorted_a.sort_unstable();
    sorted_b.sort_unstable();
    if sorted_a != sorted_b {
        return Ok(None);
    }
    let mut search = HomSearch::new(a, &BitSet::full(a.size()), b);
    search.injective = true;
    search.first_only = true;
    search.candidates = search
        .generators
        .iter()
        .map(|&x| b.elements().filter(|&y| ib[y] == ia[x]).collect())
        .collect();
    Ok(search
        .run()
        .into_iter()
        .next()
        .map(|assignment| PartialMap::new_unchecked(a.clone(), b.clone(), assignment)))
}

pub fn are_isomorphic(a: &Arc<FiniteAlgebra>, b: &Arc<FiniteAlgebra>) -> Result<bool> {
    Ok(find_isomorphism(a, b)?.is_some())
}

/// Outcome of asking whether the homs `a -> b` separate the points of `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Separation {
    Separated { family: Vec<PartialMap> },
    /// There is no hom at all (and `a` has at least two points).
    EmptyHomSet,
    Unseparated { a: Elem, b: Elem },
}

impl Separation {
    pub fn holds(&self) -> bool {
        matches!(self, Separation::Separated { .. })
    }
}

pub fn separates(a: &Arc<FiniteAlgebra>, b: &Arc<FiniteAlgebra>) -> Result<Separation> {
    let family = homs(a, b)?;
    for x in a.elements() {
        for y in x + 1..a.size() {
            if !family.iter().any(|h| h.get(x) != h.get(y)) {
                if family.is_empty() {
                    return Ok(Separation::EmptyHomSet);
                }
                return Ok(Separation::Unseparated { a: x, b: y });
            }
        }
    }
    Ok(Separation::Separated { family })
}

/// Membership of `a` in the quasivariety generated by `generators`: the homs
/// into the generators jointly separate the points of `a`.
pub fn in_quasivariety(a: &Arc<FiniteAlgebra>, generators: &[Arc<FiniteAlgebra>]) -> Result<bool> {
    let mut family = Vec::new();
    for g in generators {
        family.extend(homs(a, g)?);
    }
    Ok(a.elements().all(|x| {
        (x + 1..a.size()).all(|y| family.iter().any(|h| h.get(x) != h.get(y)))
    }))
}

// ---------------------------------------------------------------------------
// Composition

/// `p ∘ q`: first `q`, then `p`.
pub fn compose(p: &PartialMap, q: &PartialMap) -> Result<PartialMap> {
    if q.dst.id() != p.src.id() || q.dst.size() != p.src.size() {
        return Err(Error::TypeMismatch(format!(
            "cannot follow a map into `{}` by a map out of `{}`",
            q.dst.id(),
            p.src.id()
        )));
    }
    let assignment = q
        .assignment
        .iter()
        .map(|&y| y.and_then(|y| p.assignment[y]))
        .collect();
    Ok(PartialMap::new_unchecked(q.src.clone(), p.dst.clone(), assignment))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ClosureOptions {
    /// Also close under restriction to subuniverses of each domain.
    pub allow_restriction: bool,
    /// Keep empty maps produced along the way.
    pub include_empty: bool,
}

/// Least set containing `gens` and the identities on `algebras` (and on every
/// end algebra of a generator) that is closed under composition.
pub fn closure_under_composition(
    gens: &[PartialMap],
    algebras: &[Arc<FiniteAlgebra>],
    opts: ClosureOptions,
) -> Vec<PartialMap> {
    let mut family: Vec<Arc<FiniteAlgebra>> = Vec::new();
    for alg in algebras
        .iter()
        .chain(gens.iter().flat_map(|g| [&g.src, &g.dst]))
    {
        if !family.iter().any(|a| a.id() == alg.id()) {
            family.push(alg.clone());
        }
    }
    let subuniverses: HashMap<String, Vec<BitSet>> = if opts.allow_restriction {
        family
            .iter()
            .map(|a| (a.id().to_string(), all_subuniverse_sets(a)))
            .collect()
    } else {
        HashMap::new()
    };

    let mut seen: HashSet<PartialMap> = HashSet::new();
    let mut list: Vec<PartialMap> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let add = |p: PartialMap, seen: &mut HashSet<PartialMap>, list: &mut Vec<PartialMap>, queue: &mut VecDeque<usize>| {
        if p.is_empty() && !opts.include_empty {
            return;
        }
        if seen.insert(p.clone()) {
            list.push(p);
            queue.push_back(list.len() - 1);
        }
    };
    for alg in &family {
        add(PartialMap::identity(alg), &mut seen, &mut list, &mut queue);
    }
    for g in gens {
        add(g.clone(), &mut seen, &mut list, &mut queue);
    }
    while let Some(i) = queue.pop_front() {
        let p = list[i].clone();
        let mut fresh = Vec::new();
        for q in &list {
            if let Ok(r) = compose(&p, q) {
                fresh.push(r);
            }
            if let Ok(r) = compose(q, &p) {
                fresh.push(r);
            }
        }
        if opts.allow_restriction {
            let dom = p.domain_set();
            for s in &subuniverses[p.src.id()] {
                if s.is_subset(&dom) && *s != dom {
                    fresh.push(p.restrict(s).expect("subuniverse inside the domain"));
                }
            }
            if opts.include_empty && !p.src.signature().has_constants() {
                fresh.push(PartialMap::empty(&p.src, &p.dst));
            }
        }
        for r in fresh {
            add(r, &mut seen, &mut list, &mut queue);
        }
    }
    list.sort();
    list
}

// ---------------------------------------------------------------------------
// Congruences

/// A partition of the carrier compatible with every operation.
///
/// Blocks are numbered by their least element, so equal partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    algebra_id: String,
    class_of: Vec<usize>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut x = x;
        while self.0[x] != r {
            let next = self.0[x];
            self.0[x] = r;
            x = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.0[hi] = lo;
        true
    }

    fn classes(&mut self) -> Vec<usize> {
        let n = self.0.len();
        let roots: Vec<usize> = (0..n).map(|x| self.find(x)).collect();
        canonical_classes(&roots)
    }
}

fn canonical_classes(raw: &[usize]) -> Vec<usize> {
    let mut ids: HashMap<usize, usize> = HashMap::new();
    raw.iter()
        .map(|r| {
            let next = ids.len();
            *ids.entry(*r).or_insert(next)
        })
        .collect()
}

/// Closes the pending merges of `uf` into a congruence.
fn close_congruence(alg: &FiniteAlgebra, uf: &mut UnionFind, mut pending: Vec<(Elem, Elem)>) {
    let n = alg.size();
    while let Some((a, b)) = pending.pop() {
        for op in alg.ops() {
            match op.symbol.arity() {
                1 => {
                    let (x, y) = (op.table[a], op.table[b]);
                    if uf.union(x, y) {
                        pending.push((x, y));
                    }
                }
                2 => {
                    for c in 0..n {
                        for (x, y) in [
                            (op.table[a * n + c], op.table[b * n + c]),
                            (op.table[c * n + a], op.table[c * n + b]),
                        ] {
                            if uf.union(x, y) {
                                pending.push((x, y));
                            }
                        }
                    }
                }
                _ => {}
            }
        }
    }
}

impl Congruence {
    pub fn identity(alg: &FiniteAlgebra) -> Self {
        Congruence {
            algebra_id: alg.id().into(),
            class_of: alg.elements().collect(),
        }
    }

    pub fn total(alg: &FiniteAlgebra) -> Self {
        Congruence {
            algebra_id: alg.id().into(),
            class_of: vec![0; alg.size()],
        }
    }

    /// Least congruence relating `a` and `b`.
    pub fn principal(alg: &FiniteAlgebra, a: Elem, b: Elem) -> Self {
        let mut uf = UnionFind::new(alg.size());
        if uf.union(a, b) {
            close_congruence(alg, &mut uf, vec![(a, b)]);
        }
        Congruence {
            algebra_id: alg.id().into(),
            class_of: uf.classes(),
        }
    }

    /// Validates a partition given by blocks; every element must occur exactly once.
    pub fn from_blocks(alg: &FiniteAlgebra, blocks: &[Vec<Elem>]) -> Result<Self> {
        let mut raw = vec![usize::MAX; alg.size()];
        for (i, block) in blocks.iter().enumerate() {
            for &x in block {
                if x >= alg.size() || raw[x] != usize::MAX {
                    return Err(Error::InvalidCongruence(alg.id().into()));
                }
                raw[x] = i;
            }
        }
        if raw.contains(&usize::MAX) {
            return Err(Error::InvalidCongruence(alg.id().into()));
        }
        let theta = Congruence {
            algebra_id: alg.id().into(),
            class_of: canonical_classes(&raw),
        };
        if !theta.is_compatible(alg) {
            return Err(Error::InvalidCongruence(alg.id().into()));
        }
        Ok(theta)
    }

    /// Convenience form of [`from_blocks`](Self::from_blocks) using labels.
    pub fn from_label_blocks(alg: &FiniteAlgebra, blocks: &[Vec<i64>]) -> Result<Self> {
        let mut covered = BitSet::new(alg.size());
        let mut idx_blocks = Vec::new();
        for block in blocks {
            let b: Vec<Elem> = block.iter().map(|&l| alg.elem(l)).collect::<Result<_>>()?;
            for &x in &b {
                covered.insert(x);
            }
            idx_blocks.push(b);
        }
        for x in alg.elements().filter(|&x| !covered.contains(x)) {
            idx_blocks.push(vec![x]);
        }
        Congruence::from_blocks(alg, &idx_blocks)
    }

    pub fn is_compatible(&self, alg: &FiniteAlgebra) -> bool {
        let n = alg.size();
        if self.class_of.len() != n {
            return false;
        }
        let c = &self.class_of;
        alg.ops().iter().all(|op| match op.symbol.arity() {
            1 => (0..n).all(|a| {
                (0..n).all(|b| c[a] != c[b] || c[op.table[a]] == c[op.table[b]])
            }),
            2 => (0..n).all(|a| {
                (0..n).all(|b| {
                    c[a] != c[b]
                        || (0..n).all(|x| {
                            c[op.table[a * n + x]] == c[op.table[b * n + x]]
                                && c[op.table[x * n + a]] == c[op.table[x * n + b]]
                        })
                })
            }),
            _ => true,
        })
    }

    pub fn algebra_id(&self) -> &str {
        &self.algebra_id
    }

    pub fn class_of(&self, x: Elem) -> usize {
        self.class_of[x]
    }

    pub fn related(&self, a: Elem, b: Elem) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    pub fn num_blocks(&self) -> usize {
        self.class_of.iter().max().map_or(0, |m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<Elem>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (x, &c) in self.class_of.iter().enumerate() {
            out[c].push(x);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.num_blocks() == self.class_of.len()
    }

    pub fn join(&self, other: &Congruence, alg: &FiniteAlgebra) -> Congruence {
        let mut uf = UnionFind::new(self.class_of.len());
        for theta in [self, other] {
            for block in theta.blocks() {
                for w in block.windows(2) {
                    uf.union(w[0], w[1]);
                }
            }
        }
        Congruence {
            algebra_id: alg.id().into(),
            class_of: uf.classes(),
        }
    }
}

/// All congruences, from the identity relation up, ordered by decreasing
/// number of blocks and then by partition.
pub fn congruences(alg: &FiniteAlgebra) -> Vec<Congruence> {
    let mut found: BTreeSet<Congruence> = BTreeSet::new();
    found.insert(Congruence::identity(alg));
    let principals: Vec<Congruence> = alg
        .elements()
        .flat_map(|a| (a + 1..alg.size()).map(move |b| (a, b)))
        .map(|(a, b)| Congruence::principal(alg, a, b))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut frontier: Vec<Congruence> = principals.clone();
    found.extend(principals.iter().cloned());
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for theta in &frontier {
            for p in &principals {
                let j = theta.join(p, alg);
                if found.insert(j.clone()) {
                    next.push(j);
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<Congruence> = found.into_iter().collect();
    out.sort_by(|a, b| b.num_blocks().cmp(&a.num_blocks()).then_with(|| a.cmp(b)));
    out
}

/// The quotient algebra and its projection. Quotient elements are labelled
/// by block number and named after the labels they collect.
pub fn quotient(alg: &Arc<FiniteAlgebra>, theta: &Congruence) -> Result<(Arc<FiniteAlgebra>, PartialMap)> {
    if theta.algebra_id() != alg.id() || !theta.is_compatible(alg) {
        return Err(Error::InvalidCongruence(alg.id().into()));
    }
    let blocks = theta.blocks();
    let names: Vec<String> = blocks
        .iter()
        .map(|b| {
            if b.len() == 1 {
                alg.name(b[0]).to_string()
            } else {
                let parts: Vec<&str> = b.iter().map(|&x| alg.name(x)).collect();
                format!("[{}]", parts.join(","))
            }
        })
        .collect();
    let q = FiniteAlgebra::from_fn(
        format!("{}/{}", alg.id(), blocks.len()),
        alg.signature().clone(),
        (0..blocks.len() as i64).collect(),
        Some(names),
        |sym, args| {
            let op = alg.op(sym).expect("same signature");
            let reps: Vec<Elem> = args.iter().map(|&c| blocks[c][0]).collect();
            theta.class_of(alg.apply(op, &reps))
        },
    )?;
    let q = Arc::new(q);
    let proj = PartialMap::new(
        alg.clone(),
        q.clone(),
        alg.elements().map(|x| Some(theta.class_of(x))).collect(),
    )?;
    Ok((q, proj))
}

/// Kernel of a total map.
pub fn kernel(p: &PartialMap) -> Result<Congruence> {
    if !p.is_total() {
        return Err(Error::InvalidParameter("kernel of a non-total map".into()));
    }
    let raw: Vec<usize> = p.assignment.iter().map(|y| y.expect("total")).collect();
    Ok(Congruence {
        algebra_id: p.src.id().into(),
        class_of: canonical_classes(&raw),
    })
}

// ---------------------------------------------------------------------------
// Relations

/// A binary relation between the carriers of two algebras.
#[derive(Clone)]
pub struct Relation {
    src: Arc<FiniteAlgebra>,
    dst: Arc<FiniteAlgebra>,
    pairs: BTreeSet<(Elem, Elem)>,
}

impl Relation {
    pub fn new(src: Arc<FiniteAlgebra>, dst: Arc<FiniteAlgebra>, pairs: BTreeSet<(Elem, Elem)>) -> Result<Self> {
        if pairs.iter().any(|&(a, b)| a >= src.size() || b >= dst.size()) {
            return Err(Error::TypeMismatch(format!(
                "pair outside `{}` x `{}`",
                src.id(),
                dst.id()
            )));
        }
        Ok(Relation { src, dst, pairs })
    }

    pub fn from_label_pairs(src: Arc<FiniteAlgebra>, dst: Arc<FiniteAlgebra>, pairs: &[(i64, i64)]) -> Result<Self> {
        let pairs = pairs
            .iter()
            .map(|&(a, b)| Ok((src.elem(a)?, dst.elem(b)?)))
            .collect::<Result<_>>()?;
        Relation::new(src, dst, pairs)
    }

    pub fn src(&self) -> &Arc<FiniteAlgebra> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<FiniteAlgebra> {
        &self.dst
    }

    pub fn pairs(&self) -> &BTreeSet<(Elem, Elem)> {
        &self.pairs
    }

    pub fn contains(&self, a: Elem, b: Elem) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn label_pairs(&self) -> Vec<(i64, i64)> {
        self.pairs
            .iter()
            .map(|&(a, b)| (self.src.label(a), self.dst.label(b)))
            .collect()
    }

    pub fn converse(&self) -> Relation {
        Relation {
            src: self.dst.clone(),
            dst: self.src.clone(),
            pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }

    /// At most one partner on the right for each left element.
    pub fn is_functional(&self) -> bool {
        let mut lefts = HashSet::new();
        self.pairs.iter().all(|&(a, _)| lefts.insert(a))
    }

    /// The relation read as a partial map, when it is the graph of a partial homomorphism.
    pub fn as_partial_map(&self) -> Option<PartialMap> {
        if !self.is_functional() {
            return None;
        }
        let mut assignment = vec![None; self.src.size()];
        for &(a, b) in &self.pairs {
            assignment[a] = Some(b);
        }
        PartialMap::new(self.src.clone(), self.dst.clone(), assignment).ok()
    }

    /// Membership of the pair set as a subuniverse of `src × dst`.
    pub fn is_subalgebra(&self) -> bool {
        let (s, d) = (&self.src, &self.dst);
        let (n, dn) = (s.size(), d.size());
        for (op, dop) in s.ops().iter().zip(d.ops()) {
            match op.symbol.arity() {
                0 => {
                    if !self.contains(op.table[0], dop.table[0]) {
                        return false;
                    }
                }
                1 => {
                    if self.pairs.iter().any(|&(a, b)| !self.contains(op.table[a], dop.table[b])) {
                        return false;
                    }
                }
                _ => {
                    for &(a, b) in &self.pairs {
                        for &(c, e) in &self.pairs {
                            if !self.contains(op.table[a * n + c], dop.table[b * dn + e]) {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }
}

impl PartialEq for Relation {
    fn eq(&self, other: &Self) -> bool {
        self.src.id() == other.src.id() && self.dst.id() == other.dst.id() && self.pairs == other.pairs
    }
}

impl Eq for Relation {}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pairs
            .iter()
            .map(|&(a, b)| format!("({},{})", self.src.name(a), self.dst.name(b)))
            .collect();
        write!(f, "{}x{} {{{}}}", self.src.id(), self.dst.id(), parts.join(", "))
    }
}
