//! From the two-sorted Kleene dual to an ordered space with involution.
//!
//! The four relations of a two-sorted dual are read as one relation on the
//! disjoint union of its sorts. Its reflexive-transitive closure is a
//! preorder; collapsing `≼ ∩ ≽` gives the ordered set, and the linking
//! maps induce the involution. [`cornish_fowler_oracle`] builds the same
//! kind of space directly from the prime filters of a finite Kleene algebra.

use crate::algebra::{Elem, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::structure::MultisortedStructure;

/// A finite poset with an order-reversing involution `g` such that every
/// point is comparable with its image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KleeneSpace {
    pub points: Vec<String>,
    /// `leq[x][y]` iff `x ≤ y`.
    pub leq: Vec<Vec<bool>>,
    pub g: Vec<usize>,
}

impl KleeneSpace {
    pub fn new(points: Vec<String>, leq: Vec<Vec<bool>>, g: Vec<usize>) -> Result<Self> {
        let space = KleeneSpace { points, leq, g };
        space.check_axioms()?;
        Ok(space)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn check_axioms(&self) -> Result<()> {
        let n = self.len();
        let bad = |why: &str| Err(Error::MalformedStructure(format!("not a Kleene space: {why}")));
        if self.leq.len() != n || self.leq.iter().any(|r| r.len() != n) || self.g.len() != n {
            return bad("sizes disagree");
        }
        if self.g.iter().any(|&y| y >= n) {
            return bad("involution leaves the space");
        }
        for x in 0..n {
            if !self.leq[x][x] {
                return bad("order is not reflexive");
            }
            if self.g[self.g[x]] != x {
                return bad("g is not an involution");
            }
            if !self.leq[x][self.g[x]] && !self.leq[self.g[x]][x] {
                return bad("a point is incomparable with its image under g");
            }
            for y in 0..n {
                if x != y && self.leq[x][y] && self.leq[y][x] {
                    return bad("order is not antisymmetric");
                }
                if self.leq[x][y] && !self.leq[self.g[y]][self.g[x]] {
                    return bad("g does not reverse the order");
                }
                for z in 0..n {
                    if self.leq[x][y] && self.leq[y][z] && !self.leq[x][z] {
                        return bad("order is not transitive");
                    }
                }
            }
        }
        Ok(())
    }

    /// Covering pairs `(x, y)` with `x < y` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let lt = |x: usize, y: usize| x != y && self.leq[x][y];
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if lt(x, y) && !(0..n).any(|z| lt(x, z) && lt(z, y)) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.g[x] == x).collect()
    }

    /// The points with `y ≥ g(y)`.
    pub fn upper_half(&self) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.leq[self.g[y]][y]).collect()
    }
}

fn invariant(s: &KleeneSpace, x: usize) -> (usize, usize, bool, bool) {
    let below = (0..s.len()).filter(|&y| s.leq[y][x]).count();
    let above = (0..s.len()).filter(|&y| s.leq[x][y]).count();
    (below, above, s.g[x] == x, s.leq[x][s.g[x]])
}

/// An order isomorphism `a -> b` commuting with the involutions, if any.
pub fn find_space_isomorphism(a: &KleeneSpace, b: &KleeneSpace) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let inv_a: Vec<_> = (0..a.len()).map(|x| invariant(a, x)).collect();
    let inv_b: Vec<_> = (0..b.len()).map(|x| invariant(b, x)).collect();
    let mut sorted_a = inv_a.clone();
    let mut sorted_b = inv_b.clone();
    sorted_a.sort();
    sorted_b.sort();
    if sorted_a != sorted_b {
        return None;
    }
    let mut assignment = Vec::with_capacity(a.len());
    let mut used = vec![false; b.len()];
    fn extend(
        a: &KleeneSpace,
        b: &KleeneSpace,
        inv_a: &[(usize, usize, bool, bool)],
        inv_b: &[(usize, usize, bool, bool)],
        assignment: &mut Vec<usize>,
        used: &mut [bool],
    ) -> bool {
        let x = assignment.len();
        if x == a.len() {
            return (0..a.len()).all(|p| assignment[a.g[p]] == b.g[assignment[p]]);
        }
        for y in 0..b.len() {
            if used[y] || inv_a[x] != inv_b[y] {
                continue;
            }
            let fits = assignment.iter().enumerate().all(|(p, &q)| {
                a.leq[p][x] == b.leq[q][y]
                    && a.leq[x][p] == b.leq[y][q]
                    && (a.g[x] != p || b.g[y] == q)
                    && (a.g[p] != x || b.g[q] == y)
            });
            if !fits {
                continue;
            }
            assignment.push(y);
            used[y] = true;
            if extend(a, b, inv_a, inv_b, assignment, used) {
                return true;
            }
            assignment.pop();
            used[y] = false;
        }
        false
    }
    extend(a, b, &inv_a, &inv_b, &mut assignment, &mut used).then_some(assignment)
}

pub fn are_spaces_isomorphic(a: &KleeneSpace, b: &KleeneSpace) -> bool {
    find_space_isomorphism(a, b).is_some()
}

/// The reflexive-transitive closure of the union of all relations of a
/// two-sorted structure, on the points of both sorts (sort 0 first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionPreorder {
    pub names: Vec<String>,
    /// Sort of each point.
    pub sort_of: Vec<usize>,
    pub rel: Vec<Vec<bool>>,
}

impl UnionPreorder {
    pub fn equivalent(&self, x: usize, y: usize) -> bool {
        self.rel[x][y] && self.rel[y][x]
    }
}

fn require_two_sorts(x: &MultisortedStructure) -> Result<()> {
    if x.sorts.len() != 2 {
        return Err(Error::MalformedStructure(format!(
            "`{}` has {} sorts; the translation needs two",
            x.id,
            x.sorts.len()
        )));
    }
    Ok(())
}

pub fn union_preorder(x: &MultisortedStructure) -> Result<UnionPreorder> {
    require_two_sorts(x)?;
    let off = x.offsets();
    let n = x.total_points();
    let mut rel = vec![vec![false; n]; n];
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
    }
    for r in &x.rels {
        for &(a, b) in &r.pairs {
            rel[off[r.src] + a][off[r.dst] + b] = true;
        }
    }
    for k in 0..n {
        let through = rel[k].clone();
        for row in rel.iter_mut().filter(|row| row[k]) {
            for (cell, &t) in row.iter_mut().zip(&through) {
                *cell |= t;
            }
        }
    }
    let names = x
        .sorts
        .iter()
        .flat_map(|s| s.points.iter().map(move |p| format!("{}{}", p, sort_suffix(&s.name))))
        .collect();
    let sort_of = x
        .sorts
        .iter()
        .enumerate()
        .flat_map(|(i, s)| std::iter::repeat_n(i, s.len()))
        .collect();
    Ok(UnionPreorder { names, sort_of, rel })
}

fn sort_suffix(name: &str) -> &str {
    match name.chars().last() {
        Some('-') => "-",
        Some('+') => "+",
        _ => name,
    }
}

/// The space together with the class of every point of the source structure.
#[derive(Clone, Debug)]
pub struct KleeneQuotient {
    pub space: KleeneSpace,
    pub preorder: UnionPreorder,
    pub class_of: Vec<usize>,
}

impl KleeneQuotient {
    /// Classes containing a point of the given sort.
    pub fn sort_image(&self, sort: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .class_of
            .iter()
            .zip(&self.preorder.sort_of)
            .filter(|(_, &s)| s == sort)
            .map(|(&c, _)| c)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Collapses `≼ ∩ ≽` and lets the two linking maps induce the involution.
pub fn quotient_to_kleene_space(x: &MultisortedStructure) -> Result<KleeneQuotient> {
    let preorder = union_preorder(x)?;
    let off = x.offsets();
    let n = preorder.rel.len();
    let mut class_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for p in 0..n {
        if class_of[p] == usize::MAX {
            let c = reps.len();
            reps.push(p);
            for (q, slot) in class_of.iter_mut().enumerate().skip(p) {
                if preorder.equivalent(p, q) {
                    *slot = c;
                }
            }
        }
    }
    let link = |from: usize, to: usize| {
        x.gops
            .iter()
            .find(|op| op.src == from && op.dst == to)
            .ok_or_else(|| Error::MalformedStructure(format!("`{}` lacks a linking map {from} -> {to}", x.id)))
    };
    let (down_up, up_down) = (link(0, 1)?, link(1, 0)?);
    let mut g = vec![usize::MAX; reps.len()];
    for p in 0..n {
        let s = preorder.sort_of[p];
        let local = p - off[s];
        let (op, target) = if s == 0 { (down_up, 1) } else { (up_down, 0) };
        let image = class_of[off[target] + op.map[local].expect("linking maps are total")];
        let c = class_of[p];
        if g[c] == usize::MAX {
            g[c] = image;
        } else if g[c] != image {
            return Err(Error::IllDefinedInvolution(format!(
                "class of {} is sent to two different classes",
                preorder.names[p]
            )));
        }
    }
    let points = reps
        .iter()
        .enumerate()
        .map(|(c, _)| {
            let members: Vec<&str> = (0..n).filter(|&p| class_of[p] == c).map(|p| preorder.names[p].as_str()).collect();
            format!("{{{}}}", members.join(","))
        })
        .collect();
    let leq = reps
        .iter()
        .map(|&a| reps.iter().map(|&b| preorder.rel[a][b]).collect())
        .collect();
    let space = KleeneSpace::new(points, leq, g)?;
    Ok(KleeneQuotient { space, preorder, class_of })
}

/// The Kleene space of a finite Kleene algebra: points are the prime filters
/// `↑j` for join-irreducible `j`, ordered by inclusion, with
/// `g(x) = {a : ¬a ∉ x}`.
pub fn cornish_fowler_oracle(a: &FiniteAlgebra) -> Result<KleeneSpace> {
    let bottom = a
        .elements()
        .find(|&x| a.elements().all(|y| a.leq(x, y)))
        .ok_or_else(|| Error::MalformedAlgebra(format!("`{}` has no least element", a.id())))?;
    let join_irreducible = |j: Elem| {
        j != bottom
            && a.elements().all(|x| a.elements().all(|y| a.join(x, y) != j || x == j || y == j))
    };
    let js: Vec<Elem> = a.elements().filter(|&j| join_irreducible(j)).collect();
    let index_of = |j: Elem| js.iter().position(|&k| k == j);
    let mut g = Vec::with_capacity(js.len());
    for &j in &js {
        // The filter {x : j ≰ ¬x} is prime; its least element generates it.
        let members: Vec<Elem> = a.elements().filter(|&x| !a.leq(j, a.neg(x))).collect();
        let least = members
            .iter()
            .copied()
            .find(|&x| members.iter().all(|&y| a.leq(x, y)))
            .and_then(index_of)
            .ok_or_else(|| Error::IllDefinedInvolution(format!("image of ↑{} is not principal", a.name(j))))?;
        g.push(least);
    }
    let points = js.iter().map(|&j| format!("↑{}", a.name(j))).collect();
    // ↑j ⊆ ↑k iff k ≤ j.
    let leq = js.iter().map(|&j| js.iter().map(|&k| a.leq(k, j)).collect()).collect();
    KleeneSpace::new(points, leq, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::make_kleene_algebra;
    use crate::duality::{AlterEgo, DualitySpec};

    #[test]
    fn ego_itself_gives_the_four_point_space() {
        let ego = AlterEgo::build(DualitySpec::KleeneAlg).unwrap();
        let q = quotient_to_kleene_space(&ego.structure).unwrap();
        assert_eq!(q.space.len(), 4);
        // 0- and 0+ share a class.
        assert_eq!(q.class_of[0], q.class_of[3]);
        assert_eq!(q.space.covers().len(), 4);
        assert_eq!(q.space.upper_half(), q.sort_image(0));
    }

    #[test]
    fn oracle_on_three() {
        let s = cornish_fowler_oracle(&make_kleene_algebra()).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.fixed_points().is_empty());
    }

    #[test]
    fn isomorphism_respects_involution() {
        let chain = KleeneSpace::new(
            vec!["x".into(), "y".into()],
            vec![vec![true, true], vec![false, true]],
            vec![1, 0],
        )
        .unwrap();
        assert!(are_spaces_isomorphic(&chain, &chain));
        let bad = KleeneSpace::new(vec!["x".into()], vec![vec![true]], vec![0]).unwrap();
        assert!(!are_spaces_isomorphic(&chain, &bad));
    }

    #[test]
    fn axioms_reject_incomparable_pairs() {
        let antichain = KleeneSpace::new(
            vec!["x".into(), "y".into()],
            vec![vec![true, false], vec![false, true]],
            vec![1, 0],
        );
        assert!(antichain.is_err());
    }
}
