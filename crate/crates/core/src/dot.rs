//! Graphviz output for algebras, multisorted structures and Kleene spaces.

use std::fmt::Write;

use crate::algebra::FiniteAlgebra;
use crate::kleene::KleeneSpace;
use crate::structure::{MultisortedStructure, StructRel};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Covering pairs of a reflexive relation read as an order; `None` if it is not a partial order.
fn hasse(n: usize, rel: &dyn Fn(usize, usize) -> bool) -> Option<Vec<(usize, usize)>> {
    for x in 0..n {
        if !rel(x, x) {
            return None;
        }
        for y in 0..n {
            if x != y && rel(x, y) && rel(y, x) {
                return None;
            }
            for z in 0..n {
                if rel(x, y) && rel(y, z) && !rel(x, z) {
                    return None;
                }
            }
        }
    }
    let lt = |x: usize, y: usize| x != y && rel(x, y);
    Some(
        (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| lt(x, y) && !(0..n).any(|z| lt(x, z) && lt(z, y)))
            .collect(),
    )
}

/// Hasse diagram of the lattice order, bottom first.
pub fn algebra_to_dot(a: &FiniteAlgebra) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=BT;\n", quote(a.id()));
    for e in a.elements() {
        let _ = writeln!(out, "  n{e} [label={}];", quote(a.name(e)));
    }
    for (x, y) in hasse(a.size(), &|x, y| a.leq(x, y)).unwrap_or_default() {
        let _ = writeln!(out, "  n{x} -> n{y} [dir=none];");
    }
    out.push_str("}\n");
    out
}

fn rel_edges(x: &MultisortedStructure, r: &StructRel) -> Vec<(usize, usize)> {
    if r.src == r.dst {
        let n = x.sorts[r.src].len();
        if let Some(cov) = hasse(n, &|a, b| r.pairs.contains(&(a, b))) {
            return cov;
        }
    }
    r.pairs.iter().copied().filter(|&(a, b)| r.src != r.dst || a != b).collect()
}

/// One cluster per sort. Relations inside a sort are drawn as Hasse
/// diagrams when they are orders; maps between sorts are dashed.
pub fn structure_to_dot(x: &MultisortedStructure) -> String {
    let node = |s: usize, p: usize| format!("s{s}_{p}");
    let mut out = format!("digraph {} {{\n  rankdir=BT;\n", quote(&x.id));
    for (i, sort) in x.sorts.iter().enumerate() {
        if sort.is_empty() {
            continue;
        }
        let _ = writeln!(out, "  subgraph cluster_{i} {{\n    label={};", quote(&sort.name));
        for (p, name) in sort.points.iter().enumerate() {
            let constant = x.consts.iter().any(|c| c.sort == i && c.point == p);
            let shape = if constant { ", shape=doublecircle" } else { "" };
            let _ = writeln!(out, "    {} [label={}{shape}];", node(i, p), quote(name));
        }
        out.push_str("  }\n");
    }
    for r in &x.rels {
        for (a, b) in rel_edges(x, r) {
            let style = if r.src == r.dst { "dir=none" } else { "style=dotted" };
            let _ = writeln!(out, "  {} -> {} [{style}, label={}];", node(r.src, a), node(r.dst, b), quote(&r.name));
        }
    }
    for op in x.gops.iter().chain(&x.hops) {
        let style = if op.src == op.dst { "color=gray" } else { "style=dashed" };
        for (p, q) in op.map.iter().enumerate() {
            if let Some(q) = q {
                if op.src == op.dst && p == *q {
                    continue;
                }
                let _ = writeln!(out, "  {} -> {} [{style}, label={}];", node(op.src, p), node(op.dst, *q), quote(&op.name));
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Hasse diagram with `g` as dashed two-way arrows; fixed points are boxes.
pub fn kleene_space_to_dot(s: &KleeneSpace, id: &str) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=BT;\n", quote(id));
    for (i, name) in s.points.iter().enumerate() {
        let shape = if s.g[i] == i { ", shape=box" } else { "" };
        let _ = writeln!(out, "  p{i} [label={}{shape}];", quote(name));
    }
    for (x, y) in s.covers() {
        let _ = writeln!(out, "  p{x} -> p{y} [dir=none];");
    }
    for x in 0..s.len() {
        if x < s.g[x] {
            let _ = writeln!(out, "  p{x} -> p{} [style=dashed, dir=both, constraint=false];", s.g[x]);
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::make_sugihara_algebra;
    use crate::duality::{AlterEgo, DualitySpec};

    #[test]
    fn chain_has_one_edge_per_cover() {
        let dot = algebra_to_dot(&make_sugihara_algebra(4).unwrap());
        assert_eq!(dot.matches("->").count(), 3);
    }

    #[test]
    fn empty_structure_has_no_nodes() {
        let ego = AlterEgo::build(DualitySpec::KleeneAlg).unwrap();
        let dot = structure_to_dot(&ego.structure.empty_like("empty"));
        assert_eq!(dot, "digraph \"empty\" {\n  rankdir=BT;\n}\n");
    }

    #[test]
    fn kleene_ego_draws_orders_and_links() {
        let ego = AlterEgo::build(DualitySpec::KleeneAlg).unwrap();
        let dot = structure_to_dot(&ego.structure);
        assert_eq!(dot.matches("cluster_").count(), 2);
        // Two covers in each order, three dashed arrows per linking map.
        assert_eq!(dot.matches("label=\"prec-\"").count(), 2);
        assert_eq!(dot.matches("style=dashed").count(), 6);
    }
}
