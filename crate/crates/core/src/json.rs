//! JSON encodings. Objects come out with sorted keys, so
//! `to_json(from_json(s)) == s` for anything this module wrote.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::algebra::{FiniteAlgebra, OpSymbol, Operation, Signature};
use crate::error::{Error, Result};
use crate::hom::{PartialMap, Relation};
use crate::kleene::KleeneSpace;
use crate::structure::{MultisortedStructure, Sort, StructConst, StructOp, StructRel};

fn bad(what: impl Into<String>) -> Error {
    Error::Json(what.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing field `{key}`")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| bad(format!("`{what}` is not a string")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(format!("`{what}` is not an array")))
}

fn as_i64(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| bad(format!("`{what}` is not an integer")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| bad(format!("`{what}` is not an index")))
}

fn label_pair(v: &Value, what: &str) -> Result<(i64, i64)> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok((as_i64(a, what)?, as_i64(b, what)?)),
        _ => Err(bad(format!("`{what}` entries must be pairs"))),
    }
}

pub fn algebra_to_json(a: &FiniteAlgebra) -> Value {
    let n = a.size();
    let label = |e: usize| json!(a.label(e));
    let mut ops = Map::new();
    for op in a.ops() {
        let table = match op.symbol.arity() {
            0 => label(op.table[0]),
            1 => Value::Array(op.table.iter().map(|&e| label(e)).collect()),
            _ => Value::Array(
                op.table
                    .chunks(n)
                    .map(|row| Value::Array(row.iter().map(|&e| label(e)).collect()))
                    .collect(),
            ),
        };
        ops.insert(op.symbol.as_str().to_string(), table);
    }
    let mut obj = Map::new();
    obj.insert("id".into(), json!(a.id()));
    obj.insert(
        "signature".into(),
        Value::Array(
            a.signature()
                .symbols()
                .iter()
                .map(|s| json!([s.as_str(), s.arity()]))
                .collect(),
        ),
    );
    obj.insert("carrier".into(), json!(a.labels()));
    obj.insert("ops".into(), Value::Object(ops));
    let default_names = a.elements().all(|e| a.name(e) == a.label(e).to_string());
    if !default_names {
        obj.insert("names".into(), json!(a.names()));
    }
    Value::Object(obj)
}

pub fn algebra_from_json(v: &Value) -> Result<FiniteAlgebra> {
    let id = as_str(field(v, "id")?, "id")?;
    let mut symbols = Vec::new();
    for entry in as_array(field(v, "signature")?, "signature")? {
        let (name, arity) = match entry.as_array().map(Vec::as_slice) {
            Some([name, arity]) => (as_str(name, "signature")?, as_usize(arity, "signature")?),
            _ => return Err(bad("signature entries must be [symbol, arity] pairs")),
        };
        let sym = OpSymbol::parse(name).ok_or_else(|| bad(format!("unknown operation symbol `{name}`")))?;
        if sym.arity() != arity {
            return Err(bad(format!("`{name}` has arity {}, not {arity}", sym.arity())));
        }
        symbols.push(sym);
    }
    let signature = Signature::new(symbols)?;
    let labels: Vec<i64> = as_array(field(v, "carrier")?, "carrier")?
        .iter()
        .map(|x| as_i64(x, "carrier"))
        .collect::<Result<_>>()?;
    let index = |x: &Value| -> Result<usize> {
        let l = as_i64(x, "table entry")?;
        labels
            .iter()
            .position(|&m| m == l)
            .ok_or_else(|| bad(format!("table entry {l} is not in the carrier")))
    };
    let ops_obj = field(v, "ops")?
        .as_object()
        .ok_or_else(|| bad("`ops` is not an object"))?;
    let mut ops = Vec::new();
    for &sym in signature.symbols() {
        let t = ops_obj
            .get(sym.as_str())
            .ok_or_else(|| bad(format!("missing table for `{sym}`")))?;
        let table = match sym.arity() {
            0 => vec![index(t)?],
            1 => as_array(t, sym.as_str())?.iter().map(index).collect::<Result<_>>()?,
            _ => {
                let mut flat = Vec::new();
                for row in as_array(t, sym.as_str())? {
                    for x in as_array(row, sym.as_str())? {
                        flat.push(index(x)?);
                    }
                }
                flat
            }
        };
        ops.push(Operation { symbol: sym, table });
    }
    let names = match v.get("names") {
        Some(ns) => Some(
            as_array(ns, "names")?
                .iter()
                .map(|x| as_str(x, "names").map(str::to_string))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    FiniteAlgebra::new(id, signature, labels, names, ops)
}

pub fn partial_map_to_json(p: &PartialMap) -> Value {
    json!({
        "src": p.src().id(),
        "dst": p.dst().id(),
        "dom": p.domain().iter().map(|&e| p.src().label(e)).collect::<Vec<_>>(),
        "map": p.label_pairs().iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
    })
}

/// Reads a map between two known algebras; the ids must match.
pub fn partial_map_from_json(v: &Value, src: &Arc<FiniteAlgebra>, dst: &Arc<FiniteAlgebra>) -> Result<PartialMap> {
    let (s, d) = (as_str(field(v, "src")?, "src")?, as_str(field(v, "dst")?, "dst")?);
    if s != src.id() || d != dst.id() {
        return Err(Error::TypeMismatch(format!("map is typed `{s}` -> `{d}`, not `{}` -> `{}`", src.id(), dst.id())));
    }
    let pairs: Vec<(i64, i64)> = as_array(field(v, "map")?, "map")?
        .iter()
        .map(|x| label_pair(x, "map"))
        .collect::<Result<_>>()?;
    let dom: BTreeSet<i64> = as_array(field(v, "dom")?, "dom")?
        .iter()
        .map(|x| as_i64(x, "dom"))
        .collect::<Result<_>>()?;
    if dom != pairs.iter().map(|&(a, _)| a).collect() {
        return Err(bad("`dom` disagrees with `map`"));
    }
    PartialMap::from_label_pairs(Arc::clone(src), Arc::clone(dst), &pairs)
}

pub fn relation_to_json(r: &Relation) -> Value {
    json!({
        "src": r.src().id(),
        "dst": r.dst().id(),
        "pairs": r.label_pairs().iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
    })
}

pub fn relation_from_json(v: &Value, src: &Arc<FiniteAlgebra>, dst: &Arc<FiniteAlgebra>) -> Result<Relation> {
    let (s, d) = (as_str(field(v, "src")?, "src")?, as_str(field(v, "dst")?, "dst")?);
    if s != src.id() || d != dst.id() {
        return Err(Error::TypeMismatch(format!("relation is typed `{s}` x `{d}`")));
    }
    let pairs: Vec<(i64, i64)> = as_array(field(v, "pairs")?, "pairs")?
        .iter()
        .map(|x| label_pair(x, "pairs"))
        .collect::<Result<_>>()?;
    Relation::from_label_pairs(Arc::clone(src), Arc::clone(dst), &pairs)
}

/// Points are written by name; `sort_order` keeps the sort positions.
pub fn structure_to_json(x: &MultisortedStructure) -> Value {
    let point = |sort: usize, p: usize| json!(x.sorts[sort].points[p]);
    let op = |o: &StructOp| {
        json!({
            "name": o.name,
            "src": x.sorts[o.src].name,
            "dst": x.sorts[o.dst].name,
            "map": o.map.iter().enumerate()
                .filter_map(|(p, q)| q.map(|q| json!([point(o.src, p), point(o.dst, q)])))
                .collect::<Vec<_>>(),
        })
    };
    let sorts: Map<String, Value> = x.sorts.iter().map(|s| (s.name.clone(), json!(s.points))).collect();
    json!({
        "id": x.id,
        "sort_order": x.sorts.iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
        "sorts": sorts,
        "gops": x.gops.iter().map(op).collect::<Vec<_>>(),
        "hops": x.hops.iter().map(op).collect::<Vec<_>>(),
        "consts": x.consts.iter().map(|c| json!({
            "name": c.name,
            "sort": x.sorts[c.sort].name,
            "point": point(c.sort, c.point),
        })).collect::<Vec<_>>(),
        "rels": x.rels.iter().map(|r| json!({
            "name": r.name,
            "src": x.sorts[r.src].name,
            "dst": x.sorts[r.dst].name,
            "pairs": r.pairs.iter().map(|&(a, b)| json!([point(r.src, a), point(r.dst, b)])).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

pub fn structure_from_json(v: &Value) -> Result<MultisortedStructure> {
    let id = as_str(field(v, "id")?, "id")?.to_string();
    let order: Vec<&str> = as_array(field(v, "sort_order")?, "sort_order")?
        .iter()
        .map(|s| as_str(s, "sort_order"))
        .collect::<Result<_>>()?;
    let sorts_obj = field(v, "sorts")?;
    let sorts: Vec<Sort> = order
        .iter()
        .map(|&name| {
            let points = as_array(field(sorts_obj, name)?, name)?
                .iter()
                .map(|p| as_str(p, name).map(str::to_string))
                .collect::<Result<_>>()?;
            Ok(Sort { name: name.to_string(), points })
        })
        .collect::<Result<_>>()?;
    let sort_of = |val: &Value| -> Result<usize> {
        let name = as_str(val, "sort")?;
        order.iter().position(|&s| s == name).ok_or_else(|| bad(format!("unknown sort `{name}`")))
    };
    let point_of = |sort: usize, val: &Value| -> Result<usize> {
        let name = as_str(val, "point")?;
        sorts[sort]
            .points
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| bad(format!("unknown point `{name}` in `{}`", sorts[sort].name)))
    };
    let pairs = |val: &Value, src: usize, dst: usize| -> Result<Vec<(usize, usize)>> {
        as_array(val, "pairs")?
            .iter()
            .map(|pair| match pair.as_array().map(Vec::as_slice) {
                Some([a, b]) => Ok((point_of(src, a)?, point_of(dst, b)?)),
                _ => Err(bad("pairs must have two entries")),
            })
            .collect()
    };
    let ops = |key: &str| -> Result<Vec<StructOp>> {
        as_array(field(v, key)?, key)?
            .iter()
            .map(|o| {
                let (src, dst) = (sort_of(field(o, "src")?)?, sort_of(field(o, "dst")?)?);
                let mut map = vec![None; sorts[src].len()];
                for (a, b) in pairs(field(o, "map")?, src, dst)? {
                    map[a] = Some(b);
                }
                Ok(StructOp { name: as_str(field(o, "name")?, "name")?.to_string(), src, dst, map })
            })
            .collect()
    };
    let (gops, hops) = (ops("gops")?, ops("hops")?);
    let consts = as_array(field(v, "consts")?, "consts")?
        .iter()
        .map(|c| {
            let sort = sort_of(field(c, "sort")?)?;
            Ok(StructConst {
                name: as_str(field(c, "name")?, "name")?.to_string(),
                sort,
                point: point_of(sort, field(c, "point")?)?,
            })
        })
        .collect::<Result<_>>()?;
    let rels = as_array(field(v, "rels")?, "rels")?
        .iter()
        .map(|r| {
            let (src, dst) = (sort_of(field(r, "src")?)?, sort_of(field(r, "dst")?)?);
            Ok(StructRel {
                name: as_str(field(r, "name")?, "name")?.to_string(),
                src,
                dst,
                pairs: pairs(field(r, "pairs")?, src, dst)?.into_iter().collect(),
            })
        })
        .collect::<Result<_>>()?;
    let x = MultisortedStructure { id, sorts, gops, hops, consts, rels };
    x.validate()?;
    Ok(x)
}

pub fn kleene_space_to_json(s: &KleeneSpace) -> Value {
    let order: Vec<Value> = (0..s.len())
        .flat_map(|x| (0..s.len()).map(move |y| (x, y)))
        .filter(|&(x, y)| x != y && s.leq[x][y])
        .map(|(x, y)| json!([x, y]))
        .collect();
    json!({ "points": s.points, "order": order, "g": s.g })
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_kleene_algebra, make_sugihara_monoid};
    use crate::duality::{AlterEgo, DualitySpec};

    #[test]
    fn algebra_round_trip_is_byte_stable() {
        for a in [make_sugihara_monoid(4).unwrap(), make_kleene_algebra()] {
            let text = to_pretty(&algebra_to_json(&a));
            let back = algebra_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(back, a);
            assert_eq!(to_pretty(&algebra_to_json(&back)), text);
        }
    }

    #[test]
    fn keys_are_sorted() {
        let text = serde_json::to_string(&algebra_to_json(&make_kleene_algebra())).unwrap();
        let carrier = text.find("\"carrier\"").unwrap();
        let id = text.find("\"id\"").unwrap();
        let ops = text.find("\"ops\"").unwrap();
        assert!(carrier < id && id < ops);
    }

    #[test]
    fn structure_round_trip() {
        for spec in [DualitySpec::EvenAlg { m: 2 }, DualitySpec::KleeneLat] {
            let ego = AlterEgo::build(spec).unwrap();
            let v = structure_to_json(&ego.structure);
            assert_eq!(structure_from_json(&v).unwrap(), ego.structure);
        }
    }

    #[test]
    fn map_round_trip() {
        let ego = AlterEgo::build(DualitySpec::EvenAlg { m: 2 }).unwrap();
        let u = &ego.map("u").unwrap().map;
        let back = partial_map_from_json(&partial_map_to_json(u), u.src(), u.dst()).unwrap();
        assert_eq!(&back, u);
        let r = u.graph();
        assert_eq!(relation_from_json(&relation_to_json(&r), r.src(), r.dst()).unwrap(), r);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(algebra_from_json(&json!({"id": "x"})).is_err());
        let mut v = algebra_to_json(&make_kleene_algebra());
        v["ops"]["neg"] = json!([0, 1, 7]);
        assert!(algebra_from_json(&v).is_err());
    }
}
