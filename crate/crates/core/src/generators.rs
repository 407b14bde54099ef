//! The named maps on and between the Sugihara sorts.
//!
//! A [`SortFamily`] fixes `m` and holds the three sort algebras: two copies
//! of the odd chain (`minus`, `plus`) and one copy of the even chain
//! (`even`). Every generator is realised on these copies, so its source and
//! target ids say which sort it lives on.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::algebra::{make_sugihara, make_sugihara_algebra, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::hom::PartialMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkDirection {
    MinusToPlus,
    PlusToMinus,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorName {
    /// Surjection from the even sort onto the minus sort.
    U,
    /// Total endomorphism of the minus sort moving every point one step toward 0.
    G,
    F(i64),
    H(i64),
    J,
    /// Lift of a generator of the even chain one size down onto the even monoid sort.
    Bar(Box<GeneratorName>),
    /// Inverse of the bijective part of `U`, from the minus sort without 0.
    V,
    IdLink(LinkDirection),
}

impl fmt::Display for GeneratorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorName::U => f.write_str("u"),
            GeneratorName::G => f.write_str("g"),
            GeneratorName::F(i) => write!(f, "f{i}"),
            GeneratorName::H(i) => write!(f, "h{i}"),
            GeneratorName::J => f.write_str("j"),
            GeneratorName::Bar(inner) => write!(f, "bar({inner})"),
            GeneratorName::V => f.write_str("v"),
            GeneratorName::IdLink(LinkDirection::MinusToPlus) => f.write_str("id-+"),
            GeneratorName::IdLink(LinkDirection::PlusToMinus) => f.write_str("id+-"),
        }
    }
}

impl FromStr for GeneratorName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownGenerator(s.to_string());
        let index = |rest: &str| rest.parse::<i64>().map_err(|_| bad());
        Ok(match s {
            "u" => GeneratorName::U,
            "g" => GeneratorName::G,
            "j" => GeneratorName::J,
            "v" => GeneratorName::V,
            "id-+" => GeneratorName::IdLink(LinkDirection::MinusToPlus),
            "id+-" => GeneratorName::IdLink(LinkDirection::PlusToMinus),
            _ => {
                if let Some(inner) = s.strip_prefix("bar(").and_then(|r| r.strip_suffix(')')) {
                    GeneratorName::Bar(Box::new(inner.parse()?))
                } else if let Some(rest) = s.strip_prefix('f') {
                    GeneratorName::F(index(rest)?)
                } else if let Some(rest) = s.strip_prefix('h') {
                    GeneratorName::H(index(rest)?)
                } else {
                    return Err(bad());
                }
            }
        })
    }
}

/// The sorts of the Sugihara alter egos for a fixed `m`.
#[derive(Clone, Debug)]
pub struct SortFamily {
    pub m: i64,
    pub monoid: bool,
    pub minus: Arc<FiniteAlgebra>,
    pub plus: Arc<FiniteAlgebra>,
    pub even: Arc<FiniteAlgebra>,
}

impl SortFamily {
    pub fn new(m: i64, monoid: bool) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("m must be at least 2, got {m}")));
        }
        let odd = make_sugihara(2 * m - 1, monoid)?;
        let even = make_sugihara(2 * m, monoid)?;
        let (minus, plus, even_id) = if monoid { ("S-", "S+", "T") } else { ("P-", "P+", "Q") };
        Ok(SortFamily {
            m,
            monoid,
            minus: Arc::new(odd.renamed(minus)),
            plus: Arc::new(odd.renamed(plus)),
            even: Arc::new(even.renamed(even_id)),
        })
    }

    pub fn sort(&self, id: &str) -> Option<&Arc<FiniteAlgebra>> {
        [&self.minus, &self.plus, &self.even].into_iter().find(|a| a.id() == id)
    }
}

fn step_toward_zero(a: i64) -> i64 {
    a - a.signum()
}

fn step_away_from_zero(a: i64) -> i64 {
    a + a.signum()
}

/// Label formula shared by `f_i` (odd chain) and `h_i` (even chain):
/// `±(i-1) ↦ ±i`, identity elsewhere, undefined at `±i`.
fn shift_up(i: i64) -> impl Fn(i64) -> Option<i64> {
    move |a| {
        if a.abs() == i {
            None
        } else if a.abs() == i - 1 {
            Some(a.signum() * i)
        } else {
            Some(a)
        }
    }
}

/// Realises a generator on the sorts of `family`.
pub fn named_generator(name: &GeneratorName, family: &SortFamily) -> Result<PartialMap> {
    let m = family.m;
    let out_of_range = |what: String| Err(Error::InvalidParameter(what));
    let (minus, plus, even) = (&family.minus, &family.plus, &family.even);
    match name {
        GeneratorName::G => PartialMap::from_label_fn(minus.clone(), minus.clone(), |a| Some(step_toward_zero(a))),
        GeneratorName::F(0) => {
            if family.monoid {
                return out_of_range("f0 omits the truth constant and is not a monoid map".into());
            }
            PartialMap::from_label_fn(minus.clone(), minus.clone(), |a| (a != 0).then_some(a))
        }
        GeneratorName::F(1) => PartialMap::from_label_fn(minus.clone(), minus.clone(), |a| (a.abs() != 1).then_some(a)),
        GeneratorName::F(i) => {
            if *i < 0 || *i >= m {
                return out_of_range(format!("f{i} needs 0 <= i < m = {m}"));
            }
            PartialMap::from_label_fn(minus.clone(), minus.clone(), shift_up(*i))
        }
        GeneratorName::H(i) => {
            if family.monoid {
                return out_of_range(format!("h{i} is not a monoid map; use bar(h..)"));
            }
            if *i < 2 || *i > m {
                return out_of_range(format!("h{i} needs 2 <= i <= m = {m}"));
            }
            PartialMap::from_label_fn(even.clone(), even.clone(), shift_up(*i))
        }
        GeneratorName::J => {
            if family.monoid {
                return out_of_range("j is not a monoid map; use bar(j)".into());
            }
            PartialMap::from_label_fn(even.clone(), even.clone(), |a| (a.abs() != 1).then(|| step_toward_zero(a)))
        }
        GeneratorName::U => PartialMap::from_label_fn(even.clone(), minus.clone(), |a| Some(step_toward_zero(a))),
        GeneratorName::V => {
            if family.monoid {
                return out_of_range("v does not exist between monoid sorts".into());
            }
            PartialMap::from_label_fn(minus.clone(), even.clone(), |a| (a != 0).then(|| step_away_from_zero(a)))
        }
        GeneratorName::IdLink(LinkDirection::MinusToPlus) => PartialMap::from_label_fn(minus.clone(), plus.clone(), Some),
        GeneratorName::IdLink(LinkDirection::PlusToMinus) => PartialMap::from_label_fn(plus.clone(), minus.clone(), Some),
        GeneratorName::Bar(inner) => {
            if !family.monoid {
                return out_of_range("bar lifts onto the even monoid sort only".into());
            }
            if !matches!(**inner, GeneratorName::H(_) | GeneratorName::J) {
                return Err(Error::TypeMismatch(format!(
                    "bar needs an endomorphism of the smaller even chain, got {inner}"
                )));
            }
            // The inner map lives on the algebra chain of size 2(m-1).
            let smaller = Arc::new(make_sugihara_algebra(2 * (m - 1))?);
            let e = match **inner {
                GeneratorName::H(i) => {
                    if i < 2 || i > m - 1 {
                        return out_of_range(format!("bar(h{i}) needs 2 <= i <= m-1 = {}", m - 1));
                    }
                    PartialMap::from_label_fn(smaller.clone(), smaller.clone(), shift_up(i))?
                }
                _ => PartialMap::from_label_fn(smaller.clone(), smaller.clone(), |a| {
                    (a.abs() != 1).then(|| step_toward_zero(a))
                })?,
            };
            kappa(&e, even)
        }
    }
}

/// The lift `e ↦ ē` from partial endomorphisms of the even chain of size
/// `2(m-1)` to partial endomorphisms of the even monoid of size `2m`:
/// `±1` are fixed and everything else is shifted one step outward.
pub fn kappa(e: &PartialMap, target: &Arc<FiniteAlgebra>) -> Result<PartialMap> {
    let src = e.src();
    if src.id() != e.dst().id() || !src.size().is_multiple_of(2) || target.size() != src.size() + 2 {
        return Err(Error::TypeMismatch(format!(
            "bar needs an endomorphism of an even chain two smaller than `{}`, got {} -> {}",
            target.id(),
            src.id(),
            e.dst().id()
        )));
    }
    if !e.is_injective() {
        return Err(Error::InvalidParameter(format!("bar applied to non-injective map {e}")));
    }
    PartialMap::from_label_fn(target.clone(), target.clone(), |a| {
        if a.abs() == 1 {
            Some(a)
        } else {
            e.apply_label(step_toward_zero(a)).map(step_away_from_zero)
        }
    })
}

/// Inverse of [`kappa`]: drop `±1` and shift inward.
pub fn kappa_inverse(h: &PartialMap, smaller: &Arc<FiniteAlgebra>) -> Result<PartialMap> {
    PartialMap::from_label_fn(smaller.clone(), smaller.clone(), |a| {
        h.apply_label(step_away_from_zero(a)).map(step_toward_zero)
    })
}

/// Index bounds for the parametric generator families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorBounds {
    /// Largest `i` with `f_i` included.
    pub f_max: i64,
    /// Largest `i` with `h_i` included on the even algebra sort.
    pub h_max: i64,
    /// Largest `i` with `bar(h_i)` included on the even monoid sort.
    pub bar_h_max: i64,
}

impl GeneratorBounds {
    /// Bounds for which the generated sets are the full partial-endomorphism
    /// monoids; pinned by `verify_generating_set` in the piggyback module.
    pub fn resolved(m: i64) -> Self {
        GeneratorBounds { f_max: m - 1, h_max: m, bar_h_max: m - 1 }
    }

    /// Stops the odd family at `f_{m-2}`; too short to generate, kept for comparison.
    pub fn short(m: i64) -> Self {
        GeneratorBounds { f_max: m - 2, h_max: m, bar_h_max: m - 1 }
    }
}

fn realise(names: Vec<GeneratorName>, family: &SortFamily) -> Result<Vec<(GeneratorName, PartialMap)>> {
    names
        .into_iter()
        .map(|n| named_generator(&n, family).map(|p| (n, p)))
        .collect()
}

/// `f_lo, …, f_{f_max}` and `g` on the minus sort.
pub fn odd_generators(family: &SortFamily, f_lo: i64, f_max: i64) -> Result<Vec<(GeneratorName, PartialMap)>> {
    let mut names: Vec<GeneratorName> = (f_lo..=f_max).map(GeneratorName::F).collect();
    names.push(GeneratorName::G);
    realise(names, family)
}

/// `h_2, …, h_{h_max}` and `j` on the even algebra sort.
pub fn even_algebra_generators(family: &SortFamily, h_max: i64) -> Result<Vec<(GeneratorName, PartialMap)>> {
    let mut names: Vec<GeneratorName> = (2..=h_max).map(GeneratorName::H).collect();
    names.push(GeneratorName::J);
    realise(names, family)
}

/// `bar(h_2), …, bar(h_{h_max})` and `bar(j)` on the even monoid sort.
pub fn even_monoid_generators(family: &SortFamily, h_max: i64) -> Result<Vec<(GeneratorName, PartialMap)>> {
    let mut names: Vec<GeneratorName> = (2..=h_max)
        .map(|i| GeneratorName::Bar(Box::new(GeneratorName::H(i))))
        .collect();
    names.push(GeneratorName::Bar(Box::new(GeneratorName::J)));
    realise(names, family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hom::{is_partial_hom, partial_homs_with, PartialHomOptions};

    #[test]
    fn g_on_z5() {
        let fam = SortFamily::new(3, false).unwrap();
        let g = named_generator(&GeneratorName::G, &fam).unwrap();
        assert_eq!(g.label_pairs(), vec![(-2, -1), (-1, 0), (0, 0), (1, 0), (2, 1)]);
    }

    #[test]
    fn u_and_v_for_m2() {
        let fam = SortFamily::new(2, false).unwrap();
        let u = named_generator(&GeneratorName::U, &fam).unwrap();
        assert_eq!(u.label_pairs(), vec![(-2, -1), (-1, 0), (1, 0), (2, 1)]);
        assert_eq!(u.src().id(), "Q");
        assert_eq!(u.dst().id(), "P-");
        let v = named_generator(&GeneratorName::V, &fam).unwrap();
        assert_eq!(v.label_pairs(), vec![(-1, -2), (1, 2)]);
    }

    #[test]
    fn invalid_names() {
        let mon = SortFamily::new(3, true).unwrap();
        assert!(named_generator(&GeneratorName::V, &mon).is_err());
        assert!(named_generator(&GeneratorName::F(0), &mon).is_err());
        let alg = SortFamily::new(3, false).unwrap();
        assert!(named_generator(&GeneratorName::F(3), &alg).is_err());
        assert!(named_generator(&GeneratorName::H(1), &alg).is_err());
        assert!(named_generator(&GeneratorName::H(4), &alg).is_err());
        assert!(matches!(
            named_generator(&GeneratorName::Bar(Box::new(GeneratorName::G)), &mon),
            Err(Error::TypeMismatch(_))
        ));
        assert!(SortFamily::new(1, false).is_err());
        assert!("k7".parse::<GeneratorName>().is_err());
    }

    #[test]
    fn names_round_trip() {
        for s in ["u", "g", "f0", "f3", "h2", "j", "bar(h3)", "bar(j)", "v", "id-+", "id+-"] {
            assert_eq!(s.parse::<GeneratorName>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn every_generator_is_a_partial_hom() {
        for m in 2..=4 {
            for monoid in [false, true] {
                let fam = SortFamily::new(m, monoid).unwrap();
                let mut names = vec![
                    GeneratorName::G,
                    GeneratorName::U,
                    GeneratorName::IdLink(LinkDirection::MinusToPlus),
                    GeneratorName::IdLink(LinkDirection::PlusToMinus),
                ];
                names.extend((1..m).map(GeneratorName::F));
                if monoid {
                    names.extend((2..m).map(|i| GeneratorName::Bar(Box::new(GeneratorName::H(i)))));
                    names.push(GeneratorName::Bar(Box::new(GeneratorName::J)));
                } else {
                    names.extend([GeneratorName::F(0), GeneratorName::V, GeneratorName::J]);
                    names.extend((2..=m).map(GeneratorName::H));
                }
                for n in names {
                    let p = named_generator(&n, &fam).unwrap();
                    assert!(is_partial_hom(p.src(), p.dst(), p.assignment()), "{n}");
                }
            }
        }
    }

    #[test]
    fn bar_fixes_units_and_is_a_bijection() {
        for m in 2..=4 {
            let fam = SortFamily::new(m, true).unwrap();
            let smaller = Arc::new(make_sugihara_algebra(2 * (m - 1)).unwrap());
            let opts = PartialHomOptions { include_empty: true, ..Default::default() };
            let pe = partial_homs_with(&smaller, &smaller, opts).unwrap();
            let mut lifted = Vec::new();
            for e in &pe {
                let bar = kappa(e, &fam.even).unwrap();
                assert_eq!(bar.apply_label(1), Some(1));
                assert_eq!(bar.apply_label(-1), Some(-1));
                assert!(is_partial_hom(bar.src(), bar.dst(), bar.assignment()));
                assert_eq!(&kappa_inverse(&bar, &smaller).unwrap(), e);
                lifted.push(bar);
            }
            lifted.sort();
            lifted.dedup();
            assert_eq!(lifted.len(), pe.len());
        }
    }

    #[test]
    fn bar_rejects_non_injective() {
        let fam = SortFamily::new(3, true).unwrap();
        let z5 = Arc::new(make_sugihara_algebra(5).unwrap());
        let g = PartialMap::from_label_fn(z5.clone(), z5, |a| Some(a - a.signum())).unwrap();
        assert!(kappa(&g, &fam.even).is_err());
    }
}
