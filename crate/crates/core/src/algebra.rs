//! Finite algebras over lattice-with-involution signatures.
//!
//! Elements are stored as indices `0..n` into a carrier whose integer labels
//! are kept alongside. For the Sugihara chains the index order coincides with
//! the lattice order, so a label `-2` sits below label `1` both as an integer
//! and as an index.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Index of an element inside a [`FiniteAlgebra`] carrier.
pub type Elem = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpSymbol {
    Meet,
    Join,
    Arrow,
    Neg,
    /// Truth constant of a Sugihara monoid.
    Truth,
    Zero,
    One,
}

impl OpSymbol {
    pub const ALL: [OpSymbol; 7] = [
        OpSymbol::Meet,
        OpSymbol::Join,
        OpSymbol::Arrow,
        OpSymbol::Neg,
        OpSymbol::Truth,
        OpSymbol::Zero,
        OpSymbol::One,
    ];

    pub fn arity(self) -> usize {
        match self {
            OpSymbol::Meet | OpSymbol::Join | OpSymbol::Arrow => 2,
            OpSymbol::Neg => 1,
            OpSymbol::Truth | OpSymbol::Zero | OpSymbol::One => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OpSymbol::Meet => "meet",
            OpSymbol::Join => "join",
            OpSymbol::Arrow => "arrow",
            OpSymbol::Neg => "neg",
            OpSymbol::Truth => "t",
            OpSymbol::Zero => "zero",
            OpSymbol::One => "one",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        OpSymbol::ALL.into_iter().find(|sym| sym.as_str() == s)
    }
}

impl fmt::Display for OpSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The operation symbols of an algebra, in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    symbols: Vec<OpSymbol>,
}

impl Signature {
    /// Checks the shape constraints: lattice operations and negation are
    /// always present, at most one kind of truth constant, and the bounded
    /// (Kleene) signature carries no implication.
    pub fn new(symbols: Vec<OpSymbol>) -> Result<Self> {
        let has = |s: OpSymbol| symbols.contains(&s);
        for required in [OpSymbol::Meet, OpSymbol::Join, OpSymbol::Neg] {
            if !has(required) {
                return Err(Error::InvalidParameter(format!(
                    "signature lacks `{required}`"
                )));
            }
        }
        let mut sorted = symbols.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != symbols.len() {
            return Err(Error::InvalidParameter(
                "duplicate operation symbol".into(),
            ));
        }
        let bounds = has(OpSymbol::Zero) || has(OpSymbol::One);
        if bounds && has(OpSymbol::Truth) {
            return Err(Error::InvalidParameter(
                "a signature has either t or bounds, never both".into(),
            ));
        }
        if bounds && !(has(OpSymbol::Zero) && has(OpSymbol::One)) {
            return Err(Error::InvalidParameter(
                "bounds come in pairs".into(),
            ));
        }
        if bounds && has(OpSymbol::Arrow) {
            return Err(Error::InvalidParameter(
                "the Kleene signature has no arrow".into(),
            ));
        }
        Ok(Signature { symbols })
    }

    pub fn sugihara() -> Self {
        Signature {
            symbols: vec![OpSymbol::Meet, OpSymbol::Join, OpSymbol::Arrow, OpSymbol::Neg],
        }
    }

    pub fn sugihara_monoid() -> Self {
        Signature {
            symbols: vec![
                OpSymbol::Meet,
                OpSymbol::Join,
                OpSymbol::Arrow,
                OpSymbol::Neg,
                OpSymbol::Truth,
            ],
        }
    }

    pub fn kleene_algebra() -> Self {
        Signature {
            symbols: vec![
                OpSymbol::Meet,
                OpSymbol::Join,
                OpSymbol::Neg,
                OpSymbol::Zero,
                OpSymbol::One,
            ],
        }
    }

    pub fn kleene_lattice() -> Self {
        Signature {
            symbols: vec![OpSymbol::Meet, OpSymbol::Join, OpSymbol::Neg],
        }
    }

    pub fn symbols(&self) -> &[OpSymbol] {
        &self.symbols
    }

    pub fn has(&self, sym: OpSymbol) -> bool {
        self.symbols.contains(&sym)
    }

    pub fn has_constants(&self) -> bool {
        self.symbols.iter().any(|s| s.arity() == 0)
    }

    pub fn position(&self, sym: OpSymbol) -> Option<usize> {
        self.symbols.iter().position(|&s| s == sym)
    }
}

/// A total operation table. Arity-2 tables are row-major: `table[a * n + b]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    pub symbol: OpSymbol,
    pub table: Vec<Elem>,
}

/// A finite algebra: carrier plus one materialised table per operation symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    id: String,
    signature: Signature,
    labels: Vec<i64>,
    names: Vec<String>,
    ops: Vec<Operation>,
    label_index: HashMap<i64, Elem>,
}

impl FiniteAlgebra {
    /// Builds an algebra, checking that the carrier is nonempty, labels are
    /// distinct and every table is closed in the carrier.
    pub fn new(
        id: impl Into<String>,
        signature: Signature,
        labels: Vec<i64>,
        names: Option<Vec<String>>,
        ops: Vec<Operation>,
    ) -> Result<Self> {
        let id = id.into();
        let n = labels.len();
        if n == 0 {
            return Err(Error::MalformedAlgebra(format!("`{id}` has an empty carrier")));
        }
        let mut label_index = HashMap::with_capacity(n);
        for (i, &l) in labels.iter().enumerate() {
            if label_index.insert(l, i).is_some() {
                return Err(Error::MalformedAlgebra(format!(
                    "`{id}` repeats the label {l}"
                )));
            }
        }
        let names = match names {
            Some(names) if names.len() == n => names,
            Some(_) => {
                return Err(Error::MalformedAlgebra(format!(
                    "`{id}` has a name list of the wrong length"
                )))
            }
            None => labels.iter().map(|l| l.to_string()).collect(),
        };
        if ops.len() != signature.symbols.len()
            || ops.iter().zip(&signature.symbols).any(|(op, &s)| op.symbol != s)
        {
            return Err(Error::MalformedAlgebra(format!(
                "`{id}` tables do not follow its signature"
            )));
        }
        for op in &ops {
            let expected = n.pow(op.symbol.arity() as u32);
            if op.table.len() != expected {
                return Err(Error::MalformedAlgebra(format!(
                    "`{id}`: table for `{}` has {} entries, expected {expected}",
                    op.symbol,
                    op.table.len()
                )));
            }
            if op.table.iter().any(|&v| v >= n) {
                return Err(Error::MalformedAlgebra(format!(
                    "`{id}`: table for `{}` leaves the carrier",
                    op.symbol
                )));
            }
        }
        Ok(FiniteAlgebra {
            id,
            signature,
            labels,
            names,
            ops,
            label_index,
        })
    }

    /// Builds the tables by evaluating `f(symbol, args)` on every argument tuple.
    pub fn from_fn(
        id: impl Into<String>,
        signature: Signature,
        labels: Vec<i64>,
        names: Option<Vec<String>>,
        mut f: impl FnMut(OpSymbol, &[Elem]) -> Elem,
    ) -> Result<Self> {
        let n = labels.len();
        let ops = signature
            .symbols
            .iter()
            .map(|&symbol| {
                let table = match symbol.arity() {
                    0 => vec![f(symbol, &[])],
                    1 => (0..n).map(|a| f(symbol, &[a])).collect(),
                    _ => (0..n * n).map(|i| f(symbol, &[i / n, i % n])).collect(),
                };
                Operation { symbol, table }
            })
            .collect();
        FiniteAlgebra::new(id, signature, labels, names, ops)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.labels.len()
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn label(&self, e: Elem) -> i64 {
        self.labels[e]
    }

    pub fn name(&self, e: Elem) -> &str {
        &self.names[e]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, label: i64) -> Option<Elem> {
        self.label_index.get(&label).copied()
    }

    /// Like [`index_of`](Self::index_of) but reports a missing label as an error.
    pub fn elem(&self, label: i64) -> Result<Elem> {
        self.index_of(label).ok_or_else(|| {
            Error::InvalidParameter(format!("{label} is not an element of `{}`", self.id))
        })
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    pub fn op(&self, sym: OpSymbol) -> Option<&Operation> {
        self.ops.iter().find(|op| op.symbol == sym)
    }

    /// Same algebra under a new id; used to disjointify copies of one algebra
    /// serving as different sorts.
    pub fn renamed(&self, id: impl Into<String>) -> Self {
        FiniteAlgebra {
            id: id.into(),
            ..self.clone()
        }
    }

    pub fn apply(&self, op: &Operation, args: &[Elem]) -> Elem {
        match args.len() {
            0 => op.table[0],
            1 => op.table[args[0]],
            _ => op.table[args[0] * self.size() + args[1]],
        }
    }

    fn binary(&self, sym: OpSymbol, a: Elem, b: Elem) -> Elem {
        let op = self.op(sym).expect("lattice operations are always present");
        op.table[a * self.size() + b]
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.binary(OpSymbol::Meet, a, b)
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.binary(OpSymbol::Join, a, b)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.op(OpSymbol::Neg).expect("negation is always present").table[a]
    }

    pub fn arrow(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.op(OpSymbol::Arrow).map(|op| op.table[a * self.size() + b])
    }

    /// Derived fusion `a·b = ¬(a → ¬b)`.
    pub fn fusion(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.arrow(a, self.neg(b)).map(|x| self.neg(x))
    }

    pub fn constant(&self, sym: OpSymbol) -> Option<Elem> {
        self.op(sym).filter(|op| op.symbol.arity() == 0).map(|op| op.table[0])
    }

    /// Values of all nullary operations.
    pub fn constants(&self) -> Vec<Elem> {
        self.ops
            .iter()
            .filter(|op| op.symbol.arity() == 0)
            .map(|op| op.table[0])
            .collect()
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.meet(a, b) == a
    }

    /// Checks the equational laws the shipped families satisfy: distributive
    /// lattice, order-reversing involution, and `t` as fusion identity.
    pub fn check_laws(&self) -> Result<()> {
        let n = self.size();
        let fail = |what: String| Err(Error::MalformedAlgebra(format!("`{}`: {what}", self.id)));
        for a in 0..n {
            if self.meet(a, a) != a || self.join(a, a) != a {
                return fail(format!("{} is not idempotent", self.names[a]));
            }
            if self.neg(self.neg(a)) != a {
                return fail(format!("negation is not an involution at {}", self.names[a]));
            }
            for b in 0..n {
                if self.meet(a, b) != self.meet(b, a) || self.join(a, b) != self.join(b, a) {
                    return fail("lattice operations are not commutative".into());
                }
                if self.meet(a, self.join(a, b)) != a || self.join(a, self.meet(a, b)) != a {
                    return fail("absorption fails".into());
                }
                if self.leq(a, b) && !self.leq(self.neg(b), self.neg(a)) {
                    return fail("negation does not reverse the order".into());
                }
                for c in 0..n {
                    if self.meet(a, self.meet(b, c)) != self.meet(self.meet(a, b), c)
                        || self.join(a, self.join(b, c)) != self.join(self.join(a, b), c)
                    {
                        return fail("lattice operations are not associative".into());
                    }
                    if self.meet(a, self.join(b, c))
                        != self.join(self.meet(a, b), self.meet(a, c))
                    {
                        return fail("lattice is not distributive".into());
                    }
                }
            }
        }
        if let (Some(t), true) = (self.constant(OpSymbol::Truth), self.signature.has(OpSymbol::Arrow)) {
            for a in 0..n {
                if self.fusion(t, a) != Some(a) || self.fusion(a, t) != Some(a) {
                    return fail(format!("t is not a fusion identity at {}", self.names[a]));
                }
            }
        }
        if let (Some(z), Some(o)) = (self.constant(OpSymbol::Zero), self.constant(OpSymbol::One)) {
            if (0..n).any(|a| !self.leq(z, a) || !self.leq(a, o)) {
                return fail("zero and one are not the bounds".into());
            }
        }
        Ok(())
    }

    /// The subalgebra on `subset`, keeping labels and names. The caller gets
    /// back the inclusion as a list of parent indices.
    pub fn restrict(&self, subset: &[Elem], id: impl Into<String>) -> Result<(FiniteAlgebra, Vec<Elem>)> {
        let mut members: Vec<Elem> = subset.to_vec();
        members.sort_unstable();
        members.dedup();
        let mut local = vec![usize::MAX; self.size()];
        for (i, &e) in members.iter().enumerate() {
            local[e] = i;
        }
        let id = id.into();
        let mut closed = true;
        let alg = FiniteAlgebra::from_fn(
            id.clone(),
            self.signature.clone(),
            members.iter().map(|&e| self.labels[e]).collect(),
            Some(members.iter().map(|&e| self.names[e].clone()).collect()),
            |sym, args| {
                let op = self.op(sym).expect("same signature");
                let parent: Vec<Elem> = args.iter().map(|&a| members[a]).collect();
                let v = local[self.apply(op, &parent)];
                if v == usize::MAX {
                    closed = false;
                    0
                } else {
                    v
                }
            },
        )?;
        if !closed {
            return Err(Error::MalformedAlgebra(format!(
                "subset of `{}` is not closed under the operations",
                self.id
            )));
        }
        Ok((alg, members))
    }
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {{{}}}", self.id, self.names.join(", "))
    }
}

/// Direct product of finitely many algebras over a common signature.
///
/// Elements are labelled by their index; the coordinates of index `i` are
/// recovered with [`ProductAlgebra::coords`].
#[derive(Clone, Debug)]
pub struct ProductAlgebra {
    pub algebra: FiniteAlgebra,
    radices: Vec<usize>,
}

impl ProductAlgebra {
    pub fn new(factors: &[&FiniteAlgebra], id: impl Into<String>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty product".into()))?;
        for f in factors {
            if f.signature != first.signature {
                return Err(Error::SignatureMismatch(first.id.clone(), f.id.clone()));
            }
        }
        let radices: Vec<usize> = factors.iter().map(|f| f.size()).collect();
        let total: usize = radices.iter().product();
        let decode = |mut i: usize| {
            let mut out = vec![0; radices.len()];
            for k in (0..radices.len()).rev() {
                out[k] = i % radices[k];
                i /= radices[k];
            }
            out
        };
        let encode = |coords: &[usize]| coords.iter().zip(&radices).fold(0, |acc, (&c, &r)| acc * r + c);
        let names: Vec<String> = (0..total)
            .map(|i| {
                let parts: Vec<&str> = decode(i)
                    .iter()
                    .zip(factors)
                    .map(|(&c, f)| f.name(c))
                    .collect();
                format!("({})", parts.join(","))
            })
            .collect();
        let algebra = FiniteAlgebra::from_fn(
            id,
            first.signature.clone(),
            (0..total as i64).collect(),
            Some(names),
            |sym, args| {
                let decoded: Vec<Vec<usize>> = args.iter().map(|&a| decode(a)).collect();
                let coords: Vec<usize> = factors
                    .iter()
                    .enumerate()
                    .map(|(k, f)| {
                        let op = f.op(sym).expect("same signature");
                        let local: Vec<Elem> = decoded.iter().map(|d| d[k]).collect();
                        f.apply(op, &local)
                    })
                    .collect();
                encode(&coords)
            },
        )?;
        Ok(ProductAlgebra { algebra, radices })
    }

    pub fn coords(&self, mut i: Elem) -> Vec<Elem> {
        let mut out = vec![0; self.radices.len()];
        for k in (0..self.radices.len()).rev() {
            out[k] = i % self.radices[k];
            i /= self.radices[k];
        }
        out
    }

    pub fn index(&self, coords: &[Elem]) -> Elem {
        coords
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&c, &r)| acc * r + c)
    }
}

/// Binary product `a × b`.
pub fn product(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<ProductAlgebra> {
    ProductAlgebra::new(&[a, b], format!("{}x{}", a.id(), b.id()))
}

fn sugihara_labels(k: i64) -> Result<Vec<i64>> {
    if k <= 0 {
        return Err(Error::InvalidParameter(format!(
            "Sugihara chain size must be positive, got {k}"
        )));
    }
    let n = k / 2;
    Ok((-n..=n).filter(|&a| k % 2 == 1 || a != 0).collect())
}

fn sugihara_tables(id: String, signature: Signature, k: i64, truth: Option<i64>) -> Result<FiniteAlgebra> {
    let labels = sugihara_labels(k)?;
    let index: HashMap<i64, Elem> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let lab = labels.clone();
    FiniteAlgebra::from_fn(id, signature, labels, None, |sym, args| {
        let v = |i: usize| lab[args[i]];
        let out = match sym {
            OpSymbol::Meet => v(0).min(v(1)),
            OpSymbol::Join => v(0).max(v(1)),
            OpSymbol::Neg => -v(0),
            OpSymbol::Arrow => {
                let (a, b) = (v(0), v(1));
                if a <= b {
                    (-a).max(b)
                } else {
                    (-a).min(b)
                }
            }
            OpSymbol::Truth => truth.expect("monoid signature"),
            OpSymbol::Zero | OpSymbol::One => unreachable!("not in the Sugihara signature"),
        };
        index[&out]
    })
}

/// The Sugihara algebra `Z_k`: the chain `{-n..n}` for `k = 2n+1`, the same
/// chain without `0` for `k = 2n`.
pub fn make_sugihara_algebra(k: i64) -> Result<FiniteAlgebra> {
    sugihara_tables(format!("Z{k}"), Signature::sugihara(), k, None)
}

/// The Sugihara monoid `W_k`: `Z_k` with `t = 0` for odd `k` and `t = 1` for even `k`.
pub fn make_sugihara_monoid(k: i64) -> Result<FiniteAlgebra> {
    let t = if k % 2 == 0 { 1 } else { 0 };
    sugihara_tables(format!("W{k}"), Signature::sugihara_monoid(), k, Some(t))
}

/// `Z_k` when `monoid` is false, `W_k` otherwise.
pub fn make_sugihara(k: i64, monoid: bool) -> Result<FiniteAlgebra> {
    if monoid {
        make_sugihara_monoid(k)
    } else {
        make_sugihara_algebra(k)
    }
}

fn kleene(id: &str, signature: Signature) -> FiniteAlgebra {
    let names = ["0", "a", "1"].map(String::from).to_vec();
    FiniteAlgebra::from_fn(id, signature, vec![0, 1, 2], Some(names), |sym, args| match sym {
        OpSymbol::Meet => args[0].min(args[1]),
        OpSymbol::Join => args[0].max(args[1]),
        OpSymbol::Neg => 2 - args[0],
        OpSymbol::Zero => 0,
        OpSymbol::One => 2,
        OpSymbol::Arrow | OpSymbol::Truth => unreachable!("not in the Kleene signature"),
    })
    .expect("three-element Kleene tables are closed")
}

/// The three-element Kleene algebra `0 < a < 1` with `¬a = a`; labels 0, 1, 2.
pub fn make_kleene_algebra() -> FiniteAlgebra {
    kleene("3", Signature::kleene_algebra())
}

/// The Kleene lattice: the same chain without the bound constants.
pub fn make_kleene_lattice() -> FiniteAlgebra {
    kleene("3u", Signature::kleene_lattice())
}
