//! Free modules over the Steenrod algebra with chosen generators.
//!
//! The basis of `C_{s,t}` is ordered generator-index major, Milnor order
//! minor. Every matrix, checkpoint and log depends on that order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::gf2::{GF2Matrix, GF2Vector};
use crate::milnor::{self, cached_basis, MilnorExponent};
use crate::resolution::Resolution;
use crate::subalgebra::{Signature, Subalgebra};

/// A generator of `C_s`: its position in the chosen list and its degree.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GeneratorRef {
    pub s: u32,
    pub index: u32,
    pub t: u32,
}

impl fmt::Display for GeneratorRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g[{},{}]@{}", self.s, self.index, self.t)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeModError {
    #[error("element is not homogeneous: {0} and {1}")]
    NotHomogeneous(String, String),
    #[error("element is zero and has no bidegree")]
    Zero,
    #[error("generator ({s}, {index}) does not exist")]
    UnknownGenerator { s: u32, index: u32 },
}

/// A mod-2 sum of terms `Sq(R) g`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct FreeElement {
    terms: BTreeSet<(GeneratorRef, MilnorExponent)>,
}

impl FreeElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The generator itself, `Sq(0) g`.
    pub fn generator(g: GeneratorRef) -> Self {
        Self::term(MilnorExponent::unit(), g)
    }

    pub fn term(r: MilnorExponent, g: GeneratorRef) -> Self {
        let mut x = Self::zero();
        x.add_term(r, g);
        x
    }

    pub fn add_term(&mut self, r: MilnorExponent, g: GeneratorRef) {
        let key = (g, r);
        if !self.terms.remove(&key) {
            self.terms.insert(key);
        }
    }

    pub fn add(&mut self, other: &FreeElement) {
        for (g, r) in &other.terms {
            self.add_term(r.clone(), *g);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, r: &MilnorExponent, g: GeneratorRef) -> bool {
        self.terms.contains(&(g, r.clone()))
    }

    /// Terms in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (&MilnorExponent, GeneratorRef)> {
        self.terms.iter().map(|(g, r)| (r, *g))
    }

    /// Left multiplication by `Sq(r)`.
    pub fn mul_left(&self, r: &MilnorExponent) -> FreeElement {
        let mut out = FreeElement::zero();
        for (g, s) in &self.terms {
            for t in milnor::multiply(r, s) {
                out.add_term(t, *g);
            }
        }
        out
    }

    /// Keeps only the terms for which `keep` holds.
    pub fn retain(&mut self, mut keep: impl FnMut(&MilnorExponent, GeneratorRef) -> bool) {
        self.terms.retain(|(g, r)| keep(r, *g));
    }
}

impl FromIterator<(MilnorExponent, GeneratorRef)> for FreeElement {
    fn from_iter<I: IntoIterator<Item = (MilnorExponent, GeneratorRef)>>(iter: I) -> Self {
        let mut x = FreeElement::zero();
        for (r, g) in iter {
            x.add_term(r, g);
        }
        x
    }
}

impl fmt::Debug for FreeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms().map(|(r, g)| format!("{r} {g}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Bidegree `(s, t)` of a nonzero homogeneous element.
pub fn element_degree(x: &FreeElement) -> Result<(u32, u32), FreeModError> {
    let mut iter = x.terms();
    let (r0, g0) = iter.next().ok_or(FreeModError::Zero)?;
    let first = (g0.s, g0.t + r0.degree());
    for (r, g) in iter {
        let here = (g.s, g.t + r.degree());
        if here != first {
            return Err(FreeModError::NotHomogeneous(
                format!("{r0} {g0}"),
                format!("{r} {g}"),
            ));
        }
    }
    Ok(first)
}

/// Wire form: a list of `[exponents, [s, index]]` pairs.
#[derive(Serialize, Deserialize)]
struct WireTerm(MilnorExponent, [u32; 2]);

impl FreeElement {
    /// JSON form, `[[exponents, [s, index]], ...]`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.wire()).expect("serializable")
    }

    fn wire(&self) -> Vec<WireTerm> {
        self.terms()
            .map(|(r, g)| WireTerm(r.clone(), [g.s, g.index]))
            .collect()
    }

    /// Parses the wire form, resolving generator degrees against `res`.
    pub fn from_json(value: &serde_json::Value, res: &Resolution) -> Result<Self, String> {
        let wire: Vec<WireTerm> =
            serde_json::from_value(value.clone()).map_err(|e| e.to_string())?;
        Self::from_wire(wire, |s, index| res.generator_ref(s, index))
    }

    fn from_wire(
        wire: Vec<WireTerm>,
        lookup: impl Fn(u32, u32) -> Option<GeneratorRef>,
    ) -> Result<Self, String> {
        let mut x = FreeElement::zero();
        for WireTerm(r, [s, index]) in wire {
            let g = lookup(s, index)
                .ok_or_else(|| FreeModError::UnknownGenerator { s, index }.to_string())?;
            if x.contains(&r, g) {
                return Err(format!("repeated term {r} {g}"));
            }
            x.add_term(r, g);
        }
        Ok(x)
    }

    /// Parses the wire form with a caller-supplied generator table.
    pub fn parse_with(
        text: &str,
        lookup: impl Fn(u32, u32) -> Option<GeneratorRef>,
    ) -> Result<Self, String> {
        let wire: Vec<WireTerm> = serde_json::from_str(text).map_err(|e| e.to_string())?;
        Self::from_wire(wire, lookup)
    }
}

/// Serializes without generator degrees; deserialization goes through
/// [`FreeElement::from_json`] since degrees come from the resolution.
pub struct WireElement<'a>(pub &'a FreeElement);

impl Serialize for WireElement<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.wire().serialize(serializer)
    }
}

/// A parsed but unresolved element, `(exponents, s, index)` per term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawElement(pub Vec<(MilnorExponent, u32, u32)>);

impl<'de> Deserialize<'de> for RawElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = Vec::<WireTerm>::deserialize(deserializer)?;
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(wire.len());
        for WireTerm(r, [s, index]) in wire {
            if !seen.insert((s, index, r.clone())) {
                return Err(D::Error::custom(format!("repeated term {r}")));
            }
            out.push((r, s, index));
        }
        Ok(RawElement(out))
    }
}

/// The full differential applied to `x`, with the full Milnor product.
pub fn apply_differential(res: &Resolution, x: &FreeElement) -> FreeElement {
    let mut out = FreeElement::zero();
    for (r, g) in x.terms() {
        let d = res.differential(g);
        if r.is_unit() {
            out.add(d);
            continue;
        }
        for (s, h) in d.terms() {
            for t in milnor::multiply(r, s) {
                out.add_term(t, h);
            }
        }
    }
    out
}

/// Ordered basis of `E_R C_{s,t}` for one signature.
#[derive(Clone, Debug)]
pub struct SignatureSlice {
    pub rank: u64,
    pub signature: Signature,
    pub s: u32,
    pub t: u32,
    basis: Vec<(MilnorExponent, GeneratorRef)>,
    index: HashMap<(GeneratorRef, MilnorExponent), usize>,
}

impl SignatureSlice {
    pub(crate) fn new(rank: u64, signature: Signature, s: u32, t: u32) -> Self {
        SignatureSlice {
            rank,
            signature,
            s,
            t,
            basis: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn push(&mut self, r: MilnorExponent, g: GeneratorRef) {
        self.index.insert((g, r.clone()), self.basis.len());
        self.basis.push((r, g));
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[(MilnorExponent, GeneratorRef)] {
        &self.basis
    }

    pub fn position(&self, r: &MilnorExponent, g: GeneratorRef) -> Option<usize> {
        self.index.get(&(g, r.clone())).copied()
    }

    /// The element with coordinates `v` in this slice.
    pub fn embed(&self, v: &GF2Vector) -> FreeElement {
        v.iter_ones()
            .map(|i| (self.basis[i].0.clone(), self.basis[i].1))
            .collect()
    }

    /// Coordinates of the part of `x` lying in this slice.
    pub fn extract(&self, x: &FreeElement) -> GF2Vector {
        let mut v = GF2Vector::zero(self.dim());
        for (r, g) in x.terms() {
            if let Some(i) = self.position(r, g) {
                v.set(i, true);
            }
        }
        v
    }
}

/// `C_{s,t}` split into signature slices, restricted to generators of degree
/// `< gen_limit`.
#[derive(Clone, Debug)]
pub struct SlicedBasis {
    pub s: u32,
    pub t: u32,
    slices: BTreeMap<u64, SignatureSlice>,
}

impl SlicedBasis {
    pub fn new(res: &Resolution, b: &Subalgebra, s: u32, t: u32, gen_limit: u32) -> Self {
        let mut slices: BTreeMap<u64, SignatureSlice> = BTreeMap::new();
        for g in res.generators_below(s, gen_limit.min(t + 1)) {
            for r in cached_basis(t - g.t).iter() {
                let rank = b.rank_of(r);
                slices
                    .entry(rank)
                    .or_insert_with(|| SignatureSlice::new(rank, b.signature_of(r), s, t))
                    .push(r.clone(), g);
            }
        }
        SlicedBasis { s, t, slices }
    }

    /// Nonempty slices in increasing rank order.
    pub fn slices(&self) -> impl Iterator<Item = &SignatureSlice> {
        self.slices.values()
    }

    pub fn get(&self, rank: u64) -> Option<&SignatureSlice> {
        self.slices.get(&rank)
    }

    pub fn dim(&self) -> usize {
        self.slices.values().map(|s| s.dim()).sum()
    }
}

/// Full basis of `C_{s,t}` over generators of degree `< gen_limit`, unsliced.
pub fn full_basis(res: &Resolution, s: u32, t: u32, gen_limit: u32) -> SignatureSlice {
    let mut out = SignatureSlice::new(0, Signature::zero(), s, t);
    for g in res.generators_below(s, gen_limit.min(t + 1)) {
        for r in cached_basis(t - g.t).iter() {
            out.push(r.clone(), g);
        }
    }
    out
}

/// Induced differential `E_R C_{s,t} -> E_R C_{s-1,t}` between two slices of
/// the same rank, via B-trivial products and projection onto that rank.
pub fn induced_matrix(
    res: &Resolution,
    b: &Subalgebra,
    domain: &SignatureSlice,
    codomain: &SignatureSlice,
) -> GF2Matrix {
    let rank = domain.rank;
    let mut m = GF2Matrix::zero(codomain.dim(), domain.dim());
    for (col, (r, g)) in domain.basis().iter().enumerate() {
        for (s, h) in res.differential(*g).terms() {
            for t in b.multiply_btrivial(r, s) {
                if b.rank_of(&t) != rank {
                    continue;
                }
                if let Some(row) = codomain.position(&t, h) {
                    m.flip(row, col);
                }
            }
        }
    }
    m
}

/// Full differential matrix between two unsliced bases.
pub fn full_matrix(res: &Resolution, domain: &SignatureSlice, codomain: &SignatureSlice) -> GF2Matrix {
    let mut m = GF2Matrix::zero(codomain.dim(), domain.dim());
    for (col, (r, g)) in domain.basis().iter().enumerate() {
        for (s, h) in res.differential(*g).terms() {
            for t in milnor::multiply(r, s) {
                if let Some(row) = codomain.position(&t, h) {
                    m.flip(row, col);
                }
            }
        }
    }
    m
}

/// `E_sig C_{s,t}` over all generators of degree `<= t`.
pub fn slice(res: &Resolution, b: &Subalgebra, sig: &Signature, s: u32, t: u32) -> SignatureSlice {
    let rank = b.signature_rank(sig);
    SlicedBasis::new(res, b, s, t, t + 1)
        .slices
        .remove(&rank)
        .unwrap_or_else(|| SignatureSlice::new(rank, sig.clone(), s, t))
}

/// Matrix of the induced differential on `E_sig` at `(s, t)`; zero rows when `s = 0`.
pub fn differential_matrix(
    res: &Resolution,
    b: &Subalgebra,
    sig: &Signature,
    s: u32,
    t: u32,
) -> GF2Matrix {
    let domain = slice(res, b, sig, s, t);
    if s == 0 {
        return GF2Matrix::zero(0, domain.dim());
    }
    let codomain = slice(res, b, sig, s - 1, t);
    induced_matrix(res, b, &domain, &codomain)
}

/// Coordinates of the `sig` part of `x` in the slice basis at `x`'s bidegree.
pub fn extract_component(
    res: &Resolution,
    b: &Subalgebra,
    x: &FreeElement,
    sig: &Signature,
    s: u32,
    t: u32,
) -> GF2Vector {
    slice(res, b, sig, s, t).extract(x)
}
