//! Milnor basis arithmetic for the mod-2 Steenrod algebra.
//!
//! A basis element `Sq(r_1, r_2, ...)` is stored as its exponent sequence with
//! trailing zeros removed. Products are computed by enumerating Milnor
//! matrices; a product term survives mod 2 exactly when the entries along
//! each diagonal are bitwise disjoint.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

/// Degree of the Milnor generator `xi_slot`, i.e. `2^slot - 1` (slots are 1-based).
#[inline]
pub fn slot_degree(slot: usize) -> u32 {
    (1u32 << slot) - 1
}

/// An element `Sq(R)` of the Milnor basis.
///
/// Ordering is shortest sequence first, then lexicographic. This is the
/// frozen enumeration order used for every basis in the crate.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct MilnorExponent(Vec<u32>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("exponent sequence {0:?} has trailing zeros")]
pub struct NonCanonical(pub Vec<u32>);

impl MilnorExponent {
    /// The unit `Sq(0)`.
    pub fn unit() -> Self {
        MilnorExponent(Vec::new())
    }

    /// Builds an exponent, trimming trailing zeros.
    pub fn new(mut exponents: Vec<u32>) -> Self {
        while exponents.last() == Some(&0) {
            exponents.pop();
        }
        MilnorExponent(exponents)
    }

    pub fn from_slice(exponents: &[u32]) -> Self {
        Self::new(exponents.to_vec())
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// `r_slot` for a 1-based slot, zero past the end.
    pub fn get(&self, slot: usize) -> u32 {
        if slot == 0 {
            return 0;
        }
        self.0.get(slot - 1).copied().unwrap_or(0)
    }

    /// Number of slots, i.e. the index of the last nonzero entry.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        degree(self)
    }
}

impl TryFrom<Vec<u32>> for MilnorExponent {
    type Error = NonCanonical;

    fn try_from(value: Vec<u32>) -> Result<Self, Self::Error> {
        if value.last() == Some(&0) {
            Err(NonCanonical(value))
        } else {
            Ok(MilnorExponent(value))
        }
    }
}

impl From<MilnorExponent> for Vec<u32> {
    fn from(value: MilnorExponent) -> Self {
        value.0
    }
}

impl Ord for MilnorExponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MilnorExponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MilnorExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MilnorExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "Sq(0)");
        }
        write!(f, "Sq(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

/// A mod-2 formal sum of Milnor basis elements.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct MilnorSum {
    terms: BTreeSet<MilnorExponent>,
}

impl MilnorSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(term: MilnorExponent) -> Self {
        let mut sum = Self::default();
        sum.add_term(term);
        sum
    }

    /// Adds a term mod 2: a repeated term cancels.
    pub fn add_term(&mut self, term: MilnorExponent) {
        if !self.terms.remove(&term) {
            self.terms.insert(term);
        }
    }

    pub fn add(&mut self, other: &MilnorSum) {
        for term in &other.terms {
            self.add_term(term.clone());
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

    pub fn contains(&self, term: &MilnorExponent) -> bool {
        self.terms.contains(term)
    }

    pub fn iter(&self) -> impl Iterator<Item = &MilnorExponent> {
        self.terms.iter()
    }

    /// Product with an element on the right, extended linearly.
    pub fn mul_right(&self, right: &MilnorExponent) -> MilnorSum {
        let mut out = MilnorSum::zero();
        for term in &self.terms {
            out.add(&multiply(term, right));
        }
        out
    }

    /// Product with an element on the left, extended linearly.
    pub fn mul_left(&self, left: &MilnorExponent) -> MilnorSum {
        let mut out = MilnorSum::zero();
        for term in &self.terms {
            out.add(&multiply(left, term));
        }
        out
    }
}

impl FromIterator<MilnorExponent> for MilnorSum {
    fn from_iter<I: IntoIterator<Item = MilnorExponent>>(iter: I) -> Self {
        let mut sum = MilnorSum::zero();
        for term in iter {
            sum.add_term(term);
        }
        sum
    }
}

impl IntoIterator for MilnorSum {
    type Item = MilnorExponent;
    type IntoIter = std::collections::btree_set::IntoIter<MilnorExponent>;

    fn into_iter(self) -> Self::IntoIter {
        self.terms.into_iter()
    }
}

impl fmt::Debug for MilnorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, term) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{term}")?;
        }
        Ok(())
    }
}

pub fn degree(r: &MilnorExponent) -> u32 {
    r.0.iter()
        .enumerate()
        .map(|(i, &ri)| ri * slot_degree(i + 1))
        .sum()
}

/// All Milnor basis elements of degree `n`, in the crate-wide basis order.
pub fn basis_of_degree(n: u32) -> Vec<MilnorExponent> {
    let mut top = 0;
    while slot_degree(top + 1) <= n {
        top += 1;
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; top];
    fill_slots(top, n, &mut current, &mut out);
    out.sort();
    out
}

fn fill_slots(slot: usize, remaining: u32, current: &mut [u32], out: &mut Vec<MilnorExponent>) {
    if slot == 0 {
        if remaining == 0 {
            out.push(MilnorExponent::from_slice(current));
        }
        return;
    }
    let weight = slot_degree(slot);
    if slot == 1 {
        current[0] = remaining;
        out.push(MilnorExponent::from_slice(current));
        current[0] = 0;
        return;
    }
    for r in 0..=remaining / weight {
        current[slot - 1] = r;
        fill_slots(slot - 1, remaining - r * weight, current, out);
    }
    current[slot - 1] = 0;
}

/// Process-wide memo of [`basis_of_degree`], grown on demand.
pub fn cached_basis(n: u32) -> Arc<[MilnorExponent]> {
    static CACHE: OnceLock<RwLock<Vec<Arc<[MilnorExponent]>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(Vec::new()));
    if let Some(b) = cache.read().expect("basis cache poisoned").get(n as usize) {
        return b.clone();
    }
    let mut guard = cache.write().expect("basis cache poisoned");
    while guard.len() <= n as usize {
        let d = guard.len() as u32;
        guard.push(basis_of_degree(d).into());
    }
    guard[n as usize].clone()
}

/// Precomputed Milnor bases for all degrees up to a bound.
#[derive(Clone, Debug, Default)]
pub struct BasisTable {
    by_degree: Vec<Vec<MilnorExponent>>,
}

impl BasisTable {
    pub fn new(max_degree: u32) -> Self {
        BasisTable {
            by_degree: (0..=max_degree).map(basis_of_degree).collect(),
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.by_degree.len() as u32 - 1
    }

    /// Basis in degree `n`; panics past the precomputed bound.
    pub fn get(&self, n: u32) -> &[MilnorExponent] {
        &self.by_degree[n as usize]
    }

    pub fn dim(&self, n: u32) -> usize {
        self.by_degree[n as usize].len()
    }
}

/// The full Milnor product `Sq(R) * Sq(S)`.
pub fn multiply(r: &MilnorExponent, s: &MilnorExponent) -> MilnorSum {
    let mut out = MilnorSum::zero();
    MatrixEnumerator::new(r.exponents(), s.exponents(), None).run(&mut out);
    out
}

/// The part of `Sq(R) * Sq(S)` coming from Milnor matrices that keep the
/// masked bits of each `r_i` in column zero.
///
/// `row_masks[i - 1]` holds the bit positions of slot `i` that belong to the
/// subalgebra. A matrix is kept when no entry `x_{i,j}` with `j >= 1`
/// contributes `2^j * x_{i,j}` bits inside the mask of row `i`.
pub fn multiply_masked(r: &MilnorExponent, s: &MilnorExponent, row_masks: &[u64]) -> MilnorSum {
    let mut out = MilnorSum::zero();
    MatrixEnumerator::new(r.exponents(), s.exponents(), Some(row_masks)).run(&mut out);
    out
}

/// Depth-first enumeration of Milnor matrices.
///
/// Rows `1..=m` are filled one at a time; within a row the entries
/// `x_{i,n}, ..., x_{i,1}` are chosen and `x_{i,0}` takes the remainder.
/// The zeroth row (`x_{0,j}`) receives what is left of each column at the
/// end. Every entry is checked against the running diagonal sum, so a
/// branch dies as soon as two entries on one diagonal share a bit.
struct MatrixEnumerator<'a> {
    r: &'a [u32],
    row_masks: Option<&'a [u64]>,
    col_rem: Vec<u32>,
    diag: Vec<u32>,
}

impl<'a> MatrixEnumerator<'a> {
    fn new(r: &'a [u32], s: &'a [u32], row_masks: Option<&'a [u64]>) -> Self {
        let mut col_rem = Vec::with_capacity(s.len() + 1);
        col_rem.push(0);
        col_rem.extend_from_slice(s);
        MatrixEnumerator {
            r,
            row_masks,
            col_rem,
            diag: vec![0; r.len() + s.len() + 1],
        }
    }

    fn cols(&self) -> usize {
        self.col_rem.len() - 1
    }

    fn mask(&self, row: usize) -> u64 {
        self.row_masks
            .and_then(|m| m.get(row - 1).copied())
            .unwrap_or(0)
    }

    fn run(mut self, out: &mut MilnorSum) {
        if self.r.is_empty() {
            self.finish(out);
        } else {
            let first = self.r[0];
            self.fill_row(1, self.cols(), first, out);
        }
    }

    fn fill_row(&mut self, row: usize, col: usize, remaining: u32, out: &mut MilnorSum) {
        if col == 0 {
            // x_{row,0} takes whatever is left of r_row.
            let diag = &mut self.diag[row];
            if *diag & remaining != 0 {
                return;
            }
            *diag |= remaining;
            if row == self.r.len() {
                self.finish(out);
            } else {
                let next = self.r[row];
                self.fill_row(row + 1, self.cols(), next, out);
            }
            self.diag[row] &= !remaining;
            return;
        }
        let max = (remaining >> col).min(self.col_rem[col]);
        let mask = self.mask(row);
        let d = row + col;
        for x in 0..=max {
            if x != 0 {
                if self.diag[d] & x != 0 {
                    continue;
                }
                if ((x as u64) << col) & mask != 0 {
                    continue;
                }
            }
            self.diag[d] |= x;
            self.col_rem[col] -= x;
            self.fill_row(row, col - 1, remaining - (x << col), out);
            self.col_rem[col] += x;
            self.diag[d] &= !x;
        }
    }

    fn finish(&mut self, out: &mut MilnorSum) {
        let n = self.cols();
        for j in 1..=n {
            if self.diag[j] & self.col_rem[j] != 0 {
                return;
            }
        }
        let mut t: Vec<u32> = self.diag[1..].to_vec();
        for j in 1..=n {
            t[j - 1] |= self.col_rem[j];
        }
        out.add_term(MilnorExponent::new(t));
    }
}
