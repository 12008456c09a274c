//! Admissible subalgebras given by sets of bit positions, together with the
//! signature decomposition they induce on the Milnor basis.
//!
//! A position `P_t^s` stands for bit `2^s` of the exponent `r_t`. A
//! subalgebra `B` is the span of the `Sq(R)` whose set bits all lie in its
//! position set, and the signature of `Sq(S)` is the part of `S` that lies
//! inside that set. Signatures are ranked by reading their bits as a binary
//! number, most significant position first.

use std::fmt;
use std::str::FromStr;

use crate::milnor::{self, BasisTable, MilnorExponent, MilnorSum};

/// The element `P_t^s`: bit `2^s` of the Milnor exponent `r_t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitPosition {
    pub s: u32,
    pub t: u32,
}

impl BitPosition {
    pub fn new(s: u32, t: u32) -> Self {
        assert!(t >= 1, "Milnor slots are 1-based");
        BitPosition { s, t }
    }

    pub fn degree(&self) -> u32 {
        (1u32 << self.s) * milnor::slot_degree(self.t as usize)
    }

    /// Positions of shape `(0, t)` are the Bocksteins (Milnor primitives).
    pub fn is_bockstein(&self) -> bool {
        self.s == 0
    }
}

impl fmt::Display for BitPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P^{}_{}", self.s, self.t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubalgebraError {
    #[error("{name} is not admissible: {reason}")]
    NotAdmissible { name: String, reason: String },
    #[error("{0} contains no Bockstein position (0, t)")]
    NoBockstein(String),
    #[error("{name} is not contained in {family}")]
    WrongContainment { name: String, family: String },
    #[error("unknown subalgebra name {0:?}")]
    UnknownName(String),
    #[error("{name} has {count} positions; at most 63 are supported")]
    TooManyPositions { name: String, count: usize },
}

/// How a subalgebra was built. Determines which applicability bound and
/// which admissibility check apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// A finite sub Hopf algebra (A(n), initial segments, explicit lists).
    Finite,
    /// `F(n)`: all `Sq(R)` with `r_1 = ... = r_n = 0`, cut down to `A(N)`.
    F(u32),
    /// `F'(n)`: `r_1 = ... = r_{n-1} = 0` and `r_n` even, cut down to `A(N)`.
    FPrime(u32),
}

/// Recipe for one of the preset subalgebras.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubalgebraSpec {
    /// `A(n)`, generated by `Sq^1, ..., Sq^{2^n}`.
    A(u32),
    /// The span of the first `k` positions in the segment ordering.
    Segment(usize),
    F(u32),
    FPrime(u32),
}

impl SubalgebraSpec {
    /// Infinite families need a truncation before use.
    pub fn needs_truncation(&self) -> bool {
        matches!(self, SubalgebraSpec::F(_) | SubalgebraSpec::FPrime(_))
    }
}

impl fmt::Display for SubalgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SubalgebraSpec::A(n) => write!(f, "A({n})"),
            SubalgebraSpec::Segment(2) => write!(f, "E(Sq1,Sq(0,1))"),
            SubalgebraSpec::Segment(k) => match a_of_segment(k) {
                Some(n) => write!(f, "A({n})"),
                None => write!(f, "seg({k})"),
            },
            SubalgebraSpec::F(n) => write!(f, "F({n})"),
            SubalgebraSpec::FPrime(n) => write!(f, "F'({n})"),
        }
    }
}

impl FromStr for SubalgebraSpec {
    type Err = SubalgebraError;

    fn from_str(name: &str) -> Result<Self, Self::Err> {
        let unknown = || SubalgebraError::UnknownName(name.to_string());
        let trimmed = name.trim();
        if trimmed == "E" || trimmed == "E(Sq1,Sq(0,1))" {
            return Ok(SubalgebraSpec::Segment(2));
        }
        let (head, rest) = trimmed.split_once('(').ok_or_else(unknown)?;
        let arg = rest.strip_suffix(')').ok_or_else(unknown)?;
        let value: u32 = arg.trim().parse().map_err(|_| unknown())?;
        match head {
            "A" => Ok(SubalgebraSpec::A(value)),
            "F" if value >= 1 => Ok(SubalgebraSpec::F(value)),
            "F'" if value >= 1 => Ok(SubalgebraSpec::FPrime(value)),
            "seg" if value >= 1 => Ok(SubalgebraSpec::Segment(value as usize)),
            _ => Err(unknown()),
        }
    }
}

fn a_of_segment(k: usize) -> Option<u32> {
    // A(n) is the segment of length (n+1)(n+2)/2.
    (0u32..16).find(|&n| ((n + 1) * (n + 2) / 2) as usize == k)
}

/// All positions `P_t^s` in the segment ordering: by `t + s`, then by `s`.
pub fn segment_order(count: usize) -> Vec<BitPosition> {
    let mut out = Vec::with_capacity(count);
    let mut sum = 1;
    while out.len() < count {
        for s in 0..sum {
            if out.len() == count {
                break;
            }
            out.push(BitPosition::new(s, sum - s));
        }
        sum += 1;
    }
    out
}

/// An admissible subalgebra of the Steenrod algebra with its signature ordering.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subalgebra {
    name: String,
    family: Family,
    truncation: Option<u32>,
    /// Most significant first.
    positions: Vec<BitPosition>,
    /// `masks[t - 1]`: bits of slot `t` inside the subalgebra.
    masks: Vec<u64>,
    /// `weights[t - 1][s]`: rank contribution of position `(s, t)`.
    weights: Vec<Vec<u64>>,
}

impl fmt::Debug for Subalgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl Subalgebra {
    fn build(
        name: String,
        family: Family,
        truncation: Option<u32>,
        mut positions: Vec<BitPosition>,
    ) -> Result<Self, SubalgebraError> {
        positions.sort_by(|a, b| b.t.cmp(&a.t).then(b.s.cmp(&a.s)));
        positions.dedup();
        if positions.len() > 63 {
            return Err(SubalgebraError::TooManyPositions {
                name,
                count: positions.len(),
            });
        }
        let max_t = positions.iter().map(|p| p.t).max().unwrap_or(0) as usize;
        let mut masks = vec![0u64; max_t];
        let mut weights = vec![Vec::new(); max_t];
        let n = positions.len();
        for (k, p) in positions.iter().enumerate() {
            let slot = p.t as usize - 1;
            masks[slot] |= 1 << p.s;
            let w = &mut weights[slot];
            if w.len() <= p.s as usize {
                w.resize(p.s as usize + 1, 0);
            }
            w[p.s as usize] = 1 << (n - 1 - k);
        }
        Ok(Subalgebra {
            name,
            family,
            truncation,
            positions,
            masks,
            weights,
        })
    }

    /// A finite sub Hopf algebra from an explicit position list; checks the
    /// profile condition `p(i + j) >= p(i) - j`.
    pub fn from_positions(
        name: impl Into<String>,
        positions: Vec<BitPosition>,
    ) -> Result<Self, SubalgebraError> {
        let b = Self::build(name.into(), Family::Finite, None, positions)?;
        b.check_profile()?;
        Ok(b)
    }

    /// The trivial subalgebra `F_2`; every signature is zero.
    pub fn trivial() -> Self {
        Self::build("1".to_string(), Family::Finite, None, Vec::new()).expect("empty is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Name plus truncation, unique for distinct position sets of presets.
    pub fn label(&self) -> String {
        match self.truncation {
            Some(n) => format!("{}[A({n})]", self.name),
            None => self.name.clone(),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn truncation(&self) -> Option<u32> {
        self.truncation
    }

    /// Positions, most significant first.
    pub fn positions(&self) -> &[BitPosition] {
        &self.positions
    }

    /// Per-slot bit masks, `masks()[t - 1]` for slot `t`.
    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn mask(&self, slot: usize) -> u64 {
        self.masks.get(slot - 1).copied().unwrap_or(0)
    }

    pub fn contains_position(&self, p: BitPosition) -> bool {
        self.mask(p.t as usize) & (1 << p.s) != 0
    }

    /// `|S_B|`.
    pub fn signature_count(&self) -> u128 {
        1u128 << self.positions.len()
    }

    /// Degree of the top element `Sq(R_max)`.
    pub fn tau(&self) -> u32 {
        self.positions.iter().map(|p| p.degree()).sum()
    }

    /// The derived profile: `p(t)` is the number of low bits of slot `t`
    /// present, valid when each slot's mask is a run of low bits.
    pub fn profile(&self) -> Option<Vec<u32>> {
        self.masks
            .iter()
            .map(|&m| {
                let p = m.trailing_ones();
                (m >> p == 0).then_some(p)
            })
            .collect()
    }

    fn check_profile(&self) -> Result<(), SubalgebraError> {
        let fail = |reason: String| SubalgebraError::NotAdmissible {
            name: self.name.clone(),
            reason,
        };
        let profile = self
            .profile()
            .ok_or_else(|| fail("a slot is not a run of low bits".to_string()))?;
        let p = |i: usize| profile.get(i - 1).copied().unwrap_or(0) as i64;
        for i in 1..=profile.len() {
            for j in 1..=profile.len() {
                if p(i + j) < p(i) - j as i64 {
                    return Err(fail(format!(
                        "p({}) = {} < p({i}) - {j} = {}",
                        i + j,
                        p(i + j),
                        p(i) - j as i64
                    )));
                }
            }
        }
        Ok(())
    }

    /// Smallest degree of a position of the untruncated family that the
    /// truncation dropped; `None` for finite subalgebras.
    pub fn min_excluded_degree(&self) -> Option<u32> {
        let cap = self.truncation?;
        let (first_slot, n) = match self.family {
            Family::Finite => return None,
            Family::F(n) => (n + 1, n),
            Family::FPrime(n) => (n, n),
        };
        let mut best = u32::MAX;
        for t in first_slot..=cap + 3 {
            let lowest = if matches!(self.family, Family::FPrime(_)) && t == n {
                1
            } else {
                0
            };
            let mut s = lowest;
            while self.contains_position(BitPosition::new(s, t)) {
                s += 1;
            }
            best = best.min(BitPosition::new(s, t).degree());
        }
        Some(best)
    }

    /// True when every element of degree `<= window` is unaffected by truncation.
    pub fn covers_degree(&self, window: u32) -> bool {
        self.min_excluded_degree().is_none_or(|d| d > window)
    }

    /// Smallest `n` with `B ⊆ A(n)`.
    pub fn a_containment(&self) -> u32 {
        self.positions
            .iter()
            .map(|p| p.s + p.t - 1)
            .max()
            .unwrap_or(0)
    }

    pub fn contained_in_a(&self, n: u32) -> bool {
        self.positions.iter().all(|p| p.s + p.t <= n + 1)
    }

    pub fn contained_in_f(&self, n: u32) -> bool {
        self.positions.iter().all(|p| p.t > n)
    }

    pub fn contained_in_f_prime(&self, n: u32) -> bool {
        self.positions
            .iter()
            .all(|p| p.t > n || (p.t == n && p.s >= 1))
    }

    /// Number of positions of degree `<= window`; a subalgebra with none of
    /// them acts trivially on that range.
    pub fn positions_within(&self, window: u32) -> usize {
        self.positions
            .iter()
            .filter(|p| p.degree() <= window)
            .count()
    }

    pub fn signature_of(&self, s: &MilnorExponent) -> Signature {
        let bits: Vec<u32> = s
            .exponents()
            .iter()
            .enumerate()
            .map(|(i, &r)| (r as u64 & self.masks.get(i).copied().unwrap_or(0)) as u32)
            .collect();
        Signature {
            value: MilnorExponent::new(bits),
        }
    }

    /// Rank of the signature of `s`, without materializing it.
    pub fn rank_of(&self, s: &MilnorExponent) -> u64 {
        let mut rank = 0;
        for (i, &r) in s.exponents().iter().enumerate() {
            let Some(&mask) = self.masks.get(i) else { break };
            let mut bits = r as u64 & mask;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                rank |= self.weights[i][b];
                bits &= bits - 1;
            }
        }
        rank
    }

    pub fn signature_rank(&self, sig: &Signature) -> u64 {
        debug_assert!(self.is_signature(&sig.value));
        self.rank_of(&sig.value)
    }

    /// True when `Sq(value)` lies in the subalgebra, i.e. `value` is a signature.
    pub fn is_signature(&self, value: &MilnorExponent) -> bool {
        value
            .exponents()
            .iter()
            .enumerate()
            .all(|(i, &r)| r as u64 & !self.masks.get(i).copied().unwrap_or(0) == 0)
    }

    /// The signature of a given rank.
    pub fn signature_at(&self, rank: u64) -> Signature {
        let n = self.positions.len();
        let mut slots = vec![0u32; self.masks.len()];
        for (k, p) in self.positions.iter().enumerate() {
            if rank >> (n - 1 - k) & 1 == 1 {
                slots[p.t as usize - 1] |= 1 << p.s;
            }
        }
        Signature {
            value: MilnorExponent::new(slots),
        }
    }

    /// All signatures in increasing rank order. Only sensible for small position sets.
    pub fn enumerate_signatures(&self) -> Vec<Signature> {
        assert!(
            self.positions.len() <= 24,
            "{} has too many signatures to list",
            self.name
        );
        (0..1u64 << self.positions.len())
            .map(|r| self.signature_at(r))
            .collect()
    }

    /// Signatures of degree `<= max_degree`, in increasing rank order.
    pub fn signatures_up_to(&self, max_degree: u32) -> Vec<(u64, Signature)> {
        let n = self.positions.len();
        let mut out = Vec::new();
        // Depth-first over positions, pruning on degree.
        fn walk(
            b: &Subalgebra,
            k: usize,
            n: usize,
            rank: u64,
            degree: u32,
            max_degree: u32,
            out: &mut Vec<u64>,
        ) {
            if k == n {
                out.push(rank);
                return;
            }
            walk(b, k + 1, n, rank, degree, max_degree, out);
            let d = degree + b.positions[k].degree();
            if d <= max_degree {
                walk(b, k + 1, n, rank | 1 << (n - 1 - k), d, max_degree, out);
            }
        }
        let mut ranks = Vec::new();
        walk(self, 0, n, 0, 0, max_degree, &mut ranks);
        ranks.sort_unstable();
        for r in ranks {
            out.push((r, self.signature_at(r)));
        }
        out
    }

    /// Degrees of the smallest and largest Bockstein in `B`: `Ext_B^{s,t}`
    /// vanishes for `t < s * low` and for `t > s * high`.
    pub fn vanishing_bounds(&self) -> Result<(u32, u32), SubalgebraError> {
        let degrees = self
            .positions
            .iter()
            .filter(|p| p.is_bockstein())
            .map(|p| p.degree());
        let low = degrees.clone().min();
        let high = degrees.max();
        match (low, high) {
            (Some(l), Some(h)) => Ok((l, h)),
            _ => Err(SubalgebraError::NoBockstein(self.label())),
        }
    }

    /// The sub-sum of `Sq(R) * Sq(S)` over `B`-trivial Milnor matrices.
    pub fn multiply_btrivial(&self, r: &MilnorExponent, s: &MilnorExponent) -> MilnorSum {
        milnor::multiply_masked(r, s, &self.masks)
    }

    /// Dimension of the zero-signature part `E_0 A` in each degree up to the table bound.
    pub fn zero_slice_dims(&self, table: &BasisTable, max_degree: u32) -> Vec<usize> {
        (0..=max_degree)
            .map(|n| {
                table
                    .get(n)
                    .iter()
                    .filter(|s| self.rank_of(s) == 0)
                    .count()
            })
            .collect()
    }
}

/// A signature: an exponent whose set bits all lie in the subalgebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub value: MilnorExponent,
}

impl Signature {
    pub fn zero() -> Self {
        Signature {
            value: MilnorExponent::unit(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_unit()
    }

    pub fn degree(&self) -> u32 {
        self.value.degree()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Positions of `F(n) ∩ A(cap)`.
fn f_positions(n: u32, cap: u32) -> Vec<BitPosition> {
    let mut out = Vec::new();
    for t in n + 1..=cap + 1 {
        for s in 0..cap + 2 - t {
            out.push(BitPosition::new(s, t));
        }
    }
    out
}

/// Positions of `F'(n) ∩ A(cap)`.
fn f_prime_positions(n: u32, cap: u32) -> Vec<BitPosition> {
    let mut out = f_positions(n, cap);
    if cap + 2 > n {
        for s in 1..cap + 2 - n {
            out.push(BitPosition::new(s, n));
        }
    }
    out
}

/// Builds a preset subalgebra. Infinite families are intersected with
/// `A(truncation)`; finite presets ignore the truncation.
pub fn make_subalgebra(
    spec: SubalgebraSpec,
    truncation: Option<u32>,
) -> Result<Subalgebra, SubalgebraError> {
    let name = spec.to_string();
    match spec {
        SubalgebraSpec::A(n) => {
            let mut positions = Vec::new();
            for t in 1..=n + 1 {
                for s in 0..n + 2 - t {
                    positions.push(BitPosition::new(s, t));
                }
            }
            Subalgebra::from_positions(name, positions)
        }
        SubalgebraSpec::Segment(k) => Subalgebra::from_positions(name, segment_order(k)),
        SubalgebraSpec::F(n) => {
            let cap = truncation.ok_or_else(|| SubalgebraError::NotAdmissible {
                name: name.clone(),
                reason: "infinite family needs a truncation".to_string(),
            })?;
            let b = Subalgebra::build(name, Family::F(n), Some(cap), f_positions(n, cap))?;
            b.check_profile()?;
            Ok(b)
        }
        SubalgebraSpec::FPrime(n) => {
            let cap = truncation.ok_or_else(|| SubalgebraError::NotAdmissible {
                name: name.clone(),
                reason: "infinite family needs a truncation".to_string(),
            })?;
            let b = Subalgebra::build(
                name,
                Family::FPrime(n),
                Some(cap),
                f_prime_positions(n, cap),
            )?;
            b.check_f_prime(n, cap)?;
            Ok(b)
        }
    }
}

/// Builds a preset with the smallest truncation that leaves every degree up
/// to `window` untouched.
pub fn make_for_window(spec: SubalgebraSpec, window: u32) -> Result<Subalgebra, SubalgebraError> {
    if !spec.needs_truncation() {
        return make_subalgebra(spec, None);
    }
    let n = match spec {
        SubalgebraSpec::F(n) | SubalgebraSpec::FPrime(n) => n,
        _ => unreachable!(),
    };
    let mut cap = n;
    loop {
        let b = make_subalgebra(spec, Some(cap))?;
        if b.covers_degree(window) {
            return Ok(b);
        }
        cap += 1;
    }
}

impl Subalgebra {
    fn check_f_prime(&self, n: u32, cap: u32) -> Result<(), SubalgebraError> {
        let mut expected = f_prime_positions(n, cap);
        expected.sort_by(|a, b| b.t.cmp(&a.t).then(b.s.cmp(&a.s)));
        if expected != self.positions {
            return Err(SubalgebraError::NotAdmissible {
                name: self.name.clone(),
                reason: "position set is not F'(n) ∩ A(N)".to_string(),
            });
        }
        Ok(())
    }
}
