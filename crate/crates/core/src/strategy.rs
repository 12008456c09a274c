//! Applicability predicates and subalgebra selection.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use crate::milnor::cached_basis;
use crate::subalgebra::{
    make_for_window, segment_order, Subalgebra, SubalgebraError, SubalgebraSpec,
};

/// `rho_n = 2^{n+1} - 1`, the degree of the first Bockstein outside `A(n)`.
pub fn rho(n: u32) -> u64 {
    (1u64 << (n + 1)) - 1
}

/// Below the vanishing line: `B ⊆ A(n)` and `t > rho_n (s + 1) + tau_B`.
pub fn applicable_below(b: &Subalgebra, n: u32, s: u32, t: u32) -> Result<bool, SubalgebraError> {
    if !b.contained_in_a(n) {
        return Err(SubalgebraError::WrongContainment {
            name: b.label(),
            family: format!("A({n})"),
        });
    }
    Ok(t as u64 > rho(n) * (s as u64 + 1) + b.tau() as u64)
}

/// Above the vanishing line: `t < (2^{n+1} - 1) s` for `B ⊆ F(n)`, or
/// `t < (2^{n+1} - 2) s` for `B ⊆ F'(n)` when `primed`.
pub fn applicable_above(
    b: &Subalgebra,
    n: u32,
    s: u32,
    t: u32,
    primed: bool,
) -> Result<bool, SubalgebraError> {
    let (inside, family, slope) = if primed {
        (b.contained_in_f_prime(n), format!("F'({n})"), rho(n) - 1)
    } else {
        (b.contained_in_f(n), format!("F({n})"), rho(n))
    };
    if n == 0 || !inside {
        return Err(SubalgebraError::WrongContainment {
            name: b.label(),
            family,
        });
    }
    Ok((t as u64) < slope * s as u64)
}

/// Largest `n >= 1` with `B ⊆ F(n)`.
fn max_f(b: &Subalgebra) -> Option<u32> {
    let n = b.positions().iter().map(|p| p.t - 1).min()?;
    (n >= 1).then_some(n)
}

/// Largest `n >= 1` with `B ⊆ F'(n)`.
fn max_f_prime(b: &Subalgebra) -> Option<u32> {
    let n = b
        .positions()
        .iter()
        .map(|p| if p.s >= 1 { p.t } else { p.t - 1 })
        .min()?;
    (n >= 1).then_some(n)
}

/// Whether the filtered step at `(s, t)` is safe with `B`: some vanishing
/// bound applies and the truncation does not reach degree `t`.
pub fn is_applicable(b: &Subalgebra, s: u32, t: u32) -> bool {
    if b.positions().is_empty() {
        return true;
    }
    if !b.covers_degree(t) {
        return false;
    }
    let below = applicable_below(b, b.a_containment(), s, t).unwrap_or(false);
    let above = max_f(b).is_some_and(|n| applicable_above(b, n, s, t, false).unwrap_or(false));
    let above_primed =
        max_f_prime(b).is_some_and(|n| applicable_above(b, n, s, t, true).unwrap_or(false));
    below || above || above_primed
}

/// Which side of the vanishing line `auto` tries first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Among all applicable candidates, the one with the smallest zero-signature
    /// part `E_0 A` through degree `t`.
    Cheapest,
    /// Largest applicable initial segment, else the first applicable `F'(n)`/`F(n)`.
    Below,
    /// First applicable `F'(n)`/`F(n)`, else the largest initial segment.
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Naive,
    Auto(Regime),
    Fixed(SubalgebraSpec),
}

/// Built candidates and their cost, keyed by preset and degree.
type CandidateMemo = HashMap<(SubalgebraSpec, u32), Option<(Subalgebra, u64)>>;

/// Selection policy for the filtered algorithm.
#[derive(Clone)]
pub struct Strategy {
    mode: Mode,
    memo: Arc<Mutex<CandidateMemo>>,
}

impl fmt::Debug for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Strategy({self})")
    }
}

impl PartialEq for Strategy {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode
    }
}

impl Strategy {
    pub fn new(mode: Mode) -> Self {
        Strategy {
            mode,
            memo: Arc::default(),
        }
    }

    pub fn naive() -> Self {
        Self::new(Mode::Naive)
    }

    pub fn auto() -> Self {
        Self::new(Mode::Auto(Regime::Cheapest))
    }

    pub fn fixed(spec: SubalgebraSpec) -> Self {
        Self::new(Mode::Fixed(spec))
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Preset built for degree window `t`, with its `E_0 A` size through `t`.
    fn candidate(&self, spec: SubalgebraSpec, t: u32) -> Option<(Subalgebra, u64)> {
        let key = (spec, t);
        if let Some(hit) = self.memo.lock().expect("strategy memo").get(&key) {
            return hit.clone();
        }
        let built = make_for_window(spec, t).ok().map(|b| {
            let cost = (0..=t)
                .map(|d| cached_basis(d).iter().filter(|r| b.rank_of(r) == 0).count() as u64)
                .sum();
            (b, cost)
        });
        self.memo
            .lock()
            .expect("strategy memo")
            .insert(key, built.clone());
        built
    }

    /// Initial segments that could matter at degree `t`, smallest first.
    pub fn below_candidates(&self, t: u32) -> Vec<SubalgebraSpec> {
        let mut out = Vec::new();
        for k in 1.. {
            let tau: u32 = segment_order(k).iter().map(|p| p.degree()).sum();
            if tau >= t {
                break;
            }
            out.push(SubalgebraSpec::Segment(k));
        }
        out
    }

    /// `F'(1), F(1), F'(2), F(2), ...` while their generators fit below degree `t`.
    pub fn above_candidates(&self, t: u32) -> Vec<SubalgebraSpec> {
        let mut out = Vec::new();
        let mut n = 1;
        while rho(n) - 1 <= t as u64 && n < 16 {
            out.push(SubalgebraSpec::FPrime(n));
            out.push(SubalgebraSpec::F(n));
            n += 1;
        }
        out
    }

    /// Subalgebra for the step at `(s, t)`, or `None` for the naive step.
    pub fn choose(&self, s: u32, t: u32) -> Option<Subalgebra> {
        let usable = |spec: SubalgebraSpec| {
            self.candidate(spec, t)
                .filter(|(b, _)| b.positions_within(t) > 0 && is_applicable(b, s, t))
        };
        match self.mode {
            Mode::Naive => None,
            Mode::Fixed(spec) => usable(spec).map(|(b, _)| b),
            Mode::Auto(regime) => {
                let below = || {
                    self.below_candidates(t)
                        .into_iter()
                        .rev()
                        .find_map(usable)
                };
                let above = || self.above_candidates(t).into_iter().find_map(usable);
                match regime {
                    Regime::Below => below().or_else(above).map(|(b, _)| b),
                    Regime::Above => above().or_else(below).map(|(b, _)| b),
                    Regime::Cheapest => {
                        let mut best: Option<(Subalgebra, u64)> = None;
                        let specs = self
                            .below_candidates(t)
                            .into_iter()
                            .rev()
                            .chain(self.above_candidates(t));
                        for (b, cost) in specs.filter_map(usable) {
                            if best.as_ref().is_none_or(|(_, c)| cost < *c) {
                                best = Some((b, cost));
                            }
                        }
                        best.map(|(b, _)| b)
                    }
                }
            }
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            Mode::Naive => write!(f, "naive"),
            Mode::Auto(Regime::Cheapest) => write!(f, "auto"),
            Mode::Auto(Regime::Below) => write!(f, "auto:below"),
            Mode::Auto(Regime::Above) => write!(f, "auto:above"),
            Mode::Fixed(spec) => write!(f, "fixed:{spec}"),
        }
    }
}

impl FromStr for Strategy {
    type Err = SubalgebraError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mode = match text {
            "naive" => Mode::Naive,
            "auto" => Mode::Auto(Regime::Cheapest),
            "auto:below" => Mode::Auto(Regime::Below),
            "auto:above" => Mode::Auto(Regime::Above),
            other => match other.strip_prefix("fixed:") {
                Some(name) => Mode::Fixed(name.parse()?),
                None => return Err(SubalgebraError::UnknownName(other.to_string())),
            },
        };
        Ok(Strategy::new(mode))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subalgebra::{make_subalgebra, Family};

    fn preset(name: &str) -> Subalgebra {
        make_subalgebra(name.parse().unwrap(), None).unwrap()
    }

    #[test]
    fn below_predicate() {
        let a2 = preset("A(2)");
        assert_eq!(a2.tau(), 23);
        assert!(applicable_below(&a2, 2, 14, 134).unwrap());
        assert!(!applicable_below(&a2, 2, 14, 128).unwrap());
        let a0 = preset("A(0)");
        assert!(!applicable_below(&a0, 0, 5, 6).unwrap());
        assert!(!applicable_below(&a0, 0, 5, 7).unwrap());
        assert!(applicable_below(&a0, 0, 5, 8).unwrap());
        let a1 = preset("A(1)");
        assert!(applicable_below(&a1, 1, 1, 19).unwrap());
        assert!(!applicable_below(&a1, 1, 1, 12).unwrap());
        assert!(matches!(
            applicable_below(&a1, 0, 1, 19),
            Err(SubalgebraError::WrongContainment { .. })
        ));
    }

    #[test]
    fn above_predicate() {
        let f2 = make_for_window(SubalgebraSpec::F(2), 149).unwrap();
        assert!(applicable_above(&f2, 2, 35, 149, false).unwrap());
        let f1 = make_for_window(SubalgebraSpec::F(1), 40).unwrap();
        // 0 < t - s < 2s - 3 implies t < 3s.
        for s in 1..20 {
            for t in s + 1..3 * s {
                if ((t - s) as i64) < 2 * s as i64 - 3 {
                    assert!(applicable_above(&f1, 1, s, t, false).unwrap());
                }
            }
        }
        let fp1 = make_for_window(SubalgebraSpec::FPrime(1), 40).unwrap();
        assert!(applicable_above(&fp1, 1, 10, 15, true).unwrap());
        assert!(!applicable_above(&fp1, 1, 10, 20, true).unwrap());
        assert!(applicable_above(&fp1, 1, 10, 15, false).is_err());
        assert!(applicable_above(&preset("A(1)"), 1, 10, 15, false).is_err());
    }

    #[test]
    fn generic_applicability() {
        let fp1 = make_for_window(SubalgebraSpec::FPrime(1), 20).unwrap();
        assert!(is_applicable(&fp1, 10, 15));
        assert!(!is_applicable(&fp1, 10, 20));
        // F(2) lies inside F'(2) as well; the weaker bound is not needed.
        let f2 = make_for_window(SubalgebraSpec::F(2), 20).unwrap();
        assert!(is_applicable(&f2, 3, 20));
        assert!(!is_applicable(&f2, 3, 21));
        // Truncation must cover the working degree.
        let small = make_subalgebra(SubalgebraSpec::F(1), Some(1)).unwrap();
        assert!(!is_applicable(&small, 10, 15));
    }

    #[test]
    fn choice() {
        let auto = Strategy::auto();
        assert!(auto.choose(1, 2).is_none());
        let b = auto.choose(10, 15).unwrap();
        assert!(matches!(b.family(), Family::FPrime(1)), "{b:?}");
        let below = Strategy::new(Mode::Auto(Regime::Below));
        assert_eq!(below.choose(1, 20).unwrap().name(), "A(1)");
        assert_eq!(below.choose(1, 30).unwrap().name(), "seg(4)");
        assert_eq!(below.choose(1, 40).unwrap().name(), "A(2)");
        assert!(Strategy::naive().choose(1, 40).is_none());
        let fixed: Strategy = "fixed:A(0)".parse().unwrap();
        assert_eq!(fixed.choose(3, 6).unwrap().name(), "A(0)");
        assert!(fixed.choose(3, 4).is_none());
    }

    #[test]
    fn strategy_names() {
        for name in ["naive", "auto", "auto:below", "auto:above", "fixed:A(1)", "fixed:F'(2)"] {
            let s: Strategy = name.parse().unwrap();
            assert_eq!(s.to_string(), name);
        }
        assert!("fixed:Q(1)".parse::<Strategy>().is_err());
        assert!("sometimes".parse::<Strategy>().is_err());
    }
}
