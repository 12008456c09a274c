//! The partial minimal resolution: generators, differentials and frontier.

use std::collections::BTreeMap;

use crate::freemod::{FreeElement, GeneratorRef};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub t: u32,
    pub differential: FreeElement,
}

/// One entry of an Ext chart: `n` generators of `C_s` in degree `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ChartEntry {
    pub s: u32,
    pub t: u32,
    pub n: u32,
}

/// `C_0 = A g_0` plus whatever has been computed so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    generators: Vec<Vec<Generator>>,
    /// `frontier[s] = t`: the step at `(s, t')` has run for every `s <= t' <= t`.
    frontier: BTreeMap<u32, u32>,
    /// Method used at each completed step.
    methods: BTreeMap<(u32, u32), String>,
}

impl Default for Resolution {
    fn default() -> Self {
        Self::new()
    }
}

impl Resolution {
    pub fn new() -> Self {
        Resolution {
            generators: vec![vec![Generator {
                t: 0,
                differential: FreeElement::zero(),
            }]],
            frontier: BTreeMap::new(),
            methods: BTreeMap::new(),
        }
    }

    /// Largest `s` with a (possibly empty) generator list.
    pub fn max_s(&self) -> u32 {
        self.generators.len() as u32 - 1
    }

    pub fn num_generators(&self, s: u32) -> usize {
        self.generators.get(s as usize).map_or(0, Vec::len)
    }

    pub fn generators(&self, s: u32) -> &[Generator] {
        self.generators.get(s as usize).map_or(&[], Vec::as_slice)
    }

    pub fn generator_ref(&self, s: u32, index: u32) -> Option<GeneratorRef> {
        let g = self.generators.get(s as usize)?.get(index as usize)?;
        Some(GeneratorRef { s, index, t: g.t })
    }

    /// Generators of `C_s` of degree `< limit`, in index order.
    pub fn generators_below(&self, s: u32, limit: u32) -> impl Iterator<Item = GeneratorRef> + '_ {
        self.generators(s)
            .iter()
            .enumerate()
            .take_while(move |(_, g)| g.t < limit)
            .map(move |(i, g)| GeneratorRef {
                s,
                index: i as u32,
                t: g.t,
            })
    }

    pub fn differential(&self, g: GeneratorRef) -> &FreeElement {
        &self.generators[g.s as usize][g.index as usize].differential
    }

    /// Appends a generator to `C_s`. Degrees within `C_s` must be non-decreasing.
    pub fn add_generator(&mut self, s: u32, t: u32, differential: FreeElement) -> GeneratorRef {
        while self.generators.len() <= s as usize {
            self.generators.push(Vec::new());
        }
        let list = &mut self.generators[s as usize];
        assert!(
            list.last().is_none_or(|g| g.t <= t),
            "generators of C_{s} must be added in degree order"
        );
        list.push(Generator { t, differential });
        GeneratorRef {
            s,
            index: list.len() as u32 - 1,
            t,
        }
    }

    /// Replaces a differential in place; used by fault-injection tests and loaders.
    pub fn set_differential(&mut self, g: GeneratorRef, differential: FreeElement) {
        self.generators[g.s as usize][g.index as usize].differential = differential;
    }

    pub fn frontier(&self) -> &BTreeMap<u32, u32> {
        &self.frontier
    }

    pub fn methods(&self) -> &BTreeMap<(u32, u32), String> {
        &self.methods
    }

    pub fn method(&self, s: u32, t: u32) -> Option<&str> {
        self.methods.get(&(s, t)).map(String::as_str)
    }

    /// Whether the step at `(s, t)` is complete. Steps with `t < s` are
    /// trivially complete since `C_s` is `(s-1)`-connected.
    pub fn is_done(&self, s: u32, t: u32) -> bool {
        t < s || self.frontier.get(&s).is_some_and(|&f| f >= t)
    }

    /// Records the step at `(s, t)`; steps along each `s` must be marked in order.
    pub(crate) fn mark_done(&mut self, s: u32, t: u32, method: String) {
        debug_assert!(t >= s && !self.is_done(s, t) && (t == s || self.is_done(s, t - 1)));
        self.frontier.insert(s, t);
        self.methods.insert((s, t), method);
    }

    /// Rebuilds bookkeeping from persisted state.
    pub(crate) fn from_parts(
        generators: Vec<Vec<Generator>>,
        frontier: BTreeMap<u32, u32>,
        methods: BTreeMap<(u32, u32), String>,
    ) -> Self {
        Resolution {
            generators,
            frontier,
            methods,
        }
    }

    /// Generator counts per nonzero bidegree, sorted by `(t - s, s)`.
    pub fn chart(&self) -> Vec<ChartEntry> {
        let mut counts: BTreeMap<(i64, u32, u32), u32> = BTreeMap::new();
        for (s, gens) in self.generators.iter().enumerate() {
            for g in gens {
                let s = s as u32;
                *counts
                    .entry((g.t as i64 - s as i64, s, g.t))
                    .or_default() += 1;
            }
        }
        counts
            .into_iter()
            .map(|((_, s, t), n)| ChartEntry { s, t, n })
            .collect()
    }

    pub fn total_generators(&self) -> usize {
        self.generators.iter().map(Vec::len).sum()
    }
}
