//! Extension steps and the `(t, s)` sweep.
//!
//! The step at `(s, t)` makes `H(C)_{s,t}` vanish by adding generators of
//! degree `t` to `C_{s+1}`. It reads only generators of degree `< t`, so all
//! steps with the same `t` are independent and run concurrently; their
//! results are merged in order of `s`.

use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use lru::LruCache;
use rayon::prelude::*;
use thiserror::Error;

use crate::freemod::{
    apply_differential, full_basis, full_matrix, induced_matrix, FreeElement, SignatureSlice,
    SlicedBasis,
};
use crate::gf2::{kernel_basis, quotient_basis, GF2Matrix, Gf2Error, Solver};
use crate::resolution::Resolution;
use crate::stats::{sort_records, Phase, StatsRecord};
use crate::strategy::{is_applicable, Strategy};
use crate::subalgebra::{Signature, Subalgebra};

pub const NAIVE: &str = "naive";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("step ({s}, {t}) cannot run: {reason}")]
    FrontierViolation { s: u32, t: u32, reason: String },
    #[error("{name} is not applicable at ({s}, {t})")]
    NotApplicable { s: u32, t: u32, name: String },
    #[error("lifting failed at ({s}, {t}) on signature rank {rank} of {name}")]
    LiftFailed {
        s: u32,
        t: u32,
        rank: u64,
        name: String,
    },
    #[error("corrected differential is nonzero at ({s}, {t}) with {name}")]
    ResidualNonzero { s: u32, t: u32, name: String },
    #[error("at ({s}, {t}): {source}")]
    Linear {
        s: u32,
        t: u32,
        #[source]
        source: Gf2Error,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct MatrixKey {
    label: String,
    rank: u64,
    s: u32,
    t: u32,
}

/// LRU cache of induced differential matrices keyed by `(B, rank, s, t)`.
pub struct MatrixCache {
    inner: Mutex<LruCache<MatrixKey, Arc<GF2Matrix>>>,
}

impl MatrixCache {
    pub fn new(capacity: usize) -> Option<Self> {
        NonZeroUsize::new(capacity).map(|c| MatrixCache {
            inner: Mutex::new(LruCache::new(c)),
        })
    }

    fn get_or_build(&self, key: MatrixKey, build: impl FnOnce() -> GF2Matrix) -> Arc<GF2Matrix> {
        if let Some(m) = self.inner.lock().expect("matrix cache").get(&key) {
            return m.clone();
        }
        let m = Arc::new(build());
        self.inner.lock().expect("matrix cache").put(key, m.clone());
        m
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("matrix cache").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Shared state for a run.
pub struct EngineContext {
    pub cache: Option<MatrixCache>,
    /// Refuse filtered steps whose applicability predicate fails. Only
    /// experiments with sharper bounds turn this off.
    pub enforce_predicate: bool,
}

impl Default for EngineContext {
    fn default() -> Self {
        EngineContext {
            cache: None,
            enforce_predicate: true,
        }
    }
}

impl EngineContext {
    pub fn with_cache(capacity: usize) -> Self {
        EngineContext {
            cache: MatrixCache::new(capacity),
            ..Self::default()
        }
    }

    fn matrix(
        &self,
        label: &str,
        rank: u64,
        s: u32,
        t: u32,
        build: impl FnOnce() -> GF2Matrix,
    ) -> Arc<GF2Matrix> {
        match &self.cache {
            Some(cache) => cache.get_or_build(
                MatrixKey {
                    label: label.to_string(),
                    rank,
                    s,
                    t,
                },
                build,
            ),
            None => Arc::new(build()),
        }
    }
}

/// Result of one step, not yet merged into the resolution.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub s: u32,
    pub t: u32,
    pub method: String,
    /// Differentials of the new generators of `C_{s+1}` in degree `t`.
    pub differentials: Vec<FreeElement>,
    pub stats: Vec<StatsRecord>,
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn check_prerequisites(res: &Resolution, s: u32, t: u32) -> Result<(), EngineError> {
    let fail = |reason: String| Err(EngineError::FrontierViolation { s, t, reason });
    if t < s {
        return Ok(());
    }
    if res.is_done(s, t) {
        return fail("already computed".into());
    }
    if t >= 1 {
        if !res.is_done(s, t - 1) {
            return fail(format!("({s}, {}) is not computed", t - 1));
        }
        if s >= 1 && !res.is_done(s - 1, t - 1) {
            return fail(format!("({}, {}) is not computed", s - 1, t - 1));
        }
    }
    Ok(())
}

/// The naive step on the whole of `C_{s,t}`, with the full Milnor product.
pub fn naive_step(
    res: &Resolution,
    s: u32,
    t: u32,
    ctx: &EngineContext,
) -> Result<StepOutcome, EngineError> {
    let start = Instant::now();
    let domain = full_basis(res, s, t, t);
    let m = if s == 0 {
        Arc::new(GF2Matrix::zero(0, domain.dim()))
    } else {
        ctx.matrix(NAIVE, 0, s, t, || {
            full_matrix(res, &domain, &full_basis(res, s - 1, t, t))
        })
    };
    let up = full_basis(res, s + 1, t, t);
    let n = ctx.matrix(NAIVE, 0, s + 1, t, || full_matrix(res, &up, &domain));
    let reps = quotient_basis(&kernel_basis(&m), &n)
        .map_err(|source| EngineError::Linear { s, t, source })?;
    let differentials: Vec<FreeElement> = reps.iter().map(|v| domain.embed(v)).collect();
    let stats = vec![StatsRecord {
        phase: Phase::Hom,
        s,
        t,
        rank: 0,
        rows: m.rows(),
        cols: m.cols(),
        ms: elapsed_ms(start),
        new_gens: Some(differentials.len()),
    }];
    Ok(StepOutcome {
        s,
        t,
        method: NAIVE.to_string(),
        differentials,
        stats,
    })
}

fn empty_slice(rank: u64, s: u32, t: u32) -> SignatureSlice {
    SignatureSlice::new(rank, Signature::zero(), s, t)
}

/// The filtered step: homology of `E_0 C`, then one lifting problem per nonzero signature.
pub fn filtered_step(
    res: &Resolution,
    s: u32,
    t: u32,
    b: &Subalgebra,
    ctx: &EngineContext,
) -> Result<StepOutcome, EngineError> {
    let label = b.label();
    let start = Instant::now();
    let domain = SlicedBasis::new(res, b, s, t, t);
    let codomain = (s > 0).then(|| SlicedBasis::new(res, b, s - 1, t, t));
    let up = SlicedBasis::new(res, b, s + 1, t, t);

    let dom0 = domain.get(0).cloned().unwrap_or_else(|| empty_slice(0, s, t));
    let m0 = match codomain.as_ref().and_then(|c| c.get(0)) {
        Some(cod0) => ctx.matrix(&label, 0, s, t, || induced_matrix(res, b, &dom0, cod0)),
        None => Arc::new(GF2Matrix::zero(0, dom0.dim())),
    };
    let n0 = match up.get(0) {
        Some(up0) => ctx.matrix(&label, 0, s + 1, t, || induced_matrix(res, b, up0, &dom0)),
        None => Arc::new(GF2Matrix::zero(dom0.dim(), 0)),
    };
    let reps = quotient_basis(&kernel_basis(&m0), &n0)
        .map_err(|source| EngineError::Linear { s, t, source })?;
    let mut stats = vec![StatsRecord {
        phase: Phase::Hom,
        s,
        t,
        rank: 0,
        rows: m0.rows(),
        cols: m0.cols(),
        ms: elapsed_ms(start),
        new_gens: Some(reps.len()),
    }];

    let mut xs: Vec<FreeElement> = reps.iter().map(|v| dom0.embed(v)).collect();
    let mut ds: Vec<FreeElement> = xs.iter().map(|x| apply_differential(res, x)).collect();

    if let (Some(codomain), false) = (&codomain, xs.is_empty()) {
        for cod in codomain.slices().filter(|c| c.rank != 0) {
            let start = Instant::now();
            let errors: Vec<_> = ds.iter().map(|d| cod.extract(d)).collect();
            let dom = domain.get(cod.rank);
            let solver = dom.map(|dom| {
                let m = ctx.matrix(&label, cod.rank, s, t, || induced_matrix(res, b, dom, cod));
                stats.push(StatsRecord {
                    phase: Phase::Lift,
                    s,
                    t,
                    rank: cod.rank,
                    rows: m.rows(),
                    cols: m.cols(),
                    ms: 0,
                    new_gens: None,
                });
                Solver::new(&m)
            });
            for ((x, d), e) in xs.iter_mut().zip(ds.iter_mut()).zip(&errors) {
                if e.is_zero() {
                    continue;
                }
                let lift_failed = || EngineError::LiftFailed {
                    s,
                    t,
                    rank: cod.rank,
                    name: label.clone(),
                };
                let f = solver
                    .as_ref()
                    .and_then(|sv| sv.solve(e))
                    .ok_or_else(lift_failed)?;
                let f = dom.expect("solver implies a domain").embed(&f);
                d.add(&apply_differential(res, &f));
                x.add(&f);
            }
            if let Some(last) = stats.last_mut().filter(|r| r.phase == Phase::Lift && r.rank == cod.rank) {
                last.ms = elapsed_ms(start);
            }
        }
    }
    if ds.iter().any(|d| !d.is_zero()) {
        return Err(EngineError::ResidualNonzero { s, t, name: label });
    }
    Ok(StepOutcome {
        s,
        t,
        method: label,
        differentials: xs,
        stats,
    })
}

/// Runs a step with `B`, or naive when `b` is `None` or trivial.
pub fn run_step(
    res: &Resolution,
    s: u32,
    t: u32,
    b: Option<&Subalgebra>,
    ctx: &EngineContext,
) -> Result<StepOutcome, EngineError> {
    check_prerequisites(res, s, t)?;
    match b {
        Some(b) if !b.positions().is_empty() => {
            if ctx.enforce_predicate && !is_applicable(b, s, t) {
                return Err(EngineError::NotApplicable {
                    s,
                    t,
                    name: b.label(),
                });
            }
            filtered_step(res, s, t, b, ctx)
        }
        _ => naive_step(res, s, t, ctx),
    }
}

/// Merges a step result into the resolution.
pub fn apply_outcome(res: &mut Resolution, outcome: StepOutcome) -> usize {
    let count = outcome.differentials.len();
    if outcome.t < outcome.s {
        return count;
    }
    for d in outcome.differentials {
        res.add_generator(outcome.s + 1, outcome.t, d);
    }
    res.mark_done(outcome.s, outcome.t, outcome.method);
    count
}

/// Naive step at `(s, t)`; returns the number of new generators.
pub fn extend_naive(res: &mut Resolution, s: u32, t: u32) -> Result<usize, EngineError> {
    let outcome = run_step(res, s, t, None, &EngineContext::default())?;
    Ok(apply_outcome(res, outcome))
}

/// Filtered step at `(s, t)` relative to `b`; returns the number of new generators.
pub fn extend_filtered(
    res: &mut Resolution,
    s: u32,
    t: u32,
    b: &Subalgebra,
) -> Result<usize, EngineError> {
    let outcome = run_step(res, s, t, Some(b), &EngineContext::default())?;
    Ok(apply_outcome(res, outcome))
}

/// Largest internal degree the sweep visits.
pub fn sweep_limit(max_s: u32, max_stem: i64) -> Option<u32> {
    (max_stem >= 0).then(|| max_stem as u32 + 1 + max_s)
}

/// Steps still to run at degree `t` for the range `s <= max_s`, `t - s <= max_stem + 1`.
pub fn pending_steps(res: &Resolution, max_s: u32, max_stem: i64, t: u32) -> Vec<u32> {
    if max_stem < 0 {
        return Vec::new();
    }
    (0..=t.min(max_s))
        .filter(|&s| (t - s) as i64 <= max_stem + 1 && !res.is_done(s, t))
        .collect()
}

/// Resolves through stem `max_stem` and `s <= max_s` using `strategy`.
pub fn resolve_range(
    res: &mut Resolution,
    max_s: u32,
    max_stem: i64,
    strategy: &Strategy,
) -> Result<Vec<StatsRecord>, EngineError> {
    resolve_range_with(
        res,
        max_s,
        max_stem,
        &|s, t| strategy.choose(s, t),
        &EngineContext::default(),
        &mut |_, _| Ok(()),
    )
}

/// The sweep with an arbitrary subalgebra chooser and a hook called after
/// each completed degree `t` (used for periodic checkpoints).
///
/// Every generator of stem `<= max_stem` in `C_{s}` for `s <= max_s + 1` is
/// found, which needs the steps with `t - s <= max_stem + 1`.
pub fn resolve_range_with<E>(
    res: &mut Resolution,
    max_s: u32,
    max_stem: i64,
    choose: &(dyn Fn(u32, u32) -> Option<Subalgebra> + Sync),
    ctx: &EngineContext,
    after_degree: &mut dyn FnMut(&Resolution, u32) -> Result<(), E>,
) -> Result<Vec<StatsRecord>, E>
where
    E: From<EngineError>,
{
    let mut stats = Vec::new();
    let Some(limit) = sweep_limit(max_s, max_stem) else {
        return Ok(stats);
    };
    for t in 0..=limit {
        let todo = pending_steps(res, max_s, max_stem, t);
        if todo.is_empty() {
            continue;
        }
        let snapshot = &*res;
        let outcomes: Result<Vec<StepOutcome>, EngineError> = todo
            .par_iter()
            .map(|&s| {
                let b = choose(s, t);
                run_step(snapshot, s, t, b.as_ref(), ctx)
            })
            .collect();
        for mut outcome in outcomes? {
            stats.append(&mut outcome.stats);
            apply_outcome(res, outcome);
        }
        after_degree(res, t)?;
    }
    sort_records(&mut stats);
    Ok(stats)
}
