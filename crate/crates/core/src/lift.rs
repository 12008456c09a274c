//! Lifting cycles through the resolution, one signature at a time.

use thiserror::Error;

use crate::freemod::{apply_differential, element_degree, induced_matrix, FreeElement, FreeModError, SlicedBasis};
use crate::gf2::Solver;
use crate::resolution::Resolution;
use crate::subalgebra::Subalgebra;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error(transparent)]
    Degree(#[from] FreeModError),
    #[error("element is not a cycle")]
    NotACycle,
    #[error("exactness at ({s}, {t}) has not been established")]
    OutsideFrontier { s: u32, t: u32 },
    #[error("no solution on signature rank {rank} of {name}")]
    NoSolution { rank: u64, name: String },
    #[error("nonzero residual after the last signature of {name}")]
    ResidualNonzero { name: String },
}

/// Some `w` in `C_{s+1,t}` with `d(w) = z`, for a cycle `z` in `C_{s,t}`.
///
/// Signatures are processed in increasing rank, each solving the induced
/// differential on that slice; the choice of `B` only affects the matrices,
/// so `B` should satisfy the applicability predicate at `(s + 1, t)`.
pub fn lift_cycle(res: &Resolution, b: &Subalgebra, z: &FreeElement) -> Result<FreeElement, LiftError> {
    if z.is_zero() {
        return Ok(FreeElement::zero());
    }
    let (s, t) = element_degree(z)?;
    if !apply_differential(res, z).is_zero() {
        return Err(LiftError::NotACycle);
    }
    if !res.is_done(s, t) {
        return Err(LiftError::OutsideFrontier { s, t });
    }
    let domain = SlicedBasis::new(res, b, s + 1, t, t + 1);
    let codomain = SlicedBasis::new(res, b, s, t, t + 1);
    let mut w = FreeElement::zero();
    let mut z = z.clone();
    for cod in codomain.slices() {
        let e = cod.extract(&z);
        if e.is_zero() {
            continue;
        }
        let no_solution = || LiftError::NoSolution {
            rank: cod.rank,
            name: b.label(),
        };
        let dom = domain.get(cod.rank).ok_or_else(no_solution)?;
        let m = induced_matrix(res, b, dom, cod);
        let f = Solver::new(&m).solve(&e).ok_or_else(no_solution)?;
        let f = dom.embed(&f);
        z.add(&apply_differential(res, &f));
        w.add(&f);
    }
    if !z.is_zero() {
        return Err(LiftError::ResidualNonzero { name: b.label() });
    }
    Ok(w)
}
