//! Consistency checks on a (possibly loaded) resolution.

use std::fmt;

use crate::freemod::{apply_differential, full_basis, full_matrix, GeneratorRef};
use crate::gf2::{kernel_basis, quotient_basis, GF2Matrix};
use crate::resolution::Resolution;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `C_0` must be `A g_0` with `g_0` in degree 0.
    BadBase,
    /// A differential term names a generator that does not exist or has the wrong degree.
    Malformed { generator: GeneratorRef, detail: String },
    /// A differential contains a `Sq(0)` term.
    NotMinimal { generator: GeneratorRef },
    /// `d(d(g)) != 0`.
    DSquared { generator: GeneratorRef },
    /// Nonzero homology at a bidegree the frontier marks as done.
    NotExact { s: u32, t: u32, dim: usize },
    /// The image of `C_{s+1,t}` is not inside the kernel at `(s, t)`.
    ImageNotInKernel { s: u32, t: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadBase => write!(f, "C_0 is not a single generator in degree 0"),
            Violation::Malformed { generator, detail } => {
                write!(f, "malformed differential of {generator}: {detail}")
            }
            Violation::NotMinimal { generator } => {
                write!(f, "differential of {generator} has a unit term")
            }
            Violation::DSquared { generator } => write!(f, "d(d({generator})) is nonzero"),
            Violation::NotExact { s, t, dim } => {
                write!(f, "homology of dimension {dim} at (s={s}, t={t})")
            }
            Violation::ImageNotInKernel { s, t } => {
                write!(f, "image of d is not inside the kernel at (s={s}, t={t})")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<Violation>,
    /// Bidegrees whose exactness was recomputed.
    pub exactness_checked: usize,
}

impl Report {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_generator(res: &Resolution, g: GeneratorRef, out: &mut Vec<Violation>) -> bool {
    let mut well_formed = true;
    if res.differential(g).is_zero() {
        // A generator in the kernel would be a boundary of decomposables.
        out.push(Violation::Malformed {
            generator: g,
            detail: "zero differential".to_string(),
        });
    }
    for (r, h) in res.differential(g).terms() {
        let expected_s = g.s.checked_sub(1);
        let exists = expected_s == Some(h.s) && res.generator_ref(h.s, h.index) == Some(h);
        if !exists || h.t + r.degree() != g.t {
            out.push(Violation::Malformed {
                generator: g,
                detail: format!("term {r} {h}"),
            });
            well_formed = false;
            continue;
        }
        if r.is_unit() {
            out.push(Violation::NotMinimal { generator: g });
        }
    }
    well_formed
}

/// Checks `d^2 = 0` and minimality on every generator; with `deep`, also
/// recomputes homology at every completed step.
pub fn verify(res: &Resolution, deep: bool) -> Report {
    let mut report = Report::default();
    let base = res.generators(0);
    if base.len() != 1 || base[0].t != 0 || !base[0].differential.is_zero() {
        report.violations.push(Violation::BadBase);
    }
    for s in 1..=res.max_s() {
        for index in 0..res.num_generators(s) as u32 {
            let g = res.generator_ref(s, index).expect("in range");
            if !check_generator(res, g, &mut report.violations) {
                continue;
            }
            if !apply_differential(res, res.differential(g)).is_zero() {
                report.violations.push(Violation::DSquared { generator: g });
            }
        }
    }
    if deep && report.violations.is_empty() {
        for &(s, t) in res.methods().keys() {
            if t == 0 {
                // H_{0,0} is the ground field.
                continue;
            }
            report.exactness_checked += 1;
            let domain = full_basis(res, s, t, t + 1);
            let m = if s == 0 {
                GF2Matrix::zero(0, domain.dim())
            } else {
                full_matrix(res, &domain, &full_basis(res, s - 1, t, t + 1))
            };
            let n = full_matrix(res, &full_basis(res, s + 1, t, t + 1), &domain);
            match quotient_basis(&kernel_basis(&m), &n) {
                Ok(q) if q.is_empty() => {}
                Ok(q) => report.violations.push(Violation::NotExact { s, t, dim: q.len() }),
                Err(_) => report.violations.push(Violation::ImageNotInKernel { s, t }),
            }
        }
    }
    report
}
