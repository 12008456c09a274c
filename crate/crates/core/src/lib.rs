//! Minimal resolutions of the mod-2 Steenrod algebra, with Ext charts.
//!
//! The resolution is built by double induction on internal degree `t` and
//! homological degree `s`. Where a vanishing argument applies, each step runs
//! on signature slices `E_R C_{s,t}` relative to a subalgebra `B` instead of
//! the full `C_{s,t}`: only the zero-signature slice needs a homology
//! computation, and the other slices become lifting problems.

pub mod gf2;
pub mod milnor;
pub mod subalgebra;
pub mod freemod;
pub mod resolution;
pub mod stats;
pub mod strategy;
pub mod engine;
pub mod lift;
pub mod verify;
pub mod checkpoint;
pub mod chart;

pub use freemod::{
    apply_differential, element_degree, FreeElement, FreeModError, GeneratorRef, SignatureSlice,
};
pub use engine::{
    extend_filtered, extend_naive, resolve_range, resolve_range_with, EngineContext, EngineError,
};
pub use gf2::{GF2Matrix, GF2Vector};
pub use lift::{lift_cycle, LiftError};
pub use stats::{Phase, StatsRecord};
pub use strategy::{applicable_above, applicable_below, Mode, Regime, Strategy};
pub use verify::{verify, Report, Violation};
pub use milnor::{multiply, MilnorExponent, MilnorSum};
pub use resolution::{ChartEntry, Generator, Resolution};
pub use subalgebra::{
    make_for_window, make_subalgebra, BitPosition, Signature, Subalgebra, SubalgebraError,
    SubalgebraSpec,
};
