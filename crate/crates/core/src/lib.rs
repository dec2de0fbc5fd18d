//! Characteristic sweeping and front tracking for `u_t + G(u)_x = 0` in one
//! space dimension.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod classify;
pub mod error;
pub mod expr;
pub mod flux;
pub mod jet;
mod parse;
pub mod profile;
pub mod shockdyn;
pub mod sweep;
pub mod validate;

pub use classify::{
    classify_points, negative_root, seed_shock, stability_check, CriticalPoint, PointKind, SeedRegime, ShockSeed,
    StraightSegment,
};
pub use error::{Error, Foot, Result, TextPos};
pub use expr::ExprNode;
pub use flux::{FluxModel, INV_TOL, MAX_ORDER};
pub use parse::parse_expr;
pub use profile::{Local, PiecewiseProfile, Side};
pub use shockdyn::{
    evolve, shock_speed, EvolveOptions, Event, EventKind, Fan, Regime, Sample, ShockCurve, ShockGraph, Source,
};
pub use sweep::{
    multivalue_surface, rarefaction_value, straight_line_value, sweep_solution, Discontinuity, Provenance, SliceSample,
    SolutionSlice,
};
pub use validate::{burgers_kind1_invariant, compare, reference_snapshots, reference_solve, ErrorReport, GridSolution};
