//! Reference optima, gap traces, bound tracking and rate fitting.

mod bounds;
mod lemma3;
mod reference;
mod slope;
mod trace;

pub use bounds::{bound_rhs_with_weights, theorem1_bound_rhs, theorem2_bound_rhs, BoundTracker};
pub use lemma3::{lemma3_violation, verify_lemma3, Lemma3Record};
pub use reference::{
    reference_by_bound, reference_by_dual_ascent, reference_optimum, ReferenceMethod, ReferenceSolution,
    DEFAULT_BOUND_BUDGET, DEFAULT_DUAL_EPOCHS,
};
pub use slope::{floor_gaps, loglog_slope, SlopeFit};
pub use trace::{RunTrace, TraceMeta, TraceRecord, CSV_HEADER};
