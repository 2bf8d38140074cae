//! Dual averaging methods for strongly convex objectives.
//!
//! The crate provides GDA (dual averaging with an iterate-centered prox
//! term) and SC-PDA (GDA plus primal averaging, with last-iterate
//! guarantees), the baselines Pegasos, PA-PSG, SC-RDA and plain DA, and the
//! machinery to check their convergence numerically: certified reference
//! optima, bound tracking, log-log rate fits and a run harness.
//!
//! ```
//! use scpda_core::{make_synthetic_svm, reference_optimum, run, Algorithm, FeasibleSet, RunSpec};
//!
//! let problem = make_synthetic_svm(50, 5, 1.0, 1.0, 3).unwrap().problem;
//! let reference = reference_optimum(&problem, &FeasibleSet::WholeSpace, 1e-10).unwrap();
//! let outcome = run(&problem, &reference, &RunSpec::new(Algorithm::ScPda, 200)).unwrap();
//! let last = outcome.trace.records.last().unwrap();
//! assert!(last.gap <= last.bound_rhs.unwrap() + 1e-8);
//! ```

pub mod analysis;
pub mod dataio;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod optimizers;
pub mod problems;
pub mod projections;
pub mod schedules;
pub mod verify;

pub use analysis::{
    floor_gaps, loglog_slope, reference_optimum, theorem1_bound_rhs, theorem2_bound_rhs, verify_lemma3,
    BoundTracker, Lemma3Record, ReferenceSolution, RunTrace, SlopeFit, TraceMeta, TraceRecord, CSV_HEADER,
};
pub use dataio::{
    load_libsvm, parse_libsvm, parse_libsvm_str, subsample, write_libsvm, Dataset, SparseExample,
};
pub use error::{Error, Result};
pub use harness::{run, Checkpoints, OracleKind, RunOutcome, RunSpec};
pub use optimizers::{build, Algorithm, DaGamma, Optimizer, OptimizerConfig};
pub use problems::{
    make_synthetic_svm, random_quadratic, DiagnosticsRecord, Example, GradientSample, ProblemInstance,
    ProblemKind, SyntheticSvm,
};
pub use projections::FeasibleSet;
pub use schedules::{ScheduleAccumulator, ScheduleKind};
