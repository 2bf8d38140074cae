//! Shared fixtures for the criterion benchmarks under `benches/`.

use scpda_core::{make_synthetic_svm, FeasibleSet, ProblemInstance, ReferenceSolution};

/// Synthetic SVM with unit margin scale and its certified optimum.
pub fn svm_fixture(n: usize, d: usize, mu: f64) -> (ProblemInstance, ReferenceSolution) {
    let problem = make_synthetic_svm(n, d, 1.0, mu, 7)
        .expect("valid synthetic spec")
        .problem;
    let reference =
        scpda_core::reference_optimum(&problem, &FeasibleSet::WholeSpace, 1e-10).expect("reference optimum");
    (problem, reference)
}
