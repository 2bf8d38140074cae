use crate::error::{contract, Result};

/// State around one SC-PDA step, enough to evaluate both sides of
///
/// ```text
/// a_t <g_t, w_t - w_t^+>
///     <= A_{t-1} [f(w_{t-1}) - f(w_t)] + a_t <g_t, w_{t-1}^+ - w_t^+>
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma3Record {
    pub t: u64,
    pub a: f64,
    /// `A_{t-1}`
    pub a_sum_prev: f64,
    pub grad: Vec<f64>,
    pub w: Vec<f64>,
    pub w_plus_prev: Vec<f64>,
    pub w_plus: Vec<f64>,
    pub value: f64,
    /// `f(w_{t-1}) - f(w_t)`, computed without cancellation; zero at `t = 1`.
    pub value_decrease: f64,
}

/// `LHS - RHS` for a single step.
pub fn lemma3_violation(r: &Lemma3Record) -> Result<f64> {
    let d = r.grad.len();
    if [r.w.len(), r.w_plus_prev.len(), r.w_plus.len()]
        .iter()
        .any(|&l| l != d)
    {
        return contract(format!("lemma record at t={} has inconsistent dimensions", r.t));
    }
    let mut lhs = 0.0;
    let mut cross = 0.0;
    for i in 0..d {
        lhs += r.grad[i] * (r.w[i] - r.w_plus[i]);
        cross += r.grad[i] * (r.w_plus_prev[i] - r.w_plus[i]);
    }
    let lhs = r.a * lhs;
    let rhs = r.a_sum_prev * r.value_decrease + r.a * cross;
    Ok(lhs - rhs)
}

/// Largest violation over `t >= 2`. At `t = 1` the two sides coincide by
/// construction (`w_0^+ = w_1`, `A_0 = 0`), so those records are skipped.
pub fn verify_lemma3(records: &[Lemma3Record]) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for r in records.iter().filter(|r| r.t >= 2) {
        worst = worst.max(lemma3_violation(r)?);
    }
    if worst == f64::NEG_INFINITY {
        return contract("trajectory has no inner iterates past t = 1 to check");
    }
    Ok(worst)
}
