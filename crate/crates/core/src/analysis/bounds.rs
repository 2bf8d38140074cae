use crate::error::{contract, Result};
use crate::schedules::{ScheduleAccumulator, ScheduleKind};

/// Running right-hand side shared by the averaged and individual bounds:
///
/// ```text
/// B_t = (1/(2 A_t)) sum_{k<=t} a_k^2 / (mu Gamma_k) |g_k|^2
/// ```
///
/// Both built-in schedules have `a_k = gamma_k`, so the distance term drops
/// out and nothing about the optimum is needed.
#[derive(Debug, Clone)]
pub struct BoundTracker {
    mu: f64,
    sched: ScheduleAccumulator,
    sum: f64,
}

impl BoundTracker {
    pub fn new(mu: f64, kind: ScheduleKind) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return contract(format!("mu must be positive, got {mu}"));
        }
        Ok(Self {
            mu,
            sched: ScheduleAccumulator::new(kind),
            sum: 0.0,
        })
    }

    /// Adds `|g_t|^2` for the next iteration and returns `B_t`.
    pub fn push(&mut self, grad_norm_sq: f64) -> f64 {
        self.sched.advance();
        let a = self.sched.a();
        self.sum += a * a / (self.mu * self.sched.gamma_sum()) * grad_norm_sq;
        self.current()
    }

    pub fn current(&self) -> f64 {
        if self.sched.t() == 0 {
            return f64::INFINITY;
        }
        self.sum / (2.0 * self.sched.a_sum())
    }

    pub fn t(&self) -> u64 {
        self.sched.t()
    }
}

/// `B_t` for every prefix of a per-iteration sequence of `|g_k|^2`.
pub fn theorem2_bound_rhs(grad_norm_sq: &[f64], mu: f64, kind: ScheduleKind) -> Result<Vec<f64>> {
    let mut tracker = BoundTracker::new(mu, kind)?;
    Ok(grad_norm_sq.iter().map(|&g| tracker.push(g)).collect())
}

/// Same right-hand side; it bounds the weighted average of objective values.
pub fn theorem1_bound_rhs(grad_norm_sq: &[f64], mu: f64, kind: ScheduleKind) -> Result<Vec<f64>> {
    theorem2_bound_rhs(grad_norm_sq, mu, kind)
}

/// Bound for arbitrary weight sequences. Only `a_k = gamma_k` is supported,
/// since otherwise the bound involves the unknown distance to the optimum.
pub fn bound_rhs_with_weights(a: &[f64], gamma: &[f64], grad_norm_sq: &[f64], mu: f64) -> Result<Vec<f64>> {
    if a.len() != gamma.len() || a.len() != grad_norm_sq.len() {
        return contract("weight and gradient sequences differ in length");
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return contract(format!("mu must be positive, got {mu}"));
    }
    if let Some(k) = a.iter().zip(gamma).position(|(x, y)| x != y) {
        return contract(format!(
            "bound needs a_k = gamma_k, differs at k={} ({} vs {})",
            k + 1,
            a[k],
            gamma[k]
        ));
    }
    let mut a_sum = 0.0;
    let mut g_sum = 0.0;
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(a.len());
    for k in 0..a.len() {
        a_sum += a[k];
        g_sum += gamma[k];
        acc += a[k] * a[k] / (mu * g_sum) * grad_norm_sq[k];
        out.push(acc / (2.0 * a_sum));
    }
    Ok(out)
}
