use super::{primal_average, Algorithm, Optimizer, OptimizerConfig};
use crate::error::{check_dim, contract, Result};
use crate::problems::GradientSample;
use crate::projections::FeasibleSet;
use crate::schedules::ScheduleAccumulator;

/// Strongly convex primal-dual averaging.
///
/// Gradients are taken at the primal average `w_t`. The inner iterate
/// `w_t^+` is the GDA projection of the weighted gradient-step sum, and the
/// next query point is
///
/// ```text
/// w_{t+1} = (A_t/A_{t+1}) w_t + (a_{t+1}/A_{t+1}) w_t^+
/// ```
///
/// with the schedule already advanced to produce `a_{t+1}`.
#[derive(Debug, Clone)]
pub struct ScPda {
    mu: f64,
    set: FeasibleSet,
    w: Vec<f64>,
    w_plus: Vec<f64>,
    weighted_sum: Vec<f64>,
    sched: ScheduleAccumulator,
}

impl ScPda {
    pub fn new(config: &OptimizerConfig) -> Result<Self> {
        let w = config.initial_point()?;
        let d = w.len();
        Ok(Self {
            mu: config.mu,
            set: config.set.clone(),
            w_plus: w.clone(),
            w,
            weighted_sum: vec![0.0; d],
            sched: ScheduleAccumulator::new(config.schedule),
        })
    }

    /// Primal average `w_t`, the individual output.
    pub fn iterate(&self) -> &[f64] {
        &self.w
    }

    /// Latest inner iterate `w_{t-1}^+` (the initial point before any step).
    pub fn w_plus(&self) -> &[f64] {
        &self.w_plus
    }

    pub fn weighted_sum(&self) -> &[f64] {
        &self.weighted_sum
    }

    pub fn schedule(&self) -> &ScheduleAccumulator {
        &self.sched
    }
}

impl Optimizer for ScPda {
    fn algorithm(&self) -> Algorithm {
        Algorithm::ScPda
    }

    fn query_point(&self) -> &[f64] {
        &self.w
    }

    fn step(&mut self, g: &GradientSample) -> Result<()> {
        check_dim(self.w.len(), g.vector.len())?;
        self.sched.advance();
        let gamma = self.sched.gamma();
        let gamma_sum = self.sched.gamma_sum();
        if gamma_sum <= 0.0 {
            return contract("Gamma_t must be positive");
        }
        let a = self.sched.a();
        for ((s, wi), gi) in self.weighted_sum.iter_mut().zip(&self.w).zip(&g.vector) {
            *s += gamma * wi - a * gi / self.mu;
        }
        for (p, s) in self.w_plus.iter_mut().zip(&self.weighted_sum) {
            *p = s / gamma_sum;
        }
        self.set.project_in_place(&mut self.w_plus)?;
        primal_average(&mut self.w, &self.w_plus, self.sched.a_sum(), self.sched.next_a());
        Ok(())
    }

    fn output(&self) -> Result<Vec<f64>> {
        Ok(self.w.clone())
    }

    fn steps_taken(&self) -> u64 {
        self.sched.t()
    }

    fn inner_iterate(&self) -> Option<&[f64]> {
        Some(&self.w_plus)
    }
}
