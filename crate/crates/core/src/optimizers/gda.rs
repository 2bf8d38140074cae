use super::{Algorithm, Optimizer, OptimizerConfig};
use crate::error::{check_dim, contract, Result};
use crate::linalg::axpy;
use crate::problems::GradientSample;
use crate::projections::FeasibleSet;
use crate::schedules::ScheduleAccumulator;

/// Gradient descent averaging.
///
/// The next iterate is the projection of a `gamma`-weighted average of
/// per-iterate gradient steps:
///
/// ```text
/// w_{t+1} = P( (1/Gamma_t) sum_k gamma_k (w_k - a_k/(mu gamma_k) g_k) )
/// ```
///
/// The unnormalized sum `S_t` is kept and divided by `Gamma_t` on read, so a
/// step costs O(d). The reported output is the `a`-weighted average of the
/// iterates `w_1..w_t`.
#[derive(Debug, Clone)]
pub struct Gda {
    mu: f64,
    set: FeasibleSet,
    w: Vec<f64>,
    weighted_sum: Vec<f64>,
    sched: ScheduleAccumulator,
    averaged_num: Vec<f64>,
    uniform_sum: Vec<f64>,
    sign_fault: bool,
}

impl Gda {
    pub fn new(config: &OptimizerConfig) -> Result<Self> {
        let w = config.initial_point()?;
        let d = w.len();
        Ok(Self {
            mu: config.mu,
            set: config.set.clone(),
            w,
            weighted_sum: vec![0.0; d],
            sched: ScheduleAccumulator::new(config.schedule),
            averaged_num: vec![0.0; d],
            uniform_sum: vec![0.0; d],
            sign_fault: false,
        })
    }

    /// Mutation hook for verification: flips the sign of the gradient term.
    #[doc(hidden)]
    pub fn with_sign_fault(mut self) -> Self {
        self.sign_fault = true;
        self
    }

    pub fn iterate(&self) -> &[f64] {
        &self.w
    }

    pub fn weighted_sum(&self) -> &[f64] {
        &self.weighted_sum
    }

    pub fn schedule(&self) -> &ScheduleAccumulator {
        &self.sched
    }

    /// `sum_k a_k w_k / A_t` over the iterates consumed so far.
    pub fn averaged_output(&self) -> Result<Vec<f64>> {
        if self.sched.t() == 0 {
            return contract("averaged output requested before any step");
        }
        let den = self.sched.a_sum();
        Ok(self.averaged_num.iter().map(|v| v / den).collect())
    }

    /// `(1/t) sum_k w_k`, the unweighted average.
    pub fn uniform_average(&self) -> Result<Vec<f64>> {
        if self.sched.t() == 0 {
            return contract("uniform average requested before any step");
        }
        let t = self.sched.t() as f64;
        Ok(self.uniform_sum.iter().map(|v| v / t).collect())
    }
}

impl Optimizer for Gda {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Gda
    }

    fn query_point(&self) -> &[f64] {
        &self.w
    }

    fn step(&mut self, g: &GradientSample) -> Result<()> {
        check_dim(self.w.len(), g.vector.len())?;
        self.sched.advance();
        let a = self.sched.a();
        let gamma = self.sched.gamma();
        let gamma_sum = self.sched.gamma_sum();
        if gamma_sum <= 0.0 {
            return contract("Gamma_t must be positive");
        }
        axpy(a, &self.w, &mut self.averaged_num);
        axpy(1.0, &self.w, &mut self.uniform_sum);

        let a_signed = if self.sign_fault { -a } else { a };
        for ((s, wi), gi) in self.weighted_sum.iter_mut().zip(&self.w).zip(&g.vector) {
            *s += gamma * wi - a_signed * gi / self.mu;
        }
        for (wi, s) in self.w.iter_mut().zip(&self.weighted_sum) {
            *wi = s / gamma_sum;
        }
        self.set.project_in_place(&mut self.w)
    }

    fn output(&self) -> Result<Vec<f64>> {
        self.averaged_output()
    }

    fn steps_taken(&self) -> u64 {
        self.sched.t()
    }

    fn uniform_output(&self) -> Option<Vec<f64>> {
        self.uniform_average().ok()
    }
}
