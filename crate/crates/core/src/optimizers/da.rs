use serde::{Deserialize, Serialize};

use super::{Algorithm, Optimizer, OptimizerConfig};
use crate::error::{check_dim, contract, Result};
use crate::problems::GradientSample;
use crate::projections::FeasibleSet;
use crate::schedules::ScheduleAccumulator;

/// The prox weight sequence `gamma_t` used by plain dual averaging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DaGamma {
    /// `gamma_t = c`
    Constant(f64),
    /// `gamma_t = c sqrt(t)`
    Sqrt(f64),
}

impl Default for DaGamma {
    fn default() -> Self {
        Self::Sqrt(1.0)
    }
}

impl DaGamma {
    pub fn at(self, t: u64) -> f64 {
        match self {
            Self::Constant(c) => c,
            Self::Sqrt(c) => c * (t as f64).sqrt(),
        }
    }
}

/// Dual averaging with `d(w) = |w|^2/2`, in projection form:
/// `w_{t+1} = P(-sum_k a_k g_k / gamma_t)`.
#[derive(Debug, Clone)]
pub struct Da {
    set: FeasibleSet,
    w: Vec<f64>,
    grad_sum: Vec<f64>,
    sched: ScheduleAccumulator,
    gamma: DaGamma,
}

impl Da {
    pub fn new(config: &OptimizerConfig) -> Result<Self> {
        let w = config.initial_point()?;
        Ok(Self {
            set: config.set.clone(),
            grad_sum: vec![0.0; w.len()],
            w,
            sched: ScheduleAccumulator::new(config.schedule),
            gamma: config.da_gamma,
        })
    }

    pub fn iterate(&self) -> &[f64] {
        &self.w
    }

    /// `sum_k a_k g_k`
    pub fn grad_sum(&self) -> &[f64] {
        &self.grad_sum
    }
}

impl Optimizer for Da {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Da
    }

    fn query_point(&self) -> &[f64] {
        &self.w
    }

    fn step(&mut self, g: &GradientSample) -> Result<()> {
        check_dim(self.w.len(), g.vector.len())?;
        let gamma = self.gamma.at(self.sched.t() + 1);
        if !(gamma > 0.0) {
            return contract(format!("gamma_t must be positive, got {gamma}"));
        }
        self.sched.advance();
        let a = self.sched.a();
        for (s, gi) in self.grad_sum.iter_mut().zip(&g.vector) {
            *s += a * gi;
        }
        for (wi, s) in self.w.iter_mut().zip(&self.grad_sum) {
            *wi = -s / gamma;
        }
        self.set.project_in_place(&mut self.w)
    }

    fn output(&self) -> Result<Vec<f64>> {
        Ok(self.w.clone())
    }

    fn steps_taken(&self) -> u64 {
        self.sched.t()
    }
}
