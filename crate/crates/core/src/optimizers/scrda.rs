use super::{Algorithm, Optimizer, OptimizerConfig};
use crate::error::{check_dim, Result};
use crate::problems::GradientSample;
use crate::projections::FeasibleSet;

/// Regularized dual averaging with `r(w) = (mu/2)|w|^2` and no extra prox
/// term, which gives the closed form `w_{t+1} = P(-sum_k l_k / (mu t))`.
///
/// Incoming gradients are subgradients of the full objective; the exact
/// regularizer part `mu w` is removed to recover the loss part `l_k`.
#[derive(Debug, Clone)]
pub struct ScRda {
    mu: f64,
    set: FeasibleSet,
    w: Vec<f64>,
    grad_sum: Vec<f64>,
    t: u64,
}

impl ScRda {
    pub fn new(config: &OptimizerConfig) -> Result<Self> {
        let w = config.initial_point()?;
        Ok(Self {
            mu: config.mu,
            set: config.set.clone(),
            grad_sum: vec![0.0; w.len()],
            w,
            t: 0,
        })
    }

    pub fn iterate(&self) -> &[f64] {
        &self.w
    }

    /// Running sum of loss subgradients.
    pub fn grad_sum(&self) -> &[f64] {
        &self.grad_sum
    }
}

impl Optimizer for ScRda {
    fn algorithm(&self) -> Algorithm {
        Algorithm::ScRda
    }

    fn query_point(&self) -> &[f64] {
        &self.w
    }

    fn step(&mut self, g: &GradientSample) -> Result<()> {
        check_dim(self.w.len(), g.vector.len())?;
        for ((s, gi), wi) in self.grad_sum.iter_mut().zip(&g.vector).zip(&self.w) {
            *s += gi - self.mu * wi;
        }
        self.t += 1;
        let denom = self.mu * self.t as f64;
        for (wi, s) in self.w.iter_mut().zip(&self.grad_sum) {
            *wi = -s / denom;
        }
        self.set.project_in_place(&mut self.w)
    }

    fn output(&self) -> Result<Vec<f64>> {
        Ok(self.w.clone())
    }

    fn steps_taken(&self) -> u64 {
        self.t
    }
}
