use super::{Algorithm, Optimizer, OptimizerConfig};
use crate::error::{check_dim, Result};
use crate::problems::GradientSample;
use crate::projections::FeasibleSet;

/// Projected subgradient descent with step `1/(mu t)`.
#[derive(Debug, Clone)]
pub struct Pegasos {
    mu: f64,
    set: FeasibleSet,
    w: Vec<f64>,
    /// Index of the next step; starts at 1.
    t: u64,
}

impl Pegasos {
    pub fn new(config: &OptimizerConfig) -> Result<Self> {
        Ok(Self {
            mu: config.mu,
            set: config.set.clone(),
            w: config.initial_point()?,
            t: 1,
        })
    }

    pub fn next_step_size(&self) -> f64 {
        1.0 / (self.mu * self.t as f64)
    }

    pub fn iterate(&self) -> &[f64] {
        &self.w
    }
}

impl Optimizer for Pegasos {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Pegasos
    }

    fn query_point(&self) -> &[f64] {
        &self.w
    }

    fn step(&mut self, g: &GradientSample) -> Result<()> {
        check_dim(self.w.len(), g.vector.len())?;
        let eta = self.next_step_size();
        for (wi, gi) in self.w.iter_mut().zip(&g.vector) {
            *wi -= eta * gi;
        }
        self.t += 1;
        self.set.project_in_place(&mut self.w)
    }

    fn output(&self) -> Result<Vec<f64>> {
        Ok(self.w.clone())
    }

    fn steps_taken(&self) -> u64 {
        self.t - 1
    }
}
