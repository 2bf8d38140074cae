use super::{primal_average, Algorithm, Optimizer, OptimizerConfig};
use crate::error::{check_dim, Result};
use crate::problems::GradientSample;
use crate::projections::FeasibleSet;
use crate::schedules::ScheduleAccumulator;

/// Projected subgradient with primal averaging, strongly convex variant.
///
/// ```text
/// delta_t = 1/(1 + a_t mu)
/// w_t^+   = P[delta_t w_{t-1}^+ - a_t delta_t (g_t - mu w_t)]
/// ```
///
/// followed by the same primal-averaging step as SC-PDA.
#[derive(Debug, Clone)]
pub struct PaPsg {
    mu: f64,
    set: FeasibleSet,
    w: Vec<f64>,
    w_plus_prev: Vec<f64>,
    sched: ScheduleAccumulator,
}

impl PaPsg {
    pub fn new(config: &OptimizerConfig) -> Result<Self> {
        let w = config.initial_point()?;
        Ok(Self {
            mu: config.mu,
            set: config.set.clone(),
            w_plus_prev: w.clone(),
            w,
            sched: ScheduleAccumulator::new(config.schedule),
        })
    }

    pub fn shrinkage(a: f64, mu: f64) -> f64 {
        1.0 / (1.0 + a * mu)
    }

    pub fn iterate(&self) -> &[f64] {
        &self.w
    }

    pub fn w_plus(&self) -> &[f64] {
        &self.w_plus_prev
    }
}

impl Optimizer for PaPsg {
    fn algorithm(&self) -> Algorithm {
        Algorithm::PaPsg
    }

    fn query_point(&self) -> &[f64] {
        &self.w
    }

    fn step(&mut self, g: &GradientSample) -> Result<()> {
        check_dim(self.w.len(), g.vector.len())?;
        self.sched.advance();
        let a = self.sched.a();
        let delta = Self::shrinkage(a, self.mu);
        for ((p, wi), gi) in self.w_plus_prev.iter_mut().zip(&self.w).zip(&g.vector) {
            *p = delta * *p - a * delta * (gi - self.mu * wi);
        }
        self.set.project_in_place(&mut self.w_plus_prev)?;
        primal_average(
            &mut self.w,
            &self.w_plus_prev,
            self.sched.a_sum(),
            self.sched.next_a(),
        );
        Ok(())
    }

    fn output(&self) -> Result<Vec<f64>> {
        Ok(self.w.clone())
    }

    fn steps_taken(&self) -> u64 {
        self.sched.t()
    }

    fn inner_iterate(&self) -> Option<&[f64]> {
        Some(&self.w_plus_prev)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::ScheduleKind;

    #[test]
    fn shrinkage_value() {
        assert_eq!(PaPsg::shrinkage(1.0, 1.0), 0.5);
        let d = PaPsg::shrinkage(7.0, 0.3);
        assert!(d > 0.0 && d < 1.0);
    }

    #[test]
    fn regularizer_only_gradient_just_shrinks() {
        let mu = 0.5;
        let cfg = OptimizerConfig::new(2, mu)
            .with_schedule(ScheduleKind::Constant)
            .with_init(vec![1.0, -2.0]);
        let mut opt = PaPsg::new(&cfg).unwrap();
        let g = GradientSample::new(opt.iterate().iter().map(|w| mu * w).collect());
        opt.step(&g).unwrap();
        let delta = PaPsg::shrinkage(1.0, mu);
        assert_eq!(opt.w_plus(), &[delta * 1.0, delta * -2.0]);
    }

    #[test]
    fn vanishing_mu_recovers_plain_psg_step() {
        // with mu -> 0: w_t^+ = P[w_{t-1}^+ - a_t g_t]
        let cfg = OptimizerConfig::new(2, 1e-12)
            .with_schedule(ScheduleKind::Linear)
            .with_init(vec![0.4, 0.1]);
        let mut opt = PaPsg::new(&cfg).unwrap();
        let mut w_plus = vec![0.4, 0.1];
        let mut w = w_plus.clone();
        let mut a_sum = 0.0;
        for t in 1..=5u32 {
            let a = t as f64;
            let g = vec![(t as f64).sin(), 1.0 / t as f64];
            opt.step(&GradientSample::new(g.clone())).unwrap();
            for i in 0..2 {
                w_plus[i] -= a * g[i];
            }
            a_sum += a;
            let a_next = a + 1.0;
            for i in 0..2 {
                w[i] = a_sum / (a_sum + a_next) * w[i] + a_next / (a_sum + a_next) * w_plus[i];
            }
            for i in 0..2 {
                assert!((opt.w_plus()[i] - w_plus[i]).abs() < 1e-9);
                assert!((opt.iterate()[i] - w[i]).abs() < 1e-9);
            }
        }
    }
}
