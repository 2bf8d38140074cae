use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::linalg::norm_sq;
use crate::optimizers::{Optimizer, OptimizerConfig, ScPda};
use crate::problems::{ProblemInstance, ProblemKind};
use crate::projections::FeasibleSet;
use crate::schedules::ScheduleKind;

use super::bounds::BoundTracker;

/// Iteration budget of the bound-certified fallback.
pub const DEFAULT_BOUND_BUDGET: u64 = 2_000_000;
/// Epoch budget of dual coordinate ascent.
pub const DEFAULT_DUAL_EPOCHS: u64 = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceMethod {
    ClosedForm,
    DualAscent,
    SelfBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub w_star: Vec<f64>,
    pub f_star: f64,
    /// Certified upper bound on `f(w_star) - min f`: zero for the closed
    /// form, the duality gap for dual ascent, and the tracked bound otherwise.
    pub residual: f64,
    pub certified: bool,
    pub method: ReferenceMethod,
    /// Epochs or iterations spent.
    pub iterations: u64,
}

impl ReferenceSolution {
    pub fn gap(&self, f: f64) -> f64 {
        f - self.f_star
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        contract(format!("tolerance must be positive, got {tol}"))
    }
}

/// Certified minimizer of `problem` over `set` to within `tol`.
///
/// Quadratics are solved in closed form. For the SVM the unconstrained
/// problem is solved by dual coordinate ascent, certified by the duality
/// gap; if that solution falls outside `set`, deterministic SC-PDA is run
/// until its bound certifies `tol`. An exhausted budget is reported through
/// `certified = false` rather than an error.
pub fn reference_optimum(
    problem: &ProblemInstance,
    set: &FeasibleSet,
    tol: f64,
) -> Result<ReferenceSolution> {
    check_tol(tol)?;
    match problem.kind() {
        ProblemKind::Quadratic { center } => {
            // isotropic: the constrained minimizer is the projected center
            let w_star = set.project(center)?;
            let f_star = problem.objective_value(&w_star)?;
            Ok(ReferenceSolution {
                w_star,
                f_star,
                residual: 0.0,
                certified: true,
                method: ReferenceMethod::ClosedForm,
                iterations: 0,
            })
        }
        ProblemKind::SvmHinge { .. } => {
            let free = reference_by_dual_ascent(problem, tol, DEFAULT_DUAL_EPOCHS)?;
            if set.contains(&free.w_star, 0.0) {
                return Ok(free);
            }
            reference_by_bound(problem, set, tol, DEFAULT_BOUND_BUDGET)
        }
    }
}

/// Dual coordinate ascent on the unconstrained hinge-loss SVM.
///
/// The dual is `D(alpha) = mean(alpha) - (mu/2)|w(alpha)|^2` with
/// `w(alpha) = (1/(mu n)) sum_i alpha_i y_i x_i` and `alpha in [0,1]^n`.
/// Stops once `f(w) - D(alpha) <= tol`.
pub fn reference_by_dual_ascent(
    problem: &ProblemInstance,
    tol: f64,
    max_epochs: u64,
) -> Result<ReferenceSolution> {
    check_tol(tol)?;
    let ProblemKind::SvmHinge { examples } = problem.kind() else {
        return contract("dual ascent needs an SVM problem");
    };
    let d = problem.dim();
    let mu = problem.mu();
    if examples.is_empty() {
        return Ok(ReferenceSolution {
            w_star: vec![0.0; d],
            f_star: 0.0,
            residual: 0.0,
            certified: true,
            method: ReferenceMethod::DualAscent,
            iterations: 0,
        });
    }
    let n = examples.len();
    let scale = 1.0 / (mu * n as f64);
    let sq: Vec<f64> = examples.iter().map(|e| e.norm_sq()).collect();
    let mut alpha = vec![0.0; n];
    let mut w = vec![0.0; d];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    let rebuild = |alpha: &[f64], w: &mut Vec<f64>| {
        w.iter_mut().for_each(|v| *v = 0.0);
        for (ex, &a) in examples.iter().zip(alpha) {
            if a != 0.0 {
                ex.add_scaled_to(a * ex.label * scale, w);
            }
        }
    };
    let duality_gap = |alpha: &[f64], w: &[f64]| -> f64 {
        let mut s = 0.0;
        for (ex, &a) in examples.iter().zip(alpha) {
            s += (1.0 - ex.margin(w)).max(0.0) - a;
        }
        s / n as f64 + mu * norm_sq(w)
    };

    let mut gap = f64::INFINITY;
    let mut epochs = 0;
    while epochs < max_epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let ex = &examples[i];
            let old = alpha[i];
            let new = if sq[i] == 0.0 {
                1.0
            } else {
                (old + (1.0 - ex.margin(&w)) / (sq[i] * scale)).clamp(0.0, 1.0)
            };
            if new != old {
                ex.add_scaled_to((new - old) * ex.label * scale, &mut w);
                alpha[i] = new;
            }
        }
        epochs += 1;
        rebuild(&alpha, &mut w);
        gap = duality_gap(&alpha, &w);
        if gap <= tol {
            break;
        }
    }
    let f_star = problem.objective_value(&w)?;
    Ok(ReferenceSolution {
        w_star: w,
        f_star,
        residual: gap.max(0.0),
        certified: gap <= tol,
        method: ReferenceMethod::DualAscent,
        iterations: epochs,
    })
}

/// Self-certifying reference: deterministic SC-PDA with the linear schedule.
///
/// Each iterate satisfies `f(w_t) - f* <= B_t`, so `max_t (f(w_t) - B_t)`
/// lower-bounds `f*` and the best value seen upper-bounds it. The residual
/// is the distance between the two.
pub fn reference_by_bound(
    problem: &ProblemInstance,
    set: &FeasibleSet,
    tol: f64,
    budget: u64,
) -> Result<ReferenceSolution> {
    check_tol(tol)?;
    let config = OptimizerConfig::new(problem.dim(), problem.mu())
        .with_set(set.clone())
        .with_schedule(ScheduleKind::Linear);
    let mut opt = ScPda::new(&config)?;
    let mut tracker = BoundTracker::new(problem.mu(), ScheduleKind::Linear)?;
    let mut best_w = opt.query_point().to_vec();
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut t = 0;
    while t < budget {
        t += 1;
        let (f, g) = problem.value_and_subgradient(opt.query_point())?;
        let b = tracker.push(g.norm_sq);
        if f < upper {
            upper = f;
            best_w.copy_from_slice(opt.query_point());
        }
        lower = lower.max(f - b);
        if upper - lower <= tol {
            break;
        }
        opt.step(&g)?;
    }
    let residual = (upper - lower).max(0.0);
    Ok(ReferenceSolution {
        w_star: best_w,
        f_star: upper,
        residual,
        certified: residual <= tol,
        method: ReferenceMethod::SelfBound,
        iterations: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_synthetic_svm;

    #[test]
    fn quadratic_closed_form() {
        let p = ProblemInstance::quadratic(vec![1.0, 2.0], 1.0).unwrap();
        let r = reference_optimum(&p, &FeasibleSet::WholeSpace, 1e-8).unwrap();
        assert_eq!(r.w_star, vec![1.0, 2.0]);
        assert_eq!(r.f_star, 0.0);
        assert_eq!(r.residual, 0.0);
        assert!(r.certified);
    }

    #[test]
    fn quadratic_on_ball_projects_center() {
        let p = ProblemInstance::quadratic(vec![3.0, 4.0], 2.0).unwrap();
        let r = reference_optimum(&p, &FeasibleSet::l2_ball(1.0).unwrap(), 1e-8).unwrap();
        assert!((r.w_star[0] - 0.6).abs() < 1e-15 && (r.w_star[1] - 0.8).abs() < 1e-15);
        assert!((r.f_star - 16.0).abs() < 1e-12);
    }

    #[test]
    fn dual_ascent_certifies_small_svm() {
        let p = make_synthetic_svm(60, 5, 1.0, 0.5, 2).unwrap().problem;
        let r = reference_by_dual_ascent(&p, 1e-12, 10_000).unwrap();
        assert!(r.certified, "gap {}", r.residual);
        assert!(p.objective_value(&r.w_star).unwrap() - r.f_star == 0.0);
    }

    #[test]
    fn bad_tolerance() {
        let p = ProblemInstance::quadratic(vec![1.0], 1.0).unwrap();
        assert!(reference_optimum(&p, &FeasibleSet::WholeSpace, 0.0).is_err());
    }

    #[test]
    fn uncertified_when_budget_is_tiny() {
        let p = make_synthetic_svm(40, 4, 1.0, 1.0, 5).unwrap().problem;
        let r = reference_by_bound(&p, &FeasibleSet::WholeSpace, 1e-10, 10).unwrap();
        assert!(!r.certified);
        assert!(r.residual > 1e-10);
        assert_eq!(r.iterations, 10);
    }
}
