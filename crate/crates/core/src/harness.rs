//! Drives an optimizer against a problem oracle and records a gap trace.
//!
//! Row `t` describes the point produced after `t - 1` steps, together with
//! the `t`-th gradient evaluated at the query point. For GDA the recorded
//! point is the weighted average including `w_t`; for everything else it is
//! `w_t` itself. Every algorithm therefore spends exactly `t` gradient
//! evaluations on row `t`.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{BoundTracker, Lemma3Record, ReferenceSolution, RunTrace, TraceMeta, TraceRecord};
use crate::error::{contract, Error, Result};
use crate::linalg::dist_sq;
use crate::optimizers::{build, Algorithm, DaGamma, Gda, Optimizer, OptimizerConfig};
use crate::problems::{DiagnosticsRecord, GradientSample, ProblemInstance};
use crate::projections::FeasibleSet;
use crate::schedules::ScheduleKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    Deterministic,
    Stochastic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Checkpoints {
    /// Every iteration.
    Every,
    /// Every iteration up to 100, then about `per_decade` per decade.
    LogSpaced { per_decade: u32 },
}

impl Default for Checkpoints {
    fn default() -> Self {
        Self::LogSpaced { per_decade: 100 }
    }
}

impl Checkpoints {
    /// Sorted checkpoint iterations in `1..=iters`; `iters` is always last.
    pub fn iterations(self, iters: u64) -> Vec<u64> {
        match self {
            Self::Every => (1..=iters).collect(),
            Self::LogSpaced { per_decade } => {
                let mut out: Vec<u64> = (1..=iters.min(100)).collect();
                let per = per_decade.max(1) as f64;
                let mut k = 2.0 * per + 1.0;
                loop {
                    let t = 10f64.powf(k / per).round() as u64;
                    if t >= iters {
                        break;
                    }
                    if t > *out.last().unwrap_or(&0) {
                        out.push(t);
                    }
                    k += 1.0;
                }
                if out.last() != Some(&iters) && iters > 0 {
                    out.push(iters);
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub algorithm: Algorithm,
    pub schedule: ScheduleKind,
    pub set: FeasibleSet,
    pub iters: u64,
    pub seed: u64,
    pub oracle: OracleKind,
    pub init: Option<Vec<f64>>,
    pub checkpoints: Checkpoints,
    pub da_gamma: DaGamma,
    /// Keep per-step records for the trajectory inequality check (SC-PDA, deterministic).
    pub capture_lemma3: bool,
    pub timing: bool,
    pub problem_id: String,
    /// Test hook: negate the gradient weight inside GDA.
    pub gda_sign_fault: bool,
}

impl RunSpec {
    pub fn new(algorithm: Algorithm, iters: u64) -> Self {
        Self {
            algorithm,
            schedule: ScheduleKind::Linear,
            set: FeasibleSet::WholeSpace,
            iters,
            seed: 0,
            oracle: OracleKind::Deterministic,
            init: None,
            checkpoints: Checkpoints::default(),
            da_gamma: DaGamma::default(),
            capture_lemma3: false,
            timing: true,
            problem_id: String::new(),
            gda_sign_fault: false,
        }
    }

    pub fn with_schedule(mut self, schedule: ScheduleKind) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_set(mut self, set: FeasibleSet) -> Self {
        self.set = set;
        self
    }

    pub fn stochastic(mut self, seed: u64) -> Self {
        self.oracle = OracleKind::Stochastic;
        self.seed = seed;
        self
    }

    pub fn with_checkpoints(mut self, checkpoints: Checkpoints) -> Self {
        self.checkpoints = checkpoints;
        self
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: RunTrace,
    pub lemma3: Vec<Lemma3Record>,
    pub final_output: Vec<f64>,
}

fn make_optimizer(problem: &ProblemInstance, spec: &RunSpec) -> Result<Box<dyn Optimizer>> {
    let mut config = OptimizerConfig::new(problem.dim(), problem.mu())
        .with_set(spec.set.clone())
        .with_schedule(spec.schedule);
    config.init = spec.init.clone();
    config.da_gamma = spec.da_gamma;
    if spec.gda_sign_fault {
        if spec.algorithm != Algorithm::Gda {
            return contract("the sign fault only applies to GDA");
        }
        return Ok(Box::new(Gda::new(&config)?.with_sign_fault()));
    }
    build(spec.algorithm, &config)
}

pub fn run(problem: &ProblemInstance, reference: &ReferenceSolution, spec: &RunSpec) -> Result<RunOutcome> {
    if spec.iters == 0 {
        return contract("iteration budget must be at least 1");
    }
    if reference.w_star.len() != problem.dim() {
        return contract("reference solution has the wrong dimension");
    }
    let stochastic = spec.oracle == OracleKind::Stochastic;
    if spec.capture_lemma3 && (spec.algorithm != Algorithm::ScPda || stochastic) {
        return contract("trajectory inequality capture needs deterministic SC-PDA");
    }
    let mut opt = make_optimizer(problem, spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut tracker = BoundTracker::new(problem.mu(), spec.schedule)?;
    let is_gda = spec.algorithm == Algorithm::Gda;
    let bound_applies = spec.algorithm.has_bound();

    let checkpoints = spec.checkpoints.iterations(spec.iters);
    let mut next_cp = 0usize;
    let mut records = Vec::with_capacity(checkpoints.len());
    let mut diagnostics = DiagnosticsRecord::default();
    let mut lemma3 = Vec::new();

    // running (1/A_t) sum a_k f(w_k) for deterministic GDA
    let mut weighted_f = 0.0;
    let mut a_sum = 0.0;

    let mut prev_query: Vec<f64> = opt.query_point().to_vec();
    let mut prev_plus: Vec<f64> = opt.query_point().to_vec();
    let start = Instant::now();

    for t in 1..=spec.iters {
        let query = opt.query_point().to_vec();
        let (f_query, g): (Option<f64>, GradientSample) = if stochastic {
            (None, problem.stochastic_subgradient(&query, &mut rng)?)
        } else {
            let (f, g) = problem.value_and_subgradient(&query)?;
            (Some(f), g)
        };
        let bound = tracker.push(g.norm_sq);
        diagnostics.observe(g.norm(), Some(dist_sq(&query, &reference.w_star).sqrt()));

        if is_gda {
            if let Some(f) = f_query {
                let a = spec.schedule.weight(t);
                a_sum += a;
                weighted_f += a * (f - weighted_f) / a_sum;
            }
        }

        let lemma_pre = if spec.capture_lemma3 {
            let decrease = if t == 1 {
                0.0
            } else {
                problem.objective_difference(&prev_query, &query)?
            };
            Some((
                spec.schedule.weight(t),
                weight_sum_before(spec.schedule, t),
                decrease,
            ))
        } else {
            None
        };

        opt.step(&g).map_err(|e| match e {
            Error::Contract(m) if m.contains("non-finite") => {
                Error::Contract(format!("{} diverged at step {t}: {m}", spec.algorithm))
            }
            other => other,
        })?;

        if let Some((a, a_prev, decrease)) = lemma_pre {
            let w_plus = opt
                .inner_iterate()
                .map(<[f64]>::to_vec)
                .ok_or_else(|| Error::Contract("optimizer has no inner iterate".into()))?;
            lemma3.push(Lemma3Record {
                t,
                a,
                a_sum_prev: a_prev,
                grad: g.vector.clone(),
                w: query.clone(),
                w_plus_prev: std::mem::replace(&mut prev_plus, w_plus.clone()),
                w_plus,
                value: f_query.unwrap_or(f64::NAN),
                value_decrease: decrease,
            });
        }

        if next_cp < checkpoints.len() && checkpoints[next_cp] == t {
            next_cp += 1;
            let (point, f_value) = if is_gda {
                let p = opt.output()?;
                let f = problem.objective_value(&p)?;
                (p, f)
            } else {
                let f = match f_query {
                    Some(f) => f,
                    None => problem.objective_value(&query)?,
                };
                (query.clone(), f)
            };
            let uniform_gap = match opt.uniform_output() {
                Some(u) => Some(problem.objective_value(&u)? - reference.f_star),
                None => None,
            };
            records.push(TraceRecord {
                t,
                f_value,
                gap: f_value - reference.f_star,
                bound_rhs: bound_applies.then_some(bound),
                grad_norm_sq: g.norm_sq,
                dist_to_opt_sq: Some(dist_sq(&point, &reference.w_star)),
                weighted_value_gap: (is_gda && !stochastic).then_some(weighted_f - reference.f_star),
                uniform_gap,
                time_ns: if spec.timing {
                    start.elapsed().as_nanos() as u64
                } else {
                    0
                },
            });
        }
        prev_query = query;
    }

    Ok(RunOutcome {
        trace: RunTrace {
            meta: TraceMeta {
                algorithm: spec.algorithm,
                schedule: spec.schedule,
                seed: spec.seed,
                problem_id: spec.problem_id.clone(),
                stochastic,
            },
            records,
            diagnostics,
        },
        lemma3,
        final_output: opt.output()?,
    })
}

/// `A_{t-1}` for the given schedule.
fn weight_sum_before(kind: ScheduleKind, t: u64) -> f64 {
    let k = (t - 1) as f64;
    match kind {
        ScheduleKind::Linear => k * (k + 1.0) / 2.0,
        ScheduleKind::Constant => k,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::reference_optimum;

    #[test]
    fn log_checkpoints_shape() {
        let cps = Checkpoints::default().iterations(100_000);
        assert_eq!(&cps[..100], &(1..=100).collect::<Vec<_>>()[..]);
        assert_eq!(*cps.last().unwrap(), 100_000);
        assert!(cps.windows(2).all(|w| w[0] < w[1]));
        let per_decade = cps.iter().filter(|&&t| (1000..10_000).contains(&t)).count();
        assert!((95..=101).contains(&per_decade), "{per_decade}");
        assert_eq!(Checkpoints::default().iterations(7), vec![1, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn quadratic_one_step_solve() {
        let c = vec![1.0, -2.0, 0.5];
        let p = ProblemInstance::quadratic(c.clone(), 1.0).unwrap();
        let r = reference_optimum(&p, &FeasibleSet::WholeSpace, 1e-9).unwrap();

        let out = run(&p, &r, &RunSpec::new(Algorithm::Pegasos, 10)).unwrap();
        assert_eq!(out.trace.records.len(), 10);
        assert!(out.trace.records.last().unwrap().gap.abs() < 1e-12);

        // GDA's iterate hits c after one step, so the weighted average at t
        // is c + (w_1 - c)/A_t.
        let out = run(&p, &r, &RunSpec::new(Algorithm::Gda, 10)).unwrap();
        let expect = 0.5 * crate::linalg::norm_sq(&c) / (55.0 * 55.0);
        let gap = out.trace.records.last().unwrap().gap;
        assert!((gap - expect).abs() < 1e-12, "{gap} vs {expect}");
    }

    #[test]
    fn zero_iterations_rejected() {
        let p = ProblemInstance::quadratic(vec![1.0], 1.0).unwrap();
        let r = reference_optimum(&p, &FeasibleSet::WholeSpace, 1e-9).unwrap();
        assert!(run(&p, &r, &RunSpec::new(Algorithm::Gda, 0)).is_err());
    }

    #[test]
    fn lemma_capture_only_for_scpda() {
        let p = ProblemInstance::quadratic(vec![1.0], 1.0).unwrap();
        let r = reference_optimum(&p, &FeasibleSet::WholeSpace, 1e-9).unwrap();
        let mut spec = RunSpec::new(Algorithm::Pegasos, 5);
        spec.capture_lemma3 = true;
        assert!(run(&p, &r, &spec).is_err());
    }
}
