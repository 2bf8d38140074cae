//! Step-update state machines.
//!
//! Every optimizer exposes the same loop: evaluate a (sub)gradient at
//! [`Optimizer::query_point`], pass it to [`Optimizer::step`], and read the
//! algorithm's declared output from [`Optimizer::output`].

mod da;
mod gda;
mod papsg;
mod pegasos;
mod scpda;
mod scrda;

pub use da::{Da, DaGamma};
pub use gda::Gda;
pub use papsg::PaPsg;
pub use pegasos::Pegasos;
pub use scpda::ScPda;
pub use scrda::ScRda;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, contract, Error, Result};
use crate::problems::GradientSample;
use crate::projections::FeasibleSet;
use crate::schedules::ScheduleKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Gda,
    ScPda,
    Pegasos,
    PaPsg,
    ScRda,
    Da,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Self::Gda,
        Self::ScPda,
        Self::Pegasos,
        Self::PaPsg,
        Self::ScRda,
        Self::Da,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Gda => "gda",
            Self::ScPda => "scpda",
            Self::Pegasos => "pegasos",
            Self::PaPsg => "papsg",
            Self::ScRda => "scrda",
            Self::Da => "da",
        }
    }

    /// Whether the tracked gradient-norm bound applies to this algorithm's output.
    pub fn has_bound(self) -> bool {
        matches!(self, Self::Gda | Self::ScPda)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|a| a.name() == s).map_or_else(
            || {
                contract(format!(
                    "unknown algorithm '{s}' (expected gda|scpda|pegasos|papsg|scrda|da)"
                ))
            },
            Ok,
        )
    }
}

pub trait Optimizer: Send {
    fn algorithm(&self) -> Algorithm;

    /// Point at which the next gradient must be evaluated.
    fn query_point(&self) -> &[f64];

    /// Consumes a gradient evaluated at the current query point.
    fn step(&mut self, g: &GradientSample) -> Result<()>;

    /// The algorithm's reported solution: the weighted average for GDA, the
    /// current iterate for everything else.
    fn output(&self) -> Result<Vec<f64>>;

    fn steps_taken(&self) -> u64;

    /// Inner (pre-averaging) iterate, for methods that keep one.
    fn inner_iterate(&self) -> Option<&[f64]> {
        None
    }

    /// Unweighted average of the iterates, for methods that track it.
    fn uniform_output(&self) -> Option<Vec<f64>> {
        None
    }
}

/// Shared construction parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub dim: usize,
    pub mu: f64,
    pub set: FeasibleSet,
    pub schedule: ScheduleKind,
    /// Starting point; zero when absent. Projected onto the set if outside.
    pub init: Option<Vec<f64>>,
    pub da_gamma: DaGamma,
}

impl OptimizerConfig {
    pub fn new(dim: usize, mu: f64) -> Self {
        Self {
            dim,
            mu,
            set: FeasibleSet::WholeSpace,
            schedule: ScheduleKind::Linear,
            init: None,
            da_gamma: DaGamma::default(),
        }
    }

    pub fn with_set(mut self, set: FeasibleSet) -> Self {
        self.set = set;
        self
    }

    pub fn with_schedule(mut self, schedule: ScheduleKind) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_init(mut self, init: Vec<f64>) -> Self {
        self.init = Some(init);
        self
    }

    pub(crate) fn initial_point(&self) -> Result<Vec<f64>> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return contract(format!("mu must be positive, got {}", self.mu));
        }
        let w = match &self.init {
            Some(w) => {
                check_dim(self.dim, w.len())?;
                w.clone()
            }
            None => vec![0.0; self.dim],
        };
        self.set.project(&w)
    }
}

pub fn build(algo: Algorithm, config: &OptimizerConfig) -> Result<Box<dyn Optimizer>> {
    Ok(match algo {
        Algorithm::Gda => Box::new(Gda::new(config)?),
        Algorithm::ScPda => Box::new(ScPda::new(config)?),
        Algorithm::Pegasos => Box::new(Pegasos::new(config)?),
        Algorithm::PaPsg => Box::new(PaPsg::new(config)?),
        Algorithm::ScRda => Box::new(ScRda::new(config)?),
        Algorithm::Da => Box::new(Da::new(config)?),
    })
}

/// Primal averaging `w <- (A_t/A_{t+1}) w + (a_{t+1}/A_{t+1}) w_plus`.
pub(crate) fn primal_average(w: &mut [f64], w_plus: &[f64], a_sum: f64, a_next: f64) {
    let next_sum = a_sum + a_next;
    let keep = a_sum / next_sum;
    let take = a_next / next_sum;
    for (wi, pi) in w.iter_mut().zip(w_plus) {
        *wi = keep * *wi + take * pi;
    }
}
