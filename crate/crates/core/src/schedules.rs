//! Weight sequences `a_t`, `gamma_t` and their running sums.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    /// `a_t = gamma_t = t`
    Linear,
    /// `a_t = gamma_t = 1`
    Constant,
}

impl ScheduleKind {
    /// Weight at 1-based iteration `t`. Both built-in kinds use the same
    /// sequence for `a` and `gamma`.
    pub fn weight(self, t: u64) -> f64 {
        match self {
            Self::Linear => t as f64,
            Self::Constant => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Constant => "constant",
        }
    }
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Self::Linear),
            "constant" => Ok(Self::Constant),
            other => contract(format!("unknown schedule '{other}' (expected linear|constant)")),
        }
    }
}

/// Running state of a weight schedule. A fresh accumulator sits at `t = 0`
/// with all sums zero; the first gradient step happens after one `advance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleAccumulator {
    kind: ScheduleKind,
    t: u64,
    a: f64,
    gamma: f64,
    a_sum: f64,
    gamma_sum: f64,
}

impl ScheduleAccumulator {
    pub fn new(kind: ScheduleKind) -> Self {
        Self {
            kind,
            t: 0,
            a: 0.0,
            gamma: 0.0,
            a_sum: 0.0,
            gamma_sum: 0.0,
        }
    }

    pub fn advance(&mut self) {
        self.t += 1;
        self.a = self.kind.weight(self.t);
        self.gamma = self.kind.weight(self.t);
        self.a_sum += self.a;
        self.gamma_sum += self.gamma;
    }

    pub fn advanced(mut self) -> Self {
        self.advance();
        self
    }

    /// `a_{t+1}`, without advancing.
    pub fn next_a(&self) -> f64 {
        self.kind.weight(self.t + 1)
    }

    /// `A_{t+1}`, without advancing.
    pub fn next_a_sum(&self) -> f64 {
        self.a_sum + self.next_a()
    }

    /// Per-iterate gradient step `a_t / (mu gamma_t)`.
    pub fn step_size(&self, mu: f64) -> Result<f64> {
        if self.t == 0 {
            return contract("step size requested before the first advance");
        }
        Ok(self.a / (mu * self.gamma))
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }
    pub fn t(&self) -> u64 {
        self.t
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    /// `A_t`
    pub fn a_sum(&self) -> f64 {
        self.a_sum
    }
    /// `Gamma_t`
    pub fn gamma_sum(&self) -> f64 {
        self.gamma_sum
    }
}
