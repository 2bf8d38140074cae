//! Feasible sets and Euclidean projections onto them.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, contract, Result};
use crate::linalg::{all_finite, norm};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeasibleSet {
    /// Unconstrained; projection is the identity.
    WholeSpace,
    L2Ball {
        radius: f64,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
}

impl FeasibleSet {
    pub fn l2_ball(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return contract(format!("ball radius must be positive, got {radius}"));
        }
        Ok(Self::L2Ball { radius })
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if let Some(k) = lower.iter().zip(&upper).position(|(l, u)| !(l <= u)) {
            return contract(format!(
                "box bounds out of order at coordinate {k}: {} > {}",
                lower[k], upper[k]
            ));
        }
        Ok(Self::Box { lower, upper })
    }

    /// Box with the same bounds on every coordinate.
    pub fn uniform_box(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::boxed(vec![lo; dim], vec![hi; dim])
    }

    /// Radius `R = M/mu` of a ball guaranteed to contain the SVM optimum,
    /// where `M` is the largest feature norm (the maximal hinge slope).
    pub fn svm_ball(max_feature_norm: f64, mu: f64) -> Result<Self> {
        Self::l2_ball(max_feature_norm / mu)
    }

    pub fn project(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = v.to_vec();
        self.project_in_place(&mut out)?;
        Ok(out)
    }

    pub fn project_in_place(&self, v: &mut [f64]) -> Result<()> {
        if !all_finite(v) {
            return contract("projection of a non-finite vector");
        }
        match self {
            Self::WholeSpace => {}
            Self::L2Ball { radius } => {
                let n = norm(v);
                // points on the boundary are returned unchanged
                if n > *radius {
                    let s = radius / n;
                    v.iter_mut().for_each(|x| *x *= s);
                }
            }
            Self::Box { lower, upper } => {
                check_dim(lower.len(), v.len())?;
                for ((x, lo), hi) in v.iter_mut().zip(lower).zip(upper) {
                    *x = x.clamp(*lo, *hi);
                }
            }
        }
        Ok(())
    }

    /// Whether `v` lies within `tol` of the set: Euclidean distance for the
    /// ball, per-coordinate slack for the box.
    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        match self {
            Self::WholeSpace => true,
            Self::L2Ball { radius } => norm(v) <= radius + tol,
            Self::Box { lower, upper } => {
                v.len() == lower.len()
                    && v.iter()
                        .zip(lower.iter().zip(upper))
                        .all(|(x, (lo, hi))| *x >= lo - tol && *x <= hi + tol)
            }
        }
    }

    pub fn is_whole_space(&self) -> bool {
        matches!(self, Self::WholeSpace)
    }
}
