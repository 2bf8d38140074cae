//! Strongly convex problem instances and their subgradient oracles.
//!
//! Two objectives are supported:
//!
//! * the regularized hinge-loss SVM
//!   `f(w) = (mu/2)|w|^2 + (1/n) sum_i max(0, 1 - y_i <w, x_i>)`, and
//! * the pure quadratic `f(w) = (mu/2)|w - c|^2` with known optimum `c`.
//!
//! The SVM loss uses the mean over examples, so a single uniformly sampled
//! example gives an unbiased estimate of the loss subgradient.

use rand::seq::index;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, contract, Result};
use crate::linalg::{dot, norm_sq};

/// One labelled training example with sparse features (0-based indices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub label: f64,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl Example {
    pub fn dense(label: f64, features: &[f64]) -> Self {
        Self {
            label,
            indices: (0..features.len()).collect(),
            values: features.to_vec(),
        }
    }

    #[inline]
    pub fn dot(&self, w: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&i, &v)| w[i] * v)
            .sum()
    }

    /// `out += alpha * x`
    #[inline]
    pub fn add_scaled_to(&self, alpha: f64, out: &mut [f64]) {
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            out[i] += alpha * v;
        }
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.values)
    }

    /// Functional margin `y <w, x>`.
    #[inline]
    pub fn margin(&self, w: &[f64]) -> f64 {
        self.label * self.dot(w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProblemKind {
    SvmHinge { examples: Vec<Example> },
    Quadratic { center: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    kind: ProblemKind,
    mu: f64,
    dim: usize,
}

/// A (sub)gradient together with its cached squared norm.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSample {
    pub vector: Vec<f64>,
    pub norm_sq: f64,
    pub sampled_index: Option<usize>,
}

impl GradientSample {
    pub fn new(vector: Vec<f64>) -> Self {
        let norm_sq = norm_sq(&vector);
        Self {
            vector,
            norm_sq,
            sampled_index: None,
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq.sqrt()
    }
}

/// Empirical bounds observed along a run: `M` for gradients, `M0` for the
/// distance to the optimum. Both only ever grow.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub max_grad_norm: f64,
    pub max_dist_to_opt: f64,
}

impl DiagnosticsRecord {
    pub fn observe(&mut self, grad_norm: f64, dist_to_opt: Option<f64>) {
        self.max_grad_norm = self.max_grad_norm.max(grad_norm);
        if let Some(d) = dist_to_opt {
            self.max_dist_to_opt = self.max_dist_to_opt.max(d);
        }
    }
}

impl ProblemInstance {
    pub fn svm(examples: Vec<Example>, dim: usize, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return contract(format!("mu must be positive, got {mu}"));
        }
        if dim == 0 {
            return contract("dimension must be positive");
        }
        for (k, ex) in examples.iter().enumerate() {
            if ex.label != 1.0 && ex.label != -1.0 {
                return contract(format!("example {k}: label {} is not +1/-1", ex.label));
            }
            if ex.indices.len() != ex.values.len() {
                return contract(format!("example {k}: index/value length mismatch"));
            }
            if let Some(&i) = ex.indices.iter().find(|&&i| i >= dim) {
                return contract(format!("example {k}: feature index {i} >= dim {dim}"));
            }
        }
        Ok(Self {
            kind: ProblemKind::SvmHinge { examples },
            mu,
            dim,
        })
    }

    pub fn quadratic(center: Vec<f64>, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return contract(format!("mu must be positive, got {mu}"));
        }
        if center.is_empty() {
            return contract("dimension must be positive");
        }
        Ok(Self {
            dim: center.len(),
            kind: ProblemKind::Quadratic { center },
            mu,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ProblemKind {
        &self.kind
    }

    /// Number of loss terms; zero for the quadratic.
    pub fn n(&self) -> usize {
        match &self.kind {
            ProblemKind::SvmHinge { examples } => examples.len(),
            ProblemKind::Quadratic { .. } => 0,
        }
    }

    pub fn examples(&self) -> &[Example] {
        match &self.kind {
            ProblemKind::SvmHinge { examples } => examples,
            ProblemKind::Quadratic { .. } => &[],
        }
    }

    /// Same problem with a different strong-convexity modulus.
    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        match &self.kind {
            ProblemKind::SvmHinge { examples } => Self::svm(examples.clone(), self.dim, mu),
            ProblemKind::Quadratic { center } => Self::quadratic(center.clone(), mu),
        }
    }

    pub fn objective_value(&self, w: &[f64]) -> Result<f64> {
        check_dim(self.dim, w.len())?;
        Ok(match &self.kind {
            ProblemKind::SvmHinge { examples } => {
                let loss: f64 = examples.iter().map(|ex| (1.0 - ex.margin(w)).max(0.0)).sum();
                0.5 * self.mu * norm_sq(w) + loss / examples.len().max(1) as f64
            }
            ProblemKind::Quadratic { center } => {
                let d: f64 = w.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                0.5 * self.mu * d
            }
        })
    }

    /// `f(u) - f(w)`, evaluated from `u - w` so that nearby points do not
    /// lose the difference to cancellation.
    pub fn objective_difference(&self, u: &[f64], w: &[f64]) -> Result<f64> {
        check_dim(self.dim, u.len())?;
        check_dim(self.dim, w.len())?;
        let delta: Vec<f64> = u.iter().zip(w).map(|(a, b)| a - b).collect();
        let sum: Vec<f64> = u.iter().zip(w).map(|(a, b)| a + b).collect();
        match &self.kind {
            ProblemKind::SvmHinge { examples } => {
                let mut loss = 0.0;
                for ex in examples {
                    let mw = ex.margin(w);
                    let shift = ex.label * ex.dot(&delta);
                    let mu_shifted = mw + shift;
                    loss += match (mu_shifted < 1.0, mw < 1.0) {
                        (true, true) => -shift,
                        (false, false) => 0.0,
                        _ => (1.0 - mu_shifted).max(0.0) - (1.0 - mw).max(0.0),
                    };
                }
                Ok(0.5 * self.mu * dot(&delta, &sum) + loss / examples.len().max(1) as f64)
            }
            ProblemKind::Quadratic { center } => {
                // |u-c|^2 - |w-c|^2 = <u-w, u+w-2c>
                let s: f64 = delta
                    .iter()
                    .zip(sum.iter().zip(center))
                    .map(|(d, (s, c))| d * (s - 2.0 * c))
                    .sum();
                Ok(0.5 * self.mu * s)
            }
        }
    }

    pub fn full_subgradient(&self, w: &[f64]) -> Result<GradientSample> {
        self.value_and_subgradient(w).map(|(_, g)| g)
    }

    /// Objective value and full subgradient from a single pass over the data.
    ///
    /// At a margin of exactly 1 the hinge contributes the zero subgradient.
    pub fn value_and_subgradient(&self, w: &[f64]) -> Result<(f64, GradientSample)> {
        check_dim(self.dim, w.len())?;
        match &self.kind {
            ProblemKind::SvmHinge { examples } => {
                let n = examples.len().max(1) as f64;
                let mut loss_grad = vec![0.0; self.dim];
                let mut loss = 0.0;
                for ex in examples {
                    let m = ex.margin(w);
                    if m < 1.0 {
                        loss += 1.0 - m;
                        ex.add_scaled_to(-ex.label, &mut loss_grad);
                    }
                }
                let value = 0.5 * self.mu * norm_sq(w) + loss / n;
                let g: Vec<f64> = w
                    .iter()
                    .zip(&loss_grad)
                    .map(|(wi, li)| self.mu * wi + li / n)
                    .collect();
                Ok((value, GradientSample::new(g)))
            }
            ProblemKind::Quadratic { center } => {
                let diff: Vec<f64> = w.iter().zip(center).map(|(a, c)| a - c).collect();
                let value = 0.5 * self.mu * norm_sq(&diff);
                let g = diff.into_iter().map(|d| self.mu * d).collect();
                Ok((value, GradientSample::new(g)))
            }
        }
    }

    /// Single-example subgradient `mu w - 1{y<w,x> < 1} y x` for a uniformly
    /// drawn example. The regularizer part is exact.
    pub fn stochastic_subgradient<R: Rng + ?Sized>(&self, w: &[f64], rng: &mut R) -> Result<GradientSample> {
        check_dim(self.dim, w.len())?;
        let ProblemKind::SvmHinge { examples } = &self.kind else {
            return contract("stochastic oracle requires an SVM problem");
        };
        if examples.is_empty() {
            return contract("stochastic oracle on an empty dataset");
        }
        let i = rng.random_range(0..examples.len());
        let ex = &examples[i];
        let mut g: Vec<f64> = w.iter().map(|wi| self.mu * wi).collect();
        if ex.margin(w) < 1.0 {
            ex.add_scaled_to(-ex.label, &mut g);
        }
        let mut sample = GradientSample::new(g);
        sample.sampled_index = Some(i);
        Ok(sample)
    }
}

/// Synthetic SVM data plus the separator it was planted with.
#[derive(Debug, Clone)]
pub struct SyntheticSvm {
    pub problem: ProblemInstance,
    pub planted: Vec<f64>,
}

/// Fraction of labels flipped by the synthetic generator.
pub const SYNTHETIC_LABEL_NOISE: f64 = 0.1;

/// Generates a reproducible linearly separable-with-noise dataset.
///
/// Features are standard normal. Labels follow the sign of a random unit
/// direction `u`, with 10% flipped. The planted separator is `u` scaled so
/// that the requested margin is met by the most confident tenth of the data.
pub fn make_synthetic_svm(n: usize, d: usize, margin: f64, mu: f64, seed: u64) -> Result<SyntheticSvm> {
    if n == 0 || d == 0 {
        return contract(format!("synthetic SVM needs n >= 1 and d >= 1, got n={n}, d={d}"));
    }
    if !(margin > 0.0) {
        return contract(format!("margin must be positive, got {margin}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
    let un = norm_sq(&u).sqrt().max(f64::MIN_POSITIVE);
    u.iter_mut().for_each(|v| *v /= un);

    let mut examples = Vec::with_capacity(n);
    let mut scores = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let s = dot(&u, &x);
        let mut y = if s >= 0.0 { 1.0 } else { -1.0 };
        if rng.random::<f64>() < SYNTHETIC_LABEL_NOISE {
            y = -y;
        }
        scores.push(s.abs());
        examples.push(Example::dense(y, &x));
    }
    scores.sort_by(f64::total_cmp);
    let q = scores[((n - 1) as f64 * 0.9).round() as usize].max(1e-12);
    let planted = u.iter().map(|v| v * margin / q).collect();
    Ok(SyntheticSvm {
        problem: ProblemInstance::svm(examples, d, mu)?,
        planted,
    })
}

/// Quadratic with a standard-normal center.
pub fn random_quadratic(d: usize, mu: f64, seed: u64) -> Result<ProblemInstance> {
    if d == 0 {
        return contract("dimension must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
    ProblemInstance::quadratic(center, mu)
}

/// Uniform sample of `k` distinct example positions, used by subsampling.
pub(crate) fn sample_positions(len: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    index::sample(&mut rng, len, k).into_vec()
}
