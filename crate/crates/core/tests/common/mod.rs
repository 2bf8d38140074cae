#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            scale * z
        })
        .collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn golden(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Argmin of a convex `f` over the disc of radius `r` centered at the
/// origin, in polar coordinates: golden section along each ray (the
/// restriction of a convex function to a ray is convex), with a refined
/// angular grid outside.
pub fn disc_argmin(f: impl Fn(&[f64]) -> f64, r: f64) -> [f64; 2] {
    let along = |th: f64| {
        let (c, s) = (th.cos(), th.sin());
        let rho = golden(|rho| f(&[rho * c, rho * s]), 0.0, r, 1e-10);
        (f(&[rho * c, rho * s]), rho)
    };
    let mut lo = 0.0;
    let mut hi = std::f64::consts::TAU;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for _ in 0..8 {
        let n = 720;
        let step = (hi - lo) / n as f64;
        for k in 0..=n {
            let th = lo + k as f64 * step;
            let (v, rho) = along(th);
            if v < best.0 {
                best = (v, th, rho);
            }
        }
        lo = best.1 - 3.0 * step;
        hi = best.1 + 3.0 * step;
    }
    [best.2 * best.1.cos(), best.2 * best.1.sin()]
}
