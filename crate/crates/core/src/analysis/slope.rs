use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares fit of `log gap` against `log t` over `t_lo <= t <= t_hi`.
///
/// `points` are `(t, gap)` pairs in any order.
pub fn loglog_slope(points: &[(u64, f64)], t_lo: u64, t_hi: u64) -> Result<SlopeFit> {
    if t_lo == 0 || t_hi < 2 * t_lo {
        return contract(format!(
            "fit window needs 1 <= t_lo and t_hi >= 2 t_lo, got [{t_lo}, {t_hi}]"
        ));
    }
    let mut window: Vec<(u64, f64)> = points
        .iter()
        .copied()
        .filter(|&(t, _)| t >= t_lo && t <= t_hi)
        .collect();
    window.sort_by_key(|&(t, _)| t);
    if let Some(&(t, g)) = window.iter().find(|&&(_, g)| !(g > 0.0)) {
        return contract(format!("nonpositive gap {g} at t={t}"));
    }
    if window.len() < 2 {
        return contract(format!("fewer than two points in [{t_lo}, {t_hi}]"));
    }
    let n = window.len() as f64;
    let xs: Vec<f64> = window.iter().map(|&(t, _)| (t as f64).ln()).collect();
    let ys: Vec<f64> = window.iter().map(|&(_, g)| g.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(SlopeFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: window.len(),
    })
}

/// Raises every gap to at least `floor` (the reference residual).
pub fn floor_gaps(points: &[(u64, f64)], floor: f64) -> Vec<(u64, f64)> {
    points.iter().map(|&(t, g)| (t, g.max(floor))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64, lo: u64, hi: u64) -> Vec<(u64, f64)> {
        (lo..=hi).map(|t| (t, f(t as f64))).collect()
    }

    #[test]
    fn exact_power_laws() {
        let fit = loglog_slope(&series(|t| 7.0 / t, 1, 1000), 10, 1000).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-9);
        assert!(fit.r_squared > 1.0 - 1e-9);
        let fit = loglog_slope(&series(|t| 3.0 / t.sqrt(), 1, 1000), 10, 1000).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-9);
    }

    #[test]
    fn window_errors() {
        let s = series(|t| 1.0 / t, 1, 100);
        assert!(loglog_slope(&s, 10, 19).is_err());
        assert!(loglog_slope(&s, 0, 10).is_err());
        let mut bad = s.clone();
        bad[30].1 = 0.0;
        bad[50].1 = -1.0;
        let err = loglog_slope(&bad, 10, 100).unwrap_err().to_string();
        assert!(err.contains("t=31"), "{err}");
    }

    #[test]
    fn flooring() {
        let f = floor_gaps(&[(1, -1e-14), (2, 0.5)], 1e-12);
        assert_eq!(f, vec![(1, 1e-12), (2, 0.5)]);
    }
}
