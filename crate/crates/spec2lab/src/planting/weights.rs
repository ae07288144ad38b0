use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PlantError;
use crate::spectra::IntervalUnion;

/// `μ` together with `λ₁, λ₂, λ₃` in the open bands and convex weights with
/// `Σ t_m (μ − λ_m)² = 0`, so that `q(λ) = Σ t_m (λ − λ_m)²` vanishes at `μ` and `μ̄`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantTarget {
    #[serde(with = "crate::io::complex")]
    pub mu: Complex64,
    pub lambda: [f64; 3],
    pub t: [f64; 3],
    pub residual: f64,
}

impl PlantTarget {
    pub fn new(mu: Complex64, lambda: [f64; 3], t: [f64; 3]) -> Self {
        let residual = residual(mu, &lambda, &t);
        Self { mu, lambda, t, residual }
    }

    /// `(Σ t_m λ_m, Σ t_m λ_m²)`: `q(λ) = λ² − 2aλ + b`.
    pub fn q_coefficients(&self) -> (f64, f64) {
        let a = (0..3).map(|m| self.t[m] * self.lambda[m]).sum();
        let b = (0..3).map(|m| self.t[m] * self.lambda[m] * self.lambda[m]).sum();
        (a, b)
    }

    pub fn tolerance(&self) -> f64 {
        1e-10 * (1.0 + self.mu.norm_sqr())
    }

    pub fn is_valid(&self) -> bool {
        let sum: f64 = self.t.iter().sum();
        self.residual <= self.tolerance()
            && (sum - 1.0).abs() <= 1e-12
            && self.t.iter().all(|&t| (0.0..=1.0).contains(&t))
    }
}

/// `|Σ t_m (μ − λ_m)²|`.
pub fn residual(mu: Complex64, lambda: &[f64; 3], t: &[f64; 3]) -> f64 {
    (0..3).map(|m| (mu - lambda[m]).powi(2) * t[m]).sum::<Complex64>().norm()
}

/// Roots `a ± √(a² − b)` of `λ² − 2aλ + b`, computed in complex arithmetic.
pub fn quadratic_roots(a: Complex64, b: Complex64) -> [Complex64; 2] {
    let d = (a * a - b).sqrt();
    [a + d, a - d]
}

/// Barycentric coordinates of 0 in the triangle `{(μ − λ_m)²}`, clamped and
/// renormalised, or `None` if 0 is outside or the triangle is degenerate.
fn barycentric(mu: Complex64, lambda: &[f64; 3]) -> Option<[f64; 3]> {
    let w: Vec<Complex64> = lambda.iter().map(|&l| (mu - l).powi(2)).collect();
    let (p, q) = (w[0] - w[2], w[1] - w[2]);
    let det = p.re * q.im - q.re * p.im;
    let scale = p.norm() * q.norm();
    if det.abs() <= 1e-14 * scale || scale == 0.0 {
        return None;
    }
    let t1 = (-w[2].re * q.im + q.re * w[2].im) / det;
    let t2 = (-p.re * w[2].im + w[2].re * p.im) / det;
    let t = [t1, t2, 1.0 - t1 - t2];
    if t.iter().any(|x| !(-1e-12..=1.0 + 1e-12).contains(x)) {
        return None;
    }
    let mut t = t.map(|x| x.clamp(0.0, 1.0));
    let s: f64 = t.iter().sum();
    t.iter_mut().for_each(|x| *x /= s);
    Some(t)
}

/// Two-point solution on the circle through `μ` with diameter `[λ₁, λ₂]`.
fn thales(mu: Complex64, l1: f64, l2: f64) -> [f64; 3] {
    let (d1, d2) = ((mu - l1).norm_sqr(), (mu - l2).norm_sqr());
    let t1 = d2 / (d1 + d2);
    [t1, 1.0 - t1, 0.0]
}

fn band_margin(sigma: &IntervalUnion, x: f64) -> f64 {
    sigma
        .intervals()
        .iter()
        .filter(|&&(a, b)| a < x && x < b)
        .map(|&(a, b)| (x - a).min(b - x))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// 64 interior points per band.
fn band_grid(sigma: &IntervalUnion) -> Vec<f64> {
    const PER_BAND: usize = 64;
    sigma
        .intervals()
        .iter()
        .flat_map(|&(a, b)| (0..PER_BAND).map(move |i| a + (b - a) * (i as f64 + 0.5) / PER_BAND as f64))
        .collect()
}

/// Solves the convex-hull condition for `μ` with `λ`'s anywhere in the open bands.
pub fn solve_weights(mu: Complex64, sigma: &IntervalUnion) -> Result<PlantTarget, PlantError> {
    let mu = if mu.im < 0.0 { mu.conj() } else { mu };
    if mu.im == 0.0 {
        return match sigma.band_of(mu.re) {
            Some(_) => Ok(PlantTarget::new(mu, [mu.re; 3], [1.0, 0.0, 0.0])),
            None => Err(PlantError::NoWeights { mu, best_residual: f64::INFINITY }),
        };
    }
    let (x, y) = (mu.re, mu.im);
    let mut best: Option<(f64, [f64; 3], [f64; 3])> = None;
    let consider = |lambda: [f64; 3], t: [f64; 3], best: &mut Option<(f64, [f64; 3], [f64; 3])>| {
        let margin = (0..3)
            .filter(|&m| t[m] > 0.0)
            .map(|m| band_margin(sigma, lambda[m]))
            .fold(f64::INFINITY, f64::min);
        if margin > 0.0 && residual(mu, &lambda, &t) <= 1e-10 * (1.0 + mu.norm_sqr()) {
            let score = margin * t.iter().filter(|&&s| s > 0.0).fold(1.0f64, |a, &s| a.min(s)).sqrt();
            if best.as_ref().is_none_or(|b| score > b.0) {
                *best = Some((score, lambda, t));
            }
        }
    };

    // Thales pairs: the symmetric one first, then one per grid point.
    consider([x - y, x + y, x - y], thales(mu, x - y, x + y), &mut best);
    let grid = band_grid(sigma);
    for &l1 in &grid {
        if (l1 - x).abs() < 1e-12 {
            continue;
        }
        let c = (mu.norm_sqr() - l1 * l1) / (2.0 * (x - l1));
        let l2 = 2.0 * c - l1;
        consider([l1, l2, l1], thales(mu, l1, l2), &mut best);
    }
    if best.is_none() {
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                for k in j + 1..grid.len() {
                    let lambda = [grid[i], grid[j], grid[k]];
                    if let Some(t) = barycentric(mu, &lambda) {
                        consider(lambda, t, &mut best);
                    }
                }
            }
        }
    }
    match best {
        Some((_, lambda, t)) => Ok(PlantTarget::new(mu, lambda, t)),
        None => Err(PlantError::NoWeights { mu, best_residual: best_triangle_residual(mu, &grid) }),
    }
}

/// Smallest distance from 0 to a grid triangle `{(μ − λ_m)²}`, for error reports.
fn best_triangle_residual(mu: Complex64, grid: &[f64]) -> f64 {
    let w: Vec<Complex64> = grid.iter().map(|&l| (mu - l).powi(2)).collect();
    let seg = |a: Complex64, b: Complex64| {
        let d = b - a;
        let s = (-(a.re * d.re + a.im * d.im) / d.norm_sqr().max(f64::MIN_POSITIVE)).clamp(0.0, 1.0);
        (a + d * s).norm()
    };
    let mut best = f64::INFINITY;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            best = best.min(seg(w[i], w[j]));
        }
    }
    best
}

/// Solves against a finite spectrum: every `λ_m` with positive weight is one
/// of `candidates` (sorted) not yet marked in `used`. Returns the target and
/// the chosen indices.
pub fn solve_weights_discrete(
    mu: Complex64,
    sigma: &IntervalUnion,
    candidates: &[f64],
    used: &[bool],
) -> Result<(PlantTarget, [Option<usize>; 3]), PlantError> {
    let mu = if mu.im < 0.0 { mu.conj() } else { mu };
    let free = |i: usize| !used[i] && sigma.band_of(candidates[i]).is_some();
    let nearest = |x: f64, count: usize| -> Vec<usize> {
        let k = candidates.partition_point(|&c| c < x);
        let mut out = Vec::new();
        let (mut lo, mut hi) = (k as isize - 1, k);
        while out.len() < count && (lo >= 0 || hi < candidates.len()) {
            let left = (lo >= 0).then(|| x - candidates[lo as usize]);
            let right = (hi < candidates.len()).then(|| candidates[hi] - x);
            let take_left = match (left, right) {
                (Some(l), Some(r)) => l <= r,
                (Some(_), None) => true,
                _ => false,
            };
            let i = if take_left {
                lo -= 1;
                (lo + 1) as usize
            } else {
                hi += 1;
                hi - 1
            };
            if free(i) {
                out.push(i);
            }
        }
        out
    };
    if mu.im == 0.0 {
        if sigma.band_of(mu.re).is_none() {
            return Err(PlantError::NoWeights { mu, best_residual: f64::INFINITY });
        }
        let Some(&i) = nearest(mu.re, 1).first() else {
            return Err(PlantError::NoWeights { mu, best_residual: f64::INFINITY });
        };
        let l = candidates[i];
        return Ok((PlantTarget::new(mu, [l; 3], [1.0, 0.0, 0.0]), [Some(i), None, None]));
    }
    let continuous = solve_weights(mu, sigma)?;
    for count in [2usize, 4, 8, 16] {
        let mut pool: Vec<usize> = (0..3)
            .filter(|&m| continuous.t[m] > 0.0)
            .flat_map(|m| nearest(continuous.lambda[m], count))
            .collect();
        pool.sort_unstable();
        pool.dedup();
        let mut best: Option<(f64, [usize; 3], [f64; 3])> = None;
        for a in 0..pool.len() {
            for b in a + 1..pool.len() {
                for c in b + 1..pool.len() {
                    let idx = [pool[a], pool[b], pool[c]];
                    let lambda = idx.map(|i| candidates[i]);
                    if let Some(t) = barycentric(mu, &lambda) {
                        if residual(mu, &lambda, &t) > 1e-10 * (1.0 + mu.norm_sqr()) {
                            continue;
                        }
                        let score = t.iter().fold(f64::INFINITY, |x, &y| x.min(y));
                        if best.as_ref().is_none_or(|bst| score > bst.0) {
                            best = Some((score, idx, t));
                        }
                    }
                }
            }
        }
        if let Some((_, idx, t)) = best {
            let lambda = idx.map(|i| candidates[i]);
            let chosen = [0, 1, 2].map(|m| (t[m] > 0.0).then_some(idx[m]));
            return Ok((PlantTarget::new(mu, lambda, t), chosen));
        }
    }
    Err(PlantError::NoWeights { mu, best_residual: continuous.residual })
}
