//! Analytic polynomial symbols, Toeplitz matrices, dilations and the
//! collapsing construction built from them.

mod dilation;
mod lemma22;

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, LinalgError};
use crate::spectra::SpectraError;

pub use dilation::{assemble_counterexample, dilate, Dilation};
pub use lemma22::{epsilon0, lemma22_construct, Lemma22Certificate, Lemma22Options, Lemma22Params};

#[derive(Debug, Error)]
pub enum SymbolError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("symbol constraints not met at degree {degree}: {detail}; try a larger degree")]
    Unattainable { degree: usize, detail: String },
    #[error("not dilatable: M − B² has eigenvalue {min_eigenvalue:e}")]
    NotDilatable { min_eigenvalue: f64 },
    #[error("−i[B, A] + A² is not positive semidefinite (min eigenvalue {min_eigenvalue:e}) at N = {n}")]
    CommutatorNotPsd { n: usize, min_eigenvalue: f64 },
    #[error("spectrum of B is only {achieved:.4}-dense (wanted {wanted}) at N = {}", best.n)]
    DensityNotAchieved { achieved: f64, wanted: f64, best: Box<Lemma22Certificate> },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// Fourier coefficients `ĥ_m`, `−K ≤ m ≤ K`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierCoefficients {
    values: Vec<Complex64>,
    k: usize,
}

impl FourierCoefficients {
    /// `values[m + K]` holds `ĥ_m`; `values.len()` must be odd.
    pub fn new(values: Vec<Complex64>) -> Self {
        assert!(values.len() % 2 == 1, "symmetric index range needs an odd count");
        let k = values.len() / 2;
        Self { values, k }
    }

    /// Coefficients of an analytic polynomial `Σ_{m≥0} c_m z^m`.
    pub fn analytic(c: &[Complex64]) -> Self {
        let k = c.len().saturating_sub(1);
        let mut values = vec![Complex64::new(0.0, 0.0); 2 * k + 1];
        values[k..].copy_from_slice(c);
        Self { values, k }
    }

    pub fn get(&self, m: isize) -> Complex64 {
        if m.unsigned_abs() > self.k {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[(m + self.k as isize) as usize]
        }
    }

    pub fn max_index(&self) -> usize {
        self.k
    }
}

/// `T_N(h)` with entries `ĥ_{j−k}`.
pub fn toeplitz(h: &FourierCoefficients, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |j, k| h.get(j as isize - k as isize)).expect("finite coefficients")
}

/// Polynomial `w(z) = Σ c_m z^m` whose boundary values stay in
/// `[−ρ, ρ] × [0, ε₀]` with `Re w(0) = r`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnalyticSymbol {
    #[serde(with = "crate::io::complex_vec")]
    pub coefficients: Vec<Complex64>,
    pub rho: f64,
    pub r: f64,
    pub eps0: f64,
    /// Opening of the lens the map was built from (1 means a disk).
    pub kappa: f64,
    /// Certified enclosures of the boundary values.
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    /// Extremes of the real part actually attained on the sampling grid.
    pub re_attained: (f64, f64),
    pub grid: usize,
}

impl AnalyticSymbol {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Coefficients of `b = Re w` on the circle.
    pub fn real_part(&self) -> FourierCoefficients {
        self.part(|c| c * 0.5, self.coefficients[0].re)
    }

    /// Coefficients of `a = Im w` on the circle.
    pub fn imag_part(&self) -> FourierCoefficients {
        self.part(|c| c / Complex64::new(0.0, 2.0), self.coefficients[0].im)
    }

    fn part(&self, f: impl Fn(Complex64) -> Complex64, zeroth: f64) -> FourierCoefficients {
        let k = self.degree();
        let mut values = vec![Complex64::new(0.0, 0.0); 2 * k + 1];
        values[k] = Complex64::new(zeroth, 0.0);
        for m in 1..=k {
            let h = f(self.coefficients[m]);
            values[k + m] = h;
            values[k - m] = h.conj();
        }
        FourierCoefficients { values, k }
    }

    /// Whether the boundary real part comes within `tol` of both `±ρ`.
    pub fn reaches(&self, tol: f64) -> bool {
        self.re_attained.0 <= -self.rho + tol && self.re_attained.1 >= self.rho - tol
    }
}

/// Builds the symbol from the lens map `z ↦ tanh(κ artanh z + τ)`.
///
/// The lens has tips at `±1` and half-height `tan(κπ/4)`; it is scaled by
/// `ρ` and lifted to sit inside `0.05ε₀ ≤ Im ≤ 0.95ε₀`. The shift `τ`
/// moves the image of the origin along the real axis to `r`. Taylor
/// coefficients come from an FFT on a circle slightly inside the disk. If
/// the plain truncation leaves the box they are Fejér-averaged, which keeps
/// boundary values inside the (convex) lens. The constraints are then certified on a grid and, if needed,
/// restored by contracting towards `c₀`.
pub fn build_symbol(rho: f64, r: f64, eps0: f64, degree: usize) -> Result<AnalyticSymbol, SymbolError> {
    if !(rho > 0.0 && r.abs() < rho && eps0 > 0.0 && degree >= 8) {
        return Err(SymbolError::InvalidParameters(format!(
            "need ρ > 0, |r| < ρ, ε₀ > 0, degree ≥ 8 (got ρ = {rho}, r = {r}, ε₀ = {eps0}, degree = {degree})"
        )));
    }
    let lift = 0.5 * eps0;
    let half_height = 0.45 * eps0;
    let kappa = ((4.0 / PI) * (half_height / rho).atan()).min(1.0);
    let tau = (r / rho).atanh();
    let w = |z: Complex64| rho * (kappa * z.atanh() + tau).tanh() + Complex64::new(0.0, lift);

    let count = degree + 1;
    let samples = (64 * count).next_power_of_two();
    let radius = (-0.5 / count as f64).exp();
    let mut buf: Vec<Complex64> = (0..samples)
        .map(|j| w(Complex64::from_polar(radius, 2.0 * PI * j as f64 / samples as f64)))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(samples).process(&mut buf);
    let mut c: Vec<Complex64> = (0..count)
        .map(|m| buf[m] / (samples as f64 * radius.powi(m as i32)))
        .collect();
    c[0] = Complex64::new(r, lift);

    // Plain truncation first: exact (up to rounding) when the map is already a
    // polynomial, and it keeps the full reach.
    let plain = certify(&mut planner, c.clone(), rho, r, eps0, kappa)?;
    if contraction(&plain) >= 0.99 {
        if let Some(s) = fit(&mut planner, plain)? {
            return Ok(s);
        }
    }
    for (m, cm) in c.iter_mut().enumerate().skip(1) {
        *cm *= 1.0 - m as f64 / count as f64;
    }
    let damped = certify(&mut planner, c, rho, r, eps0, kappa)?;
    match fit(&mut planner, damped.clone())? {
        Some(s) => Ok(s),
        None => Err(SymbolError::Unattainable {
            degree,
            detail: format!("boundary enclosure re {:?}, im {:?}", damped.re_range, damped.im_range),
        }),
    }
}

/// Contracts towards `c₀` until the certified enclosure fits the box.
fn fit(planner: &mut FftPlanner<f64>, mut symbol: AnalyticSymbol) -> Result<Option<AnalyticSymbol>, SymbolError> {
    for _ in 0..4 {
        let alpha = contraction(&symbol);
        if alpha >= 1.0 {
            return Ok(Some(symbol));
        }
        let c0 = symbol.coefficients[0];
        let c: Vec<Complex64> = symbol
            .coefficients
            .iter()
            .enumerate()
            .map(|(m, &cm)| if m == 0 { c0 } else { cm * alpha })
            .collect();
        symbol = certify(planner, c, symbol.rho, symbol.r, symbol.eps0, symbol.kappa)?;
    }
    Ok((contraction(&symbol) >= 1.0).then_some(symbol))
}

/// Largest factor (capped at 1, slightly shrunk) that pulls the certified
/// boundary enclosure into the target box.
fn contraction(s: &AnalyticSymbol) -> f64 {
    let c0 = s.coefficients[0];
    let mut alpha: f64 = 1.0;
    let mut limit = |value: f64, centre: f64, wall: f64| {
        if (value - centre).abs() > (wall - centre).abs() && (value - centre) * (wall - centre) > 0.0 {
            alpha = alpha.min((1.0 - 1e-9) * (wall - centre) / (value - centre));
        }
    };
    limit(s.re_range.0, c0.re, -s.rho);
    limit(s.re_range.1, c0.re, s.rho);
    limit(s.im_range.0, c0.im, 0.0);
    limit(s.im_range.1, c0.im, s.eps0);
    alpha
}

/// Evaluates the polynomial on a boundary grid fine enough that the
/// derivative bounds pin the enclosure to within 2% of the box sizes.
fn certify(
    planner: &mut FftPlanner<f64>,
    c: Vec<Complex64>,
    rho: f64,
    r: f64,
    eps0: f64,
    kappa: f64,
) -> Result<AnalyticSymbol, SymbolError> {
    let degree = c.len() - 1;
    let s1: f64 = c.iter().enumerate().map(|(m, z)| m as f64 * z.norm()).sum();
    let s2: f64 = c.iter().enumerate().map(|(m, z)| (m * m) as f64 * z.norm()).sum();
    let mut grid = (64 * degree).next_power_of_two();
    let slack_at = |g: usize| f64::min(PI * s1 / g as f64, PI * PI * s2 / (2.0 * (g * g) as f64));
    while slack_at(grid) > 0.02 * eps0.min(rho) && grid < (1 << 22) {
        grid *= 2;
    }
    let slack = slack_at(grid);
    let mut buf = vec![Complex64::new(0.0, 0.0); grid];
    buf[..c.len()].copy_from_slice(&c);
    planner.plan_fft_inverse(grid).process(&mut buf);
    let (mut re_lo, mut re_hi, mut im_lo, mut im_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in &buf {
        re_lo = re_lo.min(z.re);
        re_hi = re_hi.max(z.re);
        im_lo = im_lo.min(z.im);
        im_hi = im_hi.max(z.im);
    }
    if !(re_lo.is_finite() && im_lo.is_finite()) {
        return Err(SymbolError::Unattainable { degree, detail: "non-finite boundary values".into() });
    }
    Ok(AnalyticSymbol {
        coefficients: c,
        rho,
        r,
        eps0,
        kappa,
        re_range: (re_lo - slack, re_hi + slack),
        im_range: (im_lo - slack, im_hi + slack),
        re_attained: (re_lo, re_hi),
        grid,
    })
}

impl AnalyticSymbol {
    /// Whether the certified enclosure sits in `[−ρ, ρ] × [0, ε₀]`.
    pub fn within_box(&self) -> bool {
        self.re_range.0 >= -self.rho
            && self.re_range.1 <= self.rho
            && self.im_range.0 >= 0.0
            && self.im_range.1 <= self.eps0
    }
}
