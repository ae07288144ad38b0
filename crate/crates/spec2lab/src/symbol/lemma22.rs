use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_symbol, toeplitz, AnalyticSymbol, SymbolError};
use crate::linalg::{self, ComplexMatrix, HermitianMatrix, LinalgError};
use crate::report::{self, Check};
use crate::spectra::density_radius;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma22Params {
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub r: f64,
    pub delta: f64,
    pub epsilon: f64,
}

impl Lemma22Params {
    pub fn new(rho_minus: f64, rho_plus: f64, r: f64, delta: f64, epsilon: f64) -> Result<Self, SymbolError> {
        let p = Self { rho_minus, rho_plus, r, delta, epsilon };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), SymbolError> {
        let finite = [self.rho_minus, self.rho_plus, self.r, self.delta, self.epsilon].iter().all(|x| x.is_finite());
        if !(finite && self.rho_minus < self.r && self.r < self.rho_plus && self.delta > 0.0 && self.epsilon > 0.0) {
            return Err(SymbolError::InvalidParameters(format!(
                "need ρ₋ < r < ρ₊ and δ, ε > 0 (got {self:?})"
            )));
        }
        Ok(())
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.rho_plus - self.rho_minus)
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.rho_plus + self.rho_minus)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lemma22Options {
    /// Largest size tried by the doubling schedule 16, 32, ….
    pub n_max: usize,
    /// Skip the schedule and build exactly this size.
    pub fixed_n: Option<usize>,
    /// Return a certificate (with a failing density check) instead of
    /// `DensityNotAchieved`.
    pub accept_sparse: bool,
    /// Seed for the random test points of the factorization check.
    pub seed: u64,
}

impl Default for Lemma22Options {
    fn default() -> Self {
        Self { n_max: 4096, fixed_n: None, accept_sparse: false, seed: 0x22 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lemma22Certificate {
    pub params: Lemma22Params,
    pub n: usize,
    pub eps0: f64,
    pub symbol: AnalyticSymbol,
    pub b: HermitianMatrix,
    pub a: HermitianMatrix,
    pub r_mat: HermitianMatrix,
    #[serde(with = "crate::io::complex")]
    pub z0: Complex64,
    pub spec_b: Vec<f64>,
    pub density: f64,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Lemma22Certificate {
    pub fn passed(&self) -> bool {
        report::all_passed(&self.checks)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        report::find(&self.checks, name)
    }

    /// `‖R‖`.
    pub fn r_norm(&self) -> f64 {
        self.check("norm_bound").map_or(f64::NAN, |c| c.value)
    }

    /// `B + iA`.
    pub fn triangular_factor(&self) -> ComplexMatrix {
        let ia = self.a.matrix().scale(Complex64::new(0.0, 1.0));
        self.b.matrix().add(&ia).expect("same size")
    }

    /// Recomputes every check from the stored matrices.
    pub fn verify(&self) -> Result<Vec<Check>, SymbolError> {
        self.params.validate()?;
        let spec_b = linalg::hermitian_eigenvalues(&self.b)?;
        evaluate_checks(&self.params, self.eps0, &self.symbol, &self.b, &self.a, &self.r_mat, self.z0, &spec_b, self.seed)
    }
}

/// Largest `ε²/(8ρ)·2^{−k}` meeting both budgets with a 10% margin.
pub fn epsilon0(rho: f64, epsilon: f64) -> f64 {
    let mut e0 = epsilon * epsilon / (8.0 * rho);
    loop {
        let s = (2.0 * rho * e0).sqrt();
        if 1.1 * (s * s + (s + e0).powi(2)) < epsilon * epsilon && 1.1 * (s + e0) < epsilon {
            return e0;
        }
        e0 *= 0.5;
    }
}

/// Hermitian `B` with `δ`-dense spectrum in `[ρ₋, ρ₊]` and `R` with
/// `‖R‖ < ε` such that `λ² − 2λB + B² + R²` factors through the lower
/// triangular `B + iA`, so its only roots are `z₀` and `z̄₀`.
pub fn lemma22_construct(params: &Lemma22Params, opts: &Lemma22Options) -> Result<Lemma22Certificate, SymbolError> {
    params.validate()?;
    let rho = params.half_width();
    let center = params.center();
    let eps0 = epsilon0(rho, params.epsilon);

    let sizes: Vec<usize> = match opts.fixed_n {
        Some(n) if n >= 1 => vec![n],
        Some(_) => return Err(SymbolError::InvalidParameters("fixed N must be positive".into())),
        None => {
            let mut v = Vec::new();
            let mut n = 16;
            while n <= opts.n_max.max(16) {
                v.push(n);
                n *= 2;
            }
            v
        }
    };

    let last = *sizes.last().expect("nonempty schedule");
    for &n in &sizes {
        let symbol = build_symbol(rho, params.r - center, eps0, n.saturating_sub(1).max(8))?;
        let b = HermitianMatrix::symmetrized(&toeplitz(&symbol.real_part(), n)).shift(center);
        let spec_b = linalg::hermitian_eigenvalues(&b)?;
        let density = density_radius(&spec_b, params.rho_minus, params.rho_plus);
        if density < params.delta || n == last {
            let cert = finish(params, opts, n, eps0, symbol, b, spec_b, density)?;
            if density < params.delta || opts.accept_sparse {
                return Ok(cert);
            }
            return Err(SymbolError::DensityNotAchieved { achieved: density, wanted: params.delta, best: Box::new(cert) });
        }
    }
    unreachable!("the last size always returns")
}

#[allow(clippy::too_many_arguments)]
fn finish(
    params: &Lemma22Params,
    opts: &Lemma22Options,
    n: usize,
    eps0: f64,
    symbol: AnalyticSymbol,
    b: HermitianMatrix,
    spec_b: Vec<f64>,
    density: f64,
) -> Result<Lemma22Certificate, SymbolError> {
    let rho = params.half_width();
    let lift = (2.0 * rho * eps0).sqrt();
    let a = HermitianMatrix::symmetrized(&toeplitz(&symbol.imag_part(), n)).shift(lift);
    let h = commutator_form(&b, &a)?;
    let scale = h.norm()?.max(1.0);
    let r_mat = linalg::psd_sqrt_with_floor(&h, crate::tol::PSD * scale).map_err(|e| match e {
        LinalgError::NotPositiveSemidefinite { min_eigenvalue } => SymbolError::CommutatorNotPsd { n, min_eigenvalue },
        other => other.into(),
    })?;
    let z0 = Complex64::new(params.r, lift + symbol.coefficients[0].im);
    let checks = evaluate_checks(params, eps0, &symbol, &b, &a, &r_mat, z0, &spec_b, opts.seed)?;
    Ok(Lemma22Certificate { params: *params, n, eps0, symbol, b, a, r_mat, z0, spec_b, density, seed: opts.seed, checks })
}

/// `−i[B, A] + A²`.
fn commutator_form(b: &HermitianMatrix, a: &HermitianMatrix) -> Result<HermitianMatrix, SymbolError> {
    let ba = b.matrix().matmul(a.matrix())?;
    let ab = a.matrix().matmul(b.matrix())?;
    let comm = ba.sub(&ab)?.scale(Complex64::new(0.0, -1.0));
    Ok(HermitianMatrix::symmetrized(&comm.add(a.square().matrix())?))
}

#[allow(clippy::too_many_arguments)]
fn evaluate_checks(
    params: &Lemma22Params,
    eps0: f64,
    symbol: &AnalyticSymbol,
    b: &HermitianMatrix,
    a: &HermitianMatrix,
    r_mat: &HermitianMatrix,
    z0: Complex64,
    spec_b: &[f64],
    seed: u64,
) -> Result<Vec<Check>, SymbolError> {
    let n = b.dim();
    let rho = params.half_width();
    let center = params.center();
    let lift = (2.0 * rho * eps0).sqrt();
    let mut checks = Vec::new();

    let r_norm = r_mat.norm()?;
    checks.push(Check::below("norm_bound", r_norm, params.epsilon));

    let h = commutator_form(b, a)?;
    let h_eigs = linalg::hermitian_eigenvalues(&h)?;
    let h_scale = h_eigs.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    checks.push(Check::at_least("commutator_positivity", h_eigs[0], -crate::tol::PSD * h_scale));
    let budget = 2.0 * rho * eps0 + (lift + eps0).powi(2);
    checks.push(Check::at_most("commutator_bound", r_norm * r_norm, budget + 1e-8));

    let lo = spec_b.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = spec_b.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let outside = (params.rho_minus - lo).max(hi - params.rho_plus).max(0.0);
    checks.push(Check::at_most("spectrum_inside", outside, crate::tol::POINTS));
    checks.push(Check::below("density", density_radius(spec_b, params.rho_minus, params.rho_plus), params.delta));

    let x = b.matrix().add(&a.matrix().scale(Complex64::new(0.0, 1.0)))?;
    let mut upper = 0.0f64;
    let mut diag = 0.0f64;
    for j in 0..n {
        diag = diag.max((x.get(j, j) - z0).norm());
        for k in j + 1..n {
            upper = upper.max(x.get(j, k).norm());
        }
    }
    checks.push(Check::below("triangularity", upper, crate::tol::POINTS));
    checks.push(Check::below("diagonal", diag, crate::tol::POINTS));

    let on_line = (z0.re - params.r).abs();
    checks.push(Check::at_most("root_real_part", on_line, 1e-10 * params.r.abs().max(1.0)));
    checks.push(Check::below("root_imaginary_part", z0.im.abs(), params.epsilon));

    // (λ − X)(λ − X*) against λ² − 2λB + B² + R² at seeded points.
    let xx = x.matmul(&x.adjoint())?;
    let b2r2 = b.square().add(&r_mat.square())?;
    let two_b = b.matrix().scale(Complex64::new(2.0, 0.0));
    let sum = x.add(&x.adjoint())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fact = 0.0f64;
    let base = b.norm_fro().max(b2r2.norm_fro()).max(1.0);
    for _ in 0..20 {
        let lam = Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)) * rho.max(1.0);
        let lhs = b2r2.matrix().sub(&two_b.scale(lam))?.shift_diagonal(lam * lam);
        let rhs = xx.sub(&sum.scale(lam))?.shift_diagonal(lam * lam);
        let scale = base * lam.norm_sqr().max(1.0);
        fact = fact.max(lhs.sub(&rhs)?.norm_fro() / scale);
    }
    checks.push(Check::at_most("factorization", fact, crate::tol::POINTS));

    let sup_b = (symbol.re_range.0).abs().max(symbol.re_range.1.abs());
    let b_centered = spec_b.iter().fold(0.0f64, |m, &v| m.max((v - center).abs()));
    checks.push(Check::at_most("toeplitz_norm", b_centered, sup_b + crate::tol::POINTS));
    checks.push(Check::flag("symbol_box", symbol.within_box()));
    let reach = (symbol.re_attained.0 + rho).max(rho - symbol.re_attained.1);
    checks.push(Check::at_most("symbol_reach", reach, params.delta / 4.0));

    let r2_res = r_mat.square().sub(&h)?.norm_fro();
    checks.push(Check::at_most("r_square", r2_res, 1e-8 * h.norm_fro().max(1.0)));
    Ok(checks)
}
