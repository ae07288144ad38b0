//! Finite-stage nesting: one Hermitian matrix whose second-order spectra
//! collapse near `r` on the windows `ℓ²(N_l)` and spread over the whole
//! interval on the windows `ℓ²(2N_l)`.
//!
//! Everything is computed on `[−2, 2]`; [`NestState::user_matrix`] maps back.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, HermitianMatrix, LinalgError};
use crate::report::{self, Check};
use crate::rotation::{pair_eigenvalues, rotate_embedding, RotationError};
use crate::spectra::{self, compress, delta_bound_with, DeltaOptions, SpectraError, Subspace};
use crate::symbol::{self, epsilon0, lemma22_construct, Lemma22Options, Lemma22Params, SymbolError};

#[derive(Debug, Error)]
pub enum NestError {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("stage {stage} cannot be built: {detail}")]
    StageInfeasible { stage: usize, detail: String, partial: Box<NestState> },
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Rotation(#[from] RotationError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NestSchedule {
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub r: f64,
    /// `α_1 > α_2 > …`, one per stage, in the units of the target interval.
    pub alpha: Vec<f64>,
}

impl NestSchedule {
    pub fn stages(&self) -> usize {
        self.alpha.len()
    }

    pub fn validate(&self) -> Result<(), NestError> {
        let bad = |m: String| Err(NestError::InvalidSchedule(m));
        if !(self.rho_minus < self.r && self.r < self.rho_plus) {
            return bad(format!("need ρ₋ < r < ρ₊, got [{}, {}] and r = {}", self.rho_minus, self.rho_plus, self.r));
        }
        if self.alpha.is_empty() || self.alpha.len() > 3 {
            return bad(format!("need 1 to 3 stages, got {}", self.alpha.len()));
        }
        if self.alpha.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return bad(format!("α must lie in (0, 1): {:?}", self.alpha));
        }
        if self.alpha.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!("α must be strictly decreasing: {:?}", self.alpha));
        }
        Ok(())
    }

    /// Factor taking user lengths to lengths on `[−2, 2]`.
    pub fn scale(&self) -> f64 {
        4.0 / (self.rho_plus - self.rho_minus)
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.rho_plus + self.rho_minus)
    }

    fn scaled_r(&self) -> f64 {
        (self.r - self.center()) * self.scale()
    }

    fn scaled_alpha(&self, l: usize) -> f64 {
        self.alpha[l - 1] * self.scale()
    }
}

/// `ρ_l = 2 − 2^{−l}`.
pub fn rho(l: usize) -> f64 {
    if l == 0 {
        0.0
    } else {
        2.0 - 0.5f64.powi(l as i32)
    }
}

/// `ϱ_l = 2 − 3·2^{−l−2}`.
pub fn varrho(l: usize) -> f64 {
    if l == 0 {
        0.0
    } else {
        2.0 - 3.0 * 0.5f64.powi(l as i32 + 2)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NestOptions {
    /// Accept sparse spectra and widen `ε_l` until each stage can be built.
    pub loose: bool,
    /// Cap on the dimension `2N_l`.
    pub max_dim: usize,
    pub delta_evaluations: usize,
    /// Test hook: drop `R_l` and `S_l`.
    pub force_zero_coupling: bool,
    /// Test hook: use these `ε_l` (scaled units) instead of the budget.
    pub epsilon_override: Vec<Option<f64>>,
    pub seed: u64,
}

impl Default for NestOptions {
    fn default() -> Self {
        Self {
            loose: false,
            max_dim: 4000,
            delta_evaluations: 2000,
            force_zero_coupling: false,
            epsilon_override: Vec::new(),
            seed: 0x25,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Stage {
    pub level: usize,
    /// `N_l`; `T_l` has dimension `2N_l`.
    pub n: usize,
    /// `ε_l = δ_l` actually used.
    pub epsilon: f64,
    /// The budget `½·min{√Δ, α_l, ε_{l−1}, √Δ′}` before the safety factor.
    pub epsilon_budget: f64,
    pub alpha: f64,
    /// Radius the stage actually supports (`2ε_l` when widened).
    pub alpha_effective: f64,
    pub relaxed: bool,
    /// `Δ(T_{l−1}, N_{l−1}, α_{l−1}/2)` and `Δ(T_{l−1}, 2N_{l−1}, α_{l−1})`.
    pub delta_window: Option<f64>,
    pub delta_double: Option<f64>,
    /// `‖S_{l−1}‖` coupling the previous stage into `B_l`.
    pub coupling_norm: f64,
    pub r_norm: f64,
    pub density: f64,
    pub t: HermitianMatrix,
    pub construction_checks: Vec<Check>,
}

impl Stage {
    pub fn b(&self) -> HermitianMatrix {
        self.t.principal_block(0, self.n)
    }

    pub fn r(&self) -> HermitianMatrix {
        HermitianMatrix::symmetrized(&self.t.matrix().block(0, self.n, self.n, self.n))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NestState {
    pub schedule: NestSchedule,
    pub loose: bool,
    pub stages: Vec<Stage>,
}

impl NestState {
    pub fn final_t(&self) -> Option<&HermitianMatrix> {
        self.stages.last().map(|s| &s.t)
    }

    /// `T_l` mapped back from `[−2, 2]` to the user interval.
    pub fn user_matrix(&self, l: usize) -> HermitianMatrix {
        let t = &self.stages[l - 1].t;
        t.scale(1.0 / self.schedule.scale()).shift(self.schedule.center())
    }

    /// Effective `α_l` for every stage.
    pub fn alpha_effective(&self) -> Vec<f64> {
        self.stages.iter().map(|s| s.alpha_effective / self.schedule.scale()).collect()
    }
}

/// Largest `ε_l` (on `[−2, 2]`) loose mode widens to.
const LOOSE_EPSILON_CAP: f64 = 16.0;

/// Builds `T_1, …, T_L`.
pub fn nest_run(schedule: &NestSchedule, opts: &NestOptions) -> Result<NestState, NestError> {
    schedule.validate()?;
    let r = schedule.scaled_r();
    let mut state = NestState { schedule: schedule.clone(), loose: opts.loose, stages: Vec::new() };
    let mut prev_t = HermitianMatrix::zeros(2);
    let mut prev_n = 1usize;
    let mut prev_eps = 0.25f64;

    for l in 1..=schedule.stages() {
        let alpha = schedule.scaled_alpha(l);
        let (delta_window, delta_double) = if l == 1 {
            (None, None)
        } else {
            let a_prev = schedule.scaled_alpha(l - 1);
            let dopts = DeltaOptions { max_evaluations: opts.delta_evaluations, ..DeltaOptions::default() };
            let pa = compress(&prev_t, &Subspace::window(2 * prev_n, prev_n))?;
            let pb = compress(&prev_t, &Subspace::full(2 * prev_n))?;
            (
                Some(delta_bound_with(&pa, 0.5 * a_prev, None, &dopts)?.delta),
                Some(delta_bound_with(&pb, a_prev, None, &dopts)?.delta),
            )
        };
        let mut budget = alpha.min(prev_eps);
        for d in [delta_window, delta_double].into_iter().flatten() {
            budget = budget.min(d.max(0.0).sqrt());
        }
        budget *= 0.5;
        let mut eps = opts.epsilon_override.get(l - 1).copied().flatten().unwrap_or(0.9 * budget);

        let built = loop {
            match build_stage(&prev_t, l, r, eps, opts) {
                Ok(b) => break b,
                Err(detail) => {
                    if opts.loose && 2.0 * eps <= LOOSE_EPSILON_CAP {
                        // Widening starts at the a priori chain value 2^{−l−3}.
                        eps = (2.0 * eps).max(0.5f64.powi(l as i32 + 3));
                        continue;
                    }
                    return Err(NestError::StageInfeasible { stage: l, detail, partial: Box::new(state) });
                }
            }
        };
        let relaxed = eps > budget;
        state.stages.push(Stage {
            level: l,
            n: built.n,
            epsilon: eps,
            epsilon_budget: budget,
            alpha,
            alpha_effective: if relaxed { alpha.max(2.0 * eps) } else { alpha },
            relaxed,
            delta_window,
            delta_double,
            coupling_norm: built.coupling_norm,
            r_norm: built.r_norm,
            density: built.density,
            t: built.t.clone(),
            construction_checks: built.checks,
        });
        prev_t = built.t;
        prev_n = built.n;
        prev_eps = eps;
    }
    Ok(state)
}

struct Built {
    n: usize,
    t: HermitianMatrix,
    coupling_norm: f64,
    r_norm: f64,
    density: f64,
    checks: Vec<Check>,
}

/// One dilation-plus-rotation step on `[−ρ_l, ρ_l]`; errors are reported as
/// text so the caller can decide whether to widen `ε`.
fn build_stage(prev_t: &HermitianMatrix, l: usize, r: f64, eps: f64, opts: &NestOptions) -> Result<Built, String> {
    let n_prev = prev_t.dim();
    let rho_l = rho(l);
    let delta0 = eps.min(rho_l - varrho(l - 1));
    let density = delta0 / (2.0 * n_prev as f64);
    let params = Lemma22Params::new(-rho_l, rho_l, r, density, eps).map_err(|e| e.to_string())?;
    let mu = linalg::hermitian_eigenvalues(prev_t).map_err(|e| e.to_string())?;

    let mut size = (2 * n_prev).max(16).next_power_of_two();
    let mut last_err = String::from("no admissible size below the dimension cap");
    while 2 * size <= opts.max_dim {
        // Cheap pairing test on the Toeplitz spectrum before the full certificate.
        let eps0 = epsilon0(rho_l, eps);
        let feasible = symbol::build_symbol(rho_l, r, eps0, (size - 1).max(8))
            .map_err(|e| e.to_string())
            .and_then(|s| {
                let b = HermitianMatrix::symmetrized(&symbol::toeplitz(&s.real_part(), size));
                linalg::hermitian_eigenvalues(&b).map_err(|e| e.to_string())
            })
            .and_then(|spec| pair_eigenvalues(&mu, &spec, eps).map_err(|e| e.to_string()));
        match feasible {
            Err(e) => last_err = format!("N = {size}: {e}"),
            Ok(_) => {
                let lopts = Lemma22Options {
                    fixed_n: Some(size),
                    accept_sparse: opts.loose,
                    seed: opts.seed ^ l as u64,
                    ..Lemma22Options::default()
                };
                match lemma22_construct(&params, &lopts) {
                    Err(SymbolError::DensityNotAchieved { achieved, .. }) => {
                        last_err = format!("N = {size}: spectrum only {achieved:.4}-dense, wanted {density:.4}");
                    }
                    Err(e) => return Err(e.to_string()),
                    Ok(cert) => {
                        let rot = rotate_embedding(prev_t, &cert.b, &cert.r_mat, eps).map_err(|e| e.to_string())?;
                        return assemble(prev_t, cert, rot, opts.force_zero_coupling).map_err(|e| e.to_string());
                    }
                }
            }
        }
        size *= 2;
    }
    Err(last_err)
}

fn assemble(
    prev_t: &HermitianMatrix,
    cert: symbol::Lemma22Certificate,
    rot: crate::rotation::RotationResult,
    zero_coupling: bool,
) -> Result<Built, NestError> {
    let n_prev = prev_t.dim();
    let size = cert.n;
    // Overwrite the leading block with T_{l−1} exactly; the rotation only
    // reproduces it to rounding.
    let b = ComplexMatrix::from_fn(size, size, |i, j| {
        if i < n_prev && j < n_prev {
            prev_t.get(i, j)
        } else if zero_coupling && ((i < n_prev) != (j < n_prev)) {
            num_complex::Complex64::new(0.0, 0.0)
        } else {
            rot.b.get(i, j)
        }
    })?;
    let b = HermitianMatrix::symmetrized(&b);
    let r = if zero_coupling { HermitianMatrix::zeros(size) } else { rot.r.clone() };
    let t = HermitianMatrix::from_blocks(&b, r.matrix(), &HermitianMatrix::zeros(size))?;
    let coupling_norm = if zero_coupling { 0.0 } else { rot.s_norm };
    let r_norm = if zero_coupling { 0.0 } else { cert.r_norm() };
    let mut checks: Vec<Check> = cert.checks.iter().map(|c| prefixed("lemma", c)).collect();
    checks.extend(rot.checks.iter().map(|c| prefixed("rotation", c)));
    Ok(Built { n: size, t, coupling_norm, r_norm, density: cert.density, checks })
}

fn prefixed(prefix: &str, c: &Check) -> Check {
    Check { name: format!("{prefix}.{}", c.name), ..c.clone() }
}

/// Per-stage verification of the assembled `T_L`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageReport {
    pub level: usize,
    pub checks: Vec<Check>,
    /// Largest `|λ − r|` over the collapsing window (user units).
    #[serde(with = "crate::report::lossy_f64")]
    pub collapse_radius: f64,
    /// `d_H` of the doubled window to `[−ϱ_l, ϱ_l]` (user units).
    #[serde(with = "crate::report::lossy_f64")]
    pub recovery_distance: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NestReport {
    pub stages: Vec<StageReport>,
    pub checks: Vec<Check>,
}

impl NestReport {
    pub fn passed(&self) -> bool {
        report::all_passed(&self.checks) && self.stages.iter().all(|s| report::all_passed(&s.checks))
    }

    pub fn all_checks(&self) -> Vec<Check> {
        let mut out = self.checks.clone();
        for s in &self.stages {
            out.extend(s.checks.iter().map(|c| prefixed(&format!("stage{}", s.level), c)));
        }
        out
    }
}

/// Recomputes the telescoping, square-compression, collapse and recovery
/// statements for every stage `l < L`, plus stage-local bounds and the
/// enclosure of every computed point.
pub fn verify_nest(state: &NestState) -> Result<NestReport, NestError> {
    let big = state.final_t().ok_or_else(|| NestError::InvalidSchedule("state has no stages".into()))?;
    let sched = &state.schedule;
    let scale = sched.scale();
    let r = sched.scaled_r();
    let spec_big = linalg::hermitian_eigenvalues(big)?;
    let big_sq = big.square();
    let total = state.stages.len();
    let mut enclosure_ok = true;
    let mut reports = Vec::new();

    for (idx, st) in state.stages.iter().enumerate() {
        let l = st.level;
        let mut checks = Vec::new();
        let d = st.t.dim();
        checks.push(Check::below("r_norm", st.r_norm, st.epsilon));
        checks.push(Check::at_most("norm_ladder", st.t.norm()?, varrho(l)));
        let lead = linalg::hermitian_eigenvalues(&st.b())?;
        checks.push(Check::below("density", spectra::density_radius(&lead, -rho(l), rho(l)), st.epsilon));
        if let Some(prev) = idx.checked_sub(1).map(|i| &state.stages[i]) {
            checks.push(Check::below("coupling", st.coupling_norm, st.epsilon));
            checks.push(Check::below("epsilon_chain", st.epsilon, 0.5 * prev.epsilon));
        }
        checks.push(Check::below("interval_chain", rho(l) + st.epsilon, varrho(l)));

        let mut collapse_radius = f64::NAN;
        let mut recovery_distance = f64::NAN;
        if idx + 1 < total {
            let next = &state.stages[idx + 1];
            let block = big.principal_block(0, d);
            checks.push(Check::below("telescoping", block.sub(&st.t)?.matrix().max_abs(), 1e-12));
            let sq = HermitianMatrix::symmetrized(&big_sq.matrix().block(0, 0, d, d));
            let gap = sq.sub(&st.t.square())?.norm()?;
            checks.push(Check::at_most("square_compression", gap, 4.0 * next.epsilon * next.epsilon));

            let window = spectra::spec2(&compress(big, &Subspace::window(big.dim(), st.n))?)?;
            collapse_radius =
                window.points().iter().map(|z| (z - r).norm()).fold(0.0, f64::max) / scale;
            checks.push(Check::below("collapse", collapse_radius, sched.alpha[l - 1]));
            let doubled = spectra::spec2(&compress(big, &Subspace::window(big.dim(), d))?)?;
            recovery_distance = spectra::hausdorff_to_interval(doubled.points(), -varrho(l), varrho(l))? / scale;
            let bound = (0.5f64.powi(l as i32) + 0.5f64.powi(l as i32 + 1)) / scale + sched.alpha[l - 1];
            checks.push(Check::at_most("recovery", recovery_distance, bound));
            for s in [&window, &doubled] {
                enclosure_ok &= spectra::enclosure_check(s, &spec_big).iter().all(|&b| b);
            }
        }
        reports.push(StageReport { level: l, checks, collapse_radius, recovery_distance });
    }
    let top = vec![Check::flag("enclosure", enclosure_ok)];
    Ok(NestReport { stages: reports, checks: top })
}
