//! Planting prescribed second-order spectra: sample a compact `F ⊂ Q(Σ)`,
//! solve the convex-hull condition for each target, build gadget vectors
//! in spectral windows of `T` and add them to a base space.

mod gadget;
mod target;
mod weights;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, EigenDecomposition, HermitianMatrix, LinalgError};
use crate::nesting::{self, NestError, NestOptions, NestSchedule};
use crate::report::{self, Check};
use crate::spectra::{self, compress, delta_bound_with, DeltaOptions, IntervalUnion, SpectraError, SpectrumSet, Subspace};

pub use gadget::{eps_prime, gadget_vectors, gadget_vectors_with, plant, plant_report, root_displacement, GadgetBundle, PlantReport, PlantedPolynomial};
pub use target::{LevelSample, Segment, TargetDisk, TargetSet, TargetShape, TargetSpec};
pub use weights::{quadratic_roots, solve_weights, solve_weights_discrete, PlantTarget};

#[derive(Debug, Error)]
pub enum PlantError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("F leaves Q(Σ) at {points:?}")]
    OutsideRegion { points: Vec<Complex64> },
    #[error("no real target point (common to all target sets) in the open band {band} = ({lo}, {hi})")]
    EmptyBand { band: usize, lo: f64, hi: f64 },
    #[error("no convex weights found for μ = {mu} (best residual {best_residual:e}); is μ inside Q(Σ)?")]
    NoWeights { mu: Complex64, best_residual: f64 },
    #[error("spectral window for target {target}, λ_{} has {available} admissible dimensions, needs {required}; refine T or enlarge ε′", slot + 1)]
    WindowTooSmall { target: usize, slot: usize, required: usize, available: usize },
    #[error("planted pencil is not block diagonal (residual {residual:e})")]
    BundleIntegrity { residual: f64 },
    #[error(transparent)]
    Nest(#[from] NestError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlantMode {
    /// Diagonal `T` with evenly spaced eigenvalues in every band.
    Mechanism,
    /// `T = diag(T^{(j)})` from one nesting run per band.
    Full,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoremOptions {
    pub mode: PlantMode,
    pub levels: usize,
    /// Eigenvalues per band of the diagonal part of `T`.
    pub per_band: usize,
    /// Full mode: `α_l` for the nesting runs (user units).
    pub alpha: Vec<f64>,
    pub nest: NestOptions,
    /// Full mode: `σ_min` budget for certifying the tail cut.
    pub tail_evaluations: usize,
}

impl Default for TheoremOptions {
    fn default() -> Self {
        Self {
            mode: PlantMode::Mechanism,
            levels: 4,
            per_band: 200,
            alpha: vec![0.5, 0.4, 0.3],
            nest: NestOptions { loose: true, ..NestOptions::default() },
            tail_evaluations: 500,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    /// `"F"` or `"F0"`.
    pub target: String,
    pub sample: LevelSample,
    pub eps_prime: f64,
    pub gadgets: usize,
    pub subspace_dim: usize,
    /// Full mode: `Ñ_l` per band, `None` when the full dimension was kept.
    pub tail_cut: Option<usize>,
    /// `Spec₂(T, L_l)`.
    pub spectrum: SpectrumSet,
    /// `d_H(Spec₂(T, L_l), F_l)`.
    pub hausdorff_sample: f64,
    /// `d_H(Spec₂(T, L_l), F)` against a fine sample of `F`.
    pub hausdorff_target: f64,
    /// `max{α_l, 2^{−l}}`.
    pub bound: f64,
    pub plant: PlantReport,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoremReport {
    pub mode: PlantMode,
    pub sigma: IntervalUnion,
    pub anchors: Vec<f64>,
    pub operator_dim: usize,
    pub levels: Vec<LevelReport>,
    pub checks: Vec<Check>,
}

/// A report together with what is needed to re-check it: `T` and each `L′_l`
/// (before any tail cut).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TheoremRun {
    pub report: TheoremReport,
    pub operator: HermitianMatrix,
    pub subspaces: Vec<Subspace>,
}

impl TheoremRun {
    /// Recomputes every level's planting checks from the stored data.
    pub fn verify(&self) -> Result<Vec<Check>, PlantError> {
        if self.subspaces.len() != self.report.levels.len() {
            return Err(PlantError::InvalidInput("one subspace per level expected".into()));
        }
        let mut out = Vec::new();
        for (level, l) in self.report.levels.iter().zip(&self.subspaces) {
            let p = &level.plant;
            let rep = plant_report(&self.operator, l, p.base_rank, &p.targets, p.eps_prime)?;
            out.extend(rep.checks.into_iter().map(|c| Check { name: format!("level{}.plant.{}", level.level, c.name), ..c }));
        }
        Ok(out)
    }
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        report::all_passed(&self.checks) && self.levels.iter().all(|l| report::all_passed(&l.checks))
    }
}

/// The operator every level works with.
struct Operator {
    t: HermitianMatrix,
    eig: EigenDecomposition,
    /// Start and length of each band block (full mode).
    blocks: Vec<(usize, usize)>,
    /// `N_l^{(j)}` per stage and band (full mode).
    windows: Vec<Vec<usize>>,
    alpha: Vec<f64>,
}

/// Evenly spaced interior points, `count` per band.
fn band_eigenvalues(sigma: &IntervalUnion, count: usize) -> Vec<f64> {
    sigma
        .intervals()
        .iter()
        .flat_map(|&(a, b)| (0..count).map(move |i| a + (b - a) * (i as f64 + 0.5) / count as f64))
        .collect()
}

fn diagonal_eig(values: &[f64]) -> EigenDecomposition {
    EigenDecomposition { eigenvalues: values.to_vec(), vectors: ComplexMatrix::identity(values.len()) }
}

fn mechanism_operator(sigma: &IntervalUnion, per_band: usize) -> Operator {
    let values = band_eigenvalues(sigma, per_band);
    Operator {
        t: HermitianMatrix::from_real_diagonal(&values),
        eig: diagonal_eig(&values),
        blocks: Vec::new(),
        windows: Vec::new(),
        alpha: Vec::new(),
    }
}

/// Per band: the nested matrix followed by a diagonal reservoir with the
/// band's spectrum, standing in for the rest of the infinite-dimensional space.
fn full_operator(sigma: &IntervalUnion, anchors: &[f64], opts: &TheoremOptions) -> Result<(Operator, Vec<Check>), PlantError> {
    let stages = opts.levels.min(3);
    let alpha: Vec<f64> = opts.alpha.iter().take(stages).copied().collect();
    if alpha.len() < stages {
        return Err(PlantError::InvalidInput(format!("full mode needs {stages} α values, got {}", opts.alpha.len())));
    }
    let mut checks = Vec::new();
    let mut parts: Vec<(HermitianMatrix, Vec<usize>)> = Vec::new();
    for (j, (&(a, b), &r)) in sigma.intervals().iter().zip(anchors).enumerate() {
        let schedule = NestSchedule { rho_minus: a, rho_plus: b, r, alpha: alpha.clone() };
        let state = match nesting::nest_run(&schedule, &opts.nest) {
            Ok(s) => s,
            Err(NestError::StageInfeasible { partial, .. }) if !partial.stages.is_empty() => *partial,
            Err(e) => return Err(e.into()),
        };
        let built = state.stages.len();
        checks.push(Check::at_least(&format!("band{j}.stages_built"), built as f64, stages as f64));
        let tj = state.user_matrix(built);
        let windows: Vec<usize> = state.stages.iter().map(|s| s.n).collect();
        let reservoir = band_eigenvalues(&IntervalUnion::single(a, b)?, opts.per_band);
        let block = HermitianMatrix::from_blocks(
            &tj,
            &ComplexMatrix::zeros(tj.dim(), reservoir.len()),
            &HermitianMatrix::from_real_diagonal(&reservoir),
        )?;
        parts.push((block, windows));
    }
    let dim: usize = parts.iter().map(|p| p.0.dim()).sum();
    let mut blocks = Vec::new();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut values = Vec::new();
    let mut vectors = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut offset = 0;
    for (block, _) in &parts {
        let n = block.dim();
        for i in 0..n {
            for k in 0..n {
                entries[(offset + i) * dim + offset + k] = block.get(i, k);
            }
        }
        // Block-wise eigenvectors keep the block supports exact.
        let e = linalg::hermitian_eig(block)?;
        for (c, &lam) in e.eigenvalues.iter().enumerate() {
            let col = values.len();
            values.push(lam);
            for i in 0..n {
                vectors[(offset + i) * dim + col] = e.vectors.get(i, c);
            }
        }
        blocks.push((offset, n));
        offset += n;
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&x, &y| values[x].total_cmp(&values[y]));
    let eig = EigenDecomposition {
        eigenvalues: order.iter().map(|&c| values[c]).collect(),
        vectors: ComplexMatrix::from_fn(dim, dim, |i, c| vectors[i * dim + order[c]])?,
    };
    let t = HermitianMatrix::new(ComplexMatrix::new(dim, dim, entries)?)?;
    let available = parts.iter().map(|p| p.1.len()).min().unwrap_or(0);
    let windows = (0..available).map(|l| parts.iter().map(|p| p.1[l]).collect()).collect();
    Ok((Operator { t, eig, blocks, windows, alpha }, checks))
}

fn unit(n: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[i] = Complex64::new(1.0, 0.0);
    v
}

/// Eigenvectors of `T` that already meet `T^q(base)`, which gadgets may not use.
fn blocked(op: &Operator, base: &[Vec<Complex64>]) -> Vec<bool> {
    let n = op.t.dim();
    let mut span: Vec<Vec<Complex64>> = Vec::new();
    for x in base {
        let tx = op.t.matrix().apply(x);
        let ttx = op.t.matrix().apply(&tx);
        span.extend([x.clone(), tx, ttx]);
    }
    (0..n)
        .map(|c| {
            let e = op.eig.vectors.column(c);
            span.iter().any(|y| y.iter().zip(&e).map(|(a, b)| a.conj() * b).sum::<Complex64>().norm() > 1e-12)
        })
        .collect()
}

/// Solves every target against the unused part of the spectrum and marks
/// the eigenvalues it takes.
fn assign(
    op: &Operator,
    sigma: &IntervalUnion,
    mus: &[Complex64],
    used: &mut [bool],
) -> Result<Vec<PlantTarget>, PlantError> {
    let mut out = Vec::with_capacity(mus.len());
    for &mu in mus {
        let (target, idx) = solve_weights_discrete(mu, sigma, &op.eig.eigenvalues, used)?;
        for i in idx.into_iter().flatten() {
            used[i] = true;
        }
        out.push(target);
    }
    Ok(out)
}

/// Runs the planting construction level by level. With `alternate`, odd
/// levels aim at that set instead and even levels at `target`.
pub fn theorem11_run(
    target: &TargetSet,
    alternate: Option<&TargetSet>,
    opts: &TheoremOptions,
) -> Result<TheoremRun, PlantError> {
    if opts.levels == 0 {
        return Err(PlantError::InvalidInput("need at least one level".into()));
    }
    if opts.per_band < 4 {
        return Err(PlantError::InvalidInput("need at least 4 eigenvalues per band".into()));
    }
    let sigma = &target.sigma;
    let anchors = match alternate {
        Some(f0) => {
            if f0.sigma != *sigma {
                return Err(PlantError::InvalidInput("both target sets must use the same Σ".into()));
            }
            target::anchors(sigma, &[&target.shape, &f0.shape])?
        }
        None => target.anchors.clone(),
    };
    let (op, mut checks) = match opts.mode {
        PlantMode::Mechanism => (mechanism_operator(sigma, opts.per_band), Vec::new()),
        PlantMode::Full => full_operator(sigma, &anchors, opts)?,
    };
    let levels = match opts.mode {
        PlantMode::Mechanism => opts.levels,
        PlantMode::Full => opts.levels.min(op.windows.len()),
    };
    let t_norm = op.eig.eigenvalues.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let c = 2.0 * t_norm.max(1.0);
    let region = target.region();

    let mut reports = Vec::with_capacity(levels);
    let mut subspaces = Vec::with_capacity(levels);
    for l in 1..=levels {
        let (set, name) = match alternate {
            Some(f0) if l % 2 == 1 => (f0, "F0"),
            _ => (target, "F"),
        };
        let sample = set.sample(l)?;
        let goal = 0.5f64.powi(l as i32 + 1);
        let s = sample.upper.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let eps_p = eps_prime(l, c, s);
        let n = op.t.dim();

        // L⁰: anchor gadgets (mechanism) or the nesting windows (full).
        let mut used = vec![false; n];
        let (base, alpha_l) = match opts.mode {
            PlantMode::Mechanism => {
                let mus: Vec<Complex64> = anchors.iter().map(|&r| Complex64::new(r, 0.0)).collect();
                let base_targets = assign(&op, sigma, &mus, &mut used)?;
                (gadget_vectors_with(&op.t, &op.eig, &base_targets, &[], eps_p)?.v, 0.0)
            }
            PlantMode::Full => {
                let base = op
                    .blocks
                    .iter()
                    .zip(&op.windows[l - 1])
                    .flat_map(|(&(start, _), &w)| (start..start + w).map(|i| unit(n, i)))
                    .collect();
                (base, op.alpha[l - 1])
            }
        };
        for (u, b) in used.iter_mut().zip(blocked(&op, &base)) {
            *u |= b;
        }
        let mus: Vec<Complex64> = sample
            .upper
            .iter()
            .copied()
            .filter(|z| !anchors.iter().any(|&r| (z - r).norm() < 1e-12))
            .collect();
        let targets = assign(&op, sigma, &mus, &mut used)?;
        let bundle = gadget_vectors_with(&op.t, &op.eig, &targets, &base, eps_p)?;
        let (planted, plant_rep) = plant(&op.t, &bundle)?;
        subspaces.push(planted.clone());

        let (subspace, tail_cut) = match opts.mode {
            PlantMode::Mechanism => (planted, None),
            PlantMode::Full => tail_cut(&op, &planted, base.len(), goal, opts.tail_evaluations)?,
        };
        let spectrum = if tail_cut.is_some() {
            spectra::spec2(&compress(&op.t, &subspace)?)?
        } else {
            plant_rep.spectrum.clone()
        };

        let bound = alpha_l.max(0.5f64.powi(l as i32));
        let reference = set.reference(sample.spacing / 8.0);
        let cell = sample.spacing;
        let hausdorff_sample = target::point_hausdorff(spectrum.points(), &sample.points, cell);
        let hausdorff_target = target::point_hausdorff(spectrum.points(), &reference, cell);

        let mut level_checks = vec![
            Check::below("sample_hausdorff", sample.hausdorff, goal),
            Check::flag("weights", targets.iter().all(PlantTarget::is_valid)),
        ];
        let proximity = plant_rep
            .polynomials
            .iter()
            .zip(&targets)
            .map(|(p, t)| {
                p.roots
                    .iter()
                    .map(|&z| (z - t.mu).norm().min((z - t.mu.conj()).norm()))
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        level_checks.push(Check::below("root_proximity", proximity, goal));
        if let Some(b) = &plant_rep.base_spectrum {
            let r: Vec<Complex64> = anchors.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            let collapse = spectra::hausdorff(b.points(), &r)?;
            level_checks.push(Check::below("base_collapse", collapse, alpha_l.max(goal)));
        }
        let outside = spectrum.points().iter().filter(|&&z| !region.contains_inflated(z, 1e-6)).count();
        level_checks.push(Check::at_most("region", outside as f64, 0.0));
        level_checks.push(Check::at_most("hausdorff_bound", hausdorff_target, bound + 1e-8));
        level_checks.extend(plant_rep.checks.iter().map(|c| Check { name: format!("plant.{}", c.name), ..c.clone() }));

        reports.push(LevelReport {
            level: l,
            target: name.into(),
            sample,
            eps_prime: eps_p,
            gadgets: targets.len() + if opts.mode == PlantMode::Mechanism { base.len() } else { 0 },
            subspace_dim: subspace.rank(),
            tail_cut,
            spectrum,
            hausdorff_sample,
            hausdorff_target,
            bound,
            plant: plant_rep,
            checks: level_checks,
        });
    }
    for name in ["F", "F0"] {
        let seq: Vec<f64> = reports.iter().filter(|r| r.target == name).map(|r| r.hausdorff_target).collect();
        if seq.len() >= 2 {
            let worst = seq.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
            checks.push(Check::at_most(&format!("decreasing_{name}"), worst, 1e-9));
        }
    }
    let report = TheoremReport { mode: opts.mode, sigma: sigma.clone(), anchors, operator_dim: op.t.dim(), levels: reports, checks };
    Ok(TheoremRun { report, operator: op.t, subspaces })
}

/// Truncates the gadgets to the first `Ñ` coordinates of every band block,
/// taking the smallest `Ñ` whose pencil change stays below the root-stability
/// margin of the untruncated pencil; falls back to no truncation.
fn tail_cut(
    op: &Operator,
    planted: &Subspace,
    base_rank: usize,
    eps: f64,
    evaluations: usize,
) -> Result<(Subspace, Option<usize>), PlantError> {
    let full = compress(&op.t, planted)?;
    let dopts = DeltaOptions { max_evaluations: evaluations, ..DeltaOptions::default() };
    let cert = delta_bound_with(&full, eps, None, &dopts)?;
    let radius = spectra::spec2(&full)?.points().iter().fold(0.0f64, |a, z| a.max(z.norm())) + eps;
    let q = planted.basis();
    let n = q.rows();
    let longest = op.blocks.iter().map(|b| b.1).max().unwrap_or(0);
    let mut cut = op.windows.iter().flatten().copied().max().unwrap_or(1).max(1);
    while cut < longest {
        let keep = |i: usize| op.blocks.iter().any(|&(s, len)| i >= s && i < s + len.min(cut));
        let mut cols: Vec<Vec<Complex64>> = (0..base_rank).map(|j| q.column(j)).collect();
        let mut ok = true;
        for j in base_rank..q.cols() {
            let mut v: Vec<Complex64> =
                q.column(j).into_iter().enumerate().map(|(i, z)| if keep(i) { z } else { Complex64::new(0.0, 0.0) }).collect();
            for c in &cols {
                let d: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(c).for_each(|(x, y)| *x -= y * d);
            }
            let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if s < 0.5 {
                ok = false;
                break;
            }
            v.iter_mut().for_each(|x| *x /= s);
            cols.push(v);
        }
        if ok && n > 0 {
            let sub = Subspace::from_orthonormal(ComplexMatrix::from_columns(&cols)?)?;
            let p = compress(&op.t, &sub)?;
            let db = p.b.sub(&full.b)?.norm()?;
            let dm = p.m.sub(&full.m)?.norm()?;
            if 2.0 * radius * db + dm < cert.delta {
                return Ok((sub, Some(cut)));
            }
        }
        cut *= 2;
    }
    Ok((planted.clone(), None))
}
