use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::weights::{quadratic_roots, PlantTarget};
use super::PlantError;
use crate::linalg::{self, ComplexMatrix, EigenDecomposition, HermitianMatrix};
use crate::report::{self, Check};
use crate::spectra::{self, compress, hausdorff, SpectrumSet, Subspace};

/// Gadget vectors `u_{m,k}` and their combinations `v_k` on top of a base space.
#[derive(Clone, Debug)]
pub struct GadgetBundle {
    pub ambient: usize,
    /// Orthonormal basis of `L⁰` (possibly empty).
    pub base: Vec<Vec<Complex64>>,
    pub targets: Vec<PlantTarget>,
    /// `u_{m,k}`, present when `t_{m,k} > 0`.
    pub u: Vec<[Option<Vec<Complex64>>; 3]>,
    /// Dimension of the eigenvector span of each window.
    pub window_dims: Vec<[usize; 3]>,
    pub v: Vec<Vec<Complex64>>,
    pub eps_prime: f64,
}

fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn gadget_vectors(
    t: &HermitianMatrix,
    targets: &[PlantTarget],
    base: &[Vec<Complex64>],
    eps_prime: f64,
) -> Result<GadgetBundle, PlantError> {
    let eig = linalg::hermitian_eig(t)?;
    gadget_vectors_with(t, &eig, targets, base, eps_prime)
}

/// As [`gadget_vectors`], reusing an eigendecomposition of `T`.
pub fn gadget_vectors_with(
    t: &HermitianMatrix,
    eig: &EigenDecomposition,
    targets: &[PlantTarget],
    base: &[Vec<Complex64>],
    eps_prime: f64,
) -> Result<GadgetBundle, PlantError> {
    let n = t.dim();
    if !(eps_prime > 0.0) {
        return Err(PlantError::InvalidInput(format!("ε′ must be positive, got {eps_prime}")));
    }
    if let Some(x) = base.iter().find(|x| x.len() != n) {
        return Err(PlantError::InvalidInput(format!("base vector of length {} in dimension {n}", x.len())));
    }
    // Columns T^q x for every vector x that later gadgets must avoid.
    let mut constraints: Vec<Vec<Complex64>> = Vec::new();
    let forbid = |x: &[Complex64], constraints: &mut Vec<Vec<Complex64>>| {
        let tx = t.matrix().apply(x);
        let ttx = t.matrix().apply(&tx);
        constraints.push(x.to_vec());
        constraints.push(tx);
        constraints.push(ttx);
    };
    for x in base {
        forbid(x, &mut constraints);
    }
    let mut u_all = Vec::with_capacity(targets.len());
    let mut dims_all = Vec::with_capacity(targets.len());
    let mut v_all = Vec::with_capacity(targets.len());
    for (k, target) in targets.iter().enumerate() {
        let mut u: [Option<Vec<Complex64>>; 3] = [None, None, None];
        let mut dims = [0usize; 3];
        for m in 0..3 {
            if target.t[m] <= 0.0 {
                continue;
            }
            let lambda = target.lambda[m];
            let window: Vec<usize> =
                (0..n).filter(|&i| (eig.eigenvalues[i] - lambda).abs() < eps_prime).collect();
            dims[m] = window.len();
            if window.is_empty() {
                return Err(PlantError::WindowTooSmall { target: k, slot: m, required: 1, available: 0 });
            }
            let ew: Vec<Vec<Complex64>> = window.iter().map(|&i| eig.vectors.column(i)).collect();
            let g = if constraints.is_empty() {
                None
            } else {
                Some(ComplexMatrix::from_fn(constraints.len(), ew.len(), |r, c| dot(&constraints[r], &ew[c]))?)
            };
            let null = linalg::nullspace(g.as_ref(), ew.len(), 1e-12)?;
            if null.is_empty() {
                return Err(PlantError::WindowTooSmall {
                    target: k,
                    slot: m,
                    required: constraints.len().min(n) + 1,
                    available: ew.len(),
                });
            }
            // Project the eigenvector closest to λ onto the admissible span.
            let closest = (0..window.len())
                .min_by(|&a, &b| {
                    (eig.eigenvalues[window[a]] - lambda).abs().total_cmp(&(eig.eigenvalues[window[b]] - lambda).abs())
                })
                .expect("nonempty window");
            let mut c = vec![Complex64::new(0.0, 0.0); ew.len()];
            for col in &null {
                let w = col[closest].conj();
                for (ci, &x) in c.iter_mut().zip(col) {
                    *ci += x * w;
                }
            }
            if norm(&c) < 1e-8 {
                c = null[0].clone();
            }
            let s = norm(&c);
            let mut vec = vec![Complex64::new(0.0, 0.0); n];
            for (j, e) in ew.iter().enumerate() {
                let w = c[j] / s;
                for (vi, &x) in vec.iter_mut().zip(e) {
                    *vi += x * w;
                }
            }
            let s = norm(&vec);
            vec.iter_mut().for_each(|x| *x /= s);
            forbid(&vec, &mut constraints);
            u[m] = Some(vec);
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for m in 0..3 {
            if let Some(um) = &u[m] {
                let w = target.t[m].sqrt();
                for (vi, &x) in v.iter_mut().zip(um) {
                    *vi += x * w;
                }
            }
        }
        u_all.push(u);
        dims_all.push(dims);
        v_all.push(v);
    }
    Ok(GadgetBundle {
        ambient: n,
        base: base.to_vec(),
        targets: targets.to_vec(),
        u: u_all,
        window_dims: dims_all,
        v: v_all,
        eps_prime,
    })
}

/// `p_k(λ) = ((λ − T)² v_k, v_k) = λ² − 2bλ + m`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlantedPolynomial {
    #[serde(with = "crate::io::complex")]
    pub b: Complex64,
    #[serde(with = "crate::io::complex")]
    pub m: Complex64,
    #[serde(with = "crate::io::complex_vec")]
    pub roots: Vec<Complex64>,
    /// Largest coefficient difference from `q_k`.
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlantReport {
    pub base_rank: usize,
    pub targets: Vec<PlantTarget>,
    pub eps_prime: f64,
    /// `C = 2·max{1, ‖T‖}`.
    pub c: f64,
    pub polynomials: Vec<PlantedPolynomial>,
    /// `Spec₂(T, L′)`.
    pub spectrum: SpectrumSet,
    pub base_spectrum: Option<SpectrumSet>,
    /// `d_H(Spec₂(T, L′), {μ_k, μ̄_k} ∪ Spec₂(T, L⁰))`.
    pub target_distance: f64,
    pub checks: Vec<Check>,
}

impl PlantReport {
    pub fn passed(&self) -> bool {
        report::all_passed(&self.checks)
    }
}

/// `L′ = L⁰ ⊕ span{v_k}` and its certificate.
pub fn plant(t: &HermitianMatrix, bundle: &GadgetBundle) -> Result<(Subspace, PlantReport), PlantError> {
    if bundle.ambient != t.dim() {
        return Err(PlantError::InvalidInput(format!("bundle built in dimension {}, T has {}", bundle.ambient, t.dim())));
    }
    let mut columns = bundle.base.clone();
    columns.extend(bundle.v.iter().cloned());
    if columns.is_empty() {
        return Err(PlantError::InvalidInput("nothing to plant".into()));
    }
    let subspace = Subspace::from_orthonormal(ComplexMatrix::from_columns(&columns)?)?;
    let report = plant_report(t, &subspace, bundle.base.len(), &bundle.targets, bundle.eps_prime)?;
    if let Some(c) = report.checks.iter().find(|c| c.name.starts_with("block_diagonal") && c.value > 1e-8) {
        return Err(PlantError::BundleIntegrity { residual: c.value });
    }
    Ok((subspace, report))
}

/// Checks a planted subspace: the first `base_rank` columns span `L⁰`, the
/// remaining ones are the `v_k` in target order.
pub fn plant_report(
    t: &HermitianMatrix,
    l: &Subspace,
    base_rank: usize,
    targets: &[PlantTarget],
    eps_prime: f64,
) -> Result<PlantReport, PlantError> {
    if l.rank() != base_rank + targets.len() {
        return Err(PlantError::InvalidInput(format!(
            "subspace has rank {}, expected {} + {}",
            l.rank(),
            base_rank,
            targets.len()
        )));
    }
    let t_norm = t.norm()?;
    let c = 2.0 * t_norm.max(1.0);
    let q = l.basis();
    let tq = t.matrix().matmul(q)?;
    let g0 = q.adjoint_matmul(q)?;
    let g1 = q.adjoint_matmul(&tq)?;
    let g2 = tq.adjoint_matmul(&tq)?;
    let block = |i: usize| if i < base_rank { 0 } else { i - base_rank + 1 };
    let off_block = |g: &ComplexMatrix| {
        let mut worst = 0.0f64;
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                if block(i) != block(j) {
                    worst = worst.max(g.get(i, j).norm());
                }
            }
        }
        worst
    };
    let mut checks = vec![
        Check::at_most("orthonormal", linalg::gram_residual(q), crate::tol::ORTHONORMAL),
        Check::at_most("block_diagonal_q0", off_block(&g0), 1e-10),
        Check::at_most("block_diagonal_q1", off_block(&g1), 1e-10 * t_norm.max(1.0)),
        Check::at_most("block_diagonal_q2", off_block(&g2), 1e-10 * t_norm.max(1.0).powi(2)),
    ];

    let mut polynomials = Vec::with_capacity(targets.len());
    let mut pairing = 0.0f64;
    let mut deviation = 0.0f64;
    let mut planted = Vec::new();
    for (k, target) in targets.iter().enumerate() {
        let i = base_rank + k;
        let (b, m) = (g1.get(i, i), g2.get(i, i));
        let roots = quadratic_roots(b, m);
        let (qa, qb) = target.q_coefficients();
        let dev = (2.0 * (b - qa)).norm().max((m - qb).norm());
        deviation = deviation.max(dev);
        let scale = roots[0].norm().max(1.0);
        // Either a conjugate pair or two real roots.
        let mismatch = (roots[0] - roots[1].conj()).norm().min(roots[0].im.abs() + roots[1].im.abs());
        pairing = pairing.max(mismatch / scale);
        planted.push(target.mu);
        planted.push(target.mu.conj());
        polynomials.push(PlantedPolynomial { b, m, roots: roots.to_vec(), deviation: dev });
    }
    checks.push(Check::at_most("root_pairing", pairing, crate::tol::POINTS));
    checks.push(Check::at_most("coefficient_deviation", deviation, c * eps_prime));

    let spectrum = spectra::spec2(&compress(t, l)?)?;
    let base_spectrum = if base_rank > 0 {
        let cols: Vec<Vec<Complex64>> = (0..base_rank).map(|j| q.column(j)).collect();
        let base = Subspace::from_orthonormal(ComplexMatrix::from_columns(&cols)?)?;
        Some(spectra::spec2(&compress(t, &base)?)?)
    } else {
        None
    };
    let mut union: Vec<Complex64> = polynomials.iter().flat_map(|p| p.roots.iter().copied()).collect();
    let mut reference = planted;
    if let Some(s) = &base_spectrum {
        union.extend_from_slice(s.points());
        reference.extend_from_slice(s.points());
    }
    // Clusters of d coincident roots scatter by about (1e-16)^{1/d}.
    let scatter = 10.0 * 1e-12f64.powf(1.0 / base_rank.max(2) as f64);
    let scatter = scatter.max(1e-6) * t_norm.max(1.0);
    checks.push(Check::at_most("union", hausdorff(spectrum.points(), &union)?, scatter));
    let eigenvalues = linalg::hermitian_eigenvalues(t)?;
    let enclosed = spectra::enclosure_check_with(&spectrum, &eigenvalues, scatter);
    checks.push(Check::flag("enclosure", enclosed.iter().all(|&b| b)));
    let target_distance = hausdorff(spectrum.points(), &reference)?;
    Ok(PlantReport {
        base_rank,
        targets: targets.to_vec(),
        eps_prime,
        c,
        polynomials,
        spectrum,
        base_spectrum,
        target_distance,
        checks,
    })
}

/// Coefficient-to-root sensitivity for monic quadratics with `|roots| ≤ s`:
/// a perturbation of size `η` moves each root by at most
/// `η + √(η(1 + 2s) + η²)`.
pub fn root_displacement(eta: f64, s: f64) -> f64 {
    eta + (eta * (1.0 + 2.0 * s) + eta * eta).sqrt()
}

/// `ε′_l`: start at `2^{−l−1}/(4C(1 + s))` and halve until the root bound is
/// below `2^{−l−1}`.
pub fn eps_prime(level: usize, c: f64, s: f64) -> f64 {
    let goal = 0.5f64.powi(level as i32 + 1);
    let mut e = goal / (4.0 * c * (1.0 + s));
    while root_displacement(c * e, s) >= goal {
        e *= 0.5;
    }
    e
}
