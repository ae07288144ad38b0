//! Second-order spectra, the Galerkin baseline, enclosure and distances.

mod delta;
mod region;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, HermitianMatrix, LinalgError};

pub use delta::{delta_bound, delta_bound_with, DeltaCertificate, DeltaOptions, DiskComponent};
pub use region::{q_region, Disk, IntervalUnion, QRegion};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("subspace basis lives in dimension {basis}, operator in dimension {operator}")]
    AmbientMismatch { basis: usize, operator: usize },
    #[error("compression inequality M − B² ⪰ 0 violated (min eigenvalue {min_eigenvalue:e}); basis not orthonormal?")]
    CompressionInequality { min_eigenvalue: f64 },
    #[error("point set is empty")]
    EmptySet,
    #[error("point set is not conjugation symmetric (mismatch {residual:e})")]
    NotSymmetric { residual: f64 },
    #[error("intervals must be nonempty and strictly increasing: {0}")]
    InvalidIntervals(String),
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
}

/// Subspace of `C^n` given by an orthonormal basis (the columns of `basis`).
#[derive(Clone, Debug)]
pub struct Subspace {
    basis: ComplexMatrix,
}

impl Subspace {
    pub fn from_orthonormal(basis: ComplexMatrix) -> Result<Self, SpectraError> {
        if basis.cols() > basis.rows() {
            return Err(LinalgError::DimensionMismatch { expected: basis.rows(), found: basis.cols() }.into());
        }
        let residual = linalg::gram_residual(&basis);
        if residual > crate::tol::ORTHONORMAL {
            return Err(LinalgError::NotOrthonormal { residual }.into());
        }
        Ok(Self { basis })
    }

    /// Span of the standard basis vectors `e_start … e_{start+len−1}`.
    pub fn coordinate(ambient: usize, start: usize, len: usize) -> Self {
        assert!(len >= 1 && start + len <= ambient);
        let basis = ComplexMatrix::from_fn(ambient, len, |i, j| {
            if i == start + j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .expect("finite");
        Self { basis }
    }

    /// The first `len` coordinates, `ℓ²(len)` inside `C^ambient`.
    pub fn window(ambient: usize, len: usize) -> Self {
        Self::coordinate(ambient, 0, len)
    }

    pub fn full(ambient: usize) -> Self {
        Self::window(ambient, ambient)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }
}

/// `λ² − 2λB + M`.
#[derive(Clone, Debug)]
pub struct QuadraticPencil {
    pub b: HermitianMatrix,
    pub m: HermitianMatrix,
}

impl QuadraticPencil {
    /// Checks `M − B² ⪰ −1e-10·scale`, which holds for every genuine compression.
    pub fn new(b: HermitianMatrix, m: HermitianMatrix) -> Result<Self, SpectraError> {
        let p = Self::general(b, m)?;
        let gap = p.m.sub(&p.b.square())?;
        let ev = linalg::hermitian_eigenvalues(&gap)?;
        let floor = crate::tol::PSD * p.scale()?;
        if ev[0] < -floor {
            return Err(SpectraError::CompressionInequality { min_eigenvalue: ev[0] });
        }
        Ok(p)
    }

    /// Any monic Hermitian pencil, without the compression inequality.
    pub fn general(b: HermitianMatrix, m: HermitianMatrix) -> Result<Self, SpectraError> {
        if b.dim() != m.dim() {
            return Err(LinalgError::DimensionMismatch { expected: b.dim(), found: m.dim() }.into());
        }
        Ok(Self { b, m })
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    /// `max(1, ‖M‖, ‖B‖²)`.
    pub fn scale(&self) -> Result<f64, SpectraError> {
        let nb = self.b.norm()?;
        Ok(self.m.norm()?.max(nb * nb).max(1.0))
    }

    /// `λ²I − 2λB + M`.
    pub fn evaluate(&self, lambda: Complex64) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { lambda * lambda } else { Complex64::new(0.0, 0.0) };
            d - 2.0 * lambda * self.b.get(i, j) + self.m.get(i, j)
        })
        .expect("finite lambda")
    }

    /// First companion form `[[0, I], [−M, 2B]]`.
    pub fn companion(&self) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => Complex64::new(0.0, 0.0),
            (true, false) => {
                if j - n == i {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            (false, true) => -self.m.get(i - n, j),
            (false, false) => 2.0 * self.b.get(i - n, j - n),
        })
        .expect("finite")
    }
}

/// Finite multiset of complex points.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSet {
    points: Vec<Complex64>,
    conjugation_symmetric: bool,
}

impl SpectrumSet {
    /// With `symmetric = true` the set must be closed under conjugation up to
    /// `1e-8·max(1, max|λ|)`.
    pub fn new(points: Vec<Complex64>, symmetric: bool) -> Result<Self, SpectraError> {
        if points.is_empty() {
            return Err(SpectraError::EmptySet);
        }
        if symmetric {
            let residual = conjugation_mismatch(&points);
            if residual > crate::tol::POINTS * point_scale(&points) {
                return Err(SpectraError::NotSymmetric { residual });
            }
        }
        Ok(Self { points, conjugation_symmetric: symmetric })
    }

    /// Sets the flag by testing the points.
    pub fn detect(points: Vec<Complex64>) -> Result<Self, SpectraError> {
        if points.is_empty() {
            return Err(SpectraError::EmptySet);
        }
        let symmetric = conjugation_mismatch(&points) <= crate::tol::POINTS * point_scale(&points);
        Ok(Self { points, conjugation_symmetric: symmetric })
    }

    pub fn real(values: &[f64]) -> Result<Self, SpectraError> {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect(), true)
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_conjugation_symmetric(&self) -> bool {
        self.conjugation_symmetric
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Self { points, conjugation_symmetric: self.conjugation_symmetric && other.conjugation_symmetric }
    }

    /// Points with nonnegative imaginary part, sorted by real part.
    pub fn upper_half(&self) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = self.points.iter().copied().filter(|z| z.im >= 0.0).collect();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }
}

fn point_scale(points: &[Complex64]) -> f64 {
    points.iter().fold(1.0f64, |a, z| a.max(z.norm()))
}

/// Largest distance moved when pairing each point with a conjugate partner.
fn conjugation_mismatch(points: &[Complex64]) -> f64 {
    symmetrize(points).1
}

/// Pairs every point with a partner close to its conjugate (itself if it is
/// nearly real) and replaces each pair by an exactly conjugate pair.
/// Returns the new points and the largest displacement.
pub fn symmetrize(points: &[Complex64]) -> (Vec<Complex64>, f64) {
    const WINDOW: usize = 64;
    let n = points.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (za, zb) = (points[a], points[b]);
        za.re.total_cmp(&zb.re).then(za.im.abs().total_cmp(&zb.im.abs())).then(a.cmp(&b))
    });
    let mut candidates = Vec::with_capacity(n * WINDOW);
    for (pos, &i) in order.iter().enumerate() {
        for &j in order.iter().skip(pos).take(WINDOW) {
            let cost = (points[j] - points[i].conj()).norm();
            candidates.push((cost, i.min(j), i.max(j)));
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut out = points.to_vec();
    let mut done = vec![false; n];
    let mut moved = 0.0f64;
    for (cost, i, j) in candidates {
        if done[i] || done[j] {
            continue;
        }
        if i == j {
            out[i] = Complex64::new(points[i].re, 0.0);
        } else {
            let a = (points[i] + points[j].conj()) * 0.5;
            out[i] = a;
            out[j] = a.conj();
        }
        done[i] = true;
        done[j] = true;
        moved = moved.max(cost * 0.5);
    }
    // Anything left (only possible with a pathological window) pairs with itself.
    for i in 0..n {
        if !done[i] {
            moved = moved.max(points[i].im.abs());
            out[i] = Complex64::new(points[i].re, 0.0);
        }
    }
    (out, moved)
}

/// `B = Q*TQ`, `M = (TQ)*(TQ) = Q*T²Q`.
pub fn compress(t: &HermitianMatrix, l: &Subspace) -> Result<QuadraticPencil, SpectraError> {
    if t.dim() != l.ambient_dim() {
        return Err(SpectraError::AmbientMismatch { basis: l.ambient_dim(), operator: t.dim() });
    }
    let tq = t.matrix().matmul(l.basis())?;
    let b = HermitianMatrix::symmetrized(&l.basis().adjoint_matmul(&tq)?);
    let m = HermitianMatrix::symmetrized(&tq.adjoint_matmul(&tq)?);
    QuadraticPencil::new(b, m)
}

/// Companion eigenvalues as computed, before symmetrization.
pub fn spec2_raw(p: &QuadraticPencil) -> Result<Vec<Complex64>, SpectraError> {
    Ok(linalg::general_eigenvalues(&p.companion())?)
}

/// The `2·dim` roots of `det(λ² − 2λB + M)`.
pub fn spec2(p: &QuadraticPencil) -> Result<SpectrumSet, SpectraError> {
    let raw = spec2_raw(p)?;
    let (points, _) = symmetrize(&raw);
    Ok(SpectrumSet { points, conjugation_symmetric: true })
}

/// `max σ_min(P(λ))` over the points of `s`, relative to the pencil scale.
pub fn spec2_residual(p: &QuadraticPencil, s: &SpectrumSet) -> Result<f64, SpectraError> {
    let scale = p.scale()?;
    let mut worst = 0.0f64;
    for &z in s.points() {
        worst = worst.max(linalg::smallest_singular_value(&p.evaluate(z))? / scale);
    }
    Ok(worst)
}

/// Eigenvalues of `Q*TQ`.
pub fn galerkin_spectrum(t: &HermitianMatrix, l: &Subspace) -> Result<Vec<f64>, SpectraError> {
    if t.dim() != l.ambient_dim() {
        return Err(SpectraError::AmbientMismatch { basis: l.ambient_dim(), operator: t.dim() });
    }
    let c = t.congruence(l.basis())?;
    Ok(linalg::hermitian_eigenvalues(&c)?)
}

/// For each point `λ`, whether `spec_t` meets `[Re λ − |Im λ|, Re λ + |Im λ|]`
/// (widened by `1e-8·max(1, max|spec_t|)`).
pub fn enclosure_check(s: &SpectrumSet, spec_t: &[f64]) -> Vec<bool> {
    assert!(!spec_t.is_empty(), "enclosure against an empty spectrum");
    let mut sorted = spec_t.to_vec();
    sorted.sort_by(f64::total_cmp);
    let scale = sorted.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    enclosure_sorted(s, &sorted, crate::tol::POINTS * scale)
}

/// Computed roots of a `d`-fold cluster scatter by about `(1e-16)^{1/d}`
/// around an accurate mean; up to triple clusters are recognised.
const CLUSTER: f64 = 1e-5;

/// Distance from each point to its nearest neighbour, when that is below
/// `radius` (zero otherwise).
fn cluster_spread(points: &[Complex64], radius: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].re.total_cmp(&points[b].re));
    let mut spread = vec![0.0f64; points.len()];
    for (pos, &i) in order.iter().enumerate() {
        let mut best = f64::INFINITY;
        for &j in order[pos + 1..].iter().take_while(|&&j| points[j].re - points[i].re <= radius) {
            best = best.min((points[j] - points[i]).norm());
        }
        for &j in order[..pos].iter().rev().take_while(|&&j| points[i].re - points[j].re <= radius) {
            best = best.min((points[j] - points[i]).norm());
        }
        if best <= radius {
            spread[i] = best;
        }
    }
    spread
}

/// As [`enclosure_check`] with an absolute slack `tol` on every disk.
pub fn enclosure_check_with(s: &SpectrumSet, spec_t: &[f64], tol: f64) -> Vec<bool> {
    assert!(!spec_t.is_empty(), "enclosure against an empty spectrum");
    let mut sorted = spec_t.to_vec();
    sorted.sort_by(f64::total_cmp);
    enclosure_sorted(s, &sorted, tol)
}

fn enclosure_sorted(s: &SpectrumSet, sorted: &[f64], tol: f64) -> Vec<bool> {
    let scale = sorted.iter().fold(point_scale(s.points()), |a, x| a.max(x.abs()));
    let spread = cluster_spread(s.points(), CLUSTER * scale);
    s.points()
        .iter()
        .zip(spread)
        .map(|(z, extra)| {
            let lo = z.re - z.im.abs() - tol - extra;
            let hi = z.re + z.im.abs() + tol + extra;
            let k = sorted.partition_point(|&x| x < lo);
            k < sorted.len() && sorted[k] <= hi
        })
        .collect()
}

/// Exact Hausdorff distance between two finite sets.
pub fn hausdorff(f: &[Complex64], g: &[Complex64]) -> Result<f64, SpectraError> {
    if f.is_empty() || g.is_empty() {
        return Err(SpectraError::EmptySet);
    }
    Ok(directed(f, g).max(directed(g, f)))
}

/// `sup_{x∈f} dist(x, g)`.
pub fn directed(f: &[Complex64], g: &[Complex64]) -> f64 {
    f.iter()
        .map(|x| g.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Exact Hausdorff distance between a finite set and the real segment `[a, b]`.
pub fn hausdorff_to_interval(points: &[Complex64], a: f64, b: f64) -> Result<f64, SpectraError> {
    if points.is_empty() {
        return Err(SpectraError::EmptySet);
    }
    assert!(a <= b);
    let to_segment = points
        .iter()
        .map(|z| {
            let x = z.re.clamp(a, b);
            Complex64::new(x - z.re, z.im).norm()
        })
        .fold(0.0, f64::max);
    // dist(x, points)² = x² + min_p(−2 Re p·x + |p|²): a lower envelope of lines.
    let mut lines: Vec<(f64, f64)> = points.iter().map(|z| (-2.0 * z.re, z.norm_sqr())).collect();
    lines.sort_by(|p, q| q.0.total_cmp(&p.0).then(p.1.total_cmp(&q.1)));
    lines.dedup_by(|q, p| q.0 == p.0);
    let cross = |p: (f64, f64), q: (f64, f64)| (q.1 - p.1) / (p.0 - q.0);
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for l in lines {
        while hull.len() >= 2 {
            let (p, q) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if cross(p, l) <= cross(p, q) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }
    let mut xs = vec![a, b];
    for w in hull.windows(2) {
        let x = cross(w[0], w[1]);
        if x > a && x < b {
            xs.push(x);
        }
    }
    let from_segment = xs
        .into_iter()
        .map(|x| points.iter().map(|z| (Complex64::new(x, 0.0) - z).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Ok(to_segment.max(from_segment))
}

/// `sup_{x∈[lo, hi]} dist(x, spec)` for a finite real set.
pub fn density_radius(spec: &[f64], lo: f64, hi: f64) -> f64 {
    assert!(lo <= hi);
    if spec.is_empty() {
        return f64::INFINITY;
    }
    let mut s = spec.to_vec();
    s.sort_by(f64::total_cmp);
    let dist = |x: f64| {
        let k = s.partition_point(|&v| v < x);
        let right = s.get(k).map_or(f64::INFINITY, |&v| v - x);
        let left = if k > 0 { x - s[k - 1] } else { f64::INFINITY };
        left.min(right)
    };
    // The distance is piecewise linear; its maxima sit at the ends or at midpoints.
    let mut worst = dist(lo).max(dist(hi));
    for w in s.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if mid > lo && mid < hi {
            worst = worst.max(dist(mid));
        }
    }
    worst
}
