//! Certified lower bound for `σ_min(λ² − 2λB + M)` on the boundary of the
//! union of `ε`-disks around the roots.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{spec2, QuadraticPencil, SpectraError, SpectrumSet};
use crate::linalg;

#[derive(Clone, Debug)]
pub struct DeltaOptions {
    /// Budget of `σ_min` evaluations.
    pub max_evaluations: usize,
    /// Stop once the certified bound is within this fraction of the sampled minimum.
    pub relative_gap: f64,
}

impl Default for DeltaOptions {
    fn default() -> Self {
        Self { max_evaluations: 20_000, relative_gap: 1e-3 }
    }
}

/// Connected component of the union of disks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiskComponent {
    #[serde(with = "crate::io::complex_vec")]
    pub centers: Vec<Complex64>,
    pub root_count: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaCertificate {
    /// Certified: `σ_min(P(λ)) ≥ delta` on the whole contour.
    pub delta: f64,
    pub sampled_min: f64,
    pub epsilon: f64,
    pub evaluations: usize,
    pub components: Vec<DiskComponent>,
    pub diagnostic: Option<String>,
}

impl DeltaCertificate {
    /// Component whose closed union contains `z`, if any.
    pub fn component_of(&self, z: Complex64) -> Option<usize> {
        let slack = 1e-12 * self.epsilon;
        self.components
            .iter()
            .position(|c| c.centers.iter().any(|&w| (z - w).norm() <= self.epsilon + slack))
    }

    /// Whether `roots` stay in the union with the same count per component.
    pub fn preserves(&self, roots: &[Complex64]) -> bool {
        let mut counts = vec![0usize; self.components.len()];
        for &z in roots {
            match self.component_of(z) {
                Some(k) => counts[k] += 1,
                None => return false,
            }
        }
        counts.iter().zip(&self.components).all(|(&n, c)| n == c.root_count)
    }
}

pub fn delta_bound(p: &QuadraticPencil, eps: f64) -> Result<DeltaCertificate, SpectraError> {
    delta_bound_with(p, eps, None, &DeltaOptions::default())
}

/// As [`delta_bound`], optionally reusing already computed roots.
pub fn delta_bound_with(
    p: &QuadraticPencil,
    eps: f64,
    roots: Option<&SpectrumSet>,
    opts: &DeltaOptions,
) -> Result<DeltaCertificate, SpectraError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(SpectraError::InvalidEpsilon(eps));
    }
    let owned;
    let roots = match roots {
        Some(r) => r,
        None => {
            owned = spec2(p)?;
            &owned
        }
    };
    let scale = p.scale()?;
    let b_norm = p.b.norm()?;

    // Coincident roots give identical disks; keep one centre per cluster.
    let merge_tol = 1e-12 * scale.sqrt().max(eps);
    let mut centers: Vec<Complex64> = Vec::new();
    let mut mult: Vec<usize> = Vec::new();
    for &z in roots.points() {
        match centers.iter().position(|&c| (c - z).norm() <= merge_tol) {
            Some(k) => mult[k] += 1,
            None => {
                centers.push(z);
                mult.push(1);
            }
        }
    }
    let components = components(&centers, &mult, eps);

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    let mut sampled_min = f64::INFINITY;
    let sigma = |z: Complex64, count: &mut usize| -> Result<f64, SpectraError> {
        *count += 1;
        Ok(linalg::smallest_singular_value(&p.evaluate(z))?)
    };
    for (k, &c) in centers.iter().enumerate() {
        for (lo, hi) in free_arcs(&centers, k, eps) {
            let pieces = ((4.0 * (hi - lo)).ceil() as usize).max(4);
            let step = (hi - lo) / pieces as f64;
            let mut prev_t = lo;
            let mut prev_s = sigma(c + Complex64::from_polar(eps, lo), &mut evaluations)?;
            sampled_min = sampled_min.min(prev_s);
            for i in 1..=pieces {
                let t = lo + step * i as f64;
                let s = sigma(c + Complex64::from_polar(eps, t), &mut evaluations)?;
                sampled_min = sampled_min.min(s);
                heap.push(Segment::new(c, eps, b_norm, prev_t, t, prev_s, s));
                prev_t = t;
                prev_s = s;
            }
        }
    }

    if heap.is_empty() {
        return Ok(DeltaCertificate {
            delta: 0.0,
            sampled_min: 0.0,
            epsilon: eps,
            evaluations,
            components,
            diagnostic: Some("empty contour".into()),
        });
    }

    while let Some(worst) = heap.peek() {
        let bound = worst.bound;
        if bound >= (1.0 - opts.relative_gap) * sampled_min || evaluations >= opts.max_evaluations {
            break;
        }
        let seg = heap.pop().unwrap();
        let mid = 0.5 * (seg.t0 + seg.t1);
        let s = sigma(seg.center + Complex64::from_polar(eps, mid), &mut evaluations)?;
        sampled_min = sampled_min.min(s);
        heap.push(Segment::new(seg.center, eps, b_norm, seg.t0, mid, seg.s0, s));
        heap.push(Segment::new(seg.center, eps, b_norm, mid, seg.t1, s, seg.s1));
    }

    let certified = heap.peek().map(|s| s.bound).unwrap_or(0.0);
    let delta = certified.max(0.0);
    let diagnostic = if delta <= crate::tol::ABS_FLOOR * scale {
        Some(format!(
            "certified bound is zero within tolerance (sampled minimum {sampled_min:e} after {evaluations} evaluations)"
        ))
    } else if certified < (1.0 - opts.relative_gap) * sampled_min {
        Some(format!("evaluation budget exhausted; bound {certified:e} vs sampled {sampled_min:e}"))
    } else {
        None
    };
    Ok(DeltaCertificate { delta, sampled_min, epsilon: eps, evaluations, components, diagnostic })
}

struct Segment {
    center: Complex64,
    t0: f64,
    t1: f64,
    s0: f64,
    s1: f64,
    bound: f64,
}

impl Segment {
    fn new(center: Complex64, eps: f64, b_norm: f64, t0: f64, t1: f64, s0: f64, s1: f64) -> Self {
        let len = eps * (t1 - t0);
        // |λ| along the arc never exceeds |c| + ε.
        let lip = 2.0 * (center.norm() + eps + b_norm);
        let bound = 0.5 * (s0 + s1 - lip * len);
        Self { center, t0, t1, s0, s1, bound }
    }
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    // Max-heap on the negated bound: the weakest segment comes out first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound)
    }
}

/// Angular intervals of circle `k` not inside any other open disk.
fn free_arcs(centers: &[Complex64], k: usize, eps: f64) -> Vec<(f64, f64)> {
    let c = centers[k];
    let mut covered: Vec<(f64, f64)> = Vec::new();
    for (j, &w) in centers.iter().enumerate() {
        if j == k {
            continue;
        }
        let d = (w - c).norm();
        if d >= 2.0 * eps {
            continue;
        }
        let half = (d / (2.0 * eps)).acos();
        let mid = (w - c).arg();
        if half >= PI {
            return Vec::new();
        }
        let (lo, hi) = ((mid - half).rem_euclid(TAU), (mid + half).rem_euclid(TAU));
        if lo <= hi {
            covered.push((lo, hi));
        } else {
            covered.push((lo, TAU));
            covered.push((0.0, hi));
        }
    }
    covered.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut free = Vec::new();
    let mut at = 0.0;
    for (lo, hi) in covered {
        if lo > at {
            free.push((at, lo));
        }
        at = f64::max(at, hi);
    }
    if at < TAU {
        free.push((at, TAU));
    }
    free.retain(|&(a, b)| b - a > 1e-14);
    free
}

fn components(centers: &[Complex64], mult: &[usize], eps: f64) -> Vec<DiskComponent> {
    let n = centers.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (centers[i] - centers[j]).norm() <= 2.0 * eps {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut out: Vec<(usize, DiskComponent)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match out.iter_mut().find(|(root, _)| *root == r) {
            Some((_, c)) => {
                c.centers.push(centers[i]);
                c.root_count += mult[i];
            }
            None => out.push((r, DiskComponent { centers: vec![centers[i]], root_count: mult[i] })),
        }
    }
    out.into_iter().map(|(_, c)| c).collect()
}
