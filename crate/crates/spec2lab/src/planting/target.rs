use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PlantError;
use crate::spectra::{IntervalUnion, QRegion};

/// Segment `[p, q]` in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment(
    #[serde(with = "crate::io::complex")] pub Complex64,
    #[serde(with = "crate::io::complex")] pub Complex64,
);

impl Segment {
    fn conj(self) -> Self {
        Segment(self.0.conj(), self.1.conj())
    }

    fn closest_to(self, z: Complex64) -> Complex64 {
        let d = self.1 - self.0;
        let len2 = d.norm_sqr();
        if len2 == 0.0 {
            return self.0;
        }
        let s = ((z - self.0).re * d.re + (z - self.0).im * d.im) / len2;
        self.0 + d * s.clamp(0.0, 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetDisk {
    #[serde(with = "crate::io::complex")]
    pub center: Complex64,
    pub radius: f64,
}

/// A compact set described as a union of points, segments and closed disks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TargetShape {
    #[serde(default, with = "crate::io::complex_vec")]
    pub points: Vec<Complex64>,
    #[serde(default)]
    pub segments: Vec<Segment>,
    #[serde(default)]
    pub disks: Vec<TargetDisk>,
}

impl TargetShape {
    pub fn points(points: &[Complex64]) -> Self {
        Self { points: points.to_vec(), ..Self::default() }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.segments.is_empty() && self.disks.is_empty()
    }

    /// Adds the mirror image of every piece that is not already symmetric.
    pub fn symmetrized(&self) -> Self {
        let mut out = self.clone();
        for &z in &self.points {
            if z.im != 0.0 && !self.points.contains(&z.conj()) {
                out.points.push(z.conj());
            }
        }
        for &s in &self.segments {
            let c = s.conj();
            let reversed = Segment(c.1, c.0);
            if c != s && reversed != s && !self.segments.contains(&c) && !self.segments.contains(&reversed) {
                out.segments.push(c);
            }
        }
        for &d in &self.disks {
            let c = TargetDisk { center: d.center.conj(), radius: d.radius };
            if d.center.im != 0.0 && !self.disks.contains(&c) {
                out.disks.push(c);
            }
        }
        out
    }

    /// Points such that every point of the shape lies within `h` of one.
    pub fn sample(&self, h: f64) -> Vec<Complex64> {
        let mut out = self.points.clone();
        for s in &self.segments {
            let n = ((s.1 - s.0).norm() / h).ceil().max(1.0) as usize;
            out.extend((0..=n).map(|k| s.0 + (s.1 - s.0) * (k as f64 / n as f64)));
        }
        for d in &self.disks {
            // Grid and rim at spacing h/2: a point of the disk is within
            // h/(2√2) + h/4 < h of a sample.
            let step = 0.5 * h;
            let k = (d.radius / step).floor() as i64;
            for i in -k..=k {
                for j in -k..=k {
                    let z = Complex64::new(i as f64 * step, j as f64 * step);
                    if z.norm() <= d.radius {
                        out.push(d.center + z);
                    }
                }
            }
            let rim = ((2.0 * std::f64::consts::PI * d.radius / step).ceil() as usize).max(1);
            out.extend(
                (0..rim).map(|k| d.center + Complex64::from_polar(d.radius, 2.0 * std::f64::consts::PI * k as f64 / rim as f64)),
            );
        }
        out
    }

    /// `F ∩ ℝ` as closed intervals (points count as degenerate ones).
    fn real_parts(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for z in &self.points {
            if z.im == 0.0 {
                out.push((z.re, z.re));
            }
        }
        for s in &self.segments {
            let (p, q) = (s.0, s.1);
            if p.im == 0.0 && q.im == 0.0 {
                out.push((p.re.min(q.re), p.re.max(q.re)));
            } else if p.im * q.im <= 0.0 {
                let x = p.re + (q.re - p.re) * p.im / (p.im - q.im);
                out.push((x, x));
            }
        }
        for d in &self.disks {
            if d.center.im.abs() <= d.radius {
                let w = (d.radius * d.radius - d.center.im * d.center.im).sqrt();
                out.push((d.center.re - w, d.center.re + w));
            }
        }
        out
    }

    /// Offending points if the shape leaves the closed region (grown by `tol`).
    fn outside(&self, q: &QRegion, tol: f64) -> Vec<Complex64> {
        let mut bad = Vec::new();
        let c = Complex64::new(q.outer.center, 0.0);
        for &z in &self.points {
            if !q.contains_inflated(z, tol) {
                bad.push(z);
            }
        }
        for &s in &self.segments {
            // The outer disk is convex; each gap disk only has to miss the segment.
            for z in [s.0, s.1] {
                if q.outer.distance(z) > q.outer.radius + tol {
                    bad.push(z);
                }
            }
            for g in &q.gaps {
                let p = s.closest_to(Complex64::new(g.center, 0.0));
                if g.distance(p) < g.radius - tol {
                    bad.push(p);
                }
            }
        }
        for d in &self.disks {
            let dir = |from: Complex64| {
                let v = d.center - from;
                if v.norm() == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    v / v.norm()
                }
            };
            if q.outer.distance(d.center) + d.radius > q.outer.radius + tol {
                bad.push(d.center + dir(c) * d.radius);
            }
            for g in &q.gaps {
                let gc = Complex64::new(g.center, 0.0);
                if g.distance(d.center) - d.radius < g.radius - tol {
                    bad.push(d.center - dir(gc) * d.radius);
                }
            }
        }
        bad
    }
}

/// Compact `F ⊂ Q(Σ)`, symmetric under conjugation and meeting every band.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TargetSet {
    pub sigma: IntervalUnion,
    #[serde(rename = "F")]
    pub shape: TargetShape,
    /// One real point `r_j` of `F` inside each open band.
    pub anchors: Vec<f64>,
}

/// JSON form: `{"sigma": [[a, b], …], "F": {"points": …, "segments": …, "disks": …}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TargetSpec {
    pub sigma: IntervalUnion,
    #[serde(rename = "F")]
    pub shape: TargetShape,
}

impl TargetSet {
    pub fn new(sigma: IntervalUnion, shape: TargetShape) -> Result<Self, PlantError> {
        if shape.is_empty() {
            return Err(PlantError::InvalidInput("F is empty".into()));
        }
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        if !shape.points.iter().all(finite)
            || !shape.segments.iter().all(|s| finite(&s.0) && finite(&s.1))
            || !shape.disks.iter().all(|d| finite(&d.center) && d.radius.is_finite() && d.radius >= 0.0)
        {
            return Err(PlantError::InvalidInput("F has non-finite data or a negative radius".into()));
        }
        let shape = shape.symmetrized();
        let q = QRegion::new(&sigma);
        let bad = shape.outside(&q, 1e-12 * q.diameter());
        if !bad.is_empty() {
            return Err(PlantError::OutsideRegion { points: bad });
        }
        let anchors = anchors(&sigma, &[&shape])?;
        Ok(Self { sigma, shape, anchors })
    }

    pub fn from_spec(spec: TargetSpec) -> Result<Self, PlantError> {
        Self::new(spec.sigma, spec.shape)
    }

    pub fn from_points(sigma: IntervalUnion, points: &[Complex64]) -> Result<Self, PlantError> {
        Self::new(sigma, TargetShape::points(points))
    }

    pub fn region(&self) -> QRegion {
        QRegion::new(&self.sigma)
    }

    /// Fine sample used as a stand-in for `F` when measuring distances.
    pub fn reference(&self, h: f64) -> Vec<Complex64> {
        let mut v = self.shape.sample(h);
        v.extend(self.anchors.iter().map(|&x| Complex64::new(x, 0.0)));
        v
    }

    /// A finite symmetric `F_l` in the interior of `Q(Σ)` with
    /// `d_H(F_l, F) < 2^{−l−1}`.
    pub fn sample(&self, level: usize) -> Result<LevelSample, PlantError> {
        let q = self.region();
        let h = 0.5f64.powi(level as i32 + 2);
        let nudge = 1e-3 * q.diameter();
        let mut raw = self.reference(h);
        let mut moved = 0usize;
        let mut max_nudge = 0.0f64;
        for z in raw.iter_mut() {
            let before = *z;
            *z = push_inside(&q, *z, nudge);
            let d = (*z - before).norm();
            if d > 0.0 {
                moved += 1;
                max_nudge = max_nudge.max(d);
            }
        }
        let points = symmetric_points(raw);
        if let Some(z) = points.iter().find(|&&z| q.margin(z) <= 0.0) {
            return Err(PlantError::OutsideRegion { points: vec![*z] });
        }
        let mut upper: Vec<Complex64> = points.iter().copied().filter(|z| z.im >= 0.0).collect();
        upper.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        // The reference covers F within h/8, so this overestimates d_H(F_l, F) by at most that.
        let reference = self.reference(h / 8.0);
        let hausdorff = point_hausdorff(&points, &reference, h) + h / 8.0;
        Ok(LevelSample { level, spacing: h, points, upper, nudged: moved, max_nudge, hausdorff })
    }
}

/// Real points of every shape inside each open band, one per band.
pub(super) fn anchors(sigma: &IntervalUnion, shapes: &[&TargetShape]) -> Result<Vec<f64>, PlantError> {
    let mut out = Vec::new();
    for (j, &(a, b)) in sigma.intervals().iter().enumerate() {
        // Common real part of all shapes within (a, b).
        let mut pieces = vec![(a, b)];
        for shape in shapes {
            let mut next = Vec::new();
            for &(lo, hi) in &pieces {
                for (p, q) in shape.real_parts() {
                    let (l2, h2) = (lo.max(p), hi.min(q));
                    if l2 <= h2 && l2 < b && h2 > a {
                        next.push((l2, h2));
                    }
                }
            }
            pieces = next;
        }
        let Some(&(lo, hi)) = pieces.iter().max_by(|x, y| (x.1 - x.0).total_cmp(&(y.1 - y.0))) else {
            return Err(PlantError::EmptyBand { band: j, lo: a, hi: b });
        };
        let r = 0.5 * (lo + hi);
        if !(a < r && r < b) {
            return Err(PlantError::EmptyBand { band: j, lo: a, hi: b });
        }
        out.push(r);
    }
    Ok(out)
}

/// Moves `z` until its margin in `Q` is at least `nudge`, by stepping along
/// the inward normal of whichever constraint binds.
fn push_inside(q: &QRegion, mut z: Complex64, nudge: f64) -> Complex64 {
    for _ in 0..16 {
        let outer = q.outer.radius - q.outer.distance(z);
        let gap = q
            .gaps
            .iter()
            .map(|g| (g.distance(z) - g.radius, g.center))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        let margin = gap.map_or(outer, |g| g.0.min(outer));
        if margin >= nudge {
            break;
        }
        let step = nudge - margin;
        let c = Complex64::new(q.outer.center, 0.0);
        let (towards, sign) = match gap {
            Some((m, centre)) if m < outer => (Complex64::new(centre, 0.0), -1.0),
            _ => (c, 1.0),
        };
        let v = towards - z;
        let dir = if v.norm() > 0.0 { v / v.norm() } else { Complex64::new(1.0, 0.0) };
        z += dir * (sign * step);
    }
    z
}

fn symmetric_points(raw: Vec<Complex64>) -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(2 * raw.len());
    for z in raw {
        if z.im.abs() < 1e-14 {
            pts.push(Complex64::new(z.re, 0.0));
        } else {
            pts.push(Complex64::new(z.re, z.im.abs()));
            pts.push(Complex64::new(z.re, -z.im.abs()));
        }
    }
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup_by(|a, b| (*a - *b).norm() < 1e-12);
    pts
}

/// The finite level set `F_l`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelSample {
    pub level: usize,
    pub spacing: f64,
    #[serde(with = "crate::io::complex_vec")]
    pub points: Vec<Complex64>,
    /// `μ_1 … μ_{n_l}`: the points with `Im ≥ 0`.
    #[serde(with = "crate::io::complex_vec")]
    pub upper: Vec<Complex64>,
    pub nudged: usize,
    pub max_nudge: f64,
    /// Upper estimate of `d_H(F_l, F)`.
    pub hausdorff: f64,
}

/// Buckets of side `cell` for nearest-point queries.
pub(super) struct PointGrid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<Complex64>>,
    extent: i64,
}

impl PointGrid {
    pub(super) fn new(points: &[Complex64], cell: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<Complex64>> = HashMap::new();
        let key = |z: Complex64| ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64);
        let mut extent = 0i64;
        for &z in points {
            let k = key(z);
            extent = extent.max(k.0.abs()).max(k.1.abs());
            buckets.entry(k).or_default().push(z);
        }
        Self { cell, buckets, extent }
    }

    pub(super) fn distance(&self, z: Complex64) -> f64 {
        let (ci, cj) = ((z.re / self.cell).floor() as i64, (z.im / self.cell).floor() as i64);
        let mut best = f64::INFINITY;
        let limit = self.extent + ci.abs().max(cj.abs()) + 1;
        for ring in 0..=limit {
            // Anything in ring `ring` is at least (ring − 1)·cell away.
            if (ring - 1) as f64 * self.cell > best {
                break;
            }
            for i in (ci - ring)..=(ci + ring) {
                for j in (cj - ring)..=(cj + ring) {
                    if (i - ci).abs() != ring && (j - cj).abs() != ring {
                        continue;
                    }
                    if let Some(b) = self.buckets.get(&(i, j)) {
                        for &p in b {
                            best = best.min((p - z).norm());
                        }
                    }
                }
            }
        }
        best
    }
}

/// Hausdorff distance between two finite sets through bucket grids.
pub(super) fn point_hausdorff(f: &[Complex64], g: &[Complex64], cell: f64) -> f64 {
    let gf = PointGrid::new(f, cell);
    let gg = PointGrid::new(g, cell);
    let a = f.iter().map(|&z| gg.distance(z)).fold(0.0, f64::max);
    let b = g.iter().map(|&z| gf.distance(z)).fold(0.0, f64::max);
    a.max(b)
}
