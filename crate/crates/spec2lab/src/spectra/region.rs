use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SpectraError;

/// Disjoint closed intervals `[a₁, b₁] ∪ [a₂, b₂] ∪ …` with `a₁ < b₁ < a₂ < …`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self, SpectraError> {
        if intervals.is_empty() {
            return Err(SpectraError::InvalidIntervals("no intervals".into()));
        }
        let mut prev = f64::NEG_INFINITY;
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite()) || !(prev < a && a < b) {
                return Err(SpectraError::InvalidIntervals(format!("[{a}, {b}] after {prev}")));
            }
            prev = b;
        }
        Ok(Self { intervals })
    }

    pub fn single(a: f64, b: f64) -> Result<Self, SpectraError> {
        Self::new(vec![(a, b)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn min(&self) -> f64 {
        self.intervals[0].0
    }

    pub fn max(&self) -> f64 {
        self.intervals[self.intervals.len() - 1].1
    }

    /// Open gaps `(b_j, a_{j+1})`.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.intervals.windows(2).map(|w| (w[0].1, w[1].0)).collect()
    }

    /// Index of the band whose open interior contains `x`.
    pub fn band_of(&self, x: f64) -> Option<usize> {
        self.intervals.iter().position(|&(a, b)| a < x && x < b)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }
}

impl TryFrom<Vec<[f64; 2]>> for IntervalUnion {
    type Error = SpectraError;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self, Self::Error> {
        Self::new(v.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<IntervalUnion> for Vec<[f64; 2]> {
    fn from(u: IntervalUnion) -> Self {
        u.intervals.into_iter().map(|(a, b)| [a, b]).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: f64,
    pub radius: f64,
}

impl Disk {
    /// Disk with diameter `[a, b]` on the real axis.
    pub fn over(a: f64, b: f64) -> Self {
        Self { center: 0.5 * (a + b), radius: 0.5 * (b - a) }
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        (z - Complex64::new(self.center, 0.0)).norm()
    }
}

/// Closed disk over `[min Σ, max Σ]` minus the open disks over the gaps of `Σ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QRegion {
    pub outer: Disk,
    pub gaps: Vec<Disk>,
}

impl QRegion {
    pub fn new(sigma: &IntervalUnion) -> Self {
        Self {
            outer: Disk::over(sigma.min(), sigma.max()),
            gaps: sigma.gaps().into_iter().map(|(a, b)| Disk::over(a, b)).collect(),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.contains_inflated(z, 0.0)
    }

    /// Membership in the region grown by `tol`.
    pub fn contains_inflated(&self, z: Complex64, tol: f64) -> bool {
        self.outer.distance(z) <= self.outer.radius + tol
            && self.gaps.iter().all(|g| g.distance(z) >= g.radius - tol)
    }

    /// Signed margin: positive inside, negative outside.
    pub fn margin(&self, z: Complex64) -> f64 {
        self.gaps
            .iter()
            .map(|g| g.distance(z) - g.radius)
            .fold(self.outer.radius - self.outer.distance(z), f64::min)
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.outer.radius
    }
}

/// `Q(Σ)`.
pub fn q_region(sigma: &IntervalUnion) -> QRegion {
    QRegion::new(sigma)
}
