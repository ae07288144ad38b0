//! Independent oracles shared by the integration tests. Nothing here calls
//! into the eigen-solvers of the crate under test.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Poly = Vec<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Poly {
    let mut out = vec![c(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &mut Poly, b: &[Complex64], sign: f64) {
    if a.len() < b.len() {
        a.resize(b.len(), c(0.0, 0.0));
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y * sign;
    }
}

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, f64)>) {
        let n = used.len();
        if prefix.len() == n {
            let mut inv = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if prefix[i] > prefix[j] {
                        inv += 1;
                    }
                }
            }
            out.push((prefix.clone(), if inv % 2 == 0 { 1.0 } else { -1.0 }));
            return;
        }
        for k in 0..n {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                go(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Leibniz expansion of the determinant of a matrix of polynomials in λ
/// (coefficients in ascending powers).
pub fn poly_det(entries: &[Vec<Poly>]) -> Poly {
    let n = entries.len();
    let mut det: Poly = vec![c(0.0, 0.0)];
    for (perm, sign) in permutations(n) {
        let mut term: Poly = vec![c(1.0, 0.0)];
        for (i, &j) in perm.iter().enumerate() {
            term = poly_mul(&term, &entries[i][j]);
        }
        poly_add(&mut det, &term, sign);
    }
    det
}

/// `det(λI − A)` for a dense row-major matrix.
pub fn char_poly(a: &[Vec<Complex64>]) -> Poly {
    let n = a.len();
    let entries: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { vec![-a[i][j], c(1.0, 0.0)] } else { vec![-a[i][j]] })
                .collect()
        })
        .collect();
    poly_det(&entries)
}

/// `det(λ²I − 2λB + M)`.
pub fn pencil_poly(b: &[Vec<Complex64>], m: &[Vec<Complex64>]) -> Poly {
    let n = b.len();
    let entries: Vec<Vec<Poly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let lead = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
                    vec![m[i][j], -2.0 * b[i][j], lead]
                })
                .collect()
        })
        .collect();
    poly_det(&entries)
}

fn horner(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(c(0.0, 0.0), |acc, &x| acc * z + x)
}

/// Durand–Kerner iteration followed by Newton polishing.
pub fn poly_roots(p: &[Complex64]) -> Vec<Complex64> {
    let mut p: Vec<Complex64> = p.to_vec();
    while p.len() > 1 && p.last().unwrap().norm() == 0.0 {
        p.pop();
    }
    let deg = p.len() - 1;
    let lead = p[deg];
    let monic: Vec<Complex64> = p.iter().map(|x| x / lead).collect();
    let bound = 1.0 + monic[..deg].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let seed = c(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..5000 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let mut denom = c(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            let step = horner(&monic, z[i]) / denom;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 * bound {
            break;
        }
    }
    let deriv: Vec<Complex64> = monic.iter().enumerate().skip(1).map(|(k, x)| x * k as f64).collect();
    for zi in &mut z {
        for _ in 0..3 {
            let d = horner(&deriv, *zi);
            if d.norm() > 1e-300 {
                let step = horner(&monic, *zi) / d;
                if step.norm() < 1e-6 {
                    *zi -= step;
                }
            }
        }
    }
    z
}

pub fn hausdorff(f: &[Complex64], g: &[Complex64]) -> f64 {
    let directed = |a: &[Complex64], b: &[Complex64]| {
        a.iter().map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    directed(f, g).max(directed(g, f))
}

/// Optimal matching distance between two equal-size multisets (brute force
/// over permutations, so keep them small).
pub fn matching_distance(f: &[Complex64], g: &[Complex64]) -> f64 {
    assert_eq!(f.len(), g.len());
    permutations(f.len())
        .into_iter()
        .map(|(p, _)| p.iter().enumerate().map(|(i, &j)| (f[i] - g[j]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

/// Smallest singular value of a 1×1 or 2×2 matrix in closed form.
pub fn sigma_min_small(a: &[Vec<Complex64>]) -> f64 {
    match a.len() {
        1 => a[0][0].norm(),
        2 => {
            let fro2: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum();
            let det = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).norm();
            let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
            ((fro2 - disc) / 2.0).max(0.0).sqrt()
        }
        _ => panic!("closed form only for n ≤ 2"),
    }
}

pub fn to_rows(m: &spec2lab::linalg::ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect()
}
