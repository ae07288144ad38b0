//! Unitary rotation of a collapsing pair `(B′, R′)` so that the leading block
//! of `B` is a prescribed Hermitian `T` with small coupling to the rest.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, HermitianMatrix, LinalgError};
use crate::report::{self, Check};

#[derive(Debug, Error)]
pub enum RotationError {
    #[error("no eigenvalue pair of B′ brackets μ_{index} = {mu} within a gap below 2δ = {}; the spectrum is not dense enough", 2.0 * .delta)]
    Pairing { index: usize, mu: f64, delta: f64 },
    #[error("need N ≥ 2n, got N = {big} for n = {small}")]
    TooSmall { small: usize, big: usize },
    #[error("δ must be positive, got {0}")]
    InvalidDelta(f64),
    #[error("internal: {what} residual {residual:e}")]
    Internal { what: &'static str, residual: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Bracketing eigenvalues for one target eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub mu: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub index_minus: usize,
    pub index_plus: usize,
    /// `μ = (1 − t)λ₋ + tλ₊`.
    pub t: f64,
}

impl Bracket {
    pub fn gap(&self) -> f64 {
        self.lambda_plus - self.lambda_minus
    }

    /// `(λ₊ − λ₋)√(1 − t)√t`.
    pub fn coupling(&self) -> f64 {
        self.gap() * ((1.0 - self.t) * self.t).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPairing {
    pub brackets: Vec<Bracket>,
}

impl EigenPairing {
    /// Whether gaps are below `2δ` and the `2n` indices are distinct.
    pub fn is_valid(&self, delta: f64) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.brackets.iter().all(|b| {
            b.gap() < 2.0 * delta
                && b.lambda_minus <= b.mu
                && b.mu <= b.lambda_plus
                && seen.insert(b.index_minus)
                && seen.insert(b.index_plus)
        })
    }
}

const SEARCH_BUDGET: usize = 200_000;

/// Picks distinct eigenvalues `λ₋k ≤ μ_k ≤ λ_k` with `λ_k − λ₋k < 2δ`.
///
/// Candidates for each `μ` are ordered by `max(μ − λ₋, λ₊ − μ)` and then by
/// index; a depth-first search backtracks when a later `μ` gets stuck.
pub fn pair_eigenvalues(mu: &[f64], spectrum: &[f64], delta: f64) -> Result<EigenPairing, RotationError> {
    if !(delta > 0.0) {
        return Err(RotationError::InvalidDelta(delta));
    }
    let mut order: Vec<usize> = (0..spectrum.len()).collect();
    order.sort_by(|&a, &b| spectrum[a].total_cmp(&spectrum[b]).then(a.cmp(&b)));
    let reach = 2 * mu.len() + 1;

    let candidates: Vec<Vec<(usize, usize)>> = mu
        .iter()
        .map(|&m| {
            let split = order.partition_point(|&i| spectrum[i] <= m);
            let lows: Vec<usize> = order[..split].iter().rev().take(reach).copied().collect();
            let first_high = order.partition_point(|&i| spectrum[i] < m);
            let highs: Vec<usize> = order[first_high..].iter().take(reach + 1).copied().collect();
            let mut c: Vec<(usize, usize)> = Vec::new();
            for &i in &lows {
                for &j in &highs {
                    if i != j && spectrum[j] - spectrum[i] < 2.0 * delta {
                        c.push((i, j));
                    }
                }
            }
            let cost = |&(i, j): &(usize, usize)| (m - spectrum[i]).max(spectrum[j] - m);
            c.sort_by(|a, b| cost(a).total_cmp(&cost(b)).then(a.cmp(b)));
            c
        })
        .collect();

    let n = mu.len();
    let mut chosen: Vec<usize> = vec![0; n];
    let mut used = std::collections::HashSet::new();
    let mut k = 0usize;
    let mut next = vec![0usize; n];
    let mut steps = 0usize;
    let mut deepest = 0usize;
    while k < n {
        steps += 1;
        if steps > SEARCH_BUDGET {
            break;
        }
        deepest = deepest.max(k);
        let pick = candidates[k][next[k]..]
            .iter()
            .position(|(i, j)| !used.contains(i) && !used.contains(j))
            .map(|p| p + next[k]);
        match pick {
            Some(p) => {
                let (i, j) = candidates[k][p];
                used.insert(i);
                used.insert(j);
                chosen[k] = p;
                next[k] = p + 1;
                k += 1;
            }
            None => {
                if k == 0 {
                    break;
                }
                next[k] = 0;
                k -= 1;
                let (i, j) = candidates[k][chosen[k]];
                used.remove(&i);
                used.remove(&j);
            }
        }
    }
    if k < n {
        return Err(RotationError::Pairing { index: deepest, mu: mu[deepest], delta });
    }
    let brackets = (0..n)
        .map(|k| {
            let (i, j) = candidates[k][chosen[k]];
            let (lo, hi) = (spectrum[i], spectrum[j]);
            let t = if hi > lo { ((mu[k] - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
            Bracket { mu: mu[k], lambda_minus: lo, lambda_plus: hi, index_minus: i, index_plus: j, t }
        })
        .collect();
    Ok(EigenPairing { brackets })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RotationResult {
    pub pairing: EigenPairing,
    /// `V = U U₁`.
    pub v: ComplexMatrix,
    pub b: HermitianMatrix,
    pub r: HermitianMatrix,
    /// Upper-right `n × (N − n)` block of `B`.
    pub s: ComplexMatrix,
    pub s_norm: f64,
    pub delta: f64,
    pub checks: Vec<Check>,
}

impl RotationResult {
    pub fn passed(&self) -> bool {
        report::all_passed(&self.checks)
    }

    /// Recomputes the checks that only need the stored matrices and the
    /// original pair.
    pub fn verify(&self, t: &HermitianMatrix, b_prime: &HermitianMatrix, r_prime: &HermitianMatrix) -> Result<Vec<Check>, RotationError> {
        let n = t.dim();
        let big = b_prime.dim();
        let b = HermitianMatrix::symmetrized(&b_prime.congruence(&self.v)?.into_matrix());
        let r = HermitianMatrix::symmetrized(&r_prime.congruence(&self.v)?.into_matrix());
        let scale = b_prime.norm()?.max(1.0);
        let mut checks = vec![
            Check::at_most("unitarity", linalg::gram_residual(&self.v), 1e-9),
            Check::at_most("b_matches", b.sub(&self.b)?.norm_fro(), 1e-9 * scale * big as f64),
            Check::at_most("r_matches", r.sub(&self.r)?.norm_fro(), 1e-9 * r_prime.norm()?.max(1.0) * big as f64),
            Check::flag("pairing", self.pairing.is_valid(self.delta)),
        ];
        checks.extend(structure_checks(t, b_prime, &self.b, self.delta, n)?);
        Ok(checks)
    }
}

/// Builds `V` with `V*B′V = [[T, S], [S*, K]]` and `‖S‖ < δ`.
pub fn rotate_embedding(
    t: &HermitianMatrix,
    b_prime: &HermitianMatrix,
    r_prime: &HermitianMatrix,
    delta: f64,
) -> Result<RotationResult, RotationError> {
    let n = t.dim();
    let big = b_prime.dim();
    if big < 2 * n {
        return Err(RotationError::TooSmall { small: n, big });
    }
    if r_prime.dim() != big {
        return Err(LinalgError::DimensionMismatch { expected: big, found: r_prime.dim() }.into());
    }
    let te = linalg::hermitian_eig(t)?;
    let be = linalg::hermitian_eig(b_prime)?;
    let pairing = pair_eigenvalues(&te.eigenvalues, &be.eigenvalues, delta)?;

    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    for br in &pairing.brackets {
        let um = be.vectors.column(br.index_minus);
        let up = be.vectors.column(br.index_plus);
        let (c, s) = ((1.0 - br.t).sqrt(), br.t.sqrt());
        plus.push(um.iter().zip(&up).map(|(a, b)| a * c + b * s).collect::<Vec<Complex64>>());
        minus.push(um.iter().zip(&up).map(|(a, b)| -a * s + b * c).collect::<Vec<Complex64>>());
    }
    let mut cols = plus;
    cols.extend(minus);
    let vs = ComplexMatrix::from_columns(&cols)?;
    let ortho = linalg::gram_residual(&vs);
    if ortho > crate::tol::ORTHONORMAL {
        return Err(RotationError::Internal { what: "orthonormality of v", residual: ortho });
    }
    let u = linalg::complete_unitary(&cols, big)?;

    // U₀ = W* where T = W diag(μ) W*, so U₁ = diag(W*, I).
    let w_adj = te.vectors.adjoint();
    let u1 = ComplexMatrix::from_fn(big, big, |i, j| {
        if i < n && j < n {
            w_adj.get(i, j)
        } else if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })?;
    let v = u.matmul(&u1)?;
    let b = HermitianMatrix::symmetrized(&b_prime.congruence(&v)?.into_matrix());
    let r = HermitianMatrix::symmetrized(&r_prime.congruence(&v)?.into_matrix());
    let s = b.matrix().block(0, n, n, big - n);
    let s_norm = if big > n { s.norm_2()? } else { 0.0 };

    let mut checks = vec![
        Check::at_most("unitarity", linalg::gram_residual(&v), 1e-9),
        Check::at_most("orthonormal_v", ortho, crate::tol::ORTHONORMAL),
        Check::flag("pairing", pairing.is_valid(delta)),
    ];
    // Entries (B′v_k, v_m) of the 2n × 2n Gram block.
    let g = vs.adjoint_matmul(&b_prime.matrix().matmul(&vs)?)?;
    let scale = be.eigenvalues.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut eq8 = 0.0f64;
    let mut eq8_max = 0.0f64;
    let mut eq9 = 0.0f64;
    for (k, br) in pairing.brackets.iter().enumerate() {
        for m in 0..2 * n {
            let entry = g.get(m, k);
            if m == n + k {
                eq8 = eq8.max((entry - Complex64::new(br.coupling(), 0.0)).norm());
                eq8_max = eq8_max.max(entry.norm());
            } else if m != k {
                eq9 = eq9.max(entry.norm());
            }
        }
    }
    checks.push(Check::at_most("coupling_formula", eq8, 1e-10 * scale));
    checks.push(Check::below("coupling_entries", eq8_max, delta));
    checks.push(Check::at_most("off_pair_entries", eq9, 1e-10 * scale));
    checks.extend(structure_checks(t, b_prime, &b, delta, n)?);

    Ok(RotationResult { pairing, v, b, r, s, s_norm, delta, checks })
}

fn structure_checks(
    t: &HermitianMatrix,
    b_prime: &HermitianMatrix,
    b: &HermitianMatrix,
    delta: f64,
    n: usize,
) -> Result<Vec<Check>, RotationError> {
    let big = b.dim();
    let block = b.principal_block(0, n).sub(t)?.matrix().max_abs();
    let s = b.matrix().block(0, n, n, big - n);
    let s_norm = if big > n { s.norm_2()? } else { 0.0 };
    let before = linalg::hermitian_eigenvalues(b_prime)?;
    let after = linalg::hermitian_eigenvalues(b)?;
    let drift = before.iter().zip(&after).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    Ok(vec![
        Check::below("block_residual", block, 1e-10 * t.norm()?.max(1.0)),
        Check::below("coupling_norm", s_norm, delta),
        Check::at_most("spectrum_preserved", drift, 1e-9 * before.iter().fold(1.0f64, |m, x| m.max(x.abs()))),
    ])
}
