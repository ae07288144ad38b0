use serde::{Deserialize, Serialize};

use super::{Lemma22Certificate, SymbolError};
use crate::linalg::{self, HermitianMatrix, LinalgError};
use crate::report::Check;
use crate::spectra::{compress, Subspace};

/// `T = [[B, D^{1/2}], [D^{1/2}, 0]]` with `D = M − B²`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Dilation {
    pub t: HermitianMatrix,
    /// Smallest eigenvalue of `M − B²` before clamping.
    pub min_eigenvalue: f64,
    pub checks: Vec<Check>,
}

pub fn dilate(b: &HermitianMatrix, m: &HermitianMatrix) -> Result<Dilation, SymbolError> {
    let n = b.dim();
    if m.dim() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, found: m.dim() }.into());
    }
    let d = m.sub(&b.square())?;
    let e = linalg::hermitian_eig(&d)?;
    let scale = m.norm()?.max(b.norm()?.powi(2)).max(1.0);
    let min = e.eigenvalues[0];
    let floor = crate::tol::PSD * scale;
    if min < -floor {
        return Err(SymbolError::NotDilatable { min_eigenvalue: min });
    }
    let root = linalg::psd_sqrt_with_floor(&d, floor)?;
    let t = HermitianMatrix::from_blocks(b, root.matrix(), &HermitianMatrix::zeros(n))?;

    let p = compress(&t, &Subspace::window(2 * n, n)).or_else(|_| -> Result<_, SymbolError> {
        // M − B² may sit a hair below zero; the check below still reports it.
        let b2 = t.principal_block(0, n);
        let m2 = HermitianMatrix::symmetrized(&t.square().matrix().block(0, 0, n, n));
        Ok(crate::spectra::QuadraticPencil::general(b2, m2)?)
    })?;
    let b_res = p.b.sub(b)?.norm_fro();
    let m_res = p.m.sub(m)?.norm_fro();
    let checks = vec![
        Check::at_most("compression_b", b_res, 0.0),
        Check::at_most("compression_m", m_res, 1e-8 * scale),
    ];
    Ok(Dilation { t, min_eigenvalue: min, checks })
}

impl Dilation {
    /// Re-derives the compression checks from the stored `T`.
    pub fn verify(&self, b: &HermitianMatrix, m: &HermitianMatrix) -> Result<Vec<Check>, SymbolError> {
        let n = b.dim();
        if self.t.dim() != 2 * n || m.dim() != n {
            return Err(LinalgError::DimensionMismatch { expected: 2 * n, found: self.t.dim() }.into());
        }
        let scale = m.norm()?.max(b.norm()?.powi(2)).max(1.0);
        let b2 = self.t.principal_block(0, n);
        let m2 = HermitianMatrix::symmetrized(&self.t.square().matrix().block(0, 0, n, n));
        Ok(vec![
            Check::at_most("compression_b", b2.sub(b)?.norm_fro(), 0.0),
            Check::at_most("compression_m", m2.sub(m)?.norm_fro(), 1e-8 * scale),
        ])
    }
}

/// `T̂ = [[B, R], [R, 0]]` and the window of the first `N` coordinates.
pub fn assemble_counterexample(cert: &Lemma22Certificate) -> Result<(HermitianMatrix, Subspace), SymbolError> {
    let n = cert.n;
    let t = HermitianMatrix::from_blocks(&cert.b, cert.r_mat.matrix(), &HermitianMatrix::zeros(n))?;
    Ok((t, Subspace::window(2 * n, n)))
}
