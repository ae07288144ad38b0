//! Any pair `(B, M)` with `M ≥ B²` is the compression of a Hermitian matrix
//! of twice the size.

use rand::SeedableRng;
use spec2lab::linalg::{self, HermitianMatrix};
use spec2lab::spectra::{compress, Subspace};
use spec2lab::symbol::dilate;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let b = linalg::random_hermitian(4, &mut rng);
    let g = linalg::random_matrix(4, 4, &mut rng);
    let m = b.square().add(&HermitianMatrix::symmetrized(&g.adjoint_matmul(&g)?))?;

    let d = dilate(&b, &m)?;
    let p = compress(&d.t, &Subspace::window(8, 4))?;
    println!("min eig(M - B^2) = {:.4}", d.min_eigenvalue);
    println!("|B' - B| = {:.1e}, |M' - M| = {:.1e}", p.b.sub(&b)?.norm_fro(), p.m.sub(&m)?.norm_fro());
    assert!(d.checks.iter().all(|c| c.passed));

    match dilate(&b, &b.square().shift(-1e-3)) {
        Err(e) => println!("M = B^2 - 1e-3: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
