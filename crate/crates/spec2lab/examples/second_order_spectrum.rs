//! Second-order spectrum of a random compression, checked against the
//! eigenvalues of `T`.

use spec2lab::linalg::{self, ComplexMatrix};
use spec2lab::spectra::{compress, enclosure_check, spec2, spec2_residual, Subspace};
use rand::SeedableRng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let t = linalg::random_hermitian(6, &mut rng);
    let u = linalg::random_unitary(6, &mut rng);
    let l = Subspace::from_orthonormal(ComplexMatrix::from_columns(&u.columns()[..3])?)?;

    let pencil = compress(&t, &l)?;
    let s = spec2(&pencil)?;
    let eig = linalg::hermitian_eigenvalues(&t)?;
    println!("Spec(T) = {eig:.4?}");
    for (z, ok) in s.points().iter().zip(enclosure_check(&s, &eig)) {
        println!("  {:+.5} {:+.5}i  enclosed: {ok}", z.re, z.im);
    }
    println!("residual {:.2e}", spec2_residual(&pencil, &s)?);
    assert_eq!(s.points().len(), 6);
    assert!(enclosure_check(&s, &eig).iter().all(|&b| b));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
