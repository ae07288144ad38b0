//! A trial vector mixing the two ends of a gap produces a spurious Galerkin
//! eigenvalue in the gap; the second-order spectrum moves off the real line.

use spec2lab::linalg::{ComplexMatrix, HermitianMatrix};
use spec2lab::spectra::{compress, galerkin_spectrum, spec2, Subspace};
use spec2lab::Complex64;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let t = HermitianMatrix::from_real_diagonal(&[-1.0, -0.9, 0.9, 1.0]);
    let s = 0.5f64.sqrt();
    let v = vec![Complex64::new(s, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(s, 0.0)];
    let l = Subspace::from_orthonormal(ComplexMatrix::from_columns(&[v])?)?;

    let galerkin = galerkin_spectrum(&t, &l)?;
    let second = spec2(&compress(&t, &l)?)?;
    println!("Galerkin: {galerkin:?}  (inside the gap (-0.9, 0.9))");
    println!("Spec2:    {:.4} and {:.4}", second.points()[0], second.points()[1]);
    assert!(galerkin[0].abs() < 1e-12);
    assert!(second.points().iter().all(|z| (z.im.abs() - 1.0).abs() < 1e-12));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
