//! How far can `M` move before some root leaves its `ε`-disk?

use spec2lab::linalg::HermitianMatrix;
use spec2lab::spectra::{delta_bound, spec2, QuadraticPencil};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let b = HermitianMatrix::from_real_diagonal(&[0.0, 1.0]);
    let m = HermitianMatrix::from_real_diagonal(&[1.0, 2.0]);
    let p = QuadraticPencil::new(b.clone(), m.clone())?;
    let cert = delta_bound(&p, 0.1)?;
    let roots: Vec<String> = spec2(&p)?.points().iter().map(|z| format!("{z:.4}")).collect();
    println!("Spec2 = {}", roots.join(", "));
    println!("delta = {:.5} after {} evaluations", cert.delta, cert.evaluations);
    for c in &cert.components {
        println!("  component with {} root(s) around {:.3}", c.root_count, c.centers[0]);
    }

    let nudged = QuadraticPencil::new(b, m.shift(0.9 * cert.delta))?;
    let moved = spec2(&nudged)?;
    assert!(cert.preserves(moved.points()));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
