//! Membership in the region reachable by second-order spectra of an
//! operator with spectrum `[-1, 0] ∪ [1, 2]`.

use spec2lab::spectra::{q_region, IntervalUnion};
use spec2lab::Complex64;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sigma = IntervalUnion::new(vec![(-1.0, 0.0), (1.0, 2.0)])?;
    let q = q_region(&sigma);
    for (re, im) in [(0.5, 0.8), (0.5, 0.2), (-0.5, 0.0), (0.5, 0.0), (2.5, 0.0)] {
        let z = Complex64::new(re, im);
        println!("{z:>10}: inside = {:5}  margin = {:+.4}", q.contains(z), q.margin(z));
    }
    assert!(q.contains(Complex64::new(0.5, 0.8)));
    assert!(!q.contains(Complex64::new(0.5, 0.2)));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
