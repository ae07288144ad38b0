//! Plant a finite target set as the second-order spectrum of a diagonal
//! operator with spectrum in two bands.

use spec2lab::planting::{theorem11_run, PlantMode, TargetSet, TheoremOptions};
use spec2lab::spectra::IntervalUnion;
use spec2lab::Complex64;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sigma = IntervalUnion::new(vec![(-1.0, 0.0), (1.0, 2.0)])?;
    let f = [(-0.5, 0.0), (1.5, 0.0), (0.5, 0.8), (0.5, -0.8)].map(|(a, b)| Complex64::new(a, b));
    let target = TargetSet::from_points(sigma, &f)?;
    let opts = TheoremOptions { mode: PlantMode::Mechanism, levels: 3, ..TheoremOptions::default() };
    let run = theorem11_run(&target, None, &opts)?;
    for level in &run.report.levels {
        println!(
            "level {}: {} gadgets, dim L = {}, d_H to F = {:.4}",
            level.level, level.gadgets, level.subspace_dim, level.hausdorff_target
        );
    }
    assert!(run.report.passed());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
