//! Two nested stages: the leading blocks telescope, and the window of the
//! first stage keeps its collapsed second-order spectrum inside the bigger
//! matrix.

use spec2lab::nesting::{nest_run, verify_nest, NestOptions, NestSchedule};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let schedule = NestSchedule { rho_minus: -1.0, rho_plus: 1.0, r: 0.0, alpha: vec![0.5, 0.4] };
    let opts = NestOptions { loose: true, max_dim: 512, ..NestOptions::default() };
    let state = nest_run(&schedule, &opts)?;
    for st in &state.stages {
        println!("stage {}: N = {}, eps = {:.4}{}", st.level, st.n, st.epsilon, if st.relaxed { " (widened)" } else { "" });
    }
    let report = verify_nest(&state)?;
    for s in &report.stages {
        println!("stage {} collapse radius {:.4}", s.level, s.collapse_radius);
        for c in &s.checks {
            println!("  {:<20} {}", c.name, if c.passed { "ok" } else { "FAIL" });
        }
    }
    assert!(report.stages[0].checks.iter().any(|c| c.name == "telescoping" && c.passed));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
