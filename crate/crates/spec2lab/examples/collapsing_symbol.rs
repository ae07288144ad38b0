//! A Toeplitz construction whose compression to the first `N` coordinates has
//! its whole second-order spectrum at one conjugate pair.

use spec2lab::spectra::{compress, spec2};
use spec2lab::symbol::{assemble_counterexample, lemma22_construct, Lemma22Options, Lemma22Params};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = Lemma22Params::new(-2.0, 2.0, 0.5, 0.2, 0.4)?;
    let opts = Lemma22Options { fixed_n: Some(16), accept_sparse: true, ..Lemma22Options::default() };
    let cert = lemma22_construct(&params, &opts)?;
    println!("N = {}, z0 = {:.6}, |R| = {:.4}, density {:.3}", cert.n, cert.z0, cert.r_norm(), cert.density);
    for c in &cert.checks {
        println!("  {:<22} {:5} {:.3e} (bound {:.3e})", c.name, c.passed, c.value, c.bound);
    }

    let (t, l) = assemble_counterexample(&cert)?;
    let s = spec2(&compress(&t, &l)?)?;
    let spread = s.points().iter().map(|z| (z - cert.z0).norm().min((z - cert.z0.conj()).norm())).fold(0.0, f64::max);
    println!("{} roots within {spread:.3e} of z0 or its conjugate", s.points().len());
    assert!(spread < 10.0 * 1e-12f64.powf(1.0 / 16.0));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
