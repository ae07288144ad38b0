//! Embed a small Hermitian matrix as the leading block of a rotated
//! collapsing construction.

use rand::SeedableRng;
use spec2lab::linalg;
use spec2lab::rotation::rotate_embedding;
use spec2lab::symbol::{lemma22_construct, Lemma22Options, Lemma22Params};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = Lemma22Params::new(-2.0, 2.0, 0.0, 0.1, 14.0)?;
    let opts = Lemma22Options { fixed_n: Some(128), accept_sparse: true, ..Lemma22Options::default() };
    let cert = lemma22_construct(&params, &opts)?;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let t = linalg::random_hermitian(3, &mut rng).scale(0.4);
    let rot = rotate_embedding(&t, &cert.b, &cert.r_mat, 0.1)?;
    for b in &rot.pairing.brackets {
        println!("mu = {:+.4} in [{:+.4}, {:+.4}], t = {:.3}", b.mu, b.lambda_minus, b.lambda_plus, b.t);
    }
    let lead = rot.b.principal_block(0, 3).sub(&t)?.norm_fro();
    println!("leading block residual {lead:.1e}, |S| = {:.4}", rot.s_norm);
    assert!(rot.passed());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
