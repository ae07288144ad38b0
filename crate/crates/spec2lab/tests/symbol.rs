mod common;

use std::f64::consts::TAU;

use common::{c, rng};
use num_complex::Complex64;
use spec2lab::linalg::{self, HermitianMatrix};
use spec2lab::spectra::{self, compress, spec2};
use spec2lab::symbol::{
    self, assemble_counterexample, build_symbol, dilate, epsilon0, lemma22_construct, toeplitz, FourierCoefficients,
    Lemma22Options, Lemma22Params, SymbolError,
};

fn standard() -> Lemma22Params {
    Lemma22Params::new(-2.0, 2.0, 0.5, 0.2, 0.4).unwrap()
}

fn sized(n: usize) -> Lemma22Options {
    Lemma22Options { fixed_n: Some(n), accept_sparse: true, ..Lemma22Options::default() }
}

#[test]
fn symbol_boundary_stays_in_box() {
    let s = build_symbol(1.0, 0.5, 0.05, 64).unwrap();
    assert!(s.within_box());
    assert!((s.eval(c(0.0, 0.0)).re - 0.5).abs() < 1e-12);
    // Direct evaluation on a grid much finer than the certification grid.
    let samples = 1 << 16;
    for k in 0..samples {
        let w = s.eval(Complex64::from_polar(1.0, TAU * k as f64 / samples as f64));
        assert!(w.im >= 0.0 && w.im <= 0.05, "Im w = {}", w.im);
        assert!(w.re >= -1.0 && w.re <= 1.0, "Re w = {}", w.re);
    }
}

#[test]
fn symbol_rejects_bad_parameters() {
    assert!(matches!(build_symbol(1.0, 1.5, 0.05, 64), Err(SymbolError::InvalidParameters(_))));
    assert!(matches!(build_symbol(1.0, 0.0, 0.05, 4), Err(SymbolError::InvalidParameters(_))));
}

#[test]
fn analytic_toeplitz_is_lower_triangular() {
    let s = build_symbol(1.0, 0.2, 0.1, 16).unwrap();
    let n = 12;
    let b = toeplitz(&s.real_part(), n);
    let a = toeplitz(&s.imag_part(), n);
    let x = b.add(&a.scale(c(0.0, 1.0))).unwrap();
    for j in 0..n {
        assert!((x.get(j, j) - s.coefficients[0]).norm() < 1e-14);
        for k in j + 1..n {
            assert!(x.get(j, k).norm() < 1e-14);
        }
        for k in 0..j {
            let m = j - k;
            let expected = s.coefficients.get(m).copied().unwrap_or(c(0.0, 0.0));
            assert!((x.get(j, k) - expected).norm() < 1e-14);
        }
    }
}

#[test]
fn toeplitz_reads_fourier_coefficients() {
    let h = FourierCoefficients::new(vec![c(3.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
    let t = toeplitz(&h, 3);
    // values[m + K] = ĥ_m, so ĥ_1 = 1 sits below the diagonal.
    assert_eq!(t.get(1, 0), c(1.0, 0.0));
    assert_eq!(t.get(0, 1), c(3.0, 0.0));
    assert_eq!(t.get(2, 0), c(0.0, 0.0));
    assert_eq!(t.get(2, 2), c(2.0, 0.0));
}

#[test]
fn epsilon0_meets_both_budgets() {
    for (rho, eps) in [(2.0, 0.4), (1.0, 0.1), (0.5, 1.0)] {
        let e0 = epsilon0(rho, eps);
        let s = (2.0 * rho * e0).sqrt();
        assert!(1.1 * (s * s + (s + e0).powi(2)) < eps * eps);
        assert!(1.1 * (s + e0) < eps);
        // Largest of its dyadic family.
        let k = (eps * eps / (8.0 * rho) / e0).log2();
        assert!((k - k.round()).abs() < 1e-9);
        if k.round() > 0.0 {
            let up = 2.0 * e0;
            let su = (2.0 * rho * up).sqrt();
            assert!(!(1.1 * (su * su + (su + up).powi(2)) < eps * eps && 1.1 * (su + up) < eps));
        }
    }
}

#[test]
fn standard_certificate_collapses_onto_vertical_segment() {
    let cert = lemma22_construct(&standard(), &sized(64)).unwrap();
    for name in ["norm_bound", "triangularity", "diagonal", "root_real_part", "root_imaginary_part", "factorization"] {
        let chk = cert.check(name).unwrap();
        assert!(chk.passed, "{name}: {} vs {}", chk.value, chk.bound);
    }
    assert!(cert.r_norm() < 0.4);
    assert!((cert.z0.re - 0.5).abs() < 1e-12);
    assert!(cert.z0.im.abs() < 0.4);
    let lift = (2.0 * 2.0 * cert.eps0).sqrt();
    assert!((cert.z0.im - (lift + cert.symbol.coefficients[0].im)).abs() < 1e-15);
    assert!(cert.check("spectrum_inside").unwrap().passed);
}

#[test]
fn density_shortfall_is_reported_with_best_certificate() {
    let opts = Lemma22Options { n_max: 32, ..Lemma22Options::default() };
    match lemma22_construct(&standard(), &opts) {
        Err(SymbolError::DensityNotAchieved { achieved, wanted, best }) => {
            assert!(achieved >= wanted);
            assert_eq!(best.n, 32);
            assert!(!best.check("density").unwrap().passed);
        }
        Ok(c) => assert!(c.density < 0.2),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn small_pencil_roots_cluster_at_z0() {
    for n in [8, 16, 32] {
        let cert = lemma22_construct(&standard(), &sized(n)).unwrap();
        let (t, l) = assemble_counterexample(&cert).unwrap();
        let s = spec2(&compress(&t, &l).unwrap()).unwrap();
        let radius = 10.0 * 1e-12f64.powf(1.0 / n as f64);
        for &z in s.points() {
            let d = (z - cert.z0).norm().min((z - cert.z0.conj()).norm());
            assert!(d <= radius, "N = {n}: {z} is {d} from z0 = {}", cert.z0);
        }
    }
}

#[test]
fn counterexample_spectrum_is_near_interval() {
    let cert = lemma22_construct(&standard(), &sized(16)).unwrap();
    let (t, l) = assemble_counterexample(&cert).unwrap();
    assert_eq!(t.dim(), 32);
    assert_eq!(l.rank(), 16);
    let eig = linalg::hermitian_eigenvalues(&t).unwrap();
    assert!(eig.iter().all(|&x| (-2.4..=2.4).contains(&x)));
    let p = compress(&t, &l).unwrap();
    assert!(p.b.sub(&cert.b).unwrap().norm_fro() < 1e-12);
}

#[test]
fn certificate_survives_json() {
    let cert = lemma22_construct(&standard(), &sized(16)).unwrap();
    let text = serde_json::to_string(&cert).unwrap();
    let back: symbol::Lemma22Certificate = serde_json::from_str(&text).unwrap();
    let again = back.verify().unwrap();
    assert_eq!(again.len(), cert.checks.len());
    for (a, b) in again.iter().zip(&cert.checks) {
        assert_eq!(a.name, b.name);
        assert_eq!(a.passed, b.passed, "{}", a.name);
    }
}

#[test]
fn lemma22_rejects_bad_parameters() {
    assert!(matches!(Lemma22Params::new(-2.0, 2.0, 3.0, 0.2, 0.4), Err(SymbolError::InvalidParameters(_))));
    assert!(matches!(Lemma22Params::new(-2.0, 2.0, 0.0, -0.2, 0.4), Err(SymbolError::InvalidParameters(_))));
    assert!(lemma22_construct(&standard(), &sized(0)).is_err());
}

#[test]
fn dilation_round_trip() {
    let mut r = rng(17);
    for n in 2..=8 {
        let b = linalg::random_hermitian(n, &mut r);
        let g = linalg::random_matrix(n, n, &mut r);
        let m = b.square().add(&HermitianMatrix::symmetrized(&g.adjoint_matmul(&g).unwrap())).unwrap();
        let d = dilate(&b, &m).unwrap();
        assert!(d.checks.iter().all(|c| c.passed));
        let p = compress(&d.t, &spectra::Subspace::window(2 * n, n)).unwrap();
        assert_eq!(p.b, b);
        assert!(p.m.sub(&m).unwrap().norm_fro() < 1e-9);
        let again = d.verify(&b, &m).unwrap();
        assert!(again.iter().all(|c| c.passed));
    }
}

#[test]
fn dilation_needs_m_above_b_squared() {
    let b = linalg::random_hermitian(3, &mut rng(18));
    let m = b.square().shift(-1e-3);
    match dilate(&b, &m) {
        Err(SymbolError::NotDilatable { min_eigenvalue }) => assert!((min_eigenvalue + 1e-3).abs() < 1e-9),
        other => panic!("expected NotDilatable, got {other:?}"),
    }
    let exact = dilate(&b, &b.square()).unwrap();
    assert!(exact.min_eigenvalue.abs() < 1e-12);
}
