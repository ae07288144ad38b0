mod common;

use std::f64::consts::TAU;

use common::{c, hausdorff, matching_distance, pencil_poly, poly_roots, rng, to_rows};
use num_complex::Complex64;
use rand::RngExt;
use spec2lab::linalg::{self, ComplexMatrix, HermitianMatrix};
use spec2lab::spectra::{
    self, compress, delta_bound, enclosure_check, q_region, spec2, IntervalUnion, QuadraticPencil, SpectraError,
    SpectrumSet, Subspace,
};

fn diag02_line() -> (HermitianMatrix, Subspace) {
    let t = HermitianMatrix::from_real_diagonal(&[0.0, 2.0]);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let l = Subspace::from_orthonormal(ComplexMatrix::new(2, 1, vec![c(s, 0.0), c(s, 0.0)]).unwrap()).unwrap();
    (t, l)
}

fn pencil(b: f64, m: f64) -> QuadraticPencil {
    QuadraticPencil::new(HermitianMatrix::from_real_diagonal(&[b]), HermitianMatrix::from_real_diagonal(&[m])).unwrap()
}

/// Random orthonormal `k`-frame in `C^n`.
fn random_subspace(n: usize, k: usize, r: &mut impl rand::Rng) -> Subspace {
    let u = linalg::random_unitary(n, r);
    Subspace::from_orthonormal(u.block(0, 0, n, k)).unwrap()
}

#[test]
fn compress_line_in_diag02() {
    let (t, l) = diag02_line();
    let p = compress(&t, &l).unwrap();
    assert!((p.b.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
    assert!((p.m.get(0, 0) - c(2.0, 0.0)).norm() < 1e-15);
}

#[test]
fn compress_full_space_and_coordinate() {
    let t = linalg::random_hermitian(4, &mut rng(1));
    let p = compress(&t, &Subspace::full(4)).unwrap();
    assert!(p.b.sub(&t).unwrap().norm_fro() < 1e-14);
    assert!(p.m.sub(&t.square()).unwrap().norm_fro() < 1e-13);
    let e1 = compress(&t, &Subspace::window(4, 1)).unwrap();
    assert_eq!(e1.b.get(0, 0), t.get(0, 0));
    assert!((e1.m.get(0, 0) - t.square().get(0, 0)).norm() < 1e-14);
}

#[test]
fn compress_rejects_mismatched_ambient() {
    let t = HermitianMatrix::identity(3);
    assert!(compress(&t, &Subspace::window(4, 2)).is_err());
}

#[test]
fn spec2_of_line_in_diag02() {
    let (t, l) = diag02_line();
    let s = spec2(&compress(&t, &l).unwrap()).unwrap();
    assert_eq!(s.len(), 2);
    assert!(hausdorff(s.points(), &[c(1.0, 1.0), c(1.0, -1.0)]) < 1e-14);
    assert!(s.is_conjugation_symmetric());
}

#[test]
fn spec2_of_x_squared_plus_one() {
    let s = spec2(&pencil(0.0, 1.0)).unwrap();
    assert!(hausdorff(s.points(), &[c(0.0, 1.0), c(0.0, -1.0)]) < 1e-14);
}

#[test]
fn diagonal_full_space_gives_double_roots() {
    let d = [-1.0, 0.5, 3.0];
    let t = HermitianMatrix::from_real_diagonal(&d);
    let s = spec2(&compress(&t, &Subspace::full(3)).unwrap()).unwrap();
    assert_eq!(s.len(), 6);
    let expected: Vec<Complex64> = d.iter().flat_map(|&x| [c(x, 0.0), c(x, 0.0)]).collect();
    assert!(matching_distance(s.points(), &expected) < 1e-7);
}

#[test]
fn spec2_points_are_roots() {
    let mut r = rng(2);
    for n in [2, 4, 6] {
        let t = linalg::random_hermitian(2 * n, &mut r);
        let p = compress(&t, &random_subspace(2 * n, n, &mut r)).unwrap();
        let s = spec2(&p).unwrap();
        assert_eq!(s.len(), 2 * n);
        let scale = p.scale().unwrap();
        for &z in s.points() {
            assert!(linalg::smallest_singular_value(&p.evaluate(z)).unwrap() <= 1e-6 * scale);
        }
        assert!(spectra::spec2_residual(&p, &s).unwrap() <= 1e-6);
    }
}

#[test]
fn galerkin_examples() {
    let (t, l) = diag02_line();
    assert!((spectra::galerkin_spectrum(&t, &l).unwrap()[0] - 1.0).abs() < 1e-15);
    let t = HermitianMatrix::from_real_diagonal(&[-1.0, 1.0]);
    assert!(spectra::galerkin_spectrum(&t, &l).unwrap()[0].abs() < 1e-15);
    let h = linalg::random_hermitian(5, &mut rng(3));
    let full = spectra::galerkin_spectrum(&h, &Subspace::full(5)).unwrap();
    let eig = linalg::hermitian_eigenvalues(&h).unwrap();
    assert!(full.iter().zip(&eig).all(|(a, b)| (a - b).abs() < 1e-12));
}

#[test]
fn enclosure_examples() {
    let pair = SpectrumSet::new(vec![c(1.0, 1.0), c(1.0, -1.0)], true).unwrap();
    assert!(enclosure_check(&pair, &[0.0, 2.0]).iter().all(|&b| b));
    let real = SpectrumSet::real(&[2.0]).unwrap();
    assert!(enclosure_check(&real, &[0.0, 2.0])[0]);
    let far = SpectrumSet::new(vec![c(0.0, 1.0), c(0.0, -1.0)], true).unwrap();
    assert!(enclosure_check(&far, &[5.0]).iter().all(|&b| !b));
    // A split double root gets its spread as slack, an isolated point does not.
    let split = SpectrumSet::real(&[1.0 - 3e-8, 1.0 + 3e-8]).unwrap();
    assert!(enclosure_check(&split, &[1.0]).iter().all(|&b| b));
    let lone = SpectrumSet::real(&[1.0 + 3e-8]).unwrap();
    assert!(!enclosure_check(&lone, &[1.0])[0]);
}

#[test]
fn enclosure_holds_for_random_compressions() {
    let mut r = rng(4);
    for _ in 0..20 {
        let n = r.random_range(2..10usize);
        let k = r.random_range(1..=n);
        let t = linalg::random_hermitian(n, &mut r);
        let s = spec2(&compress(&t, &random_subspace(n, k, &mut r)).unwrap()).unwrap();
        let eig = linalg::hermitian_eigenvalues(&t).unwrap();
        assert!(enclosure_check(&s, &eig).iter().all(|&b| b));
    }
}

#[test]
fn hausdorff_examples() {
    let f = [c(0.0, 0.0), c(1.0, 2.0)];
    assert_eq!(spectra::hausdorff(&f, &f).unwrap(), 0.0);
    assert_eq!(spectra::hausdorff(&[c(0.0, 0.0)], &[c(3.0, 0.0)]).unwrap(), 3.0);
    assert_eq!(spectra::hausdorff(&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0)]).unwrap(), 1.0);
    assert_eq!(spectra::directed(&[c(1.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)]), 0.0);
    assert!(matches!(spectra::hausdorff(&[], &f), Err(SpectraError::EmptySet)));
}

#[test]
fn q_region_examples() {
    let unit = q_region(&IntervalUnion::single(0.0, 1.0).unwrap());
    assert!(unit.contains(c(0.5, 0.5)));
    assert!(!unit.contains(c(0.5, 0.6)));

    let two = q_region(&IntervalUnion::new(vec![(-1.0, 0.0), (1.0, 2.0)]).unwrap());
    assert!(!two.contains(c(0.5, 0.0)));
    assert!(two.contains(c(0.5, 0.8)));
    assert!(two.contains(c(0.5, 0.5)), "gap disks are open");
    assert!(two.contains(c(-1.0, 0.0)));
    assert!(!two.contains(c(2.1, 0.0)));
}

#[test]
fn interval_union_validation() {
    assert!(IntervalUnion::new(vec![(0.0, 1.0), (1.0, 2.0)]).is_err());
    assert!(IntervalUnion::new(vec![(1.0, 0.0)]).is_err());
    assert!(IntervalUnion::new(vec![]).is_err());
    let s: IntervalUnion = serde_json::from_str("[[-1, 0], [1, 2]]").unwrap();
    assert_eq!(s.gaps(), vec![(0.0, 1.0)]);
    assert!(serde_json::from_str::<IntervalUnion>("[[1, 0]]").is_err());
}

#[test]
fn spectra_stay_in_q_region() {
    let mut r = rng(5);
    let sigma = IntervalUnion::new(vec![(-1.0, 0.0), (1.0, 2.0)]).unwrap();
    let q = q_region(&sigma);
    for _ in 0..20 {
        let n = 12;
        let d: Vec<f64> = (0..n)
            .map(|i| if i % 2 == 0 { r.random_range(-1.0..0.0) } else { r.random_range(1.0..2.0) })
            .collect();
        let v = linalg::random_unitary(n, &mut r);
        let t = HermitianMatrix::from_real_diagonal(&d).congruence(&v).unwrap();
        let s = spec2(&compress(&t, &random_subspace(n, 4, &mut r)).unwrap()).unwrap();
        assert!(s.points().iter().all(|&z| q.contains_inflated(z, 1e-6)));
    }
}

#[test]
fn spec2_is_conjugation_symmetric() {
    let mut r = rng(6);
    let t = linalg::random_hermitian(9, &mut r);
    let s = spec2(&compress(&t, &random_subspace(9, 5, &mut r)).unwrap()).unwrap();
    let conj: Vec<Complex64> = s.points().iter().map(|z| z.conj()).collect();
    assert!(hausdorff(s.points(), &conj) < 1e-8);
    assert!(SpectrumSet::new(vec![c(0.0, 1.0)], true).is_err());
}

#[test]
fn spec2_is_unitarily_invariant() {
    let mut r = rng(7);
    let t = linalg::random_hermitian(6, &mut r);
    let l = random_subspace(6, 3, &mut r);
    let v = linalg::random_unitary(6, &mut r);
    let tv = t.congruence(&v).unwrap();
    let lv = Subspace::from_orthonormal(v.adjoint().matmul(l.basis()).unwrap()).unwrap();
    let a = spec2(&compress(&t, &l).unwrap()).unwrap();
    let b = spec2(&compress(&tv, &lv).unwrap()).unwrap();
    assert!(matching_distance(a.points(), b.points()) < 1e-8);
}

#[test]
fn spec2_matches_expanded_determinant() {
    let mut r = rng(8);
    for k in 1..=3 {
        for _ in 0..10 {
            let t = linalg::random_hermitian(k + 3, &mut r);
            let p = compress(&t, &random_subspace(k + 3, k, &mut r)).unwrap();
            let oracle = poly_roots(&pencil_poly(&to_rows(p.b.matrix()), &to_rows(p.m.matrix())));
            let s = spec2(&p).unwrap();
            assert!(hausdorff(s.points(), &oracle) < 1e-6, "k = {k}");
        }
    }
}

#[test]
fn delta_for_unit_pencil() {
    let cert = delta_bound(&pencil(0.0, 1.0), 0.5).unwrap();
    // Dense contour oracle: |λ − i||λ + i| on both circles.
    let oracle = (0..200_000)
        .flat_map(|k| {
            let w = Complex64::from_polar(0.5, TAU * k as f64 / 200_000.0);
            [c(0.0, 1.0) + w, c(0.0, -1.0) + w]
        })
        .map(|z| (z * z + 1.0).norm())
        .fold(f64::INFINITY, f64::min);
    assert!((oracle - 0.75).abs() < 1e-6);
    assert!(cert.delta <= oracle + 1e-12);
    assert!(cert.delta >= 0.75 * (1.0 - 2e-3));
    assert_eq!(cert.components.len(), 2);
}

#[test]
fn delta_for_monomial_pencil() {
    let eps = 0.3;
    let cert = delta_bound(&pencil(0.0, 0.0), eps).unwrap();
    assert!(cert.delta <= eps * eps + 1e-12);
    assert!(cert.delta >= eps * eps * (1.0 - 2e-3));
    assert_eq!(cert.components.len(), 1);
    assert_eq!(cert.components[0].root_count, 2);
}

#[test]
fn delta_rejects_bad_epsilon() {
    assert!(matches!(delta_bound(&pencil(0.0, 1.0), 0.0), Err(SpectraError::InvalidEpsilon(_))));
}

#[test]
fn delta_survives_monte_carlo_perturbations() {
    let mut r = rng(9);
    let t = linalg::random_hermitian(6, &mut r);
    let p = compress(&t, &random_subspace(6, 3, &mut r)).unwrap();
    let cert = delta_bound(&p, 0.1).unwrap();
    assert!(cert.delta > 0.0);
    let base = spec2(&p).unwrap();
    for _ in 0..50 {
        let d = linalg::random_hermitian(3, &mut r);
        let d = d.scale(0.5 * cert.delta / d.norm().unwrap());
        let q = QuadraticPencil::general(p.b.clone(), p.m.add(&d).unwrap()).unwrap();
        let roots = spectra::spec2_raw(&q).unwrap();
        assert!(spectra::directed(&roots, base.points()) <= 0.1);
        assert!(cert.preserves(&roots));
    }
}

#[test]
fn spectrum_json_shape() {
    let s = spec2(&pencil(0.0, 1.0)).unwrap();
    let v = serde_json::to_value(&s).unwrap();
    let text = v.to_string();
    assert!(text.contains("\"re\"") && text.contains("\"im\""));
    let q = serde_json::to_value(q_region(&IntervalUnion::new(vec![(-1.0, 0.0), (1.0, 2.0)]).unwrap())).unwrap();
    assert!(q.get("outer").is_some() && q.get("gaps").is_some());
}

#[test]
fn symmetrize_pairs_points() {
    let (pts, residual) = spectra::symmetrize(&[c(1.0, 1.0), c(1.0 + 1e-12, -1.0), c(2.0, 1e-13)]);
    assert!(residual < 1e-11);
    assert_eq!(pts.len(), 3);
}

#[test]
fn interval_distance_matches_grid() {
    let pts = [c(0.0, 0.0), c(0.5, 0.1), c(1.0, 0.0)];
    let d = spectra::hausdorff_to_interval(&pts, 0.0, 1.0).unwrap();
    assert!((d - 0.26).abs() < 1e-12);
    let mut r = rng(10);
    for _ in 0..10 {
        let pts: Vec<Complex64> = (0..6).map(|_| c(r.random_range(-1.0..2.0), r.random_range(-0.5..0.5))).collect();
        let grid: Vec<Complex64> = (0..=20_000).map(|k| c(k as f64 / 20_000.0, 0.0)).collect();
        let oracle = hausdorff(&pts, &grid);
        let d = spectra::hausdorff_to_interval(&pts, 0.0, 1.0).unwrap();
        assert!((d - oracle).abs() < 1e-4);
    }
    assert!((spectra::density_radius(&[0.0, 0.5, 1.0], 0.0, 1.0) - 0.25).abs() < 1e-12);
    assert!((spectra::density_radius(&[0.2], 0.0, 1.0) - 0.8).abs() < 1e-12);
}

#[test]
fn subspace_rejects_non_orthonormal_basis() {
    let m = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    assert!(Subspace::from_orthonormal(m).is_err());
    assert!(Subspace::from_orthonormal(ComplexMatrix::identity(3).block(0, 0, 2, 3)).is_err());
}

