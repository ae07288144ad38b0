mod common;

use common::{c, char_poly, hausdorff, poly_roots, rng, to_rows};
use num_complex::Complex64;
use spec2lab::linalg::{self, ComplexMatrix, HermitianMatrix, LinalgError};

fn real(rows: &[&[f64]]) -> ComplexMatrix {
    let n = rows.len();
    ComplexMatrix::from_fn(n, rows[0].len(), |i, j| c(rows[i][j], 0.0)).unwrap()
}

#[test]
fn pauli_x_eigenvalues() {
    let h = HermitianMatrix::new(real(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
    let e = linalg::hermitian_eig(&h).unwrap();
    assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
    assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
}

#[test]
fn identity_eigenvalues_and_unitary_vectors() {
    let e = linalg::hermitian_eig(&HermitianMatrix::identity(4)).unwrap();
    assert!(e.eigenvalues.iter().all(|&x| (x - 1.0).abs() < 1e-14));
    assert!(e.orthogonality_residual() < 1e-12);
}

#[test]
fn seeded_reconstruction() {
    let h = linalg::random_hermitian(6, &mut rng(42));
    let e = linalg::hermitian_eig(&h).unwrap();
    assert!(e.reconstruction_residual(&h) < 1e-10);
    assert!(e.orthogonality_residual() < 1e-10);
    assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn hermitian_eig_residual_against_columns() {
    let mut r = rng(7);
    for n in [1, 3, 9, 20] {
        let h = linalg::random_hermitian(n, &mut r);
        let e = linalg::hermitian_eig(&h).unwrap();
        let hu = h.matrix().matmul(&e.vectors).unwrap();
        let ul = ComplexMatrix::from_fn(n, n, |i, j| e.vectors.get(i, j) * e.eigenvalues[j]).unwrap();
        assert!(hu.sub(&ul).unwrap().norm_fro() <= 1e-10 * h.norm_fro().max(1.0));
    }
}

#[test]
fn companion_of_x_squared_plus_one() {
    let a = real(&[&[0.0, 1.0], &[-1.0, 0.0]]);
    let ev = linalg::general_eigenvalues(&a).unwrap();
    assert!(hausdorff(&ev, &[c(0.0, 1.0), c(0.0, -1.0)]) < 1e-14);
}

#[test]
fn lower_triangular_spectrum_is_diagonal() {
    let a = ComplexMatrix::from_fn(4, 4, |i, j| if j > i { c(0.0, 0.0) } else { c(i as f64 + 1.0, j as f64 - i as f64) })
        .unwrap();
    let ev = linalg::general_eigenvalues(&a).unwrap();
    let diag: Vec<Complex64> = (0..4).map(|i| a.get(i, i)).collect();
    assert!(hausdorff(&ev, &diag) < 1e-12);
}

#[test]
fn general_eigenvalues_match_characteristic_polynomial() {
    let mut r = rng(5);
    for _ in 0..5 {
        let a = linalg::random_matrix(5, 5, &mut r);
        let ev = linalg::general_eigenvalues(&a).unwrap();
        let oracle = poly_roots(&char_poly(&to_rows(&a)));
        assert!(hausdorff(&ev, &oracle) < 1e-6);
        let trace: Complex64 = ev.iter().sum();
        assert!((trace - a.trace()).norm() <= 1e-8 * 5.0 * a.norm_2().unwrap());
    }
}

#[test]
fn general_eigenvalues_agree_with_hermitian_solver() {
    let h = linalg::random_hermitian(8, &mut rng(3));
    let g = linalg::general_eigenvalues(h.matrix()).unwrap();
    let e: Vec<Complex64> = linalg::hermitian_eigenvalues(&h).unwrap().iter().map(|&x| c(x, 0.0)).collect();
    assert!(hausdorff(&g, &e) < 1e-8);
}

#[test]
fn psd_sqrt_examples() {
    let i = HermitianMatrix::identity(3);
    assert!(linalg::psd_sqrt(&i).unwrap().sub(&i).unwrap().norm_fro() < 1e-14);
    let d = HermitianMatrix::from_real_diagonal(&[4.0, 9.0]);
    let r = linalg::psd_sqrt(&d).unwrap();
    assert!(r.sub(&HermitianMatrix::from_real_diagonal(&[2.0, 3.0])).unwrap().norm_fro() < 1e-14);
}

#[test]
fn psd_sqrt_of_gram_matrix() {
    let g = linalg::random_matrix(5, 5, &mut rng(11));
    let m = HermitianMatrix::symmetrized(&g.adjoint_matmul(&g).unwrap());
    let r = linalg::psd_sqrt(&m).unwrap();
    assert!(r.square().sub(&m).unwrap().norm_fro() < 1e-8 * m.norm_fro().max(1.0));
    assert!(linalg::hermitian_eigenvalues(&r).unwrap()[0] >= -1e-12);
}

#[test]
fn psd_sqrt_rejects_negative_definite() {
    let m = HermitianMatrix::from_real_diagonal(&[1.0, -1e-3]);
    assert!(matches!(linalg::psd_sqrt(&m), Err(LinalgError::NotPositiveSemidefinite { .. })));
    let tiny = HermitianMatrix::from_real_diagonal(&[1.0, -1e-13]);
    assert!(linalg::psd_sqrt(&tiny).is_ok());
}

#[test]
fn psd_sqrt_scales_linearly() {
    let g = linalg::random_matrix(4, 4, &mut rng(12));
    let m = HermitianMatrix::symmetrized(&g.adjoint_matmul(&g).unwrap());
    let r = linalg::psd_sqrt(&m).unwrap();
    let r3 = linalg::psd_sqrt(&m.scale(9.0)).unwrap();
    assert!(r3.sub(&r.scale(3.0)).unwrap().norm_fro() <= 1e-10 * r3.norm_fro());
}

#[test]
fn smallest_singular_value_examples() {
    let u = linalg::random_unitary(4, &mut rng(1));
    assert!((linalg::smallest_singular_value(&u).unwrap() - 1.0).abs() < 1e-12);
    let z = real(&[&[1.0, 2.0], &[0.0, 0.0]]);
    assert!(linalg::smallest_singular_value(&z).unwrap() < 1e-14);
    let d = real(&[&[3.0, 0.0], &[0.0, 5.0]]);
    assert!((linalg::smallest_singular_value(&d).unwrap() - 3.0).abs() < 1e-14);
    assert!(matches!(
        linalg::smallest_singular_value(&real(&[&[1.0, 2.0]])),
        Err(LinalgError::NotSquare { .. })
    ));
}

#[test]
fn smallest_singular_value_zero_iff_zero_eigenvalue() {
    let mut r = rng(21);
    for n in 2..=8 {
        let a = linalg::random_matrix(n, n, &mut r);
        let ev = linalg::general_eigenvalues(&a).unwrap();
        let singular = a.shift_diagonal(-ev[0]);
        assert!(linalg::smallest_singular_value(&singular).unwrap() < 1e-8 * a.norm_2().unwrap());
        let min_ev = ev.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        assert_eq!(linalg::smallest_singular_value(&a).unwrap() < 1e-8, min_ev < 1e-8);
    }
}

#[test]
fn complete_unitary_examples() {
    let e1 = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let u = linalg::complete_unitary(std::slice::from_ref(&e1), 3).unwrap();
    assert_eq!(u.column(0), e1);
    assert!(linalg::gram_residual(&u) < 1e-12);

    let full = linalg::random_unitary(3, &mut rng(4));
    let back = linalg::complete_unitary(&full.columns(), 3).unwrap();
    assert_eq!(back, full);

    let two = linalg::random_unitary(5, &mut rng(8)).columns()[..2].to_vec();
    let u = linalg::complete_unitary(&two, 5).unwrap();
    assert!(linalg::gram_residual(&u) < 1e-10);
    assert_eq!(u.column(1), two[1]);
}

#[test]
fn complete_unitary_rejects_non_orthonormal() {
    let v = vec![c(1.0, 0.0), c(1.0, 0.0)];
    assert!(matches!(linalg::complete_unitary(&[v], 2), Err(LinalgError::NotOrthonormal { .. })));
}

#[test]
fn spectrum_is_unitarily_invariant() {
    let mut r = rng(9);
    let h = linalg::random_hermitian(7, &mut r);
    let v = linalg::random_unitary(7, &mut r);
    let a = linalg::hermitian_eigenvalues(&h).unwrap();
    let b = linalg::hermitian_eigenvalues(&h.congruence(&v).unwrap()).unwrap();
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9));
}

#[test]
fn hermitian_construction_symmetrizes() {
    let mut m = linalg::random_hermitian(3, &mut rng(2)).into_matrix().row_major();
    m[1] += c(1e-14, 0.0);
    let h = HermitianMatrix::new(ComplexMatrix::new(3, 3, m).unwrap()).unwrap();
    assert_eq!(h.get(0, 1), h.get(1, 0).conj());
    let bad = real(&[&[0.0, 1.0], &[0.0, 0.0]]);
    assert!(matches!(HermitianMatrix::new(bad), Err(LinalgError::NotHermitian { .. })));
}

#[test]
fn matrices_reject_non_finite_and_empty() {
    assert!(matches!(ComplexMatrix::new(0, 0, vec![]), Err(LinalgError::Empty)));
    assert!(matches!(
        ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]),
        Err(LinalgError::NonFinite { .. })
    ));
}

#[test]
fn nullspace_of_rank_one_rows() {
    let a = real(&[&[1.0, 1.0, 0.0]]);
    let null = linalg::nullspace(Some(&a), 3, 1e-12).unwrap();
    assert_eq!(null.len(), 2);
    for v in &null {
        assert!((v[0] + v[1]).norm() < 1e-12);
    }
    assert_eq!(linalg::nullspace(None, 4, 1e-12).unwrap().len(), 4);
}

#[test]
fn matrix_json_round_trip() {
    let h = linalg::random_hermitian(3, &mut rng(31));
    let text = serde_json::to_string(&h).unwrap();
    assert!(text.contains("\"dim\":3"));
    let back: HermitianMatrix = serde_json::from_str(&text).unwrap();
    assert_eq!(back, h);
}

#[test]
fn symmetric_csv_import() {
    let text = "1,2\n2,-3\n";
    let h = spec2lab::io::read_symmetric_csv(text.as_bytes(), "inline").unwrap();
    assert_eq!(h.get(0, 1), c(2.0, 0.0));
    assert_eq!(h.get(1, 1), c(-3.0, 0.0));
    assert!(spec2lab::io::read_symmetric_csv("1,2\n3,4\n".as_bytes(), "inline").is_err());
}
