use ffemu_core::linalg::{generalized_eig, mac, SymmetricMatrix};
use ffemu_core::model::StructuralModel;
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

fn to_dmatrix(m: &SymmetricMatrix) -> DMatrix<f64> {
    let n = m.dim();
    DMatrix::from_fn(n, n, |i, j| m.get(i, j))
}

/// Eigenvalues of `M^-1/2 K M^-1/2` through nalgebra's dense solver.
fn oracle_eigenvalues(k: &SymmetricMatrix, m: &SymmetricMatrix) -> Vec<f64> {
    let km = to_dmatrix(k);
    let mm = to_dmatrix(m);
    let l = mm.cholesky().expect("spd mass").l();
    let linv = l.try_inverse().unwrap();
    let a = &linv * km * linv.transpose();
    let a = (&a + a.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn spd_from_factor(n: usize, entries: &[f64], shift: f64) -> SymmetricMatrix {
    let b = DMatrix::from_row_slice(n, n, &entries[..n * n]);
    let a = &b * b.transpose() + DMatrix::identity(n, n) * shift;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (a[(i, j)] + a[(j, i)])).collect())
        .collect();
    SymmetricMatrix::from_rows(&rows).unwrap()
}

#[test]
fn default_model_matches_dense_oracle() {
    let model = StructuralModel::default_five_dof();
    for theta in [
        [4000.0, 2200.0, 2120.0, 2600.0, 2400.0],
        [3400.0, 1900.0, 1700.0, 1900.0, 2150.0],
        [4600.0, 2500.0, 2370.0, 3300.0, 2650.0],
    ] {
        let (k, m) = model.assemble(&theta).unwrap();
        let ours = generalized_eig(&k, &m).unwrap();
        let oracle = oracle_eigenvalues(&k, &m);
        for (a, b) in ours.eigenvalues().iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-10 * b.abs(), "{a} vs {b}");
        }
    }
}

#[test]
fn full_mass_matches_dense_oracle() {
    let k = SymmetricMatrix::from_rows(&[
        vec![6.0, -2.0, 0.5],
        vec![-2.0, 5.0, -1.0],
        vec![0.5, -1.0, 4.0],
    ])
    .unwrap();
    let m = SymmetricMatrix::from_rows(&[
        vec![2.0, 0.3, 0.0],
        vec![0.3, 1.5, 0.2],
        vec![0.0, 0.2, 1.0],
    ])
    .unwrap();
    let ours = generalized_eig(&k, &m).unwrap();
    let oracle = oracle_eigenvalues(&k, &m);
    for (a, b) in ours.eigenvalues().iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-11, "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residual_and_orthogonality_on_random_pairs(
        n in 1usize..7,
        kb in prop::collection::vec(-1.0f64..1.0, 36),
        mb in prop::collection::vec(-1.0f64..1.0, 36),
    ) {
        let k = spd_from_factor(n, &kb, 0.1);
        let m = spd_from_factor(n, &mb, 0.5);
        let sol = generalized_eig(&k, &m).unwrap();
        let scale = k.frobenius_norm().max(1.0);
        for j in 0..n {
            let phi = sol.eigenvector(j);
            let kp = k.mul_vec(phi);
            let mp = m.mul_vec(phi);
            let lambda = sol.eigenvalue(j);
            let res = kp.iter().zip(&mp).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
            prop_assert!(res <= 1e-9 * scale * (1.0 + lambda.abs()), "residual {res}");
            let norm = phi.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
        for w in sol.eigenvalues().windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        let oracle = oracle_eigenvalues(&k, &m);
        for (a, b) in sol.eigenvalues().iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn identity_mass_preserves_trace(
        n in 1usize..7,
        kb in prop::collection::vec(-2.0f64..2.0, 36),
    ) {
        let k = spd_from_factor(n, &kb, 0.0);
        let m = SymmetricMatrix::identity(n).unwrap();
        let sol = generalized_eig(&k, &m).unwrap();
        let sum: f64 = sol.eigenvalues().iter().sum();
        prop_assert!((sum - k.trace()).abs() <= 1e-10 * (1.0 + k.trace().abs()));
    }

    #[test]
    fn mac_is_scale_invariant(
        a in prop::collection::vec(-1.0f64..1.0, 4),
        b in prop::collection::vec(-1.0f64..1.0, 4),
        s in prop::sample::select(vec![-3.0, -0.5, 0.25, 7.0]),
    ) {
        prop_assume!(a.iter().any(|v| v.abs() > 1e-3) && b.iter().any(|v| v.abs() > 1e-3));
        let scaled: Vec<f64> = b.iter().map(|v| v * s).collect();
        let m1 = mac(&a, &b).unwrap();
        let m2 = mac(&a, &scaled).unwrap();
        prop_assert!((m1 - m2).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&m1));
    }

    #[test]
    fn stiffness_is_linear_and_eigenvalues_monotone(
        t1 in prop::collection::vec(1000.0f64..5000.0, 5),
        dt in prop::collection::vec(0.0f64..500.0, 5),
    ) {
        let model = StructuralModel::default_five_dof();
        let t2: Vec<f64> = t1.iter().zip(&dt).map(|(a, d)| a + d).collect();
        let k1 = model.stiffness_matrix(&t1).unwrap();
        let k2 = model.stiffness_matrix(&t2).unwrap();
        let mid: Vec<f64> = t1.iter().zip(&t2).map(|(a, b)| 0.5 * (a + b)).collect();
        let km = model.stiffness_matrix(&mid).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let lin = 0.5 * (k1.get(i, j) + k2.get(i, j));
                prop_assert!((km.get(i, j) - lin).abs() < 1e-9);
            }
        }
        let e1 = model.modal(&t1).unwrap();
        let e2 = model.modal(&t2).unwrap();
        for (a, b) in e1.eigenvalues().iter().zip(e2.eigenvalues()) {
            prop_assert!(*b >= *a * (1.0 - 1e-12));
        }
    }
}
