use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::rng::seeded;

fn random_matrix(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = seeded(seed);
    DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0))
}

fn random_vec(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeded(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn condition_number(r: &DMatrix<f64>) -> f64 {
    let s = r.clone().singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

fn both(r: &DMatrix<f64>, y: &[f64], tol: f64) -> [LeastSquaresSolution; 2] {
    [tsvd_solve(r, y, tol).unwrap(), cod_solve(r, y, tol).unwrap()]
}

#[test]
fn identity_returns_rhs() {
    let r = DMatrix::identity(3, 3);
    let y = [1.5, -2.0, 0.25];
    for sol in both(&r, &y, 1e-12) {
        assert_eq!(sol.effective_rank, 3);
        assert!(max_diff(&sol.wtilde, &y) < 1e-15);
        assert!(sol.residual_norm < 1e-15);
    }
}

#[test]
fn underdetermined_row_gives_minimum_norm() {
    let r = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
    for sol in both(&r, &[2.0], 1e-12) {
        assert_eq!(sol.effective_rank, 1);
        assert!(max_diff(&sol.wtilde, &[1.0, 1.0]) < 1e-15, "{:?}", sol.wtilde);
    }
}

#[test]
fn tall_system_matches_normal_equations() {
    let r = random_matrix(40, 20, 11);
    let y = random_vec(40, 12);
    let gram = r.transpose() * &r;
    let rhs = r.transpose() * DMatrix::from_column_slice(40, 1, &y);
    let oracle = gram.cholesky().unwrap().solve(&rhs);
    for sol in both(&r, &y, 1e-12) {
        assert_eq!(sol.effective_rank, 20);
        assert!(max_diff(&sol.wtilde, oracle.as_slice()) < 1e-9);
    }
}

#[test]
fn square_full_rank_matches_direct_solve() {
    let r = random_matrix(12, 12, 5);
    let y = random_vec(12, 6);
    let direct = r.clone().lu().solve(&DMatrix::from_column_slice(12, 1, &y)).unwrap();
    let sol = cod_solve(&r, &y, 1e-15).unwrap();
    assert_eq!(sol.effective_rank, 12);
    assert!(max_diff(&sol.wtilde, direct.as_slice()) < 1e-10);
}

#[test]
fn rank_deficient_cod_matches_tsvd() {
    let r = random_matrix(60, 25, 21) * random_matrix(25, 40, 22);
    let y = random_vec(60, 23);
    let tol = 1e-8;
    let svd = tsvd_solve(&r, &y, tol).unwrap();
    let cod = cod_solve_with(&r, &y, tol, RankRule::Absolute).unwrap();
    assert_eq!(svd.effective_rank, 25);
    assert_eq!(cod.effective_rank, 25);
    assert!((svd.residual_norm - cod.residual_norm).abs() <= 1e-8 * svd.residual_norm.max(1.0));
    assert!((norm(&svd.wtilde) - norm(&cod.wtilde)).abs() <= 1e-8 * norm(&svd.wtilde));
    assert!(max_diff(&svd.wtilde, &cod.wtilde) < 1e-8);
}

#[test]
fn residual_norm_is_recomputed_independently() {
    let r = random_matrix(30, 10, 3);
    let y = random_vec(30, 4);
    for sol in both(&r, &y, 1e-12) {
        let w = DMatrix::from_column_slice(10, 1, &sol.wtilde);
        let res = (&r * w - DMatrix::from_column_slice(30, 1, &y)).norm();
        assert!((res - sol.residual_norm).abs() <= 1e-12 * res);
    }
}

#[test]
fn nonpositive_tolerance_is_rejected() {
    let r = DMatrix::identity(2, 2);
    for tol in [0.0, -1.0, f64::NAN, f64::INFINITY] {
        assert!(tsvd_solve(&r, &[1.0, 1.0], tol).is_err());
        assert!(cod_solve(&r, &[1.0, 1.0], tol).is_err());
        assert!(rrqr_decompose(&r, tol).is_err());
    }
}

#[test]
fn mismatched_rhs_is_rejected() {
    let r = DMatrix::identity(3, 3);
    assert!(tsvd_solve(&r, &[1.0, 2.0], 1e-12).is_err());
    assert!(cod_solve(&r, &[1.0, f64::NAN, 2.0], 1e-12).is_err());
}

#[test]
fn everything_truncated_gives_flagged_zero_solution() {
    let r = DMatrix::from_row_slice(2, 2, &[1e-3, 0.0, 0.0, 1e-4]);
    let svd = tsvd_solve(&r, &[1.0, 1.0], 1.0).unwrap();
    let cod = cod_solve_with(&r, &[1.0, 1.0], 1.0, RankRule::Absolute).unwrap();
    for sol in [svd, cod] {
        assert!(sol.is_rank_zero());
        assert_eq!(sol.wtilde, vec![0.0, 0.0]);
        assert!((sol.residual_norm - 2f64.sqrt()).abs() < 1e-15);
    }
    let zero = DMatrix::zeros(3, 2);
    assert!(cod_solve(&zero, &[1.0, 2.0, 3.0], 1e-12).unwrap().is_rank_zero());
}

#[test]
fn diagonal_rrqr_reconstructs() {
    let r = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 2.0, 1.0]));
    let d = rrqr_decompose(&r, 1e-12).unwrap();
    assert_eq!(d.rank, 3);
    let diag: Vec<f64> = (0..3).map(|i| d.t[(i, i)].abs()).collect();
    assert!(max_diff(&diag, &[3.0, 2.0, 1.0]) < 1e-15);
    let back = &d.q * &d.t * d.permutation_matrix().transpose();
    assert!((back - r).amax() <= 1e-13);
}

#[test]
fn outer_product_has_rank_one() {
    let u = nalgebra::DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0, 1.25]);
    let v = nalgebra::DVector::from_vec(vec![0.3, 1.0, -0.7, 2.0]);
    let r = &u * v.transpose();
    let d = rrqr_decompose(&r, 1e-12).unwrap();
    assert_eq!(d.rank, 1);
    assert!(d.t.rows(1, d.t.nrows() - 1).iter().all(|&x| x == 0.0));
}

#[test]
fn duplicated_column_drops_one_rank() {
    let n = 6;
    let base = random_matrix(15, n, 31);
    let mut r = DMatrix::zeros(15, n + 1);
    r.columns_mut(0, n).copy_from(&base);
    r.set_column(n, &base.column(2));
    let tol = 1e-10;
    let d = rrqr_decompose(&r, tol).unwrap();
    let s = r.clone().singular_values();
    let svd_rank = s.iter().filter(|&&x| x > tol * s.max()).count();
    assert_eq!(d.rank, n);
    assert_eq!(svd_rank, n);
}

#[test]
fn pivoted_diagonal_is_non_increasing() {
    for seed in 0..10 {
        let r = random_matrix(30, 18, 100 + seed);
        let diag = PivotedQr::new(&r).diagonal();
        for w in diag.windows(2) {
            assert!(w[1].abs() <= w[0].abs() * (1.0 + 1e-12));
        }
    }
}

#[test]
fn q_factors_are_orthonormal() {
    for (m, n, seed) in [(30, 10, 1), (10, 30, 2), (25, 25, 3)] {
        let d = rrqr_decompose(&random_matrix(m, n, seed), 1e-14).unwrap();
        let k = d.q.ncols();
        let gram = d.q.transpose() * &d.q;
        assert!((gram - DMatrix::<f64>::identity(k, k)).amax() <= 1e-13);
    }
}

#[test]
fn default_tolerance_rule() {
    assert!((default_tolerance_from_norm(1.0, 100) - 2.220446049250313e-17).abs() < 1e-30);
    assert_eq!(default_tolerance_from_norm(2.0, 1000), 4.440892098500626e-16);
    assert_eq!(default_tolerance_from_norm(1.0, 0), 0.0);
    let r = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0]));
    assert_eq!(default_tolerance(&r, 1000), ulp(2.0));
}

#[test]
fn ulp_spacing() {
    assert_eq!(ulp(1.0), f64::EPSILON);
    assert_eq!(ulp(1.5), f64::EPSILON);
    assert_eq!(ulp(2.0), 2.0 * f64::EPSILON);
    assert_eq!(ulp(-0.75), f64::EPSILON / 2.0);
    assert_eq!(ulp(0.0), f64::from_bits(1));
    for x in [0.3f64, 7.0, 1e10, 3e-200] {
        let next = f64::from_bits(x.to_bits() + 1);
        assert_eq!(ulp(x), next - x);
    }
}

#[test]
fn spectral_norm_matches_svd() {
    let r = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
    assert!((spectral_norm(&r) - 2f64.sqrt()).abs() < 1e-12);
    for seed in 0..5 {
        let r = random_matrix(40, 15, 50 + seed);
        let s = r.clone().singular_values().max();
        assert!((spectral_norm(&r) - s).abs() <= 1e-10 * s);
    }
}

#[test]
fn one_factorization_serves_many_tolerances() {
    let r = random_matrix(50, 30, 7);
    let y = random_vec(50, 8);
    let cod = CodFactorization::new(&r);
    for tol in [1e-2, 1e-6, 1e-12] {
        let (w, rank) = cod.solve(&y, tol, RankRule::Relative);
        let fresh = cod_solve(&r, &y, tol).unwrap();
        assert_eq!(rank, fresh.effective_rank);
        assert_eq!(w, fresh.wtilde);
    }
}

#[test]
fn random_systems_agree_between_routes() {
    let mut checked = 0;
    let mut seed = 1000;
    while checked < 100 {
        seed += 1;
        let mut rng = seeded(seed);
        let n = rng.gen_range(1..=50);
        let m = rng.gen_range(n..=50);
        let r = random_matrix(m, n, seed ^ 0xabc);
        if condition_number(&r) >= 1e6 {
            continue;
        }
        let y = random_vec(m, seed ^ 0xdef);
        let [svd, cod] = both(&r, &y, 1e-13);
        // Square systems have a roundoff-sized residual, hence the floor.
        let scale = svd.residual_norm.max(cod.residual_norm);
        assert!(
            (svd.residual_norm - cod.residual_norm).abs() <= 1e-8 * scale + 1e-12 * norm(&y),
            "seed {seed}: {} vs {}",
            svd.residual_norm,
            cod.residual_norm
        );
        checked += 1;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn residual_is_stationary(seed in 0u64..10_000, m in 8usize..40, n in 2usize..8) {
        let r = random_matrix(m, n, seed);
        let y = random_vec(m, seed + 1);
        let mut rng = seeded(seed + 2);
        for sol in both(&r, &y, 1e-13) {
            for _ in 0..50 {
                let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let dn = norm(&dir);
                let w: Vec<f64> = sol.wtilde.iter().zip(&dir).map(|(a, d)| a + 1e-6 * d / dn).collect();
                prop_assert!(residual_norm(&r, &w, &y) >= sol.residual_norm - 1e-12);
            }
        }
    }

    #[test]
    fn solution_has_minimum_norm(seed in 0u64..10_000, rank in 1usize..6) {
        let (m, n) = (20, 10);
        let r = random_matrix(m, rank, seed) * random_matrix(rank, n, seed + 1);
        let y = random_vec(m, seed + 2);
        let tol = 1e-9;
        let svd = r.clone().svd(false, true);
        let vt = svd.v_t.unwrap();
        let null: Vec<usize> = (0..n).filter(|&i| i >= svd.singular_values.len() || svd.singular_values[i] <= tol).collect();
        prop_assert_eq!(null.len(), n - rank);
        let cod = cod_solve_with(&r, &y, tol, RankRule::Absolute).unwrap();
        let svd_sol = tsvd_solve(&r, &y, tol).unwrap();
        for sol in [cod, svd_sol] {
            let wn = norm(&sol.wtilde);
            for &i in &null {
                let proj: f64 = vt.row(i).iter().zip(&sol.wtilde).map(|(a, b)| a * b).sum();
                prop_assert!(proj.abs() <= 1e-10 * wn.max(1.0));
            }
        }
    }
}
