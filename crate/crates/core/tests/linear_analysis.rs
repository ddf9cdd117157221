use faer::linalg::solvers::Solve;
use faer::Mat;
use fkp_core::bifurcation::{doubling_amplitudes, BranchOptions, BranchSolver};
use fkp_core::ground_state::{kdv_soliton, petviashvili_solve, PetviashviliOptions};
use fkp_core::linear_analysis::{build_l, quadruple_symmetry_defect, subsample, symmetric_spectrum, LinearizedOperators};
use fkp_core::spectral::{apply_symbol, Grid1D, RealField1D, SymbolSpec};
use fkp_core::{FkpParams, Sigma};

fn kdv(l: f64, n: usize) -> (RealField1D<f64>, FkpParams<f64>) {
    let grid = Grid1D::new(l, n).unwrap();
    (RealField1D::from_fn(grid, |x| kdv_soliton(2.0, x)).unwrap(), FkpParams::new(2.0, Sigma::KpI, 2.0).unwrap())
}

fn fractional(n: usize) -> (RealField1D<f64>, FkpParams<f64>) {
    let params = FkpParams::new(1.5, Sigma::KpI, 2.0).unwrap();
    let fine = petviashvili_solve(params, Grid1D::new(100.0, 4096).unwrap(), &PetviashviliOptions::default()).unwrap();
    (subsample(&fine.profile, n).unwrap(), params)
}

/// Shifted inverse iteration for the eigenvalue of `m` nearest `shift`.
fn inverse_iteration(m: &Mat<f64>, shift: f64) -> f64 {
    let n = m.nrows();
    let shifted = Mat::from_fn(n, n, |i, j| m[(i, j)] - if i == j { shift } else { 0.0 });
    let lu = shifted.partial_piv_lu();
    let mut v = Mat::from_fn(n, 1, |i, _| 1.0 + (i as f64 * 0.37).sin());
    let mut mu = 0.0;
    for _ in 0..200 {
        let norm = (0..n).map(|i| v[(i, 0)].powi(2)).sum::<f64>().sqrt();
        for i in 0..n {
            v[(i, 0)] /= norm;
        }
        let mv = m * &v;
        mu = (0..n).map(|i| v[(i, 0)] * mv[(i, 0)]).sum();
        lu.solve_in_place(v.as_mut());
    }
    mu
}

#[test]
fn kdv_negative_eigenvalue_matches_closed_form() {
    // lambda = -3 c^2 / 16 for the KdV soliton, so omega0 = sqrt(3) c / 4
    let (q, p) = kdv(30.0, 256);
    let ops = LinearizedOperators::new(&q, &p).unwrap();
    let spec = ops.l_spectrum(false).unwrap();
    assert_eq!(spec.negative_count, 1);
    assert!((spec.lambda_min + 0.75).abs() < 1e-9, "{}", spec.lambda_min);
    assert!((spec.omega0.unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-9);
}

#[test]
fn dense_and_inverse_iteration_agree() {
    let (q, p) = fractional(512);
    let l = build_l(&q, &p, 0.0).unwrap();
    let dense = symmetric_spectrum(&l, false).unwrap().lambda_min;
    let iterated = inverse_iteration(&l.matrix, -2.0);
    assert!((dense - iterated).abs() < 1e-9 * dense.abs(), "{dense} {iterated}");
}

#[test]
fn mc_kernel_is_the_translation_mode() {
    let (q, p) = kdv(30.0, 256);
    let ops = LinearizedOperators::new(&q, &p).unwrap();
    let spec = ops.mc_spectrum(true).unwrap();
    assert_eq!(spec.negative_count, 1);
    let v = spec.eigenvector_near(0.0).unwrap();
    let dq = apply_symbol(&q, &SymbolSpec::Dx).unwrap();
    let dot: f64 = v.iter().zip(dq.samples()).map(|(a, b)| a * b).sum();
    let norm = dq.samples().iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!(dot.abs() / norm >= 0.999);
    let kw = ops.kernel_witnesses().unwrap();
    assert!(kw.constant <= 1e-10);
    assert!(kw.profile <= 1e-6);
    assert!(kw.derivative <= 1e-6);
}

#[test]
fn growth_rates_and_certificate() {
    let (q, p) = kdv(30.0, 256);
    let ops = LinearizedOperators::new(&q, &p).unwrap();
    let omega0 = ops.l_spectrum(false).unwrap().omega0.unwrap();
    let ks = [0.3 * omega0, 0.6 * omega0, 1.05 * omega0, 1.5 * omega0];
    let curve = ops.growth_rate_curve(&ks).unwrap();
    assert!(curve.sigma_max[0] > 0.0 && curve.sigma_max[1] > 0.0);
    assert!(curve.sigma_max[2] <= 1e-6 && curve.sigma_max[3] <= 1e-6);
    for &k in &ks {
        assert!(quadruple_symmetry_defect(&ops.b_spectrum(k).unwrap()) <= 1e-6);
    }
    let cert = ops.certificate(&ks, 0.01).unwrap();
    assert!(cert.passes(), "{cert:?}");
    assert_eq!(curve, ops.growth_rate_curve(&ks).unwrap());
}

#[test]
fn fkp_ii_has_no_transverse_growth_rate() {
    let (q, _) = kdv(30.0, 64);
    let p = FkpParams::new(2.0, Sigma::KpII, 2.0).unwrap();
    assert!(LinearizedOperators::new(&q, &p).unwrap().growth_rate(0.3).is_err());
}

#[test]
fn branch_frequency_limit_and_truncation() {
    let (q, p) = kdv(25.0, 256);
    let coarse = BranchSolver::new(&q, &p, BranchOptions::default()).unwrap();
    let fine = BranchSolver::new(&q, &p, BranchOptions { modes: 16, ..Default::default() }).unwrap();
    let branch = coarse.continue_branch(&doubling_amplitudes(1e-4, 1e-2)).unwrap();
    assert!(branch.intercept_error().unwrap() <= 1e-3);
    for pt in &branch.points {
        assert!(pt.residual_sup <= 1e-10);
        assert!(coarse.direct_residual(pt).unwrap() <= 1e-8);
        assert!(pt.odd_defect() <= 1e-12);
    }
    let energies: Vec<f64> = branch.points.iter().map(|pt| coarse.transverse_energy(pt)).collect();
    assert!(energies.windows(2).all(|w| w[1] > w[0] && w[1] <= 10.0 * w[0]));
    let small = fine.newton_correct(&fine.predictor(1e-4)).unwrap();
    let rel = (small.omega - branch.points[0].omega).abs() / small.omega;
    assert!(rel <= 1e-6, "{rel}");
}

#[test]
fn newton_converges_quadratically() {
    let (q, p) = kdv(25.0, 256);
    let solver = BranchSolver::new(&q, &p, BranchOptions { modes: 4, ..Default::default() }).unwrap();
    let mut guess = solver.predictor(5e-3);
    guess.omega *= 1.01;
    let point = solver.newton_correct(&guess).unwrap();
    let h = &point.residual_history;
    assert!(h.len() >= 3);
    for w in h.windows(2) {
        if w[1] > 1e-12 {
            assert!(w[1] <= 50.0 * w[0] * w[0].max(1e-3), "{h:?}");
        }
    }
}

#[test]
fn reconstructed_profile_is_even() {
    let (q, p) = kdv(25.0, 256);
    let solver = BranchSolver::new(&q, &p, BranchOptions { modes: 4, ..Default::default() }).unwrap();
    let point = solver.newton_correct(&solver.predictor(1e-2)).unwrap();
    let phi = solver.reconstruct(&point, 16).unwrap();
    let (nx, ny) = (phi.grid().nx(), phi.grid().ny());
    let mut worst = 0.0f64;
    for iy in 0..ny {
        for ix in 0..nx {
            worst = worst.max((phi.at(ix, iy) - phi.at((nx - ix) % nx, iy)).abs());
            worst = worst.max((phi.at(ix, iy) - phi.at(ix, (ny - iy) % ny)).abs());
        }
    }
    assert!(worst <= 1e-8, "{worst}");
}
