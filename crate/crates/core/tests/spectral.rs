use fkp_core::spectral::{
    apply_symbol, dft_forward, dft_inverse, gn_inequality_check, gn_random_suite, sobolev_seminorm_sq, Grid1D, RealField1D, SymbolSpec,
};
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// O(n^2) reference transform.
fn naive_dft(u: &[f64]) -> Vec<Complex<f64>> {
    let n = u.len();
    (0..n)
        .map(|k| {
            u.iter().enumerate().fold(Complex::new(0.0, 0.0), |acc, (j, &v)| {
                let phase = -std::f64::consts::TAU * (j * k % n) as f64 / n as f64;
                acc + Complex::from_polar(v, phase)
            })
        })
        .collect()
}

/// Zero-mean real field with random modes `1..=cutoff`.
fn band_limited(grid: Grid1D<f64>, cutoff: usize, rng: &mut ChaCha8Rng) -> RealField1D<f64> {
    let modes: Vec<(f64, f64, f64)> =
        (1..=cutoff).map(|m| (m as f64 * grid.dk(), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    RealField1D::from_fn(grid, |x| modes.iter().map(|(k, a, b)| a * (k * x).cos() + b * (k * x).sin()).sum()).unwrap()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

proptest! {
    #[test]
    fn dft_round_trip(samples in prop::collection::vec(-1e3f64..1e3, 64)) {
        let back = dft_inverse(&dft_forward(&samples).unwrap());
        let err = samples.iter().zip(&back).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        prop_assert!(err <= 1e-12 * sup(&samples).max(1e-300));
    }

    #[test]
    fn dft_matches_naive_sum(samples in prop::collection::vec(-10.0f64..10.0, 32)) {
        let fast = dft_forward(&samples).unwrap();
        let slow = naive_dft(&samples);
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn parseval(samples in prop::collection::vec(-5.0f64..5.0, 128), half_width in 1.0f64..50.0) {
        let grid = Grid1D::new(half_width, 128).unwrap();
        let field = RealField1D::new(grid, samples.clone()).unwrap();
        let physical: f64 = samples.iter().map(|v| v * v).sum::<f64>() * grid.dx();
        let spectral: f64 = field.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>() * grid.dx() / 128.0;
        prop_assert!((physical - spectral).abs() <= 1e-12 * physical.max(1e-300));
        prop_assert!((field.l2_norm_sq() - physical).abs() <= 1e-12 * physical.max(1e-300));
    }

    #[test]
    fn riesz_composition(seed in any::<u64>(), a in 0.34f64..1.0, b in 0.34f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = Grid1D::new(7.0, 64).unwrap();
        let u = band_limited(grid, 20, &mut rng);
        let ab = apply_symbol(&apply_symbol(&u, &SymbolSpec::Riesz(a)).unwrap(), &SymbolSpec::Riesz(b)).unwrap();
        let direct = apply_symbol(&u, &SymbolSpec::Riesz(a + b)).unwrap();
        let err = ab.samples().iter().zip(direct.samples()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        prop_assert!(err <= 1e-10 * direct.sup_norm());
    }

    #[test]
    fn shift_inverse(seed in any::<u64>(), shift in -20.0f64..20.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = Grid1D::new(5.0, 64).unwrap();
        let u = band_limited(grid, 31, &mut rng);
        let there = apply_symbol(&u, &SymbolSpec::ShiftX(shift)).unwrap();
        let back = apply_symbol(&there, &SymbolSpec::ShiftX(-shift)).unwrap();
        let err = u.samples().iter().zip(back.samples()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        prop_assert!(err <= 1e-12 * u.sup_norm());
    }
}

#[test]
fn gn_inequality_random_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let grid = Grid1D::new(10.0, 128).unwrap();
    for depth in 1..=3 {
        for _ in 0..100 {
            let u = band_limited(grid, 40, &mut rng);
            let a = rng.gen_range(0.2..1.5);
            let b = a + rng.gen_range(0.1..1.0);
            let eps = 10f64.powf(rng.gen_range(-2.0..0.5));
            let (lhs, rhs) = gn_inequality_check(&u, a, b, eps, depth).unwrap();
            assert!(lhs <= rhs, "depth {depth}: {lhs} > {rhs} (a={a}, b={b}, eps={eps})");
        }
    }
}

#[test]
fn gn_suite_at_the_dispersive_orders() {
    for alpha in [0.5, 1.0, 2.0] {
        for depth in 1..=3 {
            let report = gn_random_suite(11, 100, 1.0, 1.0 + alpha / 2.0, 0.1, depth).unwrap();
            assert_eq!(report.failures, 0, "alpha {alpha}, depth {depth}: {report:?}");
            assert!(report.worst_ratio > 0.0 && report.worst_ratio <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn sobolev_seminorm_of_single_mode() {
    let grid = Grid1D::new(std::f64::consts::PI, 32).unwrap();
    let u = RealField1D::from_fn(grid, |x| (4.0 * x).sin()).unwrap();
    // ||sin 4x||^2 = pi on [-pi, pi)
    let got = sobolev_seminorm_sq(&u, 1.5, 2.0);
    assert!((got - 4f64.powi(3) * std::f64::consts::PI).abs() < 1e-10);
}

#[test]
fn single_precision_round_trip() {
    let samples: Vec<f32> = (0..64).map(|j| ((j as f32) * 0.37).sin()).collect();
    let back = dft_inverse(&dft_forward(&samples).unwrap());
    let err = samples.iter().zip(&back).fold(0.0f32, |m, (a, b)| m.max((a - b).abs()));
    assert!(err < 1e-5);
}
