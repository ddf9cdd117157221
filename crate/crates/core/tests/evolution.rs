use fkp_core::evolution::{evolve, richardson_ratio, EvolutionState, EvolveOptions, RunStatus, Stepper};
use fkp_core::ground_state::kdv_soliton;
use fkp_core::spectral::{Grid2D, RealField2D};
use fkp_core::{FkpParams, Sigma};
use num_complex::Complex;

fn smooth_data(grid: Grid2D<f64>) -> RealField2D<f64> {
    RealField2D::from_fn(grid, |x, y| kdv_soliton(1.0, x) + 0.2 * x * (-x * x).exp() * y.cos()).unwrap()
}

#[test]
fn richardson_ratio_is_fourth_order() {
    let grid = Grid2D::from_extents(20.0, 128, std::f64::consts::PI, 16).unwrap();
    let params = FkpParams::new(2.0, Sigma::KpI, 1.0).unwrap();
    let ratio = richardson_ratio(&smooth_data(grid), params, 0.01, 50).unwrap();
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn fractional_richardson_ratio() {
    let grid = Grid2D::from_extents(20.0, 128, std::f64::consts::PI, 16).unwrap();
    let params = FkpParams::new(1.5, Sigma::KpII, 1.0).unwrap();
    let ratio = richardson_ratio(&smooth_data(grid), params, 0.01, 50).unwrap();
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn linear_flow_is_exact() {
    let grid = Grid2D::from_extents(10.0f64, 64, 5.0, 16).unwrap();
    let params = FkpParams::new(1.2, Sigma::KpI, 1.0).unwrap();
    let u0 = RealField2D::from_fn(grid, |x, y| x * (-x * x - 0.3 * y * y).exp()).unwrap();
    let mut state = EvolutionState::from_field(&u0, params, 0.0).unwrap();
    let start = state.coeffs().to_vec();
    let h = 0.01;
    let mut stepper = Stepper::new(params, grid, h, false).unwrap().linear_only();
    let steps = 137;
    for _ in 0..steps {
        stepper.step(&mut state).unwrap();
    }
    let t = steps as f64 * h;
    let symbol = stepper.symbol().values().to_vec();
    let scale = start.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    for ((c, c0), lam) in state.coeffs().iter().zip(&start).zip(&symbol) {
        let exact = c0 * (lam * Complex::new(t, 0.0)).exp();
        assert!((c - exact).norm() <= 1e-12 * scale, "{c} vs {exact}");
    }
}

#[test]
fn zero_data_stays_zero() {
    let grid = Grid2D::from_extents(10.0, 32, 10.0, 16).unwrap();
    let params = FkpParams::new(1.7, Sigma::KpI, 1.0).unwrap();
    let u0 = RealField2D::zeros(grid);
    let opts = EvolveOptions::new(0.01, 1.0).with_cadence(10);
    let out = evolve(&u0, params, &opts, &mut |obs| assert_eq!(obs.field.sup_norm(), 0.0)).unwrap();
    assert_eq!(out.status, RunStatus::Completed);
    assert!(out.final_state.coeffs().iter().all(|c| c.norm() == 0.0));
}

#[test]
fn scaling_symmetry() {
    // u_l(x, y, t) = l^alpha u(l x, l^((alpha+2)/2) y, l^(alpha+1) t)
    let alpha: f64 = 1.5;
    let l: f64 = 2.0;
    let params = FkpParams::new(alpha, Sigma::KpI, 1.0).unwrap();
    let grid = Grid2D::from_extents(16.0, 64, 8.0, 32).unwrap();
    let beta = (alpha + 2.0) / 2.0;
    let scaled_grid = Grid2D::from_extents(16.0 / l, 64, 8.0 / l.powf(beta), 32).unwrap();
    let profile = |x: f64, y: f64| 2.0 * (-(x * x) / 4.0 - y * y / 9.0).exp() * (1.0 + 0.3 * x);
    let u0 = RealField2D::from_fn(grid, profile).unwrap();
    let v0 = RealField2D::from_fn(scaled_grid, |x, y| l.powf(alpha) * profile(l * x, l.powf(beta) * y)).unwrap();
    let (h, steps) = (0.004, 50);
    let time_scale = l.powf(alpha + 1.0);
    let run = |field: &RealField2D<f64>, h: f64| {
        let mut state = EvolutionState::from_field(field, params, 0.0).unwrap();
        let mut stepper = Stepper::new(params, *field.grid(), h, false).unwrap();
        for _ in 0..steps {
            stepper.step(&mut state).unwrap();
        }
        state.to_field().unwrap().into_samples()
    };
    let u = run(&u0, h);
    let v = run(&v0, h / time_scale);
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let err = u.iter().zip(&v).fold(0.0f64, |m, (a, b)| m.max((l.powf(alpha) * a - b).abs()));
    assert!(err <= 1e-6 * scale, "{err}");
}

#[test]
fn kx_zero_modes_stay_zero_and_field_real() {
    let grid = Grid2D::from_extents(12.0f64, 64, 6.0, 16).unwrap();
    let params = FkpParams::new(1.5, Sigma::KpI, 1.0).unwrap();
    let u0 = RealField2D::from_fn(grid, |x, y| (-(x * x) - y * y / 4.0).exp() * (1.0 + y)).unwrap();
    let opts = EvolveOptions::new(0.01, 0.5).with_cadence(5);
    let out = evolve(&u0, params, &opts, &mut |obs| {
        let nkx = grid.nx() / 2 + 1;
        for iy in 1..grid.ny() {
            assert_eq!(obs.state.coeffs()[iy * nkx].norm(), 0.0);
        }
    })
    .unwrap();
    assert_eq!(out.status, RunStatus::Completed);
}

#[test]
fn soliton_translates_on_small_grid() {
    let grid = Grid2D::from_extents(30.0f64, 256, 4.0, 8).unwrap();
    let params = FkpParams::new(2.0, Sigma::KpII, 2.0).unwrap();
    let u0 = RealField2D::from_fn(grid, |x, _| kdv_soliton(2.0, x)).unwrap();
    let opts = EvolveOptions::new(1e-3, 1.0).with_cadence(1000);
    let out = evolve(&u0, params, &opts, &mut |_| {}).unwrap();
    let u = out.final_state.to_field().unwrap();
    let err = (0..grid.nx()).fold(0.0f64, |m, ix| m.max((u.at(ix, 3) - kdv_soliton(2.0, grid.x.point(ix) - 2.0)).abs()));
    assert!(err < 1e-8, "{err}");
    assert!(out.max_mass_rel_err < 1e-11);
}

#[test]
fn mass_gate_trips_on_blowup_prone_data() {
    let grid = Grid2D::from_extents(8.0f64, 32, 8.0, 16).unwrap();
    let params = FkpParams::new(0.5, Sigma::KpI, 1.0).unwrap();
    let u0 = RealField2D::from_fn(grid, |x, y| 40.0 * (-(x * x) - y * y).exp()).unwrap();
    let mut opts = EvolveOptions::new(0.01, 5.0);
    opts.mass_gate = 1e-12;
    let out = evolve(&u0, params, &opts, &mut |_| {}).unwrap();
    assert_ne!(out.status, RunStatus::Completed);
    assert!(out.gate_time.is_some() || out.blow_up_time.is_some());
}

#[test]
fn single_precision_run_conserves_mass() {
    let grid = Grid2D::from_extents(20.0f32, 64, 4.0, 8).unwrap();
    let params = FkpParams::new(2.0f32, Sigma::KpI, 1.0).unwrap();
    let u0 = RealField2D::from_fn(grid, |x, _| kdv_soliton(1.0f32, x)).unwrap();
    let opts = EvolveOptions::new(0.01f32, 1.0).with_cadence(50);
    let out = evolve(&u0, params, &opts, &mut |_| {}).unwrap();
    assert_eq!(out.status, RunStatus::Completed);
    assert!(out.max_mass_rel_err < 1e-4);
}
