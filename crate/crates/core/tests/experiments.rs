use fkp_core::diagnostics::{crossing_time, energy, mass, DiagnosticsRow, DiagnosticsSeries};
use fkp_core::evolution::RunStatus;
use fkp_core::experiments::{
    build_carrier, build_perturbation, calibrate_amplitude, run_experiment, ExperimentConfig, PerturbationKind,
    PerturbationSpec,
};
use fkp_core::ground_state::{kdv_soliton, PetviashviliOptions};
use fkp_core::spectral::{apply_symbol_2d, Grid1D, Grid2D, RealField2D, SymbolSpec};
use fkp_core::{FkpParams, Sigma};
use proptest::prelude::*;

#[test]
fn unperturbed_soliton_keeps_its_height() {
    let params = FkpParams::new(2.0f64, Sigma::KpI, 2.0).unwrap();
    let grid = Grid2D::from_extents(60.0, 512, 4.0, 8).unwrap();
    let spec = PerturbationSpec::new(PerturbationKind::Localized, 0.0, 10.0);
    let mut config = ExperimentConfig::new(params, grid, 1e-3, 10.0, spec);
    config.cadence = 500;
    let report = run_experiment(&config, None).unwrap();
    assert_eq!(report.status, RunStatus::Completed);
    assert_eq!(report.amplitude, 0.0);
    // compare with the grid maximum of the exactly translated soliton
    let series = &report.diagnostics;
    let drift = series.times().iter().zip(series.sup_norms()).fold(0.0f64, |m, (t, s)| {
        let crest = -10.0 + 2.0 * t;
        let exact = (0..grid.nx()).map(|ix| kdv_soliton(2.0, grid.x.point(ix) - crest)).fold(0.0, f64::max);
        m.max((s - exact).abs())
    });
    assert!(drift <= 1e-6, "{drift}");
}

#[test]
fn localized_amplitude_calibration() {
    let grid = Grid2D::from_extents(60.0, 8192, 30.0, 8).unwrap();
    let spec = PerturbationSpec::new(PerturbationKind::Localized, 0.1, 10.0);
    let shape = build_perturbation(&spec, &grid).unwrap();
    let amp = calibrate_amplitude(&shape, 6.0, 0.1).unwrap();
    // max |s e^{-s^2}| = e^{-1/2} / sqrt(2), attained between grid points
    let exact = 0.6 / ((-0.5f64).exp() / 2f64.sqrt());
    assert!((amp - exact).abs() < 1e-3 * exact, "{amp}");
}

#[test]
fn perturbation_is_mean_free_and_even_in_y() {
    let grid = Grid2D::from_extents(20.0, 128, std::f64::consts::PI, 16).unwrap();
    for kind in [PerturbationKind::Localized, PerturbationKind::YPeriodic] {
        let shape = build_perturbation(&PerturbationSpec::new(kind, 0.1, 3.0), &grid).unwrap();
        for iy in 0..grid.ny() {
            let row_mean: f64 = (0..grid.nx()).map(|ix| shape.at(ix, iy)).sum::<f64>() / grid.nx() as f64;
            assert!(row_mean.abs() < 1e-14);
            let mirror = (grid.ny() - iy) % grid.ny();
            for ix in 0..grid.nx() {
                assert!((shape.at(ix, iy) - shape.at(ix, mirror)).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn fractional_carrier_is_centered_on_request() {
    let params = FkpParams::new(1.5, Sigma::KpI, 2.0).unwrap();
    let grid_x = Grid1D::new(100.0, 2048).unwrap();
    let carrier = build_carrier(params, grid_x, -10.0, &PetviashviliOptions::default()).unwrap();
    let (imax, _) = carrier
        .profile
        .samples()
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
    assert!((grid_x.point(imax) + 10.0).abs() <= grid_x.dx());
}

#[test]
fn mass_and_energy_are_translation_invariant() {
    let params = FkpParams::new(1.5, Sigma::KpI, 1.0).unwrap();
    let grid = Grid2D::from_extents(20.0f64, 128, 10.0, 32).unwrap();
    // the y-dependent part is odd in x, so only the k_y = 0 row has a k_x = 0 mode
    let u = RealField2D::from_fn(grid, |x, y| kdv_soliton(1.0, x) + x * (-(x * x) - y * y).exp()).unwrap();
    let moved = apply_symbol_2d(&u, &SymbolSpec::ShiftX(3.7)).unwrap();
    let (m0, m1) = (mass(&u), mass(&moved));
    assert!((m0 - m1).abs() <= 1e-10 * m0.abs());
    let (e0, e1) = (energy(&u, &params).unwrap(), energy(&moved, &params).unwrap());
    assert!((e0 - e1).abs() <= 1e-10 * e0.abs());
}

proptest! {
    #[test]
    fn crossing_time_is_monotone_in_factor(values in prop::collection::vec(0.1f64..10.0, 2..40), f1 in 1.0f64..3.0, df in 0.0f64..2.0) {
        let times: Vec<f64> = (0..values.len()).map(|i| i as f64 * 0.5).collect();
        let reference = values[0];
        let t1 = crossing_time(&times, &values, reference, f1).unwrap();
        let t2 = crossing_time(&times, &values, reference, f1 + df).unwrap();
        if let (Some(a), Some(b)) = (t1, t2) {
            prop_assert!(a <= b);
            prop_assert!(a >= 0.0 && b <= *times.last().unwrap());
        }
    }

    #[test]
    fn csv_round_trip(rows in prop::collection::vec((0.0f64..1e3, -1e3f64..1e3, -1.0f64..1.0), 1..20), extras in any::<bool>()) {
        let mut series = DiagnosticsSeries::new();
        let mut t = 0.0;
        for (i, (sup, m, e)) in rows.iter().enumerate() {
            t += 0.25;
            series.push(DiagnosticsRow {
                t,
                sup_norm: *sup,
                mass: *m,
                mass_rel_err: if i == 0 { 0.0 } else { m * 1e-12 },
                perturbation_sup: extras.then(|| e.abs()),
                energy: extras.then_some(*e),
            }).unwrap();
        }
        let text = series.to_csv();
        let back = DiagnosticsSeries::from_csv(&text).unwrap();
        prop_assert_eq!(back.rows(), series.rows());
        prop_assert_eq!(back.to_csv(), text);
    }
}
