use std::path::Path;

use fkp_cli::config::KEYS;
use fkp_cli::manifest::hash_file;
use fkp_cli::snapshot::HEADER_LEN;
use fkp_cli::{parse_config, parse_config_str, run, CliError, RunManifest, Snapshot, Subcommand};
use fkp_core::diagnostics::DiagnosticsSeries;
use fkp_core::spectral::{Grid2D, RealField2D};
use fkp_core::{FkpParams, Sigma};

fn overrides(pairs: &[&str]) -> Vec<String> {
    pairs.iter().map(|s| s.to_string()).collect()
}

fn small_evolve(dir: &Path) -> Vec<String> {
    overrides(&[
        "alpha=2",
        "sigma=-1",
        "c=2",
        "Lx=30",
        "Ly=4",
        "nx=128",
        "ny=8",
        "dt=0.01",
        "t_end=0.5",
        "cadence=10",
        "snapshot_every=2",
        &format!("out_dir={}", dir.display()),
    ])
}

#[test]
fn fkp_i_config_is_accepted() {
    let cfg = parse_config_str(Subcommand::GroundState, "alpha=2\nsigma=-1\nc=2\nLx=30\nnx=256\n", &[]).unwrap();
    assert_eq!(cfg.sigma, Sigma::KpI);
    assert_eq!(cfg.params().unwrap(), FkpParams::new(2.0, Sigma::KpI, 2.0).unwrap());
}

#[test]
fn alpha_out_of_range_names_the_interval() {
    let err = parse_config_str(Subcommand::GroundState, "alpha=0.2\nc=2\nLx=30\nnx=256", &[]).unwrap_err();
    assert!(err.to_string().contains("alpha must be in (1/3, 2]"), "{err}");
}

#[test]
fn grid_size_must_be_a_power_of_two() {
    let err = parse_config_str(Subcommand::GroundState, "alpha=2\nc=2\nLx=30\nnx=500", &[]).unwrap_err();
    assert!(err.to_string().contains("power of two required"), "{err}");
}

#[test]
fn unknown_and_missing_keys_are_rejected() {
    let err = parse_config_str(Subcommand::GroundState, "alpha=2\nc=2\nLx=30\nnx=64\nspeed=3", &[]).unwrap_err();
    assert!(matches!(err, CliError::UnknownKey(ref k) if k == "speed"), "{err}");
    let err = parse_config_str(Subcommand::Evolve, "alpha=2\nc=2\nLx=30\nnx=64", &[]).unwrap_err();
    assert!(matches!(err, CliError::MissingKey("sigma")), "{err}");
    let err = parse_config_str(Subcommand::GroundState, "alpha=2\nalpha=1\nc=2\nLx=30\nnx=64", &[]).unwrap_err();
    assert!(matches!(err, CliError::DuplicateKey(_)), "{err}");
    let err = parse_config_str(Subcommand::GrowthRate, "alpha=2\nsigma=1\nc=2\nLx=30\nnx=64", &[]).unwrap_err();
    assert!(err.to_string().contains("sigma = -1"), "{err}");
}

#[test]
fn overrides_take_precedence_over_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "# profile\nalpha=2\nc=2\nLx=30\nnx=64\n").unwrap();
    let cfg = parse_config(Subcommand::GroundState, Some(&path), &overrides(&["c=1.5"])).unwrap();
    assert_eq!(cfg.c, 1.5);
    assert!(KEYS.iter().all(|k| !k.is_empty()));
    assert!(matches!(parse_config(Subcommand::GroundState, Some(&dir.path().join("missing")), &[]), Err(CliError::Io { .. })));
}

#[test]
fn snapshot_round_trip_is_bitwise() {
    let grid = Grid2D::from_extents(60.0f64, 512, 30.0, 128).unwrap();
    let field = RealField2D::from_fn(grid, |x, y| (0.3 * x).sin() * (-(y * y) / 50.0).exp() + 1e-300).unwrap();
    let params = FkpParams::new(1.5, Sigma::KpII, 0.7).unwrap();
    let snap = Snapshot::from_field(&field, &params, 3.25).unwrap();
    let bytes = snap.to_bytes();
    assert_eq!(&bytes[..4], b"FKPS");
    assert_eq!(bytes.len(), HEADER_LEN + 8 * 512 * 128);
    assert_eq!(HEADER_LEN, 4 + 4 + 4 + 4 + 6 * 8);
    let back = Snapshot::from_bytes(&bytes).unwrap();
    assert_eq!(back.to_bytes(), bytes);
    assert!(back.samples.iter().zip(field.samples()).all(|(a, b)| a.to_bits() == b.to_bits()));
    assert_eq!((back.nx, back.ny, back.sigma, back.t), (512, 128, 1.0, 3.25));
    // x varies fastest
    assert_eq!(back.at(5, 7), field.at(5, 7));
}

#[test]
fn zero_field_snapshot_has_zero_payload() {
    let grid = Grid2D::from_extents(10.0f64, 16, 10.0, 8).unwrap();
    let params = FkpParams::new(2.0, Sigma::KpI, 1.0).unwrap();
    let bytes = Snapshot::from_field(&RealField2D::zeros(grid), &params, 0.0).unwrap().to_bytes();
    assert!(bytes[HEADER_LEN..].iter().all(|&b| b == 0));
}

#[test]
fn corrupt_snapshots_are_rejected() {
    let grid = Grid2D::from_extents(10.0f64, 16, 10.0, 8).unwrap();
    let params = FkpParams::new(2.0, Sigma::KpI, 1.0).unwrap();
    let bytes = Snapshot::from_field(&RealField2D::zeros(grid), &params, 0.0).unwrap().to_bytes();
    assert!(Snapshot::from_bytes(&bytes[..bytes.len() - 8]).is_err());
    let mut longer = bytes.clone();
    longer.extend_from_slice(&[0; 8]);
    assert!(Snapshot::from_bytes(&longer).is_err());
    let mut magic = bytes.clone();
    magic[0] = b'X';
    assert!(Snapshot::from_bytes(&magic).is_err());
    let mut version = bytes.clone();
    version[4] = 2;
    assert!(Snapshot::from_bytes(&version).is_err());
    assert!(Snapshot::from_bytes(&bytes[..10]).is_err());
}

#[test]
fn evolve_writes_hashed_outputs_deterministically() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run(&parse_config(Subcommand::Evolve, None, &small_evolve(a.path())).unwrap()).unwrap();
    let second = run(&parse_config(Subcommand::Evolve, None, &small_evolve(b.path())).unwrap()).unwrap();
    assert!(first.is_completed());
    let names: Vec<&str> = first.files.iter().map(|f| f.path.as_str()).collect();
    assert!(names.contains(&"diagnostics.csv") && names.contains(&"final.fkps"), "{names:?}");
    assert!(names.iter().any(|n| n.starts_with("snap_")));
    assert_eq!(
        first.files.iter().map(|f| &f.sha256).collect::<Vec<_>>(),
        second.files.iter().map(|f| &f.sha256).collect::<Vec<_>>()
    );
    let reread = RunManifest::read(&a.path().join("manifest.json")).unwrap();
    assert_eq!(reread, first);
    assert!(reread.verify_hashes(a.path()).unwrap().is_empty());

    let csv = std::fs::read_to_string(a.path().join("diagnostics.csv")).unwrap();
    let series = DiagnosticsSeries::<f64>::from_csv(&csv).unwrap();
    assert_eq!(series.len(), 6);
    assert_eq!(series.to_csv(), csv);
    let last = Snapshot::read(&a.path().join("final.fkps")).unwrap();
    assert_eq!((last.nx, last.ny, last.alpha, last.sigma, last.c), (128, 8, 2.0, -1.0, 2.0));
    assert!((last.t - 0.5).abs() < 1e-12);
    let err = first.summary["soliton_error"].as_f64().unwrap();
    assert!(err < 1e-4, "{err}");

    std::fs::write(a.path().join("final.fkps"), b"tampered").unwrap();
    assert_eq!(reread.verify_hashes(a.path()).unwrap(), vec!["final.fkps".to_string()]);
    assert_ne!(hash_file(&a.path().join("final.fkps")).unwrap(), first.files[0].sha256);
}

#[test]
fn ground_state_profile_exports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(
        Subcommand::GroundState,
        None,
        &overrides(&["alpha=2", "c=1", "Lx=40", "nx=256", &format!("out_dir={}", dir.path().display())]),
    )
    .unwrap();
    let manifest = run(&cfg).unwrap();
    assert!(manifest.is_completed());
    let snap = Snapshot::read(&dir.path().join("profile.fkps")).unwrap();
    assert_eq!((snap.nx, snap.ny, snap.ly), (256, 1, 0.0));
    assert!((snap.samples.iter().copied().fold(0.0, f64::max) - 3.0).abs() < 1e-8);
    let csv = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert!(csv.starts_with("x,q\n"));
    assert_eq!(csv.lines().count(), 257);
}

#[test]
fn spectrum_growth_and_branch_tables() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["alpha=2", "sigma=-1", "c=2", "Lx=25", "nx=128", "solve_n=256", "k_count=6", "s_max=4e-4"];
    let with_dir = |sub: &str| {
        let mut v = overrides(&base);
        v.push(format!("out_dir={}", dir.path().join(sub).display()));
        v
    };
    let spec = run(&parse_config(Subcommand::Spectrum, None, &with_dir("spectrum")).unwrap()).unwrap();
    assert_eq!(spec.summary["negative_count"], 1);
    assert!((spec.summary["lambda_min"].as_f64().unwrap() + 0.75).abs() < 1e-6);
    let csv = std::fs::read_to_string(dir.path().join("spectrum/spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 129);

    let growth = run(&parse_config(Subcommand::GrowthRate, None, &with_dir("growth")).unwrap()).unwrap();
    assert!(growth.summary["max_growth_rate"].as_f64().unwrap() > 0.0);
    let csv = std::fs::read_to_string(dir.path().join("growth/growth_rate.csv")).unwrap();
    assert!(csv.starts_with("k,sigma_max\n"));

    let branch = run(&parse_config(Subcommand::Branch, None, &with_dir("branch")).unwrap()).unwrap();
    assert_eq!(branch.summary["points"], 3);
    let csv = std::fs::read_to_string(dir.path().join("branch/branch.csv")).unwrap();
    assert!(csv.starts_with("s,omega,residual,sup_dx_w\n"));
    let phi = Snapshot::read(&dir.path().join("branch/phi.fkps")).unwrap();
    assert_eq!((phi.nx, phi.ny), (128, 64));
}

#[test]
fn sweep_writes_one_child_manifest_per_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = small_evolve(dir.path());
    args.retain(|a| !["alpha=", "snapshot_every=", "Lx=", "nx="].iter().any(|k| a.starts_with(k)));
    args.extend(overrides(&["sweep_alpha=1.7,2", "perturbation=psi1", "rho=0.05", "x0=0", "workers=2", "Lx=60", "nx=256"]));
    let manifest = run(&parse_config(Subcommand::Sweep, None, &args).unwrap()).unwrap();
    assert_eq!(manifest.files.len(), 2);
    assert!(manifest.verify_hashes(dir.path()).unwrap().is_empty());
    for alpha in ["1.7", "2"] {
        let child = RunManifest::read(&dir.path().join(format!("alpha_{alpha}/manifest.json"))).unwrap();
        assert_eq!(child.subcommand, "experiment");
        assert_eq!(child.config["alpha"], alpha);
    }
}
