//! Subcommand implementations and the `run` dispatcher.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fkp_core::bifurcation::{doubling_amplitudes, BranchOptions, BranchSolver};
use fkp_core::evolution::Observation;
use fkp_core::experiments::{run_experiment, ExperimentConfig, ExperimentReport, PerturbationSpec};
use fkp_core::ground_state::{
    kdv_soliton, petviashvili_solve, tail_decay_exponent, GroundState, PetviashviliOptions,
};
use fkp_core::linear_analysis::{subsample, LinearizedOperators};
use fkp_core::spectral::{Grid1D, Grid2D, RealField1D};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{RunConfig, Subcommand};
use crate::error::{io_err, CliError, Result};
use crate::manifest::{records, unix_now, RunManifest, MANIFEST_NAME};
use crate::snapshot::Snapshot;
use crate::verify;

/// What a subcommand produced before the manifest is assembled.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: String,
    pub files: Vec<PathBuf>,
    pub summary: Value,
}

/// Runs `config`, writes its outputs and `manifest.json` under `out_dir`.
pub fn run(config: &RunConfig) -> Result<RunManifest> {
    let start_time = unix_now();
    let dir = config.out_dir.clone();
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let outcome = match config.subcommand {
        Subcommand::GroundState => ground_state(config, &dir)?,
        Subcommand::Evolve => evolve(config, &dir)?,
        Subcommand::Experiment => experiment(config, &dir)?,
        Subcommand::Spectrum => spectrum(config, &dir)?,
        Subcommand::GrowthRate => growth_rate(config, &dir)?,
        Subcommand::Branch => branch(config, &dir)?,
        Subcommand::Sweep => sweep(config, &dir)?,
        Subcommand::Verify => verify_all(&dir)?,
    };
    let manifest = RunManifest {
        subcommand: config.subcommand.as_str().into(),
        config: config.entries.clone(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        start_time,
        end_time: unix_now(),
        status: outcome.status,
        files: records(&dir, &outcome.files)?,
        summary: outcome.summary,
    };
    manifest.write(&dir)?;
    Ok(manifest)
}

fn write_text(path: PathBuf, text: &str) -> Result<PathBuf> {
    std::fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}

fn write_snapshot(path: PathBuf, snap: &Snapshot) -> Result<PathBuf> {
    snap.write(&path)?;
    Ok(path)
}

/// `x,value` table with 17 significant digits.
pub fn profile_csv(profile: &RealField1D<f64>, column: &str) -> String {
    let mut out = format!("x,{column}\n");
    for (x, v) in profile.grid().points().iter().zip(profile.samples()) {
        let _ = writeln!(out, "{x:.16e},{v:.16e}");
    }
    out
}

fn solve_profile(config: &RunConfig) -> Result<(GroundState<f64>, RealField1D<f64>)> {
    let params = config.params()?;
    let n = config.solve_n.unwrap_or(config.nx);
    let state = petviashvili_solve(params, Grid1D::new(config.lx, n)?, &PetviashviliOptions::default())?;
    let profile = subsample(&state.profile, config.nx)?;
    Ok((state, profile))
}

fn ground_state(config: &RunConfig, dir: &Path) -> Result<Outcome> {
    let params = config.params()?;
    let (state, _) = solve_profile(config)?;
    let tail = tail_decay_exponent(&state).ok();
    let files = vec![
        write_text(dir.join("profile.csv"), &profile_csv(&state.profile, "q"))?,
        write_snapshot(dir.join("profile.fkps"), &Snapshot::from_profile(&state.profile, &params)?)?,
    ];
    Ok(Outcome {
        status: "completed".into(),
        files,
        summary: json!({
            "amplitude": state.amplitude(),
            "residual_sup": state.residual_sup,
            "iterations": state.iterations,
            "s_factor": state.final_s_factor(),
            "boundary_value": state.boundary_value(),
            "evenness_defect": state.evenness_defect(),
            "crest_count": state.crest_count(1e-12),
            "tail_slope": tail.map(|t| t.slope),
        }),
    })
}

fn experiment_config(config: &RunConfig) -> Result<ExperimentConfig<f64>> {
    let grid = Grid2D::from_extents(config.lx, config.nx, config.ly, config.ny)?;
    let mut spec = PerturbationSpec::new(config.perturbation, config.rho, config.x0);
    spec.crest_offset = config.crest_offset;
    let mut exp = ExperimentConfig::new(config.params()?, grid, config.dt, config.t_end, spec);
    exp.cadence = config.cadence;
    exp.dealias = config.dealias;
    exp.record_energy = config.energy;
    Ok(exp)
}

/// Result of an experiment run through [`run_with_snapshots`].
pub struct ExperimentRun {
    pub report: ExperimentReport<f64>,
    /// Largest deviation from the exactly translated KdV soliton over the
    /// recorded times (only for `alpha = 2` and `rho = 0`).
    pub soliton_error: Option<f64>,
    pub files: Vec<PathBuf>,
}

fn wrap(x: f64, half_width: f64) -> f64 {
    let period = 2.0 * half_width;
    x - ((x + half_width) / period).floor() * period
}

/// Runs the experiment described by `exp`, writing snapshots into `dir`
/// when given.
pub fn run_with_snapshots(exp: &ExperimentConfig<f64>, snapshot_every: usize, dir: Option<&Path>) -> Result<ExperimentRun> {
    let exact_soliton = exp.params.alpha == 2.0 && exp.perturbation.rho == 0.0;
    let crest = exp.perturbation.crest_position();
    let (grid, c) = (exp.grid, exp.params.c);
    let mut soliton_error = exact_soliton.then_some(0.0f64);
    let mut files = Vec::new();
    let mut first_error = None;
    let mut record = 0usize;
    let mut observer = |obs: &Observation<f64>| {
        if let Some(err) = soliton_error.as_mut() {
            let centre = crest + c * obs.t;
            for iy in 0..grid.ny() {
                for ix in 0..grid.nx() {
                    let exact = kdv_soliton(c, wrap(grid.x.point(ix) - centre, grid.x.half_width()));
                    *err = err.max((obs.field.at(ix, iy) - exact).abs());
                }
            }
        }
        if let (Some(dir), true) = (dir, snapshot_every > 0 && record % snapshot_every == 0) {
            let path = dir.join(format!("snap_{record:05}.fkps"));
            match Snapshot::from_field(obs.field, &exp.params, obs.t).and_then(|s| write_snapshot(path, &s)) {
                Ok(p) => files.push(p),
                Err(e) => {
                    first_error.get_or_insert(e);
                }
            }
        }
        record += 1;
    };
    let report = run_experiment(exp, Some(&mut observer))?;
    if let Some(e) = first_error {
        return Err(e);
    }
    Ok(ExperimentRun { report, soliton_error, files })
}

fn experiment_outputs(run: ExperimentRun, exp: &ExperimentConfig<f64>, dir: &Path) -> Result<Outcome> {
    let ExperimentRun { report, soliton_error, mut files } = run;
    files.push(write_text(dir.join("diagnostics.csv"), &report.diagnostics.to_csv())?);
    files.push(write_snapshot(
        dir.join("final.fkps"),
        &Snapshot::from_field(&report.final_field, &exp.params, report.t_final)?,
    )?);
    Ok(Outcome {
        status: report.status.as_str().into(),
        files,
        summary: json!({
            "status": report.status.as_str(),
            "t_final": report.t_final,
            "doubling_time": report.doubling_time,
            "halving_time": report.halving_time,
            "amplitude": report.amplitude,
            "carrier_amplitude": report.carrier_amplitude,
            "initial_sup": report.initial_sup,
            "max_sup": report.max_sup,
            "growth_ratio": report.max_sup / report.initial_sup,
            "max_mass_rel_err": report.max_mass_rel_err,
            "soliton_error": soliton_error,
        }),
    })
}

/// The unperturbed line-soliton run.
fn evolve(config: &RunConfig, dir: &Path) -> Result<Outcome> {
    let mut exp = experiment_config(config)?;
    exp.perturbation.rho = 0.0;
    let run = run_with_snapshots(&exp, config.snapshot_every, Some(dir))?;
    experiment_outputs(run, &exp, dir)
}

fn experiment(config: &RunConfig, dir: &Path) -> Result<Outcome> {
    let exp = experiment_config(config)?;
    let run = run_with_snapshots(&exp, config.snapshot_every, Some(dir))?;
    experiment_outputs(run, &exp, dir)
}

fn spectrum(config: &RunConfig, dir: &Path) -> Result<Outcome> {
    let params = config.params()?;
    let (_, profile) = solve_profile(config)?;
    let ops = LinearizedOperators::new(&profile, &params)?;
    let spec = ops.l_spectrum(false)?;
    let witnesses = ops.kernel_witnesses()?;
    let mut csv = String::from("index,eigenvalue\n");
    for (i, v) in spec.eigenvalues.iter().enumerate() {
        let _ = writeln!(csv, "{i},{v:.16e}");
    }
    let certificate = match spec.omega0 {
        Some(omega0) => {
            let ks: Vec<f64> = (1..=config.k_count).map(|i| config.k_max_factor * omega0 * i as f64 / config.k_count as f64).collect();
            let cert = ops.certificate(&ks, 0.01)?;
            json!({
                "passes": cert.passes(),
                "symmetry_residual": cert.symmetry_residual,
                "shift_identity_defect": cert.shift_identity_defect,
                "min_eig_above_omega0": cert.min_eig_above_omega0,
                "monotone_in_k": cert.monotone_in_k,
            })
        }
        None => Value::Null,
    };
    Ok(Outcome {
        status: "completed".into(),
        files: vec![write_text(dir.join("spectrum.csv"), &csv)?],
        summary: json!({
            "negative_count": spec.negative_count,
            "zero_count": spec.zero_count,
            "lambda_min": spec.lambda_min,
            "omega0": spec.omega0,
            "norm": spec.norm,
            "tol_neg": spec.tol_neg,
            "kernel_constant": witnesses.constant,
            "kernel_profile": witnesses.profile,
            "kernel_derivative": witnesses.derivative,
            "certificate": certificate,
        }),
    })
}

fn growth_rate(config: &RunConfig, dir: &Path) -> Result<Outcome> {
    let params = config.params()?;
    let (_, profile) = solve_profile(config)?;
    let ops = LinearizedOperators::new(&profile, &params)?;
    let omega0 = ops.l_spectrum(false)?.omega0.ok_or(fkp_core::Error::NoNegativeEigenvalue)?;
    let ks: Vec<f64> = (1..=config.k_count).map(|i| config.k_max_factor * omega0 * i as f64 / config.k_count as f64).collect();
    let curve = ops.growth_rate_curve(&ks)?;
    let peak = curve.sigma_max.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Outcome {
        status: "completed".into(),
        files: vec![write_text(dir.join("growth_rate.csv"), &curve.to_csv())?],
        summary: json!({ "omega0": omega0, "max_growth_rate": peak }),
    })
}

fn branch(config: &RunConfig, dir: &Path) -> Result<Outcome> {
    let params = config.params()?;
    let (_, profile) = solve_profile(config)?;
    let options = BranchOptions { modes: config.modes, ..BranchOptions::default() };
    let solver = BranchSolver::new(&profile, &params, options)?;
    let branch = solver.continue_branch(&doubling_amplitudes(config.s_min, config.s_max))?;
    let last = branch.points.last().ok_or(fkp_core::Error::EmptySeries)?;
    let phi = solver.reconstruct(last, config.branch_ny)?;
    let direct = branch.points.iter().map(|p| solver.direct_residual(p)).collect::<fkp_core::Result<Vec<_>>>()?;
    let (a, b) = branch.omega_fit()?;
    let files = vec![
        write_text(dir.join("branch.csv"), &branch.to_csv(solver.grid()))?,
        write_snapshot(dir.join("phi.fkps"), &Snapshot::from_field(&phi, &params, 0.0)?)?,
    ];
    Ok(Outcome {
        status: "completed".into(),
        files,
        summary: json!({
            "omega0": branch.omega0,
            "fit_intercept": a,
            "fit_curvature": b,
            "intercept_error": branch.intercept_error()?,
            "points": branch.points.len(),
            "max_residual": branch.points.iter().map(|p| p.residual_sup).fold(0.0, f64::max),
            "max_direct_residual": direct.iter().copied().fold(0.0, f64::max),
        }),
    })
}

fn sweep(config: &RunConfig, dir: &Path) -> Result<Outcome> {
    let children: Vec<RunConfig> = config
        .sweep_alpha
        .iter()
        .map(|alpha| {
            let mut entries = config.entries.clone();
            entries.remove("sweep_alpha");
            entries.remove("workers");
            entries.insert("alpha".into(), alpha.to_string());
            entries.insert("out_dir".into(), dir.join(format!("alpha_{alpha}")).to_string_lossy().into_owned());
            crate::config::from_entries(Subcommand::Experiment, entries)
        })
        .collect::<Result<_>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| CliError::Invalid(format!("workers: {e}")))?;
    let results: Vec<Result<RunManifest>> = pool.install(|| children.par_iter().map(run).collect());
    let mut files = Vec::new();
    let mut rows = Vec::new();
    let mut all_completed = true;
    for (child, result) in children.iter().zip(results) {
        let manifest = result?;
        all_completed &= manifest.is_completed();
        files.push(child.out_dir.join(MANIFEST_NAME));
        rows.push(json!({ "alpha": child.alpha, "status": manifest.status, "summary": manifest.summary }));
    }
    Ok(Outcome {
        status: if all_completed { "completed" } else { "partial" }.into(),
        files,
        summary: Value::Array(rows),
    })
}

fn verify_all(dir: &Path) -> Result<Outcome> {
    let results = verify::run_suite(&verify::CRITERIA.iter().map(|c| c.id).collect::<Vec<_>>());
    println!("{}", verify::format_table(&results));
    let mut csv = String::from("criterion,passed,detail\n");
    for r in &results {
        let _ = writeln!(csv, "{},{},\"{}\"", r.id, r.passed, r.detail.replace('"', "'"));
    }
    let all = results.iter().all(|r| r.passed);
    Ok(Outcome {
        status: if all { "completed" } else { "failed" }.into(),
        files: vec![write_text(dir.join("verify.csv"), &csv)?],
        summary: Value::Array(results.iter().map(|r| json!({ "id": r.id, "passed": r.passed, "detail": r.detail })).collect()),
    })
}

/// Exit code for a finished run: 0 iff the status is `completed`.
pub fn exit_code(manifest: &RunManifest) -> i32 {
    if manifest.is_completed() {
        0
    } else {
        2
    }
}
