//! Perturbed line solitary waves and the (in)stability experiments built on
//! them.

use crate::diagnostics::{DiagnosticsSeries, SeriesRecorder};
use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolveOptions, Observation, RunStatus};
use crate::ground_state::{kdv_soliton, petviashvili_solve, GroundState, PetviashviliOptions, BOUNDARY_TOLERANCE};
use crate::params::FkpParams;
use crate::scalar::{lit, Real};
use crate::spectral::{apply_symbol, Grid1D, Grid2D, RealField1D, RealField2D, SymbolSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PerturbationKind {
    /// `(x + x0) exp(-(x + x0)^2 - y^2)`
    Localized,
    /// `(x + x0) exp(-(x + x0)^2) cos(y)`
    YPeriodic,
}

impl PerturbationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PerturbationKind::Localized => "localized",
            PerturbationKind::YPeriodic => "y_periodic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "localized" | "psi1" => Ok(PerturbationKind::Localized),
            "y_periodic" | "psi2" => Ok(PerturbationKind::YPeriodic),
            _ => Err(Error::InvalidArgument(format!("unknown perturbation kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec<T> {
    pub kind: PerturbationKind,
    /// Ratio of the perturbation maximum to the carrier amplitude.
    pub rho: T,
    /// The perturbation is centered at `x = -x0`.
    pub x0: T,
    /// Carrier crest position relative to the perturbation center.
    pub crest_offset: T,
}

impl<T: Real> PerturbationSpec<T> {
    pub fn new(kind: PerturbationKind, rho: T, x0: T) -> Self {
        Self { kind, rho, x0, crest_offset: T::zero() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho >= T::zero() && self.rho.is_finite()) {
            return Err(Error::InvalidArgument("rho must be non-negative".into()));
        }
        if !(self.x0.is_finite() && self.crest_offset.is_finite()) {
            return Err(Error::NonFinite("perturbation center"));
        }
        Ok(())
    }

    /// Carrier crest position `-x0 + offset`.
    pub fn crest_position(&self) -> T {
        -self.x0 + self.crest_offset
    }
}

/// Unit-amplitude perturbation shape with the x-mean of every y-row removed.
pub fn build_perturbation<T: Real>(spec: &PerturbationSpec<T>, grid: &Grid2D<T>) -> Result<RealField2D<T>> {
    spec.validate()?;
    let x0 = spec.x0;
    let shape = |x: T, y: T| {
        let s = x + x0;
        let envelope = (-s * s).exp();
        match spec.kind {
            PerturbationKind::Localized => s * envelope * (-y * y).exp(),
            PerturbationKind::YPeriodic => s * envelope * y.cos(),
        }
    };
    let mut samples = RealField2D::from_fn(*grid, shape)?.into_samples();
    let nx = T::from_usize_lossy(grid.nx());
    for row in samples.chunks_exact_mut(grid.nx()) {
        let mean = row.iter().fold(T::zero(), |s, &v| s + v) / nx;
        for v in row.iter_mut() {
            *v = *v - mean;
        }
    }
    RealField2D::new(*grid, samples)
}

/// `A = rho * carrier_amplitude / max|shape|`.
pub fn calibrate_amplitude<T: Real>(shape: &RealField2D<T>, carrier_amplitude: T, rho: T) -> Result<T> {
    let peak = shape.sup_norm();
    if peak == T::zero() {
        return Err(Error::InvalidArgument("perturbation shape vanishes".into()));
    }
    Ok(rho * carrier_amplitude / peak)
}

/// Line solitary wave sampled on the experiment's x grid.
#[derive(Debug, Clone)]
pub struct Carrier<T: Real> {
    pub params: FkpParams<T>,
    /// `Q_c(x - crest)`.
    pub profile: RealField1D<T>,
    pub crest: T,
    pub amplitude: T,
    /// The Petviashvili solution when the profile is not in closed form.
    pub ground_state: Option<GroundState<T>>,
}

/// Closed form for `alpha = 2`, otherwise Petviashvili iteration on `grid_x`
/// followed by a spectral shift of the crest.
pub fn build_carrier<T: Real>(
    params: FkpParams<T>,
    grid_x: Grid1D<T>,
    crest: T,
    opts: &PetviashviliOptions<T>,
) -> Result<Carrier<T>> {
    params.validate()?;
    if params.alpha == lit(2.0) {
        let l = grid_x.half_width();
        let period = grid_x.period();
        let profile = RealField1D::from_fn(grid_x, |x| {
            let s = x - crest + l;
            kdv_soliton(params.c, s - (s / period).floor() * period - l)
        })?;
        let edge = kdv_soliton(params.c, l);
        if edge > lit(BOUNDARY_TOLERANCE) {
            return Err(Error::BoundaryNotSmall(edge.to_f64_lossy()));
        }
        return Ok(Carrier { params, profile, crest, amplitude: lit::<T>(3.0) * params.c, ground_state: None });
    }
    let gs = petviashvili_solve(params, grid_x, opts)?;
    let profile = apply_symbol(&gs.profile, &SymbolSpec::ShiftX(crest))?;
    Ok(Carrier { params, profile, crest, amplitude: gs.amplitude(), ground_state: Some(gs) })
}

/// `u0 = Q_c(x - crest) (x) 1_y + A * shape` and the amplitude `A`.
pub fn assemble_initial_data<T: Real>(
    carrier: &Carrier<T>,
    spec: &PerturbationSpec<T>,
    grid: &Grid2D<T>,
) -> Result<(RealField2D<T>, T)> {
    if carrier.profile.grid() != &grid.x {
        return Err(Error::InvalidArgument("carrier grid differs from the x grid".into()));
    }
    let shape = build_perturbation(spec, grid)?;
    let amp = calibrate_amplitude(&shape, carrier.amplitude, spec.rho)?;
    let q = carrier.profile.samples();
    let mut samples = shape.into_samples();
    for row in samples.chunks_exact_mut(grid.nx()) {
        for (v, &qv) in row.iter_mut().zip(q) {
            *v = qv + amp * *v;
        }
    }
    Ok((RealField2D::new(*grid, samples)?, amp))
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig<T> {
    pub params: FkpParams<T>,
    pub grid: Grid2D<T>,
    pub dt: T,
    pub t_end: T,
    pub perturbation: PerturbationSpec<T>,
    pub cadence: usize,
    pub dealias: bool,
    pub record_energy: bool,
    /// Sup-norm growth factor defining the doubling time.
    pub growth_factor: T,
    /// Residual decay factor defining the halving time.
    pub decay_factor: T,
    pub ground_state: PetviashviliOptions<T>,
}

impl<T: Real> ExperimentConfig<T> {
    pub fn new(params: FkpParams<T>, grid: Grid2D<T>, dt: T, t_end: T, perturbation: PerturbationSpec<T>) -> Self {
        Self {
            params,
            grid,
            dt,
            t_end,
            perturbation,
            cadence: 100,
            dealias: false,
            record_energy: false,
            growth_factor: lit(2.0),
            decay_factor: lit(0.5),
            ground_state: PetviashviliOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.perturbation.validate()?;
        EvolveOptions::new(self.dt, self.t_end).with_cadence(self.cadence).step_count()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport<T: Real> {
    pub diagnostics: DiagnosticsSeries<T>,
    pub status: RunStatus,
    pub doubling_time: Option<T>,
    pub halving_time: Option<T>,
    pub amplitude: T,
    pub carrier_amplitude: T,
    pub initial_sup: T,
    pub max_sup: T,
    pub max_mass_rel_err: T,
    /// Time of the last finite state.
    pub t_final: T,
    pub final_field: RealField2D<T>,
}

/// Builds the carrier and perturbed data, evolves, and extracts the crossing
/// times. `observer` additionally sees every sampled state (e.g. to write
/// snapshots).
pub fn run_experiment<T: Real>(
    config: &ExperimentConfig<T>,
    observer: Option<&mut dyn FnMut(&Observation<T>)>,
) -> Result<ExperimentReport<T>> {
    config.validate()?;
    let spec = &config.perturbation;
    let carrier = build_carrier(config.params, config.grid.x, spec.crest_position(), &config.ground_state)?;
    let (u0, amplitude) = assemble_initial_data(&carrier, spec, &config.grid)?;

    let mut recorder = SeriesRecorder::new(config.record_energy).with_carrier(carrier.profile.clone(), config.params.c);
    let opts = EvolveOptions { cadence: config.cadence, dealias: config.dealias, ..EvolveOptions::new(config.dt, config.t_end) };
    let mut extra = observer;
    let outcome = evolve(&u0, config.params, &opts, &mut |obs| {
        recorder.record(obs);
        if let Some(f) = extra.as_mut() {
            f(obs);
        }
    })?;
    let diagnostics = recorder.finish()?;
    let doubling_time = diagnostics.doubling_time(config.growth_factor)?;
    let halving_time = diagnostics.halving_time(config.decay_factor)?;
    let initial_sup = diagnostics.rows()[0].sup_norm;
    let max_sup = diagnostics.max_sup_norm().unwrap_or(initial_sup);
    Ok(ExperimentReport {
        status: outcome.status,
        doubling_time,
        halving_time,
        amplitude,
        carrier_amplitude: carrier.amplitude,
        initial_sup,
        max_sup,
        max_mass_rel_err: outcome.max_mass_rel_err,
        t_final: outcome.final_state.t,
        final_field: outcome.final_state.to_field()?,
        diagnostics,
    })
}
