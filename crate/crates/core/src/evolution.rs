//! Fourier-space time stepping of the fKP equation
//! `u_t = -i(sigma k_y^2/k_x - k_x|k_x|^alpha) u - i(k_x/2) F[u^2]`
//! with the fourth-order exponential time differencing scheme of Cox and
//! Matthews.
//!
//! States are kept in the half spectrum (non-negative `k_x` only); see
//! [`HalfSpectrum2D`] for the layout.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::params::FkpParams;
use crate::scalar::{lit, Real};
use crate::spectral::{Grid2D, HalfSpectrum2D, RealField2D};

/// Default regularizer of the `1/k_x` symbol.
pub const DEFAULT_REGULARIZER: f64 = 2.2e-16;

/// Default bound on `|1 - M(t)/M(0)|` beyond which a run is aborted.
pub const DEFAULT_MASS_GATE: f64 = 1e-4;

const CONTOUR_POINTS: usize = 32;
const CONTOUR_SWITCH: f64 = 0.5;

type C<T> = Complex<T>;

fn czero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

/// Linear part `Lambda(k_x, k_y)` of the Fourier-space equation on the half
/// spectrum.
#[derive(Debug, Clone)]
pub struct LinearSymbol<T: Real> {
    grid: Grid2D<T>,
    values: Vec<C<T>>,
    projected: Vec<bool>,
    regularizer: T,
}

impl<T: Real> LinearSymbol<T> {
    /// `Lambda = -i(sigma k_y^2/(k_x + i reg) - k_x|k_x|^alpha)` for `k_x != 0`.
    ///
    /// Modes with `k_x = 0, k_y != 0` get `Lambda = 0` and are flagged for
    /// projection (zero-mass constraint). The x-Nyquist column is flagged too:
    /// an odd-in-`k_x` multiplier has no real-valued action there.
    pub fn new(params: &FkpParams<T>, grid: Grid2D<T>, regularizer: T) -> Result<Self> {
        params.validate()?;
        if !(regularizer >= T::zero()) {
            return Err(Error::InvalidArgument("regularizer must be non-negative".into()));
        }
        let nkx = grid.nx() / 2 + 1;
        let sigma = params.sigma_value();
        let mut values = Vec::with_capacity(nkx * grid.ny());
        let mut projected = Vec::with_capacity(nkx * grid.ny());
        for iy in 0..grid.ny() {
            let ky = grid.y.wavenumber(iy);
            for ikx in 0..nkx {
                let kx = grid.x.wavenumber(ikx);
                let flagged = ikx == nkx - 1 || (ikx == 0 && iy != 0);
                projected.push(flagged);
                if ikx == 0 || flagged {
                    values.push(czero());
                    continue;
                }
                let d = kx * kx + regularizer * regularizer;
                let s = sigma * ky * ky;
                let re_inner = s * kx / d - kx * kx.abs().powf(params.alpha);
                let im_inner = -s * regularizer / d;
                values.push(C::new(im_inner, -re_inner));
            }
        }
        Ok(Self { grid, values, projected, regularizer })
    }

    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }

    pub fn nkx(&self) -> usize {
        self.grid.nx() / 2 + 1
    }

    pub fn values(&self) -> &[C<T>] {
        &self.values
    }

    pub fn projected(&self) -> &[bool] {
        &self.projected
    }

    pub fn regularizer(&self) -> T {
        self.regularizer
    }

    /// `Lambda` at half-spectrum slot `(ikx, iy)`.
    pub fn at(&self, ikx: usize, iy: usize) -> C<T> {
        self.values[iy * self.nkx() + ikx]
    }
}

/// Symbol with the default regularizer.
pub fn linear_symbol<T: Real>(params: &FkpParams<T>, grid: Grid2D<T>) -> Result<LinearSymbol<T>> {
    LinearSymbol::new(params, grid, lit(DEFAULT_REGULARIZER))
}

/// Scalar exponential time differencing weights for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtdWeights<T> {
    pub e: C<T>,
    pub e2: C<T>,
    pub q: C<T>,
    pub f1: C<T>,
    pub f2: C<T>,
    pub f3: C<T>,
}

fn raw_weights<T: Real>(z: C<T>) -> [C<T>; 4] {
    let one = C::new(T::one(), T::zero());
    let two = C::new(lit::<T>(2.0), T::zero());
    let three = C::new(lit::<T>(3.0), T::zero());
    let four = C::new(lit::<T>(4.0), T::zero());
    let ez = z.exp();
    let z2 = z * z;
    let z3 = z2 * z;
    [
        ((z * lit::<T>(0.5)).exp() - one) / z,
        (-four - z + ez * (four - three * z + z2)) / z3,
        (two + z + ez * (z - two)) / z3,
        (-four - three * z - z2 + ez * (four - z)) / z3,
    ]
}

/// Weights for `z = Lambda h`. Small `|z|` is handled by averaging the closed
/// forms over a circle of radius one around `z`.
pub fn etd4_weights<T: Real>(lambda: C<T>, h: T) -> EtdWeights<T> {
    let z = lambda * h;
    let e = z.exp();
    let e2 = (z * lit::<T>(0.5)).exp();
    let hc = C::new(h, T::zero());
    if z == czero() {
        let sixth = hc / lit::<T>(6.0);
        return EtdWeights { e, e2, q: hc * lit::<T>(0.5), f1: sixth, f2: sixth, f3: sixth };
    }
    let w = if z.norm() < lit(CONTOUR_SWITCH) {
        let m = T::from_usize_lossy(CONTOUR_POINTS);
        let mut acc = [czero::<T>(); 4];
        for j in 0..CONTOUR_POINTS {
            let theta = T::TAU() * (T::from_usize_lossy(j) + lit(0.5)) / m;
            let r = z + C::new(theta.cos(), theta.sin());
            for (a, v) in acc.iter_mut().zip(raw_weights(r)) {
                *a = *a + v;
            }
        }
        acc.map(|a| a / m)
    } else {
        raw_weights(z)
    };
    EtdWeights { e, e2, q: hc * w[0], f1: hc * w[1], f2: hc * w[2], f3: hc * w[3] }
}

/// Per-mode weights of the Cox-Matthews scheme for one step size.
#[derive(Debug, Clone)]
pub struct EtdTableau<T: Real> {
    pub h: T,
    pub e: Vec<C<T>>,
    pub e2: Vec<C<T>>,
    pub q: Vec<C<T>>,
    pub f1: Vec<C<T>>,
    pub f2: Vec<C<T>>,
    pub f3: Vec<C<T>>,
}

pub fn etd4_tableau<T: Real>(symbol: &LinearSymbol<T>, h: T) -> Result<EtdTableau<T>> {
    if !(h > T::zero() && h.is_finite()) {
        return Err(Error::InvalidArgument("time step must be positive".into()));
    }
    let n = symbol.values.len();
    let mut tab = EtdTableau {
        h,
        e: Vec::with_capacity(n),
        e2: Vec::with_capacity(n),
        q: Vec::with_capacity(n),
        f1: Vec::with_capacity(n),
        f2: Vec::with_capacity(n),
        f3: Vec::with_capacity(n),
    };
    for &lambda in &symbol.values {
        let w = etd4_weights(lambda, h);
        let finite = [w.e, w.e2, w.q, w.f1, w.f2, w.f3].iter().all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            return Err(Error::NonFinite("ETD weights"));
        }
        tab.e.push(w.e);
        tab.e2.push(w.e2);
        tab.q.push(w.q);
        tab.f1.push(w.f1);
        tab.f2.push(w.f2);
        tab.f3.push(w.f3);
    }
    Ok(tab)
}

/// Time-dependent solution in the half spectrum.
#[derive(Debug, Clone)]
pub struct EvolutionState<T: Real> {
    pub t: T,
    coeffs: Vec<C<T>>,
    grid: Grid2D<T>,
    params: FkpParams<T>,
}

impl<T: Real> EvolutionState<T> {
    /// Transforms `field` and projects out the `k_x = 0, k_y != 0` modes and
    /// the x-Nyquist column.
    pub fn from_field(field: &RealField2D<T>, params: FkpParams<T>, t: T) -> Result<Self> {
        params.validate()?;
        let grid = *field.grid();
        let mut fft = HalfSpectrum2D::new(grid.nx(), grid.ny());
        let mut coeffs = vec![czero(); fft.spectrum_len()];
        fft.forward(field.samples(), &mut coeffs);
        project(&grid, &mut coeffs);
        Ok(Self { t, coeffs, grid, params })
    }

    pub fn from_coeffs(coeffs: Vec<C<T>>, grid: Grid2D<T>, params: FkpParams<T>, t: T) -> Result<Self> {
        let expected = (grid.nx() / 2 + 1) * grid.ny();
        if coeffs.len() != expected {
            return Err(Error::Length { expected, actual: coeffs.len() });
        }
        let mut coeffs = coeffs;
        project(&grid, &mut coeffs);
        Ok(Self { t, coeffs, grid, params })
    }

    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }

    pub fn params(&self) -> &FkpParams<T> {
        &self.params
    }

    pub fn to_field(&self) -> Result<RealField2D<T>> {
        let mut fft = HalfSpectrum2D::new(self.grid.nx(), self.grid.ny());
        let mut out = vec![T::zero(); self.grid.len()];
        fft.inverse(&self.coeffs, &mut out);
        RealField2D::new(self.grid, out)
    }

    /// `int u^2 dx dy` by Parseval.
    pub fn mass(&self) -> T {
        half_spectrum_mass(&self.grid, &self.coeffs)
    }
}

fn project<T: Real>(grid: &Grid2D<T>, coeffs: &mut [C<T>]) {
    let nkx = grid.nx() / 2 + 1;
    for (iy, row) in coeffs.chunks_exact_mut(nkx).enumerate() {
        if iy != 0 {
            row[0] = czero();
        }
        row[nkx - 1] = czero();
    }
}

/// `dx dy / (nx ny) * sum |u_hat|^2` over the full spectrum reconstructed from
/// the half spectrum.
pub fn half_spectrum_mass<T: Real>(grid: &Grid2D<T>, coeffs: &[C<T>]) -> T {
    let nkx = grid.nx() / 2 + 1;
    let two = lit::<T>(2.0);
    let mut sum = T::zero();
    for row in coeffs.chunks_exact(nkx) {
        for (ikx, c) in row.iter().enumerate() {
            let w = if ikx == 0 || ikx == nkx - 1 { T::one() } else { two };
            sum = sum + w * c.norm_sqr();
        }
    }
    sum * grid.cell_area() / T::from_usize_lossy(grid.len())
}

/// Reusable transforms and buffers for repeated steps on one grid.
pub struct Stepper<T: Real> {
    grid: Grid2D<T>,
    params: FkpParams<T>,
    symbol: LinearSymbol<T>,
    tableau: EtdTableau<T>,
    fft: HalfSpectrum2D<T>,
    multiplier: Vec<C<T>>,
    phys: Vec<T>,
    bufs: [Vec<C<T>>; 6],
}

impl<T: Real> Stepper<T> {
    pub fn new(params: FkpParams<T>, grid: Grid2D<T>, h: T, dealias: bool) -> Result<Self> {
        Self::with_regularizer(params, grid, h, dealias, lit(DEFAULT_REGULARIZER))
    }

    pub fn with_regularizer(params: FkpParams<T>, grid: Grid2D<T>, h: T, dealias: bool, regularizer: T) -> Result<Self> {
        let symbol = LinearSymbol::new(&params, grid, regularizer)?;
        let tableau = etd4_tableau(&symbol, h)?;
        let nkx = symbol.nkx();
        let kx_cut = grid.x.dk() * T::from_usize_lossy(grid.nx()) / lit(3.0);
        let ky_cut = grid.y.dk() * T::from_usize_lossy(grid.ny()) / lit(3.0);
        let mut multiplier = Vec::with_capacity(symbol.values.len());
        for iy in 0..grid.ny() {
            let ky = grid.y.wavenumber(iy);
            for ikx in 0..nkx {
                let kx = grid.x.wavenumber(ikx);
                let cut = dealias && (kx.abs() > kx_cut || ky.abs() > ky_cut);
                if symbol.projected[iy * nkx + ikx] || cut {
                    multiplier.push(czero());
                } else {
                    multiplier.push(C::new(T::zero(), -kx * lit(0.5)));
                }
            }
        }
        let len = symbol.values.len();
        Ok(Self {
            grid,
            params,
            symbol,
            tableau,
            fft: HalfSpectrum2D::new(grid.nx(), grid.ny()),
            multiplier,
            phys: vec![T::zero(); grid.len()],
            bufs: std::array::from_fn(|_| vec![czero(); len]),
        })
    }

    /// Drops the nonlinear term: steps become multiplication by `e^{Lambda h}`.
    pub fn linear_only(mut self) -> Self {
        self.multiplier.iter_mut().for_each(|m| *m = czero());
        self
    }

    pub fn symbol(&self) -> &LinearSymbol<T> {
        &self.symbol
    }

    pub fn tableau(&self) -> &EtdTableau<T> {
        &self.tableau
    }

    pub fn step_size(&self) -> T {
        self.tableau.h
    }

    /// `-i (k_x/2) F[u^2]` for the half-spectrum input `coeffs`.
    pub fn nonlinear(&mut self, coeffs: &[C<T>], out: &mut [C<T>]) {
        nonlinear_into(&mut self.fft, &self.multiplier, &mut self.phys, coeffs, out);
    }

    /// Physical samples of a half-spectrum state.
    pub fn to_samples(&mut self, coeffs: &[C<T>], out: &mut [T]) {
        self.fft.inverse(coeffs, out);
    }

    /// One Cox-Matthews step. On a non-finite result the state is left
    /// unchanged and [`Error::BlowUp`] is returned.
    pub fn step(&mut self, state: &mut EvolutionState<T>) -> Result<()> {
        if state.grid != self.grid {
            return Err(Error::InvalidArgument("state grid differs from stepper grid".into()));
        }
        let tab = &self.tableau;
        let [nu, na, nb, nc, a, b] = &mut self.bufs;
        let u = &state.coeffs;
        nonlinear_into(&mut self.fft, &self.multiplier, &mut self.phys, u, nu);
        for j in 0..u.len() {
            a[j] = tab.e2[j] * u[j] + tab.q[j] * nu[j];
        }
        nonlinear_into(&mut self.fft, &self.multiplier, &mut self.phys, a, na);
        for j in 0..u.len() {
            b[j] = tab.e2[j] * u[j] + tab.q[j] * na[j];
        }
        nonlinear_into(&mut self.fft, &self.multiplier, &mut self.phys, b, nb);
        let two = lit::<T>(2.0);
        // reuse `b` for the third stage
        for j in 0..u.len() {
            b[j] = tab.e2[j] * a[j] + tab.q[j] * (nb[j] * two - nu[j]);
        }
        nonlinear_into(&mut self.fft, &self.multiplier, &mut self.phys, b, nc);
        let mut finite = true;
        for j in 0..u.len() {
            let v = tab.e[j] * u[j] + tab.f1[j] * nu[j] + tab.f2[j] * (na[j] + nb[j]) * two + tab.f3[j] * nc[j];
            finite &= v.re.is_finite() && v.im.is_finite();
            a[j] = v;
        }
        let t_next = state.t + tab.h;
        if !finite {
            return Err(Error::BlowUp { t: t_next.to_f64_lossy(), last_finite_t: state.t.to_f64_lossy() });
        }
        project(&self.grid, a);
        std::mem::swap(&mut state.coeffs, a);
        state.t = t_next;
        Ok(())
    }

    pub fn params(&self) -> &FkpParams<T> {
        &self.params
    }
}

fn nonlinear_into<T: Real>(
    fft: &mut HalfSpectrum2D<T>,
    multiplier: &[C<T>],
    phys: &mut [T],
    coeffs: &[C<T>],
    out: &mut [C<T>],
) {
    fft.inverse(coeffs, phys);
    for v in phys.iter_mut() {
        *v = *v * *v;
    }
    fft.forward(phys, out);
    for (o, m) in out.iter_mut().zip(multiplier) {
        *o = *o * *m;
    }
}

/// Samples after `steps` steps of size `h` from `initial`.
fn run_fixed<T: Real>(initial: &RealField2D<T>, params: FkpParams<T>, h: T, steps: usize) -> Result<Vec<T>> {
    let mut state = EvolutionState::from_field(initial, params, T::zero())?;
    let mut stepper = Stepper::new(params, *initial.grid(), h, false)?;
    for _ in 0..steps {
        stepper.step(&mut state)?;
    }
    Ok(state.to_field()?.into_samples())
}

/// Observed temporal convergence ratio
/// `||u_h - u_{h/2}||_inf / ||u_{h/2} - u_{h/4}||_inf` at `t = steps * h`;
/// close to 16 for a fourth-order scheme.
pub fn richardson_ratio<T: Real>(initial: &RealField2D<T>, params: FkpParams<T>, h: T, steps: usize) -> Result<T> {
    if steps == 0 || !(h > T::zero()) {
        return Err(Error::InvalidArgument("need a positive step and at least one step".into()));
    }
    let two = lit::<T>(2.0);
    let coarse = run_fixed(initial, params, h, steps)?;
    let mid = run_fixed(initial, params, h / two, 2 * steps)?;
    let fine = run_fixed(initial, params, h / (two * two), 4 * steps)?;
    let diff = |a: &[T], b: &[T]| a.iter().zip(b).fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()));
    let denom = diff(&mid, &fine);
    if denom == T::zero() {
        return Err(Error::InvalidArgument("solutions agree exactly; ratio undefined".into()));
    }
    Ok(diff(&coarse, &mid) / denom)
}

/// `-i (k_x/2) F[u^2]` of a state (allocates its own transform).
pub fn nonlinear_term<T: Real>(state: &EvolutionState<T>) -> Result<Vec<C<T>>> {
    let mut stepper = Stepper::new(state.params, state.grid, T::one(), false)?;
    let mut out = vec![czero(); state.coeffs.len()];
    stepper.nonlinear(&state.coeffs, &mut out);
    Ok(out)
}

/// One step with a freshly built stepper; prefer [`Stepper`] for loops.
pub fn etd4_step<T: Real>(state: &EvolutionState<T>, h: T) -> Result<EvolutionState<T>> {
    let mut stepper = Stepper::new(state.params, state.grid, h, false)?;
    let mut next = state.clone();
    stepper.step(&mut next)?;
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions<T> {
    pub dt: T,
    pub t_end: T,
    /// Observer stride in steps.
    pub cadence: usize,
    /// Apply the 2/3 rule to the nonlinear term.
    pub dealias: bool,
    pub mass_gate: T,
    pub regularizer: T,
}

impl<T: Real> EvolveOptions<T> {
    pub fn new(dt: T, t_end: T) -> Self {
        Self {
            dt,
            t_end,
            cadence: 100,
            dealias: false,
            mass_gate: lit(DEFAULT_MASS_GATE),
            regularizer: lit(DEFAULT_REGULARIZER),
        }
    }

    pub fn with_cadence(mut self, cadence: usize) -> Self {
        self.cadence = cadence;
        self
    }

    /// Number of steps covering `[0, t_end]`.
    pub fn step_count(&self) -> Result<usize> {
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        if !(self.t_end > T::zero() && self.t_end.is_finite()) {
            return Err(Error::InvalidArgument("t_end must be positive".into()));
        }
        if self.cadence == 0 {
            return Err(Error::InvalidArgument("cadence must be at least 1".into()));
        }
        let steps = (self.t_end / self.dt).round();
        let mismatch = (steps * self.dt - self.t_end).abs();
        if steps < T::one() || mismatch > lit::<T>(1e-6) * self.dt {
            return Err(Error::InvalidArgument("t_end must be a whole number of steps".into()));
        }
        steps.to_usize().ok_or_else(|| Error::InvalidArgument("step count overflow".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunStatus {
    Completed,
    GateViolated,
    BlowUp,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::GateViolated => "gate_violated",
            RunStatus::BlowUp => "blow_up",
        }
    }
}

impl std::fmt::Display for RunStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What an observer sees at each sampled step.
pub struct Observation<'a, T: Real> {
    pub step: usize,
    pub t: T,
    pub state: &'a EvolutionState<T>,
    pub field: &'a RealField2D<T>,
    pub mass: T,
    pub mass_rel_err: T,
}

#[derive(Debug, Clone)]
pub struct EvolveOutcome<T: Real> {
    pub status: RunStatus,
    /// Last finite state (the violating state for a gate abort).
    pub final_state: EvolutionState<T>,
    pub steps_taken: usize,
    pub gate_time: Option<T>,
    pub blow_up_time: Option<T>,
    pub max_mass_rel_err: T,
}

/// Integrates from `t = 0` to `opts.t_end`, calling `observer` at step 0,
/// every `opts.cadence` steps, at the final step and at an abort.
pub fn evolve<T: Real>(
    initial: &RealField2D<T>,
    params: FkpParams<T>,
    opts: &EvolveOptions<T>,
    observer: &mut dyn FnMut(&Observation<T>),
) -> Result<EvolveOutcome<T>> {
    let steps = opts.step_count()?;
    let grid = *initial.grid();
    let mut stepper = Stepper::with_regularizer(params, grid, opts.dt, opts.dealias, opts.regularizer)?;
    let mut state = EvolutionState::from_field(initial, params, T::zero())?;
    let m0 = state.mass();
    let rel = |m: T| if m0 > T::zero() { T::one() - m / m0 } else { T::zero() };
    let mut samples = vec![T::zero(); grid.len()];

    let mut emit = |stepper: &mut Stepper<T>, state: &EvolutionState<T>, step: usize| -> Result<()> {
        stepper.to_samples(&state.coeffs, &mut samples);
        let field = RealField2D::new(grid, samples.clone())?;
        let mass = state.mass();
        observer(&Observation { step, t: state.t, state, field: &field, mass, mass_rel_err: rel(mass) });
        Ok(())
    };

    emit(&mut stepper, &state, 0)?;
    let mut max_err = T::zero();
    let mut last_emitted = 0;
    for step in 1..=steps {
        let previous_t = state.t;
        match stepper.step(&mut state) {
            Ok(()) => {}
            Err(Error::BlowUp { .. }) => {
                if last_emitted != step - 1 {
                    emit(&mut stepper, &state, step - 1)?;
                }
                return Ok(EvolveOutcome {
                    status: RunStatus::BlowUp,
                    final_state: state,
                    steps_taken: step - 1,
                    gate_time: None,
                    blow_up_time: Some(previous_t + opts.dt),
                    max_mass_rel_err: max_err,
                });
            }
            Err(e) => return Err(e),
        }
        // keep t an exact multiple of dt
        state.t = T::from_usize_lossy(step) * opts.dt;
        let err = rel(state.mass()).abs();
        max_err = max_err.max(err);
        if err >= opts.mass_gate {
            emit(&mut stepper, &state, step)?;
            let t = state.t;
            return Ok(EvolveOutcome {
                status: RunStatus::GateViolated,
                final_state: state,
                steps_taken: step,
                gate_time: Some(t),
                blow_up_time: None,
                max_mass_rel_err: max_err,
            });
        }
        if step % opts.cadence == 0 || step == steps {
            emit(&mut stepper, &state, step)?;
            last_emitted = step;
        }
    }
    Ok(EvolveOutcome {
        status: RunStatus::Completed,
        final_state: state,
        steps_taken: steps,
        gate_time: None,
        blow_up_time: None,
        max_mass_rel_err: max_err,
    })
}
