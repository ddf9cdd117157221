//! Solitary-wave profiles of the fractional KdV equation
//! `D^alpha Q + c Q - Q^2/2 = 0` computed by Petviashvili iteration.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::params::FkpParams;
use crate::scalar::{lit, Real};
use crate::spectral::{apply_symbol, Fft1D, Grid1D, RealField1D, SymbolSpec, TrigInterpolant};

/// Largest admissible `|Q(±L)|` for a profile to be used on a periodic grid.
pub const BOUNDARY_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy)]
pub struct PetviashviliOptions<T> {
    /// Exponent of the stabilizing factor.
    pub gamma: T,
    pub max_iterations: usize,
    /// Relative sup-norm change between iterates required for convergence.
    pub step_tolerance: T,
    /// Relative sup-norm residual of the profile equation.
    pub residual_tolerance: T,
    /// Sup norm treated as divergence.
    pub divergence_bound: T,
    /// Move the crest to `x = 0` after convergence.
    pub recenter: bool,
    /// Reject profiles that do not decay below [`BOUNDARY_TOLERANCE`].
    pub check_boundary: bool,
}

impl<T: Real> Default for PetviashviliOptions<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        Self {
            gamma: lit(2.0),
            max_iterations: 10_000,
            step_tolerance: lit::<T>(1e-13).max(eps * lit(450.0)),
            residual_tolerance: lit::<T>(1e-10).max(eps * lit(100.0)),
            divergence_bound: lit(1e6),
            recenter: true,
            check_boundary: true,
        }
    }
}

/// A converged solitary profile `Q_c` together with convergence metadata.
#[derive(Debug, Clone)]
pub struct GroundState<T: Real> {
    pub params: FkpParams<T>,
    pub profile: RealField1D<T>,
    /// `||D^alpha Q + c Q - Q^2/2||_inf`.
    pub residual_sup: T,
    pub iterations: usize,
    pub s_factor_history: Vec<T>,
}

impl<T: Real> GroundState<T> {
    pub fn grid(&self) -> &Grid1D<T> {
        self.profile.grid()
    }

    pub fn samples(&self) -> &[T] {
        self.profile.samples()
    }

    pub fn amplitude(&self) -> T {
        self.profile.samples().iter().fold(T::neg_infinity(), |m, &v| m.max(v))
    }

    pub fn final_s_factor(&self) -> T {
        *self.s_factor_history.last().unwrap_or(&T::nan())
    }

    /// `|Q(-L)|`; by periodicity this is also the value at `+L`.
    pub fn boundary_value(&self) -> T {
        self.samples()[0].abs()
    }

    /// `max_j |Q(x_j) - Q(-x_j)|`.
    pub fn evenness_defect(&self) -> T {
        evenness_defect(self.samples())
    }

    /// Number of local maxima exceeding both neighbours by more than
    /// `tol * amplitude` (periodic neighbours).
    pub fn crest_count(&self, tol: T) -> usize {
        crest_count(self.samples(), tol)
    }

    /// Largest increase (relative to the amplitude) when walking from the
    /// crest towards either boundary. Zero for a strictly decreasing profile.
    pub fn monotonicity_defect(&self) -> T {
        let u = self.samples();
        let n = u.len();
        let amp = self.amplitude();
        let crest = argmax(u);
        let mut worst = T::zero();
        // walk right to the grid end, then left to index 0
        for j in crest..n - 1 {
            worst = worst.max(u[j + 1] - u[j]);
        }
        for j in (1..=crest).rev() {
            worst = worst.max(u[j - 1] - u[j]);
        }
        worst / amp
    }

    pub fn residual(&self) -> Result<T> {
        profile_residual(&self.params, &self.profile)
    }
}

fn argmax<T: Real>(u: &[T]) -> usize {
    u.iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
        .0
}

/// `max_j |u(x_j) - u(-x_j)|` on a grid symmetric about 0.
pub fn evenness_defect<T: Real>(u: &[T]) -> T {
    let n = u.len();
    (0..n).fold(T::zero(), |m, j| m.max((u[j] - u[(n - j) % n]).abs()))
}

pub fn crest_count<T: Real>(u: &[T], tol: T) -> usize {
    let n = u.len();
    let amp = u.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let margin = tol * amp;
    (0..n)
        .filter(|&j| {
            let l = u[(j + n - 1) % n];
            let r = u[(j + 1) % n];
            u[j] > l + margin && u[j] > r + margin
        })
        .count()
}

/// `||D^alpha u + c u - u^2/2||_inf`.
pub fn profile_residual<T: Real>(params: &FkpParams<T>, u: &RealField1D<T>) -> Result<T> {
    let d = apply_symbol(u, &SymbolSpec::Riesz(params.alpha))?;
    let half = lit::<T>(0.5);
    Ok(d.samples()
        .iter()
        .zip(u.samples())
        .fold(T::zero(), |m, (&du, &v)| m.max((du + params.c * v - half * v * v).abs())))
}

/// The `alpha = 2` solitary wave `3c sech^2(sqrt(c) x / 2)`.
pub fn kdv_soliton<T: Real>(c: T, x: T) -> T {
    let s = T::one() / (c.sqrt() * x * lit(0.5)).cosh();
    lit::<T>(3.0) * c * s * s
}

/// Solves the profile equation by Petviashvili iteration
/// `u_{m+1} = S_m^gamma F^{-1}[F[u_m^2/2] / (c + |k|^alpha)]` with
/// `S_m = <(c+|k|^alpha) u_m, u_m> / <u_m, u_m^2/2>` in Fourier space.
pub fn petviashvili_solve<T: Real>(
    params: FkpParams<T>,
    grid: Grid1D<T>,
    opts: &PetviashviliOptions<T>,
) -> Result<GroundState<T>> {
    params.validate()?;
    let n = grid.len();
    let fft = Fft1D::<T>::new(n);
    let half = lit::<T>(0.5);
    let denom: Vec<T> = grid.wavenumbers().iter().map(|k| params.c + k.abs().powf(params.alpha)).collect();
    let xs = grid.points();

    let mut u: Vec<T> = xs.iter().map(|&x| kdv_soliton(params.c, x)).collect();
    let initial_sup = sup(&u);
    let mut history = Vec::new();
    let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
    let mut nonlin = vec![Complex::new(T::zero(), T::zero()); n];

    for iteration in 1..=opts.max_iterations {
        for (b, &v) in buf.iter_mut().zip(&u) {
            *b = Complex::new(v, T::zero());
        }
        fft.forward_in_place(&mut buf);
        for (b, &v) in nonlin.iter_mut().zip(&u) {
            *b = Complex::new(half * v * v, T::zero());
        }
        fft.forward_in_place(&mut nonlin);

        let mut num = T::zero();
        let mut den = T::zero();
        for j in 0..n {
            num = num + denom[j] * buf[j].norm_sqr();
            den = den + (buf[j].conj() * nonlin[j]).re;
        }
        let s = num / den;
        history.push(s);
        if !s.is_finite() {
            return Err(Error::Divergence(f64::NAN));
        }

        // residual of the current iterate: (c + |k|^alpha) u_hat - F[u^2/2]
        let mut res: Vec<Complex<T>> = (0..n).map(|j| buf[j] * denom[j] - nonlin[j]).collect();
        fft.inverse_in_place(&mut res);
        let u_sup = sup(&u);
        let residual = res.iter().fold(T::zero(), |m, c| m.max(c.re.abs()));

        let factor = s.powf(opts.gamma);
        for j in 0..n {
            buf[j] = nonlin[j] * (factor / denom[j]);
        }
        fft.inverse_in_place(&mut buf);
        let mut step = T::zero();
        for (v, b) in u.iter_mut().zip(&buf) {
            step = step.max((*v - b.re).abs());
            *v = b.re;
        }
        let new_sup = sup(&u);
        if !new_sup.is_finite() || new_sup > opts.divergence_bound {
            return Err(Error::Divergence(new_sup.to_f64_lossy()));
        }
        if new_sup < initial_sup * lit(1e-12) {
            return Err(Error::NoConvergence { iterations: iteration, last_change: step.to_f64_lossy() });
        }
        if step <= opts.step_tolerance * u_sup && residual <= opts.residual_tolerance * u_sup {
            return finish(params, grid, u, iteration, history, opts);
        }
        if iteration == opts.max_iterations {
            return Err(Error::NoConvergence {
                iterations: iteration,
                last_change: (step / u_sup).to_f64_lossy(),
            });
        }
    }
    unreachable!("loop returns on the last iteration")
}

fn finish<T: Real>(
    params: FkpParams<T>,
    grid: Grid1D<T>,
    samples: Vec<T>,
    iterations: usize,
    history: Vec<T>,
    opts: &PetviashviliOptions<T>,
) -> Result<GroundState<T>> {
    let mut profile = RealField1D::new(grid, samples)?;
    if opts.recenter {
        let crest = locate_crest(&profile);
        if crest.abs() > T::epsilon() * grid.half_width() {
            profile = apply_symbol(&profile, &SymbolSpec::ShiftX(-crest))?;
        }
    }
    let residual_sup = profile_residual(&params, &profile)?;
    let state = GroundState { params, profile, residual_sup, iterations, s_factor_history: history };
    if opts.check_boundary && state.boundary_value() > lit(BOUNDARY_TOLERANCE) {
        return Err(Error::BoundaryNotSmall(state.boundary_value().to_f64_lossy()));
    }
    Ok(state)
}

/// Crest position of the trigonometric interpolant, refined by Newton's
/// method from the largest sample.
pub fn locate_crest<T: Real>(profile: &RealField1D<T>) -> T {
    let interp = TrigInterpolant::new(profile);
    let grid = profile.grid();
    let mut x = grid.point(argmax(profile.samples()));
    for _ in 0..50 {
        let (_, d1, d2) = interp.eval_with_derivatives(x);
        if d2 >= T::zero() {
            break;
        }
        let dx = d1 / d2;
        x = x - dx;
        if dx.abs() <= T::epsilon() * lit(4.0) * grid.half_width() {
            break;
        }
    }
    x
}

fn sup<T: Real>(u: &[T]) -> T {
    u.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// Rescales a normalized profile `Q` (solving `D^a Q + Q - Q^2 = 0`) to
/// `Q_c(z) = 2c Q(c^{1/alpha} z)` sampled on `target`.
pub fn rescale_ground_state<T: Real>(
    normalized: &RealField1D<T>,
    c: T,
    alpha: T,
    target: Grid1D<T>,
) -> Result<RealField1D<T>> {
    if !(c > T::zero()) {
        return Err(Error::Speed(c.to_f64_lossy()));
    }
    let stretch = c.powf(T::one() / alpha);
    let interp = TrigInterpolant::new(normalized);
    let src_l = normalized.grid().half_width();
    let two_c = lit::<T>(2.0) * c;
    let eval = |z: T| {
        let s = z * stretch;
        if s.abs() >= src_l {
            // outside the source period the profile is taken as its edge value
            two_c * normalized.samples()[0]
        } else {
            two_c * interp.eval(s)
        }
    };
    let samples: Vec<T> = target.points().into_iter().map(eval).collect();
    if samples[0].abs() > lit(BOUNDARY_TOLERANCE) {
        return Err(Error::BoundaryNotSmall(samples[0].abs().to_f64_lossy()));
    }
    RealField1D::new(target, samples)
}

/// Weinstein functional
/// `J(u) = (int |u|^3)^{-1} (int |D^{a/2} u|^2)^{1/(2a)} (int u^2)^{(a-1)/(2a) + 1}`.
///
/// The exponents make `J` invariant under `u -> lambda u` and under
/// dilations, so profiles of the normalized equation are critical points.
pub fn weinstein_functional<T: Real>(u: &RealField1D<T>, alpha: T) -> Result<T> {
    let grid = u.grid();
    let dx = grid.dx();
    let cubic = u.samples().iter().fold(T::zero(), |s, v| s + v.abs().powi(3)) * dx;
    if cubic == T::zero() {
        return Err(Error::InvalidArgument("Weinstein functional of the zero field".into()));
    }
    let mass = u.l2_norm_sq();
    let n = T::from_usize_lossy(grid.len());
    let dispersive = u
        .coeffs()
        .iter()
        .enumerate()
        .fold(T::zero(), |s, (j, c)| s + grid.wavenumber(j).abs().powf(alpha) * c.norm_sqr())
        * dx
        / n;
    let two = lit::<T>(2.0);
    let p_disp = T::one() / (two * alpha);
    let p_mass = (alpha - T::one()) / (two * alpha) + T::one();
    Ok(dispersive.powf(p_disp) * mass.powf(p_mass) / cubic)
}

/// Outcome of the algebraic tail fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit<T> {
    /// Fitted exponent `-p` of the periodized power law `C sum_j |x + 2Lj|^{-p}`.
    pub slope: T,
    /// Plain least-squares slope of `log|Q|` against `log|x|` over the same
    /// window (biased by the periodic images of the tail).
    pub naive_slope: T,
    pub window: (T, T),
}

/// Decay exponent of the algebraic tail of `Q` over `x in [0.5L, 0.9L]`.
///
/// On a periodic grid the tail is the superposition of the images
/// `Q(x + 2Lj)`, so the exponent is fitted against the periodized power law
/// rather than a single `|x|^{-p}`.
pub fn tail_decay_exponent<T: Real>(state: &GroundState<T>) -> Result<TailFit<T>> {
    let alpha = state.params.alpha;
    if alpha >= lit(2.0) {
        return Err(Error::InvalidArgument("algebraic tail requires alpha < 2".into()));
    }
    if state.boundary_value() > lit(BOUNDARY_TOLERANCE) {
        return Err(Error::BoundaryNotSmall(state.boundary_value().to_f64_lossy()));
    }
    let grid = state.grid();
    let l = grid.half_width();
    let floor = lit::<T>(1e-13);
    for upper in [0.9, 0.8, 0.7] {
        let (lo, hi) = (lit::<T>(0.5) * l, lit::<T>(upper) * l);
        let pts: Vec<(T, T)> = grid
            .points()
            .into_iter()
            .zip(state.samples().iter().copied())
            .filter(|(x, _)| *x >= lo && *x <= hi)
            .collect();
        let min = pts.iter().fold(T::infinity(), |m, (_, q)| m.min(q.abs()));
        if min < floor {
            continue;
        }
        return Ok(fit_tail(&pts, l, lo, hi));
    }
    let lo = lit::<T>(0.5) * l;
    let min = grid
        .points()
        .into_iter()
        .zip(state.samples())
        .filter(|(x, _)| *x >= lo)
        .fold(T::infinity(), |m, (_, q)| m.min(q.abs()));
    Err(Error::TailFloor(min.to_f64_lossy()))
}

fn periodized_power<T: Real>(x: T, l: T, p: T) -> T {
    const IMAGES: usize = 64;
    let two_l = lit::<T>(2.0) * l;
    let mut s = x.abs().powf(-p);
    for j in 1..=IMAGES {
        let shift = two_l * T::from_usize_lossy(j);
        s = s + (shift + x).powf(-p) + (shift - x).powf(-p);
    }
    // remaining images by the midpoint integral rule
    let edge = two_l * (T::from_usize_lossy(IMAGES) + lit(0.5));
    let q = T::one() - p;
    s + ((edge + x).powf(q) + (edge - x).powf(q)) / (two_l * (p - T::one()))
}

fn fit_tail<T: Real>(pts: &[(T, T)], l: T, lo: T, hi: T) -> TailFit<T> {
    let m = T::from_usize_lossy(pts.len());
    let ys: Vec<T> = pts.iter().map(|(_, q)| q.abs().ln()).collect();

    // naive log-log regression
    let xs: Vec<T> = pts.iter().map(|(x, _)| x.ln()).collect();
    let xm = xs.iter().fold(T::zero(), |s, &v| s + v) / m;
    let ym = ys.iter().fold(T::zero(), |s, &v| s + v) / m;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (x, y) in xs.iter().zip(&ys) {
        sxy = sxy + (*x - xm) * (*y - ym);
        sxx = sxx + (*x - xm) * (*x - xm);
    }
    let naive_slope = sxy / sxx;

    let cost = |p: T| {
        let g: Vec<T> = pts.iter().map(|(x, _)| periodized_power(*x, l, p).ln()).collect();
        let shift = ys.iter().zip(&g).fold(T::zero(), |s, (y, gi)| s + (*y - *gi)) / m;
        ys.iter().zip(&g).fold(T::zero(), |s, (y, gi)| {
            let r = *y - *gi - shift;
            s + r * r
        })
    };
    // golden-section search over the exponent
    let phi = (lit::<T>(5.0).sqrt() - T::one()) / lit(2.0);
    let (mut a, mut b) = (lit::<T>(1.05), lit::<T>(6.0));
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (cost(c), cost(d));
    for _ in 0..200 {
        if (b - a).abs() < lit(1e-10) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = cost(d);
        }
    }
    let p = (a + b) / lit(2.0);
    TailFit { slope: -p, naive_slope, window: (lo, hi) }
}
