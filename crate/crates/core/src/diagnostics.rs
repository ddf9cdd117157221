//! Conserved quantities, norms, perturbation residuals and threshold
//! crossing times.

use std::fmt::Write as _;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::evolution::{EvolutionState, Observation};
use crate::params::FkpParams;
use crate::scalar::{lit, Real};
use crate::spectral::{apply_symbol, Grid2D, HalfSpectrum2D, RealField1D, RealField2D, SymbolSpec};

pub const CSV_HEADER: &str = "t,sup_norm,mass,mass_rel_err,perturbation_sup,energy";

/// `int u^2 dx dy` by the trapezoidal rule (exact for band-limited `u^2`).
pub fn mass<T: Real>(u: &RealField2D<T>) -> T {
    u.samples().iter().fold(T::zero(), |s, &v| s + v * v) * u.grid().cell_area()
}

/// `E = int (D^{a/2} u)^2/2 - u^3/6 - sigma (d_x^{-1} u_y)^2/2`.
///
/// Requires the `k_x = 0, k_y != 0` modes of `u` to vanish.
pub fn energy<T: Real>(u: &RealField2D<T>, params: &FkpParams<T>) -> Result<T> {
    let grid = *u.grid();
    let mut fft = HalfSpectrum2D::new(grid.nx(), grid.ny());
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); fft.spectrum_len()];
    fft.forward(u.samples(), &mut coeffs);
    let nkx = fft.nkx();
    let scale = coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()));
    let worst = (1..grid.ny()).fold(T::zero(), |m, iy| m.max(coeffs[iy * nkx].norm()));
    let tol = lit::<T>(1e-10).max(T::epsilon() * lit(1e3));
    if worst > tol * scale {
        return Err(Error::NonzeroMean((worst / scale).to_f64_lossy()));
    }
    Ok(half_spectrum_energy(&grid, &coeffs, u.samples(), params))
}

/// Energy of an evolution state sampled at `samples`.
pub fn state_energy<T: Real>(state: &EvolutionState<T>, samples: &[T]) -> T {
    half_spectrum_energy(state.grid(), state.coeffs(), samples, state.params())
}

fn half_spectrum_energy<T: Real>(grid: &Grid2D<T>, coeffs: &[Complex<T>], samples: &[T], params: &FkpParams<T>) -> T {
    let nkx = grid.nx() / 2 + 1;
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let sigma = params.sigma_value();
    let mut dispersive = T::zero();
    let mut transverse = T::zero();
    for (iy, row) in coeffs.chunks_exact(nkx).enumerate() {
        let ky = grid.y.wavenumber(iy);
        for (ikx, c) in row.iter().enumerate() {
            let nyquist = ikx == nkx - 1;
            let w = if ikx == 0 || nyquist { T::one() } else { two };
            let kx = grid.x.wavenumber(ikx).abs();
            let p = c.norm_sqr() * w;
            dispersive = dispersive + kx.powf(params.alpha) * p;
            if ikx != 0 && !nyquist {
                transverse = transverse + ky * ky / (kx * kx) * p;
            }
        }
    }
    let norm = grid.cell_area() / T::from_usize_lossy(grid.len());
    let cubic = samples.iter().fold(T::zero(), |s, &v| s + v * v * v) * grid.cell_area();
    half * dispersive * norm - cubic / lit(6.0) - half * sigma * transverse * norm
}

/// `1 - M_i/M_0` for each entry.
pub fn mass_rel_error<T: Real>(masses: &[T]) -> Result<Vec<T>> {
    let m0 = *masses.first().ok_or(Error::EmptySeries)?;
    if !(m0 > T::zero()) {
        return Err(Error::InvalidArgument("initial mass must be positive".into()));
    }
    Ok(masses.iter().map(|&m| T::one() - m / m0).collect())
}

/// `||u - Q(x - c t) (x) 1_y||_inf` with the carrier translated spectrally
/// (modulo the period).
pub fn perturbation_residual<T: Real>(u: &RealField2D<T>, carrier: &RealField1D<T>, c: T, t: T) -> Result<T> {
    let grid = u.grid();
    if carrier.grid() != &grid.x {
        return Err(Error::InvalidArgument("carrier grid differs from the field's x grid".into()));
    }
    let moved = apply_symbol(carrier, &SymbolSpec::ShiftX(c * t))?;
    let q = moved.samples();
    Ok(u
        .samples()
        .chunks_exact(grid.nx())
        .flat_map(|row| row.iter().zip(q).map(|(a, b)| (*a - *b).abs()))
        .fold(T::zero(), T::max))
}

/// First time the sampled `signal` crosses `factor * reference`, linearly
/// interpolated. The crossing direction is upward when the target lies above
/// the first sample and downward otherwise.
pub fn crossing_time<T: Real>(times: &[T], signal: &[T], reference: T, factor: T) -> Result<Option<T>> {
    if times.is_empty() {
        return Err(Error::EmptySeries);
    }
    if times.len() != signal.len() {
        return Err(Error::Length { expected: times.len(), actual: signal.len() });
    }
    if !(factor > T::zero()) {
        return Err(Error::InvalidArgument("factor must be positive".into()));
    }
    let target = factor * reference;
    let upward = target > signal[0];
    let reached = |v: T| if upward { v >= target } else { v <= target };
    if reached(signal[0]) && target == signal[0] {
        return Ok(Some(times[0]));
    }
    for i in 1..signal.len() {
        if reached(signal[i]) {
            let (s0, s1) = (signal[i - 1], signal[i]);
            let frac = if s1 == s0 { T::one() } else { (target - s0) / (s1 - s0) };
            return Ok(Some(times[i - 1] + frac * (times[i] - times[i - 1])));
        }
    }
    Ok(None)
}

/// One sampled row of a [`DiagnosticsSeries`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow<T> {
    pub t: T,
    pub sup_norm: T,
    pub mass: T,
    pub mass_rel_err: T,
    pub perturbation_sup: Option<T>,
    pub energy: Option<T>,
}

/// Time series of diagnostics with strictly increasing times.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsSeries<T> {
    rows: Vec<DiagnosticsRow<T>>,
}

impl<T: Real> DiagnosticsSeries<T> {
    pub fn new() -> Self {
        Self { rows: Vec::new() }
    }

    pub fn push(&mut self, row: DiagnosticsRow<T>) -> Result<()> {
        if let Some(last) = self.rows.last() {
            if !(row.t > last.t) {
                return Err(Error::InvalidArgument("diagnostic times must increase".into()));
            }
        } else if row.mass_rel_err != T::zero() {
            return Err(Error::InvalidArgument("first relative mass error must be zero".into()));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[DiagnosticsRow<T>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&DiagnosticsRow<T>> {
        self.rows.last()
    }

    pub fn times(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn sup_norms(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.sup_norm).collect()
    }

    pub fn masses(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.mass).collect()
    }

    pub fn mass_rel_errs(&self) -> Vec<T> {
        self.rows.iter().map(|r| r.mass_rel_err).collect()
    }

    /// Perturbation residuals, when every row carries one.
    pub fn perturbation_sups(&self) -> Option<Vec<T>> {
        self.rows.iter().map(|r| r.perturbation_sup).collect()
    }

    pub fn energies(&self) -> Option<Vec<T>> {
        self.rows.iter().map(|r| r.energy).collect()
    }

    pub fn max_sup_norm(&self) -> Option<T> {
        self.rows.iter().map(|r| r.sup_norm).reduce(T::max)
    }

    /// First time the sup norm reaches `factor` times its initial value.
    pub fn doubling_time(&self, factor: T) -> Result<Option<T>> {
        let sup = self.sup_norms();
        let first = *sup.first().ok_or(Error::EmptySeries)?;
        crossing_time(&self.times(), &sup, first, factor)
    }

    /// First time the perturbation residual falls to `factor` times its
    /// initial value.
    pub fn halving_time(&self, factor: T) -> Result<Option<T>> {
        let res = self.perturbation_sups().ok_or_else(|| {
            Error::InvalidArgument("series has no perturbation residual".into())
        })?;
        let first = *res.first().ok_or(Error::EmptySeries)?;
        crossing_time(&self.times(), &res, first, factor)
    }

    /// CSV text with the mandatory header; floats carry 17 significant
    /// digits and missing optional values are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(96 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        let num = |v: T| format!("{:.16e}", v.to_f64_lossy());
        let opt = |v: Option<T>| v.map(num).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                num(r.t),
                num(r.sup_norm),
                num(r.mass),
                num(r.mass_rel_err),
                opt(r.perturbation_sup),
                opt(r.energy)
            );
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(CSV_HEADER) {
            return Err(Error::InvalidArgument("missing or malformed CSV header".into()));
        }
        let parse = |s: &str| -> Result<T> {
            let v: f64 = s.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad number {s:?}")))?;
            T::from_f64(v).ok_or(Error::NonFinite("CSV value"))
        };
        let mut series = Self::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 6 {
                return Err(Error::InvalidArgument(format!("expected 6 columns, got {}", cols.len())));
            }
            let opt = |s: &str| if s.trim().is_empty() { Ok(None) } else { parse(s).map(Some) };
            series.push(DiagnosticsRow {
                t: parse(cols[0])?,
                sup_norm: parse(cols[1])?,
                mass: parse(cols[2])?,
                mass_rel_err: parse(cols[3])?,
                perturbation_sup: opt(cols[4])?,
                energy: opt(cols[5])?,
            })?;
        }
        Ok(series)
    }
}

/// Builds a [`DiagnosticsSeries`] from evolution observations.
#[derive(Debug, Clone)]
pub struct SeriesRecorder<T: Real> {
    series: DiagnosticsSeries<T>,
    carrier: Option<(RealField1D<T>, T)>,
    with_energy: bool,
    error: Option<Error>,
}

impl<T: Real> SeriesRecorder<T> {
    pub fn new(with_energy: bool) -> Self {
        Self { series: DiagnosticsSeries::new(), carrier: None, with_energy, error: None }
    }

    /// Also records `||u - Q(x - c t)||_inf` for the given carrier profile.
    pub fn with_carrier(mut self, carrier: RealField1D<T>, c: T) -> Self {
        self.carrier = Some((carrier, c));
        self
    }

    pub fn record(&mut self, obs: &Observation<T>) {
        if self.error.is_some() {
            return;
        }
        let perturbation_sup = match &self.carrier {
            Some((q, c)) => match perturbation_residual(obs.field, q, *c, obs.t) {
                Ok(v) => Some(v),
                Err(e) => {
                    self.error = Some(e);
                    return;
                }
            },
            None => None,
        };
        let energy = self.with_energy.then(|| state_energy(obs.state, obs.field.samples()));
        let row = DiagnosticsRow {
            t: obs.t,
            sup_norm: obs.field.sup_norm(),
            mass: obs.mass,
            mass_rel_err: obs.mass_rel_err,
            perturbation_sup,
            energy,
        };
        if let Err(e) = self.series.push(row) {
            self.error = Some(e);
        }
    }

    pub fn finish(self) -> Result<DiagnosticsSeries<T>> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.series),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Sigma;

    fn box_grid() -> Grid2D<f64> {
        Grid2D::from_extents(60.0, 512, 30.0, 128).unwrap()
    }

    #[test]
    fn mass_of_constant_and_soliton() {
        let g = box_grid();
        assert!((mass(&RealField2D::from_fn(g, |_, _| 1.0).unwrap()) - 7200.0).abs() < 1e-9);
        assert_eq!(mass(&RealField2D::zeros(g)), 0.0);
        let sol = RealField2D::from_fn(g, |x: f64, _| 6.0 / (x / 2f64.sqrt()).cosh().powi(2)).unwrap();
        let exact = 60.0 * 48.0 * 2f64.sqrt();
        assert!((mass(&sol) - exact).abs() < 1e-8, "{}", mass(&sol));
    }

    #[test]
    fn energy_of_y_independent_field_has_no_transverse_part() {
        let g = Grid2D::from_extents(20.0, 128, 5.0, 16).unwrap();
        let u = RealField2D::from_fn(g, |x: f64, _| (-x * x).exp()).unwrap();
        let p1 = FkpParams::new(1.5, Sigma::KpI, 1.0).unwrap();
        let p2 = FkpParams::new(1.5, Sigma::KpII, 1.0).unwrap();
        assert!((energy(&u, &p1).unwrap() - energy(&u, &p2).unwrap()).abs() < 1e-14);
        assert_eq!(energy(&RealField2D::zeros(g), &p1).unwrap(), 0.0);
    }

    #[test]
    fn energy_rejects_transverse_mean() {
        let g = Grid2D::from_extents(20.0, 64, 5.0, 16).unwrap();
        let u = RealField2D::from_fn(g, |_, y: f64| (std::f64::consts::PI * y / 5.0).cos()).unwrap();
        let p = FkpParams::new(2.0, Sigma::KpI, 1.0).unwrap();
        assert!(matches!(energy(&u, &p), Err(Error::NonzeroMean(_))));
    }

    #[test]
    fn crossing_examples() {
        let t = [0.0f64, 1.0, 2.0];
        let v = crossing_time(&t, &[1.0, 1.5, 2.1], 1.0, 2.0).unwrap().unwrap();
        assert!((v - (1.0 + 0.5 / 0.6)).abs() < 1e-14);
        assert_eq!(crossing_time(&t, &[1.0, 1.0, 1.0], 1.0, 2.0).unwrap(), None);
        let down = crossing_time(&t, &[1.0, 0.8, 0.4], 1.0, 0.5).unwrap().unwrap();
        assert!((down - 1.75).abs() < 1e-14);
        assert!(crossing_time::<f64>(&[], &[], 1.0, 2.0).is_err());
        assert!(crossing_time(&t, &[1.0, 1.5, 2.1], 1.0, 0.0).is_err());
    }

    #[test]
    fn mass_rel_error_examples() {
        assert_eq!(mass_rel_error(&[2.0, 2.0, 2.0]).unwrap(), vec![0.0; 3]);
        assert!(mass_rel_error::<f64>(&[]).is_err());
        assert!(mass_rel_error(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let mut s = DiagnosticsSeries::new();
        s.push(DiagnosticsRow { t: 0.0, sup_norm: 6.0, mass: 1.0 / 3.0, mass_rel_err: 0.0, perturbation_sup: Some(0.6), energy: None })
            .unwrap();
        s.push(DiagnosticsRow { t: 0.1, sup_norm: 6.1, mass: 0.3, mass_rel_err: 0.1, perturbation_sup: Some(0.5), energy: None })
            .unwrap();
        let text = s.to_csv();
        assert!(text.starts_with("t,sup_norm,mass,mass_rel_err,perturbation_sup,energy\n"));
        assert_eq!(DiagnosticsSeries::<f64>::from_csv(&text).unwrap(), s);
        assert!(s.push(DiagnosticsRow { t: 0.1, ..s.rows()[1] }).is_err());
    }
}
