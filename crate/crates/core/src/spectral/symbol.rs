//! Fourier multipliers: Riesz potential, derivatives, antiderivative and
//! spectral translation.

use num_complex::Complex;

use super::field::{RealField1D, RealField2D};
use super::grid::Grid1D;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Fourier multiplier acting on a periodic field.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolSpec<T> {
    /// `|k_x|^alpha`, with `alpha` in `(1/3, 2]`.
    Riesz(T),
    /// `i k_x`.
    Dx,
    /// `i k_y` (2D fields only).
    Dy,
    /// `1/(i k_x)` on modes with `k_x != 0`; the `k_x = 0` modes map to zero.
    AntiDerivX,
    /// `exp(-i k_x a)`: translates the field by `a` in x.
    ShiftX(T),
    /// Arbitrary table in coefficient order.
    Custom(Vec<Complex<T>>),
}

impl<T: Real> SymbolSpec<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            SymbolSpec::Riesz(alpha) => {
                let a = alpha.to_f64_lossy();
                if !(a > 1.0 / 3.0 && a <= 2.0) {
                    return Err(Error::Alpha(a));
                }
            }
            SymbolSpec::ShiftX(a) if !a.is_finite() => return Err(Error::NonFinite("shift distance")),
            SymbolSpec::Custom(table) if table.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) => {
                return Err(Error::NonFinite("custom symbol table"))
            }
            _ => {}
        }
        Ok(())
    }

    /// Multiplier value at x-wavenumber slot `jx` (and y slot `jy` for 2D).
    fn value(&self, gx: &Grid1D<T>, jx: usize, gy: Option<&Grid1D<T>>, jy: usize) -> Complex<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let kx = gx.wavenumber(jx);
        let nyq_x = jx == gx.nyquist();
        match self {
            SymbolSpec::Riesz(alpha) => Complex::new(kx.abs().powf(*alpha), T::zero()),
            SymbolSpec::Dx => {
                if nyq_x {
                    zero
                } else {
                    Complex::new(T::zero(), kx)
                }
            }
            SymbolSpec::Dy => match gy {
                Some(gy) if jy != gy.nyquist() => Complex::new(T::zero(), gy.wavenumber(jy)),
                _ => zero,
            },
            SymbolSpec::AntiDerivX => {
                if kx == T::zero() || nyq_x {
                    zero
                } else {
                    Complex::new(T::zero(), -T::one() / kx)
                }
            }
            SymbolSpec::ShiftX(a) => {
                let phase = -kx * *a;
                Complex::new(phase.cos(), phase.sin())
            }
            SymbolSpec::Custom(_) => unreachable!("custom tables are indexed directly"),
        }
    }
}

fn mean_tolerance<T: Real>() -> T {
    lit::<T>(1e-10).max(T::epsilon() * lit(1e3))
}

/// Applies `spec` to a 1D field and returns the inverse transform.
pub fn apply_symbol<T: Real>(field: &RealField1D<T>, spec: &SymbolSpec<T>) -> Result<RealField1D<T>> {
    spec.validate()?;
    let grid = *field.grid();
    let coeffs = field.coeffs();
    if matches!(spec, SymbolSpec::Dy) {
        return Err(Error::InvalidArgument("d/dy requires a 2D field".into()));
    }
    if matches!(spec, SymbolSpec::AntiDerivX) {
        let scale = coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()));
        let mean = coeffs[0].norm();
        if scale > T::zero() && mean > mean_tolerance::<T>() * scale {
            return Err(Error::NonzeroMean((mean / scale).to_f64_lossy()));
        }
    }
    let out: Vec<Complex<T>> = match spec {
        SymbolSpec::Custom(table) => {
            if table.len() != coeffs.len() {
                return Err(Error::Length { expected: coeffs.len(), actual: table.len() });
            }
            coeffs.iter().zip(table).map(|(c, s)| c * s).collect()
        }
        _ => coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * spec.value(&grid, j, None, 0))
            .collect(),
    };
    RealField1D::from_coeffs(grid, &out)
}

/// Applies `spec` to a 2D field; x-multipliers act row by row.
pub fn apply_symbol_2d<T: Real>(field: &RealField2D<T>, spec: &SymbolSpec<T>) -> Result<RealField2D<T>> {
    spec.validate()?;
    let grid = *field.grid();
    let coeffs = field.coeffs();
    let nx = grid.nx();
    if matches!(spec, SymbolSpec::AntiDerivX) {
        let scale = coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()));
        let worst = (0..grid.ny()).fold(T::zero(), |m, jy| m.max(coeffs[jy * nx].norm()));
        if scale > T::zero() && worst > mean_tolerance::<T>() * scale {
            return Err(Error::NonzeroMean((worst / scale).to_f64_lossy()));
        }
    }
    let out: Vec<Complex<T>> = match spec {
        SymbolSpec::Custom(table) => {
            if table.len() != coeffs.len() {
                return Err(Error::Length { expected: coeffs.len(), actual: table.len() });
            }
            coeffs.iter().zip(table).map(|(c, s)| c * s).collect()
        }
        _ => coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| c * spec.value(&grid.x, idx % nx, Some(&grid.y), idx / nx))
            .collect(),
    };
    RealField2D::from_coeffs(grid, &out)
}

/// Translates samples by `shift` spectrally (band-limited interpolation).
pub fn shift_samples<T: Real>(grid: &Grid1D<T>, samples: &[T], shift: T) -> Result<Vec<T>> {
    let field = RealField1D::new(*grid, samples.to_vec())?;
    Ok(apply_symbol(&field, &SymbolSpec::ShiftX(shift))?.into_samples())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn riesz_on_single_mode() {
        let g = make_grid(std::f64::consts::PI * 4.0, 64).unwrap();
        let k = 3.0 * g.dk();
        for alpha in [0.5, 1.0, 1.5, 2.0] {
            let u = RealField1D::from_fn(g, |x| (k * x).cos()).unwrap();
            let v = apply_symbol(&u, &SymbolSpec::Riesz(alpha)).unwrap();
            for (x, vi) in g.points().iter().zip(v.samples()) {
                assert!((vi - k.powf(alpha) * (k * x).cos()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn riesz_kills_constants() {
        let g = make_grid(5.0_f64, 32).unwrap();
        let u = RealField1D::from_fn(g, |_| 2.5).unwrap();
        let v = apply_symbol(&u, &SymbolSpec::Riesz(1.2)).unwrap();
        assert!(v.sup_norm() < 1e-14);
    }

    #[test]
    fn riesz_range_enforced() {
        let g = make_grid(5.0_f64, 32).unwrap();
        let u = RealField1D::zeros(g);
        assert_eq!(apply_symbol(&u, &SymbolSpec::Riesz(0.3)).unwrap_err(), Error::Alpha(0.3));
        assert!(apply_symbol(&u, &SymbolSpec::Riesz(2.5)).is_err());
    }

    #[test]
    fn shift_translates_sech2() {
        let g = make_grid(40.0_f64, 512).unwrap();
        let prof = |x: f64| 6.0 / (x / 2f64.sqrt()).cosh().powi(2);
        let u = RealField1D::from_fn(g, prof).unwrap();
        for a in [0.37, -5.1, 12.0] {
            let v = apply_symbol(&u, &SymbolSpec::ShiftX(a)).unwrap();
            let err = g
                .points()
                .iter()
                .zip(v.samples())
                .fold(0.0_f64, |m, (x, vi)| m.max((vi - prof(x - a)).abs()));
            assert!(err < 1e-10, "shift {a}: {err}");
        }
    }

    #[test]
    fn derivative_and_antiderivative() {
        let g = make_grid(std::f64::consts::PI, 32).unwrap();
        let u = RealField1D::from_fn(g, |x| (2.0 * x).sin()).unwrap();
        let du = apply_symbol(&u, &SymbolSpec::Dx).unwrap();
        let back = apply_symbol(&du, &SymbolSpec::AntiDerivX).unwrap();
        for ((x, d), b) in g.points().iter().zip(du.samples()).zip(back.samples()) {
            assert!((d - 2.0 * (2.0 * x).cos()).abs() < 1e-12);
            assert!((b - (2.0 * x).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn antiderivative_rejects_mean() {
        let g = make_grid(std::f64::consts::PI, 32).unwrap();
        let u = RealField1D::from_fn(g, |x| 1.0 + x.sin()).unwrap();
        assert!(matches!(apply_symbol(&u, &SymbolSpec::AntiDerivX), Err(Error::NonzeroMean(_))));
    }

    #[test]
    fn dy_on_2d_field() {
        let g = crate::spectral::Grid2D::from_extents(std::f64::consts::PI, 16, std::f64::consts::PI, 16).unwrap();
        let u = RealField2D::from_fn(g, |x, y| x.cos() * (3.0 * y).sin()).unwrap();
        let v = apply_symbol_2d(&u, &SymbolSpec::Dy).unwrap();
        let w = RealField2D::from_fn(g, |x, y| 3.0 * x.cos() * (3.0 * y).cos()).unwrap();
        for (a, b) in v.samples().iter().zip(w.samples()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
