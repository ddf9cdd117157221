use std::sync::OnceLock;

use num_complex::Complex;

use super::grid::{Grid1D, Grid2D};
use super::transform::{ensure_finite, Fft1D, Fft2D};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real samples on a 1D periodic grid with lazily cached DFT coefficients.
#[derive(Debug, Clone)]
pub struct RealField1D<T: Real> {
    grid: Grid1D<T>,
    samples: Vec<T>,
    coeffs: OnceLock<Vec<Complex<T>>>,
}

impl<T: Real> RealField1D<T> {
    pub fn new(grid: Grid1D<T>, samples: Vec<T>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Length { expected: grid.len(), actual: samples.len() });
        }
        ensure_finite(&samples, "field samples")?;
        Ok(Self { grid, samples, coeffs: OnceLock::new() })
    }

    pub fn from_fn(grid: Grid1D<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let samples = grid.points().into_iter().map(f).collect();
        Self::new(grid, samples)
    }

    pub fn zeros(grid: Grid1D<T>) -> Self {
        Self { grid, samples: vec![T::zero(); grid.len()], coeffs: OnceLock::new() }
    }

    /// Builds a field from spectral coefficients, keeping the real part of
    /// the inverse transform.
    pub fn from_coeffs(grid: Grid1D<T>, coeffs: &[Complex<T>]) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Length { expected: grid.len(), actual: coeffs.len() });
        }
        let samples = Fft1D::new(grid.len()).inverse_real(coeffs);
        Self::new(grid, samples)
    }

    #[inline]
    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    #[inline]
    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    /// Unnormalized DFT coefficients (computed once).
    pub fn coeffs(&self) -> &[Complex<T>] {
        self.coeffs.get_or_init(|| Fft1D::new(self.grid.len()).forward_real(&self.samples))
    }

    pub fn sup_norm(&self) -> T {
        self.samples.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// `sum |u_j|^2 dx`.
    pub fn l2_norm_sq(&self) -> T {
        self.samples.iter().fold(T::zero(), |s, &v| s + v * v) * self.grid.dx()
    }
}

/// Real samples on a 2D periodic grid, row-major with x fastest.
#[derive(Debug, Clone)]
pub struct RealField2D<T: Real> {
    grid: Grid2D<T>,
    samples: Vec<T>,
    coeffs: OnceLock<Vec<Complex<T>>>,
}

impl<T: Real> RealField2D<T> {
    pub fn new(grid: Grid2D<T>, samples: Vec<T>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Length { expected: grid.len(), actual: samples.len() });
        }
        ensure_finite(&samples, "field samples")?;
        Ok(Self { grid, samples, coeffs: OnceLock::new() })
    }

    pub fn from_fn(grid: Grid2D<T>, f: impl Fn(T, T) -> T) -> Result<Self> {
        let xs = grid.x.points();
        let ys = grid.y.points();
        let mut samples = Vec::with_capacity(grid.len());
        for &y in &ys {
            for &x in &xs {
                samples.push(f(x, y));
            }
        }
        Self::new(grid, samples)
    }

    pub fn zeros(grid: Grid2D<T>) -> Self {
        Self { grid, samples: vec![T::zero(); grid.len()], coeffs: OnceLock::new() }
    }

    /// Extends a 1D profile constantly in y.
    pub fn extend_in_y(grid: Grid2D<T>, profile: &[T]) -> Result<Self> {
        if profile.len() != grid.nx() {
            return Err(Error::Length { expected: grid.nx(), actual: profile.len() });
        }
        let mut samples = Vec::with_capacity(grid.len());
        for _ in 0..grid.ny() {
            samples.extend_from_slice(profile);
        }
        Self::new(grid, samples)
    }

    pub fn from_coeffs(grid: Grid2D<T>, coeffs: &[Complex<T>]) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Length { expected: grid.len(), actual: coeffs.len() });
        }
        let samples = Fft2D::new(grid.nx(), grid.ny()).inverse_real(coeffs);
        Self::new(grid, samples)
    }

    #[inline]
    pub fn grid(&self) -> &Grid2D<T> {
        &self.grid
    }

    #[inline]
    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> T {
        self.samples[self.grid.index(ix, iy)]
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        self.coeffs
            .get_or_init(|| Fft2D::new(self.grid.nx(), self.grid.ny()).forward_real(&self.samples))
    }

    pub fn sup_norm(&self) -> T {
        self.samples.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// Relative deviation from Hermitian symmetry `c(-m) = conj(c(m))` of a
/// full 1D coefficient vector.
pub fn hermitian_defect<T: Real>(coeffs: &[Complex<T>]) -> T {
    let n = coeffs.len();
    let scale = coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()));
    if scale == T::zero() {
        return T::zero();
    }
    let mut worst = T::zero();
    for j in 0..n {
        let mirror = (n - j) % n;
        worst = worst.max((coeffs[j] - coeffs[mirror].conj()).norm());
    }
    worst / scale
}

/// Forward transform of a real field; see [`super::transform`] for the
/// normalization convention.
pub fn dft_pair<T: Real>(field: &RealField1D<T>) -> (Vec<Complex<T>>, Vec<T>) {
    let coeffs = field.coeffs().to_vec();
    let back = Fft1D::new(coeffs.len()).inverse_real(&coeffs);
    (coeffs, back)
}
