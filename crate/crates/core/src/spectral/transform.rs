//! Discrete Fourier transforms on periodic grids.
//!
//! Forward transforms are unnormalized, inverse transforms carry the `1/n`
//! factor, and coefficient slots follow the signed DFT order of
//! [`Grid1D::wavenumber`](super::Grid1D::wavenumber).

use std::sync::Arc;

use num_complex::Complex;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

fn check_finite<T: Real>(samples: &[T], what: &'static str) -> Result<()> {
    if samples.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Complex FFT pair of a fixed length.
#[derive(Clone)]
pub struct Fft1D<T: Real> {
    n: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for Fft1D<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft1D").field("n", &self.n).finish()
    }
}

impl<T: Real> Fft1D<T> {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward_in_place(&self, data: &mut [Complex<T>]) {
        self.forward.process(data);
    }

    /// Inverse transform including the `1/n` normalization.
    pub fn inverse_in_place(&self, data: &mut [Complex<T>]) {
        self.inverse.process(data);
        let scale = T::one() / T::from_usize_lossy(self.n);
        for v in data.iter_mut() {
            *v = *v * scale;
        }
    }

    pub fn forward_real(&self, samples: &[T]) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = samples.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.forward_in_place(&mut buf);
        buf
    }

    /// Inverse transform keeping the real part.
    pub fn inverse_real(&self, coeffs: &[Complex<T>]) -> Vec<T> {
        let mut buf = coeffs.to_vec();
        self.inverse_in_place(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }
}

/// Full complex 2D transform over row-major data (x fastest).
#[derive(Clone, Debug)]
pub struct Fft2D<T: Real> {
    nx: usize,
    ny: usize,
    fx: Fft1D<T>,
    fy: Fft1D<T>,
}

impl<T: Real> Fft2D<T> {
    pub fn new(nx: usize, ny: usize) -> Self {
        Self { nx, ny, fx: Fft1D::new(nx), fy: Fft1D::new(ny) }
    }

    fn columns(&self, data: &mut [Complex<T>], inverse: bool) {
        let mut col = vec![Complex::new(T::zero(), T::zero()); self.ny];
        for ix in 0..self.nx {
            for iy in 0..self.ny {
                col[iy] = data[iy * self.nx + ix];
            }
            if inverse {
                self.fy.inverse_in_place(&mut col);
            } else {
                self.fy.forward_in_place(&mut col);
            }
            for iy in 0..self.ny {
                data[iy * self.nx + ix] = col[iy];
            }
        }
    }

    pub fn forward_in_place(&self, data: &mut [Complex<T>]) {
        for row in data.chunks_exact_mut(self.nx) {
            self.fx.forward_in_place(row);
        }
        self.columns(data, false);
    }

    pub fn inverse_in_place(&self, data: &mut [Complex<T>]) {
        for row in data.chunks_exact_mut(self.nx) {
            self.fx.inverse_in_place(row);
        }
        self.columns(data, true);
    }

    pub fn forward_real(&self, samples: &[T]) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = samples.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.forward_in_place(&mut buf);
        buf
    }

    pub fn inverse_real(&self, coeffs: &[Complex<T>]) -> Vec<T> {
        let mut buf = coeffs.to_vec();
        self.inverse_in_place(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }
}

/// Real-to-half-spectrum 2D transform used by the time stepper.
///
/// Coefficients are stored row-major as `[iy][ikx]` with `ikx` in
/// `0..=nx/2` (non-negative x-wavenumbers) and `iy` in signed DFT order.
/// Missing negative x-wavenumbers are implied by Hermitian symmetry.
pub struct HalfSpectrum2D<T: Real> {
    nx: usize,
    ny: usize,
    r2c: Arc<dyn RealToComplex<T>>,
    c2r: Arc<dyn ComplexToReal<T>>,
    fy: Fft1D<T>,
    real_scratch: Vec<T>,
    row_scratch: Vec<Complex<T>>,
    col_scratch: Vec<Complex<T>>,
}

impl<T: Real> Clone for HalfSpectrum2D<T> {
    fn clone(&self) -> Self {
        Self::new(self.nx, self.ny)
    }
}

impl<T: Real> HalfSpectrum2D<T> {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = RealFftPlanner::<T>::new();
        let r2c = planner.plan_fft_forward(nx);
        let c2r = planner.plan_fft_inverse(nx);
        Self {
            nx,
            ny,
            r2c,
            c2r,
            fy: Fft1D::new(ny),
            real_scratch: vec![T::zero(); nx],
            row_scratch: vec![Complex::new(T::zero(), T::zero()); nx / 2 + 1],
            col_scratch: vec![Complex::new(T::zero(), T::zero()); ny],
        }
    }

    /// Number of stored x-wavenumbers, `nx/2 + 1`.
    #[inline]
    pub fn nkx(&self) -> usize {
        self.nx / 2 + 1
    }

    pub fn spectrum_len(&self) -> usize {
        self.nkx() * self.ny
    }

    pub fn forward(&mut self, samples: &[T], out: &mut [Complex<T>]) {
        let nkx = self.nkx();
        for (row_in, row_out) in samples.chunks_exact(self.nx).zip(out.chunks_exact_mut(nkx)) {
            self.real_scratch.copy_from_slice(row_in);
            self.r2c
                .process(&mut self.real_scratch, row_out)
                .expect("buffer sizes fixed at construction");
        }
        for ikx in 0..nkx {
            for iy in 0..self.ny {
                self.col_scratch[iy] = out[iy * nkx + ikx];
            }
            self.fy.forward_in_place(&mut self.col_scratch);
            for iy in 0..self.ny {
                out[iy * nkx + ikx] = self.col_scratch[iy];
            }
        }
    }

    /// Inverse transform with `1/(nx ny)` normalization. The input is left
    /// untouched.
    pub fn inverse(&mut self, coeffs: &[Complex<T>], out: &mut [T]) {
        let nkx = self.nkx();
        let mut work = coeffs.to_vec();
        for ikx in 0..nkx {
            for iy in 0..self.ny {
                self.col_scratch[iy] = work[iy * nkx + ikx];
            }
            self.fy.inverse.process(&mut self.col_scratch);
            for iy in 0..self.ny {
                work[iy * nkx + ikx] = self.col_scratch[iy];
            }
        }
        let scale = T::one() / T::from_usize_lossy(self.nx * self.ny);
        for (row_in, row_out) in work.chunks_exact(nkx).zip(out.chunks_exact_mut(self.nx)) {
            self.row_scratch.copy_from_slice(row_in);
            // the DC and Nyquist entries of a real row are real
            self.row_scratch[0].im = T::zero();
            self.row_scratch[nkx - 1].im = T::zero();
            self.c2r
                .process(&mut self.row_scratch, row_out)
                .expect("buffer sizes fixed at construction");
            for v in row_out.iter_mut() {
                *v = *v * scale;
            }
        }
    }
}

/// Forward transform of a real 1D signal, rejecting non-finite samples.
pub fn dft_forward<T: Real>(samples: &[T]) -> Result<Vec<Complex<T>>> {
    check_finite(samples, "dft input")?;
    Ok(Fft1D::new(samples.len()).forward_real(samples))
}

/// Inverse of [`dft_forward`], keeping the real part.
pub fn dft_inverse<T: Real>(coeffs: &[Complex<T>]) -> Vec<T> {
    Fft1D::new(coeffs.len()).inverse_real(coeffs)
}

pub(crate) fn ensure_finite<T: Real>(samples: &[T], what: &'static str) -> Result<()> {
    check_finite(samples, what)
}
