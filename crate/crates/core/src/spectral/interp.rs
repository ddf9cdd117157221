use num_complex::Complex;

use super::field::RealField1D;
use super::grid::Grid1D;
use crate::scalar::Real;

/// Trigonometric interpolant of a periodic sample set, evaluable off-grid.
#[derive(Debug, Clone)]
pub struct TrigInterpolant<T: Real> {
    grid: Grid1D<T>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> TrigInterpolant<T> {
    pub fn new(field: &RealField1D<T>) -> Self {
        Self { grid: *field.grid(), coeffs: field.coeffs().to_vec() }
    }

    /// Value and first two derivatives at `x`.
    pub fn eval_with_derivatives(&self, x: T) -> (T, T, T) {
        let n = T::from_usize_lossy(self.grid.len());
        let offset = x + self.grid.half_width();
        let (mut f, mut d1, mut d2) = (T::zero(), T::zero(), T::zero());
        for (j, c) in self.coeffs.iter().enumerate() {
            let k = self.grid.wavenumber(j);
            let phase = k * offset;
            let e = Complex::new(phase.cos(), phase.sin());
            let term = c * e;
            f = f + term.re;
            // d/dx multiplies by i k
            d1 = d1 - k * term.im;
            d2 = d2 - k * k * term.re;
        }
        (f / n, d1 / n, d2 / n)
    }

    pub fn eval(&self, x: T) -> T {
        self.eval_with_derivatives(x).0
    }
}
