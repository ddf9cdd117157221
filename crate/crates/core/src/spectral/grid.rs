use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Uniform periodic grid on `[-L, L)`.
///
/// Points are `x_j = -L + j dx` with `dx = 2L/n`, wavenumbers `k_j = (pi/L) m_j`
/// where `m_j` runs over the signed DFT order `0, 1, .., n/2 - 1, -n/2, .., -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D<T> {
    half_width: T,
    n: usize,
}

impl<T: Real> Grid1D<T> {
    pub fn new(half_width: T, n: usize) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        if !(half_width.is_finite() && half_width > T::zero()) {
            return Err(Error::GridHalfWidth(half_width.to_f64_lossy()));
        }
        Ok(Self { half_width, n })
    }

    #[inline]
    pub fn half_width(&self) -> T {
        self.half_width
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Period `2L`.
    pub fn period(&self) -> T {
        lit::<T>(2.0) * self.half_width
    }

    pub fn dx(&self) -> T {
        self.period() / T::from_usize_lossy(self.n)
    }

    /// Spacing between adjacent wavenumbers, `pi/L`.
    pub fn dk(&self) -> T {
        T::PI() / self.half_width
    }

    #[inline]
    pub fn point(&self, j: usize) -> T {
        -self.half_width + T::from_usize_lossy(j) * self.dx()
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.n).map(|j| self.point(j)).collect()
    }

    /// Signed DFT index of slot `j`.
    #[inline]
    pub fn mode_index(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    #[inline]
    pub fn wavenumber(&self, j: usize) -> T {
        T::from_i64(self.mode_index(j)).unwrap() * self.dk()
    }

    pub fn wavenumbers(&self) -> Vec<T> {
        (0..self.n).map(|j| self.wavenumber(j)).collect()
    }

    /// Slot of the Nyquist mode `m = -n/2`.
    #[inline]
    pub fn nyquist(&self) -> usize {
        self.n / 2
    }

    /// Wavenumbers used by odd (derivative-like) multipliers: the Nyquist
    /// entry is zeroed since it has no real odd counterpart.
    pub fn odd_wavenumbers(&self) -> Vec<T> {
        let mut k = self.wavenumbers();
        k[self.nyquist()] = T::zero();
        k
    }
}

/// Tensor product of two periodic grids; samples are stored row-major with x
/// varying fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D<T> {
    pub x: Grid1D<T>,
    pub y: Grid1D<T>,
}

impl<T: Real> Grid2D<T> {
    pub fn new(x: Grid1D<T>, y: Grid1D<T>) -> Self {
        Self { x, y }
    }

    pub fn from_extents(lx: T, nx: usize, ly: T, ny: usize) -> Result<Self> {
        Ok(Self::new(Grid1D::new(lx, nx)?, Grid1D::new(ly, ny)?))
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn ny(&self) -> usize {
        self.y.len()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx() + ix
    }

    /// Area element `dx dy`.
    pub fn cell_area(&self) -> T {
        self.x.dx() * self.y.dx()
    }
}

/// Builds a validated [`Grid1D`].
pub fn make_grid<T: Real>(half_width: T, n: usize) -> Result<Grid1D<T>> {
    Grid1D::new(half_width, n)
}
