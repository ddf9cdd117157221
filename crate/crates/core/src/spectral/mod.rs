//! Periodic grids, transforms and Fourier multipliers.

mod field;
mod gn;
mod grid;
mod interp;
mod symbol;
pub mod transform;

pub use field::{dft_pair, hermitian_defect, RealField1D, RealField2D};
pub use gn::{gn_inequality_check, gn_order, gn_random_suite, sobolev_seminorm_sq, GnSuiteReport};
pub use grid::{make_grid, Grid1D, Grid2D};
pub use interp::TrigInterpolant;
pub use symbol::{apply_symbol, apply_symbol_2d, shift_samples, SymbolSpec};
pub use transform::{dft_forward, dft_inverse, Fft1D, Fft2D, HalfSpectrum2D};
