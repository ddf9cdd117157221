//! Pseudo-spectral solvers for the fractional Kadomtsev-Petviashvili
//! equations `(u_t + u u_x - D^alpha u_x)_x + sigma u_yy = 0`.

pub mod bifurcation;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod ground_state;
pub mod linear_analysis;
pub mod params;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use params::{FkpParams, Sigma};
pub use scalar::Real;

pub type Grid1D64 = spectral::Grid1D<f64>;
pub type Grid2D64 = spectral::Grid2D<f64>;
pub type Field1D64 = spectral::RealField1D<f64>;
pub type Field2D64 = spectral::RealField2D<f64>;
pub type Params64 = params::FkpParams<f64>;
pub type GroundState64 = ground_state::GroundState<f64>;
pub type EvolutionState64 = evolution::EvolutionState<f64>;
pub type Stepper64 = evolution::Stepper<f64>;
pub type Series64 = diagnostics::DiagnosticsSeries<f64>;

pub type Grid1D32 = spectral::Grid1D<f32>;
pub type Grid2D32 = spectral::Grid2D<f32>;
pub type Field1D32 = spectral::RealField1D<f32>;
pub type Field2D32 = spectral::RealField2D<f32>;
pub type Params32 = params::FkpParams<f32>;
pub type GroundState32 = ground_state::GroundState<f32>;
pub type EvolutionState32 = evolution::EvolutionState<f32>;
pub type Stepper32 = evolution::Stepper<f32>;
