//! Numerics for the second-order weighted Caffarelli-Kohn-Nirenberg inequality
//!
//! ```text
//! S ( ∫ |x|^γ |u|^p )^{2/p} ≤ ∫ |x|^{-β} |div(|x|^α ∇u)|²
//! ```
//!
//! in dimension `N ≥ 5`. The crate derives every parameter-dependent scalar,
//! evaluates the closed-form extremal and sharp constants, discretizes the
//! radial and single-mode quotients on logarithmic grids, solves the
//! linearized eigenproblems around the extremal and checks the identities the
//! theory rests on.
//!
//! All routines are generic over [`Real`] (`f32` or `f64`). The aliases at the
//! crate root fix `f64`, which is what the tolerances in the test-suite assume.

mod banded;
pub mod closedform;
mod error;
pub mod identities;
pub mod numerics;
pub mod params;
mod scalar;
pub mod spectral;
pub mod transforms;
pub mod variational;

pub use error::{CknError, Result};
pub use scalar::{lit, Real};

pub type CknParams64 = params::CknParams<f64>;
pub type CknParams32 = params::CknParams<f32>;
pub type LogGrid64 = numerics::LogGrid<f64>;
pub type RadialProfile64 = numerics::RadialProfile<f64>;



pub type EmdenFowlerProfile64 = transforms::EmdenFowlerProfile<f64>;
pub type ModeSpec64 = variational::ModeSpec<f64>;
pub type SpectralResult64 = spectral::SpectralResult<f64>;
