//! Kronecker-decomposition hybrid beamforming for uniform linear arrays.
//!
//! The crate builds uni-modulus analog beamformers as left-Kronecker products
//! of short factors, so that each factor can null one interference path while
//! the remaining factor is phase-aligned with the intended user's channel.
//! A low-dimension MMSE stage follows in baseband. A matching two-stage
//! estimator recovers the path angles by beam scanning and the path gains by
//! coherent combining or analog zero forcing.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`). The aliases
//! at the crate root fix the scalar to `f64`.

pub mod analog;
pub mod array;
pub mod digital;
pub mod estimation;
pub mod error;
pub mod hadamard;
pub mod kron;
pub mod linalg;
pub mod metrics;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::Real;

/// Complex `f64`.
pub type C64 = num_complex::Complex<f64>;
pub type Angle64 = array::PhaseAngle<f64>;
pub type Config64 = array::SystemConfig<f64>;
pub type Scenario64 = array::Scenario<f64>;
pub type Path64 = array::Path<f64>;
pub type Matrix64 = linalg::CMatrix<f64>;
pub type Factors64 = kron::KronFactors<f64>;
pub type Analog64 = analog::AnalogBeamformer<f64>;
pub type Hybrid64 = digital::HybridBeamformer<f64>;
