//! Path-gain estimators given an estimated angle.

use num_complex::Complex;

use crate::analog::{kron_zf_beamformer, AnalogOptions};
use crate::array::{steering_vector, PhaseAngle};
use crate::error::{Error, Result};
use crate::kron::FactorShape;
use crate::scalar::{dot_h, Real};

/// Coherent combining: `â = v(Φ̂)ᴴ y / N`.
pub fn gain_cc<T: Real>(obs: &[Complex<T>], angle: PhaseAngle<T>) -> Complex<T> {
    let n = obs.len();
    dot_h(&steering_vector(angle, n), obs) / T::from_count(n)
}

/// Analog zero forcing: `â = fᴴ y / (fᴴ v(Φ̂))` with `f` nulling every angle
/// in `nulls`.
pub fn gain_zf<T: Real>(
    obs: &[Complex<T>],
    target: PhaseAngle<T>,
    nulls: &[PhaseAngle<T>],
    shape: &FactorShape,
    opts: &AnalogOptions,
) -> Result<Complex<T>> {
    let n = obs.len();
    if shape.total() != n {
        return Err(Error::DimensionMismatch {
            what: "factor shape total",
            expected: n,
            got: shape.total(),
        });
    }
    let col = kron_zf_beamformer(target, nulls, shape, opts)?;
    if col.is_degenerate() {
        return Err(Error::DegenerateScenario);
    }
    let resp = dot_h(&col.weights, &steering_vector(target, n));
    Ok(dot_h(&col.weights, obs) / resp)
}

/// `ρ/√N + |Φ − Θ|/2`, the predicted ratio of mean CC error to mean ZF
/// error for one data path and one interferer.
pub fn predicted_error_ratio<T: Real>(rho: T, n: usize, phi: PhaseAngle<T>, theta: PhaseAngle<T>) -> T {
    rho / T::from_count(n).sqrt() + phi.circular_distance(theta) / T::lit(2.0)
}
