//! Scalar abstraction shared by every numerical module.
//!
//! All array, Kronecker and beamforming math is written against [`Real`], which
//! is implemented for `f32` and `f64`. Complex quantities are
//! [`num_complex::Complex<T>`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, Signed, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Signed
    + Default
    + Debug
    + Display
    + Sum
    + Send
    + Sync
    + rustfft::FftNum
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        // Every finite f64 is representable (possibly rounded) in f32 and f64.
        Self::from_f64(x).expect("finite literal")
    }

    /// Converts a count into this scalar type.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits in a float")
    }

    /// Lossy conversion to `f64`, used for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{jθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

/// `e^{jkφ}` with the rounding error of the product `kφ` carried to first
/// order, so that `e^{jkφ}` built from different factorizations of `k`
/// agrees to a few ulps.
#[inline]
pub fn cis_multiple<T: Real>(k: usize, phi: T) -> Complex<T> {
    let kf = T::from_count(k);
    let p = kf * phi;
    let err = kf.mul_add(phi, -p);
    cis(p) * Complex::new(T::one(), err)
}

/// Unit-modulus complex number carrying the phase of `z`.
///
/// The phase of zero is taken as 0, so zero maps to `1`.
#[inline]
pub fn unit_phase<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.re == T::zero() && z.im == T::zero() {
        Complex::new(T::one(), T::zero())
    } else {
        cis(z.im.atan2(z.re))
    }
}

/// Hermitian inner product `aᴴ b`.
#[inline]
pub fn dot_h<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// Squared Euclidean norm.
#[inline]
pub fn norm_sqr<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Largest deviation of any element modulus from one.
pub fn max_modulus_deviation<T: Real>(a: &[Complex<T>]) -> T {
    a.iter()
        .map(|z| (z.norm() - T::one()).abs())
        .fold(T::zero(), T::max)
}

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `10·log10(x)`.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
