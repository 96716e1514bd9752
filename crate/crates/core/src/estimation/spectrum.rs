//! Beam-scan angle spectrum `F(Ω) = |v(Ω)ᴴ y| / N`.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::array::{steering_vector, PhaseAngle};
use crate::error::{Error, Result};
use crate::scalar::{dot_h, Real};

/// Spectrum samples on the uniform grid `Ω_i = 2πi / N_sam`.
#[derive(Debug, Clone, PartialEq)]
pub struct AoaSpectrum<T> {
    pub values: Vec<T>,
}

impl<T: Real> AoaSpectrum<T> {
    pub fn n_sam(&self) -> usize {
        self.values.len()
    }

    /// Grid spacing `R_scan = 2π / N_sam`.
    pub fn resolution(&self) -> T {
        T::TAU() / T::from_count(self.values.len())
    }

    pub fn angle(&self, i: usize) -> PhaseAngle<T> {
        PhaseAngle::new(self.resolution() * T::from_count(i))
    }

    /// Grid index nearest to `a`.
    pub fn nearest_bin(&self, a: PhaseAngle<T>) -> usize {
        let idx = (a.value() / self.resolution()).round().to_usize().unwrap_or(0);
        idx % self.values.len()
    }

    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::zero(), T::max)
    }
}

/// Default scan size, eight grid points per main-lobe width.
pub fn default_n_sam(n: usize) -> usize {
    8 * n
}

/// Symbol slots needed to scan `n_sam` beams with `n_rf` parallel chains.
pub fn scan_slots(n_sam: usize, n_rf: usize) -> usize {
    n_sam.div_ceil(n_rf.max(1))
}

/// `|v(Ω)ᴴ y| / N` at a single angle.
pub fn spectrum_value<T: Real>(obs: &[Complex<T>], omega: PhaseAngle<T>) -> T {
    let n = obs.len();
    dot_h(&steering_vector(omega, n), obs).norm() / T::from_count(n)
}

fn check_grid(n: usize, n_sam: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptySpectrum);
    }
    if n_sam < 2 * n {
        return Err(Error::InvalidArgument(format!(
            "scan size {n_sam} is below twice the array size {n}"
        )));
    }
    Ok(())
}

/// Spectrum by `N_sam` independent beam projections.
pub fn aoa_spectrum_direct<T: Real>(obs: &[Complex<T>], n_sam: usize) -> Result<AoaSpectrum<T>> {
    check_grid(obs.len(), n_sam)?;
    let res = T::TAU() / T::from_count(n_sam);
    let values = (0..n_sam)
        .map(|i| spectrum_value(obs, PhaseAngle::new(res * T::from_count(i))))
        .collect();
    Ok(AoaSpectrum { values })
}

/// Zero-padded DFT evaluation of the spectrum for a fixed array and scan
/// size; reusable across observations.
pub struct Scanner<T: Real> {
    n: usize,
    n_sam: usize,
    fft: Arc<dyn Fft<T>>,
}

impl<T: Real> Scanner<T> {
    pub fn new(n: usize, n_sam: usize) -> Result<Self> {
        check_grid(n, n_sam)?;
        let fft = FftPlanner::new().plan_fft_forward(n_sam);
        Ok(Self { n, n_sam, fft })
    }

    pub fn n_sam(&self) -> usize {
        self.n_sam
    }

    /// `v(Ω_i)ᴴ y = Σ_m y_m e^{−jmΩ_i}` is exactly bin `i` of the forward DFT
    /// of `y` zero-padded to `N_sam`.
    pub fn scan(&self, obs: &[Complex<T>]) -> Result<AoaSpectrum<T>> {
        if obs.len() != self.n {
            return Err(Error::DimensionMismatch {
                what: "observation length",
                expected: self.n,
                got: obs.len(),
            });
        }
        let mut buf = vec![Complex::new(T::zero(), T::zero()); self.n_sam];
        buf[..self.n].copy_from_slice(obs);
        self.fft.process(&mut buf);
        let inv_n = T::one() / T::from_count(self.n);
        Ok(AoaSpectrum {
            values: buf.iter().map(|z| z.norm() * inv_n).collect(),
        })
    }
}

/// Spectrum via one zero-padded DFT.
pub fn aoa_spectrum<T: Real>(obs: &[Complex<T>], n_sam: usize) -> Result<AoaSpectrum<T>> {
    Scanner::new(obs.len(), n_sam)?.scan(obs)
}

/// Elementwise mean of spectra sharing one grid.
pub fn average_spectra<T: Real>(spectra: &[AoaSpectrum<T>]) -> Result<AoaSpectrum<T>> {
    let first = spectra.first().ok_or(Error::EmptySpectrum)?;
    let mut values = vec![T::zero(); first.n_sam()];
    for s in spectra {
        if s.n_sam() != values.len() {
            return Err(Error::DimensionMismatch {
                what: "spectrum grid",
                expected: values.len(),
                got: s.n_sam(),
            });
        }
        for (v, x) in values.iter_mut().zip(&s.values) {
            *v += *x;
        }
    }
    let inv = T::one() / T::from_count(spectra.len());
    values.iter_mut().for_each(|v| *v *= inv);
    Ok(AoaSpectrum { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::complex_gaussian_vec;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    type C = Complex<f64>;

    #[test]
    fn single_path_peak_and_null() {
        let n = 64;
        let a = C::new(0.3, -1.1);
        // Put the path on a grid point so the peak is sampled exactly.
        let n_sam = 8 * n;
        let phi = PhaseAngle::new(TAU * 37.0 / n_sam as f64);
        let obs: Vec<C> = steering_vector(phi, n).iter().map(|v| v * a).collect();
        let s = aoa_spectrum(&obs, n_sam).unwrap();
        let peak = s.nearest_bin(phi);
        assert!((s.values[peak] - a.norm()).abs() < 1e-12);
        let null = (peak + 8) % n_sam;
        assert!(s.values[null] < 1e-12);
        assert!((spectrum_value(&obs, PhaseAngle::new(phi.value() + TAU / n as f64))).abs() < 1e-12);
    }

    #[test]
    fn zero_observation() {
        let s = aoa_spectrum(&[C::new(0.0, 0.0); 16], 64).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
        assert!(aoa_spectrum(&[C::new(0.0, 0.0); 16], 31).is_err());
        assert_eq!(scan_slots(1024, 4), 256);
        assert_eq!(scan_slots(1025, 4), 257);
    }

    #[test]
    fn averaging() {
        let a = AoaSpectrum { values: vec![1.0, 2.0] };
        let b = AoaSpectrum { values: vec![3.0, 0.0] };
        assert_eq!(average_spectra(&[a, b]).unwrap().values, vec![2.0, 1.0]);
        assert_eq!(average_spectra::<f64>(&[]), Err(Error::EmptySpectrum));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn fft_matches_direct(seed in any::<u64>(), n in 2usize..130, factor in 2usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let obs = complex_gaussian_vec(&mut rng, n, 1.0);
            let fast: AoaSpectrum<f64> = aoa_spectrum(&obs, factor * n).unwrap();
            let slow = aoa_spectrum_direct(&obs, factor * n).unwrap();
            for (&a, &b) in fast.values.iter().zip(&slow.values) {
                prop_assert!((a - b).abs() <= 1e-10);
            }
        }
    }
}
