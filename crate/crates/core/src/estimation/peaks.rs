//! Peak picking on a sampled spectrum.

use crate::array::PhaseAngle;
use crate::error::{Error, Result};
use crate::estimation::spectrum::AoaSpectrum;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakClass {
    Strong,
    Weak,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak<T> {
    /// Refined angle.
    pub angle: PhaseAngle<T>,
    /// Refined magnitude.
    pub magnitude: T,
    /// Grid index of the sampled maximum.
    pub bin: usize,
    pub class: PeakClass,
}

/// How detected maxima are split into strong and weak peaks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectMode<T> {
    /// The `strong` largest maxima are strong and the next `weak` are weak.
    Count { strong: usize, weak: usize },
    /// Magnitude thresholds; `None` selects the defaults `0.5·max` and
    /// `4·1.4826·median`.
    Threshold { strong: Option<T>, weak: Option<T> },
}

/// Robust noise-floor scale `1.4826·median`.
pub fn robust_sigma<T: Real>(values: &[T]) -> T {
    if values.is_empty() {
        return T::zero();
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mid = v.len() / 2;
    let median = if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / T::lit(2.0)
    };
    T::lit(1.4826) * median
}

/// Circular local maxima refined by three-point parabolic interpolation,
/// sorted by refined magnitude, largest first.
///
/// A plateau counts once, at its first sample.
pub fn local_maxima<T: Real>(spec: &AoaSpectrum<T>) -> Vec<Peak<T>> {
    let v = &spec.values;
    let n = v.len();
    if n < 3 {
        return Vec::new();
    }
    let res = spec.resolution();
    let half = T::lit(0.5);
    let mut out = Vec::new();
    for i in 0..n {
        let l = v[(i + n - 1) % n];
        let c = v[i];
        let r = v[(i + 1) % n];
        if !(c > l && c >= r) {
            continue;
        }
        let den = l - T::lit(2.0) * c + r;
        let (delta, mag) = if den < T::zero() {
            let d = (half * (l - r) / den).max(-half).min(half);
            (d, c - T::lit(0.25) * (l - r) * d)
        } else {
            (T::zero(), c)
        };
        out.push(Peak {
            angle: PhaseAngle::new(res * (T::from_count(i) + delta)),
            magnitude: mag,
            bin: i,
            class: PeakClass::Weak,
        });
    }
    out.sort_by(|a, b| {
        b.magnitude
            .partial_cmp(&a.magnitude)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.bin.cmp(&b.bin))
    });
    out
}

/// Strong and weak peaks of `spec`, strong ones first.
///
/// In count mode, when fewer maxima exist than strong peaks requested, the
/// strongest maxima are repeated to fill the count (two paths inside one
/// main lobe show as one peak).
pub fn detect_peaks<T: Real>(spec: &AoaSpectrum<T>, mode: DetectMode<T>) -> Result<Vec<Peak<T>>> {
    if spec.values.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let maxima = local_maxima(spec);
    match mode {
        DetectMode::Count { strong, weak } => {
            let mut out = Vec::with_capacity(strong + weak);
            if strong > 0 && !maxima.is_empty() {
                for i in 0..strong {
                    let mut p = maxima[i % maxima.len().min(strong)];
                    p.class = PeakClass::Strong;
                    out.push(p);
                }
            }
            for p in maxima.iter().skip(strong).take(weak) {
                out.push(Peak {
                    class: PeakClass::Weak,
                    ..*p
                });
            }
            Ok(out)
        }
        DetectMode::Threshold { strong, weak } => {
            let theta_w = weak.unwrap_or_else(|| T::lit(4.0) * robust_sigma(&spec.values));
            let theta_s = strong.unwrap_or_else(|| T::lit(0.5) * spec.max_value());
            let mut out = Vec::new();
            for p in &maxima {
                if p.magnitude >= theta_s && p.magnitude >= theta_w {
                    out.push(Peak {
                        class: PeakClass::Strong,
                        ..*p
                    });
                }
            }
            for p in &maxima {
                if p.magnitude >= theta_w && p.magnitude < theta_s {
                    out.push(Peak {
                        class: PeakClass::Weak,
                        ..*p
                    });
                }
            }
            Ok(out)
        }
    }
}
