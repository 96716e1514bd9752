//! Two-stage channel estimation from one training block.
//!
//! Each user's stream is despread with its pilot and normalized by
//! `√(Z P_k)`, so its data paths appear with their own gains while
//! interferers leak in through the contamination factors `γ_n / √Z`. Data
//! angles come from the strongest spectrum peaks of each stream, the
//! interference angles from the averaged spectrum after the estimated data
//! paths are subtracted, and the data gains from coherent combining or
//! analog zero forcing.

use num_complex::Complex;
use rand::Rng;

use crate::analog::{AnalogOptions, PartialCsi};
use crate::array::{complex_gaussian_matrix, received_training_matrix, steering_vector, Path, PhaseAngle, Scenario};
use crate::error::{check_len, Result};
use crate::estimation::gains::{gain_cc, gain_zf};
use crate::estimation::peaks::{detect_peaks, local_maxima, robust_sigma, DetectMode, Peak, PeakClass};
use crate::estimation::pilots::{to_symbols, PilotBook};
use crate::estimation::spectrum::{average_spectra, AoaSpectrum, Scanner};
use crate::kron::{prime_factorization, FactorShape};
use crate::linalg::CMatrix;
use crate::scalar::Real;

/// Simulates one training block: user `k` sends `√P_k x_k`, interferer `n`
/// sends `√P'_n s_n`, and `CN(0, N₀)` noise is added.
pub fn transmit_training<T: Real, R: Rng + ?Sized>(s: &Scenario<T>, pilots: &PilotBook, rng: &mut R) -> Result<CMatrix<T>> {
    let c = &s.config;
    check_len("intended pilots", c.k, pilots.intended.len())?;
    check_len("interferer pilots", c.m, pilots.interfering.len())?;
    let x: Vec<_> = pilots
        .intended
        .iter()
        .zip(&c.user_power)
        .map(|(p, &pw)| to_symbols(p, pw.sqrt()))
        .collect();
    let sv: Vec<_> = pilots
        .interfering
        .iter()
        .zip(&c.interferer_power)
        .map(|(p, &pw)| to_symbols(p, pw.sqrt()))
        .collect();
    let noise = complex_gaussian_matrix(rng, c.n, pilots.len(), c.noise_var);
    received_training_matrix(s, &x, &sv, &noise)
}

/// `Y x / √Z`.
pub fn despread<T: Real>(y: &CMatrix<T>, pilot: &[i8]) -> Result<Vec<Complex<T>>> {
    check_len("pilot length", y.cols(), pilot.len())?;
    let x = to_symbols(pilot, T::one() / T::from_count(pilot.len()).sqrt());
    y.mul_vec(&x)
}

/// Despread streams divided by `√(Z P_k)`, so user `k`'s paths appear with
/// their own gains (the power factor is skipped when `P_k = 0`).
pub fn normalized_streams<T: Real>(y: &CMatrix<T>, pilots: &PilotBook, user_power: &[T]) -> Result<Vec<Vec<Complex<T>>>> {
    check_len("user powers", pilots.intended.len(), user_power.len())?;
    pilots
        .intended
        .iter()
        .zip(user_power)
        .map(|(p, &pw)| {
            let d = despread(y, p)?;
            let z = T::from_count(p.len());
            let scale = if pw > T::zero() { T::one() / (z * pw).sqrt() } else { T::one() / z.sqrt() };
            Ok(d.into_iter().map(|v| v * scale).collect())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GainMethod {
    #[default]
    CoherentCombining,
    ZeroForcing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathClass {
    Data { user: usize },
    Interference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathEstimate<T> {
    pub angle: PhaseAngle<T>,
    /// Spectrum magnitude at the peak.
    pub magnitude: T,
    /// Estimated gain; absent for interference paths.
    pub gain: Option<Complex<T>>,
    pub class: PathClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorOptions {
    /// Scan grid size as a multiple of `N`.
    pub oversample: usize,
    pub decision_feedback: bool,
    pub gain_method: GainMethod,
    /// Factor shape for the zero-forcing estimator; the prime shape of `N`
    /// when absent.
    pub zf_shape: Option<FactorShape>,
    pub analog: AnalogOptions,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            oversample: 8,
            decision_feedback: true,
            gain_method: GainMethod::CoherentCombining,
            zf_shape: None,
            analog: AnalogOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate<T> {
    /// `data[k]` holds user `k`'s estimated paths.
    pub data: Vec<Vec<PathEstimate<T>>>,
    pub interference: Vec<PathEstimate<T>>,
    /// Normalized despread streams the estimates were taken from.
    pub streams: Vec<Vec<Complex<T>>>,
    /// Scan grid spacing.
    pub resolution: T,
}

impl<T: Real> ChannelEstimate<T> {
    /// Channel knowledge for beamformer design. Paths without a gain
    /// estimate get unit gain.
    pub fn to_partial_csi(&self) -> PartialCsi<T> {
        PartialCsi {
            data_paths: self
                .data
                .iter()
                .map(|paths| {
                    paths
                        .iter()
                        .map(|p| Path {
                            gain: p.gain.unwrap_or(Complex::new(T::one(), T::zero())),
                            angle: p.angle,
                        })
                        .collect()
                })
                .collect(),
            interference_angles: self.interference.iter().map(|p| p.angle).collect(),
        }
    }

    pub fn data_angles(&self, k: usize) -> Vec<PhaseAngle<T>> {
        self.data[k].iter().map(|p| p.angle).collect()
    }

    pub fn interference_angles(&self) -> Vec<PhaseAngle<T>> {
        self.interference.iter().map(|p| p.angle).collect()
    }
}

fn bin_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// Strong peaks per stream with cross-stream ownership.
///
/// Candidates from every stream are visited in descending magnitude. A
/// candidate is accepted unless its stream is full or another stream already
/// owns a peak within one grid bin, in which case the stream moves on to
/// its next candidate. In count mode a stream left short repeats its
/// strongest accepted peak.
pub fn strong_paths<T: Real>(spectra: &[AoaSpectrum<T>], l: Option<usize>) -> Result<Vec<Vec<Peak<T>>>> {
    let mut candidates: Vec<(usize, Peak<T>)> = Vec::new();
    for (k, s) in spectra.iter().enumerate() {
        // In count mode every local maximum is a candidate and acceptance
        // enforces the count.
        let peaks = match l {
            Some(_) => local_maxima(s),
            None => detect_peaks(s, DetectMode::Threshold { strong: None, weak: None })?
                .into_iter()
                .filter(|p| p.class == PeakClass::Strong)
                .collect(),
        };
        candidates.extend(peaks.into_iter().map(|p| (k, p)));
    }
    candidates.sort_by(|a, b| {
        b.1.magnitude
            .partial_cmp(&a.1.magnitude)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
            .then(a.1.bin.cmp(&b.1.bin))
    });
    let mut owned: Vec<Vec<Peak<T>>> = vec![Vec::new(); spectra.len()];
    for (k, p) in candidates {
        if l.is_some_and(|l| owned[k].len() >= l) {
            continue;
        }
        let n_sam = spectra[k].n_sam();
        let taken = owned
            .iter()
            .enumerate()
            .any(|(j, ps)| j != k && ps.iter().any(|q| bin_distance(q.bin, p.bin, n_sam) <= 1));
        if !taken {
            owned[k].push(p);
        }
    }
    if let Some(l) = l {
        for ps in owned.iter_mut() {
            if let Some(&first) = ps.first() {
                while ps.len() < l {
                    ps.push(first);
                }
            }
        }
    }
    Ok(owned)
}

/// Interference angles from the averaged residual spectrum after the
/// estimated data paths are subtracted from every stream.
pub fn decision_feedback_interference_aoa<T: Real>(
    streams: &[Vec<Complex<T>>],
    data: &[Vec<Path<T>>],
    scanner: &Scanner<T>,
    m: Option<usize>,
) -> Result<Vec<Peak<T>>> {
    check_len("data estimates", streams.len(), data.len())?;
    let mut spectra = Vec::with_capacity(streams.len());
    for (y, paths) in streams.iter().zip(data) {
        let mut r = y.clone();
        for p in paths {
            for (ri, v) in r.iter_mut().zip(steering_vector(p.angle, y.len())) {
                *ri -= p.gain * v;
            }
        }
        spectra.push(scanner.scan(&r)?);
    }
    weak_peaks(&average_spectra(&spectra)?, m)
}

fn weak_peaks<T: Real>(avg: &AoaSpectrum<T>, m: Option<usize>) -> Result<Vec<Peak<T>>> {
    match m {
        Some(m) => Ok(detect_peaks(avg, DetectMode::Count { strong: 0, weak: m })?),
        None => {
            let theta_w = T::lit(4.0) * robust_sigma(&avg.values);
            Ok(detect_peaks(
                avg,
                DetectMode::Threshold {
                    strong: Some(T::infinity()),
                    weak: Some(theta_w),
                },
            )?)
        }
    }
}

/// Runs the complete estimator on training block `y`.
///
/// With `counts = Some((L, M))` the known path counts select peaks;
/// otherwise spectrum thresholds do.
pub fn estimate_channel<T: Real>(
    y: &CMatrix<T>,
    pilots: &PilotBook,
    user_power: &[T],
    counts: Option<(usize, usize)>,
    opts: &EstimatorOptions,
) -> Result<ChannelEstimate<T>> {
    let n = y.rows();
    let scanner = Scanner::new(n, opts.oversample * n)?;
    let streams = normalized_streams(y, pilots, user_power)?;
    let spectra = streams.iter().map(|s| scanner.scan(s)).collect::<Result<Vec<_>>>()?;
    let resolution = spectra[0].resolution();
    let strong = strong_paths(&spectra, counts.map(|c| c.0))?;

    let cc_paths: Vec<Vec<Path<T>>> = strong
        .iter()
        .zip(&streams)
        .map(|(peaks, y)| {
            peaks
                .iter()
                .map(|p| Path {
                    gain: gain_cc(y, p.angle),
                    angle: p.angle,
                })
                .collect()
        })
        .collect();

    let interference = if opts.decision_feedback {
        decision_feedback_interference_aoa(&streams, &cc_paths, &scanner, counts.map(|c| c.1))?
    } else {
        // Without feedback, the averaged raw spectrum minus the main lobes of
        // the detected data paths.
        let avg = average_spectra(&spectra)?;
        let lobe = T::TAU() / T::from_count(n);
        let data_angles: Vec<_> = cc_paths.iter().flatten().map(|p| p.angle).collect();
        let mut peaks = weak_peaks(&avg, counts.map(|c| c.1 + data_angles.len()))?;
        peaks.retain(|p| data_angles.iter().all(|a| a.circular_distance(p.angle) > lobe));
        if let Some((_, m)) = counts {
            peaks.truncate(m);
        }
        peaks
    };
    let interference: Vec<PathEstimate<T>> = interference
        .into_iter()
        .map(|p| PathEstimate {
            angle: p.angle,
            magnitude: p.magnitude,
            gain: None,
            class: PathClass::Interference,
        })
        .collect();

    let shape = match &opts.zf_shape {
        Some(s) => s.clone(),
        None => prime_factorization(n)?,
    };
    let theta: Vec<_> = interference.iter().map(|p| p.angle).collect();
    let mut data = Vec::with_capacity(strong.len());
    for (k, (peaks, y)) in strong.iter().zip(&streams).enumerate() {
        let mut out = Vec::with_capacity(peaks.len());
        for (i, p) in peaks.iter().enumerate() {
            let gain = match opts.gain_method {
                GainMethod::CoherentCombining => cc_paths[k][i].gain,
                GainMethod::ZeroForcing => {
                    let mut nulls: Vec<_> = peaks
                        .iter()
                        .enumerate()
                        .filter(|&(j, q)| j != i && q.bin != p.bin)
                        .map(|(_, q)| q.angle)
                        .collect();
                    nulls.extend(theta.iter().copied().filter(|t| *t != p.angle));
                    gain_zf(y, p.angle, &nulls, &shape, &opts.analog)?
                }
            };
            out.push(PathEstimate {
                angle: p.angle,
                magnitude: p.magnitude,
                gain: Some(gain),
                class: PathClass::Data { user: k },
            });
        }
        data.push(out);
    }
    Ok(ChannelEstimate {
        data,
        interference,
        streams,
        resolution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{draw_scenario_separated, SystemConfig};
    use crate::estimation::pilots::make_pilots;
    use crate::metrics::matched_distances;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    #[test]
    fn despread_single_user() {
        let cfg = SystemConfig::uniform(16, 1, 0, 2, 4, 1.0, 0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = draw_scenario_separated(&cfg, 0.5, &mut rng).unwrap();
        let p = make_pilots(1, 0, 4, &mut rng).unwrap();
        let y = transmit_training(&s, &p, &mut rng).unwrap();
        let d = despread(&y, &p.intended[0]).unwrap();
        let g = s.data_channel(0);
        for (a, b) in d.iter().zip(&g) {
            assert!((a - b * 2.0).norm() < 1e-12);
        }
    }

    #[test]
    fn orthogonal_users_do_not_leak() {
        let cfg = SystemConfig::uniform(16, 2, 0, 2, 4, 1.0, 0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = draw_scenario_separated(&cfg, 0.3, &mut rng).unwrap();
        let p = make_pilots(2, 0, 4, &mut rng).unwrap();
        let y = transmit_training(&s, &p, &mut rng).unwrap();
        let streams = normalized_streams(&y, &p, &cfg.user_power).unwrap();
        for k in 0..2 {
            for (a, b) in streams[k].iter().zip(s.data_channel(k)) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn perfect_feedback_leaves_only_interference() {
        let n = 128;
        let cfg = SystemConfig::uniform(n, 1, 2, 2, 4, 1.0, 1.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = draw_scenario_separated(&cfg, 0.3, &mut rng).unwrap();
        let p = make_pilots(1, 2, 4, &mut rng).unwrap();
        let y = transmit_training(&s, &p, &mut rng).unwrap();
        let streams = normalized_streams(&y, &p, &cfg.user_power).unwrap();
        let mut r = streams[0].clone();
        for path in &s.data_paths[0] {
            for (ri, v) in r.iter_mut().zip(steering_vector(path.angle, n)) {
                *ri -= path.gain * v;
            }
        }
        // What remains is Σ γ_n β_n v(Θ_n) / √Z exactly.
        let g = p.contamination_gammas::<f64>(0);
        let mut expect = vec![C::new(0.0, 0.0); n];
        for (i, h) in s.interf_paths.iter().enumerate() {
            for (e, v) in expect.iter_mut().zip(steering_vector(h.angle, n)) {
                *e += h.gain * v * g[i] / 2.0;
            }
        }
        for (a, b) in r.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12);
        }
        let scanner = Scanner::new(n, 8 * n).unwrap();
        let residual = scanner.scan(&r).unwrap();
        let interference_only = scanner.scan(&expect).unwrap();
        for (a, b) in residual.values.iter().zip(&interference_only.values) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn no_interferers_gives_empty_feedback() {
        let n = 64;
        let streams = vec![steering_vector(PhaseAngle::new(1.0), n)];
        let scanner = Scanner::new(n, 8 * n).unwrap();
        let data = vec![vec![Path { gain: C::new(1.0, 0.0), angle: PhaseAngle::new(1.0) }]];
        let out = decision_feedback_interference_aoa(&streams, &data, &scanner, Some(0)).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn noiseless_pipeline_recovers_angles() {
        let n = 128;
        let cfg = SystemConfig::uniform(n, 2, 2, 2, 16, 1.0, 1.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut ok = 0;
        for _ in 0..20 {
            let mut s = draw_scenario_separated(&cfg, 0.3, &mut rng).unwrap();
            for p in s.data_paths.iter_mut().flatten() {
                p.gain = p.gain / p.gain.norm();
            }
            let pb = make_pilots(2, 2, 16, &mut rng).unwrap();
            let y = transmit_training(&s, &pb, &mut rng).unwrap();
            let est = estimate_channel(&y, &pb, &cfg.user_power, Some((2, 2)), &EstimatorOptions::default()).unwrap();
            let mut good = true;
            for k in 0..2 {
                let truth: Vec<_> = s.data_paths[k].iter().map(|p| p.angle).collect();
                let d = matched_distances(&est.data_angles(k), &truth).unwrap();
                good &= d.iter().all(|&e| e < est.resolution);
            }
            ok += good as usize;
        }
        assert!(ok >= 18, "{ok}");
    }
}
