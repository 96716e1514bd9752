//! Uniform linear array model: phase angles, system configuration, multipath
//! channels and received signals.

use std::f64::consts::TAU;

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{check_len, Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cis, cis_multiple, Real};

/// Inter-antenna phase difference, canonicalized to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct PhaseAngle<T>(T);

impl<T: Real> PhaseAngle<T> {
    pub fn new(radians: T) -> Self {
        let tau = T::TAU();
        let mut v = radians % tau;
        if v < T::zero() {
            v += tau;
        }
        // `-tiny % τ + τ` can round up to τ itself.
        if v >= tau {
            v = T::zero();
        }
        Self(v)
    }

    /// Phase difference of a plane wave arriving at physical angle `aoa`
    /// (radians from the array axis) for element spacing `d` and wavelength
    /// `lambda`.
    pub fn from_aoa(aoa: T, d: T, lambda: T) -> Self {
        Self::new(T::TAU() * d / lambda * aoa.cos())
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }

    /// Signed difference `self − other` reduced to `(−π, π]`.
    pub fn wrapped_diff(self, other: Self) -> T {
        wrap_pi(self.0 - other.0)
    }

    /// Circular distance in `[0, π]`.
    pub fn circular_distance(self, other: Self) -> T {
        self.wrapped_diff(other).abs()
    }
}

/// Reduces an angle to `(−π, π]`.
pub fn wrap_pi<T: Real>(x: T) -> T {
    let tau = T::TAU();
    let pi = T::PI();
    let mut v = x % tau;
    if v > pi {
        v -= tau;
    } else if v <= -pi {
        v += tau;
    }
    v
}

/// Array and population parameters of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig<T> {
    /// Antenna count.
    pub n: usize,
    /// Intended users.
    pub k: usize,
    /// Interferers, one dominant path each.
    pub m: usize,
    /// Data paths per user.
    pub l: usize,
    /// Pilot length in symbols.
    pub z: usize,
    pub user_power: Vec<T>,
    pub interferer_power: Vec<T>,
    pub noise_var: T,
    /// Per-user path-gain variance.
    pub path_var: Vec<T>,
}

impl<T: Real> SystemConfig<T> {
    /// Configuration with equal powers and unit path variance.
    pub fn uniform(n: usize, k: usize, m: usize, l: usize, z: usize, user_power: T, interferer_power: T, noise_var: T) -> Self {
        Self {
            n,
            k,
            m,
            l,
            z,
            user_power: vec![user_power; k],
            interferer_power: vec![interferer_power; m],
            noise_var,
            path_var: vec![T::one(); k],
        }
    }

    /// Every violated constraint, in a fixed order.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.n < 2 {
            v.push(format!("n must be at least 2 (got {})", self.n));
        }
        if self.k < 1 {
            v.push("k must be at least 1".to_string());
        }
        if self.l < 1 {
            v.push("l must be at least 1".to_string());
        }
        if self.z < 1 {
            v.push("z must be at least 1".to_string());
        }
        if self.user_power.len() != self.k {
            v.push(format!("user_power has {} entries, expected k = {}", self.user_power.len(), self.k));
        }
        if self.path_var.len() != self.k {
            v.push(format!("path_var has {} entries, expected k = {}", self.path_var.len(), self.k));
        }
        if self.interferer_power.len() != self.m {
            v.push(format!(
                "interferer_power has {} entries, expected m = {}",
                self.interferer_power.len(),
                self.m
            ));
        }
        let bad = |x: &T| !(x.is_finite() && *x >= T::zero());
        if self.user_power.iter().any(bad) {
            v.push("user powers must be finite and nonnegative".to_string());
        }
        if self.interferer_power.iter().any(bad) {
            v.push("interferer powers must be finite and nonnegative".to_string());
        }
        if self.path_var.iter().any(bad) {
            v.push("path variances must be finite and nonnegative".to_string());
        }
        if bad(&self.noise_var) {
            v.push("noise variance must be finite and nonnegative".to_string());
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v))
        }
    }

    /// Like [`validate`](Self::validate), additionally requiring `k ≤ z` so
    /// that orthogonal pilots exist.
    pub fn validate_for_training(&self) -> Result<()> {
        let mut v = self.violations();
        if self.k > self.z {
            v.push(format!("k = {} exceeds pilot length z = {}; orthogonal pilots need k <= z", self.k, self.z));
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v))
        }
    }
}

/// One propagation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path<T> {
    pub gain: Complex<T>,
    pub angle: PhaseAngle<T>,
}

impl<T: Real> Path<T> {
    pub fn new(gain: Complex<T>, angle: T) -> Self {
        Self {
            gain,
            angle: PhaseAngle::new(angle),
        }
    }
}

/// Ground-truth state of one channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub config: SystemConfig<T>,
    /// `data_paths[k][l]`.
    pub data_paths: Vec<Vec<Path<T>>>,
    /// One dominant path per interferer.
    pub interf_paths: Vec<Path<T>>,
    degenerate: bool,
}

impl<T: Real> Scenario<T> {
    pub fn new(config: SystemConfig<T>, data_paths: Vec<Vec<Path<T>>>, interf_paths: Vec<Path<T>>) -> Result<Self> {
        config.validate()?;
        check_len("users", config.k, data_paths.len())?;
        for p in &data_paths {
            check_len("data paths per user", config.l, p.len())?;
        }
        check_len("interference paths", config.m, interf_paths.len())?;
        let degenerate = interf_paths
            .iter()
            .any(|h| data_paths.iter().flatten().any(|p| p.angle == h.angle));
        Ok(Self {
            config,
            data_paths,
            interf_paths,
            degenerate,
        })
    }

    /// True when some interference angle exactly equals some data angle.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn data_channel(&self, k: usize) -> Vec<Complex<T>> {
        synthesize_data_channel(&self.data_paths[k], self.config.n)
    }

    pub fn interference_channel(&self, i: usize) -> Vec<Complex<T>> {
        let p = self.interf_paths[i];
        synthesize_interference_channel(p.gain, p.angle, self.config.n)
    }

    /// `G`, one column per user.
    pub fn data_matrix(&self) -> CMatrix<T> {
        let cols: Vec<_> = (0..self.config.k).map(|k| self.data_channel(k)).collect();
        CMatrix::from_columns(&cols).expect("equal column lengths")
    }

    /// `H`, one column per interferer (`N × 0` when there are none).
    pub fn interference_matrix(&self) -> CMatrix<T> {
        if self.config.m == 0 {
            return CMatrix::zeros(self.config.n, 0);
        }
        let cols: Vec<_> = (0..self.config.m).map(|i| self.interference_channel(i)).collect();
        CMatrix::from_columns(&cols).expect("equal column lengths")
    }

    /// All channel vectors with powers, for repeated rate evaluation.
    pub fn channels(&self) -> ChannelSet<T> {
        ChannelSet {
            g: (0..self.config.k).map(|k| self.data_channel(k)).collect(),
            h: (0..self.config.m).map(|i| self.interference_channel(i)).collect(),
            user_power: self.config.user_power.clone(),
            interferer_power: self.config.interferer_power.clone(),
            noise_var: self.config.noise_var,
        }
    }
}

/// Synthesized channel vectors of a scenario together with their powers.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet<T> {
    pub g: Vec<Vec<Complex<T>>>,
    pub h: Vec<Vec<Complex<T>>>,
    pub user_power: Vec<T>,
    pub interferer_power: Vec<T>,
    pub noise_var: T,
}

/// `[1, e^{jφ}, …, e^{j(n−1)φ}]`.
pub fn steering_vector<T: Real>(phi: PhaseAngle<T>, n: usize) -> Vec<Complex<T>> {
    let p = phi.value();
    (0..n).map(|i| cis_multiple(i, p)).collect()
}

/// `Σ_ℓ a_ℓ v(Φ_ℓ)`.
pub fn synthesize_data_channel<T: Real>(paths: &[Path<T>], n: usize) -> Vec<Complex<T>> {
    let mut g = vec![Complex::new(T::zero(), T::zero()); n];
    for p in paths {
        for (gi, vi) in g.iter_mut().zip(steering_vector(p.angle, n)) {
            *gi += p.gain * vi;
        }
    }
    g
}

/// `β v(Θ)`.
pub fn synthesize_interference_channel<T: Real>(gain: Complex<T>, angle: PhaseAngle<T>, n: usize) -> Vec<Complex<T>> {
    steering_vector(angle, n).into_iter().map(|v| gain * v).collect()
}

/// Circularly-symmetric complex Gaussian sample with the given variance.
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, variance: T) -> Complex<T> {
    let s = (variance.as_f64() / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(T::lit(re * s), T::lit(im * s))
}

/// Vector of i.i.d. complex Gaussian samples.
pub fn complex_gaussian_vec<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, variance: T) -> Vec<Complex<T>> {
    (0..n).map(|_| complex_gaussian(rng, variance)).collect()
}

/// Matrix of i.i.d. complex Gaussian samples.
pub fn complex_gaussian_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, variance: T) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng, variance))
}

fn uniform_angle<T: Real, R: Rng + ?Sized>(rng: &mut R) -> PhaseAngle<T> {
    PhaseAngle::new(T::lit(rng.random::<f64>() * TAU))
}

/// Draws data gains `CN(0, δ_k²)`, interference gains `CN(0, 1)` and i.i.d.
/// uniform angles.
pub fn draw_scenario<T: Real, R: Rng + ?Sized>(config: &SystemConfig<T>, rng: &mut R) -> Result<Scenario<T>> {
    config.validate()?;
    let data = (0..config.k)
        .map(|k| {
            (0..config.l)
                .map(|_| {
                    let angle = uniform_angle(rng);
                    Path {
                        gain: complex_gaussian(rng, config.path_var[k]),
                        angle,
                    }
                })
                .collect()
        })
        .collect();
    let interf = (0..config.m)
        .map(|_| {
            let angle = uniform_angle(rng);
            Path {
                gain: complex_gaussian(rng, T::one()),
                angle,
            }
        })
        .collect();
    Scenario::new(config.clone(), data, interf)
}

/// Angles drawn so that every pair among all `K·L + M` paths is at least
/// `min_sep` apart in circular distance.
///
/// Uses rejection sampling; fails with `InvalidArgument` when the
/// separation cannot be met after many attempts.
pub fn draw_separated_angles<T: Real, R: Rng + ?Sized>(count: usize, min_sep: T, rng: &mut R) -> Result<Vec<PhaseAngle<T>>> {
    const ATTEMPTS: usize = 10_000;
    'outer: for _ in 0..ATTEMPTS {
        let mut angles: Vec<PhaseAngle<T>> = Vec::with_capacity(count);
        for _ in 0..count {
            let mut placed = false;
            for _ in 0..1000 {
                let a = uniform_angle(rng);
                if angles.iter().all(|b| a.circular_distance(*b) >= min_sep) {
                    angles.push(a);
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'outer;
            }
        }
        return Ok(angles);
    }
    Err(Error::InvalidArgument(format!(
        "cannot place {count} angles with separation {min_sep}"
    )))
}

/// Same distribution as [`draw_scenario`] but with all path angles pairwise
/// separated by at least `min_sep`.
pub fn draw_scenario_separated<T: Real, R: Rng + ?Sized>(config: &SystemConfig<T>, min_sep: T, rng: &mut R) -> Result<Scenario<T>> {
    config.validate()?;
    let angles = draw_separated_angles(config.k * config.l + config.m, min_sep, rng)?;
    let mut it = angles.into_iter();
    let data = (0..config.k)
        .map(|k| {
            (0..config.l)
                .map(|_| Path {
                    gain: complex_gaussian(rng, config.path_var[k]),
                    angle: it.next().expect("enough angles"),
                })
                .collect()
        })
        .collect();
    let interf = (0..config.m)
        .map(|_| Path {
            gain: complex_gaussian(rng, T::one()),
            angle: it.next().expect("enough angles"),
        })
        .collect();
    Scenario::new(config.clone(), data, interf)
}

/// `y = G x + H s + n`.
pub fn received_signal<T: Real>(
    scenario: &Scenario<T>,
    x: &[Complex<T>],
    s: &[Complex<T>],
    noise: &[Complex<T>],
) -> Result<Vec<Complex<T>>> {
    let c = &scenario.config;
    check_len("user symbols", c.k, x.len())?;
    check_len("interferer symbols", c.m, s.len())?;
    check_len("noise vector", c.n, noise.len())?;
    let mut y = noise.to_vec();
    for (k, xk) in x.iter().enumerate() {
        for (yi, gi) in y.iter_mut().zip(scenario.data_channel(k)) {
            *yi += gi * xk;
        }
    }
    for (i, si) in s.iter().enumerate() {
        for (yi, hi) in y.iter_mut().zip(scenario.interference_channel(i)) {
            *yi += hi * si;
        }
    }
    Ok(y)
}

/// `Y = Σ_k g_k x_kᵀ + Σ_n h_n s_nᵀ + N` (`N × Z`).
///
/// `pilots[k]` and `interf_pilots[n]` are the transmitted symbol sequences,
/// including any power scaling.
pub fn received_training_matrix<T: Real>(
    scenario: &Scenario<T>,
    pilots: &[Vec<Complex<T>>],
    interf_pilots: &[Vec<Complex<T>>],
    noise: &CMatrix<T>,
) -> Result<CMatrix<T>> {
    let c = &scenario.config;
    check_len("pilot sequences", c.k, pilots.len())?;
    check_len("interferer pilot sequences", c.m, interf_pilots.len())?;
    check_len("noise rows", c.n, noise.rows())?;
    let z = noise.cols();
    for p in pilots.iter().chain(interf_pilots) {
        check_len("pilot length", z, p.len())?;
    }
    let mut y = noise.clone();
    let mut add = |ch: &[Complex<T>], seq: &[Complex<T>]| {
        for (r, chr) in ch.iter().enumerate() {
            for (t, st) in seq.iter().enumerate() {
                y[(r, t)] += chr * st;
            }
        }
    };
    for (k, p) in pilots.iter().enumerate() {
        add(&scenario.data_channel(k), p);
    }
    for (i, p) in interf_pilots.iter().enumerate() {
        add(&scenario.interference_channel(i), p);
    }
    Ok(y)
}

/// `|v(ω)ᴴ v(φ)| / n`, evaluated as `|sin(nΔ/2) / (n sin(Δ/2))|`.
pub fn normalized_inner_product<T: Real>(phi: PhaseAngle<T>, omega: PhaseAngle<T>, n: usize) -> T {
    dirichlet_magnitude(phi.wrapped_diff(omega), n)
}

/// `|sin(nΔ/2) / (n sin(Δ/2))|` with the small-angle limit.
pub fn dirichlet_magnitude<T: Real>(delta: T, n: usize) -> T {
    let d = wrap_pi(delta);
    let nf = T::from_count(n);
    let half = d / T::lit(2.0);
    let den = half.sin();
    if den.abs() < T::lit(1e-9) {
        let e = d;
        return T::one() - (nf * nf - T::one()) * e * e / T::lit(24.0);
    }
    ((nf * half).sin() / (nf * den)).abs().min(T::one())
}

/// Signed kernel `v(ω)ᴴ v(φ) / n = (1/n) Σ_m e^{jmΔ}`, `Δ = φ − ω`.
pub fn steering_kernel<T: Real>(phi: PhaseAngle<T>, omega: PhaseAngle<T>, n: usize) -> Complex<T> {
    let d = phi.wrapped_diff(omega);
    let nf = T::from_count(n);
    let half = d / T::lit(2.0);
    let den = half.sin();
    let phase = cis((nf - T::one()) * half);
    if den.abs() < T::lit(1e-9) {
        return phase * (T::one() - (nf * nf - T::one()) * d * d / T::lit(24.0));
    }
    phase * ((nf * half).sin() / (nf * den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    fn close(a: &[C], b: &[C], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn steering_examples() {
        let ones = vec![C::new(1.0, 0.0); 4];
        assert!(close(&steering_vector(PhaseAngle::new(0.0), 4), &ones, 0.0));
        let alt = [C::new(1.0, 0.0), C::new(-1.0, 0.0), C::new(1.0, 0.0)];
        assert!(close(&steering_vector(PhaseAngle::new(PI), 3), &alt, 1e-15));
        let quarter = [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)];
        assert!(close(&steering_vector(PhaseAngle::new(PI / 2.0), 4), &quarter, 1e-15));
    }

    #[test]
    fn channel_examples() {
        let one = |a: C, phi: f64| Path::new(a, phi);
        let g = synthesize_data_channel(&[one(C::new(1.0, 0.0), 0.0)], 3);
        assert!(close(&g, &[C::new(1.0, 0.0); 3], 0.0));
        let g = synthesize_data_channel(&[one(C::new(1.0, 0.0), 0.0), one(C::new(-1.0, 0.0), 0.0)], 3);
        assert!(close(&g, &[C::new(0.0, 0.0); 3], 0.0));
        let g = synthesize_data_channel(&[one(C::new(0.0, 2.0), PI)], 2);
        assert!(close(&g, &[C::new(0.0, 2.0), C::new(0.0, -2.0)], 1e-15));

        let h = synthesize_interference_channel(C::new(1.0, 0.0), PhaseAngle::new(0.0), 2);
        assert!(close(&h, &[C::new(1.0, 0.0); 2], 0.0));
        let h = synthesize_interference_channel(C::new(0.0, 0.0), PhaseAngle::new(1.3), 5);
        assert!(close(&h, &[C::new(0.0, 0.0); 5], 0.0));
        let h = synthesize_interference_channel(C::new(3.0, 0.0), PhaseAngle::new(PI), 2);
        assert!(close(&h, &[C::new(3.0, 0.0), C::new(-3.0, 0.0)], 1e-15));
    }

    #[test]
    fn phase_angle_canonical() {
        assert_eq!(PhaseAngle::new(-1e-20_f64).value(), 0.0);
        assert!((PhaseAngle::new(-PI / 2.0).value() - 1.5 * PI).abs() < 1e-15);
        assert!((PhaseAngle::new(7.0 * PI).value() - PI).abs() < 1e-14);
        let a = PhaseAngle::new(0.1);
        let b = PhaseAngle::new(TAU - 0.1);
        assert!((a.circular_distance(b) - 0.2).abs() < 1e-15);
        assert!((PhaseAngle::from_aoa(0.0, 0.5, 1.0).value() - PI).abs() < 1e-15);
    }

    #[test]
    fn zero_variance_gives_zero_gains() {
        let mut cfg = SystemConfig::uniform(8, 2, 1, 3, 4, 1.0, 1.0, 1.0);
        cfg.path_var[1] = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = draw_scenario(&cfg, &mut rng).unwrap();
        assert!(s.data_paths[1].iter().all(|p| p.gain == C::new(0.0, 0.0)));
        assert!(s.data_paths[0].iter().all(|p| p.gain != C::new(0.0, 0.0)));
    }

    #[test]
    fn draw_is_deterministic() {
        let cfg = SystemConfig::uniform(16, 3, 2, 2, 4, 1.0, 1.0, 1.0);
        let a = draw_scenario(&cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = draw_scenario(&cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gain_second_moment() {
        let cfg = SystemConfig::uniform(2, 1, 0, 1, 1, 1.0, 0.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 100_000;
        let mean: f64 = (0..trials)
            .map(|_| draw_scenario(&cfg, &mut rng).unwrap().data_paths[0][0].gain.norm_sqr())
            .sum::<f64>()
            / trials as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn degenerate_flag() {
        let cfg = SystemConfig::uniform(4, 1, 1, 1, 1, 1.0, 1.0, 1.0);
        let p = Path::new(C::new(1.0, 0.0), 0.7);
        let s = Scenario::new(cfg.clone(), vec![vec![p]], vec![p]).unwrap();
        assert!(s.is_degenerate());
        let q = Path::new(C::new(1.0, 0.0), 0.7 + 1e-12);
        let s = Scenario::new(cfg, vec![vec![p]], vec![q]).unwrap();
        assert!(!s.is_degenerate());
    }

    fn small_scenario() -> Scenario<f64> {
        let cfg = SystemConfig::uniform(3, 1, 1, 1, 2, 1.0, 1.0, 1.0);
        Scenario::new(
            cfg,
            vec![vec![Path::new(C::new(0.5, -1.0), 0.4)]],
            vec![Path::new(C::new(2.0, 0.25), 2.1)],
        )
        .unwrap()
    }

    #[test]
    fn received_signal_examples() {
        let cfg = SystemConfig::uniform(4, 1, 0, 1, 1, 1.0, 1.0, 1.0);
        let s = Scenario::new(cfg, vec![vec![Path::new(C::new(1.0, 0.0), 0.0)]], vec![]).unwrap();
        let y = received_signal(&s, &[C::new(1.0, 0.0)], &[], &[C::new(0.0, 0.0); 4]).unwrap();
        assert!(close(&y, &[C::new(1.0, 0.0); 4], 0.0));

        let s = small_scenario();
        let noise = [C::new(0.1, 0.2), C::new(-0.3, 0.0), C::new(0.0, 0.4)];
        let y = received_signal(&s, &[C::new(0.0, 0.0)], &[C::new(0.0, 0.0)], &noise).unwrap();
        assert!(close(&y, &noise, 0.0));

        let x = C::new(0.7, 0.1);
        let sym = C::new(-0.2, 0.9);
        let y = received_signal(&s, &[x], &[sym], &noise).unwrap();
        for i in 0..3 {
            let fi = i as f64;
            let expect = C::new(0.5, -1.0) * C::from_polar(1.0, 0.4 * fi) * x
                + C::new(2.0, 0.25) * C::from_polar(1.0, 2.1 * fi) * sym
                + noise[i];
            assert!((y[i] - expect).norm() < 1e-14);
        }
        assert!(matches!(
            received_signal(&s, &[x, x], &[sym], &noise),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn training_matrix_matches_brute_force() {
        let s = small_scenario();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let noise = complex_gaussian_matrix(&mut rng, 3, 2, 0.1);
        let x = vec![vec![C::new(1.0, 0.0), C::new(-1.0, 0.0)]];
        let sv = vec![vec![C::new(0.5, 0.5), C::new(-0.5, 0.0)]];
        let y = received_training_matrix(&s, &x, &sv, &noise).unwrap();
        for t in 0..2 {
            let col = received_signal(&s, &[x[0][t]], &[sv[0][t]], &noise.column(t)).unwrap();
            for r in 0..3 {
                assert!((y[(r, t)] - col[r]).norm() < 1e-15);
            }
        }
        let zeros = vec![vec![C::new(0.0, 0.0); 2]];
        let y = received_training_matrix(&s, &zeros, &zeros, &noise).unwrap();
        assert_eq!(y, noise);
    }

    #[test]
    fn training_columns_are_multiples_of_g() {
        let cfg = SystemConfig::uniform(5, 1, 0, 2, 3, 1.0, 1.0, 1.0);
        let s = draw_scenario(&cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let x = vec![vec![C::new(1.0, 0.0), C::new(-1.0, 0.0), C::new(1.0, 0.0)]];
        let y = received_training_matrix(&s, &x, &[], &CMatrix::zeros(5, 3)).unwrap();
        let g = s.data_channel(0);
        for t in 0..3 {
            for r in 0..5 {
                assert!((y[(r, t)] - g[r] * x[0][t]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn inner_product_examples() {
        let a = PhaseAngle::new(1.0);
        assert_eq!(normalized_inner_product(a, a, 16), 1.0);
        let b = PhaseAngle::new(1.0 + TAU / 16.0);
        assert!(normalized_inner_product(a, b, 16) < 1e-15);
    }

    fn brute_force(d: f64, n: usize) -> C {
        (0..n).map(|m| C::from_polar(1.0, m as f64 * d)).sum::<C>() / n as f64
    }

    proptest! {
        #[test]
        fn inner_product_matches_sum(phi in 0.0..TAU, omega in 0.0..TAU, n in 1usize..=1024) {
            let (p, o) = (PhaseAngle::new(phi), PhaseAngle::new(omega));
            let bf = brute_force(p.wrapped_diff(o), n);
            prop_assert!((normalized_inner_product(p, o, n) - bf.norm()).abs() < 1e-12);
            prop_assert!((steering_kernel(p, o, n) - bf).norm() < 1e-12);
        }

        #[test]
        fn steering_is_unimodular(phi in -100.0..100.0f64, n in 1usize..512) {
            let v = steering_vector(PhaseAngle::new(phi), n);
            prop_assert!(v.iter().all(|z| (z.norm() - 1.0).abs() <= 1e-12));
        }

        #[test]
        fn envelope(delta in 0.01f64..0.1, sign in prop::bool::ANY, n in 256usize..2048) {
            let d = if sign { delta } else { -delta };
            let j = dirichlet_magnitude(d, n);
            prop_assert!(j <= 2.0 / (n as f64 * delta) * 1.02);
        }

        #[test]
        fn canonical_range(x in -1e6..1e6f64) {
            let v = PhaseAngle::new(x).value();
            prop_assert!((0.0..TAU).contains(&v));
        }
    }
}
