//! Digital baseband stage and the reference receivers.

use num_complex::Complex;

use crate::error::{check_len, Error, Result};
use crate::linalg::{solve, CMatrix, Cholesky};
use crate::scalar::{unit_phase, Real};

/// Analog matrix `F_RF` (`N × K`) followed by digital matrix `F_BB` (`K × K`).
#[derive(Debug, Clone, PartialEq)]
pub struct HybridBeamformer<T> {
    pub analog: CMatrix<T>,
    pub digital: CMatrix<T>,
}

impl<T: Real> HybridBeamformer<T> {
    /// Effective per-user receive vectors `w_k = F_RF f_BB(k)`.
    pub fn combiners(&self) -> Vec<Vec<Complex<T>>> {
        self.analog
            .matmul(&self.digital)
            .expect("analog columns match digital rows")
            .columns()
    }
}

/// `G̃ = F_RFᴴ G`.
pub fn effective_channel<T: Real>(analog: &CMatrix<T>, g: &CMatrix<T>) -> Result<CMatrix<T>> {
    analog.adjoint_mul(g)
}

/// `F_BB = (G̃ D G̃ᴴ + N₀ F_RFᴴ F_RF)⁻¹ G̃`, `D = diag(powers)`.
pub fn mmse_digital<T: Real>(analog: &CMatrix<T>, g: &CMatrix<T>, powers: &[T], noise_var: T) -> Result<CMatrix<T>> {
    check_len("user powers", g.cols(), powers.len())?;
    let gt = effective_channel(analog, g)?;
    let mut a = analog.adjoint_mul(analog)?;
    let rf = a.rows();
    for i in 0..rf {
        for j in 0..rf {
            a[(i, j)] = a[(i, j)] * noise_var;
        }
    }
    for (k, &p) in powers.iter().enumerate() {
        for i in 0..rf {
            let gik = gt[(i, k)] * p;
            for j in 0..rf {
                let v = gt[(j, k)].conj();
                a[(i, j)] += gik * v;
            }
        }
    }
    solve(&a, &gt)
}

/// Hybrid receiver with the MMSE digital stage on top of `analog`.
pub fn hybrid_mmse<T: Real>(analog: CMatrix<T>, g: &CMatrix<T>, powers: &[T], noise_var: T) -> Result<HybridBeamformer<T>> {
    let digital = mmse_digital(&analog, g, powers, noise_var)?;
    Ok(HybridBeamformer { analog, digital })
}

/// Unconstrained MMSE receiver `(G D Gᴴ + H D' Hᴴ + N₀ I)⁻¹ G` (`N × K`).
pub fn fully_digital_mmse<T: Real>(
    g: &CMatrix<T>,
    user_power: &[T],
    h: &CMatrix<T>,
    interferer_power: &[T],
    noise_var: T,
) -> Result<CMatrix<T>> {
    let n = g.rows();
    check_len("interference rows", n, h.rows())?;
    check_len("user powers", g.cols(), user_power.len())?;
    check_len("interferer powers", h.cols(), interferer_power.len())?;
    if !(noise_var > T::zero()) {
        return Err(Error::InvalidArgument("fully digital MMSE needs a positive noise variance".into()));
    }
    let mut r = CMatrix::zeros(n, n);
    r.add_assign_scaled_identity(noise_var);
    let mut add = |m: &CMatrix<T>, powers: &[T]| {
        for (c, &p) in powers.iter().enumerate() {
            let col = m.column(c);
            // Lower triangle only; the Cholesky factorization reads no more.
            for i in 0..n {
                let ci = col[i] * p;
                for j in 0..=i {
                    r[(i, j)] += ci * col[j].conj();
                }
            }
        }
    };
    add(g, user_power);
    add(h, interferer_power);
    Cholesky::new(&r)?.solve(g)
}

/// Element phases of `g`; zero entries map to `1`.
pub fn equal_gain_beamformer<T: Real>(g: &[Complex<T>]) -> Vec<Complex<T>> {
    g.iter().map(|&z| unit_phase(z)).collect()
}

/// Element phases of a digital beamforming vector.
pub fn analog_mmse_projection<T: Real>(digital: &[Complex<T>]) -> Vec<Complex<T>> {
    digital.iter().map(|&z| unit_phase(z)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{draw_scenario, steering_vector, PhaseAngle, SystemConfig};
    use crate::scalar::{dot_h, max_modulus_deviation};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn sinr(w: &[C], k: usize, g: &CMatrix<f64>, p: &[f64], n0: f64) -> f64 {
        let cols = g.columns();
        let s = p[k] * dot_h(w, &cols[k]).norm_sqr();
        let i: f64 = (0..cols.len()).filter(|&m| m != k).map(|m| p[m] * dot_h(w, &cols[m]).norm_sqr()).sum();
        s / (i + n0 * crate::scalar::norm_sqr(w))
    }

    #[test]
    fn single_user_scalar_stage() {
        let g = CMatrix::from_columns(&[steering_vector(PhaseAngle::new(0.4), 8)
            .into_iter()
            .map(|v| v * C::new(0.3, 0.7))
            .collect()])
        .unwrap();
        let f = CMatrix::from_columns(&[equal_gain_beamformer(&g.column(0))]).unwrap();
        let gt = effective_channel(&f, &g).unwrap();
        assert!((gt[(0, 0)] - C::new(8.0 * C::new(0.3, 0.7).norm(), 0.0)).norm() < 1e-12);
        let hyb = hybrid_mmse(f.clone(), &g, &[2.0], 0.5).unwrap();
        assert_eq!(hyb.digital.rows(), 1);
        let w = &hyb.combiners()[0];
        let pre = sinr(&f.column(0), 0, &g, &[2.0], 0.5);
        assert!((sinr(w, 0, &g, &[2.0], 0.5) - pre).abs() < 1e-10 * pre);
    }

    #[test]
    fn orthogonal_effective_channel_diagonal() {
        // Columns 0 and 1 of the 4-point DFT are orthogonal.
        let f0 = steering_vector(PhaseAngle::new(0.0), 4);
        let f1 = steering_vector(PhaseAngle::new(std::f64::consts::FRAC_PI_2), 4);
        let f = CMatrix::from_columns(&[f0.clone(), f1.clone()]).unwrap();
        let g = CMatrix::from_columns(&[f0.iter().map(|v| v * 2.0).collect(), f1.iter().map(|v| v * 3.0).collect()]).unwrap();
        let bb = mmse_digital(&f, &g, &[1.0, 1.0], 1.0).unwrap();
        assert!(bb[(1, 0)].norm() < 1e-14 && bb[(0, 1)].norm() < 1e-14);
        assert!(bb[(0, 0)].norm() > 0.0 && bb[(1, 1)].norm() > 0.0);
    }

    #[test]
    fn zero_column_when_orthogonal_to_user() {
        let f0 = steering_vector(PhaseAngle::new(0.0), 4);
        let f1 = steering_vector(PhaseAngle::new(std::f64::consts::FRAC_PI_2), 4);
        let f = CMatrix::from_columns(&[f0.clone()]).unwrap();
        let g = CMatrix::from_columns(&[f0, f1]).unwrap();
        let gt = effective_channel(&f, &g).unwrap();
        assert!(gt[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn effective_channel_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut r = || C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        let f = CMatrix::from_fn(5, 2, |_, _| r());
        let g = CMatrix::from_fn(5, 3, |_, _| r());
        let gt = effective_channel(&f, &g).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                let mut acc = C::new(0.0, 0.0);
                for n in 0..5 {
                    acc += f[(n, i)].conj() * g[(n, j)];
                }
                assert!((acc - gt[(i, j)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn mmse_beats_perturbations() {
        let cfg = SystemConfig::uniform(32, 4, 0, 2, 4, 1.0, 1.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let s = draw_scenario(&cfg, &mut rng).unwrap();
        let g = s.data_matrix();
        let f = CMatrix::from_columns(&(0..4).map(|k| equal_gain_beamformer(&s.data_channel(k))).collect::<Vec<_>>()).unwrap();
        let bb = mmse_digital(&f, &g, &cfg.user_power, 1.0).unwrap();
        for k in 0..4 {
            let opt = bb.column(k);
            let value = |v: &[C]| sinr(&f.mul_vec(v).unwrap(), k, &g, &cfg.user_power, 1.0);
            let best = value(&opt);
            let scale = crate::scalar::norm_sqr(&opt).sqrt();
            for _ in 0..2500 {
                let pert: Vec<C> = opt
                    .iter()
                    .map(|z| z + C::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * scale * 0.1)
                    .collect();
                assert!(value(&pert) <= best * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn fully_digital_matches_generic_solve() {
        let cfg = SystemConfig::uniform(12, 2, 2, 2, 2, 1.0, 3.0, 0.5);
        let s = draw_scenario(&cfg, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let (g, h) = (s.data_matrix(), s.interference_matrix());
        let f = fully_digital_mmse(&g, &cfg.user_power, &h, &cfg.interferer_power, cfg.noise_var).unwrap();
        let mut r = g.matmul(&g.adjoint()).unwrap();
        let hh = h.matmul(&h.adjoint()).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                r[(i, j)] = r[(i, j)] + hh[(i, j)] * 3.0;
            }
        }
        r.add_assign_scaled_identity(0.5);
        let oracle = solve(&r, &g).unwrap();
        for (a, b) in f.as_slice().iter().zip(oracle.as_slice()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn fully_digital_single_path_is_matched() {
        let v = steering_vector(PhaseAngle::new(1.2), 16);
        let g = CMatrix::from_columns(&[v.iter().map(|x| x * C::new(0.0, 2.0)).collect()]).unwrap();
        let f = fully_digital_mmse(&g, &[1.0], &CMatrix::zeros(16, 0), &[], 1.0).unwrap();
        let col = f.column(0);
        let corr = dot_h(&col, &g.column(0)).norm() / (crate::scalar::norm_sqr(&col).sqrt() * 8.0);
        assert!((corr - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strong_interferer_is_suppressed() {
        let g = CMatrix::from_columns(&[steering_vector(PhaseAngle::new(1.0), 16)]).unwrap();
        let hv = steering_vector(PhaseAngle::new(1.3), 16);
        let h = CMatrix::from_columns(&[hv.clone()]).unwrap();
        let leak = |p: f64| {
            let f = fully_digital_mmse(&g, &[1.0], &h, &[p], 1.0).unwrap().column(0);
            dot_h(&f, &hv).norm() / crate::scalar::norm_sqr(&f).sqrt()
        };
        let (a, b, c) = (leak(1.0), leak(1e3), leak(1e6));
        assert!(b < a && c < b && c < 1e-5);
    }

    #[test]
    fn baseline_examples() {
        let pos = vec![C::new(2.0, 0.0), C::new(0.5, 0.0), C::new(0.0, 0.0)];
        assert!(equal_gain_beamformer(&pos).iter().all(|z| (z - C::new(1.0, 0.0)).norm() < 1e-15));
        let v: Vec<C> = steering_vector(PhaseAngle::new(2.2), 32).iter().map(|x| x * C::new(-1.0, 1.0)).collect();
        let f = equal_gain_beamformer(&v);
        assert!((dot_h(&f, &v).norm() - 32.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(analog_mmse_projection(&[C::new(0.0, 0.0)])[0] == C::new(1.0, 0.0));
        assert!(analog_mmse_projection(&[C::new(3.0, 0.0), C::new(0.5, 0.0)]).iter().all(|z| *z == C::new(1.0, 0.0)));
    }

    proptest! {
        #[test]
        fn egc_triangle_equality(re in prop::collection::vec(-5.0..5.0f64, 1..40), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g: Vec<C> = re.iter().map(|&r| C::new(r, rng.random::<f64>() - 0.5)).collect();
            let f = equal_gain_beamformer(&g);
            let sum: f64 = g.iter().map(|z| z.norm()).sum();
            prop_assert!((dot_h(&f, &g).norm() - sum).abs() <= 1e-12 * sum.max(1.0));
            prop_assert!(max_modulus_deviation(&f) <= 1e-12);
            prop_assert!(max_modulus_deviation(&analog_mmse_projection(&g)) <= 1e-12);
        }
    }
}
