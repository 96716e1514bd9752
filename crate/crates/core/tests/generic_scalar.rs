use kronbf::analog::{multiuser_analog, AnalogOptions, PartialCsi};
use kronbf::array::{draw_scenario_separated, PhaseAngle, SystemConfig};
use kronbf::estimation::{estimate_channel, make_pilots, transmit_training, EstimatorOptions};
use kronbf::kron::{kron_compose, prime_factorization, steering_factors};
use kronbf::metrics::matched_pairs;
use num_complex::Complex;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn direct<T: num_traits::Float>(phi: f64, n: usize) -> Vec<Complex<T>> {
    (0..n)
        .map(|i| {
            let a = phi * i as f64;
            Complex::new(T::from(a.cos()).unwrap(), T::from(a.sin()).unwrap())
        })
        .collect()
}

fn inner<T: num_traits::Float>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |s, (x, y)| s + x.conj() * y)
}

#[test]
fn f32_kronecker_steering_matches_direct() {
    for n in [8usize, 12, 64, 360] {
        let shape = prime_factorization(n).unwrap();
        let phi = 0.73_f64;
        let v = kron_compose(&steering_factors(PhaseAngle::new(phi as f32), &shape).factors);
        let d = direct::<f32>(phi, n);
        let err = v.iter().zip(&d).map(|(a, b)| (a - b).norm()).fold(0.0f32, f32::max);
        assert!(err < 1e-4, "n={n} err={err}");
    }
}

#[test]
fn f32_analog_nulls_interference() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = SystemConfig::<f32>::uniform(128, 4, 2, 2, 16, 1.0, 1.0, 1.0);
    let shape = prime_factorization(128).unwrap();
    for _ in 0..50 {
        let sc = draw_scenario_separated(&cfg, 0.05, &mut rng).unwrap();
        let bf = multiuser_analog(&PartialCsi::from_scenario(&sc), &shape, &AnalogOptions::default()).unwrap();
        for w in bf.weights() {
            assert!(w.iter().all(|x| (x.norm() - 1.0).abs() < 1e-5));
            for p in &sc.interf_paths {
                let r = inner(&w, &direct::<f32>(p.angle.value() as f64, 128)).norm() / 128.0;
                assert!(r < 1e-4, "residual {r}");
            }
        }
    }
}

#[test]
fn f32_noiseless_estimate_finds_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = SystemConfig::<f32>::uniform(128, 2, 1, 1, 16, 1.0, 1.0, 0.0);
    let sc = draw_scenario_separated(&cfg, 0.3, &mut rng).unwrap();
    let pilots = make_pilots(2, 1, 16, &mut rng).unwrap();
    let y = transmit_training(&sc, &pilots, &mut rng).unwrap();
    let est = estimate_channel(&y, &pilots, &sc.config.user_power, Some((1, 1)), &EstimatorOptions::default()).unwrap();
    for k in 0..2 {
        let truth: Vec<_> = sc.data_paths[k].iter().map(|p| p.angle).collect();
        let pairs = matched_pairs(&est.data_angles(k), &truth).unwrap();
        for (e, t) in pairs {
            let d = est.data[k][e].angle.circular_distance(truth[t]);
            assert!(d < est.resolution, "user {k}: {d}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f32_nulls_hold_for_any_draw(seed in any::<u64>(), n in prop::sample::select(vec![32usize, 48, 64, 96])) {
        let cfg = SystemConfig::<f32>::uniform(n, 2, 2, 2, 8, 1.0, 1.0, 1.0);
        let sc = draw_scenario_separated(&cfg, 0.1, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let shape = prime_factorization(n).unwrap();
        let bf = multiuser_analog(&PartialCsi::from_scenario(&sc), &shape, &AnalogOptions::default()).unwrap();
        for w in bf.weights() {
            for p in &sc.interf_paths {
                let r = inner(&w, &direct::<f32>(p.angle.value() as f64, n)).norm() / n as f32;
                prop_assert!(r < 1e-4, "residual {}", r);
            }
        }
    }
}
