//! Rate trials.

use num_complex::Complex;
use rand::Rng;

use crate::analog::{multiuser_analog, AnalogOptions, PartialCsi};
use crate::array::{synthesize_data_channel, Scenario};
use crate::digital::{analog_mmse_projection, equal_gain_beamformer, fully_digital_mmse, hybrid_mmse};
use crate::error::Result;
use crate::estimation::{estimate_channel, make_pilots, transmit_training, EstimatorOptions};
use crate::kron::{prime_factorization, FactorShape};
use crate::linalg::CMatrix;
use crate::metrics::sum_rate;
use crate::scalar::Real;
use crate::sim::{Method, SimParams};

fn design_channels<T: Real>(csi: &PartialCsi<T>, n: usize) -> Result<CMatrix<T>> {
    let cols: Vec<_> = csi.data_paths.iter().map(|p| synthesize_data_channel(p, n)).collect();
    CMatrix::from_columns(&cols)
}

/// Per-user receive vectors of `method` on scenario `s`. The Kronecker
/// receiver is designed from `csi`; the reference receivers use the full
/// channel.
pub fn combiners<T: Real>(
    method: Method,
    s: &Scenario<T>,
    csi: &PartialCsi<T>,
    shape: &FactorShape,
    opts: &AnalogOptions,
) -> Result<Vec<Vec<Complex<T>>>> {
    let c = &s.config;
    let g = s.data_matrix();
    let digital = || fully_digital_mmse(&g, &c.user_power, &s.interference_matrix(), &c.interferer_power, c.noise_var);
    match method {
        Method::Kronecker => {
            let analog = multiuser_analog(csi, shape, opts)?;
            let g_design = design_channels(csi, c.n)?;
            Ok(hybrid_mmse(analog.matrix(), &g_design, &c.user_power, c.noise_var)?.combiners())
        }
        Method::FullyDigital => Ok(digital()?.columns()),
        Method::EqualGain => {
            let cols: Vec<_> = g.columns().iter().map(|gk| equal_gain_beamformer(gk)).collect();
            Ok(hybrid_mmse(CMatrix::from_columns(&cols)?, &g, &c.user_power, c.noise_var)?.combiners())
        }
        Method::AnalogMmse => {
            let cols: Vec<_> = digital()?.columns().iter().map(|w| analog_mmse_projection(w)).collect();
            Ok(hybrid_mmse(CMatrix::from_columns(&cols)?, &g, &c.user_power, c.noise_var)?.combiners())
        }
        Method::CoherentCombining | Method::ZeroForcing => Err(crate::Error::InvalidArgument(format!(
            "{method} is not a beamformer"
        ))),
    }
}

/// Sum rate of every method on one random scenario.
pub fn rate_trial<R: Rng + ?Sized>(p: &SimParams, methods: &[Method], rng: &mut R) -> Result<Vec<f64>> {
    let s = p.draw_scenario(rng)?;
    let csi = if p.estimated_csi && methods.contains(&Method::Kronecker) {
        let pilots = make_pilots(p.k, p.m, p.z, rng)?;
        let y = transmit_training(&s, &pilots, rng)?;
        let opts = EstimatorOptions {
            oversample: p.oversample,
            ..EstimatorOptions::default()
        };
        estimate_channel(&y, &pilots, &s.config.user_power, Some((p.l, p.m)), &opts)?.to_partial_csi()
    } else {
        PartialCsi::from_scenario(&s)
    };
    let shape = prime_factorization(p.n)?;
    let opts = AnalogOptions::default();
    let ch = s.channels();
    methods
        .iter()
        .map(|&m| Ok(sum_rate(&combiners(m, &s, &csi, &shape, &opts)?, &ch)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::sinr;
    use crate::sim::trial_rng;

    #[test]
    fn digital_dominates_per_instance() {
        let p = SimParams {
            n: 64,
            ..SimParams::default()
        };
        let methods = [Method::FullyDigital, Method::Kronecker, Method::EqualGain, Method::AnalogMmse];
        for t in 0..40 {
            let s = p.draw_scenario(&mut trial_rng(3, 0, t)).unwrap();
            let csi = PartialCsi::from_scenario(&s);
            let shape = prime_factorization(64).unwrap();
            let ch = s.channels();
            let all: Vec<_> = methods
                .iter()
                .map(|&m| combiners(m, &s, &csi, &shape, &AnalogOptions::default()).unwrap())
                .collect();
            for k in 0..p.k {
                let best = sinr(&all[0][k], &ch, k);
                for w in &all[1..] {
                    assert!(sinr(&w[k], &ch, k) <= best * (1.0 + 1e-9));
                }
            }
        }
    }

    #[test]
    fn kronecker_rate_ignores_interference_power() {
        let mut p = SimParams {
            k: 2,
            ..SimParams::default()
        };
        let methods = [Method::Kronecker, Method::EqualGain];
        p.interference_snr_db = -20.0;
        let low = rate_trial(&p, &methods, &mut trial_rng(1, 0, 5)).unwrap();
        p.interference_snr_db = 20.0;
        let high = rate_trial(&p, &methods, &mut trial_rng(1, 0, 5)).unwrap();
        assert!((low[0] - high[0]).abs() < 1e-9 * low[0]);
        assert!(high[1] < low[1]);
    }

    #[test]
    fn estimated_csi_path_runs() {
        let p = SimParams {
            k: 2,
            z: 4,
            user_snr_db: 10.0,
            estimated_csi: true,
            min_separation: Some(0.2),
            ..SimParams::default()
        };
        let r = rate_trial(&p, &[Method::Kronecker, Method::FullyDigital], &mut trial_rng(4, 0, 0)).unwrap();
        assert!(r[0] > 0.0 && r[0] <= r[1] + 1e-9);
    }
}
