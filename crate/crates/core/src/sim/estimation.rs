//! Estimation trials and spectrum snapshots.

use rand::Rng;

use crate::array::{PhaseAngle, Scenario};
use crate::error::Result;
use crate::estimation::spectrum::spectrum_value;
use crate::estimation::{
    estimate_channel, make_pilots, normalized_streams, transmit_training, ChannelEstimate, EstimatorOptions,
    GainMethod,
};
use crate::metrics::{aoa_error, matched_pairs};
use crate::sim::{mean_and_std_err, trial_rng, ExperimentSpec, Method, ResultRow, ResultTable, SimParams};

/// Errors of one estimation run per selected method.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationErrors {
    /// `(gain_error, aoa_error, interference_aoa_error)` per method.
    pub per_method: Vec<(f64, f64, f64)>,
}

impl EstimationErrors {
    pub fn flatten(&self) -> Vec<f64> {
        self.per_method.iter().flat_map(|&(a, b, c)| [a, b, c]).collect()
    }
}

fn errors(est: &ChannelEstimate<f64>, s: &Scenario<f64>) -> (f64, f64, f64) {
    let (mut gain, mut count) = (0.0, 0usize);
    let (mut angle, mut matched) = (0.0, 0usize);
    for (k, truth) in s.data_paths.iter().enumerate() {
        let est_angles = est.data_angles(k);
        let true_angles: Vec<_> = truth.iter().map(|p| p.angle).collect();
        let pairs = matched_pairs(&est_angles, &true_angles).unwrap_or_default();
        let mut hit = vec![false; truth.len()];
        for &(e, t) in &pairs {
            hit[t] = true;
            let a_hat = est.data[k][e].gain.unwrap_or_default();
            gain += (a_hat - truth[t].gain).norm();
            angle += est_angles[e].circular_distance(true_angles[t]);
            matched += 1;
        }
        for (t, p) in truth.iter().enumerate() {
            if !hit[t] {
                gain += p.gain.norm();
            }
        }
        count += truth.len();
    }
    let theta: Vec<_> = s.interf_paths.iter().map(|p| p.angle).collect();
    let interference = aoa_error(&est.interference_angles(), &theta);
    (
        gain / count.max(1) as f64,
        if matched > 0 { angle / matched as f64 } else { 0.0 },
        interference,
    )
}

/// One training block estimated with each selected gain estimator.
pub fn estimation_trial<R: Rng + ?Sized>(p: &SimParams, methods: &[Method], rng: &mut R) -> Result<EstimationErrors> {
    let s = p.draw_scenario(rng)?;
    let pilots = make_pilots(p.k, p.m, p.z, rng)?;
    let y = transmit_training(&s, &pilots, rng)?;
    let per_method = methods
        .iter()
        .map(|&m| {
            let opts = EstimatorOptions {
                oversample: p.oversample,
                gain_method: if m == Method::ZeroForcing {
                    GainMethod::ZeroForcing
                } else {
                    GainMethod::CoherentCombining
                },
                ..EstimatorOptions::default()
            };
            let est = estimate_channel(&y, &pilots, &s.config.user_power, Some((p.l, p.m)), &opts)?;
            Ok(errors(&est, &s))
        })
        .collect::<Result<_>>()?;
    Ok(EstimationErrors { per_method })
}

/// User 0's normalized despread spectrum at `angles`, one realization.
pub fn spectrum_snapshot<R: Rng + ?Sized>(p: &SimParams, angles: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let s = p.draw_scenario(rng)?;
    let pilots = make_pilots(p.k, p.m, p.z, rng)?;
    let y = transmit_training(&s, &pilots, rng)?;
    let streams = normalized_streams(&y, &pilots, &s.config.user_power)?;
    Ok(angles.iter().map(|&a| spectrum_value(&streams[0], PhaseAngle::new(a))).collect())
}

pub(crate) fn run_spectrum(spec: &ExperimentSpec) -> Result<ResultTable> {
    let series: Vec<Option<f64>> = match &spec.series {
        Some(s) => s.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let angles = &spec.sweep.values;
    // values[series][trial][angle]
    let mut values = Vec::with_capacity(series.len());
    for sv in &series {
        let mut p = spec.base.clone();
        if let (Some(s), Some(v)) = (&spec.series, sv) {
            s.param.apply(&mut p, *v)?;
        }
        // The same stream per trial for every series value, so the channel
        // realization is shared across curves.
        let per_trial = (0..spec.trials as u64)
            .map(|t| spectrum_snapshot(&p, angles, &mut trial_rng(spec.seed, 0, t)))
            .collect::<Result<Vec<_>>>()?;
        values.push(per_trial);
    }
    let mut rows = Vec::with_capacity(angles.len() * series.len());
    for (ai, &a) in angles.iter().enumerate() {
        for (si, sv) in series.iter().enumerate() {
            let v: Vec<f64> = values[si].iter().map(|t| t[ai]).collect();
            let (mean, std_err) = mean_and_std_err(&v);
            rows.push(ResultRow {
                sweep_value: a,
                method: spec.label("spectrum", *sv),
                metric: "magnitude",
                mean,
                std_err,
                trials: spec.trials,
            });
        }
    }
    Ok(ResultTable {
        experiment: spec.name.clone(),
        param: spec.sweep.param,
        rows,
        notes: spec.notes.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn high_snr_estimation_is_accurate() {
        let p = SimParams {
            n: 256,
            k: 2,
            z: 16,
            user_snr_db: 30.0,
            interference_snr_db: 30.0,
            min_separation: Some(0.3),
            ..SimParams::default()
        };
        let e = estimation_trial(&p, &[Method::CoherentCombining, Method::ZeroForcing], &mut trial_rng(2, 0, 0)).unwrap();
        let res = std::f64::consts::TAU / (8.0 * 256.0);
        for &(g, a, i) in &e.per_method {
            assert!(g < 0.1, "{g}");
            assert!(a < res, "{a}");
            assert!(i < res, "{i}");
        }
        assert_eq!(e.flatten().len(), 6);
    }
}
