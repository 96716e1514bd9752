//! Construction-time measurement.

use std::hint::black_box;
use std::time::Instant;

use crate::analog::{AnalogOptions, PartialCsi};
use crate::error::Result;
use crate::kron::prime_factorization;
use crate::sim::rates::combiners;
use crate::sim::{trial_rng, ExperimentSpec, ResultRow, ResultTable};

/// Per-repetition wall-clock seconds of one construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingSample {
    pub seconds: Vec<f64>,
    /// Constructions averaged inside each repetition.
    pub batch: usize,
}

impl TimingSample {
    pub fn median(&self) -> f64 {
        median(&self.seconds)
    }

    /// `1.4826·MAD / √reps`.
    pub fn std_err(&self) -> f64 {
        let m = self.median();
        let dev: Vec<f64> = self.seconds.iter().map(|s| (s - m).abs()).collect();
        1.4826 * median(&dev) / (self.seconds.len() as f64).sqrt()
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Batch length that makes one repetition last at least this long, so that
/// fast constructions are not swamped by timer resolution.
const MIN_REP_SECONDS: f64 = 2e-3;

/// Times `reps` repetitions of `f` after one warm-up call.
pub fn time_construction<R, F: FnMut() -> R>(reps: usize, mut f: F) -> TimingSample {
    let start = Instant::now();
    black_box(f());
    let once = start.elapsed().as_secs_f64().max(1e-9);
    let batch = ((MIN_REP_SECONDS / once).ceil() as usize).clamp(1, 1_000_000);
    let seconds = (0..reps)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..batch {
                black_box(f());
            }
            start.elapsed().as_secs_f64() / batch as f64
        })
        .collect();
    TimingSample { seconds, batch }
}

pub(crate) fn run(spec: &ExperimentSpec) -> Result<ResultTable> {
    let params = spec.grid_params()?;
    let mut rows = Vec::new();
    let n_series = spec.series.as_ref().map_or(1, |s| s.values.len());
    for (gi, p) in params.iter().enumerate() {
        let s = p.draw_scenario(&mut trial_rng(spec.seed, gi as u64, 0))?;
        let csi = PartialCsi::from_scenario(&s);
        let shape = prime_factorization(p.n)?;
        let opts = AnalogOptions::default();
        let sv = spec.series.as_ref().map(|x| x.values[gi % n_series]);
        for &m in &spec.methods {
            // Fail early rather than timing an error path.
            combiners(m, &s, &csi, &shape, &opts)?;
            let t = time_construction(spec.trials, || combiners(m, &s, &csi, &shape, &opts));
            rows.push(ResultRow {
                sweep_value: spec.sweep.values[gi / n_series],
                method: spec.label(m.name(), sv),
                metric: "construction_seconds",
                mean: t.median(),
                std_err: t.std_err(),
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
    fn median_examples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn batches_fast_closures() {
        let t = time_construction(5, || 1 + 1);
        assert_eq!(t.seconds.len(), 5);
        assert!(t.batch > 1);
        assert!(t.median() >= 0.0 && t.std_err() >= 0.0);
    }
}
