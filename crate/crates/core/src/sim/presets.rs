//! Named experiments at desk scale.
//!
//! All presets start from `N = 128`, `L = 2`, `M = 2`, `K = 4`, 0 dB user
//! and interferer SNR, unit noise variance and i.i.d. uniform angles, then
//! change what the experiment needs.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::sim::{ExperimentKind, ExperimentSpec, Method, Scale, SimParams, SweepAxis, SweepParam, MIN_TIMING_REPS};

pub const PRESETS: [&str; 8] = ["fig4", "fig5a", "fig5b", "fig6a", "fig6b", "fig7", "fig8a", "fig8b"];

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 2017;

const BEAMFORMERS: [Method; 4] = [Method::Kronecker, Method::FullyDigital, Method::EqualGain, Method::AnalogMmse];

fn spec(name: &str, kind: ExperimentKind, base: SimParams, sweep: SweepAxis, methods: &[Method], trials: usize) -> ExperimentSpec {
    ExperimentSpec {
        name: name.to_string(),
        kind,
        base,
        sweep,
        series: None,
        methods: methods.to_vec(),
        trials,
        seed: DEFAULT_SEED,
        paired: true,
        notes: Vec::new(),
    }
}

fn snr_sweep(param: SweepParam) -> SweepAxis {
    SweepAxis::grid(param, -20.0, 20.0, 9, Scale::Linear).expect("valid grid")
}

/// The preset called `name`.
pub fn preset(name: &str) -> Result<ExperimentSpec> {
    let single = SimParams {
        k: 1,
        ..SimParams::default()
    };
    let s = match name {
        "fig4" => {
            let base = SimParams {
                k: 1,
                ..SimParams::default()
            };
            let n_sam = base.oversample * base.n;
            let angles = (0..n_sam).map(|i| TAU * i as f64 / n_sam as f64).collect();
            let mut s = spec(
                name,
                ExperimentKind::Spectrum,
                base,
                SweepAxis::new(SweepParam::ScanAngle, angles),
                &[],
                1,
            );
            s.series = Some(SweepAxis::new(SweepParam::Z, vec![1.0, 10.0]));
            s.notes.push("one channel realization shared by both pilot lengths".into());
            s
        }
        "fig5a" => spec(
            name,
            ExperimentKind::GainError,
            SimParams::default(),
            SweepAxis::grid(SweepParam::N, 64.0, 1024.0, 5, Scale::Db).expect("valid grid"),
            &[Method::CoherentCombining, Method::ZeroForcing],
            500,
        ),
        "fig5b" => {
            let mut s = spec(
                name,
                ExperimentKind::GainError,
                SimParams::default(),
                SweepAxis::grid(SweepParam::InterferenceSnrDb, -10.0, 30.0, 5, Scale::Linear).expect("valid grid"),
                &[Method::CoherentCombining, Method::ZeroForcing],
                500,
            );
            s.series = Some(SweepAxis::new(SweepParam::MinSeparation, vec![0.05, 0.2]));
            s
        }
        "fig6a" => spec(name, ExperimentKind::Rate, single, snr_sweep(SweepParam::UserSnrDb), &BEAMFORMERS, 500),
        "fig6b" => spec(
            name,
            ExperimentKind::Rate,
            single,
            snr_sweep(SweepParam::InterferenceSnrDb),
            &BEAMFORMERS,
            500,
        ),
        "fig7" => {
            let mut s = spec(
                name,
                ExperimentKind::Timing,
                single,
                SweepAxis::grid(SweepParam::N, 128.0, 2048.0, 5, Scale::Db).expect("valid grid"),
                &BEAMFORMERS,
                MIN_TIMING_REPS,
            );
            s.notes.push("mean column holds the median over repetitions; stderr is 1.4826*MAD/sqrt(reps)".into());
            s.notes.push("wall-clock values vary between runs".into());
            s
        }
        "fig8a" | "fig8b" => {
            let param = if name == "fig8a" {
                SweepParam::UserSnrDb
            } else {
                SweepParam::InterferenceSnrDb
            };
            let mut s = spec(
                name,
                ExperimentKind::Rate,
                SimParams::default(),
                snr_sweep(param),
                &[Method::Kronecker, Method::FullyDigital],
                500,
            );
            s.notes.push(
                "iterative hybrid block diagonalization and two-stage hybrid beamforming baselines are not implemented"
                    .into(),
            );
            s
        }
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(s)
}
