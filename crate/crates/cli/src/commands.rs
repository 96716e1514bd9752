//! Subcommand bodies. Each returns the CSV text and its metadata lines.

use std::fmt::Write as _;

use kronbf::analog::{multiuser_analog, AnalogOptions, PartialCsi};
use kronbf::array::{steering_vector, PhaseAngle};
use kronbf::estimation::{aoa_spectrum, estimate_channel, make_pilots, normalized_streams, transmit_training};
use kronbf::estimation::{EstimatorOptions, GainMethod};
use kronbf::kron::prime_factorization;
use kronbf::metrics::{matched_pairs, sum_rate, user_rate};
use kronbf::sim::{
    combiners, format_number, monte_carlo, preset, trial_rng, ExperimentKind, ExperimentSpec, Method, SweepAxis,
    SweepParam, PRESETS,
};
use kronbf::C64;

use crate::{CliError, Output};

fn meta(spec: &ExperimentSpec, command: &str) -> Vec<String> {
    let mut m = vec![
        format!("command={command}"),
        format!("experiment={}", spec.name),
        format!("kind={}", spec.kind.name()),
        format!("seed={}", spec.seed),
        format!("trials={}", spec.trials),
        format!("paired={}", spec.paired),
    ];
    m.extend(spec.notes.iter().map(|n| format!("note={n}")));
    m
}

/// `spec` reduced to its base parameters, validated for one evaluation of
/// `kind` with `methods`.
fn single_point(spec: &ExperimentSpec, kind: ExperimentKind, methods: Vec<Method>) -> Result<ExperimentSpec, CliError> {
    let mut s = spec.clone();
    s.kind = kind;
    s.methods = methods;
    s.series = None;
    s.trials = 1;
    s.sweep = if kind == ExperimentKind::Spectrum {
        SweepAxis::new(SweepParam::ScanAngle, vec![0.0])
    } else {
        SweepAxis::new(SweepParam::UserSnrDb, vec![spec.base.user_snr_db])
    };
    s.validate()?;
    Ok(s)
}

fn num(x: f64) -> String {
    format_number(x)
}

/// Columns `angle,magnitude`; `oversample·N` rows over `[0, 2π)`.
pub fn spectrum(spec: &ExperimentSpec, user: usize) -> Result<Output, CliError> {
    let s = single_point(spec, ExperimentKind::Spectrum, Vec::new())?;
    let p = &s.base;
    if user >= p.k {
        return Err(CliError::Usage(format!("user {user} out of range (k = {})", p.k)));
    }
    let mut rng = trial_rng(s.seed, 0, 0);
    let sc = p.draw_scenario(&mut rng)?;
    let pilots = make_pilots(p.k, p.m, p.z, &mut rng)?;
    let y = transmit_training(&sc, &pilots, &mut rng)?;
    let streams = normalized_streams(&y, &pilots, &sc.config.user_power)?;
    let spec_k = aoa_spectrum(&streams[user], p.oversample * p.n)?;
    let mut csv = String::from("angle,magnitude\n");
    for (i, v) in spec_k.values.iter().enumerate() {
        writeln!(csv, "{},{}", num(spec_k.angle(i).value()), num(*v)).unwrap();
    }
    let mut m = meta(&s, "spectrum");
    m.push(format!("user={user}"));
    Ok(Output { csv, meta: m })
}

fn dot_h(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Columns `method,user,record,index,re,im`. Records: `weight` (element
/// `index` of user's combiner), `residual` (`|wᴴv(θ)| / (‖w‖√N)` for
/// interferer `index`, in `re`), `rate` (user rate in bit/s/Hz, in `re`)
/// and `sum_rate` (user column empty).
pub fn beamform(spec: &ExperimentSpec) -> Result<Output, CliError> {
    let methods: Vec<Method> = if spec.methods.is_empty() {
        vec![Method::Kronecker]
    } else {
        spec.methods.clone()
    };
    let s = single_point(spec, ExperimentKind::Rate, methods)?;
    let p = &s.base;
    let sc = p.draw_scenario(&mut trial_rng(s.seed, 0, 0))?;
    let csi = PartialCsi::from_scenario(&sc);
    let shape = prime_factorization(p.n)?;
    let opts = AnalogOptions::default();
    let ch = sc.channels();
    let mut csv = String::from("method,user,record,index,re,im\n");
    let zero = num(0.0);
    for &m in &s.methods {
        let w = combiners(m, &sc, &csi, &shape, &opts)?;
        for (k, wk) in w.iter().enumerate() {
            for (i, x) in wk.iter().enumerate() {
                writeln!(csv, "{m},{k},weight,{i},{},{}", num(x.re), num(x.im)).unwrap();
            }
            let norm = wk.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() * (p.n as f64).sqrt();
            for (i, path) in sc.interf_paths.iter().enumerate() {
                let r = dot_h(wk, &steering_vector(path.angle, p.n)).norm() / norm;
                writeln!(csv, "{m},{k},residual,{i},{},{zero}", num(r)).unwrap();
            }
            writeln!(csv, "{m},{k},rate,0,{},{zero}", num(user_rate(wk, &ch, k))).unwrap();
        }
        writeln!(csv, "{m},,sum_rate,0,{},{zero}", num(sum_rate(&w, &ch))).unwrap();
    }
    let mut meta = meta(&s, "beamform");
    if s.methods.contains(&Method::Kronecker) {
        let analog = multiuser_analog(&csi, &shape, &opts)?;
        let angles: Vec<PhaseAngle<f64>> = csi.interference_angles.clone();
        meta.push(format!("kronecker_max_analog_residual={}", num(analog.max_nulling_residual(&angles))));
    }
    Ok(Output { csv, meta })
}

/// Columns `class,user,index,angle,magnitude,gain_re,gain_im,true_angle,
/// true_gain_re,true_gain_im,angle_error,gain_error`. Empty fields mark
/// quantities that do not exist (no gain for interference estimates, no
/// truth for an unmatched estimate).
pub fn estimate(spec: &ExperimentSpec) -> Result<Output, CliError> {
    let method = spec
        .methods
        .iter()
        .copied()
        .find(|m| !m.is_beamformer())
        .unwrap_or(Method::CoherentCombining);
    let s = single_point(spec, ExperimentKind::GainError, vec![method])?;
    let p = &s.base;
    let mut rng = trial_rng(s.seed, 0, 0);
    let sc = p.draw_scenario(&mut rng)?;
    let pilots = make_pilots(p.k, p.m, p.z, &mut rng)?;
    let y = transmit_training(&sc, &pilots, &mut rng)?;
    let opts = EstimatorOptions {
        oversample: p.oversample,
        gain_method: if method == Method::ZeroForcing {
            GainMethod::ZeroForcing
        } else {
            GainMethod::CoherentCombining
        },
        ..EstimatorOptions::default()
    };
    let est = estimate_channel(&y, &pilots, &sc.config.user_power, Some((p.l, p.m)), &opts)?;
    let mut csv = String::from(
        "class,user,index,angle,magnitude,gain_re,gain_im,true_angle,true_gain_re,true_gain_im,angle_error,gain_error\n",
    );
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    for (k, paths) in est.data.iter().enumerate() {
        let truth: Vec<_> = sc.data_paths[k].iter().map(|t| t.angle).collect();
        let pairs = matched_pairs(&est.data_angles(k), &truth).unwrap_or_default();
        for (i, e) in paths.iter().enumerate() {
            let t = pairs.iter().find(|&&(ei, _)| ei == i).map(|&(_, ti)| &sc.data_paths[k][ti]);
            writeln!(
                csv,
                "data,{k},{i},{},{},{},{},{},{},{},{},{}",
                num(e.angle.value()),
                num(e.magnitude),
                opt(e.gain.map(|g| g.re)),
                opt(e.gain.map(|g| g.im)),
                opt(t.map(|t| t.angle.value())),
                opt(t.map(|t| t.gain.re)),
                opt(t.map(|t| t.gain.im)),
                opt(t.map(|t| e.angle.circular_distance(t.angle))),
                opt(t.zip(e.gain).map(|(t, g)| (g - t.gain).norm())),
            )
            .unwrap();
        }
    }
    let truth: Vec<_> = sc.interf_paths.iter().map(|t| t.angle).collect();
    let pairs = matched_pairs(&est.interference_angles(), &truth).unwrap_or_default();
    for (i, e) in est.interference.iter().enumerate() {
        let t = pairs.iter().find(|&&(ei, _)| ei == i).map(|&(_, ti)| &sc.interf_paths[ti]);
        writeln!(
            csv,
            "interference,,{i},{},{},,,{},{},{},{},",
            num(e.angle.value()),
            num(e.magnitude),
            opt(t.map(|t| t.angle.value())),
            opt(t.map(|t| t.gain.re)),
            opt(t.map(|t| t.gain.im)),
            opt(t.map(|t| e.angle.circular_distance(t.angle))),
        )
        .unwrap();
    }
    let mut meta = meta(&s, "estimate");
    meta.push(format!("gain_method={method}"));
    meta.push(format!("resolution={}", num(est.resolution)));
    Ok(Output { csv, meta })
}

/// The result table of [`monte_carlo`]: `{param},method,metric,mean,stderr,trials`.
pub fn sweep(spec: &ExperimentSpec) -> Result<Output, CliError> {
    let table = monte_carlo(spec)?;
    let mut m = meta(spec, "sweep");
    m.push(format!("param={}", spec.sweep.param.name()));
    if let Some(s) = &spec.series {
        m.push(format!("series={}", s.param.name()));
    }
    Ok(Output {
        csv: table.to_csv(),
        meta: m,
    })
}

/// Columns `name,kind,param,points,methods,trials`.
pub fn presets() -> Output {
    let mut csv = String::from("name,kind,param,points,methods,trials\n");
    for name in PRESETS {
        let s = preset(name).expect("built-in preset");
        let methods: Vec<&str> = s.methods.iter().map(|m| m.name()).collect();
        writeln!(
            csv,
            "{name},{},{},{},{},{}",
            s.kind.name(),
            s.sweep.param.name(),
            s.sweep.values.len(),
            methods.join(" "),
            s.trials
        )
        .unwrap();
    }
    Output { csv, meta: Vec::new() }
}
