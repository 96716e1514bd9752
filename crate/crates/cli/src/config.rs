//! Experiment files.
//!
//! An experiment file is INI text with three sections:
//!
//! ```ini
//! [system]
//! n = 128
//! k = 4
//! m = 2
//! l = 2
//! z = 16
//!
//! [sweep]
//! param = rho_u_db
//! from = -20
//! to = 20
//! points = 9
//! scale = lin
//!
//! [run]
//! trials = 500
//! seed = 2017
//! methods = kronecker, digital_mmse
//! ```
//!
//! Every key is optional and falls back to the base spec (a preset, or the
//! defaults of [`default_spec`]). `--set section.key=value` overrides use
//! the same keys.

use std::f64::consts::TAU;

use ini::Ini;
use kronbf::sim::{
    ExperimentKind, ExperimentSpec, Method, Scale, SimParams, SweepAxis, SweepParam, DEFAULT_SEED,
};

use crate::CliError;

pub const SYSTEM_KEYS: [&str; 11] = [
    "n",
    "k",
    "m",
    "l",
    "z",
    "rho_u_db",
    "rho_i_db",
    "noise_var",
    "min_sep",
    "oversample",
    "estimated_csi",
];
pub const SWEEP_KEYS: [&str; 8] = ["param", "from", "to", "points", "scale", "values", "series_param", "series_values"];
pub const RUN_KEYS: [&str; 6] = ["name", "kind", "trials", "seed", "methods", "paired"];

fn section_keys(section: &str) -> Option<&'static [&'static str]> {
    match section {
        "system" => Some(&SYSTEM_KEYS),
        "sweep" => Some(&SWEEP_KEYS),
        "run" => Some(&RUN_KEYS),
        _ => None,
    }
}

/// One `key = value` setting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Setting {
    pub section: String,
    pub key: String,
    pub value: String,
}

/// Validated settings, in file order with overrides last.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings {
    pub entries: Vec<Setting>,
}

impl Settings {
    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|s| s.section == section && s.key == key)
            .map(|s| s.value.as_str())
    }

    /// Replaces or appends.
    pub fn set(&mut self, s: Setting) {
        self.entries.retain(|e| !(e.section == s.section && e.key == s.key));
        self.entries.push(s);
    }
}

/// Parses INI text, rejecting unknown sections and keys and repeated
/// sections or keys. Every problem is reported.
pub fn parse_settings(text: &str) -> Result<Settings, CliError> {
    let ini = Ini::load_from_str(text).map_err(|e| CliError::Parse(vec![format!("line {}", e)]))?;
    let mut errors = Vec::new();
    let mut seen_sections: Vec<&str> = Vec::new();
    let mut out = Settings::default();
    for (name, props) in ini.iter() {
        let Some(name) = name else {
            for (key, _) in props.iter() {
                errors.push(format!("key `{key}` appears before any section"));
            }
            continue;
        };
        let Some(allowed) = section_keys(name) else {
            errors.push(format!("unknown section [{name}]"));
            continue;
        };
        if seen_sections.contains(&name) {
            errors.push(format!("duplicate section [{name}]"));
        }
        seen_sections.push(name);
        let mut seen_keys: Vec<&str> = Vec::new();
        for (key, value) in props.iter() {
            if !allowed.contains(&key) {
                errors.push(format!("unknown key `{key}` in [{name}]"));
            } else if seen_keys.contains(&key) {
                errors.push(format!("duplicate key `{key}` in [{name}]"));
            } else {
                seen_keys.push(key);
                out.entries.push(Setting {
                    section: name.to_string(),
                    key: key.to_string(),
                    value: value.trim().to_string(),
                });
            }
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(CliError::Parse(errors))
    }
}

/// Parses `section.key=value`, or `key=value` when the key names exactly
/// one section's key.
pub fn parse_override(s: &str) -> Result<Setting, CliError> {
    let (lhs, value) = s
        .split_once('=')
        .ok_or_else(|| CliError::Parse(vec![format!("override `{s}` is not of the form key=value")]))?;
    let lhs = lhs.trim();
    let (section, key) = match lhs.split_once('.') {
        Some((sec, key)) => {
            let allowed = section_keys(sec).ok_or_else(|| CliError::Parse(vec![format!("unknown section [{sec}]")]))?;
            if !allowed.contains(&key) {
                return Err(CliError::Parse(vec![format!("unknown key `{key}` in [{sec}]")]));
            }
            (sec, key)
        }
        None => {
            let owners: Vec<&str> = ["system", "sweep", "run"]
                .into_iter()
                .filter(|sec| section_keys(sec).is_some_and(|k| k.contains(&lhs)))
                .collect();
            match owners[..] {
                [sec] => (sec, lhs),
                [] => return Err(CliError::Parse(vec![format!("unknown key `{lhs}`")])),
                _ => {
                    return Err(CliError::Parse(vec![format!(
                        "key `{lhs}` is ambiguous; qualify it with a section"
                    )]))
                }
            }
        }
    };
    Ok(Setting {
        section: section.to_string(),
        key: key.to_string(),
        value: value.trim().to_string(),
    })
}

/// Spec used when neither a preset nor a file says otherwise: one rate
/// evaluation of the Kronecker and fully digital receivers at 0 dB.
pub fn default_spec() -> ExperimentSpec {
    ExperimentSpec {
        name: "custom".into(),
        kind: ExperimentKind::Rate,
        base: SimParams::default(),
        sweep: SweepAxis::new(SweepParam::UserSnrDb, vec![0.0]),
        series: None,
        methods: vec![Method::Kronecker, Method::FullyDigital],
        trials: 100,
        seed: DEFAULT_SEED,
        paired: true,
        notes: Vec::new(),
    }
}

fn num<T: std::str::FromStr>(key: &str, value: &str, errors: &mut Vec<String>) -> Option<T> {
    match value.parse() {
        Ok(v) => Some(v),
        Err(_) => {
            errors.push(format!("`{key}`: cannot parse `{value}`"));
            None
        }
    }
}

fn boolean(key: &str, value: &str, errors: &mut Vec<String>) -> Option<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => {
            errors.push(format!("`{key}`: expected a boolean, got `{value}`"));
            None
        }
    }
}

fn list<T>(key: &str, value: &str, errors: &mut Vec<String>, f: impl Fn(&str) -> Option<T>) -> Option<Vec<T>> {
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match f(item) {
            Some(v) => out.push(v),
            None => {
                errors.push(format!("`{key}`: bad item `{item}`"));
                return None;
            }
        }
    }
    Some(out)
}

fn omega_grid(p: &SimParams) -> SweepAxis {
    let n_sam = p.oversample * p.n;
    SweepAxis::new(
        SweepParam::ScanAngle,
        (0..n_sam).map(|i| TAU * i as f64 / n_sam.max(1) as f64).collect(),
    )
}

/// Applies `settings` on top of `spec`. Every malformed value is reported.
pub fn apply_settings(spec: &mut ExperimentSpec, settings: &Settings) -> Result<(), CliError> {
    let mut errors = Vec::new();
    let e = &mut errors;
    let p = &mut spec.base;
    for key in SYSTEM_KEYS {
        let Some(v) = settings.get("system", key) else {
            continue;
        };
        match key {
            "n" => p.n = num(key, v, e).unwrap_or(p.n),
            "k" => p.k = num(key, v, e).unwrap_or(p.k),
            "m" => p.m = num(key, v, e).unwrap_or(p.m),
            "l" => p.l = num(key, v, e).unwrap_or(p.l),
            "z" => p.z = num(key, v, e).unwrap_or(p.z),
            "rho_u_db" => p.user_snr_db = num(key, v, e).unwrap_or(p.user_snr_db),
            "rho_i_db" => p.interference_snr_db = num(key, v, e).unwrap_or(p.interference_snr_db),
            "noise_var" => p.noise_var = num(key, v, e).unwrap_or(p.noise_var),
            "min_sep" => {
                p.min_separation = if v.eq_ignore_ascii_case("none") {
                    None
                } else {
                    num(key, v, e).or(p.min_separation)
                }
            }
            "oversample" => p.oversample = num(key, v, e).unwrap_or(p.oversample),
            "estimated_csi" => p.estimated_csi = boolean(key, v, e).unwrap_or(p.estimated_csi),
            _ => unreachable!(),
        }
    }

    if let Some(v) = settings.get("run", "name") {
        spec.name = v.to_string();
    }
    if let Some(v) = settings.get("run", "trials") {
        spec.trials = num("trials", v, e).unwrap_or(spec.trials);
    }
    if let Some(v) = settings.get("run", "seed") {
        spec.seed = num("seed", v, e).unwrap_or(spec.seed);
    }
    if let Some(v) = settings.get("run", "paired") {
        spec.paired = boolean("paired", v, e).unwrap_or(spec.paired);
    }
    if let Some(v) = settings.get("run", "methods") {
        if let Some(m) = list("methods", v, e, |s| Method::parse(s).ok()) {
            spec.methods = m;
        }
    }
    match settings.get("run", "kind") {
        Some(v) => match ExperimentKind::parse(v) {
            Ok(k) => spec.kind = k,
            Err(err) => e.push(err.to_string()),
        },
        None if settings.get("run", "methods").is_some() => {
            // A list of gain estimators implies an estimation experiment,
            // a list of beamformers a rate experiment.
            if !spec.methods.is_empty() && spec.methods.iter().all(|m| !m.is_beamformer()) {
                spec.kind = ExperimentKind::GainError;
            } else if spec.methods.iter().all(|m| m.is_beamformer()) && spec.kind == ExperimentKind::GainError {
                spec.kind = ExperimentKind::Rate;
            }
        }
        None => {}
    }

    let param = match settings.get("sweep", "param") {
        Some(v) => match SweepParam::parse(v) {
            Ok(p) => Some(p),
            Err(err) => {
                e.push(err.to_string());
                None
            }
        },
        None => Some(spec.sweep.param),
    };
    let touched = ["param", "from", "to", "points", "scale", "values"]
        .iter()
        .any(|k| settings.get("sweep", k).is_some());
    if let (true, Some(param)) = (touched, param) {
        if let Some(v) = settings.get("sweep", "values") {
            if let Some(values) = list("values", v, e, |s| s.parse().ok()) {
                spec.sweep = SweepAxis::new(param, values);
            }
        } else if param == SweepParam::ScanAngle && settings.get("sweep", "from").is_none() {
            spec.sweep = omega_grid(&spec.base);
        } else {
            let cur = &spec.sweep.values;
            let from = settings
                .get("sweep", "from")
                .and_then(|v| num("from", v, e))
                .or(cur.first().copied());
            let to = settings
                .get("sweep", "to")
                .and_then(|v| num("to", v, e))
                .or(cur.last().copied());
            let points = settings
                .get("sweep", "points")
                .and_then(|v| num("points", v, e))
                .unwrap_or(cur.len());
            let scale = match settings.get("sweep", "scale") {
                Some(v) => Scale::parse(v).map_err(|err| e.push(err.to_string())).ok(),
                None => Some(Scale::Linear),
            };
            match (from, to, scale) {
                (Some(from), Some(to), Some(scale)) => match SweepAxis::grid(param, from, to, points, scale) {
                    Ok(axis) => spec.sweep = axis,
                    Err(err) => e.push(err.to_string()),
                },
                (None, _, _) | (_, None, _) => e.push("sweep needs `from` and `to`".into()),
                _ => {}
            }
        }
    } else if spec.kind == ExperimentKind::Spectrum {
        // Follow the array size and oversampling.
        spec.sweep = omega_grid(&spec.base);
    } else if spec.sweep.param == SweepParam::ScanAngle {
        spec.sweep = default_spec().sweep;
    }

    match (settings.get("sweep", "series_param"), settings.get("sweep", "series_values")) {
        (Some(pn), Some(vals)) => match SweepParam::parse(pn) {
            Ok(sp) => {
                if let Some(values) = list("series_values", vals, e, |s| s.parse().ok()) {
                    spec.series = Some(SweepAxis::new(sp, values));
                }
            }
            Err(err) => e.push(err.to_string()),
        },
        (Some(pn), None) if pn.eq_ignore_ascii_case("none") => spec.series = None,
        (None, None) => {}
        _ => e.push("`series_param` and `series_values` go together".into()),
    }

    if errors.is_empty() {
        Ok(())
    } else {
        Err(CliError::Parse(errors))
    }
}

/// Spec described by `text` on top of [`default_spec`], validated.
pub fn parse_config(text: &str) -> Result<ExperimentSpec, CliError> {
    let settings = parse_settings(text)?;
    let mut spec = default_spec();
    apply_settings(&mut spec, &settings)?;
    spec.validate()?;
    Ok(spec)
}
