//! Monte Carlo experiments over one swept system parameter.
//!
//! An [`ExperimentSpec`] names a workload ([`ExperimentKind`]), a base
//! parameter set, the swept parameter and its grid, and the methods to
//! compare. [`monte_carlo`] evaluates every grid point and returns a
//! [`ResultTable`] with one row per (grid value, method, metric).
//!
//! Trial `t` at stream index `s` draws from a ChaCha stream seeded by the
//! experiment seed with stream number `(s << 32) | t`, so the table depends
//! only on the experiment definition, never on thread scheduling.

mod estimation;
mod presets;
mod rates;
mod timing;

use std::fmt;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::array::{draw_scenario, draw_scenario_separated, Scenario, SystemConfig};
use crate::error::{Error, Result};
use crate::kron::prime_factorization;
use crate::scalar::db_to_linear;

pub use estimation::{estimation_trial, spectrum_snapshot, EstimationErrors};
pub use presets::{preset, DEFAULT_SEED, PRESETS};
pub use rates::{combiners, rate_trial};
pub use timing::{median, time_construction, TimingSample};

/// Beamforming and estimation methods that can be compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Kronecker analog stage plus digital MMSE.
    Kronecker,
    /// Unconstrained MMSE over all antennas.
    FullyDigital,
    /// Element phases of each user's channel, plus digital MMSE.
    EqualGain,
    /// Element phases of the fully digital MMSE vectors, plus digital MMSE.
    AnalogMmse,
    /// Coherent-combining gain estimator.
    CoherentCombining,
    /// Analog zero-forcing gain estimator.
    ZeroForcing,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Kronecker,
        Method::FullyDigital,
        Method::EqualGain,
        Method::AnalogMmse,
        Method::CoherentCombining,
        Method::ZeroForcing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Kronecker => "kronecker",
            Method::FullyDigital => "digital_mmse",
            Method::EqualGain => "equal_gain",
            Method::AnalogMmse => "analog_mmse",
            Method::CoherentCombining => "cc",
            Method::ZeroForcing => "zf",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`")))
    }

    /// Whether the method builds a receive beamformer (as opposed to a gain
    /// estimator).
    pub fn is_beamformer(self) -> bool {
        !matches!(self, Method::CoherentCombining | Method::ZeroForcing)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameter that a sweep (or series) varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    N,
    K,
    M,
    L,
    Z,
    /// `ρ_U = P / N₀` in dB.
    UserSnrDb,
    /// `ρ_I = P' / N₀` in dB.
    InterferenceSnrDb,
    /// Minimum pairwise path separation in radians.
    MinSeparation,
    /// Scan angle `Ω` (spectrum snapshots only).
    ScanAngle,
}

impl SweepParam {
    pub const ALL: [SweepParam; 9] = [
        SweepParam::N,
        SweepParam::K,
        SweepParam::M,
        SweepParam::L,
        SweepParam::Z,
        SweepParam::UserSnrDb,
        SweepParam::InterferenceSnrDb,
        SweepParam::MinSeparation,
        SweepParam::ScanAngle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::N => "n",
            SweepParam::K => "k",
            SweepParam::M => "m",
            SweepParam::L => "l",
            SweepParam::Z => "z",
            SweepParam::UserSnrDb => "rho_u_db",
            SweepParam::InterferenceSnrDb => "rho_i_db",
            SweepParam::MinSeparation => "min_sep",
            SweepParam::ScanAngle => "omega",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        SweepParam::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown sweep parameter `{s}`")))
    }

    pub fn is_integer(self) -> bool {
        matches!(self, SweepParam::N | SweepParam::K | SweepParam::M | SweepParam::L | SweepParam::Z)
    }

    /// Writes `value` into `p`.
    pub fn apply(self, p: &mut SimParams, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!("{} = {value} is not finite", self.name())));
        }
        let count = || -> Result<usize> {
            let r = value.round();
            if (value - r).abs() > 1e-9 || r < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "{} must be a nonnegative integer (got {value})",
                    self.name()
                )));
            }
            Ok(r as usize)
        };
        match self {
            SweepParam::N => p.n = count()?,
            SweepParam::K => p.k = count()?,
            SweepParam::M => p.m = count()?,
            SweepParam::L => p.l = count()?,
            SweepParam::Z => p.z = count()?,
            SweepParam::UserSnrDb => p.user_snr_db = value,
            SweepParam::InterferenceSnrDb => p.interference_snr_db = value,
            SweepParam::MinSeparation => p.min_separation = Some(value),
            SweepParam::ScanAngle => {}
        }
        Ok(())
    }
}

/// Grid spacing of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scale {
    #[default]
    Linear,
    /// Evenly spaced in decibels of the value, i.e. geometric.
    Db,
}

impl Scale {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lin" | "linear" => Ok(Scale::Linear),
            "db" | "log" => Ok(Scale::Db),
            other => Err(Error::InvalidArgument(format!("unknown scale `{other}` (expected lin or db)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl SweepAxis {
    pub fn new(param: SweepParam, values: Vec<f64>) -> Self {
        Self { param, values }
    }

    /// `points` values from `from` to `to` inclusive. Integer parameters are
    /// rounded to the nearest integer.
    pub fn grid(param: SweepParam, from: f64, to: f64, points: usize, scale: Scale) -> Result<Self> {
        if points == 0 {
            return Err(Error::InvalidArgument("sweep needs at least one point".into()));
        }
        if !(from.is_finite() && to.is_finite()) {
            return Err(Error::InvalidArgument("sweep bounds must be finite".into()));
        }
        if scale == Scale::Db && !(from > 0.0 && to > 0.0) {
            return Err(Error::InvalidArgument("db-spaced sweep needs positive bounds".into()));
        }
        let values = (0..points)
            .map(|i| {
                let t = if points == 1 { 0.0 } else { i as f64 / (points - 1) as f64 };
                let v = match scale {
                    Scale::Linear => from + (to - from) * t,
                    Scale::Db => from * (to / from).powf(t),
                };
                if param.is_integer() {
                    v.round()
                } else {
                    v
                }
            })
            .collect();
        Ok(Self { param, values })
    }
}

/// What one trial evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Sum rate (spectral efficiency for one user) of each beamformer.
    Rate,
    /// Two-stage estimation with each gain estimator.
    GainError,
    /// Despread AoA spectrum of user 0 at the swept scan angles.
    Spectrum,
    /// Median wall-clock construction time of each beamformer.
    Timing,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 4] = [
        ExperimentKind::Rate,
        ExperimentKind::GainError,
        ExperimentKind::Spectrum,
        ExperimentKind::Timing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Rate => "rate",
            ExperimentKind::GainError => "gain_error",
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::Timing => "timing",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown experiment kind `{s}`")))
    }

    pub fn metrics(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::Rate => &["sum_rate"],
            ExperimentKind::GainError => &["gain_error", "aoa_error", "interference_aoa_error"],
            ExperimentKind::Spectrum => &["magnitude"],
            ExperimentKind::Timing => &["construction_seconds"],
        }
    }
}

/// Scalar parameters of one grid point. Powers are given in dB relative to
/// the noise variance and converted when the system configuration is built.
#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub l: usize,
    pub z: usize,
    pub user_snr_db: f64,
    pub interference_snr_db: f64,
    pub noise_var: f64,
    /// Minimum pairwise separation of all path angles; i.i.d. uniform
    /// angles when absent.
    pub min_separation: Option<f64>,
    /// Scan grid size as a multiple of `N`.
    pub oversample: usize,
    /// Build the Kronecker beamformer from estimated rather than exact
    /// channel knowledge (rates are always evaluated on the true channel).
    pub estimated_csi: bool,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            n: 128,
            k: 4,
            m: 2,
            l: 2,
            z: 16,
            user_snr_db: 0.0,
            interference_snr_db: 0.0,
            noise_var: 1.0,
            min_separation: None,
            oversample: 8,
            estimated_csi: false,
        }
    }
}

impl SimParams {
    /// One random scenario: separated angles when `min_separation` is set,
    /// i.i.d. uniform angles otherwise.
    pub fn draw_scenario<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Scenario<f64>> {
        let cfg = self.config();
        match self.min_separation {
            Some(sep) => draw_scenario_separated(&cfg, sep, rng),
            None => draw_scenario(&cfg, rng),
        }
    }

    pub fn config(&self) -> SystemConfig<f64> {
        SystemConfig::uniform(
            self.n,
            self.k,
            self.m,
            self.l,
            self.z,
            db_to_linear(self.user_snr_db) * self.noise_var,
            db_to_linear(self.interference_snr_db) * self.noise_var,
            self.noise_var,
        )
    }

    /// Violated constraints for running `methods`, plus the
    /// factor shortage if the array cannot host the required nulls.
    fn check(&self, methods: &[Method]) -> (Vec<String>, Option<Error>) {
        let mut v = self.config().violations();
        if !(self.noise_var > 0.0) {
            v.push("noise variance must be positive".into());
        }
        if self.oversample < 2 {
            v.push(format!("oversample must be at least 2 (got {})", self.oversample));
        }
        if let Some(s) = self.min_separation {
            if !(s >= 0.0) {
                v.push(format!("min_sep must be nonnegative (got {s})"));
            }
        }
        if self.k > self.z {
            v.push(format!("k = {} exceeds pilot length z = {}; orthogonal pilots need k <= z", self.k, self.z));
        }
        let mut shortage = None;
        if self.n >= 2 {
            let d = prime_factorization(self.n).map(|s| s.len()).unwrap_or(0);
            let needed = if methods.contains(&Method::ZeroForcing) {
                self.m + self.l.saturating_sub(1)
            } else if methods.contains(&Method::Kronecker) {
                self.m
            } else {
                0
            };
            if needed > d {
                v.push(format!(
                    "n = {} factorizes into {d} Kronecker factors but {needed} nulls are needed",
                    self.n
                ));
                shortage = Some(Error::InsufficientFactors { needed, available: d });
            }
        }
        (v, shortage)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub kind: ExperimentKind,
    pub base: SimParams,
    pub sweep: SweepAxis,
    /// Optional second parameter; each value yields its own curve with the
    /// value appended to the method label.
    pub series: Option<SweepAxis>,
    pub methods: Vec<Method>,
    /// Monte Carlo trials per grid point (repetitions for timing).
    pub trials: usize,
    pub seed: u64,
    /// Reuse the same random streams at every grid point (common random
    /// numbers); otherwise the grid index selects the stream.
    pub paired: bool,
    /// Free-form remarks carried into the result table.
    pub notes: Vec<String>,
}

/// Minimum repetitions for a timing median.
pub const MIN_TIMING_REPS: usize = 21;

impl ExperimentSpec {
    /// All parameter sets the experiment will run, grid-major.
    pub fn grid_params(&self) -> Result<Vec<SimParams>> {
        let series: Vec<Option<f64>> = match &self.series {
            Some(s) => s.values.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        let mut out = Vec::with_capacity(self.sweep.values.len() * series.len());
        for &v in &self.sweep.values {
            for &sv in &series {
                let mut p = self.base.clone();
                self.sweep.param.apply(&mut p, v)?;
                if let (Some(s), Some(sv)) = (&self.series, sv) {
                    s.param.apply(&mut p, sv)?;
                }
                out.push(p);
            }
        }
        Ok(out)
    }

    /// Every violated constraint, or `InsufficientFactors` when that is the
    /// only problem.
    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if self.trials < 1 {
            v.push("trials must be at least 1".to_string());
        }
        if self.kind == ExperimentKind::Timing && self.trials < MIN_TIMING_REPS {
            v.push(format!("timing needs at least {MIN_TIMING_REPS} repetitions (got {})", self.trials));
        }
        if self.sweep.values.is_empty() {
            v.push("sweep grid is empty".to_string());
        }
        if matches!(&self.series, Some(s) if s.values.is_empty()) {
            v.push("series grid is empty".to_string());
        }
        let scan_sweep = self.sweep.param == SweepParam::ScanAngle;
        if scan_sweep != (self.kind == ExperimentKind::Spectrum) {
            v.push("the omega sweep is used by spectrum experiments and only by them".to_string());
        }
        if matches!(&self.series, Some(s) if s.param == SweepParam::ScanAngle) {
            v.push("omega cannot be a series parameter".to_string());
        }
        match self.kind {
            ExperimentKind::Spectrum => {}
            ExperimentKind::GainError => {
                if self.methods.is_empty() {
                    v.push("no methods selected".to_string());
                }
                for m in &self.methods {
                    if m.is_beamformer() {
                        v.push(format!("method {m} is not a gain estimator"));
                    }
                }
            }
            ExperimentKind::Rate | ExperimentKind::Timing => {
                if self.methods.is_empty() {
                    v.push("no methods selected".to_string());
                }
                for m in &self.methods {
                    if !m.is_beamformer() {
                        v.push(format!("method {m} is not a beamformer"));
                    }
                }
            }
        }
        let mut shortage = None;
        match self.grid_params() {
            Ok(params) => {
                for p in &params {
                    let (pv, ps) = p.check(&self.methods);
                    for s in pv {
                        if !v.contains(&s) {
                            v.push(s);
                        }
                    }
                    shortage = shortage.or(ps);
                }
            }
            Err(e) => v.push(e.to_string()),
        }
        match (v.len(), shortage) {
            (0, _) => Ok(()),
            (1, Some(e)) => Err(e),
            _ => Err(Error::InvalidConfig(v)),
        }
    }

    fn label(&self, method: &str, series_value: Option<f64>) -> String {
        match (&self.series, series_value) {
            (Some(s), Some(v)) => format!("{method}[{}={v}]", s.param.name()),
            _ => method.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub method: String,
    pub metric: &'static str,
    /// Sample mean (the median for timing rows).
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub experiment: String,
    pub param: SweepParam,
    pub rows: Vec<ResultRow>,
    pub notes: Vec<String>,
}

/// Fixed 12-significant-digit rendering used in every CSV file.
pub fn format_number(x: f64) -> String {
    format!("{x:.11e}")
}

impl ResultTable {
    pub fn find(&self, sweep_value: f64, method: &str, metric: &str) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.sweep_value == sweep_value && r.method == method && r.metric == metric)
    }

    /// Rows of one curve in grid order.
    pub fn curve<'a>(&'a self, method: &'a str, metric: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.method == method && r.metric == metric)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{},method,metric,mean,stderr,trials", self.param.name())?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                format_number(r.sweep_value),
                r.method,
                r.metric,
                format_number(r.mean),
                format_number(r.std_err),
                r.trials
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}

/// Random stream of trial `trial` at stream index `index`.
pub fn trial_rng(seed: u64, index: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((index << 32) | (trial & 0xffff_ffff));
    rng
}

/// Mean and standard error with compensated (Neumaier) summation.
pub fn mean_and_std_err(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = compensated_sum(values.iter().copied()) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    (mean, (ss / (n - 1) as f64 / n as f64).sqrt())
}

fn compensated_sum(it: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in it {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Runs every grid point of `spec`.
pub fn monte_carlo(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    match spec.kind {
        ExperimentKind::Timing => timing::run(spec),
        ExperimentKind::Spectrum => estimation::run_spectrum(spec),
        ExperimentKind::Rate | ExperimentKind::GainError => run_trials(spec),
    }
}

fn series_values(spec: &ExperimentSpec) -> Vec<Option<f64>> {
    match &spec.series {
        Some(s) => s.values.iter().copied().map(Some).collect(),
        None => vec![None],
    }
}

fn run_trials(spec: &ExperimentSpec) -> Result<ResultTable> {
    let params = spec.grid_params()?;
    let series = series_values(spec);
    let metrics = spec.kind.metrics();
    let mut rows = Vec::new();
    for (gi, p) in params.iter().enumerate() {
        let si = gi / series.len();
        let sv = series[gi % series.len()];
        let index = if spec.paired { (gi % series.len()) as u64 } else { gi as u64 };
        let results: Vec<Vec<f64>> = (0..spec.trials as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(spec.seed, index, t);
                match spec.kind {
                    ExperimentKind::Rate => rate_trial(p, &spec.methods, &mut rng),
                    _ => estimation_trial(p, &spec.methods, &mut rng).map(|e| e.flatten()),
                }
            })
            .collect::<Result<_>>()?;
        for (mi, m) in spec.methods.iter().enumerate() {
            for (ci, &metric) in metrics.iter().enumerate() {
                let col = mi * metrics.len() + ci;
                let vals: Vec<f64> = results.iter().map(|r| r[col]).collect();
                let (mean, std_err) = mean_and_std_err(&vals);
                rows.push(ResultRow {
                    sweep_value: spec.sweep.values[si],
                    method: spec.label(m.name(), sv),
                    metric,
                    mean,
                    std_err,
                    trials: spec.trials,
                });
            }
        }
    }
    Ok(ResultTable {
        experiment: spec.name.clone(),
        param: spec.sweep.param,
        rows,
        notes: spec.notes.clone(),
    })
}
