//! Kronecker analog beamformer construction.
//!
//! A column is the left-Kronecker composition of `M` nulling factors, each
//! orthogonal to one interferer's steering factor, followed by a single
//! enhancement factor over the merged remaining dimensions that phase-aligns
//! with the residual data channel.

use num_complex::Complex;

use crate::array::{steering_vector, Path, PhaseAngle, Scenario};
use crate::error::{Error, Result};
use crate::hadamard;
use crate::kron::{kron_compose, strided_factor, FactorShape, KronFactors};
use crate::linalg::CMatrix;
use crate::scalar::{cis, dot_h, unit_phase, Real};

/// Row family used to build nulling factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NullingBasis {
    #[default]
    Fourier,
    /// Normalized Hadamard rows where a matrix of that order exists, Fourier
    /// rows otherwise.
    Hadamard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalogOptions {
    /// One-based row of the basis matrix; row 1 (all ones) is excluded.
    pub row_index: usize,
    pub basis: NullingBasis,
    /// Try every interferer-to-factor assignment and keep the one with the
    /// largest signal gain. Only used for up to [`MAX_SEARCH_NULLS`] nulls.
    pub search_assignment: bool,
}

impl Default for AnalogOptions {
    fn default() -> Self {
        Self {
            row_index: 2,
            basis: NullingBasis::Fourier,
            search_assignment: false,
        }
    }
}

/// Largest null count for which the assignment search is attempted.
pub const MAX_SEARCH_NULLS: usize = 6;

/// Elementwise product of `target` with a non-first basis row, so that the
/// result is orthogonal to `target`.
///
/// `target` must be uni-modulus for the orthogonality to hold.
pub fn nulling_factor<T: Real>(target: &[Complex<T>], row_index: usize, basis: NullingBasis) -> Result<Vec<Complex<T>>> {
    let n = target.len();
    if row_index < 2 || row_index > n {
        return Err(Error::InvalidRowIndex { row: row_index, len: n });
    }
    let r = row_index - 1;
    let row: Vec<Complex<T>> = match basis {
        NullingBasis::Hadamard if hadamard::is_supported(n) => {
            let h = hadamard::hadamard(n).expect("supported order");
            h[r].iter()
                .map(|&v| Complex::new(T::from_i8(v).expect("sign"), T::zero()))
                .collect()
        }
        _ => {
            let w = -T::TAU() / T::from_count(n);
            (0..n).map(|i| cis(w * T::from_count((r * i) % n))).collect()
        }
    };
    Ok(target.iter().zip(row).map(|(t, w)| t * w).collect())
}

/// Output of [`enhancement_factor`].
#[derive(Debug, Clone, PartialEq)]
pub struct Enhancement<T> {
    /// `f_eq`, uni-modulus.
    pub factor: Vec<Complex<T>>,
    /// Effective data gains `ã_ℓ` after the fixed factors.
    pub effective_gains: Vec<Complex<T>>,
    /// Residual channel `g̃` seen by the enhancement factor.
    pub merged: Vec<Complex<T>>,
    /// True when every data path was annihilated (`g̃ = 0`); the factor is
    /// then all ones.
    pub degenerate: bool,
}

/// Phase-aligned enhancement factor for the merged tail `n_{M+1}⋯n_D`, given
/// the first `M = fixed.len()` factors.
pub fn enhancement_factor<T: Real>(data: &[Path<T>], fixed: &[Vec<Complex<T>>], shape: &FactorShape) -> Result<Enhancement<T>> {
    let lengths = shape.lengths();
    if fixed.len() > lengths.len() {
        return Err(Error::InsufficientFactors {
            needed: fixed.len(),
            available: lengths.len(),
        });
    }
    let mut stride = 1;
    for (f, &n) in fixed.iter().zip(lengths) {
        if f.len() != n {
            return Err(Error::DimensionMismatch {
                what: "fixed factor length",
                expected: n,
                got: f.len(),
            });
        }
        stride *= n;
    }
    let tail: usize = lengths[fixed.len()..].iter().product();

    let zero = Complex::new(T::zero(), T::zero());
    let mut effective = Vec::with_capacity(data.len());
    let mut merged = vec![zero; tail];
    let mut scale = T::zero();
    for p in data {
        let mut a = p.gain;
        let mut s = 1;
        for f in fixed {
            a *= dot_h(f, &strided_factor(p.angle, f.len(), s));
            s *= f.len();
        }
        scale += p.gain.norm();
        for (g, u) in merged.iter_mut().zip(strided_factor(p.angle, tail, stride)) {
            *g += a * u;
        }
        effective.push(a);
    }
    let peak = merged.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let tol = T::lit(64.0) * T::epsilon() * scale * T::from_count(stride);
    let degenerate = !(peak > tol);
    // A length-one tail only carries a global phase, so it stays at 1.
    let factor = if degenerate || tail == 1 {
        vec![Complex::new(T::one(), T::zero()); tail]
    } else {
        merged.iter().map(|&z| unit_phase(z)).collect()
    };
    Ok(Enhancement {
        factor,
        effective_gains: effective,
        merged,
        degenerate,
    })
}

/// One designed analog column with its factor form and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnDesign<T> {
    /// Length-`N` uni-modulus weights.
    pub weights: Vec<Complex<T>>,
    /// Nulling factors followed by the merged enhancement factor.
    pub factors: KronFactors<T>,
    /// `assignment[i]` is the factor index nulling `nulls[i]`.
    pub assignment: Vec<usize>,
    pub enhancement: Enhancement<T>,
}

impl<T: Real> ColumnDesign<T> {
    /// `|f_eqᴴ g̃|`, the signal gain `|fᴴ g|` of the column.
    pub fn signal_gain(&self) -> T {
        dot_h(&self.enhancement.factor, &self.enhancement.merged).norm()
    }

    pub fn is_degenerate(&self) -> bool {
        self.enhancement.degenerate
    }
}

/// Builds one column that nulls every angle in `nulls` and enhances the
/// coherent sum of `data`.
///
/// Null `i` is assigned to factor `i` of the sorted shape unless the
/// assignment search is enabled.
pub fn design_column<T: Real>(
    data: &[Path<T>],
    nulls: &[PhaseAngle<T>],
    shape: &FactorShape,
    opts: &AnalogOptions,
) -> Result<ColumnDesign<T>> {
    let d = shape.len();
    if nulls.len() > d {
        return Err(Error::InsufficientFactors {
            needed: nulls.len(),
            available: d,
        });
    }
    if nulls.iter().any(|t| data.iter().any(|p| p.angle == *t)) {
        return Err(Error::DegenerateScenario);
    }
    let m = nulls.len();
    let identity: Vec<usize> = (0..m).collect();
    if !opts.search_assignment || m < 2 || m > MAX_SEARCH_NULLS {
        return build_column(data, nulls, &identity, shape, opts);
    }
    let mut best: Option<ColumnDesign<T>> = None;
    for perm in permutations(m) {
        let c = build_column(data, nulls, &perm, shape, opts)?;
        let better = match &best {
            None => true,
            Some(b) => c.signal_gain() > b.signal_gain(),
        };
        if better {
            best = Some(c);
        }
    }
    Ok(best.expect("at least one permutation"))
}

fn build_column<T: Real>(
    data: &[Path<T>],
    nulls: &[PhaseAngle<T>],
    assignment: &[usize],
    shape: &FactorShape,
    opts: &AnalogOptions,
) -> Result<ColumnDesign<T>> {
    let lengths = shape.lengths();
    let strides = shape.strides();
    let m = nulls.len();
    // Factor slot j (j < M) nulls the interferer whose assignment is j.
    let mut fixed: Vec<Vec<Complex<T>>> = vec![Vec::new(); m];
    for (theta, &slot) in nulls.iter().zip(assignment) {
        let target = strided_factor(*theta, lengths[slot], strides[slot]);
        // Factors shorter than the requested row use their last row.
        fixed[slot] = nulling_factor(&target, opts.row_index.min(lengths[slot]), opts.basis)?;
    }
    let enhancement = enhancement_factor(data, &fixed, shape)?;
    let mut factors = fixed;
    factors.push(enhancement.factor.clone());
    let weights = kron_compose(&factors);
    Ok(ColumnDesign {
        weights,
        factors: KronFactors::new(factors),
        assignment: assignment.to_vec(),
        enhancement,
    })
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(m), &mut vec![false; m], &mut out);
    out
}

/// The partial channel knowledge a beamformer is built from: data paths of
/// every user and the interference angles to null.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialCsi<T> {
    pub data_paths: Vec<Vec<Path<T>>>,
    pub interference_angles: Vec<PhaseAngle<T>>,
}

impl<T: Real> PartialCsi<T> {
    /// Exact knowledge of every data path and every interference angle.
    pub fn from_scenario(s: &Scenario<T>) -> Self {
        Self {
            data_paths: s.data_paths.clone(),
            interference_angles: s.interf_paths.iter().map(|p| p.angle).collect(),
        }
    }

    /// Exact data paths, but only the listed interferers are nulled.
    pub fn with_selected_interferers(s: &Scenario<T>, selected: &[usize]) -> Self {
        Self {
            data_paths: s.data_paths.clone(),
            interference_angles: selected.iter().map(|&i| s.interf_paths[i].angle).collect(),
        }
    }
}

/// `N × K` analog beamformer, one Kronecker-designed column per user.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogBeamformer<T> {
    pub columns: Vec<ColumnDesign<T>>,
}

impl<T: Real> AnalogBeamformer<T> {
    pub fn matrix(&self) -> CMatrix<T> {
        let cols: Vec<_> = self.columns.iter().map(|c| c.weights.clone()).collect();
        CMatrix::from_columns(&cols).expect("equal column lengths")
    }

    pub fn weights(&self) -> Vec<Vec<Complex<T>>> {
        self.columns.iter().map(|c| c.weights.clone()).collect()
    }

    /// Largest `|f_kᴴ v(θ)| / N` over columns and the given angles.
    pub fn max_nulling_residual(&self, angles: &[PhaseAngle<T>]) -> T {
        let mut worst = T::zero();
        for c in &self.columns {
            let n = c.weights.len();
            for &a in angles {
                let r = dot_h(&c.weights, &steering_vector(a, n)).norm() / T::from_count(n);
                worst = worst.max(r);
            }
        }
        worst
    }

    pub fn any_degenerate(&self) -> bool {
        self.columns.iter().any(ColumnDesign::is_degenerate)
    }
}

/// Column for user `k` that nulls every interferer of the scenario.
pub fn kron_analog_beamformer<T: Real>(
    scenario: &Scenario<T>,
    k: usize,
    shape: &FactorShape,
    opts: &AnalogOptions,
) -> Result<ColumnDesign<T>> {
    if scenario.is_degenerate() {
        return Err(Error::DegenerateScenario);
    }
    let nulls: Vec<_> = scenario.interf_paths.iter().map(|p| p.angle).collect();
    design_column(&scenario.data_paths[k], &nulls, shape, opts)
}

/// One column per user from the given channel knowledge.
pub fn multiuser_analog<T: Real>(csi: &PartialCsi<T>, shape: &FactorShape, opts: &AnalogOptions) -> Result<AnalogBeamformer<T>> {
    let columns = csi
        .data_paths
        .iter()
        .map(|paths| design_column(paths, &csi.interference_angles, shape, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(AnalogBeamformer { columns })
}

/// Analog zero-forcing beam: unit response design towards `target` with
/// every angle in `nulls` annihilated.
pub fn kron_zf_beamformer<T: Real>(
    target: PhaseAngle<T>,
    nulls: &[PhaseAngle<T>],
    shape: &FactorShape,
    opts: &AnalogOptions,
) -> Result<ColumnDesign<T>> {
    if nulls.contains(&target) {
        return Err(Error::TargetInNullSet);
    }
    let data = [Path {
        gain: Complex::new(T::one(), T::zero()),
        angle: target,
    }];
    design_column(&data, nulls, shape, opts)
}

/// Interferers worth a nulling factor: those with received power
/// `P'_n|β_n|² ≥ threshold`, strongest first, at most `D − 1` of them so
/// at least one factor is left for enhancement.
pub fn adaptive_allocation<T: Real>(scenario: &Scenario<T>, threshold: T, shape: &FactorShape) -> Vec<usize> {
    let c = &scenario.config;
    let mut picked: Vec<(usize, T)> = scenario
        .interf_paths
        .iter()
        .enumerate()
        .map(|(i, p)| (i, c.interferer_power[i] * p.gain.norm_sqr()))
        .filter(|&(_, pw)| pw >= threshold)
        .collect();
    picked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(&b.0)));
    picked.truncate(shape.len().saturating_sub(1));
    picked.into_iter().map(|(i, _)| i).collect()
}
