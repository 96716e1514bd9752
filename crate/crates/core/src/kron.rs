//! Kronecker factorization of array vectors.
//!
//! Composition uses the left Kronecker product, in which the first factor
//! varies fastest: `(a ⊗ₗ b)[q·len(a) + p] = a[p]·b[q]`. Under this convention a
//! steering vector splits into factors whose strides are the running products
//! of the preceding factor lengths.

use num_complex::Complex;

use crate::array::PhaseAngle;
use crate::error::{Error, Result};
use crate::scalar::{cis_multiple, dot_h, Real};

/// Sorted factor lengths `n₁ ≤ … ≤ n_D`, each at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorShape {
    lengths: Vec<usize>,
}

impl FactorShape {
    /// Builds a shape from arbitrary lengths; they are sorted ascending.
    pub fn new(mut lengths: Vec<usize>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::InvalidArgument("factor shape needs at least one length".into()));
        }
        if let Some(bad) = lengths.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidArgument(format!("factor length {bad} is below 2")));
        }
        lengths.sort_unstable();
        Ok(Self { lengths })
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Number of factors `D`.
    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    /// Product of all lengths.
    pub fn total(&self) -> usize {
        self.lengths.iter().product()
    }

    /// Stride `S_m = n_{m−1}⋯n₁` of each factor.
    pub fn strides(&self) -> Vec<usize> {
        strides_of(&self.lengths)
    }
}

pub(crate) fn strides_of(lengths: &[usize]) -> Vec<usize> {
    let mut s = Vec::with_capacity(lengths.len());
    let mut acc = 1;
    for &n in lengths {
        s.push(acc);
        acc *= n;
    }
    s
}

/// Ascending prime multiset of `n`.
pub fn prime_factorization(n: usize) -> Result<FactorShape> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("cannot factor {n}; need n >= 2")));
    }
    let mut out = Vec::new();
    let mut r = n;
    let mut p = 2;
    while p * p <= r {
        while r % p == 0 {
            out.push(p);
            r /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if r > 1 {
        out.push(r);
    }
    FactorShape::new(out)
}

/// Left Kronecker product: the first argument varies fastest.
pub fn left_kron<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for bq in b {
        for ap in a {
            out.push(ap * bq);
        }
    }
    out
}

/// Ordered list of factor vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct KronFactors<T> {
    pub factors: Vec<Vec<Complex<T>>>,
}

impl<T: Real> KronFactors<T> {
    pub fn new(factors: Vec<Vec<Complex<T>>>) -> Self {
        Self { factors }
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.factors.iter().map(Vec::len).collect()
    }

    pub fn compose(&self) -> Vec<Complex<T>> {
        kron_compose(&self.factors)
    }
}

/// Left fold of [`left_kron`] over the factors.
///
/// An empty list composes to the scalar `[1]`.
pub fn kron_compose<T: Real>(factors: &[Vec<Complex<T>>]) -> Vec<Complex<T>> {
    let mut acc = vec![Complex::new(T::one(), T::zero())];
    for f in factors {
        acc = left_kron(&acc, f);
    }
    acc
}

/// Factor `[1, e^{jSφ}, …, e^{j(n−1)Sφ}]` of length `n` and stride `S`.
pub fn strided_factor<T: Real>(phi: PhaseAngle<T>, len: usize, stride: usize) -> Vec<Complex<T>> {
    let p = phi.value();
    (0..len).map(|i| cis_multiple(i * stride, p)).collect()
}

/// Decomposes `v(φ)` into factors over `shape`.
pub fn steering_factors<T: Real>(phi: PhaseAngle<T>, shape: &FactorShape) -> KronFactors<T> {
    steering_factors_for_lengths(phi, shape.lengths())
}

/// Decomposition of `v(φ)` for an arbitrary ordered grouping of lengths
/// (lengths of one are allowed).
pub fn steering_factors_for_lengths<T: Real>(phi: PhaseAngle<T>, lengths: &[usize]) -> KronFactors<T> {
    let factors = lengths
        .iter()
        .zip(strides_of(lengths))
        .map(|(&n, s)| strided_factor(phi, n, s))
        .collect();
    KronFactors { factors }
}

/// `Π_m (f^(m))ᴴ v^(m)`, equal to `compose(f)ᴴ compose(v)`.
pub fn mixed_product_inner<T: Real>(f: &KronFactors<T>, v: &KronFactors<T>) -> Result<Complex<T>> {
    if f.factors.len() != v.factors.len() {
        return Err(Error::DimensionMismatch {
            what: "factor count",
            expected: f.factors.len(),
            got: v.factors.len(),
        });
    }
    let mut acc = Complex::new(T::one(), T::zero());
    for (a, b) in f.factors.iter().zip(&v.factors) {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                what: "factor length",
                expected: a.len(),
                got: b.len(),
            });
        }
        acc *= dot_h(a, b);
    }
    Ok(acc)
}
