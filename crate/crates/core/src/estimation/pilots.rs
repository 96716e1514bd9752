//! Binary pilot sequences.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hadamard;
use crate::scalar::Real;

/// Orthogonal pilots of the intended users and random pilots of the
/// interferers, all with entries in `{+1, −1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PilotBook {
    pub intended: Vec<Vec<i8>>,
    pub interfering: Vec<Vec<i8>>,
}

impl PilotBook {
    /// Pilot length `Z`.
    pub fn len(&self) -> usize {
        self.intended.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `γ_n = s_nᵀ x_k / √Z` for every interferer `n`.
    pub fn contamination_gammas<T: Real>(&self, k: usize) -> Vec<T> {
        let z = T::from_count(self.len()).sqrt();
        self.interfering
            .iter()
            .map(|s| {
                let d: i32 = s.iter().zip(&self.intended[k]).map(|(&a, &b)| a as i32 * b as i32).sum();
                T::from_i32(d).expect("small integer") / z
            })
            .collect()
    }
}

/// Sequence as complex symbols scaled by `amplitude`.
pub fn to_symbols<T: Real>(seq: &[i8], amplitude: T) -> Vec<Complex<T>> {
    seq.iter()
        .map(|&v| Complex::new(T::from_i8(v).expect("sign") * amplitude, T::zero()))
        .collect()
}

/// `k` mutually orthogonal `±1` sequences of length `z`.
///
/// A single user gets the all-ones sequence for any `z`. Two users with an
/// even `z` get the all-ones and the half-split sequence. Otherwise the
/// first `k` rows of a normalized Hadamard matrix of order `z` are used.
pub fn orthogonal_pilots(k: usize, z: usize) -> Result<Vec<Vec<i8>>> {
    if k > z {
        return Err(Error::TooManyUsers { users: k, len: z });
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    if k == 1 {
        return Ok(vec![vec![1; z]]);
    }
    if let Some(h) = hadamard::hadamard(z) {
        return Ok(h.into_iter().take(k).collect());
    }
    if k == 2 && z % 2 == 0 {
        let split = (0..z).map(|i| if i < z / 2 { 1 } else { -1 }).collect();
        return Ok(vec![vec![1; z], split]);
    }
    Err(Error::UnsupportedPilotLength { users: k, len: z })
}

/// Rademacher sequence of length `z`.
pub fn random_pilot<R: Rng + ?Sized>(z: usize, rng: &mut R) -> Vec<i8> {
    (0..z).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()
}

/// Orthogonal intended pilots and `m` independent random interferer pilots.
pub fn make_pilots<R: Rng + ?Sized>(k: usize, m: usize, z: usize, rng: &mut R) -> Result<PilotBook> {
    let intended = orthogonal_pilots(k, z)?;
    let interfering = (0..m).map(|_| random_pilot(z, rng)).collect();
    Ok(PilotBook { intended, interfering })
}
