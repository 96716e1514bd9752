//! Pilot-contamination level and coherent-combining error bound.
//!
//! Both work in the normalized training domain, in which user `k`'s path
//! `ℓ` appears with amplitude `a_{kℓ}` and interferer `n` with amplitude
//! `β̃_n = β_n √(P'_n / P_k)`.

use crate::array::{steering_kernel, Scenario};
use crate::error::{Error, Result};
use crate::estimation::pilots::PilotBook;
use crate::scalar::Real;

/// Realized contamination of user `k`'s spectrum at its data angles and the
/// matching upper bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Contamination<T> {
    /// `η = max_ℓ (1/√Z)|Σ_n γ_n β̃_n K(Θ_n, Φ_ℓ)|`.
    pub eta: T,
    /// `2 Σ_n |γ_n β̃_n| / (√Z N Ψ_min)`.
    pub bound: T,
    pub gammas: Vec<T>,
}

fn effective_interference<T: Real>(s: &Scenario<T>, k: usize) -> Vec<num_complex::Complex<T>> {
    let pk = s.config.user_power[k];
    s.interf_paths
        .iter()
        .zip(&s.config.interferer_power)
        .map(|(p, &pw)| {
            if pk > T::zero() {
                p.gain * (pw / pk).sqrt()
            } else {
                p.gain
            }
        })
        .collect()
}

/// Contamination level of user `k` under `pilots`.
pub fn contamination_level<T: Real>(s: &Scenario<T>, pilots: &PilotBook, k: usize) -> Result<Contamination<T>> {
    let z = T::from_count(pilots.len()).sqrt();
    let n = s.config.n;
    let gammas = pilots.contamination_gammas::<T>(k);
    if s.interf_paths.is_empty() {
        return Ok(Contamination {
            eta: T::zero(),
            bound: T::zero(),
            gammas,
        });
    }
    let beta = effective_interference(s, k);
    let mut psi = T::infinity();
    for h in &s.interf_paths {
        for p in &s.data_paths[k] {
            psi = psi.min(h.angle.circular_distance(p.angle));
        }
    }
    if !(psi > T::zero()) {
        return Err(Error::ZeroSeparation);
    }
    let mut eta = T::zero();
    for p in &s.data_paths[k] {
        let mut acc = num_complex::Complex::new(T::zero(), T::zero());
        for ((h, b), g) in s.interf_paths.iter().zip(&beta).zip(&gammas) {
            acc += b * *g * steering_kernel(h.angle, p.angle, n);
        }
        eta = eta.max(acc.norm() / z);
    }
    let total: T = beta.iter().zip(&gammas).map(|(b, g)| b.norm() * g.abs()).sum();
    let bound = T::lit(2.0) * total / (z * T::from_count(n) * psi);
    Ok(Contamination { eta, bound, gammas })
}

/// `2 α_max (L + M − 1) / (Ψ_min N)` for path `l` of user `k`, with
/// `α_max` the largest gain magnitude among user `k`'s paths and the
/// (power-scaled) interferers and `Ψ_min` the smallest separation between
/// the target and any other of those paths.
pub fn cc_error_bound<T: Real>(s: &Scenario<T>, k: usize, l: usize) -> Result<T> {
    let paths = &s.data_paths[k];
    let others = paths.len() - 1 + s.interf_paths.len();
    if others == 0 {
        return Ok(T::zero());
    }
    let target = paths[l].angle;
    let beta = effective_interference(s, k);
    let mut alpha = T::zero();
    for p in paths {
        alpha = alpha.max(p.gain.norm());
    }
    for b in &beta {
        alpha = alpha.max(b.norm());
    }
    let mut psi = T::infinity();
    for (j, p) in paths.iter().enumerate() {
        if j != l {
            psi = psi.min(p.angle.circular_distance(target));
        }
    }
    for h in &s.interf_paths {
        psi = psi.min(h.angle.circular_distance(target));
    }
    if !(psi > T::zero()) {
        return Err(Error::ZeroSeparation);
    }
    Ok(T::lit(2.0) * alpha * T::from_count(others) / (psi * T::from_count(s.config.n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{Path, SystemConfig};
    use num_complex::Complex;

    type C = Complex<f64>;

    fn scenario(n: usize, data: &[(C, f64)], interf: &[(C, f64)]) -> Scenario<f64> {
        let cfg = SystemConfig::uniform(n, 1, interf.len(), data.len(), 4, 1.0, 1.0, 1.0);
        Scenario::new(
            cfg,
            vec![data.iter().map(|&(a, p)| Path::new(a, p)).collect()],
            interf.iter().map(|&(a, p)| Path::new(a, p)).collect(),
        )
        .unwrap()
    }

    fn book(x: Vec<i8>, s: Vec<Vec<i8>>) -> PilotBook {
        PilotBook {
            intended: vec![x],
            interfering: s,
        }
    }

    #[test]
    fn no_interferers() {
        let s = scenario(64, &[(C::new(1.0, 0.0), 1.0)], &[]);
        let c = contamination_level(&s, &book(vec![1; 4], vec![]), 0).unwrap();
        assert_eq!((c.eta, c.bound), (0.0, 0.0));
        assert_eq!(cc_error_bound(&s, 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn bound_scaling() {
        let data = [(C::new(1.0, 0.0), 1.0), (C::new(0.5, 0.5), 2.5)];
        let interf = [(C::new(0.0, 2.0), 1.3)];
        let p = book(vec![1; 4], vec![vec![1, 1, -1, 1]]);
        let a = contamination_level(&scenario(128, &data, &interf), &p, 0).unwrap();
        let b = contamination_level(&scenario(256, &data, &interf), &p, 0).unwrap();
        assert!((a.bound / b.bound - 2.0).abs() < 1e-12);
        assert!((a.gammas[0] - 1.0).abs() < 1e-12);

        let near = cc_error_bound(&scenario(128, &data, &[(C::new(0.0, 2.0), 1.2)]), 0, 0).unwrap();
        let far = cc_error_bound(&scenario(128, &data, &[(C::new(0.0, 2.0), 1.4)]), 0, 0).unwrap();
        assert!((near / far - 2.0).abs() < 1e-9);
        let expect = 2.0 * 2.0 * 2.0 / (0.2 * 128.0);
        assert!((near - expect).abs() < 1e-9);
    }

    #[test]
    fn zero_separation_errors() {
        let s = scenario(64, &[(C::new(1.0, 0.0), 1.0), (C::new(1.0, 0.0), 1.0)], &[]);
        assert_eq!(cc_error_bound(&s, 0, 0), Err(Error::ZeroSeparation));
    }
}
