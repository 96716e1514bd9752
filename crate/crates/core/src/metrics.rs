//! Rate and estimation-accuracy metrics.

use num_complex::Complex;

use crate::array::{ChannelSet, PhaseAngle};
use crate::scalar::{dot_h, norm_sqr, Real};

/// Post-combining SINR of user `k` for receive vector `w`, counting
/// intra-cell, inter-cell and noise terms.
pub fn sinr<T: Real>(w: &[Complex<T>], ch: &ChannelSet<T>, k: usize) -> T {
    let signal = ch.user_power[k] * dot_h(w, &ch.g[k]).norm_sqr();
    let mut denom = ch.noise_var * norm_sqr(w);
    for (m, g) in ch.g.iter().enumerate() {
        if m != k {
            denom += ch.user_power[m] * dot_h(w, g).norm_sqr();
        }
    }
    for (h, &p) in ch.h.iter().zip(&ch.interferer_power) {
        denom += p * dot_h(w, h).norm_sqr();
    }
    if signal == T::zero() {
        return T::zero();
    }
    signal / denom
}

/// `log₂(1 + SINR_k)`.
pub fn user_rate<T: Real>(w: &[Complex<T>], ch: &ChannelSet<T>, k: usize) -> T {
    (T::one() + sinr(w, ch, k)).log2()
}

/// `Σ_k R_k` with `combiners[k]` the receive vector of user `k`.
pub fn sum_rate<T: Real>(combiners: &[Vec<Complex<T>>], ch: &ChannelSet<T>) -> T {
    combiners.iter().enumerate().map(|(k, w)| user_rate(w, ch, k)).sum()
}

/// Mean circular distance under the minimum-cost one-to-one matching of
/// `estimated` into `truth`.
///
/// With more estimates than true angles only the best `truth.len()` are
/// matched. Returns 0 when either side is empty.
pub fn aoa_error<T: Real>(estimated: &[PhaseAngle<T>], truth: &[PhaseAngle<T>]) -> T {
    match matched_distances(estimated, truth) {
        Some(d) if !d.is_empty() => d.iter().copied().sum::<T>() / T::from_count(d.len()),
        _ => T::zero(),
    }
}

/// Distances of the minimum-total matching, one per matched pair, or `None`
/// when more than 20 angles would need matching.
pub fn matched_distances<T: Real>(estimated: &[PhaseAngle<T>], truth: &[PhaseAngle<T>]) -> Option<Vec<T>> {
    let pairs = matched_pairs(estimated, truth)?;
    Some(
        pairs
            .into_iter()
            .map(|(e, t)| estimated[e].circular_distance(truth[t]))
            .collect(),
    )
}

/// Index pairs `(estimate, truth)` of the minimum-total circular-distance
/// matching, ordered by the index on the shorter side.
pub fn matched_pairs<T: Real>(estimated: &[PhaseAngle<T>], truth: &[PhaseAngle<T>]) -> Option<Vec<(usize, usize)>> {
    let swapped = estimated.len() > truth.len();
    let (small, large) = if swapped { (truth, estimated) } else { (estimated, truth) };
    if small.is_empty() {
        return Some(Vec::new());
    }
    if large.len() > 20 {
        return None;
    }
    let cost = |i: usize, j: usize| small[i].circular_distance(large[j]);
    // dp[mask] = best cost of matching the first popcount(mask) of `small`
    // to the columns in `mask`.
    let width = large.len();
    let full = 1usize << width;
    let inf = T::infinity();
    let mut dp = vec![inf; full];
    let mut choice = vec![usize::MAX; full];
    dp[0] = T::zero();
    for mask in 0..full {
        let i = mask.count_ones() as usize;
        if i >= small.len() || dp[mask] == inf {
            continue;
        }
        for j in 0..width {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << j);
                let c = dp[mask] + cost(i, j);
                if c < dp[next] {
                    dp[next] = c;
                    choice[next] = j;
                }
            }
        }
    }
    let best = (0..full)
        .filter(|m| m.count_ones() as usize == small.len())
        .min_by(|&a, &b| dp[a].partial_cmp(&dp[b]).unwrap_or(std::cmp::Ordering::Equal))?;
    let mut out = Vec::with_capacity(small.len());
    let mut mask = best;
    for i in (0..small.len()).rev() {
        let j = choice[mask];
        out.push(if swapped { (j, i) } else { (i, j) });
        mask &= !(1 << j);
    }
    out.reverse();
    Some(out)
}
