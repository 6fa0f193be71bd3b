//! Gaussian-input capacity of the degraded two-user broadcast channel.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::scalar::{half_log2, Real};

/// A point `(C₁(α), C₂(α))` on the capacity boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityPoint<T> {
    pub alpha: T,
    pub c1: T,
    pub c2: T,
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha >= T::zero() && alpha <= T::one() {
        Ok(())
    } else {
        invalid(format!("alpha must lie in [0, 1], got {alpha}"))
    }
}

fn check_snr<T: Real>(snr: T) -> Result<()> {
    if snr > T::zero() && snr.is_finite() {
        Ok(())
    } else {
        invalid(format!("snr must be positive and finite, got {snr}"))
    }
}

/// Strong user's rate with SIC: `½log₂(1 + α·SNR₁)`.
pub fn c1<T: Real>(alpha: T, snr1: T) -> Result<T> {
    check_alpha(alpha)?;
    check_snr(snr1)?;
    Ok(half_log2(T::one() + alpha * snr1))
}

/// Weak user's rate treating user 1's Gaussian signal as noise.
pub fn c2<T: Real>(alpha: T, snr2: T) -> Result<T> {
    check_alpha(alpha)?;
    check_snr(snr2)?;
    Ok(half_log2(
        T::one() + (T::one() - alpha) * snr2 / (T::one() + alpha * snr2),
    ))
}

/// Point-to-point AWGN capacity `½log₂(1 + snr)`.
pub fn awgn_capacity<T: Real>(snr: T) -> T {
    half_log2(T::one() + snr)
}

/// Samples the boundary at each grid value; `α = 0` and `α = 1` are always added.
pub fn capacity_boundary<T: Real>(snr1: T, snr2: T, alpha_grid: &[T]) -> Result<Vec<CapacityPoint<T>>> {
    if alpha_grid.is_empty() {
        return invalid("alpha grid must not be empty");
    }
    let mut alphas: Vec<T> = alpha_grid.to_vec();
    for a in &alphas {
        check_alpha(*a)?;
    }
    alphas.push(T::zero());
    alphas.push(T::one());
    alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    alphas.dedup();
    alphas
        .into_iter()
        .map(|alpha| {
            Ok(CapacityPoint {
                alpha,
                c1: c1(alpha, snr1)?,
                c2: c2(alpha, snr2)?,
            })
        })
        .collect()
}

/// Uniform grid of `n ≥ 2` values on `[0, 1]`.
pub fn uniform_alpha_grid<T: Real>(n: usize) -> Vec<T> {
    let n = n.max(2);
    let last = T::from_count(n - 1);
    (0..n).map(|i| T::from_count(i) / last).collect()
}

/// Ratio of the capacity-boundary slope to the single-user time-sharing slope at
/// the sum-rate-optimal corner.
pub fn relative_gain<T: Real>(snr1: T, snr2: T) -> Result<T> {
    check_snr(snr1)?;
    check_snr(snr2)?;
    let denom_log = (T::one() + snr2).log2();
    if !(denom_log > T::zero()) {
        return invalid(format!("log2(1 + snr2) vanishes for snr2 = {snr2}"));
    }
    let one = T::one();
    Ok(snr2 * (one + snr1) / (snr1 * (one + snr2)) * (one + snr1).log2() / denom_log)
}
