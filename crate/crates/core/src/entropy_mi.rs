//! Mutual information of discrete inputs over Gaussian-mixture channels.
//!
//! Each receiver treats the other user's PAM signal as noise, so both the
//! output and the interference-plus-noise are Gaussian mixtures with discrete
//! centres. Their differential entropies are evaluated either with per-atom
//! Gauss–Hermite quadrature or by seeded Monte Carlo; the closed-form lower
//! bounds follow from the minimum distance of the (effective) constellation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use gauss_quad::GaussHermite;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::constellation::{dmin_formula, make_pam, superimpose, ChannelParams, User};
use crate::error::{invalid, Result};
use crate::scalar::{half_log2, shaping_loss, Real};

pub const DEFAULT_QUAD_ORDER: usize = 96;
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;
pub const DEFAULT_SEED: u64 = 0xD15C0DE;

/// How a differential entropy (and hence an exact mutual information) is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiMethod {
    /// Per-atom Gauss–Hermite rule of the given order; the error estimate is the
    /// difference to a rule of twice the order.
    Quadrature { order: usize },
    /// Seeded sampling; the error estimate is three standard errors.
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for MiMethod {
    fn default() -> Self {
        MiMethod::Quadrature {
            order: DEFAULT_QUAD_ORDER,
        }
    }
}

impl MiMethod {
    fn kind(&self) -> EstimateKind {
        match self {
            MiMethod::Quadrature { .. } => EstimateKind::Quadrature,
            MiMethod::MonteCarlo { .. } => EstimateKind::MonteCarlo,
        }
    }

    /// Same method with the Monte Carlo stream re-keyed for an independent task.
    fn for_task(&self, key: u64) -> MiMethod {
        match *self {
            MiMethod::MonteCarlo { samples, seed } => MiMethod::MonteCarlo {
                samples,
                seed: mix_seed(seed, key),
            },
            q => q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    Quadrature,
    MonteCarlo,
    ClosedFormLb,
}

impl EstimateKind {
    pub fn label(self) -> &'static str {
        match self {
            EstimateKind::Quadrature => "quad",
            EstimateKind::MonteCarlo => "mc",
            EstimateKind::ClosedFormLb => "lb",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate<T> {
    /// Differential entropy in bits.
    pub value: T,
    pub err_est: T,
}

/// A mutual information value in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MiEstimate<T> {
    pub value: T,
    pub method: EstimateKind,
    pub err_est: T,
}

/// Weighted atoms `(amplitude, probability)`.
pub type Atoms<T> = Vec<(T, T)>;

/// Discrete signal observed through discrete interference plus Gaussian noise.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel<T> {
    pub signal_atoms: Atoms<T>,
    pub noise_atoms: Atoms<T>,
    pub gaussian_var: T,
}

impl<T: Real> EffectiveChannel<T> {
    /// The TIN channel seen by `user` under power split `alpha`, unit noise variance.
    pub fn tin(user: User, ch: &ChannelParams<T>, alpha: T, m1: u32, m2: u32) -> Result<Self> {
        if !(alpha >= T::zero() && alpha <= T::one()) {
            return invalid(format!("alpha must lie in [0, 1], got {alpha}"));
        }
        let pam1 = make_pam::<T>(m1)?;
        let pam2 = make_pam::<T>(m2)?;
        let snr = ch.snr(user);
        let g1 = (snr * alpha).sqrt();
        let g2 = (snr * (T::one() - alpha)).sqrt();
        let scaled = |points: &[T], g: T| -> Atoms<T> {
            let p = T::one() / T::from_count(points.len());
            points.iter().map(|&x| (g * x, p)).collect()
        };
        let (signal_atoms, noise_atoms) = match user {
            User::Strong => (scaled(pam1.points(), g1), scaled(pam2.points(), g2)),
            User::Weak => (scaled(pam2.points(), g2), scaled(pam1.points(), g1)),
        };
        Ok(Self {
            signal_atoms,
            noise_atoms,
            gaussian_var: T::one(),
        })
    }

    /// Variance of interference plus Gaussian noise.
    pub fn noise_variance(&self) -> T {
        let mean: T = self.noise_atoms.iter().map(|&(a, p)| a * p).sum();
        let second: T = self.noise_atoms.iter().map(|&(a, p)| a * a * p).sum();
        second - mean * mean + self.gaussian_var
    }

    /// Rescales the channel so the total noise has unit variance; mutual
    /// information is unchanged.
    pub fn normalized(&self) -> Self {
        let s = self.noise_variance().sqrt().recip();
        let scale = |atoms: &Atoms<T>| atoms.iter().map(|&(a, p)| (a * s, p)).collect();
        Self {
            signal_atoms: scale(&self.signal_atoms),
            noise_atoms: scale(&self.noise_atoms),
            gaussian_var: self.gaussian_var * s * s,
        }
    }

    /// Atoms of signal plus interference (the output mixture centres).
    pub fn output_atoms(&self) -> Atoms<T> {
        self.signal_atoms
            .iter()
            .flat_map(|&(a, p)| self.noise_atoms.iter().map(move |&(b, q)| (a + b, p * q)))
            .collect()
    }

    /// `I(S; S + N + Z) = h(output) − h(N + Z)`, not clamped.
    pub fn mutual_information(&self, method: &MiMethod) -> Result<EntropyEstimate<T>> {
        let h_out = mixture_entropy(&self.output_atoms(), self.gaussian_var, &method.for_task(1))?;
        let h_noise = mixture_entropy(&self.noise_atoms, self.gaussian_var, &method.for_task(2))?;
        Ok(EntropyEstimate {
            value: h_out.value - h_noise.value,
            err_est: h_out.err_est + h_noise.err_est,
        })
    }
}

type NodeWeights = Arc<Vec<(f64, f64)>>;

fn hermite_rule(order: usize) -> NodeWeights {
    static RULES: OnceLock<Mutex<HashMap<usize, NodeWeights>>> = OnceLock::new();
    let cache = RULES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(order)
        .or_insert_with(|| {
            let deg = std::num::NonZeroUsize::new(order).expect("order checked by caller");
            Arc::new(GaussHermite::new(deg).as_node_weight_pairs().to_vec())
        })
        .clone()
}

/// Evaluates `ln f(y)` for a Gaussian mixture with sorted centres.
struct MixtureDensity<T> {
    centres: Vec<T>,
    log_probs: Vec<T>,
    inv_two_var: T,
    log_norm: T,
    /// `ln(p_max / p_min)`, bounds how far a smaller-weight atom can beat a nearer one.
    log_prob_spread: T,
}

/// Terms more than `e^-LOG_CUTOFF` below the dominant one are dropped.
const LOG_CUTOFF: f64 = 60.0;

impl<T: Real> MixtureDensity<T> {
    fn new(atoms: &[(T, T)], var: T) -> Self {
        let mut sorted: Vec<(T, T)> = atoms.iter().copied().filter(|&(_, p)| p > T::zero()).collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite atoms"));
        let (centres, probs): (Vec<T>, Vec<T>) = sorted.into_iter().unzip();
        let log_probs: Vec<T> = probs.iter().map(|p| p.ln()).collect();
        let max = log_probs.iter().copied().fold(T::neg_infinity(), T::max);
        let min = log_probs.iter().copied().fold(T::infinity(), T::min);
        Self {
            centres,
            log_probs,
            inv_two_var: (T::lit(2.0) * var).recip(),
            log_norm: T::lit(0.5) * (T::TAU() * var).ln(),
            log_prob_spread: max - min,
        }
    }

    fn ln_density(&self, y: T) -> T {
        let n = self.centres.len();
        let idx = self.centres.partition_point(|&c| c < y);
        let nearest = match idx {
            0 => 0,
            i if i == n => n - 1,
            i if y - self.centres[i - 1] <= self.centres[i] - y => i - 1,
            i => i,
        };
        let d0 = y - self.centres[nearest];
        let limit = d0 * d0 * self.inv_two_var + T::lit(LOG_CUTOFF) + self.log_prob_spread;
        let exponent = |i: usize| {
            let d = y - self.centres[i];
            (self.log_probs[i], d * d * self.inv_two_var)
        };

        let mut lo = nearest;
        while lo > 0 && exponent(lo - 1).1 <= limit {
            lo -= 1;
        }
        let mut hi = nearest;
        while hi + 1 < n && exponent(hi + 1).1 <= limit {
            hi += 1;
        }

        let peak = (lo..=hi)
            .map(|i| {
                let (lp, q) = exponent(i);
                lp - q
            })
            .fold(T::neg_infinity(), T::max);
        let sum: T = (lo..=hi)
            .map(|i| {
                let (lp, q) = exponent(i);
                (lp - q - peak).exp()
            })
            .sum();
        peak + sum.ln() - self.log_norm
    }
}

fn quadrature_entropy<T: Real>(density: &MixtureDensity<T>, atoms: &[(T, T)], var: T, order: usize) -> T {
    let rule = hermite_rule(order);
    let spread = (T::lit(2.0) * var).sqrt();
    let inv_sqrt_pi = T::PI().sqrt().recip();
    let mut acc = T::zero();
    for &(centre, p) in atoms {
        if p <= T::zero() {
            continue;
        }
        let expectation: T = rule
            .iter()
            .map(|&(x, w)| T::lit(w) * density.ln_density(centre + spread * T::lit(x)))
            .sum();
        acc = acc + p * expectation * inv_sqrt_pi;
    }
    -acc / T::LN_2()
}

/// Differential entropy in bits of `S + Z`, `S` discrete with the given
/// atoms and `Z ~ N(0, var)`.
pub fn mixture_entropy<T: Real>(atoms: &[(T, T)], var: T, method: &MiMethod) -> Result<EntropyEstimate<T>> {
    if atoms.is_empty() {
        return invalid("mixture entropy needs at least one atom");
    }
    if !(var > T::zero()) || !var.is_finite() {
        return invalid(format!("noise variance must be positive, got {var}"));
    }
    if atoms.iter().any(|&(a, p)| !a.is_finite() || !(p >= T::zero())) {
        return invalid("atoms must have finite amplitudes and nonnegative probabilities");
    }
    let total: T = atoms.iter().map(|&(_, p)| p).sum();
    let tol = T::lit(1e-9).max(T::epsilon() * T::from_count(atoms.len()) * T::lit(4.0));
    if (total - T::one()).abs() > tol {
        return invalid(format!("atom probabilities sum to {total}, expected 1"));
    }

    let density = MixtureDensity::new(atoms, var);
    match *method {
        MiMethod::Quadrature { order } => {
            if order == 0 {
                return invalid("quadrature order must be positive");
            }
            let coarse = quadrature_entropy(&density, atoms, var, order);
            let fine = quadrature_entropy(&density, atoms, var, 2 * order);
            Ok(EntropyEstimate {
                value: fine,
                err_est: (fine - coarse).abs(),
            })
        }
        MiMethod::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return invalid("Monte Carlo needs at least two samples");
            }
            let mut cumulative = Vec::with_capacity(atoms.len());
            let mut run = 0.0f64;
            for &(_, p) in atoms {
                run += p.as_f64();
                cumulative.push(run);
            }
            let sigma = var.sqrt();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Welford running moments of -log2 f(Y).
            let mut mean = 0.0f64;
            let mut m2 = 0.0f64;
            for k in 0..samples {
                let u: f64 = rng.random::<f64>() * run;
                let i = cumulative.partition_point(|&c| c <= u).min(atoms.len() - 1);
                let z: f64 = rng.sample(StandardNormal);
                let y = atoms[i].0 + sigma * T::lit(z);
                let v = -(density.ln_density(y) / T::LN_2()).as_f64();
                let delta = v - mean;
                mean += delta / (k + 1) as f64;
                m2 += delta * (v - mean);
            }
            let std = (m2 / (samples - 1) as f64).sqrt();
            Ok(EntropyEstimate {
                value: T::lit(mean),
                err_est: T::lit(3.0 * std / (samples as f64).sqrt()),
            })
        }
    }
}

fn mix_seed(seed: u64, key: u64) -> u64 {
    // splitmix64 finalizer over the combined key
    let mut z = seed ^ key.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn task_key<T: Real>(user: User, alpha: T, m1: u32, m2: u32) -> u64 {
    let a = alpha.as_f64().to_bits();
    mix_seed(
        mix_seed(u64::from(user.index()), a),
        (u64::from(m1) << 32) | u64::from(m2),
    )
}

/// Exact `I(X_k; Y_k)` when receiver `k` treats the other user's PAM signal as noise.
pub fn mi_exact_tin<T: Real>(
    user: User,
    ch: &ChannelParams<T>,
    alpha: T,
    m1: u32,
    m2: u32,
    method: &MiMethod,
) -> Result<MiEstimate<T>> {
    let eff = EffectiveChannel::tin(user, ch, alpha, m1, m2)?;
    let silent = match user {
        User::Strong => m1 == 1 || alpha == T::zero(),
        User::Weak => m2 == 1 || alpha == T::one(),
    };
    if silent {
        // a constant input carries no information
        return Ok(MiEstimate {
            value: T::zero(),
            method: method.kind(),
            err_est: T::zero(),
        });
    }
    let keyed = method.for_task(task_key(user, alpha, m1, m2));
    let est = eff.mutual_information(&keyed)?;
    let order = match user {
        User::Strong => m1,
        User::Weak => m2,
    };
    let cap = T::from_u32(order).unwrap().log2();
    Ok(MiEstimate {
        value: est.value.max(T::zero()).min(cap),
        method: method.kind(),
        err_est: est.err_est,
    })
}

/// Point-to-point `I(X; √snr·X + Z)` for uniform `M`-PAM.
pub fn mi_pam_awgn<T: Real>(order: u32, snr: T, method: &MiMethod) -> Result<MiEstimate<T>> {
    if !(snr > T::zero()) {
        return invalid(format!("snr must be positive, got {snr}"));
    }
    let pam = make_pam::<T>(order)?;
    let c = superimpose(&pam, &make_pam::<T>(1)?, T::one(), snr)?;
    let eff = EffectiveChannel {
        signal_atoms: c.weighted_points(),
        noise_atoms: vec![(T::zero(), T::one())],
        gaussian_var: T::one(),
    };
    let keyed = method.for_task(mix_seed(u64::from(order), snr.as_f64().to_bits()));
    let est = eff.mutual_information(&keyed)?;
    Ok(MiEstimate {
        value: est.value.max(T::zero()).min(pam.entropy_bits()),
        method: method.kind(),
        err_est: est.err_est,
    })
}

/// Minimum-distance lower bound on `I(F; F+Z)` for unit-variance noise,
/// `H(F) − ½log₂(2πe/12) − ½log₂(1 + 12/d²)`, clamped at zero.
pub fn ow_bound<T: Real>(entropy_bits: T, dmin: T) -> Result<T> {
    if !(entropy_bits >= T::zero()) || !(dmin > T::zero()) {
        return invalid(format!(
            "entropy must be nonnegative and dmin positive, got ({entropy_bits}, {dmin})"
        ));
    }
    let packing = if dmin.is_infinite() {
        T::zero()
    } else {
        half_log2(T::one() + T::lit(12.0) / (dmin * dmin))
    };
    Ok((entropy_bits - shaping_loss::<T>() - packing).max(T::zero()))
}

/// Closed-form lower bound on user 1's TIN rate, valid for `0 < α ≤ α*`.
pub fn mi_lb_user1<T: Real>(alpha: T, snr1: T, m1: u32, m2: u32) -> Result<T> {
    if !(snr1 > T::zero()) {
        return invalid(format!("snr1 must be positive, got {snr1}"));
    }
    let d = dmin_formula(m1, m2, alpha, snr1)?;
    let m1f = T::from_u32(m1).unwrap();
    let bound = m1f.log2() - shaping_loss::<T>() - half_log2(T::one() + T::lit(12.0) / (d * d));
    Ok(bound.max(T::zero()))
}

/// Closed-form lower bound on user 2's TIN rate via the unit-variance effective
/// channel; any `0 ≤ α < 1`.
pub fn mi_lb_user2<T: Real>(alpha: T, snr2: T, m2: u32) -> Result<T> {
    if !(alpha >= T::zero() && alpha < T::one()) {
        return invalid(format!("alpha must lie in [0, 1), got {alpha}"));
    }
    if m2 < 2 {
        return invalid("user-2 bound needs M2 >= 2");
    }
    if !(snr2 > T::zero()) {
        return invalid(format!("snr2 must be positive, got {snr2}"));
    }
    let m2f = T::from_u32(m2).unwrap();
    let ratio = (T::one() + alpha * snr2) / ((T::one() - alpha) * snr2);
    let bound = m2f.log2() - shaping_loss::<T>() - half_log2(T::one() + ratio * (m2f * m2f - T::one()));
    Ok(bound.max(T::zero()))
}

/// Minimum distance of user 2's normalized effective signal `X₂'`,
/// `√(12(1−α)SNR₂ / ((1+αSNR₂)(M₂²−1)))`.
pub fn dmin_effective_user2<T: Real>(alpha: T, snr2: T, m2: u32) -> Result<T> {
    if m2 < 2 {
        return invalid("effective minimum distance needs M2 >= 2");
    }
    let m2f = T::from_u32(m2).unwrap();
    Ok((T::lit(12.0) * (T::one() - alpha) * snr2 / ((T::one() + alpha * snr2) * (m2f * m2f - T::one()))).sqrt())
}
