//! PAM alphabets, the superimposed two-user constellation and its minimum distance.
//!
//! The transmitted symbol is `x = √P(√α·x₁ + √(1−α)·x₂)` with `x₁`, `x₂` drawn
//! uniformly from unit-power PAM alphabets. For `0 < α ≤ α*` every user-2 point
//! spawns a cluster of `M₁` user-1 points and the clusters do not touch, so the
//! minimum distance is the intra-cluster spacing.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// A normalized (zero-mean, unit-power) `M`-point PAM alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct PamSpec<T> {
    order: u32,
    d_min: T,
    points: Vec<T>,
}

impl<T: Real> PamSpec<T> {
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Spacing between neighbouring points; `+∞` for the single-point alphabet.
    pub fn d_min(&self) -> T {
        self.d_min
    }

    /// Points in ascending order.
    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn entropy_bits(&self) -> T {
        T::from_u32(self.order).unwrap().log2()
    }
}

/// Builds the `M`-point PAM with spacing `√(12/(M²−1))`.
pub fn make_pam<T: Real>(order: u32) -> Result<PamSpec<T>> {
    match order {
        0 => invalid("PAM order must be at least 1"),
        1 => Ok(PamSpec {
            order,
            d_min: T::infinity(),
            points: vec![T::zero()],
        }),
        m => {
            let mf = T::from_u32(m).unwrap();
            let d = (T::lit(12.0) / (mf * mf - T::one())).sqrt();
            let half = T::lit(0.5);
            let points = (0..m)
                .map(|i| {
                    let offset = T::from_u32(2 * i).unwrap() - (mf - T::one());
                    offset * d * half
                })
                .collect();
            Ok(PamSpec {
                order: m,
                d_min: d,
                points,
            })
        }
    }
}

/// One distinct amplitude of a superimposed constellation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atom<T> {
    pub amplitude: T,
    /// Exact mass `k / (M₁·M₂)`; `k > 1` only where points coincide.
    #[serde(serialize_with = "serialize_ratio")]
    pub prob: Ratio<u32>,
}

fn serialize_ratio<S: serde::Serializer>(r: &Ratio<u32>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

impl<T: Real> Atom<T> {
    pub fn prob_real(&self) -> T {
        T::from_u32(*self.prob.numer()).unwrap() / T::from_u32(*self.prob.denom()).unwrap()
    }
}

/// The weighted sum constellation `√P(√α·X₁ + √(1−α)·X₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperConstellation<T> {
    alpha: T,
    power: T,
    m1: u32,
    m2: u32,
    atoms: Vec<Atom<T>>,
}

impl<T: Real> SuperConstellation<T> {
    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn power(&self) -> T {
        self.power
    }

    pub fn orders(&self) -> (u32, u32) {
        (self.m1, self.m2)
    }

    /// Distinct atoms sorted by amplitude.
    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    pub fn average_power(&self) -> T {
        self.atoms
            .iter()
            .map(|a| a.prob_real() * a.amplitude * a.amplitude)
            .sum()
    }

    /// `(amplitude, probability)` pairs in the scalar type.
    pub fn weighted_points(&self) -> Vec<(T, T)> {
        self.atoms.iter().map(|a| (a.amplitude, a.prob_real())).collect()
    }
}

/// Relative merge tolerance for coincident amplitudes (scaled by `√P`).
const MERGE_TOL: f64 = 1e-9;

pub fn superimpose<T: Real>(pam1: &PamSpec<T>, pam2: &PamSpec<T>, alpha: T, power: T) -> Result<SuperConstellation<T>> {
    if !(alpha >= T::zero() && alpha <= T::one()) {
        return invalid(format!("alpha must lie in [0, 1], got {alpha}"));
    }
    if !(power > T::zero()) || !power.is_finite() {
        return invalid(format!("total power must be positive, got {power}"));
    }
    let root_p = power.sqrt();
    let w1 = root_p * alpha.sqrt();
    let w2 = root_p * (T::one() - alpha).sqrt();

    let mut sums: Vec<T> = pam1
        .points
        .iter()
        .flat_map(|&a| pam2.points.iter().map(move |&b| w1 * a + w2 * b))
        .collect();
    sums.sort_by(|a, b| a.partial_cmp(b).expect("finite amplitudes"));

    let total = pam1.order * pam2.order;
    let tol = T::lit(MERGE_TOL).max(T::epsilon() * T::lit(16.0)) * root_p;
    let mut atoms: Vec<Atom<T>> = Vec::with_capacity(sums.len());
    let mut run_start = T::zero();
    for s in sums {
        match atoms.last_mut() {
            Some(last) if s - run_start <= tol => {
                last.prob += Ratio::new(1, total);
            }
            _ => {
                run_start = s;
                atoms.push(Atom {
                    amplitude: s,
                    prob: Ratio::new(1, total),
                });
            }
        }
    }

    Ok(SuperConstellation {
        alpha,
        power,
        m1: pam1.order,
        m2: pam2.order,
        atoms,
    })
}

/// Exact non-overlap threshold `α* = (M₁²−1)/(M₁²M₂²−1)`.
pub fn alpha_star_exact(m1: u32, m2: u32) -> Result<Ratio<u64>> {
    if m1 == 0 || m2 == 0 {
        return invalid("modulation orders must be positive");
    }
    let a = u64::from(m1) * u64::from(m1);
    let b = u64::from(m2) * u64::from(m2);
    if a * b == 1 {
        return invalid("alpha* is undefined for M1 = M2 = 1");
    }
    Ok(Ratio::new(a - 1, a * b - 1))
}

pub fn alpha_star<T: Real>(m1: u32, m2: u32) -> Result<T> {
    let r = alpha_star_exact(m1, m2)?;
    Ok(T::from_u64(*r.numer()).unwrap() / T::from_u64(*r.denom()).unwrap())
}

/// Intra-cluster spacing `√(12αP/(M₁²−1))`.
fn intra_cluster<T: Real>(m1: u32, alpha: T, power: T) -> T {
    let m1f = T::from_u32(m1).unwrap();
    (T::lit(12.0) * alpha * power / (m1f * m1f - T::one())).sqrt()
}

/// Gap between neighbouring clusters, `√(12(1−α)P/(M₂²−1)) − (M₁−1)·√(12αP/(M₁²−1))`.
///
/// Negative once the clusters interleave.
pub fn inter_cluster_distance<T: Real>(m1: u32, m2: u32, alpha: T, power: T) -> Result<T> {
    if m1 < 2 || m2 < 2 {
        return invalid("inter-cluster distance needs M1, M2 >= 2");
    }
    let m1f = T::from_u32(m1).unwrap();
    let m2f = T::from_u32(m2).unwrap();
    let outer = (T::lit(12.0) * (T::one() - alpha) * power / (m2f * m2f - T::one())).sqrt();
    Ok(outer - (m1f - T::one()) * intra_cluster(m1, alpha, power))
}

/// Closed-form minimum distance of the superimposed constellation, valid for
/// `0 < α ≤ α*`.
pub fn dmin_formula<T: Real>(m1: u32, m2: u32, alpha: T, power: T) -> Result<T> {
    if m1 < 2 {
        return invalid("closed-form minimum distance needs M1 >= 2");
    }
    if !(power > T::zero()) {
        return invalid(format!("total power must be positive, got {power}"));
    }
    let a_star: T = alpha_star(m1, m2)?;
    if !(alpha > T::zero()) {
        return invalid(format!("alpha must be positive, got {alpha}"));
    }
    // α* is rounded in T; allow the last ulp or so.
    if alpha > a_star * (T::one() + T::epsilon() * T::lit(4.0)) {
        return Err(Error::OutOfRegime {
            alpha: alpha.as_f64(),
            alpha_star: a_star.as_f64(),
            m1,
            m2,
        });
    }
    Ok(intra_cluster(m1, alpha, power))
}

/// Exhaustive pairwise minimum distance; `+∞` for a single atom.
pub fn dmin_bruteforce<T: Real>(c: &SuperConstellation<T>) -> T {
    let atoms = c.atoms();
    let mut best = T::infinity();
    for (i, a) in atoms.iter().enumerate() {
        for b in &atoms[i + 1..] {
            best = best.min((a.amplitude - b.amplitude).abs());
        }
    }
    best
}

/// Channel SNRs (linear) and the derived quantized gains `N_k = ⌈√SNR_k⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams<T> {
    snr1: T,
    snr2: T,
    n1: u32,
    n2: u32,
}

impl<T: Real> ChannelParams<T> {
    /// User 1 must be the strong user: `snr1 > snr2 > 0`.
    pub fn new(snr1: T, snr2: T) -> Result<Self> {
        if !(snr2 > T::zero()) || !snr1.is_finite() {
            return invalid(format!("SNRs must be positive and finite, got ({snr1}, {snr2})"));
        }
        if !(snr1 > snr2) {
            return invalid(format!(
                "user 1 must be the strong user (snr1 > snr2), got ({snr1}, {snr2})"
            ));
        }
        Ok(Self {
            snr1,
            snr2,
            n1: quantized_gain(snr1),
            n2: quantized_gain(snr2),
        })
    }

    pub fn from_db(snr1_db: T, snr2_db: T) -> Result<Self> {
        Self::new(
            crate::scalar::db_to_linear(snr1_db),
            crate::scalar::db_to_linear(snr2_db),
        )
    }

    pub fn snr1(&self) -> T {
        self.snr1
    }

    pub fn snr2(&self) -> T {
        self.snr2
    }

    pub fn n1(&self) -> u32 {
        self.n1
    }

    pub fn n2(&self) -> u32 {
        self.n2
    }

    pub fn snr(&self, user: User) -> T {
        match user {
            User::Strong => self.snr1,
            User::Weak => self.snr2,
        }
    }
}

/// `⌈√snr⌉`, snapping square roots that land within rounding error of an integer
/// (e.g. `10^(20/10)` evaluated through `powf`).
pub fn quantized_gain<T: Real>(snr: T) -> u32 {
    let root = snr.sqrt();
    let nearest = root.round();
    let n = if (root - nearest).abs() <= nearest * T::epsilon() * T::lit(8.0) {
        nearest
    } else {
        root.ceil()
    };
    n.to_u32().unwrap_or(u32::MAX).max(1)
}

/// Receiver index: user 1 is the strong user, user 2 the weak one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum User {
    Strong,
    Weak,
}

impl User {
    pub fn index(self) -> u8 {
        match self {
            User::Strong => 1,
            User::Weak => 2,
        }
    }

    pub fn from_index(k: u8) -> Result<Self> {
        match k {
            1 => Ok(User::Strong),
            2 => Ok(User::Weak),
            _ => invalid(format!("user index must be 1 or 2, got {k}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pam_examples() {
        let p2 = make_pam::<f64>(2).unwrap();
        assert_eq!(p2.points(), &[-1.0, 1.0]);
        assert_relative_eq!(p2.d_min(), 2.0, epsilon = 1e-15);

        let p4 = make_pam::<f64>(4).unwrap();
        let s5 = 5f64.sqrt();
        assert_relative_eq!(p4.d_min(), 2.0 / s5, epsilon = 1e-15);
        let want = [-3.0 / s5, -1.0 / s5, 1.0 / s5, 3.0 / s5];
        for (p, w) in p4.points().iter().zip(want) {
            assert_relative_eq!(*p, w, epsilon = 1e-15);
        }

        let p1 = make_pam::<f64>(1).unwrap();
        assert_eq!(p1.points(), &[0.0]);
        assert!(p1.d_min().is_infinite());

        assert!(matches!(make_pam::<f64>(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn pam_is_zero_mean_unit_power() {
        for m in 2..=64u32 {
            let p = make_pam::<f64>(m).unwrap();
            let mean: f64 = p.points().iter().sum::<f64>() / m as f64;
            let power: f64 = p.points().iter().map(|x| x * x).sum::<f64>() / m as f64;
            assert!(mean.abs() < 1e-12, "M={m} mean={mean}");
            assert!((power - 1.0).abs() < 1e-12, "M={m} power={power}");
            for w in p.points().windows(2) {
                assert_relative_eq!(w[1] - w[0], p.d_min(), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn superimpose_examples() {
        let p2 = make_pam::<f64>(2).unwrap();
        let c = superimpose(&p2, &p2, 0.2, 1.0).unwrap();
        assert_eq!(c.atoms().len(), 4);
        assert!(c.atoms().iter().all(|a| a.prob == Ratio::new(1, 4)));

        let p6 = make_pam::<f64>(6).unwrap();
        let c = superimpose(&p6, &p2, 35.0 / 143.0, 1.0).unwrap();
        assert_eq!(c.atoms().len(), 12);

        let p5 = make_pam::<f64>(5).unwrap();
        let c = superimpose(&p5, &p2, 0.0, 3.0).unwrap();
        assert_eq!(c.atoms().len(), 2);
        for (a, b) in c.atoms().iter().zip(p2.points()) {
            assert_relative_eq!(a.amplitude, 3f64.sqrt() * b, epsilon = 1e-12);
            assert_eq!(a.prob, Ratio::new(5, 10));
        }
    }

    #[test]
    fn overlapping_atoms_merge() {
        let p2 = make_pam::<f64>(2).unwrap();
        let c = superimpose(&p2, &p2, 0.5, 1.0).unwrap();
        let amps: Vec<f64> = c.atoms().iter().map(|a| a.amplitude).collect();
        assert_eq!(amps.len(), 3);
        assert_relative_eq!(amps[0], -2f64.sqrt(), epsilon = 1e-12);
        assert!(amps[1].abs() < 1e-12);
        assert_eq!(c.atoms()[1].prob, Ratio::new(1, 2));
        assert_relative_eq!(dmin_bruteforce(&c), 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn superimpose_rejects_bad_inputs() {
        let p2 = make_pam::<f64>(2).unwrap();
        assert!(superimpose(&p2, &p2, -0.1, 1.0).is_err());
        assert!(superimpose(&p2, &p2, 1.1, 1.0).is_err());
        assert!(superimpose(&p2, &p2, 0.5, 0.0).is_err());
        assert!(superimpose(&p2, &p2, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn alpha_star_examples() {
        assert_eq!(alpha_star_exact(2, 2).unwrap(), Ratio::new(1, 5));
        assert_eq!(alpha_star_exact(6, 2).unwrap(), Ratio::new(35, 143));
        assert_relative_eq!(alpha_star::<f64>(6, 2).unwrap(), 0.244_755_244_755, epsilon = 1e-11);
        for m1 in 2..10 {
            assert_eq!(alpha_star::<f64>(m1, 1).unwrap(), 1.0);
        }
        assert_eq!(alpha_star::<f64>(1, 4).unwrap(), 0.0);
        assert!(alpha_star::<f64>(1, 1).is_err());
    }

    #[test]
    fn dmin_formula_examples() {
        assert_relative_eq!(dmin_formula(2, 2, 0.2, 1.0).unwrap(), 0.8f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(
            dmin_formula(6, 2, 35.0 / 143.0, 1.0).unwrap(),
            (12.0f64 / 143.0).sqrt(),
            epsilon = 1e-15
        );
        assert_relative_eq!(dmin_formula(2, 2, 0.1, 4.0).unwrap(), 1.6f64.sqrt(), epsilon = 1e-15);
        assert!(matches!(dmin_formula(2, 2, 0.25, 1.0), Err(Error::OutOfRegime { .. })));
        assert!(dmin_formula(1, 2, 0.1, 1.0).is_err());
    }

    #[test]
    fn fig1_constellation_distances_agree() {
        let p6 = make_pam::<f64>(6).unwrap();
        let p2 = make_pam::<f64>(2).unwrap();
        let alpha = 35.0 / 143.0;
        let c = superimpose(&p6, &p2, alpha, 1.0).unwrap();
        assert_relative_eq!(
            dmin_bruteforce(&c),
            dmin_formula(6, 2, alpha, 1.0).unwrap(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn dmin_bruteforce_single_atom() {
        let p1 = make_pam::<f64>(1).unwrap();
        let c = superimpose(&p1, &p1, 0.5, 1.0).unwrap();
        assert!(dmin_bruteforce(&c).is_infinite());
        let p2 = make_pam::<f64>(2).unwrap();
        let c = superimpose(&p1, &p2, 0.0, 1.0).unwrap();
        assert_relative_eq!(dmin_bruteforce(&c), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn branch_switches_above_alpha_star() {
        for (m1, m2) in [(2, 2), (3, 4), (6, 2), (5, 3)] {
            let a = alpha_star::<f64>(m1, m2).unwrap() * 1.01;
            let inter = inter_cluster_distance(m1, m2, a, 1.0).unwrap();
            let intra = (12.0 * a / ((m1 * m1 - 1) as f64)).sqrt();
            assert!(inter < intra);
            let c = superimpose(&make_pam(m1).unwrap(), &make_pam(m2).unwrap(), a, 1.0).unwrap();
            assert!(dmin_bruteforce(&c) < intra);
        }
    }

    #[test]
    fn channel_params() {
        let ch = ChannelParams::<f64>::from_db(22.0, 12.0).unwrap();
        assert_eq!((ch.n1(), ch.n2()), (13, 4));
        let ch = ChannelParams::<f64>::from_db(20.0, 10.0).unwrap();
        assert_eq!((ch.n1(), ch.n2()), (10, 4));
        let ch = ChannelParams::<f64>::new(16.0, 4.0).unwrap();
        assert_eq!((ch.n1(), ch.n2()), (4, 2));
        assert!(ChannelParams::<f64>::new(4.0, 4.0).is_err());
        assert!(ChannelParams::<f64>::new(2.0, 4.0).is_err());
        assert!(ChannelParams::<f64>::new(2.0, 0.0).is_err());
    }

    #[test]
    fn f32_constellation() {
        let c = superimpose(&make_pam::<f32>(4).unwrap(), &make_pam::<f32>(2).unwrap(), 0.1, 2.0).unwrap();
        assert_eq!(c.atoms().len(), 8);
        assert!((c.average_power() - 2.0).abs() < 1e-5);
    }
}
