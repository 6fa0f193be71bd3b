//! Achievable rate region of superimposed PAM under TIN decoding.
//!
//! Two subregions make up the region: the union over admissible modulation
//! orders of the rate pairs reached by sweeping `α ∈ (0, α*]`, and the convex
//! closure (time sharing) of the `α*` operating points together with user 1's
//! single-user corner.

use rayon::prelude::*;
use serde::Serialize;

use crate::constellation::{alpha_star, ChannelParams, User};
use crate::entropy_mi::{mi_exact_tin, mi_lb_user1, mi_lb_user2, EstimateKind, MiMethod};
use crate::error::Result;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ExactMi,
    ClosedFormLb,
    TsCombination,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::ExactMi => "exact_mi",
            Scheme::ClosedFormLb => "closed_form_lb",
            Scheme::TsCombination => "ts_combination",
        }
    }
}

/// How each user's rate is obtained at an operating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMode {
    /// Exact TIN mutual information.
    Exact(MiMethod),
    /// Minimum-distance lower bounds (the provable region).
    ClosedForm,
}

impl RateMode {
    pub fn scheme(&self) -> Scheme {
        match self {
            RateMode::Exact(_) => Scheme::ExactMi,
            RateMode::ClosedForm => Scheme::ClosedFormLb,
        }
    }

    pub fn estimate_kind(&self) -> EstimateKind {
        match self {
            RateMode::Exact(MiMethod::Quadrature { .. }) => EstimateKind::Quadrature,
            RateMode::Exact(MiMethod::MonteCarlo { .. }) => EstimateKind::MonteCarlo,
            RateMode::ClosedForm => EstimateKind::ClosedFormLb,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatePoint<T> {
    pub r1: T,
    pub r2: T,
    pub alpha: T,
    pub m1: u32,
    pub m2: u32,
    pub scheme: Scheme,
    pub ts_lambda: Option<T>,
    /// Indices of the two generators a time-sharing point mixes.
    pub parents: Option<(usize, usize)>,
    pub method: EstimateKind,
    /// Largest per-user numerical error of the two rates.
    pub err_est: T,
}

impl<T: Real> RatePoint<T> {
    fn sort_key(&self) -> (u32, u32, T) {
        (self.m1, self.m2, self.alpha)
    }

    pub fn dominates(&self, other: &Self) -> bool {
        self.r1 >= other.r1 && self.r2 >= other.r2 && (self.r1 > other.r1 || self.r2 > other.r2)
    }
}

/// User 1's rate from the closed-form bound, including the single-user limits.
fn closed_form_r1<T: Real>(ch: &ChannelParams<T>, alpha: T, m1: u32, m2: u32) -> Result<T> {
    if m1 == 1 || alpha == T::zero() {
        Ok(T::zero())
    } else if alpha == T::one() {
        // user 2 carries no power, so X = X₁ alone
        mi_lb_user1(T::one(), ch.snr1(), m1, 1)
    } else {
        mi_lb_user1(alpha, ch.snr1(), m1, m2)
    }
}

fn closed_form_r2<T: Real>(ch: &ChannelParams<T>, alpha: T, m2: u32) -> Result<T> {
    if m2 == 1 || alpha == T::one() {
        Ok(T::zero())
    } else {
        mi_lb_user2(alpha, ch.snr2(), m2)
    }
}

/// Both users' rates at one operating point `(α, M₁, M₂)`.
pub fn rate_pair<T: Real>(ch: &ChannelParams<T>, alpha: T, m1: u32, m2: u32, mode: &RateMode) -> Result<RatePoint<T>> {
    let (r1, r2, err) = match mode {
        RateMode::Exact(method) => {
            let e1 = mi_exact_tin(User::Strong, ch, alpha, m1, m2, method)?;
            let e2 = mi_exact_tin(User::Weak, ch, alpha, m1, m2, method)?;
            (e1.value, e2.value, e1.err_est.max(e2.err_est))
        }
        RateMode::ClosedForm => (
            closed_form_r1(ch, alpha, m1, m2)?,
            closed_form_r2(ch, alpha, m2)?,
            T::zero(),
        ),
    };
    Ok(RatePoint {
        r1,
        r2,
        alpha,
        m1,
        m2,
        scheme: mode.scheme(),
        ts_lambda: None,
        parents: None,
        method: mode.estimate_kind(),
        err_est: err,
    })
}

/// All `(M₁, M₂)` with `M₁M₂ ≤ N₁` and `M₂ ≤ N₂`, lexicographically sorted.
pub fn admissible_orders<T: Real>(ch: &ChannelParams<T>) -> Vec<(u32, u32)> {
    admissible_orders_for(ch.n1(), ch.n2())
}

pub fn admissible_orders_for(n1: u32, n2: u32) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = (1..=n2).flat_map(|m2| (1..=n1 / m2).map(move |m1| (m1, m2))).collect();
    out.sort_unstable();
    out
}

/// Orders `(M₁, ⌊N₁/M₁⌋)` that fill the strong user's budget with both `M_k ≥ 2`.
pub fn case1_orders<T: Real>(ch: &ChannelParams<T>) -> Vec<(u32, u32)> {
    case1_orders_for(ch.n1(), ch.n2())
}

pub fn case1_orders_for(n1: u32, n2: u32) -> Vec<(u32, u32)> {
    let mut out: Vec<(u32, u32)> = (2..=n1 / 2)
        .map(|m1| (m1, n1 / m1))
        .filter(|&(_, m2)| m2 >= 2 && m2 <= n2)
        .collect();
    out.dedup();
    out
}

/// The interior-α order `(⌊N₁/N₂⌋, N₂)`, if both orders are at least 2.
pub fn case2_order<T: Real>(ch: &ChannelParams<T>) -> Option<(u32, u32)> {
    let m2 = ch.n2();
    let m1 = ch.n1() / m2;
    (m1 >= 2 && m2 >= 2).then_some((m1, m2))
}

/// Consecutive case-1 orders `(M₁, ·)`, `(M₁+1, ·)` with `N₁ ≥ 2(M₁+1)`.
pub fn adjacent_ts_pairs<T: Real>(ch: &ChannelParams<T>) -> Vec<((u32, u32), (u32, u32))> {
    adjacent_ts_pairs_for(ch.n1(), ch.n2())
}

pub fn adjacent_ts_pairs_for(n1: u32, n2: u32) -> Vec<((u32, u32), (u32, u32))> {
    case1_orders_for(n1, n2)
        .windows(2)
        .filter(|w| w[1].0 == w[0].0 + 1 && n1 >= 2 * (w[0].0 + 1))
        .map(|w| (w[0], w[1]))
        .collect()
}

/// Geometric grid on `(0, α*]` ending exactly at `α*`; the smallest value is `α*/1000`.
pub fn alpha_grid<T: Real>(a_star: T, size: usize) -> Vec<T> {
    if a_star <= T::zero() {
        return vec![];
    }
    let size = size.max(1);
    if size == 1 {
        return vec![a_star];
    }
    let span = T::lit(1e-3).ln();
    let last = T::from_count(size - 1);
    (0..size)
        .map(|i| {
            if i + 1 == size {
                a_star
            } else {
                a_star * (span * (last - T::from_count(i)) / last).exp()
            }
        })
        .collect()
}

/// A set of achievable rate pairs and its Pareto frontier.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion<T> {
    generators: Vec<RatePoint<T>>,
    frontier: Vec<usize>,
    /// Whether the region is the convex closure of the generators (time sharing)
    /// rather than the union of their dominated rectangles.
    convex: bool,
}

impl<T: Real> RateRegion<T> {
    /// Union of the rectangles dominated by each generator.
    pub fn from_points(generators: Vec<RatePoint<T>>) -> Self {
        let frontier = pareto_frontier_indices(&generators);
        Self {
            generators,
            frontier,
            convex: false,
        }
    }

    /// Convex closure of the generators and their axis projections.
    pub fn convex_closure(generators: Vec<RatePoint<T>>) -> Self {
        let frontier = upper_right_hull(&generators);
        Self {
            generators,
            frontier,
            convex: true,
        }
    }

    pub fn generators(&self) -> &[RatePoint<T>] {
        &self.generators
    }

    /// Pareto-maximal points, `r1` ascending.
    pub fn frontier(&self) -> Vec<&RatePoint<T>> {
        self.frontier.iter().map(|&i| &self.generators[i]).collect()
    }

    pub fn frontier_indices(&self) -> &[usize] {
        &self.frontier
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// Whether `(r1, r2)` is achievable, up to `tol` in each coordinate.
    pub fn contains(&self, r1: T, r2: T, tol: T) -> bool {
        if r1 <= tol && r2 <= tol {
            return true;
        }
        if !self.convex {
            return self.generators.iter().any(|g| g.r1 + tol >= r1 && g.r2 + tol >= r2);
        }
        let hull = self.frontier();
        let Some(first) = hull.first() else {
            return false;
        };
        let last = hull[hull.len() - 1];
        if r1 <= first.r1 {
            return r2 <= first.r2 + tol;
        }
        if r1 > last.r1 + tol {
            return false;
        }
        if r1 >= last.r1 {
            return r2 <= last.r2 + tol;
        }
        let i = hull.partition_point(|p| p.r1 <= r1);
        let (a, b) = (hull[i - 1], hull[i]);
        let t = (r1 - a.r1) / (b.r1 - a.r1);
        r2 <= a.r2 + t * (b.r2 - a.r2) + tol
    }

    /// Time-sharing points strictly inside each frontier edge of a convex region.
    pub fn ts_combinations(&self, lambda_grid_size: usize) -> Vec<RatePoint<T>> {
        if !self.convex || lambda_grid_size < 3 {
            return vec![];
        }
        let last = T::from_count(lambda_grid_size - 1);
        let mut out = Vec::new();
        for w in self.frontier.windows(2) {
            let (ia, ib) = (w[0], w[1]);
            let (a, b) = (&self.generators[ia], &self.generators[ib]);
            for k in 1..lambda_grid_size - 1 {
                let lambda = T::from_count(k) / last;
                let mu = T::one() - lambda;
                out.push(RatePoint {
                    r1: lambda * a.r1 + mu * b.r1,
                    r2: lambda * a.r2 + mu * b.r2,
                    alpha: lambda * a.alpha + mu * b.alpha,
                    m1: a.m1,
                    m2: a.m2,
                    scheme: Scheme::TsCombination,
                    ts_lambda: Some(lambda),
                    parents: Some((ia, ib)),
                    method: a.method,
                    err_est: a.err_est.max(b.err_est),
                });
            }
        }
        out
    }
}

/// Maximal points under componentwise domination, `r1` ascending. Exact
/// duplicates keep the one with the smallest `(m1, m2, alpha)`.
pub fn pareto_frontier_indices<T: Real>(points: &[RatePoint<T>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&points[i], &points[j]);
        b.r1.partial_cmp(&a.r1)
            .unwrap()
            .then(b.r2.partial_cmp(&a.r2).unwrap())
            .then(a.sort_key().partial_cmp(&b.sort_key()).unwrap())
    });
    let mut best_r2 = T::neg_infinity();
    let mut keep = Vec::new();
    for i in order {
        if points[i].r2 > best_r2 {
            best_r2 = points[i].r2;
            keep.push(i);
        }
    }
    keep.reverse();
    keep
}

pub fn pareto_frontier<T: Real>(points: &[RatePoint<T>]) -> Vec<RatePoint<T>> {
    pareto_frontier_indices(points)
        .into_iter()
        .map(|i| points[i].clone())
        .collect()
}

/// Vertices of the down-closed convex hull's outer boundary, as generator
/// indices, `r1` ascending and `r2` strictly descending.
fn upper_right_hull<T: Real>(points: &[RatePoint<T>]) -> Vec<usize> {
    if points.is_empty() {
        return vec![];
    }
    let max_r1 = points.iter().map(|p| p.r1).fold(T::neg_infinity(), T::max);
    let max_r2 = points.iter().map(|p| p.r2).fold(T::neg_infinity(), T::max);

    // candidates: generators plus the axis projections of the extreme ones
    let mut cand: Vec<(T, T, Option<usize>)> = points.iter().enumerate().map(|(i, p)| (p.r1, p.r2, Some(i))).collect();
    cand.push((T::zero(), max_r2, None));
    cand.push((max_r1, T::zero(), None));
    cand.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(b.1.partial_cmp(&a.1).unwrap())
            .then_with(|| match (a.2, b.2) {
                (Some(x), Some(y)) => points[x].sort_key().partial_cmp(&points[y].sort_key()).unwrap(),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            })
    });
    cand.dedup_by(|b, a| a.0 == b.0 && a.1 == b.1);

    let cross = |o: &(T, T, Option<usize>), a: &(T, T, Option<usize>), b: &(T, T, Option<usize>)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(T, T, Option<usize>)> = Vec::new();
    for c in cand {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &c) >= T::zero() {
            hull.pop();
        }
        hull.push(c);
    }

    // keep the descending part from the highest point to the rightmost
    let start = hull
        .iter()
        .position(|h| h.1 == max_r2)
        .expect("max point is on the hull");
    let mut out: Vec<usize> = Vec::new();
    for h in &hull[start..] {
        if let Some(i) = h.2 {
            let p = &points[i];
            if out.last().is_none_or(|&j| points[j].r2 > p.r2 && points[j].r1 < p.r1) {
                out.push(i);
            } else if let Some(&j) = out.last() {
                if points[j].r2 <= p.r2 {
                    out.pop();
                    out.push(i);
                }
            }
        }
    }
    out
}

/// Points of the first subregion: every order pair at `α ∈ (0, α*]` plus the
/// `α = 0` and `α = 1` endpoints.
pub fn sweep_alpha_region<T: Real>(
    ch: &ChannelParams<T>,
    orders: &[(u32, u32)],
    alpha_grid_size: usize,
    mode: &RateMode,
) -> Result<RateRegion<T>> {
    let mut tasks: Vec<(u32, u32, T)> = Vec::new();
    for &(m1, m2) in orders {
        let mut alphas = vec![T::zero(), T::one()];
        if (m1, m2) != (1, 1) {
            alphas.extend(alpha_grid(alpha_star::<T>(m1, m2)?, alpha_grid_size));
        }
        alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        alphas.dedup();
        tasks.extend(alphas.into_iter().map(|a| (m1, m2, a)));
    }
    let points = tasks
        .par_iter()
        .map(|&(m1, m2, a)| rate_pair(ch, a, m1, m2, mode))
        .collect::<Result<Vec<_>>>()?;
    Ok(RateRegion::from_points(points))
}

/// Operating points time-shared in the second subregion.
pub fn ts_generators<T: Real>(ch: &ChannelParams<T>, mode: &RateMode) -> Result<Vec<RatePoint<T>>> {
    let mut tasks: Vec<(u32, u32, T)> = admissible_orders(ch)
        .into_iter()
        .filter(|&o| o != (1, 1))
        .map(|(m1, m2)| alpha_star::<T>(m1, m2).map(|a| (m1, m2, a)))
        .collect::<Result<_>>()?;
    let corner = (ch.n1(), 1, T::one());
    if !tasks.contains(&corner) {
        tasks.push(corner);
    }
    tasks
        .par_iter()
        .map(|&(m1, m2, a)| rate_pair(ch, a, m1, m2, mode))
        .collect()
}

/// Convex closure of the `α*` points of all admissible orders and user 1's
/// single-user corner `(N₁, 1, α = 1)`.
pub fn ts_region<T: Real>(ch: &ChannelParams<T>, mode: &RateMode) -> Result<RateRegion<T>> {
    Ok(RateRegion::convex_closure(ts_generators(ch, mode)?))
}

/// The full achievable region: the α-sweep union together with the time-sharing hull.
#[derive(Debug, Clone, PartialEq)]
pub struct AchievableRegion<T> {
    pub sweep: RateRegion<T>,
    pub ts: RateRegion<T>,
}

impl<T: Real> AchievableRegion<T> {
    pub fn build(ch: &ChannelParams<T>, alpha_grid_size: usize, mode: &RateMode) -> Result<Self> {
        let orders = admissible_orders(ch);
        Ok(Self {
            sweep: sweep_alpha_region(ch, &orders, alpha_grid_size, mode)?,
            ts: ts_region(ch, mode)?,
        })
    }

    pub fn contains(&self, r1: T, r2: T, tol: T) -> bool {
        self.ts.contains(r1, r2, tol) || self.sweep.contains(r1, r2, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(r1: f64, r2: f64) -> RatePoint<f64> {
        RatePoint {
            r1,
            r2,
            alpha: 0.0,
            m1: 1,
            m2: 1,
            scheme: Scheme::ExactMi,
            ts_lambda: None,
            parents: None,
            method: EstimateKind::Quadrature,
            err_est: 0.0,
        }
    }

    #[test]
    fn admissible_orders_examples() {
        let ch = ChannelParams::<f64>::from_db(22.0, 12.0).unwrap();
        let o = admissible_orders(&ch);
        assert!(o.contains(&(6, 2)) && o.contains(&(3, 4)) && o.contains(&(13, 1)));
        assert!(!o.contains(&(7, 2)));
        assert!(o.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(admissible_orders_for(1, 1), vec![(1, 1)]);
        assert_eq!(
            admissible_orders_for(4, 2),
            vec![(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (4, 1)]
        );
    }

    #[test]
    fn admissible_orders_match_enumeration() {
        for n1 in 1..30 {
            for n2 in 1..=n1 {
                let mut brute = vec![];
                for m1 in 1..=n1 {
                    for m2 in 1..=n1 {
                        if m1 * m2 <= n1 && m2 <= n2 {
                            brute.push((m1, m2));
                        }
                    }
                }
                assert_eq!(admissible_orders_for(n1, n2), brute);
            }
        }
    }

    #[test]
    fn case1_examples() {
        let c = case1_orders_for(13, 4);
        assert!(c.contains(&(6, 2)) && c.contains(&(3, 4)));
        assert!(!c.contains(&(2, 6)));
        assert_eq!(case1_orders_for(4, 2), vec![(2, 2)]);
        assert!(case1_orders_for(20, 1).is_empty());
    }

    #[test]
    fn adjacent_pairs_examples() {
        let p = adjacent_ts_pairs_for(13, 4);
        assert!(p.contains(&((3, 4), (4, 3))));
        assert_eq!(p, vec![((3, 4), (4, 3)), ((4, 3), (5, 2)), ((5, 2), (6, 2))]);
        assert!(adjacent_ts_pairs_for(5, 2).is_empty());
        for (a, b) in adjacent_ts_pairs_for(40, 40) {
            assert_eq!(b.0, a.0 + 1);
            assert!(40 >= 2 * b.0);
        }
    }

    #[test]
    fn alpha_grid_shape() {
        let g = alpha_grid(0.2f64, 64);
        assert_eq!(g.len(), 64);
        assert_eq!(*g.last().unwrap(), 0.2);
        assert!((g[0] - 2e-4).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let g = alpha_grid(0.2f64, 2);
        assert_eq!(g.len(), 2);
        assert!((g[0] - 2e-4).abs() < 1e-15 && g[1] == 0.2);
        assert!(alpha_grid(0.0f64, 8).is_empty());
    }

    #[test]
    fn pareto_examples() {
        let f = pareto_frontier(&[pt(1.0, 1.0), pt(1.0, 2.0)]);
        assert_eq!(f.len(), 1);
        assert_eq!((f[0].r1, f[0].r2), (1.0, 2.0));
        let f = pareto_frontier(&[pt(2.0, 1.0), pt(1.0, 2.0)]);
        assert_eq!(
            f.iter().map(|p| (p.r1, p.r2)).collect::<Vec<_>>(),
            vec![(1.0, 2.0), (2.0, 1.0)]
        );
        assert!(pareto_frontier::<f64>(&[]).is_empty());
    }

    #[test]
    fn pareto_tie_break_is_stable() {
        let mut a = pt(1.0, 1.0);
        a.m1 = 3;
        let mut b = pt(1.0, 1.0);
        b.m1 = 2;
        let f = pareto_frontier(&[a, b]);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].m1, 2);
    }

    #[test]
    fn hull_examples() {
        let r = RateRegion::convex_closure(vec![pt(1.0, 2.0)]);
        assert_eq!(r.frontier().len(), 1);
        assert!(r.contains(1.0, 2.0, 0.0));
        assert!(r.contains(0.3, 1.7, 0.0));
        assert!(!r.contains(1.01, 0.5, 0.0));
        assert!(!r.contains(0.5, 2.01, 0.0));

        let r = RateRegion::convex_closure(vec![pt(2.0, 0.0), pt(0.0, 2.0)]);
        assert_eq!(r.frontier().len(), 2);
        assert!(r.contains(1.0, 1.0, 1e-12));
        assert!(!r.contains(1.0, 1.001, 0.0));
        assert!(r.contains(0.5, 1.5, 1e-12));
    }

    #[test]
    fn ts_combinations_lie_on_frontier_edges() {
        let r = RateRegion::convex_closure(vec![pt(3.0, 0.0), pt(2.0, 1.5), pt(0.0, 2.0)]);
        let ts = r.ts_combinations(5);
        assert_eq!(ts.len(), 3 * (r.frontier().len() - 1));
        for p in &ts {
            assert_eq!(p.scheme, Scheme::TsCombination);
            let (ia, ib) = p.parents.unwrap();
            let l = p.ts_lambda.unwrap();
            let (a, b) = (&r.generators()[ia], &r.generators()[ib]);
            assert!((p.r1 - (l * a.r1 + (1.0 - l) * b.r1)).abs() < 1e-12);
            assert!(r.contains(p.r1, p.r2, 1e-12));
        }
    }

    fn brute_maximal(points: &[RatePoint<f64>]) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = points
            .iter()
            .filter(|q| !points.iter().any(|p| p.dominates(q)))
            .map(|q| (q.r1, q.r2))
            .collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }

    proptest! {
        #[test]
        fn pareto_matches_domination_oracle(raw in prop::collection::vec((0u8..20, 0u8..20), 0..60)) {
            let points: Vec<_> = raw.iter().map(|&(a, b)| pt(a as f64 / 4.0, b as f64 / 4.0)).collect();
            let fast: Vec<(f64, f64)> = pareto_frontier(&points).iter().map(|p| (p.r1, p.r2)).collect();
            prop_assert_eq!(fast, brute_maximal(&points));
        }

        #[test]
        fn hull_contains_generators_and_is_concave(raw in prop::collection::vec((0.0f64..5.0, 0.0f64..5.0), 1..40)) {
            let points: Vec<_> = raw.iter().map(|&(a, b)| pt(a, b)).collect();
            let r = RateRegion::convex_closure(points.clone());
            for p in &points {
                prop_assert!(r.contains(p.r1, p.r2, 1e-9));
            }
            let f = r.frontier();
            for w in f.windows(2) {
                prop_assert!(w[1].r1 > w[0].r1 && w[1].r2 < w[0].r2);
            }
            for w in f.windows(3) {
                let s1 = (w[1].r2 - w[0].r2) / (w[1].r1 - w[0].r1);
                let s2 = (w[2].r2 - w[1].r2) / (w[2].r1 - w[1].r1);
                prop_assert!(s2 <= s1 + 1e-9);
            }
            // every frontier vertex is Pareto-maximal among generators
            for v in &f {
                prop_assert!(!points.iter().any(|p| p.dominates(v)));
            }
        }
    }

    #[test]
    fn closed_form_sweep_respects_constraints() {
        let ch = ChannelParams::<f64>::from_db(22.0, 12.0).unwrap();
        let region = AchievableRegion::build(&ch, 16, &RateMode::ClosedForm).unwrap();
        for p in region.sweep.generators().iter().chain(region.ts.generators()) {
            assert!(p.m1 * p.m2 <= ch.n1() && p.m2 <= ch.n2());
            assert!(p.r1 >= 0.0 && p.r2 >= 0.0);
            assert!(p.r1 <= (p.m1 as f64).log2() + 1e-12);
            assert!(p.r2 <= (p.m2 as f64).log2() + 1e-12);
        }
        let corner = region.ts.generators().iter().find(|p| p.m1 == 13 && p.m2 == 1).unwrap();
        assert_eq!(corner.alpha, 1.0);
        assert_eq!(corner.r2, 0.0);
    }

    #[test]
    fn sweep_of_trivial_order_is_origin() {
        let ch = ChannelParams::<f64>::new(0.8, 0.5).unwrap();
        let r = sweep_alpha_region(&ch, &[(1, 1)], 8, &RateMode::Exact(MiMethod::default())).unwrap();
        assert_eq!(r.generators().len(), 2);
        assert!(r.generators().iter().all(|p| p.r1.abs() < 1e-9 && p.r2.abs() < 1e-9));
    }

    #[test]
    fn exact_r2_nonincreasing_in_alpha() {
        let ch = ChannelParams::<f64>::from_db(22.0, 12.0).unwrap();
        let mode = RateMode::Exact(MiMethod::default());
        let r = sweep_alpha_region(&ch, &[(3, 4), (6, 2)], 12, &mode).unwrap();
        for (m1, m2) in [(3, 4), (6, 2)] {
            let mut pts: Vec<_> = r
                .generators()
                .iter()
                .filter(|p| (p.m1, p.m2) == (m1, m2) && p.alpha > 0.0 && p.alpha < 1.0)
                .collect();
            pts.sort_by(|a, b| a.alpha.partial_cmp(&b.alpha).unwrap());
            for w in pts.windows(2) {
                assert!(w[1].r2 <= w[0].r2 + w[0].err_est + w[1].err_est);
                assert!(w[1].r1 + w[0].err_est + w[1].err_est >= w[0].r1);
            }
        }
    }

    #[test]
    fn adjacent_pairs_are_ordered_on_alpha_star_points() {
        for (s1, s2) in [(22.0, 12.0), (30.0, 20.0), (40.0, 25.0)] {
            let ch = ChannelParams::<f64>::from_db(s1, s2).unwrap();
            for (a, b) in adjacent_ts_pairs(&ch) {
                let pa = rate_pair(&ch, alpha_star(a.0, a.1).unwrap(), a.0, a.1, &RateMode::ClosedForm).unwrap();
                let pb = rate_pair(&ch, alpha_star(b.0, b.1).unwrap(), b.0, b.1, &RateMode::ClosedForm).unwrap();
                assert!(pa.r2 > pb.r2, "{a:?} {b:?}");
                assert!(pb.r1 > pa.r1, "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn frontier_inside_capacity() {
        let ch = ChannelParams::<f64>::from_db(22.0, 12.0).unwrap();
        let mode = RateMode::Exact(MiMethod::default());
        let region = AchievableRegion::build(&ch, 8, &mode).unwrap();
        let cap = crate::capacity::capacity_boundary(ch.snr1(), ch.snr2(), &crate::capacity::uniform_alpha_grid(2001))
            .unwrap();
        let cap_region = RateRegion::convex_closure(cap.iter().map(|c| pt(c.c1, c.c2)).collect());
        for p in region.sweep.frontier().into_iter().chain(region.ts.frontier()) {
            assert!(cap_region.contains(p.r1, p.r2, p.err_est + 1e-6), "{p:?}");
        }
    }
}
