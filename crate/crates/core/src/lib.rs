//! Superimposed PAM signaling for the two-user Gaussian broadcast channel.
//!
//! Builds superposition constellations, evaluates achievable rates when each
//! receiver treats the other user's signal as noise, assembles the achievable
//! rate region (with time sharing) and checks its gap to the Gaussian capacity
//! region numerically.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases fix the scalar to `f64`.

// `!(x > 0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod constellation;
pub mod entropy_mi;
pub mod error;
pub mod gap;
pub mod region;
pub mod scalar;

pub use capacity::{awgn_capacity, c1, c2, capacity_boundary, relative_gain, uniform_alpha_grid, CapacityPoint};
pub use constellation::{
    alpha_star, alpha_star_exact, dmin_bruteforce, dmin_formula, inter_cluster_distance, make_pam, quantized_gain,
    superimpose, Atom, ChannelParams, PamSpec, SuperConstellation, User,
};
pub use entropy_mi::{
    mi_exact_tin, mi_lb_user1, mi_lb_user2, mi_pam_awgn, mixture_entropy, ow_bound, EffectiveChannel, EntropyEstimate,
    EstimateKind, MiEstimate, MiMethod, DEFAULT_MC_SAMPLES, DEFAULT_QUAD_ORDER, DEFAULT_SEED,
};
pub use error::{Error, Result};
pub use gap::{
    certify_case1, certify_case2, certify_constant_gap, certify_scan, certify_ts, constant_gap_against, gap_at,
    gap_constants, snr_grid_db, CaseTag, ConstantGapSummary, GapBounds, GapConstant, GapReport, TsGapReport,
};
pub use region::{
    adjacent_ts_pairs, admissible_orders, case1_orders, case2_order, pareto_frontier, rate_pair, sweep_alpha_region,
    ts_region, AchievableRegion, RateMode, RatePoint, RateRegion, Scheme,
};
pub use scalar::{db_to_linear, linear_to_db, shaping_loss, Real};

pub type PamSpec64 = PamSpec<f64>;
pub type SuperConstellation64 = SuperConstellation<f64>;
pub type ChannelParams64 = ChannelParams<f64>;
pub type RatePoint64 = RatePoint<f64>;
pub type RateRegion64 = RateRegion<f64>;
pub type GapReport64 = GapReport<f64>;
pub type PamSpec32 = PamSpec<f32>;
pub type ChannelParams32 = ChannelParams<f32>;
