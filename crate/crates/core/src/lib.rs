//! Numerical laboratory for Muckenhoupt weights on a one-dimensional grid.
//!
//! Weights and test functions are piecewise constant on a uniform
//! power-of-two grid; cubes become cell-aligned intervals, over which the
//! `A_p` characteristic, the BMO seminorm and the `d_*` distance are computed
//! exactly. The uncentered Hardy–Littlewood maximal operator is computed the
//! same way and its weighted operator norm is bounded from below by a
//! pool-plus-coordinate-ascent search. [`experiments`] turns these into
//! reproducible CSV studies.

pub mod characteristics;
mod dd;
pub mod error;
pub mod experiments;
pub mod maximal;
pub mod normest;
pub mod weightgrid;

pub use characteristics::{
    ap_characteristic, bmo_seminorm, dstar, holder_chain_bound, interval_average, ApResult,
    BmoResult, HolderChainRecord, HolderParams,
};
pub use error::{Error, Result};
pub use maximal::{apply_maximal, weighted_lp_norm, MaximalOutput};
pub use normest::{estimate_norm, rayleigh_quotient, EstimatorConfig, NormEstimate, PoolConfig};
pub use weightgrid::{
    make_power_weight, perturb_weight, pointwise_map, CellInterval, Grid, GridFunction,
    LebesgueExponent, PointwiseOp, ValueRange, Weight,
};

/// Shortest decimal representation that parses back to the same `f64`
/// (at most 17 significant digits), always with a decimal point or exponent.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

/// Distance between two finite floats in units in the last place.
pub fn ulps_between(a: f64, b: f64) -> u64 {
    fn ordered(x: f64) -> i64 {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    }
    ordered(a).abs_diff(ordered(b))
}
