//! Runnable studies: continuity of `[w]_{A_p}` and of the maximal-operator
//! norm along `w_t = w0·e^{tφ}`, scans of the two-factor Hölder bound,
//! Buckley scaling over power weights, and a `d_*` metric audit. Each study
//! has a CSV writer with a fixed header.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::characteristics::{ap_characteristic, bmo_seminorm, dstar, holder_chain_bound};
use crate::characteristics::{HolderChainRecord, HolderParams};
use crate::error::{Error, Result};
use crate::format_float;
use crate::normest::{estimate_norm, EstimatorConfig};
use crate::weightgrid::{make_power_weight, perturb_weight, Grid, GridFunction};
use crate::weightgrid::{LebesgueExponent, Weight};

pub const HOLDER_SLACK: f64 = 1e-9;
pub const DELTA_LINEARITY_TOL: f64 = 1e-10;
pub const TRIANGLE_SLACK: f64 = 1e-12;
pub const INDISCERNIBLE_DISTANCE: f64 = 1e-12;
pub const INDISCERNIBLE_SPREAD: f64 = 1e-6;
/// Rows with a characteristic at or below this are left out of the Buckley fit.
pub const BUCKLEY_FIT_MIN_CHAR: f64 = 2.0;
pub const BUCKLEY_SLOPE_SLACK: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    /// `d_*(w_t, w0)`
    pub delta: f64,
    pub ap_char: f64,
    pub norm_lb: f64,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedRow {
    pub t: f64,
    pub reason: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// One row per requested `t` in input order, then the `t = 0` row.
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<SkippedRow>,
    /// `‖φ‖_*`, the slope of `delta` in `t`.
    pub phi_bmo: f64,
}

impl SweepReport {
    /// Rows whose `delta` differs from `t·‖φ‖_*` by more than `tol` relative.
    pub fn delta_linearity_violations(&self, tol: f64) -> Vec<SweepRow> {
        self.rows
            .iter()
            .filter(|r| {
                let expected = r.t.abs() * self.phi_bmo;
                (r.delta - expected).abs() > tol * expected.abs().max(f64::MIN_POSITIVE)
                    && !(expected == 0.0 && r.delta <= INDISCERNIBLE_DISTANCE)
            })
            .copied()
            .collect()
    }

    pub fn baseline(&self) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.t == 0.0)
    }
}

/// Tracks `d_*`, `[w_t]_{A_p}` and the norm lower bound along
/// `w_t = w0·e^{tφ}` for a decreasing list of positive `t`, plus `t = 0`.
///
/// Every row uses the same estimator configuration (pool and seed). Rows
/// whose weight leaves the value range are skipped and reported.
pub fn continuity_sweep(
    w0: &Weight,
    phi: &GridFunction,
    t_list: &[f64],
    p: LebesgueExponent,
    cfg: &EstimatorConfig,
) -> Result<SweepReport> {
    if w0.grid() != phi.grid() {
        return Err(Error::GridMismatch {
            left: w0.grid().to_string(),
            right: phi.grid().to_string(),
        });
    }
    if let Some(t) = t_list.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "t values must be positive, got {t}"
        )));
    }
    if t_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "t list must be strictly decreasing".into(),
        ));
    }

    let ts: Vec<f64> = t_list.iter().copied().chain(std::iter::once(0.0)).collect();
    let outcomes: Vec<Result<SweepRow>> = ts
        .par_iter()
        .map(|&t| {
            let started = Instant::now();
            let wt = perturb_weight(w0, phi, t)?;
            let delta = dstar(&wt, w0)?;
            let ap_char = ap_characteristic(&wt, p)?.value;
            let norm_lb = estimate_norm(&wt, p, cfg)?.lower_bound;
            Ok(SweepRow {
                t,
                delta,
                ap_char,
                norm_lb,
                runtime_ms: started.elapsed().as_millis() as u64,
            })
        })
        .collect();

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (t, outcome) in ts.into_iter().zip(outcomes) {
        match outcome {
            Ok(row) => rows.push(row),
            Err(reason @ (Error::OutOfRange { .. } | Error::NonFinite { .. })) => {
                skipped.push(SkippedRow { t, reason })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(SweepReport {
        rows,
        skipped,
        phi_bmo: bmo_seminorm(phi).value,
    })
}

/// `φ = 0` on the left half of the window and `height` on the right half.
pub fn step_function(grid: Grid, height: f64) -> Result<GridFunction> {
    let n = grid.n_cells();
    let values = (0..n)
        .map(|i| if i < n / 2 { 0.0 } else { height })
        .collect();
    GridFunction::new(grid, values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderRow {
    pub pair_id: usize,
    pub r: f64,
    pub record: HolderChainRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderScanReport {
    pub rows: Vec<HolderRow>,
    /// `(pair_id, R, error)` for combinations whose powered weights left the range.
    pub errors: Vec<(usize, f64, Error)>,
}

impl HolderScanReport {
    pub fn violations(&self) -> Vec<HolderRow> {
        self.rows
            .iter()
            .filter(|r| !r.record.holds(HOLDER_SLACK))
            .copied()
            .collect()
    }
}

/// Evaluates the Hölder-chain bound for every `(w, w0)` pair and every `R`.
pub fn holder_chain_scan(
    pairs: &[(Weight, Weight)],
    p: LebesgueExponent,
    r_list: &[f64],
) -> Result<HolderScanReport> {
    let params = r_list
        .iter()
        .map(|&r| HolderParams::new(r))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, HolderParams)> = (0..pairs.len())
        .flat_map(|i| params.iter().map(move |&h| (i, h)))
        .collect();
    let results: Vec<Result<HolderChainRecord>> = jobs
        .par_iter()
        .map(|&(i, h)| holder_chain_bound(&pairs[i].0, &pairs[i].1, p, h))
        .collect();

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for ((pair_id, h), res) in jobs.into_iter().zip(results) {
        match res {
            Ok(record) => rows.push(HolderRow {
                pair_id,
                r: h.r(),
                record,
            }),
            Err(e @ Error::GridMismatch { .. }) => return Err(e),
            Err(e) => errors.push((pair_id, h.r(), e)),
        }
    }
    Ok(HolderScanReport { rows, errors })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuckleyRow {
    pub alpha: f64,
    pub ap_char: f64,
    pub norm_lb: f64,
    /// `norm_lb / ap_char^{1/(p-1)}`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuckleyReport {
    pub rows: Vec<BuckleyRow>,
    /// Least-squares slope of `log norm_lb` against `log ap_char` over rows
    /// with `ap_char > 2`; `None` with fewer than two such rows.
    pub slope: Option<f64>,
    pub exponent: f64,
}

impl BuckleyReport {
    /// `slope <= 1/(p-1) + slack`; vacuous without a fit.
    pub fn slope_within(&self, slack: f64) -> bool {
        self.slope.is_none_or(|s| s <= self.exponent + slack)
    }
}

/// Characteristic and norm lower bound for the power weights `|x|^α`.
pub fn buckley_study(
    alpha_list: &[f64],
    p: LebesgueExponent,
    grid: Grid,
    cfg: &EstimatorConfig,
) -> Result<BuckleyReport> {
    let upper = p.value() - 1.0;
    if let Some(a) = alpha_list.iter().find(|a| !(**a > -1.0 && **a < upper)) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (-1, {upper}) for power weights in A_p, got {a}"
        )));
    }
    let exponent = 1.0 / (p.value() - 1.0);
    let rows = alpha_list
        .par_iter()
        .map(|&alpha| {
            let w = make_power_weight(grid, alpha)?;
            let ap_char = ap_characteristic(&w, p)?.value;
            let norm_lb = estimate_norm(&w, p, cfg)?.lower_bound;
            Ok(BuckleyRow {
                alpha,
                ap_char,
                norm_lb,
                ratio: norm_lb / ap_char.powf(exponent),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let fit: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.ap_char > BUCKLEY_FIT_MIN_CHAR)
        .map(|r| (r.ap_char.ln(), r.norm_lb.ln()))
        .collect();
    Ok(BuckleyReport {
        rows,
        slope: least_squares_slope(&fit),
        exponent,
    })
}

fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditCheck {
    Symmetry,
    Triangle,
    Scaling,
    Indiscernible,
}

impl AuditCheck {
    pub fn name(&self) -> &'static str {
        match self {
            AuditCheck::Symmetry => "symmetry",
            AuditCheck::Triangle => "triangle",
            AuditCheck::Scaling => "scaling",
            AuditCheck::Indiscernible => "indiscernible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRecord {
    pub trial: usize,
    pub check: AuditCheck,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub records: Vec<AuditRecord>,
}

impl AuditReport {
    pub fn violations(&self) -> usize {
        self.records.iter().filter(|r| !r.pass).count()
    }
}

/// Checks the metric axioms of `d_*` on random triples drawn from `weights`.
///
/// Per trial, with `(u, v, x)` drawn with replacement and `λ` log-uniform in
/// `[1e-3, 1e3]`:
/// - symmetry: `d(u,v)` and `d(v,u)` bitwise equal;
/// - triangle: `d(u,x) <= d(u,v) + d(v,x) + 1e-12`;
/// - scaling: `d(u, λu) <= 1e-12` (skipped when `λu` leaves the value range);
/// - indiscernible: `d(u,v) <= 1e-12` implies `max(u/v)/min(u/v) - 1 <= 1e-6`.
pub fn metric_axioms_audit(weights: &[Weight], trials: usize, seed: u64) -> Result<AuditReport> {
    if weights.is_empty() {
        return Err(Error::InvalidParameter(
            "metric audit needs at least one weight".into(),
        ));
    }
    let grid = weights[0].grid();
    if let Some(w) = weights.iter().find(|w| w.grid() != grid) {
        return Err(Error::GridMismatch {
            left: grid.to_string(),
            right: w.grid().to_string(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws: Vec<(usize, usize, usize, f64)> = (0..trials)
        .map(|_| {
            let k = weights.len();
            (
                rng.gen_range(0..k),
                rng.gen_range(0..k),
                rng.gen_range(0..k),
                10f64.powf(rng.gen_range(-3.0..=3.0)),
            )
        })
        .collect();

    let per_trial: Vec<Vec<AuditRecord>> = draws
        .par_iter()
        .enumerate()
        .map(|(trial, &(a, b, c, lambda))| {
            let (u, v, x) = (&weights[a], &weights[b], &weights[c]);
            let duv = dstar(u, v)?;
            let dvu = dstar(v, u)?;
            let dux = dstar(u, x)?;
            let dvx = dstar(v, x)?;
            let mut out = vec![
                AuditRecord {
                    trial,
                    check: AuditCheck::Symmetry,
                    lhs: duv,
                    rhs: dvu,
                    pass: duv.to_bits() == dvu.to_bits(),
                },
                AuditRecord {
                    trial,
                    check: AuditCheck::Triangle,
                    lhs: dux,
                    rhs: duv + dvx,
                    pass: dux <= duv + dvx + TRIANGLE_SLACK,
                },
            ];
            if let Ok(scaled) = u.scaled(lambda) {
                let d = dstar(u, &scaled)?;
                out.push(AuditRecord {
                    trial,
                    check: AuditCheck::Scaling,
                    lhs: d,
                    rhs: INDISCERNIBLE_DISTANCE,
                    pass: d <= INDISCERNIBLE_DISTANCE,
                });
            }
            let spread = ratio_spread(u, v);
            out.push(AuditRecord {
                trial,
                check: AuditCheck::Indiscernible,
                lhs: duv,
                rhs: spread,
                pass: duv > INDISCERNIBLE_DISTANCE || spread <= INDISCERNIBLE_SPREAD,
            });
            Ok(out)
        })
        .collect::<Result<_>>()?;

    Ok(AuditReport {
        records: per_trial.into_iter().flatten().collect(),
    })
}

fn ratio_spread(u: &Weight, v: &Weight) -> f64 {
    let (lo, hi) = u
        .values()
        .iter()
        .zip(v.values())
        .map(|(a, b)| a / b)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r), hi.max(r))
        });
    hi / lo - 1.0
}

/// Weight with i.i.d. values `e^U`, `U` uniform on `[-half_spread, half_spread]`.
pub fn random_weight(grid: Grid, half_spread: f64, rng: &mut impl Rng) -> Result<Weight> {
    let values = (0..grid.n_cells())
        .map(|_| rng.gen_range(-half_spread..=half_spread).exp())
        .collect();
    Weight::from_values(grid, values)
}

pub fn random_weights(
    grid: Grid,
    count: usize,
    half_spread: f64,
    seed: u64,
) -> Result<Vec<Weight>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_weight(grid, half_spread, &mut rng))
        .collect()
}

pub fn write_sweep_csv(rows: &[SweepRow], path: impl AsRef<Path>) -> Result<()> {
    let mut s = String::from("t,delta,ap_char,norm_lb,runtime_ms\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            format_float(r.t),
            format_float(r.delta),
            format_float(r.ap_char),
            format_float(r.norm_lb),
            r.runtime_ms
        );
    }
    fs::write(path, s)?;
    Ok(())
}

pub fn write_holder_csv(rows: &[HolderRow], path: impl AsRef<Path>) -> Result<()> {
    let mut s = String::from("pair_id,R,lhs,rhs,factor_ratio,factor_base\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.pair_id,
            format_float(r.r),
            format_float(r.record.lhs),
            format_float(r.record.rhs),
            format_float(r.record.factor_ratio),
            format_float(r.record.factor_base)
        );
    }
    fs::write(path, s)?;
    Ok(())
}

pub fn write_buckley_csv(rows: &[BuckleyRow], path: impl AsRef<Path>) -> Result<()> {
    let mut s = String::from("alpha,ap_char,norm_lb,ratio\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            format_float(r.alpha),
            format_float(r.ap_char),
            format_float(r.norm_lb),
            format_float(r.ratio)
        );
    }
    fs::write(path, s)?;
    Ok(())
}

pub fn write_audit_csv(records: &[AuditRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut s = String::from("trial,check,lhs,rhs,pass\n");
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.trial,
            r.check.name(),
            format_float(r.lhs),
            format_float(r.rhs),
            r.pass
        );
    }
    fs::write(path, s)?;
    Ok(())
}
