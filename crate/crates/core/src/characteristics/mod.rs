//! Interval-supremum engines: the `A_p` characteristic, the BMO seminorm,
//! the `d_*` distance and the two-factor Hölder bound for `[w]_{A_p}`.
//!
//! Every supremum ranges over all cell-aligned intervals `[i, j)`. For
//! piecewise-constant data those values are exact for that family and are
//! lower bounds for the supremum over all real intervals.
//!
//! Witnesses are chosen deterministically: the largest value wins, ties go to
//! the smallest start and then the smallest end. Scans run in parallel over
//! left endpoints; the reduction is order independent.

mod order_index;

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::dd::{Dd, DdExponent, PrefixSums};
use crate::error::{Error, Result};
use crate::weightgrid::{power, CellInterval, GridFunction, LebesgueExponent, Weight};

use order_index::OrderIndex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApResult {
    pub value: f64,
    pub witness: CellInterval,
    pub p: LebesgueExponent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmoResult {
    pub value: f64,
    pub witness: CellInterval,
}

/// Conjugate pair `R`, `R' = R/(R-1) = 1 + ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderParams {
    r: f64,
}

impl HolderParams {
    pub fn new(r: f64) -> Result<Self> {
        if r.is_finite() && r > 1.0 {
            Ok(HolderParams { r })
        } else {
            Err(Error::InvalidParameter(format!(
                "R must satisfy 1 < R < inf, got {r}"
            )))
        }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn r_prime(&self) -> f64 {
        self.r / (self.r - 1.0)
    }

    pub fn epsilon(&self) -> f64 {
        self.r_prime() - 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderChainRecord {
    /// `[w]_{A_p}`
    pub lhs: f64,
    /// `factor_ratio^{1/R} · factor_base^{1/R'}`
    pub rhs: f64,
    /// `[(w/w0)^R]_{A_p}`
    pub factor_ratio: f64,
    /// `[w0^{R'}]_{A_p}`
    pub factor_base: f64,
}

impl HolderChainRecord {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + slack)
    }
}

#[derive(Debug, Clone, Copy)]
struct Best {
    value: f64,
    start: usize,
    end: usize,
}

impl Best {
    const NONE: Best = Best {
        value: f64::NEG_INFINITY,
        start: usize::MAX,
        end: usize::MAX,
    };

    fn rank(&self, other: &Best) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then_with(|| other.start.cmp(&self.start))
            .then_with(|| other.end.cmp(&self.end))
    }

    fn pick(a: Best, b: Best) -> Best {
        if b.rank(&a) == Ordering::Greater {
            b
        } else {
            a
        }
    }

    fn interval(&self) -> CellInterval {
        CellInterval {
            start: self.start,
            end: self.end,
        }
    }
}

/// Runs `per_start` for every left endpoint and reduces to the overall argmax.
fn argmax_over_starts<F>(n: usize, per_start: F) -> Best
where
    F: Fn(usize) -> Best + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .map(per_start)
        .reduce(|| Best::NONE, Best::pick)
}

/// `<f>_q`, the mean of `f` over the cells of `q`.
pub fn interval_average(f: &GridFunction, q: CellInterval) -> Result<f64> {
    let q = CellInterval::new(q.start, q.end, f.len())?;
    let prefix = PrefixSums::new(f.values()[q.start..q.end].iter().copied());
    Ok(prefix.mean(0, q.len()))
}

/// Relative margin below the fast-pass maximum inside which intervals are
/// re-evaluated in double-double. The fast pass is accurate to a few ulps, so
/// this comfortably contains the true argmax.
const REFINE_MARGIN: f64 = 1e-10;

/// Dual weight `w^{-1/(p-1)}` in double-double, with the fast-pass rounding.
fn dual_values(w: &Weight, p: LebesgueExponent) -> Result<Vec<Dd>> {
    let r = p.dual_power();
    let exp = DdExponent::new(r);
    let dual: Vec<Dd> = w
        .values()
        .iter()
        .map(|&v| match exp {
            DdExponent::General(_) => Dd::from(power(v, r)),
            _ => Dd::from(v).pow(exp),
        })
        .collect();
    if let Some((cell, value)) = dual
        .iter()
        .map(|d| d.hi)
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && *v > 0.0))
    {
        return Err(Error::OutOfRange {
            cell,
            value,
            floor: f64::MIN_POSITIVE,
            ceiling: f64::MAX,
        });
    }
    Ok(dual)
}

struct ApScan {
    pw: PrefixSums,
    pd: PrefixSums,
    pm1: f64,
    pm1_exp: DdExponent,
}

impl ApScan {
    fn new(w: &Weight, p: LebesgueExponent) -> Result<Self> {
        let dual = dual_values(w, p)?;
        let pm1 = p.value() - 1.0;
        Ok(ApScan {
            pw: PrefixSums::new(w.values().iter().copied()),
            pd: PrefixSums::new_dd(dual),
            pm1,
            pm1_exp: DdExponent::new(pm1),
        })
    }

    #[inline]
    fn fast(&self, i: usize, j: usize) -> f64 {
        self.pw.mean(i, j) * power(self.pd.mean(i, j), self.pm1)
    }

    #[inline]
    fn precise(&self, i: usize, j: usize) -> f64 {
        let mw = self.pw.mean_dd(i, j);
        let md = self.pd.mean_dd(i, j);
        let v = mw.mul(md.pow(self.pm1_exp));
        v.hi + v.lo
    }
}

/// `<w>_q · <w^{-1/(p-1)}>_q^{p-1}` on a single interval.
pub fn ap_on_interval(w: &Weight, p: LebesgueExponent, q: CellInterval) -> Result<f64> {
    let q = CellInterval::new(q.start, q.end, w.values().len())?;
    Ok(ApScan::new(w, p)?.precise(q.start, q.end))
}

/// `[w]_{A_p}` over all cell-aligned intervals, `O(N^2)` via two prefix-sum
/// arrays.
///
/// A plain floating-point pass finds the maximum; every interval within
/// `REFINE_MARGIN` of it is then re-evaluated in double-double, and the
/// refined values decide the result and the witness. This keeps the value
/// stable to about an ulp under rescaling of `w`.
pub fn ap_characteristic(w: &Weight, p: LebesgueExponent) -> Result<ApResult> {
    let scan = ApScan::new(w, p)?;
    let n = w.values().len();

    let rough = (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..=n)
                .map(|j| scan.fast(i, j))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let threshold = rough - REFINE_MARGIN * rough.abs();

    let best = argmax_over_starts(n, |i| {
        let mut best = Best::NONE;
        for j in (i + 1)..=n {
            if scan.fast(i, j) < threshold {
                continue;
            }
            let v = scan.precise(i, j);
            if v > best.value {
                best = Best {
                    value: v,
                    start: i,
                    end: j,
                };
            }
        }
        best
    });
    Ok(ApResult {
        value: best.value,
        witness: best.interval(),
        p,
    })
}

/// `‖f‖_*`: the largest mean absolute deviation `<|f - <f>_q|>_q` over all
/// cell-aligned intervals.
///
/// For a fixed left endpoint the right endpoint grows one cell at a time and
/// the included values are kept in a rank-indexed Fenwick tree, so the
/// deviation sum about the moving mean costs `O(log N)`: `O(N^2 log N)` total.
pub fn bmo_seminorm(f: &GridFunction) -> BmoResult {
    let xs = f.values();
    let n = xs.len();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));
    let mut rank = vec![0usize; n];
    for (r, &cell) in order.iter().enumerate() {
        rank[cell] = r;
    }
    let sorted: Vec<f64> = order.iter().map(|&c| xs[c]).collect();
    let prefix = PrefixSums::new(xs.iter().copied());

    let best = (0..n)
        .into_par_iter()
        .map_init(
            || OrderIndex::new(n),
            |index, i| {
                index.clear();
                // values are shifted by the left-endpoint value so that a
                // constant run sums to exactly zero
                let shift = xs[i];
                let mut best = Best::NONE;
                for j in (i + 1)..=n {
                    let k = j - 1;
                    index.insert(rank[k], xs[k] - shift);
                    let len = j - i;
                    let mean = prefix.mean(i, j);
                    let m = mean - shift;
                    let split = sorted.partition_point(|&v| v <= mean);
                    let (below_count, below_sum) = index.below(split);
                    let (_, total) = index.below(n);
                    let above_count = len - below_count;
                    let above_sum = total - below_sum;
                    let dev =
                        (m * below_count as f64 - below_sum) + (above_sum - m * above_count as f64);
                    let v = (dev / len as f64).max(0.0);
                    if v > best.value {
                        best = Best {
                            value: v,
                            start: i,
                            end: j,
                        };
                    }
                }
                best
            },
        )
        .reduce(|| Best::NONE, Best::pick);

    BmoResult {
        value: best.value,
        witness: best.interval(),
    }
}

/// `d_*(u, v) = ‖log u - log v‖_*`, evaluated as `‖log(u/v)‖_*` so that
/// exact multiples `v = λu` give exactly 0 whenever the quotients round alike.
///
/// The pair is put in a canonical order before differencing, so
/// `dstar(u, v)` and `dstar(v, u)` are bitwise identical.
pub fn dstar(u: &Weight, v: &Weight) -> Result<f64> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch {
            left: u.grid().to_string(),
            right: v.grid().to_string(),
        });
    }
    let (a, b) = if canonical_cmp(u.values(), v.values()) == Ordering::Greater {
        (v, u)
    } else {
        (u, v)
    };
    let diff: Vec<f64> = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x / y).ln())
        .collect();
    Ok(bmo_seminorm(&GridFunction::new(*u.grid(), diff)?).value)
}

fn canonical_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Both sides of `[w]_{A_p} <= [(w/w0)^R]_{A_p}^{1/R} [w0^{R'}]_{A_p}^{1/R'}`.
pub fn holder_chain_bound(
    w: &Weight,
    w0: &Weight,
    p: LebesgueExponent,
    params: HolderParams,
) -> Result<HolderChainRecord> {
    let ratio = w.ratio(w0)?.powf(params.r())?;
    let base = w0.powf(params.r_prime())?;
    let lhs = ap_characteristic(w, p)?.value;
    let factor_ratio = ap_characteristic(&ratio, p)?.value;
    let factor_base = ap_characteristic(&base, p)?.value;
    let rhs = power(factor_ratio, 1.0 / params.r()) * power(factor_base, 1.0 / params.r_prime());
    Ok(HolderChainRecord {
        lhs,
        rhs,
        factor_ratio,
        factor_base,
    })
}
