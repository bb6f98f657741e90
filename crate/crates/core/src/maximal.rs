//! The uncentered Hardy–Littlewood maximal operator restricted to
//! cell-aligned intervals, and weighted `L^p` norms.
//!
//! `Mf_i` is the largest average of `|f|` over an interval `[s, e)` with
//! `s <= i < e`. Outside the window `f` is taken to be zero and intervals
//! never leave it. The result is pointwise below the continuum maximal
//! function of the same step function, so norms computed here are lower
//! bounds for the continuum operator.

use rayon::prelude::*;

use crate::dd::PrefixSums;
use crate::error::{Error, Result};
use crate::weightgrid::{CellInterval, GridFunction, LebesgueExponent, Weight};

#[derive(Debug, Clone, PartialEq)]
pub struct MaximalOutput {
    pub values: GridFunction,
    /// Interval attaining `Mf_i`; ties go to the smallest start, then the smallest end.
    pub witnesses: Vec<CellInterval>,
}

pub fn apply_maximal(f: &GridFunction) -> MaximalOutput {
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let (values, witnesses) = scan::<true>(&abs);
    MaximalOutput {
        values: GridFunction::new(*f.grid(), values).expect("averages of finite values are finite"),
        witnesses,
    }
}

/// `Mf` for a nonnegative value slice, without witnesses.
pub(crate) fn maximal_values(abs: &[f64]) -> Vec<f64> {
    scan::<false>(abs).0
}

#[derive(Clone)]
struct Partial {
    best: Vec<f64>,
    start: Vec<usize>,
    end: Vec<usize>,
}

impl Partial {
    fn new(n: usize, witnesses: bool) -> Self {
        let k = if witnesses { n } else { 0 };
        Partial {
            best: vec![f64::NEG_INFINITY; n],
            start: vec![usize::MAX; k],
            end: vec![usize::MAX; k],
        }
    }

    fn merge<const W: bool>(mut self, other: Partial) -> Partial {
        for i in 0..self.best.len() {
            let take = if W {
                let a = (self.best[i], self.start[i], self.end[i]);
                let b = (other.best[i], other.start[i], other.end[i]);
                b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2))
            } else {
                other.best[i] > self.best[i]
            };
            if take {
                self.best[i] = other.best[i];
                if W {
                    self.start[i] = other.start[i];
                    self.end[i] = other.end[i];
                }
            }
        }
        self
    }
}

/// For each start `s`, averages over `[s, e)` are scanned right to left to
/// form the suffix maximum over `e > i`; cell `i` takes the best over
/// `s <= i`. `O(N^2)` total, parallel over starts.
fn scan<const W: bool>(abs: &[f64]) -> (Vec<f64>, Vec<CellInterval>) {
    let n = abs.len();
    let prefix = PrefixSums::new(abs.iter().copied());

    let partial = (0..n)
        .into_par_iter()
        .fold(
            || (Partial::new(n, W), vec![0.0f64; n + 1]),
            |(mut acc, mut avg), s| {
                // avg[e] = <|f|>_[s,e); singletons use the value itself
                avg[s + 1] = abs[s];
                for (e, slot) in avg.iter_mut().enumerate().skip(s + 2) {
                    *slot = prefix.mean(s, e);
                }
                let mut run = f64::NEG_INFINITY;
                let mut run_end = usize::MAX;
                for i in (s..n).rev() {
                    let e = i + 1;
                    // `>=` keeps the smallest end among equal averages
                    if avg[e] >= run {
                        run = avg[e];
                        run_end = e;
                    }
                    let better = if W {
                        run > acc.best[i]
                            || (run == acc.best[i] && (s, run_end) < (acc.start[i], acc.end[i]))
                    } else {
                        run > acc.best[i]
                    };
                    if better {
                        acc.best[i] = run;
                        if W {
                            acc.start[i] = s;
                            acc.end[i] = run_end;
                        }
                    }
                }
                (acc, avg)
            },
        )
        .map(|(acc, _)| acc)
        .reduce(|| Partial::new(n, W), Partial::merge::<W>);

    let witnesses = if W {
        partial
            .start
            .iter()
            .zip(&partial.end)
            .map(|(&start, &end)| CellInterval { start, end })
            .collect()
    } else {
        Vec::new()
    };
    (partial.best, witnesses)
}

/// `(Σ_i w_i |f_i|^p · h)^{1/p}`.
pub fn weighted_lp_norm(f: &GridFunction, w: &Weight, p: LebesgueExponent) -> Result<f64> {
    if f.grid() != w.grid() {
        return Err(Error::GridMismatch {
            left: f.grid().to_string(),
            right: w.grid().to_string(),
        });
    }
    Ok(lp_norm_raw(
        f.values(),
        w.values(),
        p.value(),
        f.grid().cell_width(),
    ))
}

pub(crate) fn lp_norm_raw(f: &[f64], w: &[f64], p: f64, cell_width: f64) -> f64 {
    let terms = f.iter().zip(w).map(|(x, wi)| wi * pow_abs(*x, p));
    let total = PrefixSums::new(terms).sum(0, f.len());
    (total * cell_width).powf(1.0 / p)
}

#[inline]
fn pow_abs(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 2.0 {
        a * a
    } else {
        a.powf(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weightgrid::Grid;

    fn func(values: &[f64]) -> GridFunction {
        GridFunction::new(Grid::new(1.0, values.len()).unwrap(), values.to_vec()).unwrap()
    }

    fn iv(start: usize, end: usize) -> CellInterval {
        CellInterval { start, end }
    }

    #[test]
    fn constant_input() {
        let out = apply_maximal(&func(&[-0.3; 64]));
        assert!(out.values.values().iter().all(|&v| v == 0.3));
        for (i, q) in out.witnesses.iter().enumerate() {
            assert_eq!(*q, iv(0, i + 1));
        }
    }

    #[test]
    fn spike_example() {
        let out = apply_maximal(&func(&[0.0, 0.0, 1.0, 0.0]));
        assert_eq!(out.values.values(), &[1.0 / 3.0, 0.5, 1.0, 0.5]);
        assert_eq!(out.witnesses, vec![iv(0, 3), iv(1, 3), iv(2, 3), iv(2, 4)]);
    }

    #[test]
    fn sign_is_ignored() {
        let out = apply_maximal(&func(&[1.0, -1.0]));
        assert_eq!(out.values.values(), &[1.0, 1.0]);
    }

    #[test]
    fn fast_path_matches_witness_path() {
        let xs: Vec<f64> = (0..64)
            .map(|k| ((k * 29 % 17) as f64 * 0.3).sin().abs())
            .collect();
        let full = apply_maximal(&func(&xs));
        assert_eq!(maximal_values(&xs), full.values.values());
    }

    #[test]
    fn lp_norm_examples() {
        let g = Grid::new(1.0, 4).unwrap();
        let p2 = LebesgueExponent::new(2.0).unwrap();
        let one = Weight::constant(g, 1.0).unwrap();
        let zero = GridFunction::constant(g, 0.0).unwrap();
        assert_eq!(weighted_lp_norm(&zero, &one, p2).unwrap(), 0.0);
        for p in [1.5, 2.0, 3.0] {
            let p = LebesgueExponent::new(p).unwrap();
            let f = GridFunction::constant(g, 1.0).unwrap();
            let norm = weighted_lp_norm(&f, &one, p).unwrap();
            assert!((norm - 2f64.powf(1.0 / p.value())).abs() <= 1e-15);
        }
        let g2 = Grid::new(1.0, 2).unwrap();
        let f = GridFunction::new(g2, vec![1.0, 0.0]).unwrap();
        let w = Weight::from_values(g2, vec![1.0, 4.0]).unwrap();
        assert_eq!(weighted_lp_norm(&f, &w, p2).unwrap(), 1.0);
        assert!(weighted_lp_norm(&f, &one, p2).is_err());
    }
}
