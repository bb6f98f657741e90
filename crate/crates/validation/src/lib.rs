//! Reference computations that the acceptance suite compares `aplab`
//! against. Everything here is deliberately naive: plain `f64` loops over
//! slices, no prefix sums, no parallelism, nothing shared with the library.

/// Mean of a nonempty slice, summed left to right.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// `max_{s<e} <w>_{[s,e)} · <w^{-1/(p-1)}>_{[s,e)}^{p-1}` by enumeration.
pub fn ap_characteristic(w: &[f64], p: f64) -> f64 {
    let dual: Vec<f64> = w.iter().map(|v| v.powf(-1.0 / (p - 1.0))).collect();
    let mut best = f64::NEG_INFINITY;
    for s in 0..w.len() {
        for e in (s + 1)..=w.len() {
            best = best.max(mean(&w[s..e]) * mean(&dual[s..e]).powf(p - 1.0));
        }
    }
    best
}

/// Largest mean absolute deviation over all intervals, by enumeration.
pub fn bmo_seminorm(f: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for s in 0..f.len() {
        for e in (s + 1)..=f.len() {
            let m = mean(&f[s..e]);
            let dev: Vec<f64> = f[s..e].iter().map(|x| (x - m).abs()).collect();
            best = best.max(mean(&dev));
        }
    }
    best
}

/// `Mf_i = max_{s <= i < e} <|f|>_{[s,e)}` for every cell, by enumeration.
pub fn maximal_function(f: &[f64]) -> Vec<f64> {
    let abs: Vec<f64> = f.iter().map(|x| x.abs()).collect();
    let n = f.len();
    (0..n)
        .map(|i| {
            let mut best = f64::NEG_INFINITY;
            for s in 0..=i {
                for e in (i + 1)..=n {
                    best = best.max(mean(&abs[s..e]));
                }
            }
            best
        })
        .collect()
}

/// Positive root of `(p-1)x^p - p x^{p-1} - 1`, the `L^p` norm of the
/// one-dimensional uncentered maximal operator, found by bisection.
pub fn unweighted_maximal_norm(p: f64) -> f64 {
    let g = |x: f64| (p - 1.0) * x.powf(p) - p * x.powf(p - 1.0) - 1.0;
    let (mut lo, mut hi) = (1.0, 2.0);
    while g(hi) <= 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Ordinary least-squares slope of `ys` against `xs`; `None` below two points.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let (mx, my) = (mean(xs), mean(ys));
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Number of representable doubles between two finite values of equal sign.
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
}
