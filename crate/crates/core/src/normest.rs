//! Certified lower bounds for `‖M‖_{L^p(w) → L^p(w)}`.
//!
//! Every candidate test function `f` gives the true ratio
//! `‖Mf‖_{L^p(w)} / ‖f‖_{L^p(w)}`, so the best ratio found is a lower bound
//! for the norm of the discrete operator. The search evaluates a fixed pool
//! of candidates and then polishes the best one by multiplicative coordinate
//! ascent. Only nonnegative test functions are used: `M` and the norm both
//! depend on `|f|` alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::maximal::{lp_norm_raw, maximal_values};
use crate::weightgrid::{power, GridFunction, LebesgueExponent, Weight};

pub const TAG_CONSTANT: &str = "constant";
pub const TAG_INDICATOR: &str = "indicator";
pub const TAG_PROFILE: &str = "profile";
pub const TAG_DUAL_INDICATOR: &str = "dual-indicator";
pub const TAG_DUAL_PROFILE: &str = "dual-profile";
pub const TAG_RANDOM: &str = "random";

#[derive(Debug, Clone, PartialEq)]
pub struct PoolConfig {
    /// `f ≡ 1`.
    pub constant: bool,
    /// Indicators of the dyadic intervals of length `N / 2^k`, `k < indicator_levels`.
    pub indicator_levels: usize,
    /// Singularity profiles `(|x - a| + h)^{-θ}` with `h` the cell width.
    pub profiles: bool,
    /// Number of equally spaced centers `a` across the closed window.
    pub profile_centers: usize,
    pub profile_thetas: Vec<f64>,
    /// Also include indicators and profiles multiplied by `w^{-1/(p-1)}`.
    pub dual_weighted: bool,
    /// Functions with i.i.d. log-uniform values in `[10^-2, 10^2]`.
    pub random: usize,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig {
            constant: true,
            indicator_levels: 6,
            profiles: true,
            profile_centers: 9,
            profile_thetas: default_thetas(),
            dual_weighted: true,
            random: 8,
        }
    }
}

fn default_thetas() -> Vec<f64> {
    let mut t: Vec<f64> = (1..=19).map(|k| k as f64 * 0.05).collect();
    t.extend([0.975, 0.99]);
    t
}

impl PoolConfig {
    pub fn empty() -> Self {
        PoolConfig {
            constant: false,
            indicator_levels: 0,
            profiles: false,
            profile_centers: 0,
            profile_thetas: Vec::new(),
            dual_weighted: false,
            random: 0,
        }
    }

    pub fn constant_only() -> Self {
        PoolConfig {
            constant: true,
            ..Self::empty()
        }
    }

    /// Names of the candidate families this configuration produces.
    pub fn tags(&self) -> Vec<String> {
        let has_profiles =
            self.profiles && self.profile_centers > 0 && !self.profile_thetas.is_empty();
        let mut tags = Vec::new();
        if self.constant {
            tags.push(TAG_CONSTANT);
        }
        if self.indicator_levels > 0 {
            tags.push(TAG_INDICATOR);
        }
        if has_profiles {
            tags.push(TAG_PROFILE);
        }
        if self.dual_weighted && self.indicator_levels > 0 {
            tags.push(TAG_DUAL_INDICATOR);
        }
        if self.dual_weighted && has_profiles {
            tags.push(TAG_DUAL_PROFILE);
        }
        if self.random > 0 {
            tags.push(TAG_RANDOM);
        }
        tags.into_iter().map(String::from).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub pool: PoolConfig,
    /// Maximum number of quotient evaluations spent in coordinate ascent.
    pub budget: usize,
    pub step_multipliers: Vec<f64>,
    /// A full ascent sweep improving the ratio by less than this (relative) stops the search.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            pool: PoolConfig::default(),
            budget: 1000,
            step_multipliers: vec![2.0, 0.5, 1.1, 1.0 / 1.1],
            tolerance: 1e-6,
            seed: 0,
        }
    }
}

impl EstimatorConfig {
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_pool(mut self, pool: PoolConfig) -> Self {
        self.pool = pool;
        self
    }

    fn validate(&self) -> Result<()> {
        if let Some(m) = self
            .step_multipliers
            .iter()
            .find(|m| !(m.is_finite() && **m > 0.0 && **m != 1.0))
        {
            return Err(Error::InvalidParameter(format!(
                "step multipliers must be positive, finite and != 1, got {m}"
            )));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be >= 0, got {}",
                self.tolerance
            )));
        }
        if let Some(t) = self
            .pool
            .profile_thetas
            .iter()
            .find(|t| !(t.is_finite() && **t > 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "profile exponents must be positive, got {t}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub lower_bound: f64,
    pub witness: GridFunction,
    /// Family of the pool candidate the search started from.
    pub witness_tag: String,
    pub evaluations: usize,
    pub ascent_moves: usize,
    pub pool_tags: Vec<String>,
    pub seed: u64,
}

/// `‖Mf‖_{L^p(w)} / ‖f‖_{L^p(w)}`.
pub fn rayleigh_quotient(f: &GridFunction, w: &Weight, p: LebesgueExponent) -> Result<f64> {
    if f.grid() != w.grid() {
        return Err(Error::GridMismatch {
            left: f.grid().to_string(),
            right: w.grid().to_string(),
        });
    }
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    Ok(quotient(&abs, w.values(), p.value(), f.grid().cell_width()))
}

fn quotient(abs: &[f64], w: &[f64], p: f64, cell_width: f64) -> f64 {
    let mf = maximal_values(abs);
    lp_norm_raw(&mf, w, p, cell_width) / lp_norm_raw(abs, w, p, cell_width)
}

struct Candidate {
    tag: &'static str,
    values: Vec<f64>,
}

fn normalized(tag: &'static str, mut values: Vec<f64>) -> Option<Candidate> {
    let max = values.iter().fold(0.0f64, |m, v| m.max(*v));
    if !(max > 0.0 && max.is_finite()) {
        return None;
    }
    for v in &mut values {
        *v /= max;
    }
    Some(Candidate { tag, values })
}

fn build_pool(w: &Weight, p: LebesgueExponent, cfg: &EstimatorConfig) -> Vec<Candidate> {
    let pool = &cfg.pool;
    let grid = *w.grid();
    let n = grid.n_cells();
    let h = grid.cell_width();
    let dual: Vec<f64> = w
        .values()
        .iter()
        .map(|&v| power(v, p.dual_power()))
        .collect();
    let with_dual =
        |values: &[f64]| -> Vec<f64> { values.iter().zip(&dual).map(|(a, b)| a * b).collect() };

    let mut plain = Vec::new();
    let mut dual_weighted = Vec::new();

    if pool.constant {
        plain.extend(normalized(TAG_CONSTANT, vec![1.0; n]));
    }

    for level in 0..pool.indicator_levels {
        let pieces = 1usize << level;
        if pieces > n {
            break;
        }
        let len = n / pieces;
        for k in 0..pieces {
            let mut v = vec![0.0; n];
            v[k * len..(k + 1) * len].fill(1.0);
            if pool.dual_weighted {
                dual_weighted.extend(normalized(TAG_DUAL_INDICATOR, with_dual(&v)));
            }
            plain.extend(normalized(TAG_INDICATOR, v));
        }
    }

    if pool.profiles && pool.profile_centers > 0 {
        let centers: Vec<f64> = if pool.profile_centers == 1 {
            vec![0.0]
        } else {
            let span = 2.0 * grid.half_width();
            (0..pool.profile_centers)
                .map(|k| -grid.half_width() + span * k as f64 / (pool.profile_centers - 1) as f64)
                .collect()
        };
        for &a in &centers {
            for &theta in &pool.profile_thetas {
                let v: Vec<f64> = (0..n)
                    .map(|i| ((grid.midpoint(i) - a).abs() + h).powf(-theta))
                    .collect();
                if pool.dual_weighted {
                    dual_weighted.extend(normalized(TAG_DUAL_PROFILE, with_dual(&v)));
                }
                plain.extend(normalized(TAG_PROFILE, v));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ln100 = 100f64.ln();
    for _ in 0..pool.random {
        let v: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(-ln100..=ln100).exp())
            .collect();
        plain.extend(normalized(TAG_RANDOM, v));
    }

    plain.extend(dual_weighted);
    plain
}

pub fn estimate_norm(
    w: &Weight,
    p: LebesgueExponent,
    cfg: &EstimatorConfig,
) -> Result<NormEstimate> {
    cfg.validate()?;
    let pool = build_pool(w, p, cfg);
    if pool.is_empty() && cfg.budget == 0 {
        return Err(Error::EmptySearch);
    }
    let grid = *w.grid();
    let n = grid.n_cells();
    let h = grid.cell_width();
    let weights = w.values();
    let pv = p.value();

    let scores: Vec<f64> = pool
        .par_iter()
        .map(|c| quotient(&c.values, weights, pv, h))
        .collect();
    let mut evaluations = scores.len();

    // first index wins ties
    let (mut current, mut best, tag) =
        match scores
            .iter()
            .enumerate()
            .fold(None::<(usize, f64)>, |acc, (i, &s)| match acc {
                Some((_, b)) if s <= b => acc,
                _ => Some((i, s)),
            }) {
            Some((i, s)) => (pool[i].values.clone(), s, pool[i].tag),
            None => {
                let start = vec![1.0; n];
                let s = quotient(&start, weights, pv, h);
                evaluations += 1;
                (start, s, TAG_CONSTANT)
            }
        };

    let mut spent = 0usize;
    let mut moves = 0usize;
    'ascent: while spent < cfg.budget {
        let sweep_start = best;
        let mut order: Vec<usize> = (0..n).filter(|&i| current[i] > 0.0).collect();
        let mass: Vec<f64> = current
            .iter()
            .zip(weights)
            .map(|(f, wi)| wi * f.powf(pv))
            .collect();
        order.sort_by(|&a, &b| mass[b].total_cmp(&mass[a]).then(a.cmp(&b)));

        for i in order {
            let original = current[i];
            let mut best_move: Option<(f64, f64)> = None;
            for &m in &cfg.step_multipliers {
                if spent >= cfg.budget {
                    break;
                }
                current[i] = original * m;
                let s = quotient(&current, weights, pv, h);
                spent += 1;
                if s > best_move.map_or(best, |(b, _)| b) {
                    best_move = Some((s, current[i]));
                }
            }
            match best_move {
                Some((s, v)) => {
                    current[i] = v;
                    best = s;
                    moves += 1;
                }
                None => current[i] = original,
            }
            if spent >= cfg.budget {
                break 'ascent;
            }
        }
        if (best - sweep_start) <= cfg.tolerance * sweep_start {
            break;
        }
    }
    evaluations += spent;

    Ok(NormEstimate {
        lower_bound: best,
        witness: GridFunction::new(grid, current)?,
        witness_tag: tag.to_string(),
        evaluations,
        ascent_moves: moves,
        pool_tags: cfg.pool.tags(),
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weightgrid::Grid;

    fn p2() -> LebesgueExponent {
        LebesgueExponent::new(2.0).unwrap()
    }

    #[test]
    fn quotient_examples() {
        let g = Grid::new(1.0, 4).unwrap();
        let one = Weight::constant(g, 1.0).unwrap();
        let w = Weight::from_values(g, vec![0.3, 2.0, 1.0, 9.0]).unwrap();
        let c = GridFunction::constant(g, 1.0).unwrap();
        for p in [1.5, 2.0, 3.0] {
            let p = LebesgueExponent::new(p).unwrap();
            assert_eq!(rayleigh_quotient(&c, &w, p).unwrap(), 1.0);
        }
        let f = GridFunction::new(g, vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        let q = rayleigh_quotient(&f, &one, p2()).unwrap();
        assert!((q - (58.0f64 / 36.0).sqrt()).abs() <= 1e-15, "{q}");
        let scaled = GridFunction::new(g, vec![0.0, 0.0, -7.5, 0.0]).unwrap();
        assert_eq!(rayleigh_quotient(&scaled, &one, p2()).unwrap(), q);
    }

    #[test]
    fn quotient_errors() {
        let g = Grid::new(1.0, 4).unwrap();
        let one = Weight::constant(g, 1.0).unwrap();
        let zero = GridFunction::constant(g, 0.0).unwrap();
        assert_eq!(
            rayleigh_quotient(&zero, &one, p2()),
            Err(Error::ZeroFunction)
        );
        let other = GridFunction::constant(Grid::new(1.0, 8).unwrap(), 1.0).unwrap();
        assert!(matches!(
            rayleigh_quotient(&other, &one, p2()),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn constant_pool_without_ascent() {
        let g = Grid::new(1.0, 64).unwrap();
        let one = Weight::constant(g, 1.0).unwrap();
        let cfg = EstimatorConfig::default()
            .with_pool(PoolConfig::constant_only())
            .with_budget(0);
        let est = estimate_norm(&one, p2(), &cfg).unwrap();
        assert_eq!(est.lower_bound, 1.0);
        assert_eq!(est.evaluations, 1);
        assert_eq!(est.pool_tags, vec!["constant".to_string()]);
    }

    #[test]
    fn empty_search_rejected() {
        let g = Grid::new(1.0, 8).unwrap();
        let one = Weight::constant(g, 1.0).unwrap();
        let cfg = EstimatorConfig::default()
            .with_pool(PoolConfig::empty())
            .with_budget(0);
        assert_eq!(estimate_norm(&one, p2(), &cfg), Err(Error::EmptySearch));
        let cfg = cfg.with_budget(10);
        let est = estimate_norm(&one, p2(), &cfg).unwrap();
        assert!(est.lower_bound >= 1.0);
    }

    #[test]
    fn invalid_config_rejected() {
        let g = Grid::new(1.0, 8).unwrap();
        let one = Weight::constant(g, 1.0).unwrap();
        let cfg = EstimatorConfig {
            step_multipliers: vec![2.0, 1.0],
            ..Default::default()
        };
        assert!(matches!(
            estimate_norm(&one, p2(), &cfg),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn ascent_improves_and_witness_reevaluates() {
        let g = Grid::new(1.0, 64).unwrap();
        let w = crate::weightgrid::make_power_weight(g, 0.4).unwrap();
        let pool_only = EstimatorConfig::default().with_budget(0);
        let base = estimate_norm(&w, p2(), &pool_only).unwrap();
        let est = estimate_norm(&w, p2(), &pool_only.clone().with_budget(400)).unwrap();
        assert!(est.lower_bound >= base.lower_bound);
        assert!(est.evaluations <= base.evaluations + 400);
        let again = rayleigh_quotient(&est.witness, &w, p2()).unwrap();
        assert_eq!(again, est.lower_bound);
    }
}
