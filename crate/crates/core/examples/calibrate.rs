//! Times the unweighted `L^2` norm estimate. Usage: `calibrate [N] [budget]`.

use std::time::Instant;

use aplab_core::{estimate_norm, EstimatorConfig, Grid, LebesgueExponent, Weight};

fn main() {
    let n: usize = std::env::args().nth(1).map_or(2048, |s| s.parse().unwrap());
    let budget: usize = std::env::args().nth(2).map_or(0, |s| s.parse().unwrap());
    let g = Grid::new(1.0, n).unwrap();
    let one = Weight::constant(g, 1.0).unwrap();
    let p = LebesgueExponent::new(2.0).unwrap();
    let t = Instant::now();
    let est = estimate_norm(&one, p, &EstimatorConfig::default().with_budget(budget)).unwrap();
    println!(
        "n={n} budget={budget} lb={} tag={} evals={} moves={} {:?}",
        est.lower_bound,
        est.witness_tag,
        est.evaluations,
        est.ascent_moves,
        t.elapsed()
    );
}
