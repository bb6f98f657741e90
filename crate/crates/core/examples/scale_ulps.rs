//! Histogram of ulp distances between `[λw]_{A_p}` and `[w]_{A_p}` over random weights.

use aplab_core::experiments::random_weights;
use aplab_core::{ap_characteristic, ulps_between, Grid, LebesgueExponent};

fn main() {
    let g = Grid::new(1.0, 256).unwrap();
    let ws = random_weights(g, 1000, 2.0, 11).unwrap();
    for p in [1.5, 2.0, 3.0] {
        let p = LebesgueExponent::new(p).unwrap();
        let mut hist = [0usize; 8];
        for w in &ws {
            let base = ap_characteristic(w, p).unwrap().value;
            for lambda in [1e-3, 1e3] {
                let s = ap_characteristic(&w.scaled(lambda).unwrap(), p)
                    .unwrap()
                    .value;
                hist[(ulps_between(base, s) as usize).min(7)] += 1;
            }
        }
        println!("p={p} ulps histogram {hist:?}");
    }
}
