//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs with `harness = false` so the criteria report in order and all of
//! them run even when one fails; the process exits nonzero if any failed.
//! Every tolerance is a named constant next to the check that uses it.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use aplab_cli::run_with_args;
use aplab_core::experiments::{holder_chain_scan, metric_axioms_audit, random_weights};
use aplab_core::{
    ap_characteristic, apply_maximal, bmo_seminorm, dstar, estimate_norm, make_power_weight,
    EstimatorConfig, Grid, GridFunction, LebesgueExponent, Weight,
};
use aplab_validation as oracle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

const P_VALUES: [f64; 3] = [1.5, 2.0, 3.0];

struct Verdict {
    pass: bool,
    detail: String,
}

type Check = Result<Verdict, String>;
type Criterion = fn() -> Check;

fn verdict(pass: bool, detail: String) -> Check {
    Ok(Verdict { pass, detail })
}

fn grid(n: usize) -> Grid {
    Grid::new(1.0, n).expect("valid grid")
}

fn exponent(p: f64) -> LebesgueExponent {
    LebesgueExponent::new(p).expect("valid exponent")
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn words(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

fn sci(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.2e}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Runs the CLI in process and returns `(exit code, stdout, stderr)`.
fn cli(args: &[&str], threads: Option<usize>) -> (i32, String, String) {
    let mut argv = vec!["aplab"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with_args(argv, threads, &mut out, &mut err);
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}

fn read_csv(path: &Path) -> Result<Vec<Vec<f64>>, String> {
    let mut reader = csv::Reader::from_path(path).map_err(e)?;
    reader
        .records()
        .map(|r| {
            let r = r.map_err(e)?;
            r.iter().map(|x| x.parse::<f64>().map_err(e)).collect()
        })
        .collect()
}

fn random_log_weight(n: usize, rng: &mut ChaCha8Rng) -> Weight {
    let values = (0..n).map(|_| rng.gen_range(-2.0..=2.0f64).exp()).collect();
    Weight::from_values(grid(n), values).expect("weight in range")
}

fn constant_weight_identity() -> Check {
    const TOL: f64 = 1e-12;
    const LIMIT: Duration = Duration::from_secs(1);
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for p in P_VALUES {
        for n in [2usize, 256, 4096] {
            let start = Instant::now();
            let line = format!("ap-char --const 1 --n-cells {n} --p {p}");
            let (code, out, err) = cli(&words(&line), None);
            slowest = slowest.max(start.elapsed());
            if code != 0 {
                return Err(format!("ap-char exited {code}: {err}"));
            }
            let value: f64 = out.lines().next().unwrap_or("").parse().map_err(e)?;
            worst = worst.max((value - 1.0).abs());
        }
    }
    verdict(
        worst <= TOL && slowest < LIMIT,
        format!("max |value-1| = {worst:e}, slowest run {slowest:.2?}"),
    )
}

fn two_cell_oracle() -> Check {
    const TOL: f64 = 1e-12;
    let w = Weight::from_values(grid(2), vec![1.0, 4.0]).map_err(e)?;
    let ap = ap_characteristic(&w, exponent(2.0)).map_err(e)?;
    let ap_ok = (ap.value - 25.0 / 16.0).abs() <= TOL * 25.0 / 16.0
        && (ap.witness.start, ap.witness.end) == (0, 2);
    let step = GridFunction::new(grid(2), vec![0.0, 1.0]).map_err(e)?;
    let bmo = bmo_seminorm(&step).value;
    let one = Weight::constant(grid(2), 1.0).map_err(e)?;
    let v = Weight::from_values(grid(2), vec![1.0, 2f64.exp()]).map_err(e)?;
    let d = dstar(&one, &v).map_err(e)?;
    verdict(
        ap_ok && (bmo - 0.5).abs() <= TOL && (d - 1.0).abs() <= TOL,
        format!(
            "[w]_A2 = {:?} on {}, BMO = {bmo:?}, d_* = {d:?}",
            ap.value, ap.witness
        ),
    )
}

fn jensen_floor_and_scaling() -> Check {
    const FLOOR: f64 = 1.0 - 1e-12;
    const MAX_ULPS: u64 = 2;
    const LIMIT: Duration = Duration::from_secs(30);
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut below_floor = 0;
    let mut worst_ulps = 0;
    let mut over = 0;
    for _ in 0..1000 {
        let w = random_log_weight(256, &mut rng);
        for p in P_VALUES {
            let base = ap_characteristic(&w, exponent(p)).map_err(e)?.value;
            if base < FLOOR {
                below_floor += 1;
            }
            for lambda in [1e-3, 1e3] {
                let scaled = w.scaled(lambda).map_err(e)?;
                let v = ap_characteristic(&scaled, exponent(p)).map_err(e)?.value;
                let d = oracle::ulp_distance(base, v);
                worst_ulps = worst_ulps.max(d);
                if d > MAX_ULPS {
                    over += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        below_floor == 0 && over == 0 && elapsed < LIMIT,
        format!(
            "{below_floor} below floor, {over} scalings beyond {MAX_ULPS} ulp (worst {worst_ulps}), {elapsed:.1?}"
        ),
    )
}

fn holder_chain() -> Check {
    const LIMIT: Duration = Duration::from_secs(60);
    let start = Instant::now();
    let population = random_weights(grid(256), 200, 1.0, 4).map_err(e)?;
    let pairs: Vec<(Weight, Weight)> = population
        .chunks(2)
        .map(|c| (c[0].clone(), c[1].clone()))
        .collect();
    let (mut rows, mut violations, mut errors) = (0, 0, 0);
    for p in P_VALUES {
        let report = holder_chain_scan(&pairs, exponent(p), &[2.0, 4.0, 8.0]).map_err(e)?;
        rows += report.rows.len();
        violations += report.violations().len();
        errors += report.errors.len();
    }
    let elapsed = start.elapsed();
    verdict(
        rows == 900 && violations == 0 && errors == 0 && elapsed < LIMIT,
        format!("{rows} records, {violations} violations, {errors} out of range, {elapsed:.1?}"),
    )
}

fn metric_axioms() -> Check {
    let population = random_weights(grid(128), 32, 2.0, 5).map_err(e)?;
    let report = metric_axioms_audit(&population, 1000, 5).map_err(e)?;
    let trials = report
        .records
        .iter()
        .map(|r| r.trial)
        .max()
        .map_or(0, |t| t + 1);
    let worst_scaling = report
        .records
        .iter()
        .filter(|r| r.check.name() == "scaling")
        .map(|r| r.lhs)
        .fold(0.0, f64::max);
    verdict(
        trials == 1000 && report.violations() == 0,
        format!(
            "{trials} triples, {} failed checks, max d_*(w, λw) = {worst_scaling:e}",
            report.violations()
        ),
    )
}

fn brute_force_equivalence() -> Check {
    const REL_TOL: f64 = 1e-12;
    let close =
        |a: f64, b: f64| (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut compared = 0usize;
    let mut mismatches = 0usize;
    for n in [2usize, 4, 8, 16] {
        for _ in 0..200 {
            let w = random_log_weight(n, &mut rng);
            for p in P_VALUES {
                let got = ap_characteristic(&w, exponent(p)).map_err(e)?.value;
                mismatches += usize::from(!close(got, oracle::ap_characteristic(w.values(), p)));
                compared += 1;
            }
            let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let gf = GridFunction::new(grid(n), f.clone()).map_err(e)?;
            mismatches += usize::from(!close(bmo_seminorm(&gf).value, oracle::bmo_seminorm(&f)));
            let mf = apply_maximal(&gf);
            for (a, b) in mf.values.values().iter().zip(oracle::maximal_function(&f)) {
                mismatches += usize::from(!close(*a, b));
            }
            compared += 1 + n;
        }
    }
    verdict(
        mismatches == 0,
        format!("{compared} values compared, {mismatches} mismatches"),
    )
}

fn power_weight_fidelity() -> Check {
    const CONTINUUM: f64 = 4.0 / 3.0;
    const BAND: (f64, f64) = (CONTINUUM * 0.95, CONTINUUM * 1.05);
    const REFINEMENT_TOL: f64 = 0.01;
    let value = |n: usize| -> Result<f64, String> {
        let w = make_power_weight(grid(n), 0.5).map_err(e)?;
        Ok(ap_characteristic(&w, exponent(2.0)).map_err(e)?.value)
    };
    let (coarse, fine) = (value(2048)?, value(4096)?);
    let change = (coarse - fine).abs() / fine;
    let in_band = (BAND.0..=BAND.1).contains(&coarse);
    verdict(
        in_band && change < REFINEMENT_TOL,
        format!(
            "N=2048: {coarse:.6} (band [{:.6}, {:.6}] {}), N=4096: {fine:.6}, change {:.3}%",
            BAND.0,
            BAND.1,
            if in_band { "met" } else { "missed" },
            100.0 * change
        ),
    )
}

fn unweighted_norm_estimate() -> Check {
    const LOWER: f64 = 2.0;
    const UPPER: f64 = 2.414214 + 1e-6;
    const LIMIT: Duration = Duration::from_secs(300);
    let root = oracle::unweighted_maximal_norm(2.0);
    if (root - 2.414214).abs() > 1e-6 {
        return Err(format!("root oracle gave {root}"));
    }
    let start = Instant::now();
    let w = Weight::constant(grid(2048), 1.0).map_err(e)?;
    let cfg = EstimatorConfig::default().with_budget(5000);
    let est = estimate_norm(&w, exponent(2.0), &cfg).map_err(e)?;
    let elapsed = start.elapsed();
    verdict(
        (LOWER..=UPPER).contains(&est.lower_bound) && elapsed < LIMIT,
        format!(
            "lower_bound {:.6} from {} ({} evaluations), oracle {root:.6}, {elapsed:.1?}",
            est.lower_bound, est.witness_tag, est.evaluations
        ),
    )
}

fn continuity_sweep() -> Check {
    const DELTA_TOL: f64 = 1e-10;
    const TERMINAL_GAP: f64 = 0.05;
    const LIMIT: Duration = Duration::from_secs(600);
    let dir = TempDir::new().map_err(e)?;
    let out = dir.path().to_str().ok_or("temp path")?;
    let start = Instant::now();
    let mut args = words("sweep --const 1 --n-cells 1024 --p 2 --step-height 2");
    args.extend(["--t-list", "0.2,0.1,0.05,0.025", "--out", out]);
    let (code, _, err) = cli(&args, None);
    let elapsed = start.elapsed();
    if code != 0 {
        return Err(format!("sweep exited {code}: {err}"));
    }
    let rows = read_csv(&dir.path().join("sweep.csv"))?;
    let (base, rest) = rows.split_last().ok_or("empty sweep")?;
    if base[0] != 0.0 || rest.len() != 4 {
        return Err(format!("unexpected rows {rows:?}"));
    }
    let delta_ok = rest.iter().all(|r| (r[1] - r[0]).abs() <= DELTA_TOL * r[0]);
    let ap_gaps: Vec<f64> = rest.iter().map(|r| (r[2] - base[2]).abs()).collect();
    let lb_gaps: Vec<f64> = rest.iter().map(|r| (r[3] - base[3]).abs()).collect();
    let nonincreasing = |g: &[f64]| g.windows(2).all(|w| w[1] <= w[0]);
    let terminal = ap_gaps[3] / base[2];
    verdict(
        delta_ok
            && nonincreasing(&ap_gaps)
            && terminal <= TERMINAL_GAP
            && nonincreasing(&lb_gaps)
            && elapsed < LIMIT,
        format!(
            "ap gaps {}, norm_lb gaps {}, terminal {:.3}%, {elapsed:.1?}",
            sci(&ap_gaps),
            sci(&lb_gaps),
            100.0 * terminal
        ),
    )
}

fn buckley_scaling() -> Check {
    const P: f64 = 2.0;
    const SLOPE_BOUND: f64 = 1.0 / (P - 1.0) + 0.2;
    const FIT_MIN_CHAR: f64 = 2.0;
    const LIMIT: Duration = Duration::from_secs(600);
    let dir = TempDir::new().map_err(e)?;
    let out = dir.path().to_str().ok_or("temp path")?;
    let start = Instant::now();
    let mut args = words("buckley --n-cells 2048 --p 2 --alpha-list 0.5,0.7,0.8,0.9");
    args.extend(["--out", out]);
    let (code, _, err) = cli(&args, None);
    let elapsed = start.elapsed();
    if code != 0 {
        return Err(format!("buckley exited {code}: {err}"));
    }
    let rows = read_csv(&dir.path().join("buckley.csv"))?;
    let increasing = rows.windows(2).all(|w| w[1][1] > w[0][1]);
    let fit: Vec<&Vec<f64>> = rows.iter().filter(|r| r[1] > FIT_MIN_CHAR).collect();
    let xs: Vec<f64> = fit.iter().map(|r| r[1].ln()).collect();
    let ys: Vec<f64> = fit.iter().map(|r| r[2].ln()).collect();
    let slope = oracle::least_squares_slope(&xs, &ys).ok_or("fewer than two fit rows")?;
    let chars: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    verdict(
        rows.len() == 4 && increasing && slope <= SLOPE_BOUND && elapsed < LIMIT,
        format!(
            "ap_char {chars:.4?}, slope {slope:.4} over {} rows, {elapsed:.1?}",
            fit.len()
        ),
    )
}

fn determinism() -> Check {
    let dir = TempDir::new().map_err(e)?;
    let weight = dir.path().join("w.csv");
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    aplab_core::weightgrid::write_grid_function(
        random_log_weight(64, &mut rng).as_function(),
        &weight,
    )
    .map_err(e)?;
    let weight = weight.to_str().ok_or("temp path")?.to_owned();
    let studies = [
        (
            "sweep --const 1 --n-cells 64 --budget 200".to_owned(),
            "sweep.csv",
        ),
        (
            format!("sweep --weight {weight} --budget 100 --t-list 0.3,0.1"),
            "sweep.csv",
        ),
        (
            "holder-scan --n-cells 64 --pairs 20 --p-list 1.5,2,3".to_owned(),
            "holder.csv",
        ),
        (
            "buckley --n-cells 128 --budget 200".to_owned(),
            "buckley.csv",
        ),
        (
            "metric-audit --n-cells 64 --trials 300 --seed 9".to_owned(),
            "metric_audit.csv",
        ),
        (
            format!("norm-est --weight {weight} --p 3 --budget 300"),
            "norm_witness.csv",
        ),
        (format!("maxop --weight {weight}"), "maxop.csv"),
    ];
    let mut differing = Vec::new();
    for (line, file) in &studies {
        let args = words(line);
        let mut outputs: Vec<Vec<u8>> = Vec::new();
        for threads in [None, Some(1), Some(2), Some(4), None] {
            let run_dir = TempDir::new().map_err(e)?;
            let mut full = args.clone();
            full.extend(["--out", run_dir.path().to_str().ok_or("temp path")?]);
            let (code, _, err) = cli(&full, threads);
            if code != 0 {
                return Err(format!("{} exited {code}: {err}", args[0]));
            }
            outputs.push(std::fs::read(run_dir.path().join(file)).map_err(e)?);
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            differing.push(args[0]);
        }
    }
    verdict(
        differing.is_empty(),
        format!(
            "{} studies x 5 runs (threads auto/1/2/4/auto), differing: {differing:?}",
            studies.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("constant-weight identity", constant_weight_identity),
        ("two-cell oracle", two_cell_oracle),
        ("Jensen floor and scaling", jensen_floor_and_scaling),
        ("Hölder-chain inequality", holder_chain),
        ("metric axioms", metric_axioms),
        ("brute-force equivalence", brute_force_equivalence),
        ("power-weight fidelity", power_weight_fidelity),
        ("unweighted norm estimate", unweighted_norm_estimate),
        ("continuity sweep", continuity_sweep),
        ("Buckley scaling", buckley_scaling),
        ("determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let (pass, detail) = match outcome {
            Ok(v) => (v.pass, v.detail),
            Err(msg) => (false, format!("error: {msg}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {detail}",
            if pass { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
