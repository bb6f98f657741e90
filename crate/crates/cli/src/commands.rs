use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use aplab_core::experiments::{self, BUCKLEY_SLOPE_SLACK, DELTA_LINEARITY_TOL};
use aplab_core::weightgrid::{read_grid_function, write_grid_function};
use aplab_core::{
    ap_characteristic, apply_maximal, bmo_seminorm, dstar, estimate_norm, format_float,
    make_power_weight, EstimatorConfig, Grid, GridFunction, LebesgueExponent, PoolConfig, Weight,
};

use crate::args::{Command, EstimatorArgs, GridArgs, WeightArgs};

#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit code 1.
    Validation(String),
    /// A study found a contract violation; exit code 2.
    Contract(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Contract(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::Contract(m) => write!(f, "contract violation: {m}"),
        }
    }
}

impl From<aplab_core::Error> for CliError {
    fn from(e: aplab_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

impl GridArgs {
    fn grid(&self) -> CliResult<Grid> {
        Ok(Grid::new(self.half_width, self.n_cells)?)
    }
}

impl WeightArgs {
    fn load(&self) -> CliResult<Weight> {
        if let Some(path) = &self.weight {
            return Ok(Weight::new(read_grid_function(path)?)?);
        }
        let grid = self.grid.grid()?;
        if let Some(alpha) = self.power_alpha {
            return Ok(make_power_weight(grid, alpha)?);
        }
        Ok(Weight::constant(grid, self.constant.unwrap_or(1.0))?)
    }
}

impl EstimatorArgs {
    fn config(&self) -> EstimatorConfig {
        let mut pool = PoolConfig::default();
        if self.no_indicators {
            pool.indicator_levels = 0;
        }
        if self.no_profiles {
            pool.profiles = false;
        }
        if self.no_dual {
            pool.dual_weighted = false;
        }
        pool.random = self.random;
        EstimatorConfig::default()
            .with_pool(pool)
            .with_budget(self.budget)
            .with_seed(self.seed)
    }
}

fn exponent(p: f64) -> CliResult<LebesgueExponent> {
    Ok(LebesgueExponent::new(p)?)
}

fn load_function(input: &Option<PathBuf>, weight: &WeightArgs) -> CliResult<GridFunction> {
    match input {
        Some(path) => Ok(read_grid_function(path)?),
        None => Ok(weight.load()?.into_function()),
    }
}

fn out_file(dir: &Path, name: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir)?;
    Ok(dir.join(name))
}

/// Executes one subcommand. Results go to `stdout`; per-item warnings from a study go to `stderr`.
pub fn run(
    command: Command,
    stdout: &mut (dyn Write + Send),
    stderr: &mut (dyn Write + Send),
) -> CliResult<()> {
    match command {
        Command::ApChar { weight, p } => {
            let r = ap_characteristic(&weight.load()?, exponent(p)?)?;
            writeln!(stdout, "{}", format_float(r.value))?;
            writeln!(stdout, "witness {}", r.witness)?;
        }
        Command::Bmo { input, weight } => {
            let r = bmo_seminorm(&load_function(&input, &weight)?);
            writeln!(stdout, "{}", format_float(r.value))?;
            writeln!(stdout, "witness {}", r.witness)?;
        }
        Command::Dstar { u, v } => {
            let u = Weight::new(read_grid_function(u)?)?;
            let v = Weight::new(read_grid_function(v)?)?;
            writeln!(stdout, "{}", format_float(dstar(&u, &v)?))?;
        }
        Command::Maxop { input, weight, out } => {
            let mf = apply_maximal(&load_function(&input, &weight)?);
            let path = out_file(&out, "maxop.csv")?;
            write_grid_function(&mf.values, &path)?;
            writeln!(stdout, "wrote {}", path.display())?;
        }
        Command::NormEst {
            weight,
            p,
            estimator,
            out,
        } => {
            let w = weight.load()?;
            let est = estimate_norm(&w, exponent(p)?, &estimator.config())?;
            let path = out_file(&out, "norm_witness.csv")?;
            write_grid_function(&est.witness, &path)?;
            writeln!(stdout, "lower_bound {}", format_float(est.lower_bound))?;
            writeln!(stdout, "witness_tag {}", est.witness_tag)?;
            writeln!(stdout, "evaluations {}", est.evaluations)?;
            writeln!(stdout, "ascent_moves {}", est.ascent_moves)?;
            writeln!(stdout, "seed {}", est.seed)?;
            writeln!(stdout, "pool {}", est.pool_tags.join(","))?;
            writeln!(stdout, "wrote {}", path.display())?;
        }
        Command::Sweep {
            weight,
            phi,
            step_height,
            t_list,
            p,
            estimator,
            timings,
            out,
        } => {
            let w0 = weight.load()?;
            let phi = match phi {
                Some(path) => read_grid_function(path)?,
                None => experiments::step_function(*w0.grid(), step_height)?,
            };
            let mut report = experiments::continuity_sweep(
                &w0,
                &phi,
                &t_list,
                exponent(p)?,
                &estimator.config(),
            )?;
            if !timings {
                report.rows.iter_mut().for_each(|r| r.runtime_ms = 0);
            }
            let path = out_file(&out, "sweep.csv")?;
            experiments::write_sweep_csv(&report.rows, &path)?;
            for s in &report.skipped {
                writeln!(stderr, "skipped t={}: {}", format_float(s.t), s.reason)?;
            }
            writeln!(stdout, "wrote {}", path.display())?;
            let bad = report.delta_linearity_violations(DELTA_LINEARITY_TOL);
            if !bad.is_empty() {
                return Err(CliError::Contract(format!(
                    "{} rows with delta != t·‖phi‖_* (‖phi‖_* = {})",
                    bad.len(),
                    format_float(report.phi_bmo)
                )));
            }
        }
        Command::HolderScan {
            grid,
            weight,
            w0,
            pairs,
            log_spread,
            seed,
            p_list,
            r_list,
            out,
        } => {
            let pair_list = match (weight, w0) {
                (Some(w), Some(w0)) => vec![(
                    Weight::new(read_grid_function(w)?)?,
                    Weight::new(read_grid_function(w0)?)?,
                )],
                _ => {
                    let ws =
                        experiments::random_weights(grid.grid()?, 2 * pairs, log_spread, seed)?;
                    ws.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect()
                }
            };
            let mut rows = Vec::new();
            let mut violations = 0;
            for &p in &p_list {
                let report = experiments::holder_chain_scan(&pair_list, exponent(p)?, &r_list)?;
                for (id, r, e) in &report.errors {
                    writeln!(stderr, "pair {id} R={}: {e}", format_float(*r))?;
                }
                violations += report.violations().len();
                rows.extend(report.rows);
            }
            let path = out_file(&out, "holder.csv")?;
            experiments::write_holder_csv(&rows, &path)?;
            writeln!(stdout, "rows {}", rows.len())?;
            writeln!(stdout, "violations {violations}")?;
            writeln!(stdout, "wrote {}", path.display())?;
            if violations > 0 {
                return Err(CliError::Contract(format!(
                    "{violations} Hölder-chain records with lhs > rhs·(1+1e-9)"
                )));
            }
        }
        Command::Buckley {
            grid,
            alpha_list,
            p,
            estimator,
            out,
        } => {
            let report = experiments::buckley_study(
                &alpha_list,
                exponent(p)?,
                grid.grid()?,
                &estimator.config(),
            )?;
            let path = out_file(&out, "buckley.csv")?;
            experiments::write_buckley_csv(&report.rows, &path)?;
            match report.slope {
                Some(s) => writeln!(stdout, "slope {}", format_float(s))?,
                None => writeln!(stdout, "slope none")?,
            }
            writeln!(stdout, "exponent {}", format_float(report.exponent))?;
            writeln!(stdout, "wrote {}", path.display())?;
            if !report.slope_within(BUCKLEY_SLOPE_SLACK) {
                return Err(CliError::Contract(format!(
                    "log-log slope {} exceeds 1/(p-1) + {BUCKLEY_SLOPE_SLACK}",
                    format_float(report.slope.unwrap_or(f64::NAN))
                )));
            }
        }
        Command::MetricAudit {
            grid,
            trials,
            weights,
            log_spread,
            seed,
            out,
        } => {
            let population = experiments::random_weights(grid.grid()?, weights, log_spread, seed)?;
            let report = experiments::metric_axioms_audit(&population, trials, seed)?;
            let path = out_file(&out, "metric_audit.csv")?;
            experiments::write_audit_csv(&report.records, &path)?;
            writeln!(stdout, "checks {}", report.records.len())?;
            writeln!(stdout, "violations {}", report.violations())?;
            writeln!(stdout, "wrote {}", path.display())?;
            if report.violations() > 0 {
                return Err(CliError::Contract(format!(
                    "{} metric-axiom checks failed",
                    report.violations()
                )));
            }
        }
    }
    Ok(())
}
