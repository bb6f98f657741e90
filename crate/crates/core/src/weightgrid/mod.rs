//! Uniform grids on a symmetric window of the real line and the
//! piecewise-constant functions and weights that live on them.
//!
//! Cell `i` of a grid with half width `L` and `N` cells covers
//! `[-L + i*h, -L + (i+1)*h)` with `h = 2L/N`.

mod io;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dd::Dd;
use crate::error::{Error, Result};

pub use io::{read_grid_function, write_grid_function, write_grid_sidecar};

pub const DEFAULT_VALUE_FLOOR: f64 = 1e-12;
pub const DEFAULT_VALUE_CEILING: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_width: f64,
    n_cells: usize,
}

impl Grid {
    pub fn new(half_width: f64, n_cells: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half_width must be positive and finite, got {half_width}"
            )));
        }
        if n_cells < 2 || !n_cells.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_cells must be a power of two >= 2, got {n_cells}"
            )));
        }
        Ok(Grid {
            half_width,
            n_cells,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn cell_width(&self) -> f64 {
        2.0 * self.half_width / self.n_cells as f64
    }

    /// Left endpoint of cell `i`.
    pub fn cell_start(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.cell_width()
    }

    /// Midpoint of cell `i`. For even `n_cells` this is `±(k + 1/2)·h`, never 0.
    pub fn midpoint(&self, i: usize) -> f64 {
        let half = (self.n_cells / 2) as f64;
        (i as f64 - half + 0.5) * self.cell_width()
    }

    pub fn full_interval(&self) -> CellInterval {
        CellInterval {
            start: 0,
            end: self.n_cells,
        }
    }

    /// The grid with every cell split into two equal halves.
    pub fn refined(&self) -> Grid {
        Grid {
            half_width: self.half_width,
            n_cells: self.n_cells * 2,
        }
    }

    fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "grid(half_width={}, n_cells={})",
            self.half_width, self.n_cells
        )
    }
}

/// Half-open run of cells `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellInterval {
    pub start: usize,
    pub end: usize,
}

impl CellInterval {
    pub fn new(start: usize, end: usize, n_cells: usize) -> Result<Self> {
        if start < end && end <= n_cells {
            Ok(CellInterval { start, end })
        } else {
            Err(Error::InvalidInterval {
                start,
                end,
                n_cells,
            })
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.start <= cell && cell < self.end
    }
}

impl fmt::Display for CellInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

/// An exponent `p` in `(1, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LebesgueExponent(f64);

impl LebesgueExponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 1.0 {
            Ok(LebesgueExponent(p))
        } else {
            Err(Error::InvalidExponent(format!(
                "p must satisfy 1 < p < inf, got {p}"
            )))
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// `p' = p / (p - 1)`.
    pub fn conjugate(&self) -> LebesgueExponent {
        LebesgueExponent(self.0 / (self.0 - 1.0))
    }

    /// Exponent of the dual weight `w^{-1/(p-1)}`.
    pub fn dual_power(&self) -> f64 {
        -1.0 / (self.0 - 1.0)
    }
}

impl fmt::Display for LebesgueExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Real-valued piecewise-constant function on a [`Grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::CountMismatch {
                expected: grid.n_cells(),
                found: values.len(),
            });
        }
        if let Some((cell, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { cell, value });
        }
        Ok(GridFunction { grid, values })
    }

    pub fn constant(grid: Grid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.n_cells()])
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..grid.n_cells()).map(|i| f(grid.midpoint(i))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// The same function on the grid with every cell split in two.
    pub fn refined(&self) -> GridFunction {
        let values = self.values.iter().flat_map(|&v| [v, v]).collect();
        GridFunction {
            grid: self.grid.refined(),
            values,
        }
    }

    pub fn map(&self, op: PointwiseOp<'_>) -> Result<GridFunction> {
        pointwise_map(self, op)
    }
}

/// Lower and upper bounds every weight value must respect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueRange {
    pub floor: f64,
    pub ceiling: f64,
}

impl Default for ValueRange {
    fn default() -> Self {
        ValueRange {
            floor: DEFAULT_VALUE_FLOOR,
            ceiling: DEFAULT_VALUE_CEILING,
        }
    }
}

impl ValueRange {
    pub fn new(floor: f64, ceiling: f64) -> Result<Self> {
        if floor > 0.0 && floor < ceiling && ceiling.is_finite() {
            Ok(ValueRange { floor, ceiling })
        } else {
            Err(Error::InvalidParameter(format!(
                "value range needs 0 < floor < ceiling < inf, got [{floor}, {ceiling}]"
            )))
        }
    }

    pub fn check(&self, values: &[f64]) -> Result<()> {
        for (cell, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { cell, value });
            }
            if !(value >= self.floor && value <= self.ceiling) {
                return Err(Error::OutOfRange {
                    cell,
                    value,
                    floor: self.floor,
                    ceiling: self.ceiling,
                });
            }
        }
        Ok(())
    }
}

/// A strictly positive grid function whose values stay inside a [`ValueRange`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    function: GridFunction,
    range: ValueRange,
}

impl Weight {
    pub fn new(function: GridFunction) -> Result<Self> {
        Self::with_range(function, ValueRange::default())
    }

    pub fn with_range(function: GridFunction, range: ValueRange) -> Result<Self> {
        range.check(function.values())?;
        Ok(Weight { function, range })
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::new(GridFunction::new(grid, values)?)
    }

    pub fn constant(grid: Grid, value: f64) -> Result<Self> {
        Self::new(GridFunction::constant(grid, value)?)
    }

    pub fn grid(&self) -> &Grid {
        self.function.grid()
    }

    pub fn values(&self) -> &[f64] {
        self.function.values()
    }

    pub fn range(&self) -> ValueRange {
        self.range
    }

    pub fn as_function(&self) -> &GridFunction {
        &self.function
    }

    pub fn into_function(self) -> GridFunction {
        self.function
    }

    /// Cellwise power `w^r`, re-checked against this weight's range.
    pub fn powf(&self, r: f64) -> Result<Weight> {
        let f = pointwise_map(&self.function, PointwiseOp::Power(r))?;
        Weight::with_range(f, self.range)
    }

    /// The dual weight `w^{-1/(p-1)}`.
    pub fn dual(&self, p: LebesgueExponent) -> Result<Weight> {
        self.powf(p.dual_power())
    }

    pub fn scaled(&self, lambda: f64) -> Result<Weight> {
        let f = pointwise_map(&self.function, PointwiseOp::Scale(lambda))?;
        Weight::with_range(f, self.range)
    }

    pub fn ratio(&self, other: &Weight) -> Result<Weight> {
        let f = pointwise_map(&self.function, PointwiseOp::Divide(&other.function))?;
        Weight::with_range(f, self.range)
    }

    pub fn log(&self) -> GridFunction {
        // positive by construction
        let values = self.values().iter().map(|v| v.ln()).collect();
        GridFunction {
            grid: *self.grid(),
            values,
        }
    }

    pub fn refined(&self) -> Weight {
        Weight {
            function: self.function.refined(),
            range: self.range,
        }
    }
}

/// Cellwise operations on grid functions.
#[derive(Debug, Clone, Copy)]
pub enum PointwiseOp<'a> {
    Log,
    Exp,
    Power(f64),
    Abs,
    Scale(f64),
    Add(&'a GridFunction),
    Divide(&'a GridFunction),
}

pub fn pointwise_map(f: &GridFunction, op: PointwiseOp<'_>) -> Result<GridFunction> {
    let xs = f.values();
    let values: Vec<f64> = match op {
        PointwiseOp::Log => {
            if let Some((cell, _)) = xs.iter().enumerate().find(|(_, &v)| v <= 0.0) {
                return Err(Error::Domain {
                    cell,
                    reason: "log of a nonpositive value".into(),
                });
            }
            xs.iter().map(|v| v.ln()).collect()
        }
        PointwiseOp::Exp => xs.iter().map(|v| v.exp()).collect(),
        PointwiseOp::Power(r) => {
            if let Some((cell, _)) = xs.iter().enumerate().find(|(_, &v)| v < 0.0) {
                return Err(Error::Domain {
                    cell,
                    reason: format!("real power {r} of a negative value"),
                });
            }
            xs.iter().map(|v| power(*v, r)).collect()
        }
        PointwiseOp::Abs => xs.iter().map(|v| v.abs()).collect(),
        PointwiseOp::Scale(lambda) => xs.iter().map(|v| lambda * v).collect(),
        PointwiseOp::Add(g) => {
            f.grid().ensure_same(g.grid())?;
            xs.iter().zip(g.values()).map(|(a, b)| a + b).collect()
        }
        PointwiseOp::Divide(g) => {
            f.grid().ensure_same(g.grid())?;
            if let Some((cell, _)) = g.values().iter().enumerate().find(|(_, &v)| v <= 0.0) {
                return Err(Error::Domain {
                    cell,
                    reason: "division by a nonpositive value".into(),
                });
            }
            xs.iter().zip(g.values()).map(|(a, b)| a / b).collect()
        }
    };
    GridFunction::new(*f.grid(), values)
}

/// `x^r`, with correctly rounded shortcuts for `r` in `{0, 1, -1, 2, 1/2}`.
pub(crate) fn power(x: f64, r: f64) -> f64 {
    if r == 1.0 {
        x
    } else if r == 0.0 {
        1.0
    } else if r == -1.0 {
        1.0 / x
    } else if r == 2.0 {
        x * x
    } else if r == 0.5 && x >= 0.0 {
        x.sqrt()
    } else {
        x.powf(r)
    }
}

/// `w_i = |midpoint(i)|^alpha`.
pub fn make_power_weight(grid: Grid, alpha: f64) -> Result<Weight> {
    make_power_weight_with_range(grid, alpha, ValueRange::default())
}

pub fn make_power_weight_with_range(grid: Grid, alpha: f64, range: ValueRange) -> Result<Weight> {
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "alpha must be finite, got {alpha}"
        )));
    }
    let values = (0..grid.n_cells())
        .map(|i| power(grid.midpoint(i).abs(), alpha))
        .collect();
    Weight::with_range(GridFunction::new(grid, values)?, range)
}

/// `w_t = w0 · exp(t·phi)`, evaluated in double-double so each cell is
/// rounded once; `t = 0` returns `w0` bit for bit.
pub fn perturb_weight(w0: &Weight, phi: &GridFunction, t: f64) -> Result<Weight> {
    w0.grid().ensure_same(phi.grid())?;
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t must be finite, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(w0.clone());
    }
    let values = w0
        .values()
        .iter()
        .zip(phi.values())
        .map(|(&w, &f)| {
            let v = Dd::product(t, f).exp().scale_by(w);
            v.hi + v.lo
        })
        .collect();
    Weight::with_range(GridFunction::new(*w0.grid(), values)?, w0.range())
}
